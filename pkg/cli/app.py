import argparse
import json
import hashlib
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from analysis.simulate import synthetic_price_frame, write_price_csv
from battery.clustering import cluster_markets_with_merges
from battery.models import MarketFactSummary
from battery.runner import run_market
from cli.plot_data import BOXPLOT_STATISTICS, PLOT_KINDS, STOCK_KINDS, PlotDataBuilder
from cli.report import render_report
from cli.writer import ResultWriter
from config import RunConfig, load_run_config, parse_threshold_overrides, resolve_relative
from errors import (
    EmptySeriesError,
    FormatError,
    ManifestError,
    RowError,
    StylizedFactsError,
)
from ingest.manifest import ManifestEntry, MarketManifest, load_manifests, write_manifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

INPUT_ERRORS = (FormatError, RowError, ManifestError, EmptySeriesError, OSError)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exceptions instead of exiting"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _csv_ints(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class StylizedFactsCLI:
    """Command-line surface: analyze, cluster, plot-data, report, simulate"""

    def __init__(self, configure_logging: Optional[Callable[[str, Optional[str]], None]] = None):
        self.configure_logging = configure_logging or (lambda level, log_file: None)
        self.parser = _Parser(
            prog="stylized-facts",
            description="Verify stylized empirical facts on daily stock price and volume data",
        )
        self.handlers: Dict[str, Callable[[argparse.Namespace], int]] = {}
        self._setup_handlers()

    def _add_config_flags(self, parser: argparse.ArgumentParser):
        group = parser.add_argument_group("run configuration")
        group.add_argument("--config", help="JSON config file (overrides environment defaults)")
        group.add_argument("--output-dir", dest="output_dir")
        group.add_argument("--horizons", type=_csv_ints, help="e.g. 1,5,20,60")
        group.add_argument("--overlapping", action=argparse.BooleanOptionalAction, default=None)
        group.add_argument("--significance", type=float)
        group.add_argument("--absence-lags", dest="absence_lags", type=int)
        group.add_argument("--clustering-lags", dest="clustering_lags", type=int)
        group.add_argument("--asymmetry-windows", dest="asymmetry_windows", type=_csv_ints)
        group.add_argument("--min-observations", dest="min_observations", type=int)
        group.add_argument(
            "--use-adjusted-close",
            dest="use_adjusted_close",
            action=argparse.BooleanOptionalAction,
            default=None,
        )
        group.add_argument("--workers", type=int)
        group.add_argument("--seed", type=int)
        group.add_argument(
            "--threshold",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one verdict threshold, e.g. leverage_verified=0.55",
        )
        group.add_argument("--log-level", dest="log_level")
        group.add_argument("--log-file", dest="log_file")

    def _setup_handlers(self):
        """Register every subcommand with its flags and handler"""
        subparsers = self.parser.add_subparsers(dest="command", required=True)

        analyze = subparsers.add_parser("analyze", help="run the fact battery on a manifest")
        analyze.add_argument("--manifest", dest="manifest_path", required=True)
        self._add_config_flags(analyze)
        self.handlers["analyze"] = self.cmd_analyze

        cluster = subparsers.add_parser("cluster", help="cluster markets by verdict vectors")
        cluster.add_argument(
            "summaries", nargs="*", help="summary.json files (default: all under --output-dir)"
        )
        self._add_config_flags(cluster)
        self.handlers["cluster"] = self.cmd_cluster

        plot = subparsers.add_parser("plot-data", help="write plot-data tables")
        plot.add_argument("--kind", required=True)
        plot.add_argument("--market")
        plot.add_argument("--ticker")
        plot.add_argument("--statistic", default="skewness", help="boxplot statistic")
        plot.add_argument("--window", type=int, default=5, help="ccf window in days")
        plot.add_argument("--test", default="ks", choices=["ks", "sw", "jb"], help="kde test")
        self._add_config_flags(plot)
        self.handlers["plot-data"] = self.cmd_plot_data

        report = subparsers.add_parser("report", help="render summaries as a text report")
        self._add_config_flags(report)
        self.handlers["report"] = self.cmd_report

        simulate = subparsers.add_parser("simulate", help="write a seeded synthetic dataset")
        simulate.add_argument("--data-dir", dest="data_dir", required=True)
        simulate.add_argument("--markets", type=int, default=2)
        simulate.add_argument("--stocks", type=int, default=5)
        simulate.add_argument("--days", type=int, default=1500)
        self._add_config_flags(simulate)
        self.handlers["simulate"] = self.cmd_simulate

    # -- plumbing -------------------------------------------------------------

    def _config(self, args: argparse.Namespace) -> RunConfig:
        overrides: Dict[str, Any] = {
            key: getattr(args, key, None)
            for key in (
                "manifest_path",
                "output_dir",
                "horizons",
                "overlapping",
                "significance",
                "absence_lags",
                "clustering_lags",
                "asymmetry_windows",
                "min_observations",
                "use_adjusted_close",
                "workers",
                "seed",
                "log_level",
                "log_file",
            )
        }
        if overrides["manifest_path"]:
            overrides["manifest_path"] = os.path.abspath(overrides["manifest_path"])
        try:
            thresholds = parse_threshold_overrides(args.threshold)
        except ValueError as e:
            raise UsageError(str(e))
        if thresholds:
            overrides["verdict_thresholds"] = thresholds
        return load_run_config(args.config, overrides)

    def _summaries(self, writer: ResultWriter, paths: Optional[List[str]] = None) -> List[MarketFactSummary]:
        files = paths or [writer.path(m, "summary.json") for m in writer.list_markets()]
        summaries = []
        for path in files:
            try:
                with open(path, "r") as f:
                    summaries.append(MarketFactSummary.model_validate(json.load(f)))
            except (OSError, ValueError) as e:
                raise InputError(f"cannot read market summary {path}: {e}")
        return summaries

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
            config = self._config(args)
        except UsageError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except (ValidationError, ValueError) as e:
            print(f"error: invalid configuration: {e}", file=sys.stderr)
            return EXIT_USAGE
        except OSError as e:
            print(f"error: cannot read config file: {e}", file=sys.stderr)
            return EXIT_INPUT

        self.configure_logging(config.log_level, config.log_file)
        args.run_config = config
        try:
            return self.handlers[args.command](args)
        except UsageError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except (InputError, *INPUT_ERRORS) as e:
            logger.error(f"❌ input error: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        except StylizedFactsError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INTERNAL

    # -- commands -------------------------------------------------------------

    def cmd_analyze(self, args: argparse.Namespace) -> int:
        """Per-stock reports, per-market summaries and run metadata"""
        config: RunConfig = args.run_config
        manifests = load_manifests(config.manifest_path or "")
        writer = ResultWriter(config.output_dir, config.config_hash)
        logger.info(f"🚀 analyzing {len(manifests)} market(s) with {config.workers} worker(s)")

        inputs: Dict[str, Dict[str, str]] = {}
        for manifest in manifests:
            run = run_market(manifest, config)
            for report in run.reports:
                writer.write_json(f"{manifest.market}/stocks/{report.ticker}.json", report)
            writer.write_json(f"{manifest.market}/summary.json", run.summary)
            inputs[manifest.market] = {
                entry.ticker: _file_sha256(resolve_relative(config.manifest_path or "", entry.path))
                for entry in manifest.entries
            }
            if run.failures:
                logger.warning(f"⚠️ [{manifest.market}] {len(run.failures)} stock(s) failed")

        writer.write_json(
            "run_metadata.json",
            {
                "manifest_path": config.manifest_path,
                "manifest_sha256": _file_sha256(config.manifest_path or ""),
                "inputs": inputs,
                "markets": [m.market for m in manifests],
                "config": config.result_fields(),
            },
        )
        logger.info(f"✅ analyze finished; outputs in {config.output_dir}")
        return EXIT_OK

    def cmd_cluster(self, args: argparse.Namespace) -> int:
        config: RunConfig = args.run_config
        writer = ResultWriter(config.output_dir, config.config_hash)
        summaries = self._summaries(writer, args.summaries)
        names = [s.market for s in summaries]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise InputError(f"duplicate market names: {', '.join(duplicates)}")
        if len(summaries) < 2:
            raise InputError(f"clustering needs at least 2 market summaries, found {len(summaries)}")

        root, merges = cluster_markets_with_merges([s.verdict_vector() for s in summaries])
        writer.write_json(
            "clusters/dendrogram.json",
            {
                "vectors": {s.market: list(s.verdict_vector().values) for s in summaries},
                "metric": "cityblock",
                "linkage": "average",
                "root": root,
            },
        )
        frame = pd.DataFrame(
            [
                {
                    "step": m.step,
                    "left": "|".join(m.left),
                    "right": "|".join(m.right),
                    "height": m.height,
                    "size": m.size,
                }
                for m in merges
            ],
            columns=["step", "left", "right", "height", "size"],
        )
        writer.write_csv("clusters/merges.csv", frame)
        logger.info(f"✅ clustered {len(summaries)} markets")
        return EXIT_OK

    def cmd_plot_data(self, args: argparse.Namespace) -> int:
        config: RunConfig = args.run_config
        if args.kind not in PLOT_KINDS:
            print(
                f"error: unknown plot kind '{args.kind}'; valid kinds: {', '.join(PLOT_KINDS)}",
                file=sys.stderr,
            )
            return EXIT_USAGE
        if args.kind in STOCK_KINDS and not (args.market and args.ticker):
            raise UsageError(f"--kind {args.kind} needs --market and --ticker")
        if args.kind == "kde" and not args.market:
            raise UsageError("--kind kde needs --market")
        if args.kind == "boxplot" and args.statistic not in BOXPLOT_STATISTICS:
            raise UsageError(
                f"unknown statistic '{args.statistic}'; valid: {', '.join(sorted(BOXPLOT_STATISTICS))}"
            )

        writer = ResultWriter(config.output_dir, config.config_hash)
        builder = PlotDataBuilder(writer, config)
        for path in builder.build(
            args.kind,
            market=args.market,
            ticker=args.ticker,
            statistic=args.statistic,
            window=args.window,
            test=args.test,
        ):
            print(path)
        return EXIT_OK

    def cmd_report(self, args: argparse.Namespace) -> int:
        config: RunConfig = args.run_config
        writer = ResultWriter(config.output_dir, config.config_hash)
        summaries = self._summaries(writer)
        if not summaries:
            raise InputError(f"no market summaries under {config.output_dir}; run 'analyze' first")
        path = writer.write_text("report.txt", render_report(summaries, config.config_hash))
        print(path)
        return EXIT_OK

    def cmd_simulate(self, args: argparse.Namespace) -> int:
        """Seeded synthetic markets of GARCH price paths plus a manifest"""
        config: RunConfig = args.run_config
        if args.markets < 1 or args.stocks < 1 or args.days < 2:
            raise UsageError("--markets and --stocks must be >= 1 and --days >= 2")
        rng = np.random.default_rng(config.seed)
        os.makedirs(args.data_dir, exist_ok=True)

        manifests = []
        for m in range(args.markets):
            market = f"market{m + 1}"
            os.makedirs(os.path.join(args.data_dir, market), exist_ok=True)
            entries = []
            for s in range(args.stocks):
                ticker = f"S{m + 1}{s + 1:02d}"
                relative = os.path.join(market, f"{ticker}.csv")
                write_price_csv(
                    synthetic_price_frame(args.days, rng), os.path.join(args.data_dir, relative)
                )
                entries.append(ManifestEntry(ticker=ticker, path=relative))
            manifests.append(MarketManifest(market=market, entries=tuple(entries)))

        manifest_path = os.path.join(args.data_dir, "manifest.json")
        write_manifest(manifest_path, manifests)
        logger.info(f"✅ simulated {args.markets} market(s) x {args.stocks} stock(s) (seed {config.seed})")
        print(manifest_path)
        return EXIT_OK


def run_cli(argv: Optional[List[str]] = None) -> int:
    return StylizedFactsCLI().run(argv)
