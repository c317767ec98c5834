"""
Plot-data series behind the usual stylized-fact figures.

Nothing is rendered; every kind writes headered CSV tables that a plotting
tool can read directly.
"""

import logging
from typing import Any, Callable, Dict, List

import numpy as np
import pandas as pd

from analysis.core import acf, five_number, kde, qq_pairs
from cli.writer import ResultWriter
from config import RunConfig
from errors import DomainError, InsufficientDataError, ManifestError, StylizedFactsError
from ingest.manifest import load_manifests, read_series
from ingest.prices import PriceSeries, log_returns

logger = logging.getLogger(__name__)

KDE_POINTS = 201
ACF_LAGS = 30

PLOT_KINDS = ("acf", "boxplot", "ccf", "hill", "kde", "prices", "qq")

# kinds that plot one stock rather than a whole market
STOCK_KINDS = ("acf", "ccf", "hill", "prices", "qq")


def _dig(document: Dict[str, Any], *keys: Any) -> Any:
    node: Any = document
    for key in keys:
        if not isinstance(node, dict):
            return None
        node = node.get(str(key))
    return node


# statistic name -> accessor on a stock report document
BOXPLOT_STATISTICS: Dict[str, Callable[[Dict[str, Any]], Any]] = {
    "skewness": lambda d: _dig(d, "moments", "skewness"),
    "kurtosis": lambda d: _dig(d, "moments", "kurtosis"),
    "leverage_corr": lambda d: d.get("leverage_corr"),
    "tail_alpha": lambda d: _dig(d, "tail", "alpha"),
    "volume_tail_alpha": lambda d: _dig(d, "volume_tail", "alpha"),
    "volume_volatility_corr": lambda d: d.get("volume_volatility_corr"),
    "hurst": lambda d: _dig(d, "hurst", "H"),
    "volume_hurst": lambda d: _dig(d, "volume_hurst", "H"),
    "acf_decay_beta": lambda d: _dig(d, "acf_decay", "beta"),
    "d_star": lambda d: _dig(d, "taylor", "d_star"),
}


class PlotDataBuilder:
    """Builds plot-data tables from analyze outputs (and the input files where needed)"""

    def __init__(self, writer: ResultWriter, config: RunConfig):
        self.writer = writer
        self.config = config
        self.kinds: Dict[str, Callable[..., List[str]]] = {
            "prices": self.prices,
            "qq": self.qq,
            "ccf": self.ccf,
            "acf": self.acf,
            "kde": self.kde,
            "boxplot": self.boxplot,
            "hill": self.hill,
        }

    def build(self, kind: str, **target: Any) -> List[str]:
        if kind not in self.kinds:
            raise DomainError(f"unknown plot kind '{kind}'; valid kinds: {', '.join(sorted(self.kinds))}")
        paths = self.kinds[kind](**target)
        logger.info(f"✅ plot-data {kind}: wrote {len(paths)} file(s)")
        return paths

    # -- inputs ---------------------------------------------------------------

    def _metadata(self) -> Dict[str, Any]:
        metadata = self.writer.read_json("run_metadata.json")
        if metadata is None:
            raise ManifestError(
                f"no run_metadata.json in {self.writer.output_dir}; run 'analyze' first"
            )
        if metadata.get("config_hash") != self.writer.config_hash:
            logger.warning("⚠️ analyze outputs were produced with a different configuration")
        return metadata

    def _stock_report(self, market: str, ticker: str) -> Dict[str, Any]:
        self._metadata()
        document = self.writer.read_json(f"{market}/stocks/{ticker}.json")
        if document is None:
            raise ManifestError(f"no analyze output for {market}/{ticker}")
        return document

    def _series(self, market: str, ticker: str) -> PriceSeries:
        metadata = self._metadata()
        manifest_path = metadata.get("manifest_path")
        for manifest in load_manifests(manifest_path):
            if manifest.market != market:
                continue
            for entry in manifest.entries:
                if entry.ticker == ticker:
                    return read_series(manifest_path, entry, self.config.use_adjusted_close)
        raise ManifestError(f"{market}/{ticker} is not in manifest {manifest_path}")

    # -- kinds ----------------------------------------------------------------

    def prices(self, market: str, ticker: str, **_: Any) -> List[str]:
        series = self._series(market, ticker)
        returns = np.concatenate(([np.nan], log_returns(series).values))
        frame = pd.DataFrame(
            {
                "date": pd.to_datetime(series.dates).strftime("%Y-%m-%d"),
                "close": series.close,
                "log_return": returns,
            }
        )
        return [self.writer.write_csv(f"plots/prices/{market}/{ticker}.csv", frame)]

    def qq(self, market: str, ticker: str, **_: Any) -> List[str]:
        """One (theoretical, sample) file per horizon"""
        series = self._series(market, ticker)
        paths = []
        for horizon in self.config.horizons:
            values = log_returns(series, horizon, self.config.overlapping).values
            theoretical, sample = qq_pairs(values, standardize=True)
            frame = pd.DataFrame({"theoretical": theoretical, "sample": sample})
            paths.append(
                self.writer.write_csv(f"plots/qq/{market}/{ticker}_h{horizon}.csv", frame)
            )
        return paths

    def ccf(self, market: str, ticker: str, window: int = 5, **_: Any) -> List[str]:
        """Cross-correlations at lags -10..10, then the differences with their bands"""
        asymmetry = _dig(self._stock_report(market, ticker), "asymmetry", window)
        if not asymmetry or "C" not in asymmetry:
            raise InsufficientDataError(f"{market}/{ticker}: no asymmetry result for window {window}")
        rows = [
            {"series": "ccf", "lag": int(lag), "value": value, "lower": np.nan, "upper": np.nan}
            for lag, value in sorted(asymmetry["C"].items(), key=lambda kv: int(kv[0]))
        ]
        for lag, diff in sorted(asymmetry["diffs"].items(), key=lambda kv: int(kv[0])):
            band = asymmetry["bands"][lag]
            rows.append(
                {"series": "diff", "lag": int(lag), "value": diff, "lower": -band, "upper": band}
            )
        frame = pd.DataFrame(rows, columns=["series", "lag", "value", "lower", "upper"])
        return [self.writer.write_csv(f"plots/ccf/{market}/{ticker}_w{window}.csv", frame)]

    def acf(self, market: str, ticker: str, **_: Any) -> List[str]:
        """ACF of returns, |returns| and squared returns with +-1.96/sqrt(n) bands"""
        r = log_returns(self._series(market, ticker)).values
        lags = min(ACF_LAGS, r.size - 1)
        band = 1.96 / np.sqrt(r.size)
        frame = pd.DataFrame(
            {
                "lag": np.arange(1, lags + 1),
                "returns": acf(r, lags).values[1:],
                "abs_returns": acf(np.abs(r), lags).values[1:],
                "squared_returns": acf(r**2, lags).values[1:],
                "lower": -band,
                "upper": band,
            }
        )
        return [self.writer.write_csv(f"plots/acf/{market}/{ticker}.csv", frame)]

    def kde(self, market: str, test: str = "ks", **_: Any) -> List[str]:
        """Density of a normality test's p-values across a market's stocks, per horizon"""
        self._metadata()
        mode = "overlapping" if self.config.overlapping else "non_overlapping"
        reports = [
            self.writer.read_json(f"{market}/stocks/{ticker}.json")
            for ticker in self.writer.list_stock_reports(market)
        ]
        grid = np.linspace(0.0, 1.0, KDE_POINTS)
        columns: Dict[str, Any] = {"p_value": grid}
        for horizon in self.config.horizons:
            p_values = [
                _dig(report, "normality", mode, horizon, test, "p_value") for report in reports
            ]
            p_values = [p for p in p_values if p is not None]
            try:
                columns[f"h{horizon}"] = kde(p_values, grid)
            except StylizedFactsError as e:
                logger.warning(f"⚠️ [{market}] no density for horizon {horizon}: {e}")
                columns[f"h{horizon}"] = np.full(grid.size, np.nan)
        frame = pd.DataFrame(columns)
        return [self.writer.write_csv(f"plots/kde/{market}_{test}.csv", frame)]

    def boxplot(self, statistic: str = "skewness", **_: Any) -> List[str]:
        """Five-number summary of a per-stock statistic, one row per market"""
        if statistic not in BOXPLOT_STATISTICS:
            raise DomainError(
                f"unknown statistic '{statistic}'; valid: {', '.join(sorted(BOXPLOT_STATISTICS))}"
            )
        self._metadata()
        pick = BOXPLOT_STATISTICS[statistic]
        rows = []
        for market in self.writer.list_markets():
            values = []
            for ticker in self.writer.list_stock_reports(market):
                value = pick(self.writer.read_json(f"{market}/stocks/{ticker}.json") or {})
                if isinstance(value, (int, float)):
                    values.append(float(value))
            try:
                low, q1, median, q3, high = five_number(values)
            except InsufficientDataError:
                logger.warning(f"⚠️ [{market}] fewer than 5 values of {statistic}; row skipped")
                continue
            rows.append(
                {"market": market, "min": low, "q1": q1, "median": median, "q3": q3,
                 "max": high, "n": len(values)}
            )
        frame = pd.DataFrame(rows, columns=["market", "min", "q1", "median", "q3", "max", "n"])
        return [self.writer.write_csv(f"plots/boxplot/{statistic}.csv", frame)]

    def hill(self, market: str, ticker: str, **_: Any) -> List[str]:
        """Hill estimates xi(k) over the k-grid of the two-sided tail fit"""
        path = _dig(self._stock_report(market, ticker), "tail", "path")
        if not path:
            raise InsufficientDataError(f"{market}/{ticker}: tail index was not evaluable")
        k = np.array([point[0] for point in path], dtype=int)
        xi = np.array([point[1] for point in path], dtype=float)
        with np.errstate(divide="ignore"):
            alpha = np.where(xi > 0, 1.0 / xi, np.nan)
        frame = pd.DataFrame({"k": k, "xi": xi, "alpha": alpha})
        return [self.writer.write_csv(f"plots/hill/{market}/{ticker}.csv", frame)]
