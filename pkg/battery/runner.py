import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from battery.market import summarize_market
from battery.models import MarketFactSummary, StockFactReport
from battery.workflow import analyze_stock
from config import RunConfig
from ingest.manifest import MarketManifest, read_series
from ingest.prices import PriceSeries

logger = logging.getLogger(__name__)

Outcome = Tuple[str, Optional[StockFactReport], Optional[str]]


@dataclass
class MarketRun:
    """Stock reports of one market in manifest order, plus its summary"""

    market: str
    reports: List[StockFactReport]
    summary: MarketFactSummary
    failures: Dict[str, str] = field(default_factory=dict)


def _analyze(job: Tuple[PriceSeries, RunConfig]) -> Outcome:
    series, config = job
    try:
        return series.ticker, analyze_stock(series, config), None
    except Exception as e:
        logger.error(f"❌ [{series.ticker}] analysis failed: {e}")
        return series.ticker, None, f"{type(e).__name__}: {e}"


def analyze_all(series_list: List[PriceSeries], config: RunConfig) -> List[Outcome]:
    """
    Analyze stocks with ``config.workers`` processes, results in input order.

    Each report depends only on its own series, so the output is the same for
    every worker count.
    """
    jobs = [(series, config) for series in series_list]
    if config.workers <= 1 or len(jobs) <= 1:
        return [_analyze(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(config.workers, len(jobs))) as executor:
        return list(executor.map(_analyze, jobs))


def run_market(manifest: MarketManifest, config: RunConfig) -> MarketRun:
    """
    Read every file of a market, analyze the stocks and summarize.

    Unreadable or malformed input files raise (input errors abort the run);
    analysis failures are recorded per stock in the summary.
    """
    logger.info(f"🚀 [{manifest.market}] reading {len(manifest.entries)} price files")
    series_list = [
        read_series(config.manifest_path or "", entry, config.use_adjusted_close)
        for entry in manifest.entries
    ]

    reports: List[StockFactReport] = []
    failures: Dict[str, str] = {}
    for ticker, report, error in analyze_all(series_list, config):
        if report is not None:
            reports.append(report)
        else:
            failures[ticker] = error or "analysis failed"

    summary = summarize_market(manifest.market, reports, config, failures=failures)
    return MarketRun(market=manifest.market, reports=reports, summary=summary, failures=failures)
