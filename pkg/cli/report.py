"""Plain-text rendering of market summaries: per-fact tables and the verdict table"""

from typing import List, Optional, Sequence

import pandas as pd

from battery.models import FACT_TITLES, FACTS, MarketFactSummary, is_evaluable

VERDICT_LABELS = {1: "verified", 0: "-", -1: "contradicted"}


def _number(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.2f}"


def fact_table(summaries: Sequence[MarketFactSummary], fact: str) -> str:
    """One row per market: aggregate statistic, support, verdict and any extra details"""
    detail_keys: List[str] = sorted(
        {key for s in summaries for key in s.facts[fact].details}
    )
    rows = []
    for summary in summaries:
        verdict = summary.facts[fact]
        row = {
            "Market": summary.market,
            "Statistic": _number(verdict.statistic),
            "Stocks": verdict.support,
            "Verdict": VERDICT_LABELS[verdict.verdict] + (" (low support)" if verdict.low_support else ""),
        }
        for key in detail_keys:
            row[key] = _number(verdict.details.get(key))
        rows.append(row)
    rule = summaries[0].facts[fact].rule if summaries else ""
    table = pd.DataFrame(rows).to_string(index=False)
    return f"{FACT_TITLES[fact]}\nRule: {rule}\n{table}\n"


def verdict_table(summaries: Sequence[MarketFactSummary]) -> str:
    """Markets in which each fact is verified or contradicted"""
    rows = []
    markets = [s.market for s in summaries]
    for fact in FACTS:
        verified = [s.market for s in summaries if s.facts[fact].verdict == 1]
        contradicted = [s.market for s in summaries if s.facts[fact].verdict == -1]

        def describe(names: List[str]) -> str:
            if not names:
                return "None"
            if len(names) == len(markets) and len(markets) > 1:
                return "All markets"
            return ", ".join(names)

        rows.append(
            {
                "Stylized Empirical Fact": FACT_TITLES[fact],
                "Verified in": describe(verified),
                "Contradicted in": describe(contradicted),
            }
        )
    return pd.DataFrame(rows).to_string(index=False)


def render_report(summaries: Sequence[MarketFactSummary], config_hash: str) -> str:
    ordered = sorted(summaries, key=lambda s: s.market)
    lines = ["Stylized empirical facts report", f"config_hash={config_hash}", ""]

    overview = pd.DataFrame(
        [
            {
                "Market": s.market,
                "Stocks": s.n_stocks,
                "Analyzed": s.n_evaluated,
                "Skipped": len(s.skipped),
                "Risk-return corr": _number(s.risk_return_corr)
                if is_evaluable(s.risk_return_corr)
                else "n/a",
            }
            for s in ordered
        ]
    )
    lines += [overview.to_string(index=False), ""]

    for fact in FACTS:
        lines.append(fact_table(ordered, fact))

    lines += ["Summary", verdict_table(ordered), ""]
    return "\n".join(lines)
