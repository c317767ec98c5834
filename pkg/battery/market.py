"""
Per-market aggregation of stock reports into fact verdicts.

Each rule reduces the evaluable stocks of a market to one statistic (a
proportion, a median or a cross-sectional correlation) and compares it with
the cutpoints in ``VerdictThresholds``. The statistic, the rule text and the
support are stored with the verdict so every +1/-1 can be re-derived.
"""

import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from analysis.core import pearson_corr
from battery.models import (
    FACTS,
    FactVerdict,
    MarketFactSummary,
    NotEvaluable,
    StockFactReport,
    is_evaluable,
)
from config import RunConfig, VerdictThresholds
from errors import InsufficientDataError, StylizedFactsError

logger = logging.getLogger(__name__)

MIN_SUPPORT = 3
MIN_RISK_RETURN_STOCKS = 3


def _share(flags: Sequence[bool]) -> float:
    return float(np.mean(flags)) if flags else float("nan")


def _in_range(value: float, bounds: Tuple[float, float]) -> bool:
    lo, hi = bounds
    return bool(np.isfinite(value) and lo <= value <= hi)


def _verdict(
    fact: str,
    verdict: int,
    statistic: Optional[float],
    rule: str,
    support: int,
    details: Optional[Dict[str, Optional[float]]] = None,
) -> FactVerdict:
    return FactVerdict(
        fact=fact,
        verdict=verdict,  # type: ignore[arg-type]
        statistic=statistic,
        rule=rule,
        support=support,
        low_support=support < MIN_SUPPORT,
        details=details or {},
    )


def _no_data(fact: str, rule: str, reason: str = "no evaluable stocks") -> FactVerdict:
    return FactVerdict(fact=fact, verdict=0, rule=rule, support=0, low_support=True, reason=reason)


def _collect(reports: Iterable[StockFactReport], pick: Callable[[StockFactReport], object]) -> List:
    values = []
    for report in reports:
        value = pick(report)
        if is_evaluable(value):
            values.append(value)
    return values


def risk_return_correlation(reports: Sequence[StockFactReport]) -> float:
    """Cross-sectional Pearson correlation of mean daily return with its sd"""
    pairs = [
        (r.mean_return, r.sd_return)
        for r in reports
        if is_evaluable(r.mean_return) and is_evaluable(r.sd_return)
    ]
    if len(pairs) < MIN_RISK_RETURN_STOCKS:
        raise InsufficientDataError(
            f"risk-return correlation needs {MIN_RISK_RETURN_STOCKS} stocks, got {len(pairs)}"
        )
    means, sds = zip(*pairs)
    return pearson_corr(means, sds)


# Verdict rules
def gain_loss_verdict(skews: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "gain_loss_asymmetry"
    rule = f"+1 if share(skew<0) >= {t.gain_loss_share}; -1 if share(skew>0) >= {t.gain_loss_share}"
    if not skews:
        return _no_data(fact, rule)
    negative = _share([s < 0 for s in skews])
    positive = _share([s > 0 for s in skews])
    verdict = 1 if negative >= t.gain_loss_share else -1 if positive >= t.gain_loss_share else 0
    return _verdict(
        fact, verdict, negative, rule, len(skews), {"share_positive_skew": positive}
    )


def leverage_verdict(correlations: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "leverage_effect"
    rule = (
        f"+1 if share(corr(r, r^2)<0) >= {t.leverage_verified}; "
        f"-1 if <= {t.leverage_contradicted}"
    )
    if not correlations:
        return _no_data(fact, rule)
    share = _share([c < 0 for c in correlations])
    return leverage_verdict_from_share(share, t, len(correlations))


def leverage_verdict_from_share(share: float, t: VerdictThresholds, support: int) -> FactVerdict:
    rule = (
        f"+1 if share(corr(r, r^2)<0) >= {t.leverage_verified}; "
        f"-1 if <= {t.leverage_contradicted}"
    )
    verdict = 1 if share >= t.leverage_verified else -1 if share <= t.leverage_contradicted else 0
    return _verdict("leverage_effect", verdict, share, rule, support)


def aggregational_gaussianity_verdict(
    medians: Dict[int, float], support: int
) -> FactVerdict:
    """
    +1 if the median KS p-value rises at every horizon step, 0 if it rises
    through the next-to-last horizon only (needs three or more
    horizons), -1 otherwise.
    """
    fact = "aggregational_gaussianity"
    rule = "median KS p-value increasing over all horizons (+1), all but the last (0), else -1"
    ordered = [medians[h] for h in sorted(medians)]
    if len(ordered) < 2 or not all(np.isfinite(ordered)):
        return _no_data(fact, rule, "median KS p-values missing for some horizon")
    steps = [b > a for a, b in zip(ordered, ordered[1:])]
    if all(steps):
        verdict = 1
    elif len(steps) >= 2 and all(steps[:-1]):
        verdict = 0
    else:
        verdict = -1
    details = {f"median_ks_p_h{h}": medians[h] for h in sorted(medians)}
    return _verdict(fact, verdict, ordered[-1] - ordered[0], rule, support, details)


def heavy_tail_verdict(alphas: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "heavy_tails"
    lo, hi = t.heavy_tail_range
    rule = f"+1 if share(alpha in [{lo}, {hi}]) >= {t.heavy_tail_share}"
    if not alphas:
        return _no_data(fact, rule)
    share = _share([_in_range(a, t.heavy_tail_range) for a in alphas])
    finite = [a for a in alphas if np.isfinite(a)]
    return _verdict(
        fact,
        1 if share >= t.heavy_tail_share else 0,
        share,
        rule,
        len(alphas),
        {"median_alpha": float(np.median(finite)) if finite else None},
    )


def volume_power_law_verdict(finite_flags: List[bool], t: VerdictThresholds) -> FactVerdict:
    fact = "volume_power_law"
    rule = f"+1 if share(volume tail index finite) >= {t.volume_power_law_share}"
    if not finite_flags:
        return _no_data(fact, rule)
    share = _share(finite_flags)
    return _verdict(
        fact, 1 if share >= t.volume_power_law_share else 0, share, rule, len(finite_flags)
    )


def volume_volatility_verdict(
    correlations: List[float], raw_correlations: List[float], t: VerdictThresholds
) -> FactVerdict:
    fact = "volume_volatility_correlation"
    rule = (
        f"+1 if share(corr(V, r^2)>0) >= {t.volume_volatility_positive}; "
        f"-1 if share(corr(V, r^2)<0) >= {t.volume_volatility_negative}"
    )
    if not correlations:
        return _no_data(fact, rule)
    positive = _share([c > 0 for c in correlations])
    negative = _share([c < 0 for c in correlations])
    if positive >= t.volume_volatility_positive:
        verdict = 1
    elif negative >= t.volume_volatility_negative:
        verdict = -1
    else:
        verdict = 0
    details = {
        "share_negative": negative,
        "share_positive_raw_return": _share([c > 0 for c in raw_correlations])
        if raw_correlations
        else None,
    }
    return _verdict(fact, verdict, positive, rule, len(correlations), details)


def risk_return_verdict(correlation: Optional[float], support: int, t: VerdictThresholds) -> FactVerdict:
    fact = "risk_return_tradeoff"
    band = t.risk_return_band
    rule = f"+1 if corr(mean, sd) > {band}; -1 if < {-band}"
    if correlation is None:
        return _no_data(fact, rule, "risk-return correlation not evaluable")
    verdict = 1 if correlation > band else -1 if correlation < -band else 0
    return _verdict(fact, verdict, correlation, rule, support)


def time_scale_verdict(flags: List[bool], t: VerdictThresholds, window: int) -> FactVerdict:
    fact = "time_scale_asymmetry"
    rule = f"+1 if share(any significant positive diff, {window}-day windows) >= {t.time_scale_share}"
    if not flags:
        return _no_data(fact, rule)
    share = _share(flags)
    return _verdict(fact, 1 if share >= t.time_scale_share else 0, share, rule, len(flags))


def long_memory_verdict(exponents: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "long_memory"
    lo, hi = t.long_memory_range
    rule = f"+1 if share(H in [{lo}, {hi}]) >= {t.long_memory_share}; -1 otherwise"
    if not exponents:
        return _no_data(fact, rule)
    share = _share([_in_range(h, t.long_memory_range) for h in exponents])
    above_half = _share([h > 0.5 for h in exponents])
    return _verdict(
        fact,
        1 if share >= t.long_memory_share else -1,
        share,
        rule,
        len(exponents),
        {"share_above_half": above_half, "median_hurst": float(np.median(exponents))},
    )


def volume_memory_verdict(exponents: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "volume_long_memory"
    rule = f"+1 if share(volume H > 0.5) >= {t.volume_memory_share}"
    if not exponents:
        return _no_data(fact, rule)
    share = _share([h > 0.5 for h in exponents])
    return _verdict(
        fact, 1 if share >= t.volume_memory_share else 0, share, rule, len(exponents)
    )


def acf_decay_verdict(betas: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "slow_decay_of_absolute_acf"
    lo, hi = t.acf_decay_range
    rule = f"+1 if share(beta in [{lo}, {hi}]) >= {t.acf_decay_share}"
    if not betas:
        return _no_data(fact, rule)
    share = _share([_in_range(b, t.acf_decay_range) for b in betas])
    return _verdict(
        fact,
        1 if share >= t.acf_decay_share else 0,
        share,
        rule,
        len(betas),
        {"median_beta": float(np.median(betas))},
    )


def absence_verdict(
    ljung_box_kept: List[bool], box_pierce_kept: List[bool], t: VerdictThresholds
) -> FactVerdict:
    fact = "absence_of_autocorrelation"
    rule = (
        f"+1 if share(Ljung-Box not rejected) >= {t.absence_verified}; "
        f"-1 if < {t.absence_contradicted}"
    )
    if not ljung_box_kept:
        return _no_data(fact, rule)
    share = _share(ljung_box_kept)
    if share >= t.absence_verified:
        verdict = 1
    elif share < t.absence_contradicted:
        verdict = -1
    else:
        verdict = 0
    details = {"share_box_pierce_not_rejected": _share(box_pierce_kept) if box_pierce_kept else None}
    return _verdict(fact, verdict, share, rule, len(ljung_box_kept), details)


def clustering_verdict(
    ljung_box_rejected: List[bool],
    box_pierce_rejected: List[bool],
    lag_shares: Dict[str, Optional[float]],
    t: VerdictThresholds,
) -> FactVerdict:
    fact = "volatility_clustering"
    rule = f"+1 if share(Ljung-Box on r^2 rejected) >= {t.clustering_share}"
    if not ljung_box_rejected:
        return _no_data(fact, rule)
    share = _share(ljung_box_rejected)
    details: Dict[str, Optional[float]] = {
        "share_box_pierce_rejected": _share(box_pierce_rejected) if box_pierce_rejected else None,
        **lag_shares,
    }
    return _verdict(
        fact, 1 if share >= t.clustering_share else 0, share, rule, len(ljung_box_rejected), details
    )


def conditional_tail_verdict(
    decreased: List[bool], increased: List[bool], t: VerdictThresholds
) -> FactVerdict:
    fact = "conditional_heavy_tails"
    rule = (
        f"+1 if share(residual alpha < return alpha) >= {t.conditional_tail_verified}; "
        f"-1 if <= {t.conditional_tail_contradicted}"
    )
    if not decreased:
        return _no_data(fact, rule)
    share = _share(decreased)
    if share >= t.conditional_tail_verified:
        verdict = 1
    elif share <= t.conditional_tail_contradicted:
        verdict = -1
    else:
        verdict = 0
    return _verdict(
        fact, verdict, share, rule, len(decreased), {"share_increased": _share(increased)}
    )


def intermittency_verdict(both_rejected: List[bool], t: VerdictThresholds) -> FactVerdict:
    fact = "intermittency"
    rule = f"+1 if share(kurtosis test rejected for returns and residuals) >= {t.intermittency_share}"
    if not both_rejected:
        return _no_data(fact, rule)
    share = _share(both_rejected)
    return _verdict(
        fact, 1 if share >= t.intermittency_share else 0, share, rule, len(both_rejected)
    )


def taylor_verdict(d_stars: List[float], t: VerdictThresholds) -> FactVerdict:
    fact = "taylor_effect"
    lo, hi = t.taylor_range
    rule = f"+1 if median d* in [{lo}, {hi}]"
    if not d_stars:
        return _no_data(fact, rule)
    median = float(np.median(d_stars))
    return _verdict(
        fact,
        1 if _in_range(median, t.taylor_range) else 0,
        median,
        rule,
        len(d_stars),
        {"share_in_range": _share([_in_range(d, t.taylor_range) for d in d_stars])},
    )


def _median_ks_p_values(
    reports: List[StockFactReport], mode: str, horizons: Sequence[int]
) -> Tuple[Dict[int, float], int]:
    medians: Dict[int, float] = {}
    support = 0
    for horizon in horizons:
        p_values = _collect(
            reports, lambda r: r.normality.get(mode, {}).get(horizon, {}).get("ks")
        )
        support = max(support, len(p_values))
        medians[horizon] = (
            float(np.median([p.p_value for p in p_values])) if p_values else float("nan")
        )
    return medians, support


def _clustering_lag_shares(
    reports: List[StockFactReport], lags: int
) -> Dict[str, Optional[float]]:
    shares: Dict[str, Optional[float]] = {}
    for lag in range(1, lags + 1):
        for variant in ("normal", "t"):
            tests = _collect(reports, lambda r: r.clustering_lags.get(lag, {}).get(variant))
            shares[f"share_rejected_lag{lag}_{variant}"] = (
                _share([bool(test.rejected) for test in tests]) if tests else None
            )
    return shares


def summarize_market(
    market: str,
    reports: Sequence[StockFactReport],
    config: RunConfig,
    failures: Optional[Dict[str, str]] = None,
) -> MarketFactSummary:
    """
    Aggregate stock reports into a market summary with one verdict per fact.

    Stocks are sorted by ticker first, so the result does not depend on the
    order in which reports arrive.
    """
    t = config.verdict_thresholds
    level = config.significance
    ordered = sorted(reports, key=lambda r: r.ticker)
    analyzed = [r for r in ordered if r.status == "analyzed"]
    skipped = {r.ticker: r.skip_reason or "skipped" for r in ordered if r.status == "skipped"}
    skipped.update(failures or {})

    try:
        risk_return: Optional[float] = risk_return_correlation(analyzed)
        risk_return_value: object = risk_return
    except StylizedFactsError as e:
        logger.info(f"⚠️ [{market}] risk-return correlation not evaluable: {e}")
        risk_return = None
        risk_return_value = NotEvaluable(reason=f"{type(e).__name__}: {e}")
    risk_return_support = len(
        [r for r in analyzed if is_evaluable(r.mean_return) and is_evaluable(r.sd_return)]
    )

    mode = "overlapping" if config.overlapping else "non_overlapping"
    medians, ks_support = _median_ks_p_values(analyzed, mode, config.horizons)
    weekly = min(config.asymmetry_windows)

    conditional = _collect(analyzed, lambda r: r.conditional_tail)
    intermittency = []
    for report in analyzed:
        pair = (report.intermittency.get("returns"), report.intermittency.get("residuals"))
        if all(is_evaluable(k) for k in pair):
            intermittency.append(all(k.rejected(level) for k in pair))

    verdicts = [
        gain_loss_verdict([m.skewness for m in _collect(analyzed, lambda r: r.moments)], t),
        leverage_verdict(_collect(analyzed, lambda r: r.leverage_corr), t),
        aggregational_gaussianity_verdict(medians, ks_support),
        heavy_tail_verdict([tail.alpha for tail in _collect(analyzed, lambda r: r.tail)], t),
        volume_power_law_verdict(
            [tail.alpha_finite for tail in _collect(analyzed, lambda r: r.volume_tail)], t
        ),
        volume_volatility_verdict(
            _collect(analyzed, lambda r: r.volume_volatility_corr),
            _collect(analyzed, lambda r: r.volume_return_corr),
            t,
        ),
        risk_return_verdict(risk_return, risk_return_support, t),
        time_scale_verdict(
            [a.any_significant for a in _collect(analyzed, lambda r: r.asymmetry.get(weekly))],
            t,
            weekly,
        ),
        long_memory_verdict([h.H for h in _collect(analyzed, lambda r: r.hurst)], t),
        volume_memory_verdict([h.H for h in _collect(analyzed, lambda r: r.volume_hurst)], t),
        acf_decay_verdict([f.beta for f in _collect(analyzed, lambda r: r.acf_decay)], t),
        absence_verdict(
            [not p.rejected(level) for p in _collect(analyzed, lambda r: r.absence.get("ljung_box"))],
            [not p.rejected(level) for p in _collect(analyzed, lambda r: r.absence.get("box_pierce"))],
            t,
        ),
        clustering_verdict(
            [p.rejected(level) for p in _collect(analyzed, lambda r: r.clustering.get("ljung_box"))],
            [p.rejected(level) for p in _collect(analyzed, lambda r: r.clustering.get("box_pierce"))],
            _clustering_lag_shares(analyzed, config.clustering_lags),
            t,
        ),
        conditional_tail_verdict(
            [c.decreased for c in conditional], [c.increased for c in conditional], t
        ),
        intermittency_verdict(intermittency, t),
        taylor_verdict([tr.d_star for tr in _collect(analyzed, lambda r: r.taylor)], t),
    ]
    facts = {v.fact: v for v in verdicts}
    assert tuple(facts) == FACTS

    logger.info(
        f"✅ [{market}] summarized {len(analyzed)} of {len(ordered)} stocks: "
        f"{[facts[f].verdict for f in FACTS]}"
    )
    return MarketFactSummary(
        market=market,
        n_stocks=len(ordered) + len(failures or {}),
        n_evaluated=len(analyzed),
        skipped=dict(sorted(skipped.items())),
        risk_return_corr=risk_return_value,  # type: ignore[arg-type]
        facts=facts,
    )
