from typing import Any, Callable, Dict, Optional, TypedDict, Union, get_args, get_origin
import logging

import numpy as np
from langgraph.graph import END, StateGraph

from analysis.core import moments, pearson_corr
from analysis.garch import conditional_tail_comparison, garch11_fit, standardized_residuals
from analysis.long_memory import hurst
from analysis.normality import NORMALITY_TESTS
from analysis.serial_dependence import (
    acf_power_law_fit,
    asymmetry_timescales,
    box_pierce,
    ljung_box,
    single_lag_tests,
)
from analysis.tail_index import adaptive_tail_index, return_tail_index
from analysis.taylor import kurtosis_test, maximize_taylor_d
from battery.models import NotEvaluable, ResidualDiagnostics, StockFactReport, is_evaluable
from config import RunConfig
from errors import StylizedFactsError
from ingest.prices import PriceSeries, log_returns, volume_values

logger = logging.getLogger(__name__)


# State definition
class StockState(TypedDict, total=False):
    series: PriceSeries
    config: RunConfig
    daily: np.ndarray
    volume: np.ndarray
    sections: Dict[str, Any]
    skip_reason: Optional[str]
    skip_to_end: bool
    report: Optional[StockFactReport]
    error: str


def _attempt(ticker: str, label: str, compute: Callable[[], Any]) -> Any:
    """Run one analysis; failures become a NotEvaluable marker"""
    try:
        return compute()
    except StylizedFactsError as e:
        logger.info(f"⚠️ [{ticker}] {label} not evaluable: {e}")
        return NotEvaluable(reason=f"{type(e).__name__}: {e}")
    except Exception as e:
        logger.error(f"❌ [{ticker}] {label} failed unexpectedly: {e}")
        return NotEvaluable(reason=f"internal error: {type(e).__name__}: {e}")


def _with_sections(state: StockState, **updates: Any) -> StockState:
    return {**state, "sections": {**state.get("sections", {}), **updates}}


# Pipeline nodes
def length_check_node(state: StockState) -> StockState:
    """Skip series below the configured minimum length"""
    series, config = state["series"], state["config"]
    logger.debug(f"🔍 [length_check] {series.ticker}: {len(series)} observations")

    if len(series) < config.min_observations:
        reason = f"{len(series)} observations, fewer than the required {config.min_observations}"
        logger.warning(f"⚠️ [{series.ticker}] skipped: {reason}")
        return {**state, "skip_reason": reason, "skip_to_end": True}

    try:
        daily = log_returns(series, horizon=1, overlapping=True).values
        volume = volume_values(series)
    except StylizedFactsError as e:
        logger.warning(f"⚠️ [{series.ticker}] skipped: {e}")
        return {**state, "skip_reason": str(e), "skip_to_end": True}
    return {**state, "daily": daily, "volume": volume, "skip_to_end": False}


def distribution_node(state: StockState) -> StockState:
    ticker, r = state["series"].ticker, state["daily"]
    return _with_sections(
        state,
        mean_return=_attempt(ticker, "mean return", lambda: float(np.mean(r))),
        sd_return=_attempt(ticker, "return sd", lambda: float(np.std(r))),
        moments=_attempt(ticker, "moments", lambda: moments(r)),
        leverage_corr=_attempt(ticker, "leverage", lambda: pearson_corr(r, r**2)),
    )


def normality_node(state: StockState) -> StockState:
    """KS, SW and JB on every horizon, in both overlapping and non-overlapping mode"""
    series, config = state["series"], state["config"]
    normality: Dict[str, Dict[int, Dict[str, Any]]] = {}
    for mode, overlapping in (("overlapping", True), ("non_overlapping", False)):
        normality[mode] = {}
        for horizon in config.horizons:
            try:
                values = log_returns(series, horizon=horizon, overlapping=overlapping).values
            except StylizedFactsError as e:
                marker = NotEvaluable(reason=f"{type(e).__name__}: {e}")
                normality[mode][horizon] = {name: marker for name in NORMALITY_TESTS}
                continue
            normality[mode][horizon] = {
                name: _attempt(
                    series.ticker,
                    f"{name} at horizon {horizon} ({mode})",
                    lambda test=test: test(values).at_level(config.significance),
                )
                for name, test in NORMALITY_TESTS.items()
            }
    return _with_sections(state, normality=normality)


def tails_node(state: StockState) -> StockState:
    ticker, config = state["series"].ticker, state["config"]
    r, volume = state["daily"], state["volume"]
    kwargs = {"xi_min": config.heavy_tail_xi_min, "vuong_z": config.heavy_tail_vuong_z}
    return _with_sections(
        state,
        tail=_attempt(ticker, "tail index", lambda: return_tail_index(r, "both", **kwargs)),
        tail_left=_attempt(ticker, "left tail", lambda: return_tail_index(r, "left", **kwargs)),
        tail_right=_attempt(ticker, "right tail", lambda: return_tail_index(r, "right", **kwargs)),
        volume_tail=_attempt(ticker, "volume tail", lambda: adaptive_tail_index(volume, **kwargs)),
    )


def volume_node(state: StockState) -> StockState:
    """Same-day correlation of volume with squared and raw returns"""
    ticker, r = state["series"].ticker, state["daily"]
    volume = state["volume"][1:]
    return _with_sections(
        state,
        volume_volatility_corr=_attempt(
            ticker, "volume-volatility", lambda: pearson_corr(volume, r**2)
        ),
        volume_return_corr=_attempt(ticker, "volume-return", lambda: pearson_corr(volume, r)),
    )


def memory_node(state: StockState) -> StockState:
    ticker, config = state["series"].ticker, state["config"]
    r, volume = state["daily"], state["volume"]
    return _with_sections(
        state,
        hurst=_attempt(ticker, "Hurst", lambda: hurst(r)),
        volume_hurst=_attempt(ticker, "volume Hurst", lambda: hurst(volume)),
        acf_decay=_attempt(
            ticker, "ACF decay", lambda: acf_power_law_fit(r, config.acf_decay_max_lag)
        ),
    )


def asymmetry_node(state: StockState) -> StockState:
    ticker, config, r = state["series"].ticker, state["config"], state["daily"]
    asymmetry = {
        window: _attempt(
            ticker, f"time-scale asymmetry ({window}d)", lambda w=window: asymmetry_timescales(r, w)
        )
        for window in config.asymmetry_windows
    }
    return _with_sections(state, asymmetry=asymmetry)


def dependence_node(state: StockState) -> StockState:
    """Portmanteau tests on returns and squared returns, single-lag tests on squares"""
    ticker, config, r = state["series"].ticker, state["config"], state["daily"]
    squared = r**2
    m_abs, m_sq = config.absence_lags, config.clustering_lags

    absence = {
        "ljung_box": _attempt(ticker, "Ljung-Box", lambda: ljung_box(r, m_abs)),
        "box_pierce": _attempt(ticker, "Box-Pierce", lambda: box_pierce(r, m_abs)),
    }
    clustering = {
        "ljung_box": _attempt(ticker, "Ljung-Box on r^2", lambda: ljung_box(squared, m_sq)),
        "box_pierce": _attempt(ticker, "Box-Pierce on r^2", lambda: box_pierce(squared, m_sq)),
    }
    clustering_lags: Dict[int, Dict[str, Any]] = {}
    for lag in range(1, m_sq + 1):
        pair = _attempt(ticker, f"lag-{lag} test on r^2", lambda lag=lag: single_lag_tests(squared, lag))
        if isinstance(pair, NotEvaluable):
            clustering_lags[lag] = {"normal": pair, "t": pair}
        else:
            normal, student = pair
            clustering_lags[lag] = {
                "normal": normal.at_level(config.significance),
                "t": student.at_level(config.significance),
            }
    return _with_sections(
        state, absence=absence, clustering=clustering, clustering_lags=clustering_lags
    )


def garch_node(state: StockState) -> StockState:
    """GARCH(1,1) fit, residual tails and diagnostics, kurtosis of returns and residuals"""
    ticker, config, r = state["series"].ticker, state["config"], state["daily"]
    fit = _attempt(ticker, "GARCH fit", lambda: garch11_fit(r))
    if isinstance(fit, NotEvaluable):
        conditional_tail = residual_diagnostics = residual_kurtosis = fit
    else:
        if not fit.converged:
            logger.warning(f"⚠️ [{ticker}] GARCH fit did not converge")
        conditional_tail = _attempt(
            ticker,
            "conditional tails",
            lambda: conditional_tail_comparison(
                r,
                xi_min=config.heavy_tail_xi_min,
                vuong_z=config.heavy_tail_vuong_z,
                fit=fit,
            ),
        )
        residuals = _attempt(ticker, "residuals", lambda: standardized_residuals(r, fit).values)
        if isinstance(residuals, NotEvaluable):
            residual_diagnostics = residual_kurtosis = residuals
        else:
            residual_diagnostics = ResidualDiagnostics(
                variance=float(np.var(residuals)),
                ljung_box_squared=_attempt(
                    ticker, "Ljung-Box on squared residuals", lambda: ljung_box(residuals**2, 5)
                ),
                jarque_bera=_attempt(
                    ticker,
                    "residual Jarque-Bera",
                    lambda: NORMALITY_TESTS["jb"](residuals).at_level(config.significance),
                ),
            )
            residual_kurtosis = _attempt(
                ticker, "residual kurtosis", lambda: kurtosis_test(residuals)
            )
    return _with_sections(
        state,
        garch=fit,
        conditional_tail=conditional_tail,
        residual_diagnostics=residual_diagnostics,
        intermittency={
            "returns": _attempt(ticker, "kurtosis", lambda: kurtosis_test(r)),
            "residuals": residual_kurtosis,
        },
    )


def taylor_node(state: StockState) -> StockState:
    ticker, config, r = state["series"].ticker, state["config"], state["daily"]
    lo, hi = config.taylor_interval
    return _with_sections(
        state, taylor=_attempt(ticker, "Taylor effect", lambda: maximize_taylor_d(r, lo, hi))
    )


def report_builder_node(state: StockState) -> StockState:
    """Assemble the StockFactReport; skipped stocks get every slot marked not evaluable"""
    series = state["series"]
    if state.get("skip_to_end"):
        reason = state.get("skip_reason") or "skipped"
        marker = NotEvaluable(reason=f"skipped: {reason}")
        slots = {
            name: marker
            for name, field in StockFactReport.model_fields.items()
            if get_origin(field.annotation) is Union and NotEvaluable in get_args(field.annotation)
        }
        report = StockFactReport(
            ticker=series.ticker,
            status="skipped",
            skip_reason=reason,
            n_obs=len(series),
            dropped_rows=series.dropped_rows,
            **slots,
        )
        return {**state, "report": report}

    try:
        report = StockFactReport(
            ticker=series.ticker,
            n_obs=len(series),
            dropped_rows=series.dropped_rows,
            **state.get("sections", {}),
        )
    except Exception as e:
        logger.error(f"❌ [report_builder] {series.ticker}: {e}")
        return {**state, "error": f"Report builder error: {str(e)}"}

    evaluated = sum(is_evaluable(v) for v in state.get("sections", {}).values())
    logger.info(f"✅ [{series.ticker}] report built ({evaluated} sections evaluable)")
    return {**state, "report": report}


# Create the workflow
def create_workflow():
    """Per-stock analysis graph: length check, then each analysis in turn"""
    workflow = StateGraph(StockState)

    workflow.add_node("length_check", length_check_node)
    workflow.add_node("distribution", distribution_node)
    workflow.add_node("normality", normality_node)
    workflow.add_node("tails", tails_node)
    workflow.add_node("volume", volume_node)
    workflow.add_node("memory", memory_node)
    workflow.add_node("asymmetry", asymmetry_node)
    workflow.add_node("dependence", dependence_node)
    workflow.add_node("garch", garch_node)
    workflow.add_node("taylor", taylor_node)
    workflow.add_node("report_builder", report_builder_node)

    workflow.set_entry_point("length_check")

    def should_skip_to_end(state: StockState) -> bool:
        return state.get("skip_to_end", False)

    workflow.add_conditional_edges(
        "length_check",
        should_skip_to_end,
        {True: "report_builder", False: "distribution"},
    )

    workflow.add_edge("distribution", "normality")
    workflow.add_edge("normality", "tails")
    workflow.add_edge("tails", "volume")
    workflow.add_edge("volume", "memory")
    workflow.add_edge("memory", "asymmetry")
    workflow.add_edge("asymmetry", "dependence")
    workflow.add_edge("dependence", "garch")
    workflow.add_edge("garch", "taylor")
    workflow.add_edge("taylor", "report_builder")
    workflow.add_edge("report_builder", END)

    return workflow.compile()


# Create the workflow instance
stock_graph = create_workflow()


def analyze_stock(series: PriceSeries, config: RunConfig) -> StockFactReport:
    """Run every per-stock analysis; individual failures never abort the report"""
    logger.debug(f"🚀 Analyzing {series.ticker} ({len(series)} observations)")
    final_state = stock_graph.invoke(
        {"series": series, "config": config, "sections": {}, "skip_to_end": False},
        config={"recursion_limit": 50},
    )
    report = final_state.get("report")
    if report is None:
        raise StylizedFactsError(final_state.get("error") or f"no report built for {series.ticker}")
    return report
