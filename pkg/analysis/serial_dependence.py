"""
Serial dependence of return series: portmanteau tests, single-lag
autocorrelation tests, power-law decay of the |r| autocorrelation and the
coarse/fine volatility asymmetry across time scales.
"""

import logging
from typing import Callable, Dict, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from analysis.core import ArrayLike, LineFit, TestResult, acf, lagged_cross_corr, ols_fit
from errors import DegenerateSampleError, DomainError, InsufficientDataError
from ingest.prices import ReturnSeries

logger = logging.getLogger(__name__)

ASYMMETRY_LAGS = 10
MIN_WINDOWS = 40
MIN_POSITIVE_LAGS = 5
ASYMMETRY_WINDOWS = (5, 20)


class PortmanteauResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: Literal["box_pierce", "ljung_box"]
    m: int
    Q: float
    p_value: float
    n: int

    def rejected(self, level: float) -> bool:
        return self.p_value < level


class AcfDecayFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta: float
    lags_used: Tuple[int, ...]
    fit: LineFit
    excluded_lags: Tuple[int, ...]


class AsymmetryResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int
    n_windows: int
    C: Dict[int, float]
    diffs: Dict[int, float]
    bands: Dict[int, float]
    significant_positive: Dict[int, bool]
    any_significant: bool


def portmanteau_statistic(
    autocorrelations: Sequence[float], n: int, variant: str = "ljung_box"
) -> float:
    """Q(m) from r_1..r_m; Box-Pierce n*sum r^2, Ljung-Box n(n+2)*sum r^2/(n-i)"""
    r = np.asarray(autocorrelations, dtype=float)
    if variant == "box_pierce":
        return float(n * np.sum(r**2))
    lags = np.arange(1, r.size + 1)
    return float(n * (n + 2) * np.sum(r**2 / (n - lags)))


def _portmanteau(series: ArrayLike, m: int, variant: str) -> PortmanteauResult:
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if m < 1 or n <= m + 2:
        raise InsufficientDataError(f"portmanteau test needs n > m + 2 (n={n}, m={m})")
    r = acf(x, m).values[1:]
    q = portmanteau_statistic(r, n, variant)
    return PortmanteauResult(
        variant=variant,  # type: ignore[arg-type]
        m=m,
        Q=q,
        p_value=float(stats.chi2.sf(q, m)),
        n=n,
    )


def box_pierce(returns: ArrayLike, m: int = 10) -> PortmanteauResult:
    return _portmanteau(returns, m, "box_pierce")


def ljung_box(returns: ArrayLike, m: int = 10) -> PortmanteauResult:
    return _portmanteau(returns, m, "ljung_box")


def single_lag_statistics(r: float, n: int) -> Tuple[TestResult, TestResult]:
    """r*sqrt(n)/(1-r^2) against N(0,1) and r*sqrt(n-2)/sqrt(1-r^2) against t(n-2)"""
    if abs(r) >= 1.0:
        raise DegenerateSampleError("autocorrelation of +-1 makes the statistics undefined")
    z = r * np.sqrt(n) / (1.0 - r**2)
    t = r * np.sqrt(n - 2) / np.sqrt(1.0 - r**2)
    normal = TestResult(
        name="autocorrelation_normal",
        statistic=float(z),
        p_value=float(min(1.0, 2.0 * stats.norm.sf(abs(z)))),
        n=n,
    )
    student = TestResult(
        name="autocorrelation_t",
        statistic=float(t),
        p_value=float(min(1.0, 2.0 * stats.t.sf(abs(t), n - 2))),
        n=n,
        df=n - 2,
    )
    return normal, student


def single_lag_tests(series: ArrayLike, lag: int) -> Tuple[TestResult, TestResult]:
    x = np.asarray(series, dtype=float).ravel()
    if x.size <= lag + 3:
        raise InsufficientDataError(f"lag-{lag} test needs n > {lag + 3}, got {x.size}")
    r = acf(x, lag).at(lag)
    return single_lag_statistics(r, x.size)


def fit_acf_power_law(autocorrelations: Dict[int, float]) -> AcfDecayFit:
    """log ac(l) = log k - beta log l over the lags with positive ac(l)"""
    used = tuple(sorted(l for l, v in autocorrelations.items() if l >= 1 and v > 0))
    excluded = tuple(sorted(l for l, v in autocorrelations.items() if l >= 1 and v <= 0))
    if len(used) < MIN_POSITIVE_LAGS:
        raise InsufficientDataError(
            f"only {len(used)} lags have positive autocorrelation; need {MIN_POSITIVE_LAGS}"
        )
    fit = ols_fit(np.log(used), np.log([autocorrelations[l] for l in used]))
    return AcfDecayFit(beta=-fit.slope, lags_used=used, fit=fit, excluded_lags=excluded)


def acf_power_law_fit(
    returns: ArrayLike,
    max_lag: int = 30,
    acf_source: Optional[Callable[[np.ndarray, int], Sequence[float]]] = None,
) -> AcfDecayFit:
    """
    Power-law decay of the autocorrelation of |returns|.

    ``acf_source`` replaces the sample ACF (values for lags 0..L); tests use it
    to inject exact power laws.
    """
    x = np.abs(np.asarray(returns, dtype=float).ravel())
    if max_lag < 5 or x.size <= max_lag:
        raise InsufficientDataError(f"ACF decay fit needs n > L >= 5 (n={x.size}, L={max_lag})")
    values = acf_source(x, max_lag) if acf_source else acf(x, max_lag).values
    return fit_acf_power_law({l: float(values[l]) for l in range(1, max_lag + 1)})


def window_measures(daily: ArrayLike, window: int) -> Tuple[np.ndarray, np.ndarray]:
    """(coarse, fine) per non-overlapping window anchored at the start"""
    x = np.asarray(daily, dtype=float).ravel()
    m = x.size // window
    blocks = x[: m * window].reshape(m, window)
    coarse = blocks.sum(axis=1) ** 2
    fine = blocks.var(axis=1)
    return coarse, fine


def asymmetry_from_measures(
    fine: ArrayLike, coarse: ArrayLike, window: int, lags: int = ASYMMETRY_LAGS
) -> AsymmetryResult:
    """C_h = corr(fine_{t+h}, coarse_t); diff_l = C_l - C_{-l} against +-1.96*sqrt(2/N_l)"""
    fine = np.asarray(fine, dtype=float)
    coarse = np.asarray(coarse, dtype=float)
    n = fine.size
    C = {h: lagged_cross_corr(fine, coarse, h) for h in range(-lags, lags + 1)}
    diffs, bands, significant = {}, {}, {}
    for l in range(1, lags + 1):
        diffs[l] = C[l] - C[-l]
        bands[l] = 1.96 * np.sqrt(2.0 / (n - l))
        significant[l] = bool(diffs[l] > bands[l])
    return AsymmetryResult(
        window=window,
        n_windows=n,
        C=C,
        diffs=diffs,
        bands={l: float(b) for l, b in bands.items()},
        significant_positive=significant,
        any_significant=any(significant.values()),
    )


def asymmetry_timescales(daily: ReturnSeries | ArrayLike, window: int = 5) -> AsymmetryResult:
    if window not in ASYMMETRY_WINDOWS:
        raise DomainError(f"window must be 5 (weekly) or 20 (monthly) trading days, got {window}")
    values = daily.values if isinstance(daily, ReturnSeries) else daily
    coarse, fine = window_measures(values, window)
    if coarse.size < MIN_WINDOWS:
        raise InsufficientDataError(
            f"only {coarse.size} complete windows of {window} days; need {MIN_WINDOWS}"
        )
    return asymmetry_from_measures(fine, coarse, window)
