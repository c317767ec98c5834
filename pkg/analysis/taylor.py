"""Taylor effect (lag-1 autocorrelation of |R|^d across d) and the kurtosis test"""

import logging
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from analysis.core import ArrayLike, acf, moments
from errors import DegenerateSampleError, DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

FD_STEP = 1e-4
GRADIENT_TOLERANCE = 1e-8
GRID_POINTS = 64
BISECTION_WIDTH = 1e-7
MAX_NEWTON_STEPS = 50
GRID_SLACK = 1e-9

Objective = Callable[[float], float]


class TaylorResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    d_star: float
    value_at_d_star: float
    acf_abs: float
    acf_sq: float
    abs_exceeds_sq: bool
    method: Literal["bisection", "newton", "grid"]
    d_lo: float
    d_hi: float
    zero_share: float = 0.0
    reliable: bool = True


class KurtosisTestResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    K: float
    statistic: float
    p_value: float
    n: int

    def rejected(self, level: float) -> bool:
        return self.p_value < level


def power_acf1(returns: ArrayLike, d: float) -> float:
    """Lag-1 autocorrelation of |r_t|^d"""
    if d <= 0.0:
        raise DomainError(f"exponent d must be positive, got {d}")
    magnitudes = np.abs(np.asarray(returns, dtype=float).ravel())
    if magnitudes.size < 30:
        raise InsufficientDataError(f"Taylor effect needs n >= 30, got {magnitudes.size}")
    powered = magnitudes**d
    if np.ptp(powered) <= 0.0:
        raise DegenerateSampleError(f"|r|^d is constant at d={d}")
    try:
        return acf(powered, 1).at(1)
    except DegenerateSampleError as exc:
        raise DegenerateSampleError(f"|r|^d is degenerate at d={d}") from exc


def _derivative(g: Objective, d: float, h: float) -> float:
    return (g(d + h) - g(d - h)) / (2.0 * h)


def _second_derivative(g: Objective, d: float, h: float) -> float:
    return (g(d + h) - 2.0 * g(d) + g(d - h)) / h**2


def _bisect(g: Objective, lo: float, hi: float, h: float) -> float:
    # invariant: g'(lo) > 0 > g'(hi)
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if _derivative(g, mid, h) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton(g: Objective, start: float, lo: float, hi: float, h: float) -> Optional[float]:
    d = start
    for _ in range(MAX_NEWTON_STEPS):
        slope = _derivative(g, d, h)
        if abs(slope) < GRADIENT_TOLERANCE:
            return d
        curvature = _second_derivative(g, d, h)
        if curvature >= 0.0:
            return None
        d = d - slope / curvature
        if not lo <= d <= hi:
            return None
    return d if abs(_derivative(g, d, h)) < GRADIENT_TOLERANCE else None


def maximize_taylor_d(
    returns: ArrayLike,
    d_lo: float = 0.125,
    d_hi: float = 4.0,
    objective: Optional[Objective] = None,
    fd_step: float = FD_STEP,
) -> TaylorResult:
    """
    Exponent d in [d_lo, d_hi] maximizing the lag-1 autocorrelation of |r|^d.

    A 64-point grid locates the best cell; the stationary point of g is
    bracketed there, bisected on the sign of g' and polished by Newton steps
    on g'. The answer is kept only if it is within 1e-9 of the grid maximum,
    otherwise the grid argmax is returned. ``objective`` replaces
    d -> power_acf1(returns, d).
    """
    if not 0.0 < d_lo < d_hi:
        raise DomainError(f"search interval must satisfy 0 < d_lo < d_hi, got [{d_lo}, {d_hi}]")
    r = np.asarray(returns, dtype=float).ravel()
    g: Objective = objective or (lambda d: power_acf1(r, d))
    h = min(fd_step, d_lo / 2.0)

    grid = np.linspace(d_lo, d_hi, GRID_POINTS)
    values = np.array([g(float(d)) for d in grid])
    best = int(np.argmax(values))
    grid_max = float(values[best])

    d_star, method = float(grid[best]), "grid"
    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, GRID_POINTS - 1)])
    slope_left = _derivative(g, max(left, d_lo + h), h)
    slope_right = _derivative(g, min(right, d_hi - h), h)
    if slope_left > 0.0 > slope_right:
        d_star, method = _bisect(g, left, right, h), "bisection"
        polished = _newton(g, d_star, left, right, h)
        if polished is not None:
            d_star, method = polished, "newton"
    else:
        logger.debug(f"Taylor: g' does not change sign near d={d_star}; using grid point")

    value = g(d_star)
    if value < grid_max - GRID_SLACK:
        logger.warning(f"⚠️ Taylor optimizer landed below the grid maximum at d={d_star}")
        d_star, value, method = float(grid[best]), grid_max, "grid"

    acf_abs, acf_sq = g(1.0), g(2.0)
    zero_share = float(np.mean(r == 0.0)) if r.size else 0.0
    if zero_share > 0.5:
        logger.warning(f"⚠️ {zero_share:.0%} of returns are zero; Taylor exponent unreliable")
    return TaylorResult(
        d_star=d_star,
        value_at_d_star=value,
        acf_abs=acf_abs,
        acf_sq=acf_sq,
        abs_exceeds_sq=bool(acf_abs > acf_sq),
        method=method,  # type: ignore[arg-type]
        d_lo=d_lo,
        d_hi=d_hi,
        zero_share=zero_share,
        reliable=zero_share <= 0.5,
    )


def kurtosis_statistic(n: int, kurtosis: float) -> float:
    return float(np.sqrt(n) * (kurtosis - 3.0) / np.sqrt(24.0))


def kurtosis_test(sample: ArrayLike) -> KurtosisTestResult:
    """One-sided test of K = 3 against K > 3 with sqrt(n)(K - 3)/sqrt(24) ~ N(0, 1)"""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 20:
        raise InsufficientDataError(f"kurtosis test needs n >= 20, got {x.size}")
    summary = moments(x)
    statistic = kurtosis_statistic(summary.n, summary.kurtosis)
    return KurtosisTestResult(
        K=summary.kurtosis,
        statistic=statistic,
        p_value=float(np.clip(stats.norm.sf(statistic), 0.0, 1.0)),
        n=summary.n,
    )
