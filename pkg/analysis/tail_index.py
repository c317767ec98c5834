"""
Hill-type tail-index estimation with a data-driven threshold.

The reported tail index is the Pareto exponent alpha = 1 / xi, where xi is
the extreme-value index estimated by Hill. The number of upper order
statistics k is chosen by minimising the Kolmogorov-Smirnov distance between
the exceedances and the fitted Pareto tail. A stock counts as heavy tailed
when xi clears ``xi_min`` and the Pareto tail beats an exponential tail on
the same exceedances (normalised log-likelihood ratio above ``vuong_z``).
"""

import logging
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from analysis.core import ArrayLike
from errors import DomainError, InsufficientDataError
from ingest.prices import ReturnSeries

logger = logging.getLogger(__name__)

XI_ADMISSIBLE = 1e-6
GRID_POINTS = 50
GRID_START = 10


class TailIndexResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: float
    alpha: float
    k: int
    n: int
    heavy_tailed: bool
    alpha_finite: bool
    ks_distance: float
    vuong_z: float
    path: Tuple[Tuple[int, float], ...] = ()


def _positive_sorted(sample: ArrayLike) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    return np.sort(x[x > 0])


def hill_estimate(sample: ArrayLike, k: int) -> float:
    """xi_hat = mean of log(X_(n-i+1) / X_(n-k)) over the top k order statistics"""
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    positives = _positive_sorted(sample)
    if positives.size <= k:
        raise InsufficientDataError(f"need more than k={k} positive values, got {positives.size}")
    logs = np.log(positives)
    return float(np.mean(logs[-k:] - logs[-k - 1]))


def _hill_path(logs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # suffix sums give every xi(k) in one pass
    tail_sums = np.cumsum(logs[::-1])
    return np.array([tail_sums[k - 1] / k - logs[-k - 1] for k in grid])


def _ks_to_pareto(logs: np.ndarray, k: int, xi: float) -> float:
    log_ratio = logs[-k:] - logs[-k - 1]  # ascending
    fitted = 1.0 - np.exp(-log_ratio / xi)
    upper = np.arange(1, k + 1) / k
    lower = np.arange(0, k) / k
    return float(max(np.max(upper - fitted), np.max(fitted - lower)))


def _vuong_pareto_vs_exponential(values: np.ndarray, k: int, xi: float) -> float:
    """Normalised log-likelihood ratio, positive when the Pareto tail fits better"""
    threshold = values[-k - 1]
    tail = values[-k:]
    excess = tail - threshold
    mean_excess = float(np.mean(excess))
    if mean_excess <= 0.0 or xi <= 0.0:
        return 0.0
    alpha = 1.0 / xi
    rate = 1.0 / mean_excess
    pareto = np.log(alpha) + alpha * np.log(threshold) - (alpha + 1.0) * np.log(tail)
    exponential = np.log(rate) - rate * excess
    diff = pareto - exponential
    spread = float(np.std(diff))
    if spread <= 0.0:
        return 0.0
    return float(np.sum(diff) / (spread * np.sqrt(k)))


def k_grid(n_positive: int) -> np.ndarray:
    upper = max(GRID_START, n_positive // 4)
    grid = np.unique(np.round(np.geomspace(GRID_START, upper, GRID_POINTS)).astype(int))
    return grid[(grid >= 2) & (grid < n_positive)]


def adaptive_tail_index(
    sample: ArrayLike, xi_min: float = 0.05, vuong_z: float = 1.645
) -> TailIndexResult:
    x = np.asarray(sample, dtype=float).ravel()
    values = _positive_sorted(x)
    if x.size < 100 or values.size < 50:
        raise InsufficientDataError(
            f"tail estimation needs n >= 100 with >= 50 positive values "
            f"(n={x.size}, positive={values.size})"
        )
    logs = np.log(values)
    grid = k_grid(values.size)
    xis = _hill_path(logs, grid)
    path = tuple((int(k), float(xi)) for k, xi in zip(grid, xis))

    distances = np.array(
        [_ks_to_pareto(logs, k, xi) if xi > XI_ADMISSIBLE else np.inf for k, xi in zip(grid, xis)]
    )
    if not np.any(np.isfinite(distances)):
        k = int(grid[0])
        xi = max(float(xis[0]), 0.0)
        return TailIndexResult(
            xi=xi,
            alpha=float("inf"),
            k=k,
            n=x.size,
            heavy_tailed=False,
            alpha_finite=False,
            ks_distance=float("nan"),
            vuong_z=0.0,
            path=path,
        )

    # argmin returns the first minimum, so ties go to the smallest k
    best = int(np.argmin(distances))
    k, xi = int(grid[best]), float(xis[best])
    z = _vuong_pareto_vs_exponential(values, k, xi)
    return TailIndexResult(
        xi=xi,
        alpha=1.0 / xi,
        k=k,
        n=x.size,
        heavy_tailed=bool(xi > xi_min and z > vuong_z),
        alpha_finite=True,
        ks_distance=float(distances[best]),
        vuong_z=z,
        path=path,
    )


def return_tail_index(
    returns: ReturnSeries | ArrayLike,
    side: Literal["both", "left", "right"] = "both",
    xi_min: float = 0.05,
    vuong_z: float = 1.645,
) -> TailIndexResult:
    """Tail index of demeaned returns; 'both' pools the two tails through |r|"""
    values = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=float)
    if values.size == 0 or np.ptp(values) <= 0.0:
        raise InsufficientDataError("constant returns have no tail to estimate")
    centred = values - values.mean()
    if side == "both":
        tail = np.abs(centred)
    elif side == "right":
        tail = centred
    elif side == "left":
        tail = -centred
    else:
        raise DomainError(f"unknown tail side '{side}'")
    return adaptive_tail_index(tail, xi_min=xi_min, vuong_z=vuong_z)
