"""
Rescaled-range (R/S) Hurst exponent.

H = 1 - alpha/2 links the exponent to the decay alpha of the autocorrelation,
so white noise sits at 0.5 and persistent series above it.
"""

import logging
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from analysis.core import ArrayLike, LineFit, ols_fit
from errors import DegenerateSampleError, DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

MIN_BLOCK = 8


class HurstResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    H: float
    raw_slope: float
    grid: Tuple[int, ...]
    rs_values: Tuple[float, ...]
    fit: LineFit
    skipped_blocks: int = 0


def _rs_blocks(x: np.ndarray, block: int) -> Tuple[np.ndarray, int]:
    m = x.size // block
    blocks = x[: m * block].reshape(m, block)
    deviations = blocks - blocks.mean(axis=1, keepdims=True)
    profile = np.cumsum(deviations, axis=1)
    ranges = profile.max(axis=1) - profile.min(axis=1)
    spreads = blocks.std(axis=1)
    usable = spreads > 0
    return ranges[usable] / spreads[usable], int(m - usable.sum())


def rs_statistic(series: ArrayLike, l: int) -> float:
    """Mean R/S over the floor(n/l) consecutive blocks of length l"""
    x = np.asarray(series, dtype=float).ravel()
    if l < MIN_BLOCK:
        raise DomainError(f"block length must be at least {MIN_BLOCK}, got {l}")
    if x.size < 2 * l:
        raise InsufficientDataError(f"series of length {x.size} too short for blocks of {l}")
    ratios, skipped = _rs_blocks(x, l)
    if ratios.size == 0:
        raise DegenerateSampleError(f"every block of length {l} has zero variance")
    if skipped:
        logger.debug(f"R/S at l={l}: skipped {skipped} zero-variance blocks")
    return float(ratios.mean())


def hurst(series: ArrayLike) -> HurstResult:
    """Slope of log(R/S)_l on log l over the dyadic grid 8, 16, ..., n/2"""
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if n < 64:
        raise InsufficientDataError(f"Hurst estimation needs n >= 64, got {n}")

    grid = []
    l = MIN_BLOCK
    while l <= n // 2:
        grid.append(l)
        l *= 2
    if len(grid) < 3:
        raise InsufficientDataError(f"only {len(grid)} block lengths available for n={n}")

    rs_values = []
    skipped_total = 0
    for block in grid:
        ratios, skipped = _rs_blocks(x, block)
        skipped_total += skipped
        if ratios.size == 0:
            raise DegenerateSampleError(f"every block of length {block} has zero variance")
        rs_values.append(float(ratios.mean()))
    if skipped_total:
        logger.warning(f"Hurst: skipped {skipped_total} zero-variance blocks")

    fit = ols_fit(np.log(grid), np.log(rs_values))
    return HurstResult(
        H=float(np.clip(fit.slope, 0.0, 1.0)),
        raw_slope=fit.slope,
        grid=tuple(grid),
        rs_values=tuple(rs_values),
        fit=fit,
        skipped_blocks=skipped_total,
    )
