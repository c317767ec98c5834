import numpy as np
import pytest

from analysis.long_memory import hurst, rs_statistic
from errors import DegenerateSampleError, DomainError, InsufficientDataError


def test_linear_ramp_is_persistent():
    assert hurst(np.arange(4096, dtype=float)).H > 0.9


def test_constant_series():
    with pytest.raises(DegenerateSampleError):
        hurst(np.ones(512))
    with pytest.raises(DegenerateSampleError):
        rs_statistic(np.ones(64), 8)


def test_too_short():
    with pytest.raises(InsufficientDataError):
        hurst(np.arange(32, dtype=float))


def test_block_too_small(rng):
    with pytest.raises(DomainError):
        rs_statistic(rng.normal(size=100), 4)


def test_flat_blocks_are_skipped(rng):
    x = rng.normal(size=1024)
    x[:16] = 0.0
    result = hurst(x)
    # two blocks of 8 and one block of 16
    assert result.skipped_blocks == 3


def test_grid_is_dyadic(rng):
    result = hurst(rng.normal(size=1000))
    assert result.grid == (8, 16, 32, 64, 128, 256)
    assert result.H == pytest.approx(min(max(result.raw_slope, 0.0), 1.0))


@pytest.mark.slow
def test_white_noise_oracle(rng):
    hits = sum(0.45 <= hurst(rng.normal(size=4096)).H <= 0.62 for _ in range(200))
    assert hits >= 180


@pytest.mark.slow
def test_fractional_noise_oracle(fgn):
    hits = sum(0.65 <= hurst(fgn(4096, 0.75)).H <= 0.85 for _ in range(100))
    assert hits >= 90


def test_alternating_blocks_have_unit_rs():
    assert rs_statistic(np.tile([1.0, -1.0], 8), 8) == pytest.approx(1.0)


def test_rs_ignores_a_constant_shift(rng):
    x = rng.normal(size=256)
    assert rs_statistic(x + 5.0, 16) == pytest.approx(rs_statistic(x, 16), abs=1e-12)


def test_hurst_affine_invariance(rng):
    x = rng.normal(size=2048)
    assert hurst(3.5 * x - 2.0).H == pytest.approx(hurst(x).H, abs=1e-9)
