import numpy as np
import pytest

from analysis.tail_index import adaptive_tail_index, hill_estimate, k_grid, return_tail_index
from errors import DomainError, InsufficientDataError


def _pareto_quantiles(n: int, alpha: float) -> np.ndarray:
    p = (np.arange(1, n + 1) - 0.5) / n
    return (1.0 - p) ** (-1.0 / alpha)


class TestHillEstimate:
    def test_pareto_quantile_grid(self):
        xi = hill_estimate(_pareto_quantiles(10_000, 2.0), 500)
        assert 0.45 <= xi <= 0.55

    def test_tied_top_values(self):
        sample = np.concatenate((np.linspace(1.0, 2.0, 100), np.full(11, 5.0)))
        assert hill_estimate(sample, 10) == 0.0

    def test_k_too_small(self):
        with pytest.raises(DomainError):
            hill_estimate(np.arange(1.0, 100.0), 1)

    def test_not_enough_positives(self):
        with pytest.raises(InsufficientDataError):
            hill_estimate([-1.0, 1.0, 2.0], 5)


class TestAdaptiveTailIndex:
    def test_path_covers_grid(self, rng):
        sample = rng.pareto(3.0, size=2000) + 1.0
        result = adaptive_tail_index(sample)
        assert [k for k, _ in result.path] == list(k_grid(2000))
        assert result.k in dict(result.path)
        assert result.alpha == pytest.approx(1.0 / result.xi)

    def test_no_admissible_k(self):
        sample = np.concatenate((np.linspace(0.1, 1.0, 300), np.full(200, 2.0)))
        result = adaptive_tail_index(sample)
        assert not result.heavy_tailed
        assert not result.alpha_finite
        assert result.alpha == float("inf")

    def test_constant_returns(self):
        with pytest.raises(InsufficientDataError):
            return_tail_index(np.full(500, 0.01))

    def test_side_selection(self, rng):
        n = 5000
        heavy_left = -(rng.pareto(2.0, size=n) + 1.0)
        light_right = np.abs(rng.normal(size=n))
        returns = np.where(rng.uniform(size=n) < 0.5, heavy_left, light_right)
        left = return_tail_index(returns, side="left")
        right = return_tail_index(returns, side="right")
        assert left.alpha < right.alpha

    def test_unknown_side(self, rng):
        with pytest.raises(DomainError):
            return_tail_index(rng.normal(size=500), side="middle")

    def test_exponential_not_heavy(self, rng):
        flagged = sum(adaptive_tail_index(rng.exponential(size=10_000)).heavy_tailed for _ in range(20))
        assert flagged <= 4

    @pytest.mark.slow
    def test_pareto_oracle(self, rng):
        hits = 0
        for _ in range(100):
            alpha = adaptive_tail_index(rng.pareto(3.0, size=10_000) + 1.0).alpha
            hits += 2.5 <= alpha <= 3.5
        assert hits >= 90

    @pytest.mark.slow
    def test_gaussian_control_not_heavy(self, rng):
        not_heavy = sum(
            not adaptive_tail_index(np.abs(rng.normal(size=10_000))).heavy_tailed for _ in range(100)
        )
        assert not_heavy >= 80

    @pytest.mark.slow
    def test_student_t_returns(self, rng):
        hits = sum(
            2.0 <= return_tail_index(rng.standard_t(4, size=5000) * 0.01).alpha <= 6.0
            for _ in range(50)
        )
        assert hits >= 40


def test_hill_scale_invariance(rng):
    sample = rng.pareto(2.5, size=1000) + 1.0
    assert hill_estimate(10.0 * sample, 100) == pytest.approx(hill_estimate(sample, 100), rel=1e-9)


def test_adaptive_scale_invariance(rng):
    sample = rng.pareto(3.0, size=2000) + 1.0
    base, scaled = adaptive_tail_index(sample), adaptive_tail_index(2.0 * sample)
    assert scaled.k == base.k
    assert scaled.xi == pytest.approx(base.xi, rel=1e-9)
    assert scaled.heavy_tailed == base.heavy_tailed
