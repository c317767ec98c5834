import numpy as np
import pytest
from scipy import stats

from analysis.core import (
    acf,
    five_number,
    kde,
    lagged_cross_corr,
    moments,
    ols_fit,
    pearson_corr,
    qq_pairs,
    quantiles,
)
from errors import (
    DegenerateSampleError,
    DomainError,
    InsufficientDataError,
    InvalidLagError,
    SingularDesignError,
)


class TestMoments:
    def test_symmetric_sample(self):
        summary = moments([-1.0, 0.0, 1.0])
        assert summary.mean == 0.0
        assert summary.skewness == 0.0
        assert summary.variance == pytest.approx(2.0 / 3.0)

    def test_zero_variance(self):
        with pytest.raises(DegenerateSampleError):
            moments([0.0, 0.0, 0.0])

    def test_permutation_invariance(self, rng):
        x = rng.standard_t(4, size=500)
        base, shuffled = moments(x), moments(rng.permutation(x))
        assert shuffled.n == base.n
        for name in ("mean", "variance", "skewness", "kurtosis"):
            assert getattr(shuffled, name) == pytest.approx(getattr(base, name), rel=1e-9, abs=1e-15)

    def test_exponential_shape(self, rng):
        summary = moments(rng.exponential(1.0, size=1_000_000))
        assert 1.9 <= summary.skewness <= 2.1
        assert 8.5 <= summary.kurtosis <= 9.5


class TestCorrelation:
    def test_identity_and_reflection(self, rng):
        x = rng.normal(size=200)
        assert pearson_corr(x, x) == pytest.approx(1.0)
        assert pearson_corr(x, -x) == pytest.approx(-1.0)

    def test_symmetry_and_affine_invariance(self, rng):
        x = rng.normal(size=300)
        y = 0.5 * x + rng.normal(size=300)
        r = pearson_corr(x, y)
        assert pearson_corr(y, x) == pytest.approx(r, abs=1e-12)
        assert pearson_corr(3.0 * x - 1.0, 0.2 * y + 9.0) == pytest.approx(r, abs=1e-12)
        assert pearson_corr(-x, y) == pytest.approx(-r, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(DegenerateSampleError):
            pearson_corr([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            pearson_corr([1.0, 2.0], [1.0, 2.0, 3.0])


class TestAcf:
    def test_alternating_sequence(self):
        x = np.tile([1.0, -1.0], 50)
        assert acf(x, 1).at(1) <= -0.97

    def test_constant_sequence(self):
        with pytest.raises(DegenerateSampleError):
            acf(np.ones(20), 1)

    def test_lag_bounds(self):
        with pytest.raises(InvalidLagError):
            acf(np.arange(5.0), 5)

    def test_white_noise(self, rng):
        assert abs(acf(rng.normal(size=100_000), 1).at(1)) < 0.02


class TestLaggedCrossCorr:
    def test_zero_lag_is_pearson(self, rng):
        x, y = rng.normal(size=100), rng.normal(size=100)
        assert lagged_cross_corr(x, y, 0) == pytest.approx(pearson_corr(x, y))

    def test_exact_alignment(self, rng):
        x = rng.normal(size=50)
        y = np.concatenate((x[2:], rng.normal(size=2)))
        assert lagged_cross_corr(x, y, 2) == pytest.approx(1.0)

    def test_independent_noise(self, rng):
        x, y = rng.normal(size=10_000), rng.normal(size=10_000)
        for h in range(-10, 11):
            assert abs(lagged_cross_corr(x, y, h)) < 0.05

    def test_overlap_too_small(self):
        with pytest.raises(InsufficientDataError):
            lagged_cross_corr(np.arange(5.0), np.arange(5.0), 3)


class TestOlsFit:
    def test_exact_line(self):
        x = np.arange(10.0)
        fit = ols_fit(x, 2 * x + 1)
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.rss == pytest.approx(0.0, abs=1e-18)

    def test_two_points(self):
        assert ols_fit([0.0, 1.0], [3.0, 5.0]).rss == pytest.approx(0.0, abs=1e-20)

    def test_singular_design(self):
        with pytest.raises(SingularDesignError):
            ols_fit([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_noisy_slope(self, rng):
        x = rng.normal(size=10_000)
        assert 0.97 <= ols_fit(x, x + rng.normal(size=10_000)).slope <= 1.03


class TestDensityAndQuantiles:
    def test_kde_symmetry(self, rng):
        half = rng.normal(size=300)
        sample = np.concatenate((half, -half))
        points = np.linspace(0.1, 3.0, 25)
        np.testing.assert_allclose(kde(sample, points), kde(sample, -points), atol=1e-9)

    def test_kde_mode_near_median(self, rng):
        sample = rng.normal(loc=2.0, size=5000)
        grid = np.linspace(-2.0, 6.0, 801)
        assert abs(grid[np.argmax(kde(sample, grid))] - np.median(sample)) < 0.25

    def test_kde_far_tail(self, rng):
        assert kde(rng.normal(size=500), [50.0])[0] < 1e-12

    def test_kde_zero_variance(self):
        with pytest.raises(DegenerateSampleError):
            kde([1.0, 1.0, 1.0], [1.0])

    def test_quantiles(self):
        assert quantiles([1, 2, 3, 4, 5], [0.5])[0] == 3.0
        with pytest.raises(DomainError):
            quantiles([1, 2, 3], [1.5])

    def test_five_number(self):
        assert five_number(np.arange(1, 101)) == pytest.approx((1.0, 25.75, 50.5, 75.25, 100.0))

    def test_qq_pairs_on_normal_grid(self):
        n = 200
        grid = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        theoretical, sample = qq_pairs(grid, standardize=False)
        np.testing.assert_allclose(theoretical, sample, atol=1e-6)
