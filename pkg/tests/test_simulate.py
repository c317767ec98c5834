import numpy as np
import pytest

from analysis.simulate import fractional_gaussian_noise, simulate_garch, synthetic_price_frame
from errors import DomainError


def test_garch_paths_are_seeded():
    first, _ = simulate_garch(500, rng=np.random.default_rng(1))
    second, _ = simulate_garch(500, rng=np.random.default_rng(1))
    np.testing.assert_array_equal(first, second)


def test_garch_unconditional_variance(rng):
    returns, sigma2 = simulate_garch(20_000, omega=0.1, alpha1=0.1, beta1=0.8, rng=rng)
    assert returns.size == sigma2.size == 20_000
    assert 0.8 <= np.var(returns) <= 1.2


def test_garch_parameter_domain():
    with pytest.raises(DomainError):
        simulate_garch(100, alpha1=0.5, beta1=0.5)
    with pytest.raises(DomainError):
        simulate_garch(100, innovations="t", df=2.0)


def test_fractional_noise_has_unit_variance(rng):
    x = fractional_gaussian_noise(8192, 0.75, rng=rng)
    assert x.size == 8192
    assert 0.8 <= np.var(x) <= 1.2


def test_fractional_noise_domain():
    with pytest.raises(DomainError):
        fractional_gaussian_noise(100, 1.0)


def test_price_frame_layout(rng):
    frame = synthetic_price_frame(250, rng)
    assert list(frame.columns) == ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]
    assert len(frame) == 250
    assert (frame["Close"] > 0).all()
    assert (frame["Volume"] >= 0).all()
    assert frame["Date"].is_unique
