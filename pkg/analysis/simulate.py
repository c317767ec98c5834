"""
Seeded simulators: GARCH(1,1) return paths, fractional Gaussian noise and
synthetic Yahoo-style price files.

Used by the ``simulate`` subcommand and as oracles in the test-suite.
"""

import logging
from typing import Literal, Optional, Tuple

import numpy as np
import pandas as pd

from errors import DomainError

logger = logging.getLogger(__name__)

BURN_IN = 500


def simulate_garch(
    n: int,
    omega: float = 0.1,
    alpha1: float = 0.1,
    beta1: float = 0.8,
    mu: float = 0.0,
    innovations: Literal["normal", "t"] = "normal",
    df: float = 4.0,
    rng: Optional[np.random.Generator] = None,
    burn_in: int = BURN_IN,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Simulate n returns of a GARCH(1,1) process; returns (returns, sigma2).

    Student-t innovations are rescaled to unit variance so omega, alpha1 and
    beta1 keep their meaning.
    """
    if omega <= 0 or alpha1 < 0 or beta1 < 0 or alpha1 + beta1 >= 1:
        raise DomainError("GARCH simulation needs omega > 0, alpha1, beta1 >= 0, alpha1 + beta1 < 1")
    if innovations == "t" and df <= 2:
        raise DomainError("Student-t innovations need df > 2 for a finite variance")
    rng = rng or np.random.default_rng()
    total = n + burn_in
    if innovations == "t":
        shocks = rng.standard_t(df, size=total) * np.sqrt((df - 2.0) / df)
    else:
        shocks = rng.standard_normal(total)

    sigma2 = np.empty(total)
    eps = np.empty(total)
    previous_sigma2 = omega / (1.0 - alpha1 - beta1)
    previous_eps2 = previous_sigma2
    for t in range(total):
        sigma2[t] = omega + alpha1 * previous_eps2 + beta1 * previous_sigma2
        eps[t] = np.sqrt(sigma2[t]) * shocks[t]
        previous_sigma2, previous_eps2 = sigma2[t], eps[t] ** 2
    return mu + eps[burn_in:], sigma2[burn_in:]


def fractional_gaussian_noise(
    n: int, hurst: float, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Exact fGn of unit variance by circulant embedding of its autocovariance"""
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    rng = rng or np.random.default_rng()
    k = np.arange(n + 1, dtype=float)
    two_h = 2.0 * hurst
    gamma = 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h)
    row = np.concatenate((gamma, gamma[-2:0:-1]))
    eigenvalues = np.fft.fft(row).real
    if np.any(eigenvalues < -1e-10):
        raise DomainError("circulant embedding is not non-negative definite")
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    m = row.size
    noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    path = np.fft.fft(np.sqrt(eigenvalues / m) * noise)
    return path.real[:n]


def synthetic_price_frame(
    n_days: int,
    rng: np.random.Generator,
    start: str = "2010-01-04",
    omega: float = 0.02,
    alpha1: float = 0.08,
    beta1: float = 0.9,
    innovations: Literal["normal", "t"] = "t",
) -> pd.DataFrame:
    """
    Yahoo-style OHLCV frame for one synthetic stock.

    Daily returns (in percent) follow GARCH(1,1); volume scales with the
    conditional variance times a log-normal factor so volume and volatility
    move together.
    """
    returns, sigma2 = simulate_garch(
        n_days - 1, omega=omega, alpha1=alpha1, beta1=beta1, innovations=innovations, rng=rng
    )
    log_prices = np.log(100.0) + np.concatenate(([0.0], np.cumsum(returns / 100.0)))
    close = np.exp(log_prices)
    activity = np.concatenate(([sigma2.mean()], sigma2)) / sigma2.mean()
    volume = np.floor(1e5 * activity * rng.lognormal(0.0, 0.5, size=n_days)).astype(np.int64)
    dates = pd.bdate_range(start=start, periods=n_days)
    spread = np.abs(rng.normal(0.0, 0.005, size=n_days))
    return pd.DataFrame(
        {
            "Date": dates.strftime("%Y-%m-%d"),
            "Open": close * (1.0 - spread / 2.0),
            "High": close * (1.0 + spread),
            "Low": close * (1.0 - spread),
            "Close": close,
            "Adj Close": close,
            "Volume": volume,
        }
    )


def write_price_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False, float_format="%.6f")
