"""Shared fixtures: seeded simulators and synthetic price files"""

import os
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import pytest

from analysis.simulate import (
    fractional_gaussian_noise,
    simulate_garch,
    synthetic_price_frame,
    write_price_csv,
)
from battery.models import StockFactReport
from ingest.manifest import ManifestEntry, MarketManifest, write_manifest
from ingest.prices import PriceSeries


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240101)


@pytest.fixture
def garch_returns(rng) -> np.ndarray:
    """2500 returns of GARCH(1,1) with omega=0.1, alpha1=0.1, beta1=0.8"""
    returns, _ = simulate_garch(2500, omega=0.1, alpha1=0.1, beta1=0.8, rng=rng)
    return returns


@pytest.fixture
def fgn(rng) -> Callable[[int, float], np.ndarray]:
    return lambda n, hurst: fractional_gaussian_noise(n, hurst, rng=rng)


@pytest.fixture
def make_series() -> Callable[..., PriceSeries]:
    """PriceSeries from closes (and optional volumes) on consecutive business days"""

    def build(
        close, volume=None, ticker: str = "TEST", start: str = "2015-01-02"
    ) -> PriceSeries:
        close = np.asarray(close, dtype=float)
        if volume is None:
            volume = np.full(close.size, 1000.0)
        dates = pd.bdate_range(start=start, periods=close.size).to_numpy(dtype="datetime64[D]")
        return PriceSeries(ticker=ticker, dates=dates, close=close, volume=np.asarray(volume))

    return build


@pytest.fixture
def synthetic_series(rng, make_series) -> Callable[[int], PriceSeries]:
    """Synthetic GARCH price path with volumes, as the simulate subcommand writes it"""

    def build(n_days: int = 2500, ticker: str = "SYN") -> PriceSeries:
        frame = synthetic_price_frame(n_days, rng)
        return make_series(frame["Close"], frame["Volume"], ticker=ticker)

    return build


@pytest.fixture
def write_market(tmp_path, rng) -> Callable[..., str]:
    """Write synthetic price CSVs plus a manifest under tmp_path; returns the manifest path"""

    def build(
        markets: Optional[Dict[str, List[str]]] = None, n_days: int = 600
    ) -> str:
        markets = markets or {"alpha": ["A1", "A2"]}
        manifests = []
        for market, tickers in markets.items():
            os.makedirs(tmp_path / "data" / market, exist_ok=True)
            entries = []
            for ticker in tickers:
                relative = os.path.join(market, f"{ticker}.csv")
                write_price_csv(
                    synthetic_price_frame(n_days, rng), str(tmp_path / "data" / relative)
                )
                entries.append(ManifestEntry(ticker=ticker, path=relative))
            manifests.append(MarketManifest(market=market, entries=tuple(entries)))
        manifest_path = str(tmp_path / "data" / "manifest.json")
        write_manifest(manifest_path, manifests)
        return manifest_path

    return build


@pytest.fixture
def stock_report() -> Callable[..., StockFactReport]:
    """Analyzed StockFactReport with only the given sections filled in"""

    def build(ticker: str, **sections) -> StockFactReport:
        return StockFactReport(ticker=ticker, n_obs=1000, **sections)

    return build
