from typing import Union, get_args, get_origin

import numpy as np

from battery.models import NotEvaluable, StockFactReport, is_evaluable
from battery.workflow import analyze_stock, create_workflow
from config import RunConfig


def _maybe_slots():
    return [
        name
        for name, field in StockFactReport.model_fields.items()
        if get_origin(field.annotation) is Union and NotEvaluable in get_args(field.annotation)
    ]


def test_graph_compiles():
    assert create_workflow() is not None


def test_short_series_is_skipped(make_series):
    report = analyze_stock(make_series(np.linspace(100, 110, 100)), RunConfig())
    assert report.status == "skipped"
    assert "100" in report.skip_reason
    assert report.n_obs == 100
    for name in _maybe_slots():
        assert isinstance(getattr(report, name), NotEvaluable), name


def test_garch_series_fully_reported(synthetic_series):
    config = RunConfig()
    report = analyze_stock(synthetic_series(2500), config)
    assert report.status == "analyzed"
    assert report.n_obs == 2500

    for name in (
        "mean_return",
        "sd_return",
        "moments",
        "leverage_corr",
        "tail",
        "tail_left",
        "tail_right",
        "volume_tail",
        "volume_volatility_corr",
        "volume_return_corr",
        "hurst",
        "volume_hurst",
        "garch",
        "taylor",
    ):
        assert is_evaluable(getattr(report, name)), name

    for mode in ("overlapping", "non_overlapping"):
        assert sorted(report.normality[mode]) == list(config.horizons)
        assert set(report.normality[mode][1]) == {"ks", "sw", "jb"}
        assert is_evaluable(report.normality[mode][1]["ks"])
    assert sorted(report.asymmetry) == [5, 20]
    assert all(is_evaluable(v) for v in report.absence.values())
    assert all(is_evaluable(v) for v in report.clustering.values())
    assert sorted(report.clustering_lags) == [1, 2, 3, 4, 5]
    assert set(report.intermittency) == {"returns", "residuals"}
    assert is_evaluable(report.intermittency["returns"])


def test_constant_prices_mark_variance_dependent_fields(make_series, rng):
    series = make_series(np.full(600, 50.0), rng.integers(1000, 2000, size=600))
    report = analyze_stock(series, RunConfig())
    assert report.status == "analyzed"
    assert report.sd_return == 0.0
    assert report.mean_return == 0.0
    for name in ("moments", "leverage_corr", "tail", "hurst", "garch", "taylor", "acf_decay"):
        assert isinstance(getattr(report, name), NotEvaluable), name
    assert isinstance(report.normality["overlapping"][1]["jb"], NotEvaluable)
    assert isinstance(report.absence["ljung_box"], NotEvaluable)
    # volume is not constant, so its analyses still run
    assert is_evaluable(report.volume_hurst)


def test_lower_minimum_admits_short_series(synthetic_series):
    report = analyze_stock(synthetic_series(300), RunConfig(min_observations=250))
    assert report.status == "analyzed"
    assert isinstance(report.asymmetry[20], NotEvaluable)


def test_reports_are_reproducible(synthetic_series):
    series = synthetic_series(800)
    first, second = analyze_stock(series, RunConfig()), analyze_stock(series, RunConfig())
    assert first.model_dump_json() == second.model_dump_json()
