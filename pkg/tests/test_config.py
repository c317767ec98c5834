import json

import pytest
from pydantic import ValidationError

from config import RunConfig, load_run_config, parse_threshold_overrides, resolve_relative


def test_hash_ignores_non_result_fields():
    base = RunConfig()
    moved = RunConfig(output_dir="/elsewhere", workers=4, log_level="DEBUG")
    assert base.config_hash == moved.config_hash


def test_hash_tracks_result_fields():
    assert RunConfig().config_hash != RunConfig(significance=0.01).config_hash
    assert RunConfig().config_hash != RunConfig(overlapping=False).config_hash


def test_file_then_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps({"significance": 0.01, "horizons": [1, 5], "verdict_thresholds": {"gain_loss_share": 0.7}})
    )
    config = load_run_config(
        str(path),
        {"significance": 0.1, "horizons": None, "verdict_thresholds": {"leverage_verified": 0.6}},
    )
    assert config.significance == 0.1
    assert config.horizons == (1, 5)
    assert config.verdict_thresholds.gain_loss_share == 0.7
    assert config.verdict_thresholds.leverage_verified == 0.6


@pytest.mark.parametrize(
    "values",
    [
        {"horizons": (5, 1)},
        {"significance": 1.5},
        {"asymmetry_windows": (10,)},
        {"taylor_interval": (2.0, 1.0)},
        {"workers": 0},
        {"unknown_field": 1},
    ],
)
def test_invalid_values_rejected(values):
    with pytest.raises(ValidationError):
        RunConfig(**values)


def test_threshold_overrides():
    assert parse_threshold_overrides(["leverage_verified=0.55", "heavy_tail_range=[2, 4]"]) == {
        "leverage_verified": 0.55,
        "heavy_tail_range": [2, 4],
    }
    with pytest.raises(ValueError):
        parse_threshold_overrides(["leverage_verified"])


def test_unknown_threshold_rejected():
    with pytest.raises(ValidationError):
        load_run_config(overrides={"verdict_thresholds": {"not_a_threshold": 1.0}})


def test_resolve_relative(tmp_path):
    base = tmp_path / "data" / "manifest.json"
    assert resolve_relative(str(base), "m/x.csv") == str((tmp_path / "data" / "m" / "x.csv").resolve())
    assert resolve_relative(str(base), "/abs/x.csv") == "/abs/x.csv"
