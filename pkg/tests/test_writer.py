import json

import numpy as np
import pandas as pd

from battery.market import summarize_market
from battery.models import MarketFactSummary
from cli.report import render_report, verdict_table
from cli.writer import ResultWriter, to_document
from config import RunConfig


def test_non_finite_values_are_flagged():
    data, flags = to_document({"a": float("inf"), "b": [1.0, np.nan], "c": {"d": -np.inf}, "e": np.int64(3)})
    assert data == {"a": None, "b": [1.0, None], "c": {"d": None}, "e": 3}
    assert flags == {"a": "inf", "b.1": "nan", "c.d": "-inf"}


def test_json_output_carries_hash_and_flags(tmp_path):
    writer = ResultWriter(str(tmp_path), "abc123")
    path = writer.write_json("m/summary.json", {"x": float("nan"), "y": 1.5})
    with open(path) as f:
        document = json.load(f)
    assert document == {"config_hash": "abc123", "non_finite": {"x": "nan"}, "x": None, "y": 1.5}


def test_csv_output_starts_with_hash(tmp_path):
    writer = ResultWriter(str(tmp_path), "abc123")
    path = writer.write_csv("plots/t.csv", pd.DataFrame({"v": [0.1, 1.0 / 3.0]}))
    with open(path) as f:
        lines = f.read().split("\n")
    assert lines[0] == "# config_hash=abc123"
    assert lines[1] == "v"
    assert float(lines[3]) == 1.0 / 3.0


def test_market_listing(tmp_path):
    writer = ResultWriter(str(tmp_path), "h")
    writer.write_json("b/summary.json", {})
    writer.write_json("a/summary.json", {})
    writer.write_json("a/stocks/Z.json", {})
    writer.write_json("a/stocks/Y.json", {})
    assert writer.list_markets() == ["a", "b"]
    assert writer.list_stock_reports("a") == ["Y", "Z"]
    assert writer.read_json("missing.json") is None


def test_summary_survives_a_round_trip(tmp_path, stock_report):
    summary = summarize_market(
        "m", [stock_report(f"S{i}", leverage_corr=-0.1) for i in range(3)], RunConfig()
    )
    writer = ResultWriter(str(tmp_path), "h")
    path = writer.write_json("m/summary.json", summary)
    with open(path) as f:
        restored = MarketFactSummary.model_validate(json.load(f))
    assert restored.verdict_vector() == summary.verdict_vector()


def test_report_lists_every_fact(stock_report):
    config = RunConfig()
    summaries = [
        summarize_market(m, [stock_report(f"{m}{i}", leverage_corr=-0.1) for i in range(3)], config)
        for m in ("north", "south")
    ]
    text = render_report(summaries, config.config_hash)
    assert f"config_hash={config.config_hash}" in text
    assert "Leverage Effect" in text and "Taylor Effect" in text
    assert "All markets" in verdict_table(summaries)
