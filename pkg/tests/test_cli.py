import json
import os

import pandas as pd
import pytest

from cli.app import EXIT_INPUT, EXIT_OK, EXIT_USAGE, run_cli


def _files(root):
    found = {}
    for directory, _, names in os.walk(root):
        for name in names:
            path = os.path.join(directory, name)
            with open(path, "rb") as f:
                found[os.path.relpath(path, root)] = f.read()
    return found


@pytest.fixture
def analyzed(tmp_path, write_market):
    """Output directory of one analyze run over two synthetic markets"""
    manifest = write_market({"north": ["N1", "N2"], "south": ["S1", "S2"]}, n_days=600)
    output = str(tmp_path / "out")
    assert run_cli(["analyze", "--manifest", manifest, "--output-dir", output]) == EXIT_OK
    return output


def test_analyze_writes_reports_and_summaries(analyzed):
    assert sorted(os.listdir(os.path.join(analyzed, "north", "stocks"))) == ["N1.json", "N2.json"]
    assert os.path.isfile(os.path.join(analyzed, "north", "summary.json"))
    assert os.path.isfile(os.path.join(analyzed, "south", "summary.json"))

    with open(os.path.join(analyzed, "run_metadata.json")) as f:
        metadata = json.load(f)
    assert metadata["markets"] == ["north", "south"]
    assert set(metadata["inputs"]["north"]) == {"N1", "N2"}
    with open(os.path.join(analyzed, "north", "stocks", "N1.json")) as f:
        report = json.load(f)
    assert report["config_hash"] == metadata["config_hash"]
    assert report["status"] == "analyzed"


def test_cluster_report_and_plot_data(analyzed):
    assert run_cli(["cluster", "--output-dir", analyzed]) == EXIT_OK
    merges = pd.read_csv(os.path.join(analyzed, "clusters", "merges.csv"), comment="#")
    assert len(merges) == 1
    assert os.path.isfile(os.path.join(analyzed, "clusters", "dendrogram.json"))

    assert run_cli(["report", "--output-dir", analyzed]) == EXIT_OK
    with open(os.path.join(analyzed, "report.txt")) as f:
        assert "Volatility Clustering" in f.read()

    flags = ["--output-dir", analyzed, "--market", "north", "--ticker", "N1"]
    assert run_cli(["plot-data", "--kind", "qq", *flags]) == EXIT_OK
    assert len(os.listdir(os.path.join(analyzed, "plots", "qq", "north"))) == 4

    assert run_cli(["plot-data", "--kind", "ccf", *flags]) == EXIT_OK
    ccf = pd.read_csv(os.path.join(analyzed, "plots", "ccf", "north", "N1_w5.csv"), comment="#")
    assert (ccf["series"] == "ccf").sum() == 21
    assert (ccf["series"] == "diff").sum() == 10

    assert run_cli(["plot-data", "--kind", "boxplot", "--output-dir", analyzed]) == EXIT_OK
    assert run_cli(["plot-data", "--kind", "kde", "--output-dir", analyzed, "--market", "south"]) == EXIT_OK
    assert run_cli(["plot-data", "--kind", "acf", *flags]) == EXIT_OK


@pytest.mark.slow
def test_outputs_identical_across_worker_counts(tmp_path, write_market):
    manifest = write_market({"north": ["N1", "N2", "N3"]}, n_days=600)
    first, second = str(tmp_path / "one"), str(tmp_path / "two")
    assert run_cli(["analyze", "--manifest", manifest, "--output-dir", first]) == EXIT_OK
    assert (
        run_cli(["analyze", "--manifest", manifest, "--output-dir", second, "--workers", "2"])
        == EXIT_OK
    )
    assert _files(first) == _files(second)


def test_missing_price_file(tmp_path, capsys):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"markets": {"m": [["GONE", "gone.csv"]]}}))
    code = run_cli(["analyze", "--manifest", str(manifest), "--output-dir", str(tmp_path / "out")])
    assert code == EXIT_INPUT
    assert "gone.csv" in capsys.readouterr().err


def test_unknown_plot_kind(tmp_path, capsys):
    code = run_cli(["plot-data", "--kind", "spiral", "--output-dir", str(tmp_path)])
    assert code == EXIT_USAGE
    assert "boxplot" in capsys.readouterr().err


def test_cluster_needs_two_markets(tmp_path, write_market):
    manifest = write_market({"only": ["O1"]}, n_days=600)
    output = str(tmp_path / "out")
    assert run_cli(["analyze", "--manifest", manifest, "--output-dir", output]) == EXIT_OK
    assert run_cli(["cluster", "--output-dir", output]) != EXIT_OK


def test_usage_errors(tmp_path):
    assert run_cli([]) == EXIT_USAGE
    assert run_cli(["analyze", "--manifest", "m.json", "--significance", "2"]) == EXIT_USAGE
    assert run_cli(["report", "--output-dir", str(tmp_path), "--horizons", "a,b"]) == EXIT_USAGE


def test_simulate_then_analyze(tmp_path):
    data_dir = str(tmp_path / "sim")
    code = run_cli(
        ["simulate", "--data-dir", data_dir, "--markets", "1", "--stocks", "2", "--days", "550", "--seed", "7"]
    )
    assert code == EXIT_OK
    manifest = os.path.join(data_dir, "manifest.json")
    assert os.path.isfile(manifest)
    output = str(tmp_path / "out")
    assert run_cli(["analyze", "--manifest", manifest, "--output-dir", output]) == EXIT_OK
    assert len(os.listdir(os.path.join(output, "market1", "stocks"))) == 2
