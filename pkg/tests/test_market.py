import numpy as np
import pytest

from analysis.serial_dependence import ljung_box
from analysis.simulate import simulate_garch
from battery.market import (
    absence_verdict,
    aggregational_gaussianity_verdict,
    leverage_verdict,
    leverage_verdict_from_share,
    risk_return_correlation,
    summarize_market,
)
from battery.models import FACTS, NotEvaluable
from config import RunConfig, VerdictThresholds
from errors import DegenerateSampleError, InsufficientDataError

# Share of stocks with negative return / squared-return correlation per market
LEVERAGE_SHARES = {
    "Brazil": 0.50,
    "Canada": 0.60,
    "Chile": 0.25,
    "China": 0.37,
    "Indonesia": 0.12,
    "Mexico": 0.54,
    "Poland": 0.70,
    "South Africa": 0.58,
    "Thailand": 0.17,
    "Turkey": 0.50,
}

# Share of stocks where Ljung-Box on returns is not rejected
LJUNG_BOX_KEPT = {
    "Brazil": 0.54,
    "Canada": 0.53,
    "Chile": 0.08,
    "China": 0.11,
    "Indonesia": 0.33,
    "Mexico": 0.31,
    "Poland": 0.30,
    "South Africa": 0.39,
    "Thailand": 0.37,
    "Turkey": 0.57,
}


def _flags(share: float, n: int = 100):
    kept = int(round(share * n))
    return [True] * kept + [False] * (n - kept)


def test_leverage_rule_on_published_shares():
    t = VerdictThresholds()
    verdicts = {m: leverage_verdict_from_share(s, t, 20).verdict for m, s in LEVERAGE_SHARES.items()}
    assert {m for m, v in verdicts.items() if v == 1} == {"Canada", "Mexico", "Poland", "South Africa"}
    assert {m for m, v in verdicts.items() if v == -1} == {"Chile", "China", "Indonesia", "Thailand"}
    assert {m for m, v in verdicts.items() if v == 0} == {"Brazil", "Turkey"}


def test_leverage_share_from_correlations():
    verdict = leverage_verdict([-0.1] * 7 + [0.1] * 3, VerdictThresholds())
    assert verdict.statistic == pytest.approx(0.70)
    assert verdict.verdict == 1
    assert verdict.support == 10


def test_absence_rule_on_published_shares():
    t = VerdictThresholds()
    verdicts = {m: absence_verdict(_flags(s), _flags(s), t).verdict for m, s in LJUNG_BOX_KEPT.items()}
    assert {m for m, v in verdicts.items() if v == 1} == {"Brazil", "Canada", "Turkey"}
    assert {m for m, v in verdicts.items() if v == -1} == set(LJUNG_BOX_KEPT) - {"Brazil", "Canada", "Turkey"}


@pytest.mark.parametrize(
    "medians, expected",
    [
        ({1: 0.1, 5: 0.2, 20: 0.3, 60: 0.4}, 1),
        ({1: 0.1, 5: 0.2, 20: 0.3, 60: 0.25}, 0),
        ({1: 0.3, 5: 0.2, 20: 0.4, 60: 0.5}, -1),
        ({1: 0.5, 5: 0.1}, -1),
        ({1: 0.1, 5: 0.5}, 1),
    ],
)
def test_aggregational_gaussianity_rule(medians, expected):
    assert aggregational_gaussianity_verdict(medians, 10).verdict == expected


class TestRiskReturn:
    def test_exact_linear_relation(self, stock_report):
        sds = [0.01, 0.02, 0.015, 0.03, 0.025]
        reports = [
            stock_report(f"S{i}", mean_return=0.1 * sd, sd_return=sd) for i, sd in enumerate(sds)
        ]
        assert risk_return_correlation(reports) == pytest.approx(1.0, abs=1e-9)

    def test_identical_means(self, stock_report):
        reports = [
            stock_report(f"S{i}", mean_return=0.001, sd_return=sd) for i, sd in enumerate([0.01, 0.02, 0.03])
        ]
        with pytest.raises(DegenerateSampleError):
            risk_return_correlation(reports)

    def test_too_few_stocks(self, stock_report):
        reports = [stock_report("A", mean_return=0.001, sd_return=0.01)]
        with pytest.raises(InsufficientDataError):
            risk_return_correlation(reports)

    def test_summary_marks_missing_correlation(self, stock_report):
        summary = summarize_market("m", [stock_report("A")], RunConfig())
        assert isinstance(summary.risk_return_corr, NotEvaluable)
        assert summary.facts["risk_return_tradeoff"].verdict == 0


class TestSummarizeMarket:
    def _reports(self, stock_report, rng):
        return [
            stock_report(
                f"T{i:02d}",
                mean_return=float(rng.normal(0.0005, 0.0002)),
                sd_return=float(rng.uniform(0.01, 0.03)),
                leverage_corr=float(rng.normal(-0.05, 0.1)),
                clustering={"ljung_box": ljung_box(rng.normal(size=300) ** 2, 5)},
            )
            for i in range(12)
        ]

    def test_order_does_not_matter(self, stock_report, rng):
        reports = self._reports(stock_report, rng)
        shuffled = [reports[i] for i in rng.permutation(len(reports))]
        config = RunConfig()
        assert summarize_market("m", reports, config) == summarize_market("m", shuffled, config)

    def test_vector_follows_fact_order(self, stock_report, rng):
        summary = summarize_market("m", self._reports(stock_report, rng), RunConfig())
        assert tuple(summary.facts) == FACTS
        assert summary.verdict_vector().values == tuple(summary.facts[f].verdict for f in FACTS)

    def test_low_support(self, stock_report):
        analyzed = stock_report("A", leverage_corr=-0.2)
        skipped = stock_report("B").model_copy(update={"status": "skipped", "skip_reason": "short"})
        summary = summarize_market("m", [skipped, analyzed], RunConfig())
        verdict = summary.facts["leverage_effect"]
        assert verdict.support == 1
        assert verdict.low_support
        assert verdict.statistic == 1.0
        assert summary.n_stocks == 2
        assert summary.skipped == {"B": "short"}

    def test_failures_counted(self, stock_report):
        summary = summarize_market("m", [stock_report("A")], RunConfig(), failures={"Z": "boom"})
        assert summary.n_stocks == 2
        assert summary.skipped["Z"] == "boom"

    def test_garch_market_shows_clustering(self, stock_report, rng):
        reports = []
        for i in range(10):
            r, _ = simulate_garch(2500, omega=0.1, alpha1=0.1, beta1=0.8, rng=rng)
            reports.append(stock_report(f"G{i}", clustering={"ljung_box": ljung_box(r**2, 5)}))
        summary = summarize_market("garch", reports, RunConfig())
        assert summary.facts["volatility_clustering"].verdict == 1

    def test_no_evaluable_stocks(self):
        summary = summarize_market("empty", [], RunConfig())
        assert all(v.verdict == 0 for v in summary.facts.values())
        assert summary.facts["heavy_tails"].reason == "no evaluable stocks"


def test_threshold_override_changes_verdict(stock_report):
    reports = [stock_report(f"S{i}", leverage_corr=c) for i, c in enumerate([-0.1, -0.1, 0.1, 0.1])]
    strict = RunConfig(verdict_thresholds={"leverage_verified": 0.6, "leverage_contradicted": 0.3})
    loose = RunConfig(verdict_thresholds={"leverage_verified": 0.5})
    assert summarize_market("m", reports, strict).facts["leverage_effect"].verdict == 0
    assert summarize_market("m", reports, loose).facts["leverage_effect"].verdict == 1
    assert np.isclose(summarize_market("m", reports, loose).facts["leverage_effect"].statistic, 0.5)
