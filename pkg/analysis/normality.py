"""Normality tests on return samples: Kolmogorov-Smirnov, Shapiro-Wilk, Jarque-Bera"""

import numpy as np
from scipy import stats

from analysis.core import ArrayLike, TestResult, moments
from errors import DegenerateSampleError, InsufficientDataError, UnsupportedSizeError


def _standardized(sample: ArrayLike, minimum: int) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < minimum:
        raise InsufficientDataError(f"test needs n >= {minimum}, got {x.size}")
    sd = float(np.std(x))
    if sd <= 0.0:
        raise DegenerateSampleError("zero variance: normality test undefined")
    return (x - x.mean()) / sd


def kolmogorov_p_value(statistic: float, n: int) -> float:
    """Asymptotic Kolmogorov survival function at sqrt(n) * D"""
    return float(np.clip(stats.kstwobign.sf(np.sqrt(n) * statistic), 0.0, 1.0))


def ks_normality(sample: ArrayLike) -> TestResult:
    """
    KS distance to N(mean, sd) with parameters estimated from the sample.

    No Lilliefors correction, so the test is conservative.
    """
    z = _standardized(sample, 8)
    statistic = float(stats.kstest(z, "norm").statistic)
    return TestResult(
        name="kolmogorov_smirnov",
        statistic=statistic,
        p_value=kolmogorov_p_value(statistic, z.size),
        n=z.size,
    )


def shapiro_wilk(sample: ArrayLike) -> TestResult:
    x = np.asarray(sample, dtype=float).ravel()
    if not 3 <= x.size <= 5000:
        raise UnsupportedSizeError(f"Shapiro-Wilk supports 3 <= n <= 5000, got {x.size}")
    if np.std(x) <= 0.0:
        raise DegenerateSampleError("zero variance: Shapiro-Wilk undefined")
    result = stats.shapiro(x)
    return TestResult(
        name="shapiro_wilk",
        statistic=float(result.statistic),
        p_value=float(np.clip(result.pvalue, 0.0, 1.0)),
        n=x.size,
    )


def jb_statistic(n: int, skewness: float, kurtosis: float) -> float:
    return n / 6.0 * (skewness**2 + (kurtosis - 3.0) ** 2 / 4.0)


def chi2_2_survival(x: float) -> float:
    """Chi-square(2) survival function, which is exactly exp(-x/2)"""
    return float(np.exp(-x / 2.0)) if x > 0 else 1.0


def jarque_bera(sample: ArrayLike) -> TestResult:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 8:
        raise InsufficientDataError(f"Jarque-Bera needs n >= 8, got {x.size}")
    summary = moments(x)
    statistic = jb_statistic(summary.n, summary.skewness, summary.kurtosis)
    return TestResult(
        name="jarque_bera",
        statistic=statistic,
        p_value=chi2_2_survival(statistic),
        n=summary.n,
        df=2,
    )


NORMALITY_TESTS = {
    "ks": ks_normality,
    "sw": shapiro_wilk,
    "jb": jarque_bera,
}
