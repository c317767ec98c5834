"""
Numerical primitives shared by every analysis: moments, correlations,
autocorrelation, least-squares lines, quantiles and kernel densities.

All central moments use 1/n weighting (population form).
"""

from typing import ClassVar, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from errors import (
    DegenerateSampleError,
    DomainError,
    InsufficientDataError,
    InvalidLagError,
    SingularDesignError,
)

ArrayLike = Sequence[float] | np.ndarray


class TestResult(BaseModel):
    """(statistic, p-value, decision) triple returned by every hypothesis test"""

    __test__: ClassVar[bool] = False  # keep pytest from collecting this model
    model_config = ConfigDict(frozen=True)

    name: str
    statistic: float
    p_value: float
    n: int
    df: Optional[float] = None
    level: Optional[float] = None
    rejected: Optional[bool] = None

    def at_level(self, level: float) -> "TestResult":
        return self.model_copy(update={"level": level, "rejected": self.p_value < level})


class MomentSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    kurtosis_reliable: bool

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.variance))


class AcfSequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    lags: Tuple[int, ...]
    values: Tuple[float, ...]
    n: int

    def at(self, lag: int) -> float:
        return self.values[lag]


class LineFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    rss: float
    n: int


def _as_array(sample: ArrayLike) -> np.ndarray:
    return np.asarray(sample, dtype=float).ravel()


def moments(sample: ArrayLike) -> MomentSummary:
    x = _as_array(sample)
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"moments need n >= 2, got {n}")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    if m2 <= 0.0:
        raise DegenerateSampleError("zero variance: skewness and kurtosis undefined")
    m3 = float(np.mean(dev**3))
    m4 = float(np.mean(dev**4))
    return MomentSummary(
        n=n,
        mean=mean,
        variance=m2,
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
        kurtosis_reliable=n >= 4,
    )


def pearson_corr(x: ArrayLike, y: ArrayLike) -> float:
    a, b = _as_array(x), _as_array(y)
    if a.size != b.size:
        raise DomainError(f"inputs differ in length ({a.size} vs {b.size})")
    if a.size < 2:
        raise InsufficientDataError("correlation needs at least 2 pairs")
    da, db = a - a.mean(), b - b.mean()
    saa, sbb = float(np.dot(da, da)), float(np.dot(db, db))
    if saa <= 0.0 or sbb <= 0.0:
        raise DegenerateSampleError("zero variance: correlation undefined")
    rho = float(np.dot(da, db)) / np.sqrt(saa * sbb)
    return float(np.clip(rho, -1.0, 1.0))


def autocovariance(sample: ArrayLike, max_lag: int) -> np.ndarray:
    """gamma(0..L) around the global mean, each divided by n"""
    x = _as_array(sample)
    n = x.size
    dev = x - x.mean()
    return np.array([np.dot(dev[: n - k], dev[k:]) / n for k in range(max_lag + 1)])


def acf(sample: ArrayLike, max_lag: int) -> AcfSequence:
    x = _as_array(sample)
    n = x.size
    if max_lag < 1 or max_lag >= n:
        raise InvalidLagError(f"max_lag must satisfy 1 <= L < n (L={max_lag}, n={n})")
    gamma = autocovariance(x, max_lag)
    if gamma[0] <= 0.0:
        raise DegenerateSampleError("zero variance: autocorrelation undefined")
    rho = np.clip(gamma / gamma[0], -1.0, 1.0)
    rho[0] = 1.0
    return AcfSequence(lags=tuple(range(max_lag + 1)), values=tuple(float(r) for r in rho), n=n)


def lagged_cross_corr(x: ArrayLike, y: ArrayLike, h: int) -> float:
    """Correlation of X_{t+h} with Y_t over the overlapping stretch"""
    a, b = _as_array(x), _as_array(y)
    if a.size != b.size:
        raise DomainError(f"inputs differ in length ({a.size} vs {b.size})")
    n = a.size
    if n - abs(h) < 3:
        raise InsufficientDataError(f"overlap of {n - abs(h)} at lag {h} is below 3")
    if h >= 0:
        return pearson_corr(a[h:], b[: n - h])
    return pearson_corr(a[: n + h], b[-h:])


def ols_fit(x: ArrayLike, y: ArrayLike) -> LineFit:
    a, b = _as_array(x), _as_array(y)
    if a.size != b.size:
        raise DomainError(f"inputs differ in length ({a.size} vs {b.size})")
    if a.size < 2 or np.unique(a).size < 2:
        raise SingularDesignError("least squares needs at least 2 distinct abscissae")
    fit = stats.linregress(a, b)
    residuals = b - (fit.intercept + fit.slope * a)
    return LineFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        rss=float(np.dot(residuals, residuals)),
        n=int(a.size),
    )


def silverman_bandwidth(sample: ArrayLike) -> float:
    x = _as_array(sample)
    sd = float(np.std(x))
    q1, q3 = np.quantile(x, [0.25, 0.75])
    iqr = float(q3 - q1)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * x.size ** (-0.2)


def kde(sample: ArrayLike, eval_points: ArrayLike) -> np.ndarray:
    """Gaussian KDE with Silverman's bandwidth; no boundary correction"""
    x = _as_array(sample)
    if x.size < 2:
        raise InsufficientDataError("density estimation needs n >= 2")
    if np.std(x) <= 0.0:
        raise DegenerateSampleError("zero variance: density is degenerate")
    bandwidth = silverman_bandwidth(x)
    # gaussian_kde scales its factor by the ddof=1 standard deviation
    estimator = stats.gaussian_kde(x, bw_method=bandwidth / np.std(x, ddof=1))
    return np.clip(estimator(_as_array(eval_points)), 0.0, None)


def quantiles(sample: ArrayLike, probs: ArrayLike) -> np.ndarray:
    x = _as_array(sample)
    p = _as_array(probs)
    if x.size < 1:
        raise InsufficientDataError("quantiles need n >= 1")
    if np.any((p < 0.0) | (p > 1.0)):
        raise DomainError("probabilities must lie in [0, 1]")
    return np.quantile(x, p, method="linear")


def qq_pairs(sample: ArrayLike, standardize: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Standard-normal quantiles at (i - 0.5)/n against the sorted sample"""
    x = np.sort(_as_array(sample))
    n = x.size
    if n < 1:
        raise InsufficientDataError("qq pairs need n >= 1")
    if standardize:
        sd = float(np.std(x))
        if sd <= 0.0:
            raise DegenerateSampleError("zero variance: cannot standardize")
        x = (x - x.mean()) / sd
    theoretical = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return theoretical, x


def five_number(sample: ArrayLike) -> Tuple[float, float, float, float, float]:
    x = _as_array(sample)
    if x.size < 5:
        raise InsufficientDataError("five-number summary needs n >= 5")
    q = quantiles(x, [0.0, 0.25, 0.5, 0.75, 1.0])
    return tuple(float(v) for v in q)  # type: ignore[return-value]
