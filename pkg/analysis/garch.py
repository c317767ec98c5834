"""
GARCH(1,1) Gaussian quasi-maximum-likelihood fitting.

The variance recursion is sigma2_t = omega + alpha1 * eps2_{t-1} + beta1 * sigma2_{t-1}
with a constant mean mu. The recursion is backcast from eps2_0 = sigma2_0 = the
sample variance of the returns, so sigma2_1 = omega + (alpha1 + beta1) * var
rather than var itself. This keeps the collapse alpha1 = beta1 = 0 =>
sigma2_t = omega exact at every t, t = 1 included, which a recursion seeded
with sigma2_1 = var would break.

Fitting runs Nelder-Mead on standardized returns in the unconstrained
coordinates (mu, log omega, a, b) with

    alpha1 = e^a / (1 + e^a + e^b),  beta1 = e^b / (1 + e^a + e^b)

which keeps omega > 0, alpha1, beta1 >= 0 and alpha1 + beta1 < 1.
"""

import logging
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize, signal

from analysis.core import ArrayLike
from analysis.tail_index import TailIndexResult, return_tail_index
from errors import (
    ConvergenceError,
    DegenerateSampleError,
    DomainError,
    InsufficientDataError,
    NumericOverflowError,
)
from ingest.prices import ReturnSeries

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-12
MIN_LOGLIK_N = 100
MIN_FIT_N = 250
MAX_ITERATIONS = 2000
TOLERANCE = 1e-8

# (alpha1, beta1) starting points; the first is the default, the rest are restarts
STARTING_POINTS: Tuple[Tuple[float, float], ...] = ((0.05, 0.90), (0.10, 0.80), (0.02, 0.95))


class GarchParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    omega: float
    alpha1: float
    beta1: float


class GarchFit(GarchParams):
    loglik: float
    converged: bool
    iterations: int
    restarts: int = 0

    @property
    def persistence(self) -> float:
        return self.alpha1 + self.beta1


class ResidualSeries(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def variance(self) -> float:
        return float(np.var(self.values))


class ConditionalTailResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    returns_tail: TailIndexResult
    residuals_tail: TailIndexResult
    decreased: bool
    increased: bool
    fit: GarchFit


def _values(returns: ReturnSeries | ArrayLike) -> np.ndarray:
    if isinstance(returns, ReturnSeries):
        return returns.values
    return np.asarray(returns, dtype=float).ravel()


def conditional_variance(returns: ArrayLike, params: GarchParams) -> np.ndarray:
    """sigma2_1..sigma2_n for the given parameters, floored at 1e-12 * sample variance"""
    r = np.asarray(returns, dtype=float).ravel()
    backcast = float(np.var(r))
    if backcast <= 0.0:
        raise DegenerateSampleError("zero return variance: GARCH recursion undefined")
    if params.omega <= 0.0 or params.alpha1 < 0.0 or params.beta1 < 0.0:
        raise DomainError("GARCH parameters need omega > 0 and alpha1, beta1 >= 0")
    if params.alpha1 + params.beta1 >= 1.0:
        raise DomainError("GARCH parameters must satisfy alpha1 + beta1 < 1")

    eps2 = (r - params.mu) ** 2
    lagged = np.concatenate(([backcast], eps2[:-1]))
    drive = params.omega + params.alpha1 * lagged
    sigma2, _ = signal.lfilter([1.0], [1.0, -params.beta1], drive, zi=[params.beta1 * backcast])
    if not np.all(np.isfinite(sigma2)):
        raise NumericOverflowError("GARCH variance recursion produced a non-finite value")
    return np.maximum(sigma2, VARIANCE_FLOOR * backcast)


def garch11_loglik(returns: ArrayLike, params: GarchParams) -> float:
    r = np.asarray(returns, dtype=float).ravel()
    if r.size < MIN_LOGLIK_N:
        raise InsufficientDataError(f"GARCH likelihood needs n >= {MIN_LOGLIK_N}, got {r.size}")
    sigma2 = conditional_variance(r, params)
    eps2 = (r - params.mu) ** 2
    value = -0.5 * float(np.sum(np.log(2.0 * np.pi) + np.log(sigma2) + eps2 / sigma2))
    if not np.isfinite(value):
        raise NumericOverflowError("GARCH log-likelihood is not finite")
    return value


def _from_unconstrained(theta: Sequence[float]) -> GarchParams:
    mu, log_omega, a, b = theta
    # softmax with a pinned zero logit keeps alpha1 + beta1 strictly below 1
    logits = np.array([0.0, a, b])
    weights = np.exp(logits - logits.max())
    weights /= weights.sum()
    return GarchParams(
        mu=float(mu),
        omega=float(np.exp(log_omega)),
        alpha1=float(weights[1]),
        beta1=float(weights[2]),
    )


def _to_unconstrained(mu: float, omega: float, alpha1: float, beta1: float) -> np.ndarray:
    rest = 1.0 - alpha1 - beta1
    return np.array([mu, np.log(omega), np.log(alpha1 / rest), np.log(beta1 / rest)])


def _objective(theta: np.ndarray, z: np.ndarray) -> float:
    try:
        return -garch11_loglik(z, _from_unconstrained(theta)) / z.size
    except (NumericOverflowError, DomainError):
        return np.inf


def garch11_fit(returns: ReturnSeries | ArrayLike) -> GarchFit:
    """
    Gaussian QML fit of GARCH(1,1) with a constant mean.

    Returns are divided by their standard deviation before optimizing and the
    estimates mapped back (mu * s, omega * s^2, loglik - n log s), so the fit
    is scale equivariant. Two restarts from other (alpha1, beta1) points are
    tried when the default start does not converge.
    """
    r = _values(returns)
    n = r.size
    if n < MIN_FIT_N:
        raise InsufficientDataError(f"GARCH fit needs n >= {MIN_FIT_N}, got {n}")
    scale = float(np.std(r))
    if np.ptp(r) <= 0.0 or not np.isfinite(scale):
        raise DegenerateSampleError("returns have zero variance: GARCH fit undefined")
    z = r / scale

    best: Optional[optimize.OptimizeResult] = None
    attempts = 0
    for alpha1, beta1 in STARTING_POINTS:
        attempts += 1
        start = _to_unconstrained(float(z.mean()), 0.05 * float(np.var(z)), alpha1, beta1)
        result = optimize.minimize(
            _objective,
            start,
            args=(z,),
            method="Nelder-Mead",
            options={"xatol": TOLERANCE, "fatol": TOLERANCE, "maxiter": MAX_ITERATIONS},
        )
        if not np.isfinite(result.fun):
            continue
        if best is None or (result.success, -result.fun) > (best.success, -best.fun):
            best = result
        if result.success:
            break
        logger.warning(
            f"⚠️ GARCH fit from alpha1={alpha1}, beta1={beta1} did not converge; restarting"
        )

    if best is None:
        raise NumericOverflowError("GARCH likelihood was not finite at any starting point")

    params = _from_unconstrained(best.x)
    return GarchFit(
        mu=params.mu * scale,
        omega=params.omega * scale**2,
        alpha1=params.alpha1,
        beta1=params.beta1,
        loglik=-best.fun * n - n * np.log(scale),
        converged=bool(best.success),
        iterations=int(best.nit),
        restarts=attempts - 1,
    )


def standardized_residuals(
    returns: ReturnSeries | ArrayLike, fit: GarchParams, require_converged: bool = True
) -> ResidualSeries:
    """W_t = (r_t - mu) / sigma_t under the fitted recursion"""
    if require_converged and isinstance(fit, GarchFit) and not fit.converged:
        raise ConvergenceError("standardized residuals need a converged GARCH fit")
    r = _values(returns)
    sigma2 = conditional_variance(r, fit)
    return ResidualSeries(values=(r - fit.mu) / np.sqrt(sigma2))


def conditional_tail_comparison(
    returns: ReturnSeries | ArrayLike,
    xi_min: float = 0.05,
    vuong_z: float = 1.645,
    fit: Optional[GarchFit] = None,
    side: Literal["both", "left", "right"] = "both",
) -> ConditionalTailResult:
    """Tail index of raw returns against that of the GARCH standardized residuals"""
    r = _values(returns)
    fit = fit or garch11_fit(r)
    if not fit.converged:
        raise ConvergenceError("GARCH fit did not converge; conditional tails not evaluable")
    residuals = standardized_residuals(r, fit)
    returns_tail = return_tail_index(r, side=side, xi_min=xi_min, vuong_z=vuong_z)
    residuals_tail = return_tail_index(residuals.values, side=side, xi_min=xi_min, vuong_z=vuong_z)
    return ConditionalTailResult(
        returns_tail=returns_tail,
        residuals_tail=residuals_tail,
        decreased=bool(residuals_tail.alpha < returns_tail.alpha),
        increased=bool(residuals_tail.alpha > returns_tail.alpha),
        fit=fit,
    )
