"""Special functions: normal and chi-square(1) distributions, binomial PMF/CDF.

Everything here is pure; the vectorised helpers return fresh numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "ConfidenceLevel",
    "as_level",
    "normal_cdf",
    "normal_pdf",
    "normal_inverse_cdf",
    "chi2_1_cdf",
    "binomial_pmf",
    "binomial_cdf",
    "binomial_pmf_table",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CLAMP_TOL = 1e-12

# Wichura (1988), algorithm AS241 (PPND16), accurate to about 1e-16.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coefs, x: float) -> float:
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def _ppnd16(u: float) -> float:
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = u if q < 0 else 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        x = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        x = _poly(_E, r) / _poly(_F, r)
    return -x if q < 0 else x


def normal_cdf(x: float) -> float:
    """Standard normal distribution function, via the complementary error function."""
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_inverse_cdf(u: float) -> float:
    """Quantile function of the standard normal distribution.

    A rational approximation gives the starting point and one Halley step
    against :func:`normal_cdf` polishes it.

    Raises:
        DomainError: if ``u`` is not strictly inside (0, 1).
    """
    if not 0.0 < u < 1.0:
        raise DomainError(f"normal_inverse_cdf requires 0 < u < 1, got {u!r}")
    x = _ppnd16(u)
    dens = normal_pdf(x)
    if dens > 0.0:
        t = (normal_cdf(x) - u) / dens
        x -= t / (1.0 + 0.5 * x * t)
    return x


def chi2_1_cdf(t: float) -> float:
    """Distribution function of a chi-square variable with one degree of freedom."""
    if t < 0:
        raise DomainError(f"chi2_1_cdf requires t >= 0, got {t!r}")
    # 2*Phi(sqrt t) - 1 written without cancellation.
    return math.erf(math.sqrt(t) / _SQRT2)


@dataclass(frozen=True)
class ConfidenceLevel:
    """Nominal two-sided confidence level with its normal and chi-square quantiles.

    ``z`` is the upper ``alpha/2`` normal quantile and ``kappa = z**2`` is the
    ``1 - alpha`` quantile of chi-square(1).
    """

    level: float
    alpha: float = field(init=False)
    z: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        level = float(self.level)
        if not 0.0 < level < 1.0:
            raise DomainError(f"confidence level must lie in (0, 1), got {self.level!r}")
        z = normal_inverse_cdf(0.5 + 0.5 * level)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "alpha", 1.0 - level)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "kappa", z * z)

    def __str__(self) -> str:
        return f"{self.level:g}"


def as_level(level: float | ConfidenceLevel) -> ConfidenceLevel:
    if isinstance(level, ConfidenceLevel):
        return level
    return ConfidenceLevel(level)


def _check_counts(n: int, k: int, p: float) -> None:
    if n < 0 or k < 0:
        raise DomainError(f"counts must be nonnegative, got n={n}, k={k}")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")


def _clamp_probability(x: float) -> float:
    if x > 1.0:
        if x - 1.0 > _CLAMP_TOL:
            raise ArithmeticError(f"probability {x!r} exceeds 1 beyond rounding")
        return 1.0
    return x


@lru_cache(maxsize=256)
def _log_binom_coefs(n: int) -> np.ndarray:
    lg = [math.lgamma(j + 1.0) for j in range(n + 1)]
    out = np.array([lg[n] - lg[k] - lg[n - k] for k in range(n + 1)])
    out.setflags(write=False)
    return out


def binomial_pmf(n: int, k: int, p: float) -> float:
    """``C(n, k) p**k (1-p)**(n-k)`` evaluated in log space."""
    _check_counts(n, k, p)
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    logp = _log_binom_coefs(n)[k] + k * math.log(p) + (n - k) * math.log1p(-p)
    return _clamp_probability(math.exp(logp))


def binomial_cdf(n: int, k: int, p: float) -> float:
    """``P(X <= k)`` for ``X ~ Binomial(n, p)``."""
    _check_counts(n, k, p)
    if k == n:
        return 1.0
    # fsum is correctly rounded, so the result is monotone in k.
    total = math.fsum(binomial_pmf_table(n, p)[: k + 1])
    return min(total, 1.0)


def binomial_pmf_table(n: int, p) -> np.ndarray:
    """PMF over ``k = 0..n`` for one or many success probabilities.

    Args:
        n: number of trials.
        p: scalar or 1-d array of probabilities in [0, 1].

    Returns:
        Array of shape ``(n + 1,)`` for scalar ``p``, else ``(len(p), n + 1)``.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    scalar = np.ndim(p) == 0
    pa = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((pa < 0.0) | (pa > 1.0)) or np.any(np.isnan(pa)):
        raise DomainError("p must lie in [0, 1]")
    k = np.arange(n + 1, dtype=float)
    # 0 * log(0) contributes nothing; the masked nan is discarded.
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.log(pa)[:, None]
        logq = np.log1p(-pa)[:, None]
        kterm = np.where(k == 0, 0.0, k * logp)
        rterm = np.where(k == n, 0.0, (n - k) * logq)
    out = np.exp(_log_binom_coefs(n) + kterm + rterm)
    if np.any(out > 1.0 + _CLAMP_TOL):
        raise ArithmeticError("binomial pmf exceeds 1 beyond rounding")
    np.minimum(out, 1.0, out=out)
    return out[0] if scalar else out
