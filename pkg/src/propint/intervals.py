"""Confidence intervals for a binomial proportion and the quadratic-form statistic.

Six methods are provided, addressed by the lowercase identifiers in
:data:`METHODS`. Every method has a scalar constructor returning an
:class:`Interval` and shares a vectorised core, :func:`interval_bounds`, that
evaluates all ``k`` for a given ``n`` at once (used by the coverage engine).

Bounds are never clipped to [0, 1]; intervals that leave the unit interval
carry ``overshoot=True`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UnknownMethodError, UnsupportedRegimeError
from .numerics import ConfidenceLevel, as_level, binomial_pmf_table

__all__ = [
    "METHODS",
    "Counts",
    "AugmentedCounts",
    "Interval",
    "ci_wald",
    "ci_wald_cc",
    "ci_wilson",
    "ci_agresti_coull",
    "ci_clopper_pearson",
    "ci_quadratic",
    "compute_interval",
    "interval_bounds",
    "stat_quadratic_closed",
    "stat_quadratic_form",
    "rule_of_thumb",
]

METHODS = ("wald", "wald_cc", "wilson", "agresti_coull", "clopper_pearson", "quadratic")

WALD_CC_FORMS = ("inner", "classical")

_CP_TOL = 1e-12


@dataclass(frozen=True)
class Counts:
    """A binomial observation: ``k`` successes out of ``n`` trials.

    ``n = 0`` is representable so that empty subgroups can be reported, but
    no interval can be built from it.
    """

    n: int
    k: int

    def __post_init__(self):
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n < 0 or self.k < 0:
            raise DomainError(f"counts must be nonnegative, got n={self.n}, k={self.k}")
        if self.k > self.n:
            raise DomainError(f"k={self.k} exceeds n={self.n}")

    @property
    def p_hat(self) -> float:
        return self.k / self.n

    @property
    def q_hat(self) -> float:
        return (self.n - self.k) / self.n


@dataclass(frozen=True)
class AugmentedCounts:
    """Counts shifted by ``kappa/2`` successes and ``kappa/2`` failures."""

    x_tilde: float
    n_tilde: float

    @classmethod
    def from_counts(cls, counts: Counts, level) -> "AugmentedCounts":
        kappa = as_level(level).kappa
        return cls(counts.k + kappa / 2.0, counts.n + kappa)

    @property
    def p_tilde(self) -> float:
        return self.x_tilde / self.n_tilde


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    method: str
    level: ConfidenceLevel
    degenerate: bool
    overshoot: bool

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)

    def contains(self, p: float) -> bool:
        return self.lower <= p <= self.upper

    def clipped(self) -> tuple[float, float]:
        """Bounds restricted to [0, 1], for presentation only."""
        return max(self.lower, 0.0), min(self.upper, 1.0)


def _require_trials(n: int) -> None:
    if n < 1:
        raise DomainError("empty subgroup: an interval needs n >= 1")


def _bounds_wald(n, k, lv: ConfidenceLevel, **_):
    ph = k / n
    margin = lv.z * np.sqrt(ph * (1.0 - ph) / n)
    return ph - margin, ph + margin


def _bounds_wald_cc(n, k, lv: ConfidenceLevel, *, wald_cc_form: str = "inner", **_):
    ph = k / n
    var = ph * (1.0 - ph) / n
    if wald_cc_form == "inner":
        margin = lv.z * np.sqrt(var + 0.5 / n)
    elif wald_cc_form == "classical":
        margin = lv.z * np.sqrt(var) + 0.5 / n
    else:
        raise DomainError(f"wald_cc_form must be one of {WALD_CC_FORMS}, got {wald_cc_form!r}")
    return ph - margin, ph + margin


def _bounds_wilson(n, k, lv: ConfidenceLevel, **_):
    n_tilde = n + lv.kappa
    p_tilde = (k + lv.kappa / 2.0) / n_tilde
    margin = lv.z * np.sqrt(k * (n - k) / n + lv.kappa / 4.0) / n_tilde
    return p_tilde - margin, p_tilde + margin


def _bounds_agresti_coull(n, k, lv: ConfidenceLevel, **_):
    n_tilde = n + lv.kappa
    p_tilde = (k + lv.kappa / 2.0) / n_tilde
    margin = lv.z * np.sqrt(p_tilde * (1.0 - p_tilde) / n_tilde)
    return p_tilde - margin, p_tilde + margin


def _quadratic_lower(n, k, kappa):
    # Smaller root of (n+kappa-2) p^2 - 2 b p + k(k-1)/n, with
    # b = (n-1) k/n + (kappa-1)/2. Written as c / (b + sqrt(d)) so that the
    # root is exactly 0 whenever k(k-1) = 0.
    k = np.asarray(k, dtype=float)
    a = n + kappa - 2.0
    b = (n - 1.0) * k / n + 0.5 * (kappa - 1.0)
    c = k * (k - 1.0) / n + 0.0  # no -0.0 at k = 0
    pq = k * (n - k) / (n * n)
    d = n * kappa * pq + 0.25 * (kappa - 1.0) ** 2 - pq
    if np.any(d < -1e-12):
        raise ArithmeticError("negative discriminant in quadratic interval")
    root = np.sqrt(np.maximum(d, 0.0))
    denom = b + root
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = c / denom
    return np.where(denom > 0.0, stable, (b - root) / a)


def _bounds_quadratic(n, k, lv: ConfidenceLevel, **_):
    if n + lv.kappa - 2.0 <= 0.0:
        raise UnsupportedRegimeError(
            f"quadratic interval undefined for n={n} at level {lv.level:g} (n + kappa - 2 <= 0)"
        )
    k = np.asarray(k, dtype=float)
    lower = _quadratic_lower(n, k, lv.kappa)
    upper = 1.0 - _quadratic_lower(n, n - k, lv.kappa)
    return lower, upper


def _cp_solve(n: int, k: np.ndarray, target: float, upper_tail: bool) -> np.ndarray:
    """Bisection for p with P(X >= k) = target (upper_tail) or P(X <= k) = target."""
    lo = np.zeros(k.shape)
    hi = np.ones(k.shape)
    j = np.arange(n + 1)
    mask = j[None, :] >= k[:, None] if upper_tail else j[None, :] <= k[:, None]
    while np.max(hi - lo) > _CP_TOL:
        mid = 0.5 * (lo + hi)
        tail = np.sum(binomial_pmf_table(n, mid) * mask, axis=1)
        # Upper tail increases in p, lower tail decreases.
        go_right = tail < target if upper_tail else tail > target
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)


def _bounds_clopper_pearson(n, k, lv: ConfidenceLevel, **_):
    k_arr = np.atleast_1d(np.asarray(k, dtype=int))
    lower = np.zeros(k_arr.shape)
    upper = np.ones(k_arr.shape)
    half = lv.alpha / 2.0
    inner = k_arr > 0
    if np.any(inner):
        lower[inner] = _cp_solve(n, k_arr[inner], half, upper_tail=True)
    inner = k_arr < n
    if np.any(inner):
        upper[inner] = _cp_solve(n, k_arr[inner], half, upper_tail=False)
    if np.ndim(k) == 0:
        return lower[0], upper[0]
    return lower, upper


_BOUNDS: dict[str, Callable] = {
    "wald": _bounds_wald,
    "wald_cc": _bounds_wald_cc,
    "wilson": _bounds_wilson,
    "agresti_coull": _bounds_agresti_coull,
    "clopper_pearson": _bounds_clopper_pearson,
    "quadratic": _bounds_quadratic,
}


def check_method(method: str) -> str:
    if method not in _BOUNDS:
        raise UnknownMethodError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return method


def interval_bounds(method: str, n: int, k=None, level=0.95, **options):
    """Lower and upper bounds of ``method`` for every ``k`` in one call.

    Args:
        method: one of :data:`METHODS`.
        n: number of trials (>= 1).
        k: success counts; defaults to ``0..n``.
        level: confidence level or :class:`ConfidenceLevel`.
        **options: ``wald_cc_form`` for the continuity-corrected Wald interval.

    Returns:
        ``(lower, upper)`` as float arrays shaped like ``k``.
    """
    fn = _BOUNDS[check_method(method)]
    _require_trials(n)
    if k is None:
        k = np.arange(n + 1)
    k = np.asarray(k)
    if np.any((k < 0) | (k > n)):
        raise DomainError(f"success counts must lie in [0, {n}]")
    lower, upper = fn(n, k.astype(float) if method != "clopper_pearson" else k, as_level(level), **options)
    return np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)


def compute_interval(method: str, counts: Counts, level=0.95, **options) -> Interval:
    """Build the ``method`` interval for ``counts``; the generic form of ``ci_*``."""
    lv = as_level(level)
    check_method(method)
    _require_trials(counts.n)
    lower, upper = interval_bounds(method, counts.n, counts.k, lv, **options)
    lower, upper = float(lower), float(upper)
    return Interval(
        lower=lower,
        upper=upper,
        method=method,
        level=lv,
        degenerate=lower == upper,
        overshoot=lower < 0.0 or upper > 1.0,
    )


def ci_wald(counts: Counts, level=0.95) -> Interval:
    """Normal-approximation interval ``p_hat +/- z sqrt(p_hat q_hat / n)``.

    Collapses to a single point when ``k`` is 0 or ``n``.
    """
    return compute_interval("wald", counts, level)


def ci_wald_cc(counts: Counts, level=0.95, form: str = "inner") -> Interval:
    """Wald interval with a continuity correction.

    ``form="inner"`` puts ``1/(2n)`` inside the square root;
    ``form="classical"`` adds it to the margin.
    """
    return compute_interval("wald_cc", counts, level, wald_cc_form=form)


def ci_wilson(counts: Counts, level=0.95) -> Interval:
    """Score interval centred on ``(k + kappa/2) / (n + kappa)``."""
    return compute_interval("wilson", counts, level)


def ci_agresti_coull(counts: Counts, level=0.95) -> Interval:
    return compute_interval("agresti_coull", counts, level)


def ci_clopper_pearson(counts: Counts, level=0.95) -> Interval:
    """Exact equal-tailed interval from inverting binomial tests.

    Endpoints are found by bisection on binomial tail sums to within 1e-12.
    """
    return compute_interval("clopper_pearson", counts, level)


def ci_quadratic(counts: Counts, level=0.95) -> Interval:
    """Interval obtained by inverting ``quadratic statistic <= kappa`` in p.

    Its centre is ``((n-1) p_hat + (kappa-1)/2) / (n+kappa-2)`` and its
    half-width ``sqrt(n kappa p_hat q_hat + (kappa-1)^2/4 - p_hat q_hat) / (n+kappa-2)``.
    For ``kappa >= 1`` both endpoints stay inside [0, 1]; the lower endpoint
    is exactly 0 for ``k`` in {0, 1} and the upper exactly 1 for ``k`` in
    {n-1, n}.

    Raises:
        UnsupportedRegimeError: when ``n + kappa - 2 <= 0`` (n = 1 at levels
            below about 0.6827).
    """
    return compute_interval("quadratic", counts, level)


def stat_quadratic_closed(counts: Counts, p: float) -> float:
    """Closed form of the quadratic-form statistic at a hypothesised ``p``.

    ``n (p_hat - p)^2 / (p q) - (p_hat / p + q_hat / q - 2)``
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly inside (0, 1), got {p!r}")
    _require_trials(counts.n)
    n, ph = counts.n, counts.p_hat
    q = 1.0 - p
    return n * (ph - p) ** 2 / (p * q) - (ph / p + (1.0 - ph) / q - 2.0)


def stat_quadratic_form(b: Sequence[int], p: float) -> float:
    """Pairwise-sum statistic ``n^-1 sum_{i != j} (B_i - p)(B_j - p) / (p q) + 1``.

    Evaluated in O(n) through ``sum_{i != j} a_i a_j = (sum a)^2 - sum a^2``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly inside (0, 1), got {p!r}")
    arr = np.asarray(b, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError("need at least one Bernoulli observation")
    if np.any((arr != 0.0) & (arr != 1.0)):
        raise DomainError("observations must be 0 or 1")
    a = arr - p
    cross = math.fsum(a) ** 2 - math.fsum(a * a)
    return cross / (arr.size * p * (1.0 - p)) + 1.0


@dataclass(frozen=True)
class RuleCheck:
    name: str
    value: float
    threshold: float
    holds: bool


def rule_of_thumb(counts: Counts, p: float | None = None, thresholds=(5, 10)) -> list[RuleCheck]:
    """Evaluate the textbook normal-approximation rules of thumb.

    Three quantities, each against every threshold: ``min(np, nq)``,
    ``min(n p_hat, n q)`` and ``n p_hat q_hat``. When the true ``p`` is not
    supplied, ``p_hat`` stands in for it. No verdict is drawn.
    """
    _require_trials(counts.n)
    n, ph = counts.n, counts.p_hat
    p_ref = ph if p is None else float(p)
    if not 0.0 <= p_ref <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    quantities = [
        ("min(np,nq)", min(n * p_ref, n * (1.0 - p_ref))),
        ("min(n*phat,nq)", min(n * ph, n * (1.0 - p_ref))),
        ("n*phat*qhat", n * ph * (1.0 - ph)),
    ]
    return [
        RuleCheck(f"{name}>={t:g}", value, float(t), value >= t)
        for name, value in quantities
        for t in thresholds
    ]
