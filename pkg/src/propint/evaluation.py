"""Exact coverage probability and expected margin of error.

Both quantities are finite sums over the binomial support::

    coverage(n, p)    = sum_k 1{L(k) <= p <= U(k)} pmf(n, k, p)
    expected_me(n, p) = sum_k (U(k) - L(k)) / 2 * pmf(n, k, p)

Interval bounds are computed once per (method, n, level) and reused across
every ``p`` of a sweep.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import numpy as np

from .errors import DomainError
from .intervals import check_method, interval_bounds
from .numerics import ConfidenceLevel, as_level, binomial_pmf_table

__all__ = [
    "EvaluationPoint",
    "SweepGrid",
    "exact_coverage",
    "expected_margin",
    "coverage_curve",
    "margin_profile",
    "sweep",
    "FIGURE_METHODS",
    "cached_bounds",
    "p_grid",
]

FIGURE_METHODS = ("wald", "quadratic", "agresti_coull", "wilson")


@dataclass(frozen=True)
class EvaluationPoint:
    method: str
    n: int
    p: float
    level: ConfidenceLevel
    coverage: float
    expected_me: float


@dataclass(frozen=True)
class SweepGrid:
    n_values: tuple[int, ...]
    p_values: tuple[float, ...]
    levels: tuple[ConfidenceLevel, ...]
    methods: tuple[str, ...]

    def __init__(self, n_values, p_values, levels, methods):
        object.__setattr__(self, "n_values", tuple(int(n) for n in n_values))
        object.__setattr__(self, "p_values", tuple(float(p) for p in p_values))
        object.__setattr__(self, "levels", tuple(as_level(lv) for lv in levels))
        object.__setattr__(self, "methods", tuple(check_method(m) for m in methods))
        for name in ("n_values", "p_values", "levels", "methods"):
            if not getattr(self, name):
                raise DomainError(f"sweep grid: {name} must be nonempty")
        if min(self.n_values) < 1:
            raise DomainError("sweep grid: n values must be >= 1")
        if not all(0.0 <= p <= 1.0 for p in self.p_values):
            raise DomainError("sweep grid: p values must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.n_values) * len(self.p_values) * len(self.levels) * len(self.methods)


@lru_cache(maxsize=1024)
def cached_bounds(method: str, n: int, level: float):
    lower, upper = interval_bounds(method, n, None, level)
    lower.setflags(write=False)
    upper.setflags(write=False)
    return lower, upper


def _check_p(p) -> np.ndarray:
    pa = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(np.isnan(pa)) or np.any((pa < 0.0) | (pa > 1.0)):
        raise DomainError("p must lie in [0, 1]")
    return pa


def coverage_curve(method: str, n: int, p, level=0.95) -> tuple[np.ndarray, np.ndarray]:
    """Coverage and expected margin of error for many ``p`` at once.

    Returns:
        Two arrays shaped like ``np.atleast_1d(p)``.
    """
    check_method(method)
    lv = as_level(level)
    pa = _check_p(p)
    lower, upper = cached_bounds(method, int(n), lv.level)
    pmf = binomial_pmf_table(int(n), pa)
    covered = (lower[None, :] <= pa[:, None]) & (pa[:, None] <= upper[None, :])
    coverage = np.sum(np.where(covered, pmf, 0.0), axis=1)
    me = pmf @ (0.5 * (upper - lower))
    return np.minimum(coverage, 1.0), me


def exact_coverage(method: str, n: int, p: float, level=0.95) -> float:
    """Probability that the ``method`` interval contains ``p`` under Binomial(n, p)."""
    return float(coverage_curve(method, n, p, level)[0][0])


def expected_margin(method: str, n: int, p: float, level=0.95) -> float:
    """Binomial expectation of the interval half-width."""
    return float(coverage_curve(method, n, p, level)[1][0])


def margin_profile(method: str, n: int, phat_qhat: float, level=0.95) -> float:
    """Half-width as a function of the observed ``p_hat * q_hat`` alone.

    Only defined for methods whose margin depends on ``p_hat`` solely through
    ``p_hat * q_hat``: wald, wald_cc (inner form) and quadratic.
    """
    if not 0.0 <= phat_qhat <= 0.25:
        raise DomainError(f"p_hat*q_hat must lie in [0, 0.25], got {phat_qhat!r}")
    if n < 1:
        raise DomainError("n must be >= 1")
    lv = as_level(level)
    if method == "wald":
        return lv.z * float(np.sqrt(phat_qhat / n))
    if method == "wald_cc":
        return lv.z * float(np.sqrt(phat_qhat / n + 0.5 / n))
    if method == "quadratic":
        denom = n + lv.kappa - 2.0
        if denom <= 0.0:
            raise DomainError(f"quadratic margin undefined for n={n} at level {lv.level:g}")
        d = n * lv.kappa * phat_qhat + 0.25 * (lv.kappa - 1.0) ** 2 - phat_qhat
        return float(np.sqrt(max(d, 0.0))) / denom
    check_method(method)
    raise DomainError(
        f"margin_profile: the {method} margin is not a function of p_hat*q_hat alone"
    )


def _evaluate_block(method: str, lv: ConfidenceLevel, n: int, p_values) -> list[EvaluationPoint]:
    cov, me = coverage_curve(method, n, p_values, lv)
    return [
        EvaluationPoint(method, n, p, lv, float(c), float(m))
        for p, c, m in zip(p_values, cov, me)
    ]


def sweep(grid: SweepGrid, n_jobs: int = 1) -> list[EvaluationPoint]:
    """Evaluate the full Cartesian product of ``grid``.

    Rows are ordered by method, then level, then n, then p, each in input
    order; the ordering does not depend on ``n_jobs``.
    """
    blocks = [(m, lv, n) for m in grid.methods for lv in grid.levels for n in grid.n_values]
    p_values = grid.p_values
    if n_jobs == 1:
        results = [_evaluate_block(m, lv, n, p_values) for m, lv, n in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            results = list(pool.map(lambda b: _evaluate_block(*b, p_values), blocks))
    return [pt for block in results for pt in block]


def p_grid(step: float = 0.001) -> tuple[float, ...]:
    """Evenly spaced proportions on [0, 1], both ends included."""
    count = int(round(1.0 / step))
    return tuple(round(i * step, 12) for i in range(count + 1))
