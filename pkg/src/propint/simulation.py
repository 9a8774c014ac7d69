"""Seeded Monte-Carlo coverage and an exact check of the chi-square(1) limit."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .intervals import Counts, check_method, stat_quadratic_closed
from .evaluation import cached_bounds
from .numerics import ConfidenceLevel, as_level, binomial_pmf_table, chi2_1_cdf

__all__ = [
    "DEFAULT_SEED",
    "SimulationReport",
    "LimitCheckReport",
    "default_seed",
    "draw_binomial",
    "simulate_coverage",
    "limit_check",
    "TABLE_GRID",
    "TEXT_GRID",
]

DEFAULT_SEED = 20240501
SEED_ENV = "PROPINT_SEED"

# Replications are drawn in fixed-size blocks, each from its own substream
# keyed by (seed, block index), so results never depend on how blocks are
# scheduled.
BLOCK_SIZE = 2048
_INVERSION_MAX_N = 64

TABLE_GRID = tuple((n, p) for n in (10, 30, 50, 100) for p in (0.05, 0.1, 0.2))
TEXT_GRID = tuple((n, p) for n in (10, 30, 50, 100) for p in (0.01, 0.05, 0.09))


def default_seed() -> int:
    """The simulation seed: ``$PROPINT_SEED`` if set, else :data:`DEFAULT_SEED`."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SimulationReport:
    method: str
    n: int
    p: float
    level: ConfidenceLevel
    replications: int
    empirical_coverage: float
    standard_error: float
    seed: int


@dataclass(frozen=True)
class LimitCheckReport:
    n: int
    p: float
    sup_distance: float
    l1_diagnostic: float
    support: tuple[float, ...]
    weights: tuple[float, ...]
    grid_sup_distance: float | None = None


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(block,))
    return np.random.Generator(np.random.PCG64(ss))


def draw_binomial(n: int, p: float, size: int, seed: int) -> np.ndarray:
    """Binomial(n, p) draws, reproducible from ``seed``.

    Small ``n`` uses inversion of the exact CDF; larger ``n`` sums Bernoulli
    draws.
    """
    if size < 1:
        raise DomainError(f"replications must be >= 1, got {size}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    cdf = np.cumsum(binomial_pmf_table(n, p)) if n <= _INVERSION_MAX_N else None
    out = np.empty(size, dtype=np.int64)
    for block, start in enumerate(range(0, size, BLOCK_SIZE)):
        stop = min(start + BLOCK_SIZE, size)
        rng = _block_rng(seed, block)
        if cdf is not None:
            u = rng.random(stop - start)
            out[start:stop] = np.minimum(np.searchsorted(cdf, u, side="right"), n)
        else:
            u = rng.random((stop - start, n))
            out[start:stop] = np.count_nonzero(u < p, axis=1)
    return out


def simulate_coverage(
    method: str,
    n: int,
    p: float,
    level=0.95,
    replications: int = 10_000,
    seed: int | None = None,
) -> SimulationReport:
    """Empirical coverage of ``method`` from ``replications`` binomial draws."""
    check_method(method)
    lv = as_level(level)
    seed = default_seed() if seed is None else int(seed)
    draws = draw_binomial(int(n), float(p), int(replications), seed)
    lower, upper = cached_bounds(method, int(n), lv.level)
    covered = (lower <= p) & (p <= upper)
    hits = int(np.count_nonzero(covered[draws]))
    c = hits / replications
    return SimulationReport(
        method=method,
        n=int(n),
        p=float(p),
        level=lv,
        replications=int(replications),
        empirical_coverage=c,
        standard_error=math.sqrt(c * (1.0 - c) / replications),
        seed=seed,
    )


def _law_of_statistic(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    values = np.array([stat_quadratic_closed(Counts(n, k), p) for k in range(n + 1)])
    weights = binomial_pmf_table(n, p)
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    # Merge support points equal up to rounding (the law is symmetric at p = 1/2).
    keep = np.concatenate([[True], np.diff(values) > 1e-12 * np.maximum(1.0, np.abs(values[1:]))])
    groups = np.cumsum(keep) - 1
    merged_w = np.bincount(groups, weights=weights)
    return values[keep], merged_w


def _chi2_cdf_clamped(t: np.ndarray) -> np.ndarray:
    return np.array([chi2_1_cdf(x) if x > 0.0 else 0.0 for x in t])


def limit_check(n: int, p: float, t_grid_resolution: int | None = None) -> LimitCheckReport:
    """Kolmogorov distance between the exact law of the statistic and chi-square(1).

    The statistic takes at most ``n + 1`` values, so its distribution is
    enumerated exactly and the supremum is attained at a support point or
    its left limit. ``t_grid_resolution`` additionally reports the largest
    distance on a uniform grid of that many points, for plotting.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly inside (0, 1), got {p!r}")
    support, weights = _law_of_statistic(n, p)
    after = np.minimum(np.cumsum(weights), 1.0)
    before = np.concatenate([[0.0], after[:-1]])
    g = _chi2_cdf_clamped(support)
    sup = float(max(np.max(np.abs(after - g)), np.max(np.abs(before - g))))
    grid_sup = None
    if t_grid_resolution:
        t = np.linspace(0.0, max(float(support[-1]), 1.0), int(t_grid_resolution))
        idx = np.searchsorted(support, t, side="right")
        f = np.concatenate([[0.0], after])[idx]
        grid_sup = float(np.max(np.abs(f - _chi2_cdf_clamped(t))))
    q = 1.0 - p
    return LimitCheckReport(
        n=n,
        p=p,
        sup_distance=min(sup, 1.0),
        l1_diagnostic=(1.0 / p + 1.0 / q) / (2.0 ** 1.5 * n),
        support=tuple(float(v) for v in support),
        weights=tuple(float(w) for w in weights),
        grid_sup_distance=grid_sup,
    )
