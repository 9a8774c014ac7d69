"""Rule-based choice of interval method for small-sample proportions.

Rules exist for the three levels with published evidence (0.90, 0.95 and
0.99); any other level is mapped to the nearest of these. The thresholds
describe the true proportion, so feeding an observed ``p_hat`` is an
extrapolation and every recommendation says so in ``caveat``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .numerics import ConfidenceLevel, as_level

__all__ = ["Recommendation", "recommend", "STUDIED_LEVELS"]

STUDIED_LEVELS = (0.90, 0.95, 0.99)

# Slack on the threshold comparisons so that p and 1 - p land on the same
# side despite rounding in 1 - p.
_EPS = 1e-12

_APPROXIMATE = frozenset({"quadratic", "wilson", "agresti_coull"})

CAVEAT = "thresholds refer to the true proportion; applied here to the reference value given"


@dataclass(frozen=True)
class Recommendation:
    preferred: str
    acceptable: frozenset[str]
    rationale: str
    level: ConfidenceLevel
    caveat: str = CAVEAT


def _near_boundary(p: float, cut: float) -> bool:
    return min(p, 1.0 - p) <= cut + _EPS


def recommend(n: int, p_ref: float, level=0.95) -> Recommendation:
    """Pick an interval method for ``n`` trials and a reference proportion.

    Args:
        n: sample size, >= 1.
        p_ref: planning value or observed proportion in [0, 1].
        level: confidence level; snapped to the nearest studied level.

    Returns:
        A :class:`Recommendation`. The Wald interval is never acceptable.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0.0 <= p_ref <= 1.0:
        raise DomainError(f"p_ref must lie in [0, 1], got {p_ref!r}")
    lv = as_level(level)
    studied = min(STUDIED_LEVELS, key=lambda s: (abs(s - lv.level), s))
    suffix = "" if abs(studied - lv.level) < 1e-12 else f"; level {lv.level:g} mapped to {studied:g}"

    if studied == 0.95:
        if n <= 10 and _near_boundary(p_ref, 0.2):
            pref, acc, rule = "quadratic", {"quadratic"}, "l95-extremely-small"
        elif n > 10 and _near_boundary(p_ref, 0.1):
            pref, acc, rule = "quadratic", {"quadratic"}, "l95-moderately-small"
        else:
            pref, acc, rule = "quadratic", set(_APPROXIMATE), "l95-similar-performance"
    elif studied == 0.90:
        if n <= 10 and _near_boundary(p_ref, 0.1):
            pref, acc, rule = "quadratic", {"quadratic"}, "l90-small-boundary"
        else:
            pref, acc, rule = "agresti_coull", set(_APPROXIMATE), "l90-agresti-coull"
    else:
        pref, acc, rule = "quadratic", {"quadratic"}, "l99-quadratic"
    return Recommendation(pref, frozenset(acc), rule + suffix, lv)
