"""Confidence intervals for a binomial proportion.

Six interval methods (Wald, continuity-corrected Wald, Wilson, Agresti-Coull,
Clopper-Pearson and the quadratic-form interval), exact coverage and
expected margin of error, seeded Monte-Carlo checks and a small CLI.
"""

__version__ = "0.1.0"

from .errors import DomainError, PropintError, SchemaError, UnknownMethodError, UnsupportedRegimeError
from .numerics import ConfidenceLevel, binomial_cdf, binomial_pmf, chi2_1_cdf, normal_cdf, normal_inverse_cdf
from .intervals import (
    METHODS,
    Counts,
    Interval,
    ci_agresti_coull,
    ci_clopper_pearson,
    ci_quadratic,
    ci_wald,
    ci_wald_cc,
    ci_wilson,
    compute_interval,
    stat_quadratic_closed,
    stat_quadratic_form,
)
from .evaluation import SweepGrid, exact_coverage, expected_margin, margin_profile, sweep
from .simulation import limit_check, simulate_coverage
from .recommend import recommend
