import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import beta

from propint.errors import DomainError, UnknownMethodError, UnsupportedRegimeError
from propint.intervals import (
    METHODS,
    AugmentedCounts,
    Counts,
    ci_agresti_coull,
    ci_clopper_pearson,
    ci_quadratic,
    ci_wald,
    ci_wald_cc,
    ci_wilson,
    compute_interval,
    interval_bounds,
    rule_of_thumb,
    stat_quadratic_closed,
    stat_quadratic_form,
)
from propint.numerics import ConfidenceLevel, binomial_pmf_table

L95 = ConfidenceLevel(0.95)

# Frozen from a 40-digit mpmath evaluation of the closed-form formulas and,
# for Clopper-Pearson, scipy's beta quantiles.
FROZEN = {
    ("wald", 0): (0.0, 0.0),
    ("wald", 2): (-0.0479180129218, 0.447918012922),
    ("wald", 5): (0.190102483848, 0.809897516152),
    ("wald_cc", 0): (-0.438261270288, 0.438261270288),
    ("wald_cc", 2): (-0.303523864544, 0.703523864544),
    ("wilson", 0): (0.0, 0.277532799863),
    ("wilson", 2): (0.0566821514544, 0.509837528463),
    ("wilson", 5): (0.236593090513, 0.763406909487),
    ("agresti_coull", 0): (-0.0433545058877, 0.320887305751),
    ("agresti_coull", 2): (0.0458872704839, 0.520632409434),
    ("clopper_pearson", 0): (0.0, 0.308497107819),
    ("clopper_pearson", 2): (0.0252107263268, 0.556095462308),
    ("clopper_pearson", 10): (0.691502892181, 1.0),
    ("quadratic", 0): (0.0, 0.239958510494),
    ("quadratic", 1): (0.0, 0.391966808395),
    ("quadratic", 2): (0.0330578183104, 0.510917287986),
    ("quadratic", 5): (0.215216062214, 0.784783937786),
    ("quadratic", 10): (0.760041489506, 1.0),
}


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_n10(key):
    method, k = key
    iv = compute_interval(method, Counts(10, k), L95)
    lo, hi = FROZEN[key]
    assert iv.lower == pytest.approx(lo, abs=1e-10)
    assert iv.upper == pytest.approx(hi, abs=1e-10)


class TestCounts:

    def test_derived(self):
        c = Counts(10, 2)
        assert c.p_hat == 0.2 and c.q_hat == 0.8

    @pytest.mark.parametrize("n, k", [(3, 4), (-1, 0), (5, -1), (2.5, 1)])
    def test_invalid(self, n, k):
        with pytest.raises(DomainError):
            Counts(n, k)

    def test_empty_rejected_by_intervals(self):
        with pytest.raises(DomainError, match="empty subgroup"):
            ci_wald(Counts(0, 0))

    @given(st.integers(1, 500), st.data())
    def test_augmented_strictly_inside(self, n, data):
        k = data.draw(st.integers(0, n))
        aug = AugmentedCounts.from_counts(Counts(n, k), L95)
        assert aug.n_tilde > n
        assert 0.0 < aug.p_tilde < 1.0


class TestFlags:

    def test_wald_degenerate(self):
        for k in (0, 10):
            iv = ci_wald(Counts(10, k))
            assert iv.degenerate and iv.width == 0.0

    def test_wald_overshoot_unclipped(self):
        iv = ci_wald(Counts(10, 2))
        assert iv.overshoot and iv.lower < 0
        assert iv.clipped() == (0.0, iv.upper)

    def test_agresti_coull_overshoot(self):
        assert ci_agresti_coull(Counts(10, 0)).overshoot

    def test_wilson_symmetric_centre(self):
        iv = ci_wilson(Counts(10, 5))
        assert (iv.lower + iv.upper) / 2 == pytest.approx(0.5, abs=1e-15)
        iv = ci_agresti_coull(Counts(10, 5))
        assert (iv.lower + iv.upper) / 2 == pytest.approx(0.5, abs=1e-15)

    def test_wald_cc_classical(self):
        iv = ci_wald_cc(Counts(10, 2), form="classical")
        assert iv.lower == pytest.approx(-0.0979180129218, abs=1e-10)
        assert iv.upper == pytest.approx(0.497918012922, abs=1e-10)
        with pytest.raises(DomainError):
            ci_wald_cc(Counts(10, 2), form="other")

    def test_unknown_method(self):
        with pytest.raises(UnknownMethodError):
            compute_interval("jeffreys", Counts(10, 2))


class TestClopperPearson:

    @pytest.mark.parametrize("n", [1, 5, 10, 37, 100])
    def test_closed_forms(self, n):
        half = L95.alpha / 2
        assert ci_clopper_pearson(Counts(n, 0)).upper == pytest.approx(1 - half ** (1 / n), abs=1e-9)
        assert ci_clopper_pearson(Counts(n, n)).lower == pytest.approx(half ** (1 / n), abs=1e-9)

    @pytest.mark.parametrize("n", [3, 20, 64])
    def test_against_beta_quantiles(self, n):
        lower, upper = interval_bounds("clopper_pearson", n, None, 0.9)
        k = np.arange(n + 1)
        ref_lo = np.where(k > 0, beta.ppf(0.05, np.maximum(k, 1), n - k + 1), 0.0)
        ref_hi = np.where(k < n, beta.ppf(0.95, k + 1, np.maximum(n - k, 1)), 1.0)
        assert np.max(np.abs(lower - ref_lo)) < 1e-9
        assert np.max(np.abs(upper - ref_hi)) < 1e-9

    def test_residual_tails(self):
        n = 40
        half = L95.alpha / 2
        lower, upper = interval_bounds("clopper_pearson", n, None, L95)
        for k in range(n + 1):
            if k > 0:
                assert binomial_pmf_table(n, lower[k])[k:].sum() == pytest.approx(half, abs=1e-8)
            if k < n:
                assert binomial_pmf_table(n, upper[k])[: k + 1].sum() == pytest.approx(half, abs=1e-8)
            assert 0.0 <= lower[k] <= upper[k] <= 1.0


class TestQuadratic:

    def test_level_068_n1_unsupported(self):
        with pytest.raises(UnsupportedRegimeError):
            ci_quadratic(Counts(1, 0), 0.5)

    def test_n1_supported_at_95(self):
        iv = ci_quadratic(Counts(1, 0))
        assert iv.lower == 0.0 and iv.upper == 1.0

    def test_centre_and_margin_formula(self):
        for n, k in [(10, 2), (33, 7), (100, 50), (7, 6)]:
            ph = k / n
            kap = L95.kappa
            d = n + kap - 2
            centre = ((n - 1) * ph + (kap - 1) / 2) / d
            margin = math.sqrt(n * kap * ph * (1 - ph) + (kap - 1) ** 2 / 4 - ph * (1 - ph)) / d
            iv = ci_quadratic(Counts(n, k))
            assert iv.lower == pytest.approx(centre - margin, abs=1e-13)
            assert iv.upper == pytest.approx(centre + margin, abs=1e-13)

    def test_boundary_attainment(self):
        for n in (2, 3, 10, 57):
            assert ci_quadratic(Counts(n, 0)).lower == 0.0
            assert ci_quadratic(Counts(n, 1)).lower == 0.0
            assert ci_quadratic(Counts(n, 2)).lower > 0.0
            assert ci_quadratic(Counts(n, n)).upper == 1.0
            assert ci_quadratic(Counts(n, n - 1)).upper == 1.0

    def test_kappa_one_degenerates(self):
        lv = ConfidenceLevel(2 * 0.8413447460685429 - 1)
        assert lv.kappa == pytest.approx(1.0, abs=1e-12)
        iv = ci_quadratic(Counts(10, 0), lv)
        assert iv.width == pytest.approx(0.0, abs=1e-10)

    @given(st.integers(2, 300), st.sampled_from([0.6827, 0.8, 0.9, 0.95, 0.99, 0.999]), st.data())
    def test_no_overshoot(self, n, level, data):
        k = data.draw(st.integers(0, n))
        iv = ci_quadratic(Counts(n, k), level)
        assert 0.0 <= iv.lower <= iv.upper <= 1.0
        assert not iv.overshoot

    @given(st.integers(2, 200), st.data())
    def test_mirror_symmetry(self, n, data):
        k = data.draw(st.integers(0, n))
        a = ci_quadratic(Counts(n, k))
        b = ci_quadratic(Counts(n, n - k))
        assert a.lower == pytest.approx(1 - b.upper, abs=1e-14)


class TestStatistic:

    def test_closed_examples(self):
        assert stat_quadratic_closed(Counts(10, 5), 0.5) == pytest.approx(0.0, abs=1e-15)
        assert stat_quadratic_closed(Counts(2, 2), 0.5) == pytest.approx(2.0, abs=1e-15)
        assert stat_quadratic_closed(Counts(10, 2), 0.2) == pytest.approx(0.0, abs=1e-14)

    def test_form_examples(self):
        assert stat_quadratic_form([1, 0], 0.5) == pytest.approx(0.0, abs=1e-15)
        assert stat_quadratic_form([1, 1], 0.5) == pytest.approx(2.0, abs=1e-15)

    @staticmethod
    def pairwise(b, p):
        q = 1 - p
        total = sum((bi - p) * (bj - p) for (i, bi), (j, bj) in itertools.permutations(enumerate(b), 2))
        return total / (len(b) * p * q) + 1

    def test_form_against_double_loop(self):
        b = [0] * 10
        assert stat_quadratic_form(b, 0.3) == pytest.approx(self.pairwise(b, 0.3), abs=1e-12)
        assert stat_quadratic_form(b, 0.3) == pytest.approx(stat_quadratic_closed(Counts(10, 0), 0.3), abs=1e-12)
        rng = np.random.default_rng(3)
        for _ in range(20):
            b = list(rng.integers(0, 2, size=rng.integers(1, 15)))
            p = float(rng.uniform(0.05, 0.95))
            assert stat_quadratic_form(b, p) == pytest.approx(self.pairwise(b, p), abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            stat_quadratic_closed(Counts(3, 1), 0.0)
        with pytest.raises(DomainError):
            stat_quadratic_form([1, 0], 1.0)
        with pytest.raises(DomainError):
            stat_quadratic_form([1, 2], 0.5)

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.floats(0.01, 0.99))
    def test_forms_agree(self, b, p):
        closed = stat_quadratic_closed(Counts(len(b), sum(b)), p)
        assert stat_quadratic_form(b, p) == pytest.approx(closed, abs=1e-9, rel=1e-10)


def test_rule_of_thumb_reports_six():
    checks = rule_of_thumb(Counts(100, 30))
    assert len(checks) == 6
    by_name = {c.name: c for c in checks}
    assert by_name["n*phat*qhat>=10"].value == pytest.approx(21.0)
    assert by_name["n*phat*qhat>=10"].holds
    assert by_name["min(np,nq)>=10"].holds
    checks = rule_of_thumb(Counts(100, 30), p=0.05)
    assert {c.name: c.holds for c in checks}["min(np,nq)>=10"] is False


@pytest.mark.parametrize("method", METHODS)
def test_vectorised_matches_scalar(method):
    n = 23
    lower, upper = interval_bounds(method, n, None, 0.9)
    for k in range(n + 1):
        iv = compute_interval(method, Counts(n, k), 0.9)
        assert iv.lower == pytest.approx(lower[k], abs=1e-15)
        assert iv.upper == pytest.approx(upper[k], abs=1e-15)
        assert iv.lower <= iv.upper
