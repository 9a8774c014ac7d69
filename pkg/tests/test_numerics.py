from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import ndtri
from scipy.stats import norm

from propint.errors import DomainError
from propint.numerics import (
    ConfidenceLevel,
    binomial_cdf,
    binomial_pmf,
    binomial_pmf_table,
    chi2_1_cdf,
    normal_cdf,
    normal_inverse_cdf,
)


def exact_pmf(n, k, p):
    p = Fraction(p)
    return comb(n, k) * p**k * (1 - p) ** (n - k)


class TestNormal:

    @pytest.mark.parametrize("u, expected", [
        (0.5, 0.0),
        (0.975, 1.959963984540054),
        (0.995, 2.5758293035489004),
    ])
    def test_inverse_examples(self, u, expected):
        assert normal_inverse_cdf(u) == pytest.approx(expected, abs=1e-12)

    def test_inverse_matches_scipy(self):
        u = np.concatenate([np.linspace(1e-12, 1e-6, 50), np.linspace(0.001, 0.999, 999)])
        ours = np.array([normal_inverse_cdf(x) for x in u])
        assert np.max(np.abs(ours - ndtri(u))) < 1e-9

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
    def test_inverse_domain(self, u):
        with pytest.raises(DomainError):
            normal_inverse_cdf(u)

    def test_cdf_examples(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)
        assert normal_cdf(-1e9) == pytest.approx(0.0, abs=1e-12)

    def test_cdf_matches_scipy(self):
        x = np.linspace(-8, 8, 1601)
        ours = np.array([normal_cdf(v) for v in x])
        assert np.max(np.abs(ours - norm.cdf(x))) < 1e-12
        assert np.all(np.diff(ours) >= 0)

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    def test_round_trip(self, u):
        assert abs(normal_cdf(normal_inverse_cdf(u)) - u) <= 1e-9

    @given(st.floats(min_value=0.01, max_value=0.98))
    def test_inverse_increasing(self, u):
        assert normal_inverse_cdf(u) < normal_inverse_cdf(u + 0.01)


class TestChi2:

    def test_zero(self):
        assert chi2_1_cdf(0.0) == 0.0

    @pytest.mark.parametrize("t, level", [(3.841459, 0.95), (6.634897, 0.99)])
    def test_examples(self, t, level):
        assert chi2_1_cdf(t) == pytest.approx(level, abs=1e-7)

    @pytest.mark.parametrize("level", [0.5, 0.6827, 0.9, 0.95, 0.99, 0.999])
    def test_kappa_round_trip(self, level):
        assert chi2_1_cdf(ConfidenceLevel(level).kappa) == pytest.approx(level, abs=1e-9)

    def test_monotone(self):
        values = [chi2_1_cdf(t) for t in np.linspace(0, 30, 3001)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_negative(self):
        with pytest.raises(DomainError):
            chi2_1_cdf(-1e-9)


class TestConfidenceLevel:

    def test_fields(self):
        lv = ConfidenceLevel(0.95)
        assert lv.alpha == 1 - 0.95
        assert lv.kappa == pytest.approx(lv.z * lv.z, rel=1e-12)
        assert lv.kappa == pytest.approx(3.841459, abs=1e-5)

    def test_one_sigma_level(self):
        assert ConfidenceLevel(0.6827).kappa == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.5, 2.0])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            ConfidenceLevel(bad)

    def test_z_increasing(self):
        zs = [ConfidenceLevel(x).z for x in np.linspace(0.05, 0.995, 50)]
        assert all(b > a for a, b in zip(zs, zs[1:]))


class TestBinomial:

    def test_pmf_examples(self):
        assert binomial_pmf(10, 0, 0.2) == pytest.approx(0.1073741824, rel=1e-12)
        assert binomial_pmf(2, 1, 0.5) == pytest.approx(0.5, rel=1e-14)
        assert binomial_pmf(100, 50, 0.5) == pytest.approx(float(exact_pmf(100, 50, Fraction(1, 2))), rel=1e-12)

    @pytest.mark.parametrize("n, p", [(7, 0.3), (25, 0.01), (60, 0.77)])
    def test_pmf_exact_rational(self, n, p):
        for k in range(n + 1):
            assert binomial_pmf(n, k, p) == pytest.approx(float(exact_pmf(n, k, p)), rel=1e-11, abs=1e-300)

    def test_cdf_examples(self):
        assert binomial_cdf(10, 10, 0.2) == 1.0
        assert binomial_cdf(10, 4, 0.2) == pytest.approx(0.9672065024, abs=1e-12)
        assert binomial_cdf(10, 0, 0.0) == 1.0

    def test_boundary_p(self):
        assert binomial_pmf(5, 0, 0.0) == 1.0
        assert binomial_pmf(5, 5, 1.0) == 1.0
        assert binomial_pmf(5, 3, 1.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            binomial_pmf(3, 4, 0.5)
        with pytest.raises(DomainError):
            binomial_pmf(3, 1, 1.5)

    @pytest.mark.parametrize("p", [0.01, 0.1, 0.5])
    def test_sums_to_one(self, p):
        for n in (1, 2, 17, 100, 555, 2000):
            assert abs(binomial_pmf_table(n, p).sum() - 1.0) <= 1e-10
        assert abs(binomial_pmf_table(10_000, p).sum() - 1.0) <= 1e-10

    def test_table_matches_scalar(self):
        ps = np.array([0.0, 0.13, 0.5, 1.0])
        table = binomial_pmf_table(12, ps)
        assert table.shape == (4, 13)
        for i, p in enumerate(ps):
            for k in range(13):
                assert table[i, k] == pytest.approx(binomial_pmf(12, k, p), rel=1e-13, abs=1e-300)

    @given(st.integers(1, 200), st.floats(0, 1))
    def test_cdf_monotone(self, n, p):
        values = [binomial_cdf(n, k, p) for k in range(n + 1)]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
        assert values[-1] == 1.0
