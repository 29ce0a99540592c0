import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sobolevball.jacobi import (MAX_DEGREE, JacobiParams, Poly1D, jacobi_ab, jacobi_coeffs,
                                jacobi_deriv, jacobi_eval, jacobi_leading, jacobi_norm_h)


def series_jacobi(a, b, n, t):
    """Explicit hypergeometric sum, independent of the recurrence."""
    a, b, t = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(t)
    return float(mpmath.fsum(mpmath.binomial(n + a, n - s) * mpmath.binomial(n + b, s)
                             * ((t - 1) / 2) ** s * ((t + 1) / 2) ** (n - s)
                             for s in range(n + 1)))


def rel(p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    m = max(len(p), len(q), 1)
    p, q = np.pad(p, (0, m - len(p))), np.pad(q, (0, m - len(q)))
    return np.abs(p - q).max() / max(np.abs(p).max(), np.abs(q).max(), 1e-300)


params = st.tuples(st.floats(-0.9, 3.0), st.floats(-0.9, 3.0))


class TestPoly1D:
    def test_trailing_zeros_trimmed(self):
        assert Poly1D([1.0, 2.0, 0.0, 0.0]).coeffs.tolist() == [1.0, 2.0]
        assert Poly1D([0.0, 0.0]).is_zero

    def test_horner(self):
        p = Poly1D([1.0, -2.0, 3.0])
        assert p(2.0) == pytest.approx(1 - 4 + 12)

    def test_arithmetic(self):
        p, q = Poly1D([1.0, 1.0]), Poly1D([-1.0, 1.0])
        assert (p * q).coeffs.tolist() == [-1.0, 0.0, 1.0]
        assert (p + q).coeffs.tolist() == [0.0, 2.0]
        assert (p - p).is_zero
        assert Poly1D([1.0, 2.0, 3.0]).deriv().coeffs.tolist() == [2.0, 6.0]

    def test_compose_affine(self):
        p = Poly1D([0.0, 0.0, 1.0])
        q = p.compose_affine(2.0, -1.0)
        assert q(0.3) == pytest.approx((2 * 0.3 - 1) ** 2)


class TestEval:
    def test_degree_zero(self):
        assert jacobi_eval((0.3, 1.2), 0, 0.7) == 1.0

    def test_endpoint_normalisation(self):
        assert jacobi_eval((1, 0), 2, 1.0) == pytest.approx(3.0, rel=1e-14)

    def test_legendre_midpoint(self):
        assert jacobi_eval((0, 0), 2, 0.0) == pytest.approx(-0.5, rel=1e-14)
        assert series_jacobi(0, 0, 2, 0.0) == pytest.approx(-0.5, rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(params, st.integers(0, 20))
    def test_matches_series(self, ab, n):
        a, b = ab
        ts = np.linspace(-1, 1, 50)
        got = jacobi_eval((a, b), n, ts)
        ref = np.array([series_jacobi(a, b, n, t) for t in ts])
        scale = max(np.abs(ref).max(), 1.0)
        assert np.abs(got - ref).max() / scale < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(0, 20))
    def test_coeffs_match_eval(self, ab, n):
        p = jacobi_coeffs(ab, n)
        ts = np.linspace(-1, 1, 13)
        ref = jacobi_eval(ab, n, ts)
        # monomial coefficients cancel on [-1, 1]; measure against their size
        assert np.abs(p(ts) - ref).max() <= 1e-13 * np.abs(p.coeffs).sum()
        assert p.leading == pytest.approx(jacobi_leading(ab, n), rel=1e-12)


class TestCoefficients:
    def test_small_cases(self):
        assert jacobi_coeffs((0, 0), 0).coeffs.tolist() == [1.0]
        np.testing.assert_allclose(jacobi_coeffs((0, 0), 1).coeffs, [0.0, 1.0], atol=1e-15)
        np.testing.assert_allclose(jacobi_coeffs((0, 0), 2).coeffs, [-0.5, 0.0, 1.5], atol=1e-15)

    def test_norms(self):
        assert jacobi_norm_h((0, 0), 0) == pytest.approx(2.0)
        assert jacobi_norm_h((0, 0), 1) == pytest.approx(2.0 / 3.0)

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(0, 15))
    def test_norm_reflection(self, ab, n):
        a, b = ab
        assert jacobi_norm_h((a, b), n) == pytest.approx(jacobi_norm_h((b, a), n), rel=1e-12)

    @pytest.mark.parametrize("ab,n", [((0.5, 1.5), 4), ((-0.5, 0.0), 3), ((2.0, 1.0), 6)])
    def test_norm_against_quadrature(self, ab, n):
        a, b = ab
        f = lambda t: series_jacobi(a, b, n, t) ** 2 * (1 - t) ** a * (1 + t) ** b
        ref = float(mpmath.quad(f, [-1, 0, 1]))
        assert jacobi_norm_h(ab, n) == pytest.approx(ref, rel=1e-9)

    def test_norm_large_degree(self):
        assert math.isfinite(jacobi_norm_h((1.5, 2.5), 400))

    def test_leading(self):
        assert jacobi_leading((0, 0), 0) == 1.0
        assert jacobi_leading((0, 0), 2) == pytest.approx(1.5)
        assert jacobi_leading((1, 1), 1) == pytest.approx(2.0)

    def test_ab(self):
        assert jacobi_ab((0.7, 0.2), 0)[0] == pytest.approx(1.0)
        assert jacobi_ab((0, 1), 1)[1] == pytest.approx(0.5)
        assert jacobi_ab((0, 0), 1)[0] == pytest.approx(2.0 / 3.0)

    def test_ab_degenerate(self):
        with pytest.raises(ValueError):
            jacobi_ab(JacobiParams.relaxed(-0.5, -0.5), 0)

    def test_deriv(self):
        np.testing.assert_allclose(jacobi_deriv((0, 0), 1).coeffs, [1.0])
        assert jacobi_deriv((0.3, 0.4), 0).is_zero
        lhs = jacobi_deriv((1, 0), 2)
        rhs = 2.0 * jacobi_coeffs((2, 1), 1)
        assert rel(lhs.coeffs, rhs.coeffs) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(1, 20))
    def test_deriv_identity(self, ab, n):
        a, b = ab
        lhs = jacobi_deriv(ab, n)
        rhs = 0.5 * (n + a + b + 1) * jacobi_coeffs((a + 1, b + 1), n - 1)
        assert rel(lhs.coeffs, rhs.coeffs) < 1e-11
        assert lhs.leading == pytest.approx(n * jacobi_leading(ab, n), rel=1e-12)


class TestContiguousRelations:
    t1 = Poly1D([1.0, 1.0])

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(0, 20))
    def test_raise_beta_times_one_plus_t(self, ab, n):
        a, b = ab
        P = lambda k: jacobi_coeffs((a, b), k)
        lhs = self.t1 * jacobi_coeffs((a, b + 1), n)
        rhs = 2 * ((n + b + 1) * P(n) + (n + 1) * P(n + 1)) / (2 * n + a + b + 2)
        assert rel(lhs.coeffs, rhs.coeffs) < 1e-11

    def test_raise_beta_bracket_without_factor_two_is_half(self):
        # n = 0, a = b = 0: (1+t) against [1 + t]/2
        lhs = self.t1 * jacobi_coeffs((0, 1), 0)
        bracket = (jacobi_coeffs((0, 0), 0) + jacobi_coeffs((0, 0), 1)) / 2.0
        assert rel(lhs.coeffs, 2 * bracket.coeffs) < 1e-15

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(0, 20))
    def test_lower_alpha(self, ab, n):
        a, b = ab
        assume(abs(2 * n + a + b + 1) > 1e-3)
        an, bn = jacobi_ab(ab, n)
        rhs = an * jacobi_coeffs((a + 1, b), n)
        if n:
            rhs = rhs - bn * jacobi_coeffs((a + 1, b), n - 1)
        assert rel(jacobi_coeffs(ab, n).coeffs, rhs.coeffs) < 1e-11

    @settings(max_examples=30, deadline=None)
    @given(params, st.integers(0, 20))
    def test_lower_beta(self, ab, n):
        a, b = ab
        assume(abs(2 * n + a + b + 1) > 1e-3)
        an = jacobi_ab((a, b), n)[0]
        bs = jacobi_ab((b, a), n)[1]
        rhs = an * jacobi_coeffs((a, b + 1), n)
        if n:
            rhs = rhs + bs * jacobi_coeffs((a, b + 1), n - 1)
        assert rel(jacobi_coeffs(ab, n).coeffs, rhs.coeffs) < 1e-11

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-0.9, 3.0), st.floats(0.05, 3.0), st.integers(0, 20))
    def test_derivative_relations(self, a, b, n):
        R = lambda x, y: JacobiParams.relaxed(x, y)
        dP = jacobi_deriv((a, b), n)
        lhs = self.t1 * dP
        rhs = n * jacobi_coeffs(R(a + 1, b - 1), n)
        if n:
            rhs = rhs + b * jacobi_coeffs((a + 1, b), n - 1)
        assert rel(lhs.coeffs, rhs.coeffs) < 1e-11
        lhs2 = b * jacobi_coeffs((a, b), n) + self.t1 * dP
        rhs2 = (b + n) * jacobi_coeffs(R(a + 1, b - 1), n)
        assert rel(lhs2.coeffs, rhs2.coeffs) < 1e-11


class TestRelaxed:
    def test_classical_rejects(self):
        with pytest.raises(ValueError):
            JacobiParams(-1.0, 0.5)

    def test_norm_rejects_relaxed(self):
        with pytest.raises(ValueError):
            jacobi_norm_h(JacobiParams.relaxed(-1.0, 0.5), 2)

    @pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.5])
    @pytest.mark.parametrize("j", [1, 2, 3, 5, 8])
    def test_szego(self, j, beta):
        lhs = jacobi_coeffs(JacobiParams.relaxed(-1.0, beta), j)
        rhs = ((j + beta) / (2 * j)) * Poly1D([-1.0, 1.0]) * jacobi_coeffs((1.0, beta), j - 1)
        assert rel(lhs.coeffs, rhs.coeffs) < 1e-11

    def test_szego_sign_by_hand(self):
        # P_1^{(-1,b)} = (b+1)(t-1)/2, so the factor is (t-1), not (1-t)
        np.testing.assert_allclose(jacobi_coeffs(JacobiParams.relaxed(-1.0, 0.5), 1).coeffs,
                                   [-0.75, 0.75], atol=1e-15)


class TestDegreeCap:
    def test_cap_accepted(self):
        assert math.isfinite(jacobi_eval((0, 0), MAX_DEGREE, 0.3))

    def test_beyond_cap(self):
        with pytest.raises(ValueError):
            jacobi_eval((0, 0), MAX_DEGREE + 1, 0.3)
        with pytest.raises(ValueError):
            jacobi_coeffs((0, 0), MAX_DEGREE + 1)

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            jacobi_eval((0, 0), -1, 0.0)
