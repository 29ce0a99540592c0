import json

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sobolevball.jacobi import JacobiParams, Poly1D, jacobi_ab, jacobi_coeffs, jacobi_leading, jacobi_norm_h
from sobolevball.sobolev1d import (RECURSION_LAMBDA_FACTOR, D_value, SobolevFamily1D, check_family_params,
                                   coeff_ABC, d_value, gram_schmidt_q, is_coherent, q_norm, q_poly, r_hat,
                                   r_value, sobolev1d_gram, sobolev1d_inner, sobolev_family,
                                   weight_matrix, weight_matrix_det)


def rel(p, q):
    n = max(len(p.coeffs), len(q.coeffs), 1)
    a, b = np.zeros(n), np.zeros(n)
    a[: len(p.coeffs)], b[: len(q.coeffs)] = p.coeffs, q.coeffs
    return np.abs(a - b).max() / max(np.abs(a).max(), np.abs(b).max(), 1e-300)


def quad_inner(f, g, alpha, beta, d, lam):
    """Direct numerical quadrature of the weight-matrix form; independent of the moment engine."""
    A, B = beta * (2 * beta - (d - 2)), 2 * beta - (d - 2)
    fd, gd = f.deriv(), g.deriv()
    w = lambda t, b: (1 - t) ** alpha * (1 + t) ** b
    val = lambda t: f(float(t)) * g(float(t)) * w(t, beta)
    bracket = lambda t: (A * f(float(t)) * g(float(t))
                         + B * (1 + t) * (f(float(t)) * gd(float(t)) + fd(float(t)) * g(float(t)))
                         + 4 * (1 + t) ** 2 * fd(float(t)) * gd(float(t))) * (w(t, beta - 1) if B else w(t, beta + 1) / (1 + t) ** 2)
    return float(mpmath.quad(val, [-1, 1]) + 2 * lam * mpmath.quad(bracket, [-1, 1]))


class TestParameters:
    def test_checks(self):
        check_family_params(1.0, 1.0, 2, 1.0)
        check_family_params(1.0, 0.5, 3, 1.0)
        for bad in [(-1.0, 1.0, 2, 1.0), (1.0, 0.2, 3, 1.0), (1.0, -0.1, 2, 1.0), (1.0, 1.0, 2, -1.0)]:
            with pytest.raises(ValueError):
                check_family_params(*bad)

    def test_coherent(self):
        assert is_coherent(0.5, 3) and is_coherent(0.0, 2) and not is_coherent(1.0, 2)

    @pytest.mark.parametrize("beta,d", [(1.0, 2), (1.5, 3), (2.5, 2), (0.7, 2)])
    def test_positive_definite(self, beta, d):
        ts = np.linspace(-1, 1, 101)[1:]
        M = weight_matrix(ts, beta, d)
        det = np.linalg.det(np.moveaxis(M, -1, 0))
        np.testing.assert_allclose(det, weight_matrix_det(ts, beta, d), rtol=1e-12)
        assert (det > 0).all() and (M[0, 0] > 0).all()

    @pytest.mark.parametrize("alpha,beta,d", [(0.5, 1.0, 2), (2.5, 1.5, 3), (-0.5, 0.0, 2)])
    def test_positive_norms(self, alpha, beta, d):
        fam = sobolev_family(alpha, beta, d, 1.0, 2, "gram_schmidt")
        rng = np.random.default_rng(0)
        for deg in [0, 3, 10, 20]:
            p = Poly1D(rng.standard_normal(deg + 1))
            assert sobolev1d_inner(p, p, fam) > 0


class TestInner:
    def test_constant(self):
        fam = sobolev_family(1.0, 1.0, 2, 0.7, 2)
        A = 1.0 * 2.0
        ref = jacobi_norm_h((1, 1), 0) + 2 * 0.7 * A * jacobi_norm_h((1, 0), 0)
        assert sobolev1d_inner(Poly1D([1.0]), Poly1D([1.0]), fam) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("alpha,beta,d", [(1.0, 1.0, 2), (2.5, 2.5, 3), (0.5, 0.5, 3), (1.0, 0.0, 2)])
    def test_against_quadrature(self, alpha, beta, d):
        fam = sobolev_family(alpha, beta, d, 0.8, 2)
        f, g = Poly1D([0.3, -1.0, 0.5, 2.0]), Poly1D([1.0, 0.2, -0.7])
        ref = quad_inner(f, g, alpha, beta, d, 0.8)
        assert sobolev1d_inner(f, g, fam) == pytest.approx(ref, rel=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(-2, 2), min_size=1, max_size=6),
           st.lists(st.floats(-2, 2), min_size=1, max_size=6))
    def test_symmetric(self, a, b):
        fam = sobolev_family(1.5, 1.0, 2, 2.0, 1)
        f, g = Poly1D(a), Poly1D(b)
        assert sobolev1d_inner(f, g, fam) == pytest.approx(sobolev1d_inner(g, f, fam), rel=1e-13, abs=1e-13)

    def test_q1_q0_orthogonal(self):
        fam = sobolev_family(2.0, 1.0, 2, 1.0, 2)
        assert abs(sobolev1d_inner(fam.q[1], fam.q[0], fam)) < 1e-13 * fam.hhat[0]


class TestCoefficients:
    def test_ABC(self):
        A, B, C = coeff_ABC(1, 0.0, 1.0, 2)
        assert (A, B, C) == pytest.approx((9 / 20, 7 / 5, 21.0), rel=1e-14)
        A0, B0, C0 = coeff_ABC(0, 0.0, 1.0, 2)
        assert (A0, B0, C0) == pytest.approx((1 / 6, 1 / 3, 1.0), rel=1e-14)

    def test_r(self):
        assert r_value(0, 0.0, 1.0, 2, 3.0) == 1.0
        for lam in [0.0, 0.5, 2.0]:
            A0, B0, C0 = coeff_ABC(0, 0.3, 1.5, 3)
            assert r_value(1, 0.3, 1.5, 3, lam) == pytest.approx(C0 * lam + B0, rel=1e-14)
            assert r_value(1, 0.0, 1.0, 2, lam) == pytest.approx(lam + 1 / 3, rel=1e-14)

    def test_r_hat_scaling(self):
        mu, beta = 0.4, 1.5
        for j in range(1, 6):
            assert r_value(j, mu, beta, 3, 0.9) == pytest.approx((mu + beta) * r_hat(j, mu, beta, 3, 0.9))

    def test_r_positivity_violation(self):
        with pytest.raises(ValueError):
            r_value(1, -0.5, -0.2, 2, 0.0)

    def test_d_examples(self):
        assert d_value(-1, 0.0, 1.0, 2, 1.0) == 0.0
        assert d_value(0, 0.0, 1.0, 2, 1.0) == pytest.approx(-1 / 8, rel=1e-14)
        assert d_value(0, 0.0, 1.0, 2, 1.0, "fraction") == pytest.approx(-1 / 8, rel=1e-14)
        A0 = coeff_ABC(0, 0.0, 1.0, 2)[0]
        assert -A0 * 1.0 / r_value(1, 0.0, 1.0, 2, 1.0) == pytest.approx(-1 / 8)

    @pytest.mark.parametrize("mu,beta", [(0.0, 1.0), (1.5, 2.5), (-0.5, 0.5), (0.3, 0.0)])
    def test_d_at_zero_lambda(self, mu, beta):
        for j in range(8):
            assert d_value(j, mu, beta, 2, 0.0) == pytest.approx(-jacobi_ab((mu, beta), j + 1)[1], rel=1e-12)

    @pytest.mark.parametrize("mu,beta,d", [(0.0, 1.0, 2), (1.5, 2.5, 3), (-0.5, 0.5, 3), (0.0, 0.0, 2)])
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_d_paths_agree_and_negative(self, mu, beta, d, lam):
        for j in range(16):
            a = d_value(j, mu, beta, d, lam, "ratio")
            b = d_value(j, mu, beta, d, lam, "fraction")
            assert a == pytest.approx(b, rel=1e-12)
            assert a < 0

    def test_D(self):
        assert D_value(0, 0.0, 1.0) == pytest.approx(2.0)
        assert D_value(1, 0.0, 1.0) == pytest.approx(9.0)

    @pytest.mark.parametrize("mu,beta", [(0.0, 1.0), (1.5, 2.5), (-0.5, 0.5), (2.0, 0.0)])
    def test_ladder(self, mu, beta):
        for j in range(2, 10):
            A = coeff_ABC(j - 1, mu, beta, 2)[0]
            a = jacobi_ab((mu, beta), j)[0]
            assert A / a == pytest.approx(D_value(j - 1, mu, beta) / D_value(j, mu, beta), rel=1e-12)


GRID = [(a, b, d) for d in (2, 3) for a in (0.5, 1.0, 2.5) for b in ((d - 2) / 2, 1.0, 2.5)]


class TestFamily:
    @pytest.mark.parametrize("alpha,beta,d", GRID)
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_recursive_matches_gram_schmidt(self, alpha, beta, d, lam):
        rec = sobolev_family(alpha, beta, d, lam, 10, "recursive")
        gs = sobolev_family(alpha, beta, d, lam, 10, "gram_schmidt")
        for j in range(11):
            assert rel(rec.q[j], gs.q[j]) <= 1e-8
            assert rec.hhat[j] == pytest.approx(gs.hhat[j], rel=1e-9)

    @pytest.mark.parametrize("alpha,beta,d", [(1.0, 1.0, 2), (2.5, 0.5, 3), (0.5, 0.0, 2)])
    def test_gram_diagonal(self, alpha, beta, d):
        fam = sobolev_family(alpha, beta, d, 1.0, 10)
        G = fam.gram()
        D = np.sqrt(np.outer(np.diag(G), np.diag(G)))
        off = np.abs(G - np.diag(np.diag(G))) / D
        assert off.max() <= 1e-10
        np.testing.assert_allclose(np.diag(G), fam.hhat, rtol=1e-9)

    @pytest.mark.parametrize("alpha,beta,d", [(1.0, 1.0, 2), (-0.5, 0.0, 2), (0.3, 0.5, 3)])
    def test_leading_and_q0(self, alpha, beta, d):
        fam = sobolev_family(alpha, beta, d, 2.0, 8)
        assert fam.q[0].coeffs.tolist() == pytest.approx([1.0])
        for j, q in enumerate(fam.q):
            assert q.leading == pytest.approx(jacobi_leading(JacobiParams(alpha, beta), j), rel=1e-12)

    @pytest.mark.parametrize("alpha,beta,d", [(1.0, 1.0, 2), (2.5, 2.5, 3), (-0.5, 1.0, 2)])
    def test_lambda_zero(self, alpha, beta, d):
        fam = sobolev_family(alpha, beta, d, 0.0, 10)
        for j in range(11):
            assert rel(fam.q[j], jacobi_coeffs((alpha, beta), j)) <= 1e-11
            assert fam.hhat[j] == pytest.approx(jacobi_norm_h((alpha, beta), j), rel=1e-11)

    @pytest.mark.parametrize("mu,beta,d", [(0.0, 1.0, 2), (1.5, 0.5, 3), (0.0, 0.0, 2)])
    @pytest.mark.parametrize("lam", [0.5, 3.0])
    def test_connection(self, mu, beta, d, lam):
        fam = sobolev_family(mu + 1, beta, d, lam, 8)
        for j in range(1, 9):
            a = jacobi_ab((mu, beta), j)[0]
            rhs = a * fam.q[j] + fam.d_j[j - 1] * fam.q[j - 1]
            assert rel(jacobi_coeffs((mu, beta), j), rhs) <= 1e-10

    def test_default_paths(self):
        assert sobolev_family(1.0, 1.0, 2, 1.0, 3).path == "recursive"
        assert sobolev_family(0.0, 1.0, 2, 1.0, 3).path == "gram_schmidt"
        with pytest.raises(ValueError):
            sobolev_family(-0.5, 1.0, 2, 1.0, 3, "recursive")

    def test_q_accessors_extend(self):
        fam = sobolev_family(1.0, 1.0, 2, 1.0, 2)
        q5 = q_poly(5, fam)
        assert q5.degree == 5
        assert q_norm(5, fam) == pytest.approx(sobolev1d_inner(q5, q5, fam), rel=1e-9)

    def test_norm_closed_form_j0(self):
        fam = sobolev_family(1.0, 1.0, 2, 0.6, 2)
        A = 2.0
        ref = jacobi_norm_h((1, 1), 0) + 2 * 0.6 * A * jacobi_norm_h((1, 0), 0)
        assert q_norm(0, fam) == pytest.approx(ref, rel=1e-13)

    def test_json(self):
        fam = sobolev_family(1.0, 1.0, 2, 0.5, 3)
        data = json.loads(fam.to_json())
        for key in ["alpha", "beta", "d", "lambda", "d_j", "r_j", "D_j", "q", "hhat"]:
            assert key in data
        assert data["d_j"][0] == pytest.approx(-1 / 8)
        gs = json.loads(sobolev_family(0.0, 1.0, 2, 0.5, 3).to_json())
        assert gs["d_j"] is None and len(gs["hhat"]) == 4

    def test_coherent_boundary_uses_reduced_form(self):
        fam = sobolev_family(1.0, 0.0, 2, 1.0, 4)
        f, g = Poly1D([0.2, 1.0, -0.4]), Poly1D([1.0, -0.3, 0.8])
        ref = (mpmath.quad(lambda t: f(float(t)) * g(float(t)) * (1 - t), [-1, 1])
               + 8 * mpmath.quad(lambda t: f.deriv()(float(t)) * g.deriv()(float(t)) * (1 - t) * (1 + t),
                                 [-1, 1]))
        assert sobolev1d_inner(f, g, fam) == pytest.approx(float(ref), rel=1e-12)


class TestRecursionLambdaFactor:
    """The closed-form recursions fit a derivative bracket weighted by lam, not 2 lam."""

    def test_factor_value(self):
        assert RECURSION_LAMBDA_FACTOR == 2.0

    @pytest.mark.parametrize("lam", [0.5, 1.0, 4.0])
    def test_norm_example(self, lam):
        # mu = 0, beta = 1, d = 2, j = 0
        b1 = jacobi_ab((0.0, 1.0), 1)[1]
        A0 = coeff_ABC(0, 0.0, 1.0, 2)[0]
        closed = lambda lr: b1 * jacobi_norm_h((1, 1), 0) / A0 * r_value(1, 0.0, 1.0, 2, lr)
        fam = sobolev_family(1.0, 1.0, 2, lam, 1, "gram_schmidt")
        direct = sobolev1d_inner(Poly1D([1.0]), Poly1D([1.0]), fam)
        assert closed(RECURSION_LAMBDA_FACTOR * lam) == pytest.approx(direct, rel=1e-13)
        assert abs(closed(lam) / direct - 1) > 0.1

    def test_literal_lambda_fails_orthogonality(self):
        literal = gram_schmidt_q(4, 2.0, 1.0, 2, 1.0)
        fam = sobolev_family(2.0, 1.0, 2, 0.5, 4, "recursive")
        # the recursion evaluated at 1.0 belongs to the form with lam = 0.5
        for j in range(5):
            assert rel(fam.q[j], sobolev_family(2.0, 1.0, 2, 0.5, 4, "gram_schmidt").q[j]) < 1e-12
        assert max(rel(fam.q[j], literal[0][j]) for j in range(2, 5)) > 1e-3

    def test_family_type(self):
        fam = sobolev_family(1.0, 1.0, 2, 0.25, 2)
        assert isinstance(fam, SobolevFamily1D)
        assert fam.recursion_lambda == 0.5
        assert fam.mu == 0.0 and not fam.coherent

    def test_gram_helper(self):
        fam = sobolev_family(1.0, 1.0, 2, 0.25, 2)
        G = sobolev1d_gram(list(fam.q), fam)
        np.testing.assert_allclose(G, fam.gram(), rtol=1e-15)
