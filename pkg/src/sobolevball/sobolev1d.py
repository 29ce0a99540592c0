"""One-variable Sobolev orthogonal polynomials q_j^{(alpha, beta)}.

The inner product is

    (f, g) = int f g w_{a,b}
             + 2 lam int (f, f') M(t) (g, g')^T w_{a,b-1},

    M(t) = [[A, B (1+t)], [B (1+t), 4 (1+t)^2]],  A = beta B,  B = 2 beta - (d-2),

with ``w_{a,b}(t) = (1-t)^a (1+t)^b``. Families are indexed by the target pair
``(alpha, beta)``; the recursive coefficients are written in terms of
``mu = alpha - 1``.

Integrals are evaluated exactly from Beta-function moments in extended
precision (mpmath), since the monomial expansions involved cancel heavily.

The companion polynomials r_j carry a common factor ``mu + beta`` for j >= 1,
which vanishes at ``(alpha, beta) = (1, 0)``. Internally they are stored
divided by that factor ("hatted"); every quantity built from ratios of r's is
unchanged by the rescaling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from mpmath.ctx_mp import MPContext

from ._special import pochhammer
from .jacobi import JacobiParams, Poly1D, jacobi_ab, jacobi_coeffs, jacobi_leading, jacobi_norm_h

__all__ = [
    "SobolevFamily1D", "sobolev_family", "sobolev1d_inner", "sobolev1d_gram",
    "coeff_ABC", "r_value", "r_hat", "d_value", "D_value", "q_poly", "q_norm",
    "gram_schmidt_q", "weight_matrix", "weight_matrix_det", "is_coherent",
    "check_family_params", "RECURSION_LAMBDA_FACTOR",
]

_MP = MPContext()
_MP.dps = 60

#: The d_j / r_j / norm recursions, taken literally, describe the form whose
#: derivative bracket carries lam rather than 2 lam. A family with form
#: parameter lam therefore evaluates them at RECURSION_LAMBDA_FACTOR * lam;
#: the Gram-Schmidt oracle fixes the factor and the tests assert it.
RECURSION_LAMBDA_FACTOR = 2.0


def is_coherent(beta, d):
    """True on the boundary beta = (d-2)/2, where A(beta,d) = B(beta,d) = 0."""
    return 2 * beta - (d - 2) == 0


def check_family_params(alpha, beta, d, lam):
    if not alpha > -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if beta < 0 or 2 * beta < d - 2:
        raise ValueError(f"beta={beta} violates beta >= max(0, (d-2)/2) for d={d}")


def _AB(beta, d):
    B = 2 * beta - (d - 2)
    return beta * B, B


def weight_matrix(t, beta, d):
    """The 2x2 matrix M(t) of the derivative term."""
    A, B = _AB(beta, d)
    s = 1.0 + np.asarray(t, dtype=float)
    return np.array([[np.full_like(s, A), B * s], [B * s, 4 * s * s]])


def weight_matrix_det(t, beta, d):
    """det M(t) = (1+t)^2 B (2 beta + d - 2)."""
    _, B = _AB(beta, d)
    s = 1.0 + np.asarray(t, dtype=float)
    return s * s * B * (2 * beta + d - 2)


# ---------------------------------------------------------------------------
# exact 1-D integration

@lru_cache(maxsize=None)
def _moment(k, a, b):
    """int_{-1}^1 t^k (1-t)^a (1+t)^b dt via t = 2u - 1."""
    mp = _MP
    a, b = mp.mpf(a), mp.mpf(b)
    total = mp.mpf(0)
    for i in range(k + 1):
        term = mp.binomial(k, i) * mp.power(2, i) * mp.beta(b + i + 1, a + 1)
        total += term if (k - i) % 2 == 0 else -term
    return mp.power(2, a + b + 1) * total


def _mp_coeffs(p):
    if isinstance(p, Poly1D):
        return [_MP.mpf(float(c)) for c in p.coeffs]
    return list(p)


def _mul(f, g):
    if not f or not g:
        return []
    out = [_MP.mpf(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def _deriv(f):
    return [k * f[k] for k in range(1, len(f))]


def _integrate(f, a, b):
    return _MP.fsum(c * _moment(k, a, b) for k, c in enumerate(f) if c)


def _inner_mp(f, g, alpha, beta, d, lam):
    A, B = _AB(beta, d)
    fg = _mul(f, g)
    out = _integrate(fg, alpha, beta)
    if lam:
        df, dg = _deriv(f), _deriv(g)
        extra = 4 * _integrate(_mul(df, dg), alpha, beta + 1)
        if B:
            extra += A * _integrate(fg, alpha, beta - 1) + B * _integrate(_deriv(fg), alpha, beta)
        out += 2 * _MP.mpf(lam) * extra
    return out


def sobolev1d_inner(f, g, fam):
    """(f, g)_{alpha,beta} for Poly1D ``f, g`` under the parameters of ``fam``.

    On the boundary beta = (d-2)/2 only the value term and the 8 lam f'g'
    term survive, so the w_{alpha, beta-1} moment is never formed.
    """
    return float(_inner_mp(_mp_coeffs(f), _mp_coeffs(g), fam.alpha, fam.beta, fam.d, fam.lam))


def sobolev1d_gram(polys, fam):
    """Gram matrix of a list of Poly1D under ``fam``'s inner product."""
    cs = [_mp_coeffs(p) for p in polys]
    n = len(cs)
    G = np.empty((n, n))
    for i in range(n):
        for k in range(i, n):
            G[i, k] = G[k, i] = float(_inner_mp(cs[i], cs[k], fam.alpha, fam.beta, fam.d, fam.lam))
    return G


# ---------------------------------------------------------------------------
# recursive coefficients (arguments use mu = alpha - 1)

def _nonzero(value, what):
    if value == 0:
        raise ValueError(f"degenerate denominator: {what} vanishes")
    return value


def coeff_ABC(j, mu, beta, d):
    """(A_j, B_j, C_j) of the recursion for d_j and r_j, including the j = 0 specials."""
    s = mu + beta
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        den = _nonzero((s + 2) * (s + 3), "(mu+beta+2)(mu+beta+3)")
        A = (mu + 1) * (beta + 1) * s / den
        B = (mu + 1) * s / _nonzero(s + 2, "mu+beta+2")
        C = (mu + 1) * s * (2 * beta - (d - 2)) / 2
        return A, B, C
    den = _nonzero(j * (2 * j + s + 1) * (2 * j + s + 2) * (2 * j + s + 3),
                   "j(2j+mu+beta+1)(2j+mu+beta+2)(2j+mu+beta+3)")
    A = (j + s + 1) * (j + mu + 1) * (j + beta + 1) * (2 * j + s) / den
    B = 1 + s * (j + mu + 1) / _nonzero(j * (2 * j + s + 2), "j(2j+mu+beta+2)")
    C = (2 * j + s) * ((mu + 1) * (2 * beta - (d - 2)) + 4 * j * (j + s + 1)) / (2 * j)
    return A, B, C


def _hat_ABC(j, mu, beta, d):
    # j = 0 constants with the common factor mu + beta removed
    if j == 0:
        s = mu + beta
        return ((mu + 1) * (beta + 1) / ((s + 2) * (s + 3)),
                (mu + 1) / (s + 2),
                (mu + 1) * (2 * beta - (d - 2)) / 2)
    return coeff_ABC(j, mu, beta, d)


def _r_hat_sequence(jmax, mu, beta, d, lam):
    """[r^_0, ..., r^_jmax] with r^_0 = 1 and r^_j = r_j / (mu+beta) for j >= 1."""
    out = [1.0]
    if jmax >= 1:
        _, B0, C0 = _hat_ABC(0, mu, beta, d)
        out.append(C0 * lam + B0)
    for j in range(1, jmax):
        Aprev = _hat_ABC(j - 1, mu, beta, d)[0]
        _, B, C = coeff_ABC(j, mu, beta, d)
        out.append((C * lam + B) * out[j] - Aprev * out[j - 1])
    return out


def r_hat(j, mu, beta, d, lam):
    return _r_hat_sequence(j, mu, beta, d, lam)[j]


def r_value(j, mu, beta, d, lam):
    """r_j(lam) from the three-term recursion; must be positive."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    r = r_hat(j, mu, beta, d, lam) * (1.0 if j == 0 else mu + beta)
    if not r > 0:
        raise ValueError(
            f"r_{j}={r} is not positive for mu={mu}, beta={beta}, d={d}, lambda={lam}; "
            "parameters fall outside the admissible range")
    return r


def d_value(j, mu, beta, d, lam, method="ratio"):
    """d_j(lam). ``method='ratio'`` uses -A_j r_j / r_{j+1}; ``'fraction'`` the continued fraction."""
    if j < -1:
        raise ValueError("j must be >= -1")
    if j == -1:
        return 0.0
    if method == "ratio":
        r = _r_hat_sequence(j + 1, mu, beta, d, lam)
        A = _hat_ABC(j, mu, beta, d)[0]
        return -A * r[j] / _nonzero(r[j + 1], f"r_{j + 1}")
    if method == "fraction":
        val = -(beta + 1) / _nonzero(
            (mu + beta + 3) * (1 + lam * (mu + beta + 2) * (beta - (d - 2) / 2)), "d_0 denominator")
        for k in range(1, j + 1):
            A, B, C = coeff_ABC(k, mu, beta, d)
            val = -A / _nonzero(B + lam * C + val, f"d_{k} denominator")
        return val
    raise ValueError(f"unknown method {method!r}")


def D_value(j, mu, beta):
    """The constant D_j of the Jacobi expansion of q_j."""
    s = mu + beta
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return s * (s + 1)
    return (2 ** j * (j + s + 1) * (2 * j + s) * pochhammer((s + 1) / 2, j) * math.factorial(j - 1)
            / (pochhammer(mu + 1, j) * pochhammer(beta + 1, j)))


def _D_hat(j, mu, beta):
    return mu + beta + 1 if j == 0 else D_value(j, mu, beta)


# ---------------------------------------------------------------------------
# the family

def gram_schmidt_q(jmax, alpha, beta, d, lam):
    """q_0..q_jmax and their norms by Gram-Schmidt on monomials in extended precision.

    Modified Gram-Schmidt with a second orthogonalisation pass; each result is
    rescaled to the Jacobi leading coefficient.
    """
    mp = _MP
    N = jmax + 1
    mono = [[mp.mpf(0)] * k + [mp.mpf(1)] for k in range(N)]
    G = [[_inner_mp(mono[i], mono[k], alpha, beta, d, lam) for k in range(N)] for i in range(N)]

    def ip(u, v):
        return mp.fsum(u[i] * G[i][k] * v[k] for i in range(len(u)) for k in range(len(v)) if u[i] and v[k])

    basis, norms = [], []
    for k in range(N):
        v = [mp.mpf(0)] * k + [mp.mpf(1)]
        for _ in range(2):
            for u, nu in zip(basis, norms):
                c = ip(u, v) / nu
                v = [vi - c * (u[i] if i < len(u) else 0) for i, vi in enumerate(v)]
        basis.append(v)
        norms.append(ip(v, v))
    qs, hs = [], []
    for k, (v, nv) in enumerate(zip(basis, norms)):
        lead = mp.mpf(jacobi_leading(JacobiParams.relaxed(alpha, beta), k))
        qs.append(Poly1D([float(lead * c) for c in v]))
        hs.append(float(lead * lead * nv))
    return qs, hs


@dataclass(frozen=True, eq=False)
class SobolevFamily1D:
    """Sobolev orthogonal polynomials q_0..q_jmax for target parameters (alpha, beta).

    With ``path='recursive'`` (needs alpha > 0) the polynomials come from the
    Jacobi expansion with r- and D-weights and the norms from the r-ratio
    formula; ``path='gram_schmidt'`` orthogonalises monomials directly.
    ``d_j``, ``r_hat`` and ``D_j`` are populated only on the recursive path,
    where they are evaluated at :attr:`recursion_lambda`.
    """

    alpha: float
    beta: float
    d: int
    lam: float
    jmax: int
    path: str
    q: tuple
    hhat: tuple
    d_j: tuple = ()
    r_hat: tuple = ()
    D_j: tuple = ()

    @property
    def mu(self):
        return self.alpha - 1

    @property
    def recursion_lambda(self):
        return RECURSION_LAMBDA_FACTOR * self.lam

    @property
    def coherent(self):
        return is_coherent(self.beta, self.d)

    def r_j(self):
        """Literal r_j values (the hatted ones times mu+beta for j >= 1)."""
        return tuple(r * (1.0 if j == 0 else self.mu + self.beta) for j, r in enumerate(self.r_hat))

    def inner(self, f, g):
        return sobolev1d_inner(f, g, self)

    def gram(self, polys=None):
        return sobolev1d_gram(self.q if polys is None else polys, self)

    def to_dict(self):
        recursive = self.path == "recursive"
        return {"alpha": self.alpha, "beta": self.beta, "d": self.d, "lambda": self.lam,
                "recursion_lambda": self.recursion_lambda, "path": self.path,
                "d_j": list(self.d_j) if recursive else None,
                "r_j": list(self.r_j()) if recursive else None,
                "r_hat": list(self.r_hat) if recursive else None,
                "D_j": list(self.D_j) if recursive else None,
                "q": [p.coeffs.tolist() for p in self.q],
                "hhat": list(self.hhat)}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _build_recursive(alpha, beta, d, lam, jmax):
    mu = alpha - 1
    jb = JacobiParams(mu, beta)
    rh = _r_hat_sequence(jmax + 1, mu, beta, d, RECURSION_LAMBDA_FACTOR * lam)
    if min(rh) <= 0:
        raise ValueError(f"nonpositive r value for alpha={alpha}, beta={beta}, d={d}, lambda={lam}")
    a = [jacobi_ab(jb, i)[0] for i in range(jmax + 1)]
    Dh = [_D_hat(i, mu, beta) for i in range(jmax + 1)]
    P = [jacobi_coeffs(jb, i) for i in range(jmax + 1)]
    qs, acc = [], Poly1D()
    for j in range(jmax + 1):
        acc = acc + (Dh[j] / a[j] * rh[j]) * P[j]
        qs.append(acc / (Dh[j] * rh[j]))
    target = JacobiParams(alpha, beta)
    hh = []
    for j in range(jmax + 1):
        A = _hat_ABC(j, mu, beta, d)[0]
        b_next = jacobi_ab(jb, j + 1)[1]
        hh.append(b_next * jacobi_norm_h(target, j) / A * rh[j + 1] / rh[j])
    dj = [-_hat_ABC(j, mu, beta, d)[0] * rh[j] / rh[j + 1] for j in range(jmax + 1)]
    D = [D_value(j, mu, beta) for j in range(jmax + 1)]
    return SobolevFamily1D(alpha, beta, d, lam, jmax, "recursive", tuple(qs), tuple(hh),
                           tuple(dj), tuple(rh[: jmax + 1]), tuple(D))


@lru_cache(maxsize=256)
def sobolev_family(alpha, beta, d, lam, jmax=10, path=None):
    """Build (and cache) the family; ``path`` defaults to recursive when alpha > 0."""
    alpha, beta, lam = float(alpha), float(beta), float(lam)
    check_family_params(alpha, beta, d, lam)
    if jmax < 0:
        raise ValueError("jmax must be nonnegative")
    path = path or ("recursive" if alpha > 0 else "gram_schmidt")
    if path == "recursive":
        if not alpha > 0:
            raise ValueError("the recursive path needs alpha > 0")
        return _build_recursive(alpha, beta, d, lam, jmax)
    if path == "gram_schmidt":
        qs, hs = gram_schmidt_q(jmax, alpha, beta, d, lam)
        return SobolevFamily1D(alpha, beta, d, lam, jmax, path, tuple(qs), tuple(hs))
    raise ValueError(f"unknown path {path!r}")


def _family_for(j, fam):
    if j <= fam.jmax:
        return fam
    return sobolev_family(fam.alpha, fam.beta, fam.d, fam.lam, j, fam.path)


def q_poly(j, fam):
    """q_j^{(alpha, beta)} as a Poly1D."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return _family_for(j, fam).q[j]


def q_norm(j, fam):
    """(q_j, q_j)_{alpha, beta} from the closed form (or the Gram-Schmidt norm)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    return _family_for(j, fam).hhat[j]
