"""Sparse polynomials on R^d and exact moment integration over the sphere and ball.

Every integrand met in this package is a polynomial times ``(1-|x|^2)**mu``,
so integrals reduce to monomial moments with closed Gamma/Beta forms. Two
evaluation routes are provided: term-by-term products (``*_inner``) and
moment-matrix Gram assembly (:func:`moment_gram`).
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from types import MappingProxyType

import numpy as np

from ._special import ball_constant, sphere_area

__all__ = [
    "MultiPoly", "poly_add", "poly_mul", "poly_scale", "poly_diff", "poly_laplacian",
    "glex_key", "monomials_of_degree",
    "sphere_monomial_moment", "ball_weighted_moment",
    "ball_inner_weighted", "sphere_inner", "ball_integral", "sphere_integral",
    "moment_gram", "BallForm",
]


def glex_key(exp):
    """Graded order: total degree ascending, then lexicographically descending."""
    return (sum(exp), tuple(-e for e in exp))


class MultiPoly:
    """Polynomial in ``dim`` variables stored as ``{exponent tuple: coefficient}``.

    Instances are immutable. Exact zeros are dropped after every operation;
    nothing else is thresholded.
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.dim or min(exp, default=0) < 0:
                raise ValueError(f"bad exponent {exp} for dim {self.dim}")
            c = float(c)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        self._terms = MappingProxyType({e: clean[e] for e in sorted(clean, key=glex_key)
                                        if clean[e] != 0.0})

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def constant(cls, dim, c=1.0):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim, i):
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): 1.0})

    @classmethod
    def monomial(cls, exp, c=1.0):
        return cls(len(exp), {tuple(exp): c})

    # inspection -----------------------------------------------------------
    @property
    def terms(self):
        return self._terms

    def items(self):
        return self._terms.items()

    @property
    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        return max((sum(e) for e in self._terms), default=0)

    @property
    def min_degree(self):
        return min((sum(e) for e in self._terms), default=0)

    def is_homogeneous(self):
        return self.is_zero or self.degree == self.min_degree

    def max_abs_coeff(self):
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def coeff(self, exp):
        return self._terms.get(tuple(exp), 0.0)

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.dim, other)
        self._check(other)
        out = dict(self._terms)
        for e, c in other.items():
            out[e] = out.get(e, 0.0) + c
        return MultiPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.dim, {e: -c for e, c in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            s = float(other)
            return MultiPoly(self.dim, {e: s * c for e, c in self.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.items():
            for e2, c2 in other.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPoly(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __pow__(self, k):
        out = MultiPoly.constant(self.dim)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.dim == other.dim and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.dim, tuple(self._terms.items())))

    def diff(self, i):
        """Partial derivative along axis ``i`` (0-based)."""
        if not 0 <= i < self.dim:
            raise ValueError(f"axis {i} out of range for dim {self.dim}")
        out = {}
        for e, c in self.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MultiPoly(self.dim, out)

    def gradient(self):
        return tuple(self.diff(i) for i in range(self.dim))

    def laplacian(self):
        out = {}
        for e, c in self.items():
            for i, k in enumerate(e):
                if k >= 2:
                    f = list(e)
                    f[i] -= 2
                    f = tuple(f)
                    out[f] = out.get(f, 0.0) + c * k * (k - 1)
        return MultiPoly(self.dim, out)

    # evaluation -----------------------------------------------------------
    def __call__(self, x):
        """Evaluate at points ``x`` of shape (..., dim)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"points have {x.shape[-1]} coordinates, expected {self.dim}")
        out = np.zeros(x.shape[:-1])
        if self.is_zero:
            return out if out.ndim else float(out)
        top = max(max(e) for e in self._terms)
        powers = [np.stack([x[..., i] ** k for k in range(top + 1)]) for i in range(self.dim)]
        for e, c in self.items():
            term = np.full(x.shape[:-1], c)
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            out = out + term
        return out if out.ndim else float(out)

    # serialisation ----------------------------------------------------------
    def to_dict(self):
        return {"dim": self.dim,
                "terms": [{"exp": list(e), "c": c} for e, c in self.items()]}

    @classmethod
    def from_dict(cls, data):
        return cls(data["dim"], {tuple(t["exp"]): t["c"] for t in data["terms"]})

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        body = " + ".join(f"{c:.6g}*x^{e}" for e, c in self.items()) or "0"
        return f"MultiPoly(dim={self.dim}: {body})"


def poly_add(p, q):
    return p + q


def poly_mul(p, q):
    return p * q


def poly_scale(p, s):
    return p * float(s)


def poly_diff(p, i):
    return p.diff(i)


def poly_laplacian(p):
    return p.laplacian()


@lru_cache(maxsize=None)
def monomials_of_degree(n, d):
    """All exponent tuples of total degree ``n`` in ``d`` variables, graded order."""
    def rec(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for k in range(remaining, -1, -1):
            for rest in rec(remaining - k, slots - 1):
                yield (k,) + rest
    return tuple(rec(n, d))


# moments --------------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_sphere_moment(exp, d):
    return (math.log(2.0) + sum(math.lgamma(0.5 * (e + 1)) for e in exp)
            - math.lgamma(0.5 * (sum(exp) + d)))


def sphere_monomial_moment(exp, d=None):
    """Integral of x**exp over S^{d-1} against surface measure."""
    exp = tuple(exp)
    d = len(exp) if d is None else d
    if len(exp) != d:
        raise ValueError("exponent length must equal d")
    if any(e % 2 for e in exp):
        return 0.0
    return math.exp(_log_sphere_moment(exp, d))


def _log_radial(k, mu, d):
    # log of int_0^1 r^{k+d-1} (1-r^2)^mu dr = B((k+d)/2, mu+1)/2
    a = 0.5 * (k + d)
    return math.lgamma(a) + math.lgamma(mu + 1) - math.lgamma(a + mu + 1) - math.log(2.0)


def ball_weighted_moment(exp, mu, d=None):
    """Integral of x**exp (1-|x|^2)**mu over the unit ball."""
    exp = tuple(exp)
    d = len(exp) if d is None else d
    if mu <= -1:
        raise ValueError(f"mu must exceed -1, got {mu}")
    if len(exp) != d:
        raise ValueError("exponent length must equal d")
    if any(e % 2 for e in exp):
        return 0.0
    return math.exp(_log_sphere_moment(exp, d) + _log_radial(sum(exp), mu, d))


def ball_integral(f, mu=0.0):
    """Integral of f W_mu over the ball."""
    return math.fsum(c * ball_weighted_moment(e, mu, f.dim) for e, c in f.items())


def sphere_integral(f):
    return math.fsum(c * sphere_monomial_moment(e, f.dim) for e, c in f.items())


def ball_inner_weighted(f, g, mu):
    """Normalised weighted product  b_mu * int f g W_mu."""
    if mu <= -1:
        raise ValueError(f"mu must exceed -1, got {mu}")
    f._check(g)
    return ball_constant(mu, f.dim) * ball_integral(f * g, mu)


def sphere_inner(f, g):
    """Surface-averaged product (1/omega_d) int_S f g."""
    f._check(g)
    return sphere_integral(f * g) / sphere_area(f.dim)


def _moment_fn(weight, d):
    if weight == "sphere":
        return lambda e: (0.0 if any(k % 2 for k in e)
                          else math.exp(_log_sphere_moment(e, d)))
    mu = float(weight)
    if mu <= -1:
        raise ValueError(f"mu must exceed -1, got {mu}")
    return lambda e: (0.0 if any(k % 2 for k in e)
                      else math.exp(_log_sphere_moment(e, d) + _log_radial(sum(e), mu, d)))


def _coefficient_matrix(polys, index):
    A = np.zeros((len(polys), len(index)))
    for r, p in enumerate(polys):
        for e, c in p.items():
            A[r, index[e]] = c
    return A


def moment_gram(fs, gs, weight):
    """Matrix of integrals  [int f_i g_j]  assembled from a moment matrix.

    ``weight`` is ``"sphere"`` for surface integrals over S^{d-1}, or a real
    ``mu`` for ball integrals against (1-|x|^2)**mu. Inputs may be MultiPoly
    or tuples of MultiPoly; tuples are contracted componentwise (dot products
    of gradients).
    """
    fs, gs = list(fs), list(gs)
    if not fs or not gs:
        return np.zeros((len(fs), len(gs)))
    vector = isinstance(fs[0], (tuple, list))
    fcomp = [list(f) if vector else [f] for f in fs]
    gcomp = [list(g) if vector else [g] for g in gs]
    d = fcomp[0][0].dim
    ncomp = len(fcomp[0])
    exps_f = sorted({e for f in fcomp for p in f for e in p.terms}, key=glex_key)
    exps_g = sorted({e for g in gcomp for p in g for e in p.terms}, key=glex_key)
    if not exps_f or not exps_g:
        return np.zeros((len(fs), len(gs)))
    moment = _moment_fn(weight, d)
    cache = {}
    M = np.empty((len(exps_f), len(exps_g)))
    for a, ea in enumerate(exps_f):
        for b, eb in enumerate(exps_g):
            e = tuple(x + y for x, y in zip(ea, eb))
            v = cache.get(e)
            if v is None:
                v = cache[e] = moment(e)
            M[a, b] = v
    fi = {e: k for k, e in enumerate(exps_f)}
    gi = {e: k for k, e in enumerate(exps_g)}
    out = np.zeros((len(fs), len(gs)))
    for c in range(ncomp):
        A = _coefficient_matrix([f[c] for f in fcomp], fi)
        B = _coefficient_matrix([g[c] for g in gcomp], gi)
        out += A @ M @ B.T
    return out


class BallForm:
    r"""Symmetric bilinear form on polynomials over the ball,

    .. math::

        c_v \int_B f g W_{\mu_v} + c_g \int_B \nabla f\cdot\nabla g\, W_{\mu_g}
        + c_s \int_{S^{d-1}} f g\, d\sigma .

    ``value`` and ``grad`` are ``(coefficient, mu)`` pairs or ``None``; the
    coefficients multiply raw integrals, so normalising constants are folded
    in by the caller.
    """

    def __init__(self, value=None, grad=None, sphere=0.0):
        self.value = value
        self.grad = grad
        self.sphere = float(sphere)

    def __repr__(self):
        return f"BallForm(value={self.value}, grad={self.grad}, sphere={self.sphere})"

    @staticmethod
    def _grad(f):
        grad = getattr(f, "gradient", None)
        return grad if isinstance(grad, tuple) else f.gradient()

    @staticmethod
    def _poly(f):
        return f.expanded if hasattr(f, "expanded") else f

    def pair(self, f, g):
        """Term-by-term evaluation on two functions."""
        fp, gp = self._poly(f), self._poly(g)
        fp._check(gp)
        total = 0.0
        if self.value is not None:
            c, mu = self.value
            total += c * ball_integral(fp * gp, mu)
        if self.grad is not None:
            c, mu = self.grad
            dot = MultiPoly.zero(fp.dim)
            for a, b in zip(self._grad(f), self._grad(g)):
                dot = dot + a * b
            total += c * ball_integral(dot, mu)
        if self.sphere:
            total += self.sphere * sphere_integral(fp * gp)
        return total

    def gram(self, fs, gs=None):
        """Gram matrix through :func:`moment_gram`."""
        gs = fs if gs is None else gs
        fp = [self._poly(f) for f in fs]
        gp = [self._poly(g) for g in gs]
        out = np.zeros((len(fp), len(gp)))
        if self.value is not None:
            c, mu = self.value
            out += c * moment_gram(fp, gp, mu)
        if self.grad is not None:
            c, mu = self.grad
            out += c * moment_gram([self._grad(f) for f in fs],
                                   [self._grad(g) for g in gs], mu)
        if self.sphere:
            out += self.sphere * moment_gram(fp, gp, "sphere")
        return out
