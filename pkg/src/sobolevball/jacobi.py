"""Univariate polynomials and the Jacobi family.

Everything here is a pure function of immutable inputs. Polynomials are held
in the monomial basis; Jacobi polynomials are generated by the three-term
recurrence in the degree, both for pointwise values and for coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._special import log_gamma

__all__ = [
    "MAX_DEGREE", "Poly1D", "JacobiParams",
    "jacobi_eval", "jacobi_coeffs", "jacobi_norm_h", "jacobi_leading",
    "jacobi_ab", "jacobi_deriv",
]

MAX_DEGREE = 512


class Poly1D:
    """Real polynomial in one variable, ``coeffs[k]`` multiplying ``t**k``.

    Only exact zeros are trimmed from the top, so the stored trailing
    coefficient is nonzero unless the polynomial is zero (empty ``coeffs``).
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=float).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return max(len(self._c) - 1, 0)

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 0

    @property
    def leading(self) -> float:
        return float(self._c[-1]) if len(self._c) else 0.0

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def identity(cls):
        return cls([0.0, 1.0])

    def __call__(self, t):
        # Horner
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for c in self._c[::-1]:
            out = out * t + c
        return out if out.ndim else float(out)

    def _coerce(self, other):
        if isinstance(other, Poly1D):
            return other
        return Poly1D([float(other)])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self._c), len(o._c))
        out = np.zeros(n)
        out[: len(self._c)] += self._c
        out[: len(o._c)] += o._c
        return Poly1D(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly1D(-self._c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly1D):
            if self.is_zero or other.is_zero:
                return Poly1D()
            return Poly1D(np.convolve(self._c, other._c))
        return Poly1D(self._c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Poly1D(self._c / float(scalar))

    def deriv(self) -> "Poly1D":
        if len(self._c) <= 1:
            return Poly1D()
        return Poly1D(self._c[1:] * np.arange(1, len(self._c)))

    def compose_affine(self, a: float, b: float) -> "Poly1D":
        """Return the polynomial ``t -> self(a*t + b)``."""
        out = Poly1D()
        lin = Poly1D([b, a])
        for c in self._c[::-1]:
            out = out * lin + c
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly1D):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"Poly1D({self._c.tolist()!r})"


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi parameter pair.

    The default constructor enforces ``alpha, beta > -1`` so that the weight
    ``(1-t)**alpha (1+t)**beta`` is integrable. :meth:`relaxed` accepts any
    real pair for algebraic use only; norm and weight operations refuse it.
    """

    alpha: float
    beta: float
    classical: bool = True

    def __post_init__(self):
        if self.classical and not (self.alpha > -1 and self.beta > -1):
            raise ValueError(
                f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta}); "
                "use JacobiParams.relaxed for algebraic use")

    @classmethod
    def relaxed(cls, alpha, beta):
        return cls(float(alpha), float(beta), classical=False)


def _params(p) -> JacobiParams:
    if isinstance(p, JacobiParams):
        return p
    alpha, beta = p
    return JacobiParams(float(alpha), float(beta))


def _check_degree(n):
    if n != int(n) or n < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {n}")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the supported maximum {MAX_DEGREE}")
    return int(n)


def _recurrence(alpha, beta, k):
    """Coefficients with ``D P_k = (A t + B) P_{k-1} - C P_{k-2}`` for k >= 2."""
    s = 2 * k + alpha + beta
    D = 2 * k * (k + alpha + beta) * (s - 2)
    if D == 0:
        raise ValueError(
            f"three-term recurrence degenerates at degree {k} for ({alpha}, {beta})")
    A = (s - 1) * s * (s - 2)
    B = (s - 1) * (alpha * alpha - beta * beta)
    C = 2 * (k + alpha - 1) * (k + beta - 1) * s
    return A / D, B / D, C / D


def jacobi_eval(p, n, t):
    """Evaluate P_n^{(alpha, beta)} at ``t`` (scalar or array)."""
    p = _params(p)
    n = _check_degree(n)
    a, b = p.alpha, p.beta
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = (a + 1) + 0.5 * (a + b + 2) * (t - 1)
    for k in range(2, n + 1):
        A, B, C = _recurrence(a, b, k)
        prev, cur = cur, (A * t + B) * cur - C * prev
    return cur if cur.ndim else float(cur)


def jacobi_coeffs(p, n) -> Poly1D:
    """Monomial coefficients of P_n^{(alpha, beta)} from the same recurrence."""
    p = _params(p)
    n = _check_degree(n)
    a, b = p.alpha, p.beta
    prev = np.zeros(n + 1)
    prev[0] = 1.0
    if n == 0:
        return Poly1D(prev)
    cur = np.zeros(n + 1)
    cur[0] = (a + 1) - 0.5 * (a + b + 2)
    cur[1] = 0.5 * (a + b + 2)
    for k in range(2, n + 1):
        A, B, C = _recurrence(a, b, k)
        nxt = B * cur - C * prev
        nxt[1:] += A * cur[:-1]
        prev, cur = cur, nxt
    return Poly1D(cur)


def jacobi_norm_h(p, n) -> float:
    r"""Squared norm :math:`\int_{-1}^1 P_n^2 (1-t)^\alpha (1+t)^\beta dt`."""
    p = _params(p)
    n = _check_degree(n)
    if not p.classical:
        raise ValueError("norm is defined only for classical parameters (alpha, beta > -1)")
    a, b = p.alpha, p.beta
    if n == 0:
        logh = (a + b + 1) * math.log(2) + log_gamma(a + 1) + log_gamma(b + 1) - log_gamma(a + b + 2)
    else:
        logh = ((a + b + 1) * math.log(2) - math.log(2 * n + a + b + 1)
                + log_gamma(n + a + 1) + log_gamma(n + b + 1)
                - log_gamma(n + 1) - log_gamma(n + a + b + 1))
    return math.exp(logh)


def jacobi_leading(p, n) -> float:
    """Leading coefficient binom(2n+alpha+beta, n) / 2**n, as a finite product."""
    p = _params(p)
    n = _check_degree(n)
    out = 1.0
    for i in range(1, n + 1):
        out *= (n + p.alpha + p.beta + i) / (2.0 * i)
    return out


def jacobi_ab(p, n):
    """Connection coefficients (a_n, b_n) lowering the first parameter by one."""
    p = _params(p)
    n = _check_degree(n)
    a, b = p.alpha, p.beta
    den = 2 * n + a + b + 1
    if den == 0:
        raise ValueError(f"2n+alpha+beta+1 vanishes for n={n}, ({a}, {b})")
    return (n + a + b + 1) / den, (n + b) / den


def jacobi_deriv(p, n) -> Poly1D:
    """d/dt P_n^{(alpha, beta)}; the zero polynomial when n == 0."""
    return jacobi_coeffs(p, n).deriv()
