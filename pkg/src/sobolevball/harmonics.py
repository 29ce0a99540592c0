"""Orthonormal spherical harmonics as explicit Cartesian polynomials.

A basis of H_n^d is produced by projecting the degree-n monomials onto the
harmonic subspace and orthonormalising the projections under the surface
average on S^{d-1}. The result is deterministic for fixed (n, d).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from ._special import sphere_area
from .multipoly import MultiPoly, monomials_of_degree, moment_gram

__all__ = [
    "HarmonicBasis", "harmonic_dim", "harmonic_projection", "harmonic_basis",
    "rsq_power", "spherical_gradient", "laplace_beltrami", "RANK_TOL",
]

RANK_TOL = 1e-8


@dataclass(frozen=True)
class HarmonicBasis:
    degree: int
    dim: int
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def to_dict(self):
        return {"n": self.degree, "d": self.dim,
                "elements": [Y.to_dict() for Y in self.elements]}


def harmonic_dim(n, d):
    """dim H_n^d computed as dim P_n^d - dim P_{n-2}^d."""
    if n < 0 or d < 2:
        raise ValueError("need n >= 0 and d >= 2")
    return comb(n + d - 1, n) - (comb(n + d - 3, n - 2) if n >= 2 else 0)


@lru_cache(maxsize=None)
def rsq_power(k, d):
    """The polynomial |x|^{2k} in d variables."""
    if k == 0:
        return MultiPoly.constant(d)
    rsq = MultiPoly(d, {tuple(2 if i == j else 0 for i in range(d)): 1.0 for j in range(d)})
    return rsq_power(k - 1, d) * rsq


def harmonic_projection(p):
    """Harmonic component of a homogeneous polynomial.

    Uses h = sum_k c_k |x|^{2k} Lap^k p with c_0 = 1 and
    c_{k+1} = -c_k / (2 (k+1) (2n + d - 4 - 2k)).
    """
    if not p.is_homogeneous():
        raise ValueError("harmonic projection needs a homogeneous polynomial")
    n, d = p.degree, p.dim
    out = p
    lap = p
    c = 1.0
    for k in range(n // 2):
        lap = lap.laplacian()
        if lap.is_zero:
            break
        c = -c / (2 * (k + 1) * (2 * n + d - 4 - 2 * k))
        out = out + c * (rsq_power(k + 1, d) * lap)
    return out


def _orthonormalise(cands, G, tol):
    """Modified Gram-Schmidt with one re-orthogonalisation pass, G-inner product."""
    basis, Gbasis = [], []
    for v in cands:
        nrm = np.sqrt(v @ G @ v)
        if nrm == 0:
            continue
        v = v / nrm
        for _ in range(2):
            for b, Gb in zip(basis, Gbasis):
                v = v - (Gb @ v) * b
        res = np.sqrt(max(v @ G @ v, 0.0))
        if res < tol:
            continue
        v = v / res
        basis.append(v)
        Gbasis.append(G @ v)
    return basis


def _build(n, d, tol):
    exps = monomials_of_degree(n, d)
    monos = [MultiPoly.monomial(e) for e in exps]
    G = moment_gram(monos, monos, "sphere") / sphere_area(d)
    index = {e: i for i, e in enumerate(exps)}
    cands = []
    for m in monos:
        h = harmonic_projection(m)
        v = np.zeros(len(exps))
        for e, c in h.items():
            v[index[e]] = c
        cands.append(v)
    vecs = _orthonormalise(cands, G, tol)
    return tuple(MultiPoly(d, {e: v[i] for i, e in enumerate(exps)}) for v in vecs)


@lru_cache(maxsize=None)
def harmonic_basis(n, d) -> HarmonicBasis:
    """Orthonormal basis of H_n^d under the normalised surface measure."""
    if n < 0 or d < 2:
        raise ValueError("need n >= 0 and d >= 2")
    elements = _build(n, d, RANK_TOL)
    if len(elements) != harmonic_dim(n, d):
        raise RuntimeError(
            f"rank {len(elements)} disagrees with dim H_{n}^{d} = {harmonic_dim(n, d)}")
    return HarmonicBasis(n, d, elements)


def harmonic_rank(n, d, tol=RANK_TOL):
    """Number of independent harmonic projections of degree-n monomials."""
    return len(_build(n, d, tol))


def _degree_of_homogeneous(p):
    if not p.is_homogeneous():
        raise ValueError("operator requires a homogeneous polynomial")
    return p.degree


def spherical_gradient(p):
    """Polynomial representative of the tangential gradient on the sphere.

    For p homogeneous of degree n this is grad p - n x p, which agrees with the
    spherical gradient at every point of S^{d-1}.
    """
    n = _degree_of_homogeneous(p)
    d = p.dim
    return tuple(p.diff(i) - n * (MultiPoly.variable(d, i) * p) for i in range(d))


def laplace_beltrami(p):
    """Polynomial representative of the Laplace-Beltrami operator on the sphere.

    Returns |x|^2 Lap p - n (n+d-2) p, homogeneous of the same degree as p.
    """
    n = _degree_of_homogeneous(p)
    d = p.dim
    return rsq_power(1, d) * p.laplacian() - n * (n + d - 2) * p
