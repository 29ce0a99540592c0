"""Numerical certification of every identity the package relies on.

Each ``check_*`` function evaluates one group of claims on a parameter grid
against the exact-moment oracle and returns a :class:`CheckResult`. The
``desk`` preset pins the full acceptance grids; ``quick`` is a reduced
version for smoke testing.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import ball_classical as bc
from . import sobolev1d as s1
from . import sobolev_ball as sb
from ._special import log_pochhammer, sphere_area
from .harmonics import harmonic_basis, harmonic_dim, harmonic_rank, spherical_gradient
from .jacobi import JacobiParams, Poly1D, jacobi_ab, jacobi_coeffs, jacobi_deriv, jacobi_norm_h
from .multipoly import MultiPoly, ball_integral, moment_gram, monomials_of_degree

__all__ = ["CheckResult", "DEFAULT_TOLERANCES", "PRESETS", "CHECKS", "run_checks", "format_result"]

DEFAULT_TOLERANCES = {
    "jacobi": 1e-11,
    "harmonic": 1e-10,
    "classical_offdiag": 1e-10,
    "classical_diag": 1e-10,
    "eigen": 1e-9,
    "gradient_offdiag": 1e-9,
    "kappa": 1e-10,
    "cor23": 1e-10,
    "q_vs_gs": 1e-8,
    "d_paths": 1e-12,
    "lambda0": 1e-11,
    "norm_qj": 1e-9,
    "U": 1e-10,
    "Q_offdiag": 1e-9,
    "Q0_norm": 1e-9,
    "decomp": 1e-9,
    "limit": 1e-4,
    "R_offdiag": 1e-9,
    "R_diag": 1e-8,
    "R_lambda0": 1e-9,
    "cor53": 1e-9,
    "green": 1e-10,
}

PRESETS = {
    "desk": dict(jac_nmax=20, jac_random=8, harm_nmax=4, rank_nmax=6, rank_dmax=5,
                 nmax=6, dims=(2, 3), mus=(-0.5, 0.0, 1.5), jmax1d=10, d_jmax=15,
                 alphas=(0.5, 1.0, 2.5), lams1d=(0.1, 1.0, 10.0), lams=(0.5, 2.0),
                 R_mus=(0.0, 1.5), green_trials=6),
    "quick": dict(jac_nmax=8, jac_random=2, harm_nmax=2, rank_nmax=3, rank_dmax=3,
                  nmax=3, dims=(2,), mus=(0.0, 1.5), jmax1d=4, d_jmax=6,
                  alphas=(1.0,), lams1d=(1.0,), lams=(0.5,),
                  R_mus=(1.5,), green_trials=2),
}

#: Wall-clock budgets in seconds, per check.
RUNTIME_LIMITS = {"C1": 5.0, "C2": 30.0, "C3": 60.0, "C5": 20.0, "C7": 120.0}


@dataclass
class CheckResult:
    key: str
    title: str
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0
    limit: float | None = None
    notes: list = field(default_factory=list)
    error: str | None = None

    def record(self, name, value, tol):
        prev = self.metrics.get(name)
        value = float(value)
        if prev is None or value > prev[0]:
            self.metrics[name] = (value, tol)

    @property
    def passed(self):
        if self.error:
            return False
        if self.limit is not None and self.elapsed > self.limit:
            return False
        return all(v <= t for v, t in self.metrics.values())

    def to_dict(self):
        return {"key": self.key, "title": self.title, "passed": self.passed,
                "elapsed": self.elapsed, "limit": self.limit, "error": self.error,
                "metrics": {k: {"value": v, "tol": t} for k, (v, t) in self.metrics.items()},
                "notes": list(self.notes)}


def format_result(r: CheckResult) -> str:
    status = "PASS" if r.passed else "FAIL"
    parts = [f"{k}={v:.2e}/{t:.0e}" for k, (v, t) in r.metrics.items()]
    limit = f"/{r.limit:.0f}s" if r.limit else ""
    extra = f" error: {r.error}" if r.error else ""
    return f"{r.key} {status} {r.title} [{r.elapsed:.1f}s{limit}] " + " ".join(parts) + extra


# helpers ------------------------------------------------------------------------

def _poly_rel(p, q):
    """Max coefficient difference relative to the larger coefficient scale."""
    n = max(len(p.coeffs), len(q.coeffs))
    a = np.zeros(n)
    b = np.zeros(n)
    a[: len(p.coeffs)] = p.coeffs
    b[: len(q.coeffs)] = q.coeffs
    scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0), 1e-300)
    return float(np.abs(a - b).max(initial=0.0) / scale)


def _gram_rel(G, E):
    """max |G - E| / sqrt(|E_ii E_kk|) for a diagonal-dominant expected matrix E."""
    dg = np.sqrt(np.abs(np.diag(E)))
    scale = np.outer(dg, dg)
    return float((np.abs(G - E) / scale).max())


def _sphere_points(rng, d, k):
    x = rng.standard_normal((k, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _relaxed(a, b):
    return JacobiParams.relaxed(a, b)


# C1 -----------------------------------------------------------------------------

#: The (1+t) P_n^{(a,b+1)} expansion holds with this overall factor; the
#: bracket form without it is off by exactly one half (n = 0 shows it by hand).
RAF2_FACTOR = 2.0


def check_jacobi(cfg, tol):
    r = CheckResult("C1", "Jacobi identities")
    rng = np.random.default_rng(20240611)
    pairs = [(0.0, 0.0), (1.0, 0.0), (0.5, 1.5), (-0.5, 0.5), (2.0, 3.0)]
    pairs += [tuple(p) for p in rng.uniform(-0.9, 3.0, size=(cfg["jac_random"], 2))]
    t1 = Poly1D([1.0, 1.0])
    T = tol["jacobi"]
    for a, b in pairs:
        P = lambda n, da=0.0, db=0.0: jacobi_coeffs(_relaxed(a + da, b + db), n)
        for n in range(cfg["jac_nmax"] + 1):
            lhs = t1 * P(n, 0, 1)
            printed = ((n + b + 1) * P(n) + (n + 1) * P(n + 1)) / (2 * n + a + b + 2)
            r.record("RAF2", _poly_rel(lhs, RAF2_FACTOR * printed), T)
            r.record("RAF2_printed_ratio",
                     abs(lhs.leading / printed.leading - RAF2_FACTOR) / RAF2_FACTOR, T)
            an, bn = jacobi_ab((a, b), n)
            rhs = an * P(n, 1, 0) - (bn * P(n - 1, 1, 0) if n else 0.0)
            r.record("RAF", _poly_rel(P(n), rhs), T)
            bswap = jacobi_ab((b, a), n)[1]
            rhs = an * P(n, 0, 1) + (bswap * P(n - 1, 0, 1) if n else 0.0)
            r.record("RAF0", _poly_rel(P(n), rhs), T)
            dP = jacobi_deriv(_relaxed(a, b), n)
            if n:
                r.record("derJ", _poly_rel(dP, 0.5 * (n + a + b + 1) * P(n - 1, 1, 1)), T)
            if b > 0:
                lhs = t1 * dP
                rhs = n * P(n, 1, -1) + (b * P(n - 1, 1, 0) if n else 0.0)
                r.record("jac*", _poly_rel(lhs, rhs), T)
                r.record("jac**", _poly_rel(b * P(n) + t1 * dP, (b + n) * P(n, 1, -1)), T)
    return r


# C2 -----------------------------------------------------------------------------

def check_harmonics(cfg, tol):
    r = CheckResult("C2", "spherical harmonics")
    T = tol["harmonic"]
    rng = np.random.default_rng(7)
    for d in cfg["dims"]:
        om = sphere_area(d)
        Ys = [(n, Y) for n in range(cfg["harm_nmax"] + 1) for Y in harmonic_basis(n, d)]
        pts = _sphere_points(rng, d, 100)
        vals = {}
        for idx, (n, Y) in enumerate(Ys):
            g = np.stack([c(pts) for c in Y.gradient()], axis=-1) if n else np.zeros((100, d))
            g0 = np.stack([c(pts) for c in spherical_gradient(Y)], axis=-1) if n else np.zeros((100, d))
            vals[idx] = (Y(pts), g, g0)
            scale = max(np.abs(g).max(), 1.0)
            r.record("xi.grad0", np.abs((pts * g0).sum(axis=1)).max() / scale, T)
        for i, (n, _) in enumerate(Ys):
            for k, (m, _) in enumerate(Ys):
                if k < i:
                    continue
                y1, g1, h1 = vals[i]
                y2, g2, h2 = vals[k]
                lhs = (g1 * g2).sum(axis=1)
                rhs = (h1 * h2).sum(axis=1) + n * m * y1 * y2
                scale = max(np.sqrt(np.abs(g1).max() * np.abs(g2).max()), 1.0)
                r.record("grad split", np.abs(lhs - rhs).max() / scale, T)
        polys = [Y for _, Y in Ys]
        grads = [Y.gradient() for Y in polys]
        degs = np.array([n for n, _ in Ys], dtype=float)
        G = moment_gram(grads, grads, "sphere") / om
        E = np.diag(np.where(degs > 0, degs * (2 * degs + d - 2), 1.0))
        G = G + np.diag(np.where(degs > 0, 0.0, 1.0))
        r.record("nabla-Y-int", _gram_rel(G, E), T)
        for mu in cfg["mus"]:
            ratio = np.array([math.exp(log_pochhammer(0.5 * d, n) - log_pochhammer(mu + 1 + 0.5 * d, n))
                              for n, _ in Ys])
            G = bc.weighted_form(mu, d).gram(polys)
            r.record("ball Y-int", _gram_rel(G, np.diag(ratio)), T)
            G = bc.gradient_form(mu, d).gram(polys)
            E = 2 * degs * (mu + 1) * ratio
            G = G + np.diag(np.where(degs > 0, 0.0, 1.0))
            r.record("ball grad-Y-int", _gram_rel(G, np.diag(np.where(degs > 0, E, 1.0))), T)
    bad = 0
    for d in range(2, cfg["rank_dmax"] + 1):
        for n in range(cfg["rank_nmax"] + 1):
            bad += harmonic_rank(n, d) != harmonic_dim(n, d)
    r.record("dim mismatches", bad, 0)
    return r


# C3 -----------------------------------------------------------------------------

def check_classical(cfg, tol):
    r = CheckResult("C3", "classical ball basis")
    for d in cfg["dims"]:
        for mu in cfg["mus"]:
            fam = bc.classical_family(cfg["nmax"], d, mu)
            exp = [bc.classical_norm_H(f.j, f.n, mu, d) for f in fam]
            rep = bc.gram_report(fam, bc.weighted_form(mu, d), exp)
            r.record("offdiag", rep.max_offdiag, tol["classical_offdiag"])
            r.record("diag", rep.max_diag_error, tol["classical_diag"])
            for f in fam:
                eig = (f.n + d) * (f.n + 2 * mu)
                res = bc.apply_Dmu(f.expanded, mu) + eig * f.expanded
                scale = f.expanded.max_abs_coeff() * max(1.0, abs(eig))
                r.record("D_mu eigen", res.max_abs_coeff() / scale, tol["eigen"])
    return r


# C4 -----------------------------------------------------------------------------

def check_gradient_kappa(cfg, tol):
    r = CheckResult("C4", "gradient orthogonality and kappa")
    ratios = []
    for d in cfg["dims"]:
        for mu in cfg["mus"]:
            fam = bc.classical_family(cfg["nmax"], d, mu)
            G = bc.gradient_form(mu, d).gram(fam)
            diag = np.diag(G).copy()
            pos = diag > 0
            sub = G[np.ix_(pos, pos)]
            dg = np.sqrt(diag[pos])
            off = np.abs(sub - np.diag(np.diag(sub))) / np.outer(dg, dg)
            r.record("offdiag", off.max(), tol["gradient_offdiag"])
            for f, g in zip(fam, diag):
                if f.n == 0:
                    continue
                printed = bc.printed_gradient_gram_constant(f.j, f.n, mu, d)
                ratios.append(g / printed)
                if f.j == 0:
                    cor = 2 * f.n * (mu + 1) * math.exp(log_pochhammer(0.5 * d, f.n)
                                                        - log_pochhammer(mu + 1 + 0.5 * d, f.n))
                    r.record("j=0 vs grad-Y-int", abs(g - cor) / cor, tol["cor23"])
    ratios = np.array(ratios)
    r.record("kappa spread", np.abs(ratios / bc.GRADIENT_KAPPA - 1).max(), tol["kappa"])
    Y = MultiPoly.variable(3, 0) * math.sqrt(3.0)
    hand = bc.gradient_form(0.0, 3).pair(Y, Y)
    r.record("hand 6/5", abs(hand - 1.2) / 1.2, tol["cor23"])
    r.notes.append(f"kappa estimate {ratios.mean():.15g} over {ratios.size} elements")
    return r


# C5 -----------------------------------------------------------------------------

def check_sobolev1d(cfg, tol):
    r = CheckResult("C5", "one-variable Sobolev family")
    J = cfg["jmax1d"]
    for d in cfg["dims"]:
        for beta in ((d - 2) / 2, 1.0, 2.5):
            for alpha in cfg["alphas"]:
                mu = alpha - 1
                for lam in cfg["lams1d"]:
                    fam = s1.sobolev_family(alpha, beta, d, lam, J)
                    ref = s1.sobolev_family(alpha, beta, d, lam, J, "gram_schmidt")
                    for j in range(J + 1):
                        r.record("q vs GS", _poly_rel(fam.q[j], ref.q[j]), tol["q_vs_gs"])
                        direct = s1.sobolev1d_inner(fam.q[j], fam.q[j], fam)
                        r.record("norm-qj", abs(fam.hhat[j] - direct) / direct, tol["norm_qj"])
                    for j in range(cfg["d_jmax"] + 1):
                        a = s1.d_value(j, mu, beta, d, fam.recursion_lambda)
                        b = s1.d_value(j, mu, beta, d, fam.recursion_lambda, "fraction")
                        r.record("d-rec vs ratio", abs(a - b) / abs(a), tol["d_paths"])
                zero = s1.sobolev_family(alpha, beta, d, 0.0, J)
                target = JacobiParams(alpha, beta)
                for j in range(J + 1):
                    r.record("lam=0 q", _poly_rel(zero.q[j], jacobi_coeffs(target, j)), tol["lambda0"])
                    h = jacobi_norm_h(target, j)
                    r.record("lam=0 hhat", abs(zero.hhat[j] - h) / h, tol["lambda0"])
                    bb = jacobi_ab((mu, beta), j + 1)[1]
                    r.record("lam=0 d_j", abs(s1.d_value(j, mu, beta, d, 0.0) + bb) / bb, tol["lambda0"])
    return r


# C6 -----------------------------------------------------------------------------

def check_sphere_term_bases(cfg, tol):
    r = CheckResult("C6", "U and Q bases")
    rng = np.random.default_rng(11)
    N = cfg["nmax"]
    for d in cfg["dims"]:
        for lam in cfg["lams"]:
            rep = sb.gram_for("U", N, d, None, lam)
            r.record("U offdiag", rep.max_offdiag, tol["U"])
            r.record("U norms", rep.max_diag_error, tol["U"])
            for mu in cfg["mus"]:
                for n in range(N + 1):
                    rep = sb.gram_for("Q", n, d, mu, lam, degrees=[n])
                    r.record("Q offdiag (per degree)", rep.max_offdiag, tol["Q_offdiag"])
                    q0 = [e for e, lab in zip(rep.diag_errors, rep.labels) if lab[1] == 0]
                    r.record("Q_0 norm", max(q0), tol["Q0_norm"])
            # limit mu -> -1
            mu = -1 + 1e-6
            U, _ = sb.basis_family("U", N, d, None, lam)
            Q, _ = sb.basis_family("Q", N, d, mu, lam)
            S = np.array([sb.Q_limit_scale(f.n, f.j, d) for f in U])
            GU = sb.nabla_form(d, lam).gram(U) * np.outer(S, S)
            GQ = sb.nabla_weighted_form(mu, d, lam).gram(Q)
            r.record("mu->-1 limit", _gram_rel(GQ, GU), tol["limit"])
            for fu, fq, s in zip(U, Q, S):
                r.record("mu->-1 radial", _poly_rel(fq.radial, s * fu.radial), tol["limit"])
        # decomposition of the U basis
        for n in range(2, N + 1):
            span = [f.expanded for f in bc.classical_basis(n - 2, d, 1.0)]
            exps = sorted({e for p in span for e in p.terms})
            A = np.array([[p.coeff(e) for p in span] for e in exps])
            for f in sb.basis_U(n, d, 1.0):
                if f.j == 0:
                    continue
                pts = _sphere_points(rng, d, 50)
                r.record("U on sphere", np.abs(f(pts)).max() / f.expanded.max_abs_coeff(), tol["decomp"])
                q, res = sb.divide_by_one_minus_rsq(f.expanded)
                r.record("division residual", res, tol["decomp"])
                rhs = np.array([q.coeff(e) for e in exps])
                extra = sum(abs(c) for e, c in q.items() if e not in set(exps))
                sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
                mem = (np.linalg.norm(A @ sol - rhs) + extra) / np.linalg.norm(rhs)
                r.record("span residual", mem, tol["decomp"])
    r.notes.append("Q orthogonality is certified within each degree; see Q_cross_degree")
    return r


# C7 -----------------------------------------------------------------------------

def check_main_basis(cfg, tol):
    r = CheckResult("C7", "R basis for the main product")
    N = cfg["nmax"]
    for d in cfg["dims"]:
        for mu in cfg["R_mus"]:
            for lam in cfg["lams"]:
                rep = sb.gram_for("R", N, d, mu, lam)
                r.record("R offdiag", rep.max_offdiag, tol["R_offdiag"])
                r.record("R norms", rep.max_diag_error, tol["R_diag"])
                if mu > 0:
                    for n in range(N + 1):
                        r.record("connection", sb.cor53_residual(n, d, mu, lam), tol["cor53"])
            for n in range(N + 1):
                for f, g in zip(sb.basis_R(n, d, mu, 0.0), bc.classical_basis(n, d, mu)):
                    diff = (f.expanded - g.expanded).max_abs_coeff() / g.expanded.max_abs_coeff()
                    r.record("lam=0 classical", diff, tol["R_lambda0"])
    return r


# C8 -----------------------------------------------------------------------------

def _random_poly(rng, d, deg):
    terms = {e: rng.uniform(-1, 1) for k in range(deg + 1) for e in monomials_of_degree(k, d)}
    return MultiPoly(d, terms)


def check_green(cfg, tol):
    r = CheckResult("C8", "weighted Green formula")
    rng = np.random.default_rng(3)
    for d in cfg["dims"]:
        rsq = sum((MultiPoly.variable(d, i) ** 2 for i in range(d)), MultiPoly.zero(d))
        for m in (1, 2):
            h = (1 - rsq) ** m
            gh = h.gradient()
            for _ in range(cfg["green_trials"]):
                f = _random_poly(rng, d, 4)
                g = _random_poly(rng, d, 4)
                gf, gg = f.gradient(), g.gradient()
                dot = sum((a * b for a, b in zip(gf, gg)), MultiPoly.zero(d))
                lhs = ball_integral(dot, float(m))
                inner = g.laplacian() * h + sum((a * b for a, b in zip(gg, gh)), MultiPoly.zero(d))
                rhs = -ball_integral(f * inner, 0.0)
                r.record("Green", abs(lhs - rhs) / max(abs(lhs), abs(rhs)), tol["green"])
    return r


CHECKS = {
    "C1": check_jacobi,
    "C2": check_harmonics,
    "C3": check_classical,
    "C4": check_gradient_kappa,
    "C5": check_sobolev1d,
    "C6": check_sphere_term_bases,
    "C7": check_main_basis,
    "C8": check_green,
}


def run_checks(preset="desk", tolerances=None, keys=None):
    """Run the selected checks; returns a list of CheckResult in key order."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in (tolerances or {}).items():
        if k not in tol:
            raise ValueError(f"unknown tolerance {k!r}")
        tol[k] = float(v)
    cfg = PRESETS[preset]
    out = []
    for key in keys or CHECKS:
        start = time.perf_counter()
        try:
            res = CHECKS[key](cfg, tol)
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(key, CHECKS[key].__name__, error=f"{type(exc).__name__}: {exc}")
        res.elapsed = time.perf_counter() - start
        res.limit = RUNTIME_LIMITS.get(key)
        out.append(res)
    return out
