"""Command-line front end.

Subcommands::

    coeffs   one-variable Sobolev coefficient table (d_j, r_j, D_j, norms, q_j)
    basis    serialized basis of one degree (classical, U, Q or R)
    gram     Gram-matrix report for a basis family under its own inner product
    eval     basis values (and gradients) on points read from CSV
    verify   run the certification suite; exit 1 on any failure

Argument errors exit with status 2 and a single-line diagnostic.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import ball_classical as bc
from . import sobolev_ball as sb
from .certify import DEFAULT_TOLERANCES, PRESETS, format_result, run_checks
from .sobolev1d import check_family_params, sobolev_family

BASIS_KINDS = ("classical",) + sb.KINDS


class UsageError(Exception):
    """Invalid command-line configuration (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x):
    return "%.17g" % x


# parameter validation ---------------------------------------------------------

def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command}: --{name.replace('_', '-')} is required")


def _validate_basis_args(args, lam_default=1.0):
    _require(args, "n", "d")
    if args.n < 0:
        raise UsageError(f"--n must be nonnegative, got {args.n}")
    if args.d < 2:
        raise UsageError(f"--d must be at least 2, got {args.d}")
    if args.kind in ("classical", "Q", "R"):
        _require(args, "mu")
        if not args.mu > -1:
            raise UsageError(f"--mu must exceed -1, got {args.mu}")
    if args.kind == "classical":
        return
    if args.lam is None:
        args.lam = lam_default
    if args.kind in ("U", "Q") and not args.lam > 0:
        raise UsageError(f"--lambda must be positive for kind {args.kind}, got {args.lam}")
    if args.kind == "R" and args.lam < 0:
        raise UsageError(f"--lambda must be nonnegative, got {args.lam}")


# builders ---------------------------------------------------------------------

def _degree_basis(kind, n, d, mu, lam):
    """(elements, norms, header dict) for a single degree."""
    if kind == "classical":
        elements = bc.classical_basis(n, d, mu)
        norms = [bc.classical_norm_H(f.j, n, mu, d) for f in elements]
        return elements, norms, {"kind": kind, "n": n, "d": d, "mu": mu, "lambda": None}
    builder = {"U": lambda: sb.basis_U(n, d, lam),
               "Q": lambda: sb.basis_Q(n, d, mu, lam),
               "R": lambda: sb.basis_R(n, d, mu, lam)}[kind]
    basis = builder()
    return (list(basis.elements), list(basis.norms),
            {"kind": kind, "n": n, "d": d, "mu": basis.mu, "lambda": lam})


def _family(kind, nmax, d, mu, lam, degree_only):
    degrees = [nmax] if degree_only else range(nmax + 1)
    elements, norms = [], []
    for n in degrees:
        e, nr, _ = _degree_basis(kind, n, d, mu, lam)
        elements += e
        norms += nr
    return elements, norms


def _form(kind, d, mu, lam):
    if kind == "classical":
        return bc.weighted_form(mu, d)
    return sb.form_for(kind, d, mu, lam)


def _label(f):
    return f"n{f.n}_j{f.j}_nu{f.nu}"


# commands ---------------------------------------------------------------------

def cmd_coeffs(args):
    _require(args, "alpha", "beta", "d")
    if args.jmax < 0:
        raise UsageError(f"--jmax must be nonnegative, got {args.jmax}")
    lam = 1.0 if args.lam is None else args.lam
    try:
        check_family_params(args.alpha, args.beta, args.d, lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    fam = sobolev_family(args.alpha, args.beta, args.d, lam, args.jmax, args.path)
    if args.format == "json":
        return json.dumps(fam.to_dict(), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "d_j", "r_j", "D_j", "hhat"])
    recursive = fam.path == "recursive"
    r = fam.r_j() if recursive else ()
    for j in range(fam.jmax + 1):
        row = [j]
        if recursive:
            row += [_fmt(fam.d_j[j]), _fmt(r[j]), _fmt(fam.D_j[j])]
        else:
            row += ["", "", ""]
        w.writerow(row + [_fmt(fam.hhat[j])])
    return buf.getvalue()


def cmd_basis(args):
    _validate_basis_args(args)
    elements, norms, head = _degree_basis(args.kind, args.n, args.d, args.mu, args.lam)
    if args.format == "json":
        out = dict(head, elements=[f.to_dict() for f in elements], norms=norms)
        return json.dumps(out, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "j", "nu"] + [f"e{i + 1}" for i in range(args.d)] + ["coeff"])
    for f in elements:
        for exp, c in f.expanded.items():
            w.writerow([f.n, f.j, f.nu, *exp, _fmt(c)])
    return buf.getvalue()


def cmd_gram(args):
    _validate_basis_args(args)
    if args.norms:
        if args.kind == "classical":
            elements, norms = _family("classical", args.n, args.d, args.mu, None, args.degree_only)
            form = _form("classical", args.d, args.mu, None)
            rows = [{"n": f.n, "j": f.j, "nu": f.nu, "closed_form": c,
                     "oracle": form.pair(f, f)} for f, c in zip(elements, norms)]
            table = {"kind": "classical",
                     "params": {"nmax": args.n, "d": args.d, "mu": args.mu}, "norms": rows}
        else:
            table = sb.norms_table(args.kind, args.n, args.d, args.mu, args.lam)
        return json.dumps(table, indent=2) + "\n"
    elements, norms = _family(args.kind, args.n, args.d, args.mu, args.lam, args.degree_only)
    form = _form(args.kind, args.d, args.mu, args.lam)
    report = bc.GramReport.build([f.label for f in elements], form.gram(elements), norms)
    if args.format == "json":
        return report.to_json(indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label"] + [_label(f) for f in elements])
    for f, row in zip(elements, report.matrix):
        w.writerow([_label(f)] + [_fmt(v) for v in row])
    return buf.getvalue()


def read_points(text, d):
    """Parse a CSV grid with header ``x1,...,xd`` into an (m, d) array."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise UsageError("points file is empty")
    header = [h.strip() for h in rows[0]]
    expected = [f"x{i + 1}" for i in range(d)]
    if header != expected:
        raise UsageError(f"points header must be {','.join(expected)}, got {','.join(header)}")
    pts = []
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != d:
            raise UsageError(f"points line {k}: expected {d} values, got {len(row)}")
        try:
            pts.append([float(v) for v in row])
        except ValueError as exc:
            raise UsageError(f"points line {k}: {exc}") from exc
    return np.asarray(pts, dtype=float).reshape(-1, d)


def evaluate(elements, pts, gradients=False):
    """Values (m, k) and optionally gradients (m, k, d) of a basis on points."""
    vals = np.stack([f(pts) for f in elements], axis=-1) if elements else np.zeros((len(pts), 0))
    if not gradients:
        return vals, None
    grads = np.stack([f.eval_gradient(pts) for f in elements], axis=1)
    return vals, grads


def cmd_eval(args):
    _validate_basis_args(args)
    _require(args, "points")
    if args.points == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.points, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read points file: {exc.strerror}") from exc
    pts = read_points(text, args.d)
    elements, _, _ = _degree_basis(args.kind, args.n, args.d, args.mu, args.lam)
    vals, grads = evaluate(elements, pts, args.gradients)
    labels = [_label(f) for f in elements]
    if args.format == "json":
        out = {"labels": labels, "points": pts.tolist(), "values": vals.tolist()}
        if grads is not None:
            out["gradients"] = grads.tolist()
        return json.dumps(out) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = [f"x{i + 1}" for i in range(args.d)] + labels
    if grads is not None:
        head += [f"{lab}_dx{i + 1}" for lab in labels for i in range(args.d)]
    w.writerow(head)
    for k, x in enumerate(pts):
        row = [_fmt(v) for v in x] + [_fmt(v) for v in vals[k]]
        if grads is not None:
            row += [_fmt(v) for v in grads[k].ravel()]
        w.writerow(row)
    return buf.getvalue()


def _parse_tol(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        if name not in DEFAULT_TOLERANCES:
            raise UsageError(f"unknown tolerance {name!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise UsageError(f"--tol {name}: not a number: {value!r}") from exc
    return out


def cmd_verify(args):
    tol = _parse_tol(args.tol)
    keys = None
    if args.checks:
        keys = [k.strip() for k in args.checks.split(",") if k.strip()]
        for k in keys:
            if k not in {f"C{i}" for i in range(1, 9)}:
                raise UsageError(f"unknown check {k!r}")
    results = run_checks(args.preset, tol, keys)
    lines = [format_result(r) for r in results]
    failed = [r.key for r in results if not r.passed]
    total = sum(r.elapsed for r in results)
    lines.append(f"{'FAIL' if failed else 'PASS'} {len(results) - len(failed)}/{len(results)}"
                 f" checks in {total:.1f}s" + (f" (failed: {','.join(failed)})" if failed else ""))
    return "\n".join(lines) + "\n", (1 if failed else 0)


# parser -----------------------------------------------------------------------

def _add_basis_args(p, with_format=("json", "csv")):
    p.add_argument("--kind", choices=BASIS_KINDS, required=True)
    p.add_argument("--n", type=int, help="degree (maximum degree for gram)")
    p.add_argument("--d", type=int, help="dimension")
    p.add_argument("--mu", type=float, help="weight exponent, > -1")
    p.add_argument("--lambda", dest="lam", type=float, help="Sobolev parameter")
    p.add_argument("--format", choices=with_format, default=with_format[0])


def build_parser():
    parser = _Parser(prog="sobolevball", description="Sobolev orthogonal polynomials on the ball")
    parser.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", help="one-variable coefficient table")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--path", choices=("recursive", "gram_schmidt"))
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("basis", help="serialized basis of one degree")
    _add_basis_args(p)

    p = sub.add_parser("gram", help="Gram-matrix report")
    _add_basis_args(p)
    p.add_argument("--degree-only", action="store_true", help="only the elements of degree n")
    p.add_argument("--norms", action="store_true", help="closed-form vs oracle norms table")

    p = sub.add_parser("eval", help="evaluate a basis on CSV points")
    _add_basis_args(p, with_format=("csv", "json"))
    p.add_argument("--points", help="CSV file with header x1,...,xd ('-' for stdin)")
    p.add_argument("--gradients", action="store_true")

    p = sub.add_parser("verify", help="run the certification suite")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE")
    p.add_argument("--checks", help="comma-separated subset, e.g. C1,C5")
    return parser


COMMANDS = {"coeffs": cmd_coeffs, "basis": cmd_basis, "gram": cmd_gram,
            "eval": cmd_eval, "verify": cmd_verify}


def run_cli(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit status (0 ok, 1 verification failure, 2 usage)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"sobolevball: error: {exc}", file=stderr)
        return 2
    except ValueError as exc:
        print(f"sobolevball: error: {exc}".replace("\n", " "), file=stderr)
        return 2
    text, code = result if isinstance(result, tuple) else (result, 0)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run_cli(argv))
