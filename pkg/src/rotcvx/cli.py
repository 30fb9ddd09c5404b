"""Command-line front end.

Every command prints a JSON report on stdout.  Exit codes: 0 success,
2 usage or parse error, 3 infeasible, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import diagonal, linalg, oneconstraint, sut
from .errors import Infeasible, NotInParityPolytope, NumericalFailure, RotcvxError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class UsageError(Exception):
    pass


class InfeasibleExit(Exception):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------- matrix I/O

def format_float(x: float) -> str:
    return "%.17g" % x


def write_matrix_csv(m, fh) -> None:
    for row in np.atleast_2d(m):
        fh.write(",".join(format_float(v) for v in row) + "\n")


def matrix_to_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return {"n": int(m.shape[0]), "rows": [[float(v) for v in row] for row in m]}


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def parse_rows(text: str) -> list[list[float]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(v) for v in line.replace(",", " ").split()])
        except ValueError as exc:
            raise UsageError(f"bad number in line {line!r}") from exc
    return rows


def load_matrix(path: str) -> np.ndarray:
    """Read a square matrix from CSV or from JSON {"n": int, "rows": [...]}."""
    text = _read_text(path)
    if path.endswith(".json"):
        try:
            obj = json.loads(text)
            rows = obj["rows"]
            n = int(obj.get("n", len(rows)))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{path}: expected JSON with 'rows'") from exc
        if len(rows) != n:
            raise UsageError(f"{path}: 'n' does not match the number of rows")
    else:
        rows = parse_rows(text)
    try:
        m = np.array(rows, dtype=float)
    except ValueError as exc:
        raise UsageError(f"{path}: ragged rows") from exc
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[0] != m.shape[1]:
        raise UsageError(f"{path}: matrix must be square and non-empty")
    if not np.all(np.isfinite(m)):
        raise UsageError(f"{path}: non-finite entries")
    return m


def load_rows(path: str) -> np.ndarray:
    rows = parse_rows(_read_text(path))
    if not rows:
        raise UsageError(f"{path}: no data")
    try:
        return np.array(rows, dtype=float)
    except ValueError as exc:
        raise UsageError(f"{path}: ragged rows") from exc


def parse_vector(spec: str) -> np.ndarray:
    """A comma/space separated list given inline or as a file path."""
    text = _read_text(spec) if Path(spec).is_file() else spec
    vals = [v for row in parse_rows(text) for v in row]
    if not vals:
        raise UsageError(f"empty vector {spec!r}")
    v = np.array(vals)
    if not np.all(np.isfinite(v)):
        raise UsageError("vector has non-finite entries")
    return v


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p, dtype=float).tobytes())
        else:
            h.update(repr(p).encode())
    return h.hexdigest()[:16]


def _orth_residual(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x.T @ x - np.eye(x.shape[0]))))


def _report(command, value, matrix=None, constraint=0.0, **extra) -> dict:
    rep = {"command": command, "value": value}
    rep.update(extra)
    rep["residuals"] = {
        "orth": _orth_residual(matrix) if matrix is not None else None,
        "constraint": constraint,
    }
    if matrix is not None:
        rep["det"] = float(np.linalg.det(matrix))
        rep["matrix"] = matrix_to_json(matrix)
    return rep


def _write_matrix_file(m, path):
    if path is None:
        return
    with open(path, "w") as fh:
        if path.endswith(".json"):
            json.dump(matrix_to_json(m), fh)
            fh.write("\n")
        else:
            write_matrix_csv(m, fh)


# ------------------------------------------------------------------ commands

def cmd_wahba(args) -> dict:
    obs = load_rows(args.obs)
    ref = load_rows(args.ref)
    if obs.shape != ref.shape:
        raise UsageError("observation and reference files must have the same shape")
    # X u_i ~ v_i maximizes sum v_i^T X u_i = <sum v_i u_i^T, X>
    m = ref.T @ obs
    _, x = linalg.special_trace(m)
    before = float(np.sum((obs - ref) ** 2))
    after = float(np.sum((obs @ x.T - ref) ** 2))
    _write_matrix_file(x, args.matrix_out)
    return _report("wahba", linalg.inner(m, x), x, constraint=after,
                   loss_before=before, loss_after=after, digest=_digest(obs, ref))


def cmd_opt1(args) -> dict:
    a = load_matrix(args.a)
    if args.x0 is not None:
        b = load_matrix(args.x0)
        lo = 1.0 + 2.0 * math.cos(args.angle if args.angle is not None else math.pi)
        hi = linalg.special_trace_value(b)
        if args.lo is not None or args.hi is not None or args.b is not None:
            raise UsageError("--x0 replaces B, --lo and --hi")
    else:
        if args.b is None or args.lo is None or args.hi is None:
            raise UsageError("need B, --lo and --hi (or --x0 with --angle)")
        b = load_matrix(args.b)
        lo, hi = args.lo, args.hi
    if lo > hi:
        raise UsageError("--lo must not exceed --hi")
    if a.shape != b.shape:
        raise UsageError("A and B must have the same shape")
    if not args.eps > 0:
        raise UsageError("--eps must be positive")
    try:
        res = oneconstraint.solve_one_constraint(a, b, (lo, hi), args.eps)
    except Infeasible as exc:
        raise InfeasibleExit(str(exc), {"command": "opt1", "interval": [lo, hi]}) from exc
    x = oneconstraint.round_certificate(a, b, res.certificate)
    bx = linalg.inner(b, x)
    viol = max(lo - bx, bx - hi, 0.0)
    _write_matrix_file(x, args.matrix_out)
    return _report(
        "opt1", res.value, x, constraint=viol,
        point=[float(v) for v in res.point],
        certificate=res.certificate.as_dict(),
        interval=[lo, hi],
        rounded_value=linalg.inner(a, x),
        oracle_calls=res.oracle_calls,
        digest=_digest(a, b, lo, hi, args.eps),
    )


def cmd_diag(args) -> dict:
    if args.target is not None:
        d = parse_vector(args.target)
        try:
            x = diagonal.construct_with_diagonal(d)
        except NotInParityPolytope as exc:
            cut = exc.cut.as_dict() if exc.cut is not None else None
            raise InfeasibleExit(str(exc), {"command": "diag", "cut": cut}) from exc
        _write_matrix_file(x, args.matrix_out)
        return _report("diag", [float(v) for v in np.diag(x)], x,
                       constraint=float(np.max(np.abs(np.diag(x) - d))),
                       digest=_digest(d))
    rows = load_rows(args.ineq)
    if rows.shape[1] < 2:
        raise UsageError("inequality rows need n coefficients and a right-hand side")
    cset = diagonal.PolyhedralSet.from_rows(rows)
    res = diagonal.decide_diag_feasibility(cset, args.eps)
    if not res.found:
        raise InfeasibleExit(
            f"no ball of radius {args.eps:g} fits in the feasible diagonal set",
            {"command": "diag", "iterations": res.iterations, "cut": res.last_cut})
    x = res.matrix
    dx = np.diag(x)
    viol = float(max(np.max(cset.a @ dx - cset.b), 0.0))
    _write_matrix_file(x, args.matrix_out)
    return _report("diag", [float(v) for v in dx], x, constraint=viol,
                   iterations=res.iterations, digest=_digest(rows, args.eps))


def _parse_rho(text: str, n: int) -> np.ndarray:
    text = text.strip()
    if text and set(text) <= {"+", "-"}:
        rho = np.array([1.0 if c == "+" else -1.0 for c in text])
    else:
        rho = parse_vector(text)
    if rho.size != n or not np.all(np.isin(rho, (-1.0, 1.0))):
        raise UsageError(f"--rho must give {n} signs")
    return rho


def cmd_sut(args) -> dict:
    sigma = parse_vector(args.sigma)
    try:
        n = sut.sut_dimension(sigma.size)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    bounds = sut.diag_bounds(sigma)
    extra = {"alpha": bounds.alpha.tolist(), "beta": bounds.beta.tolist(),
             "digest": _digest(sigma, args.rho, args.opt, args.group)}
    if args.rho is not None:
        rho = _parse_rho(args.rho, n)
        x = sut.construct_x_rho(sigma, rho)
        value = None
    else:
        a = parse_vector(args.opt)
        if a.size != n:
            raise UsageError(f"--opt needs {n} diagonal weights")
        relax = sut.sut_opt_orth(sigma, a)
        if args.group == "o":
            x, value = relax
            extra["gap_bound"] = 0.0
        else:
            x, value, gap = sut.sut_opt_special(sigma, a)
            extra["gap_bound"] = gap
        extra["relaxation_value"] = relax.value
    _write_matrix_file(x, args.matrix_out)
    resid = float(np.max(np.abs(sut.project_sut(x) - sigma), initial=0.0))
    return _report("sut", value, x, constraint=resid, **extra)


def _svg_polygon(points) -> str:
    pts = np.asarray(points, dtype=float)
    r = max(float(np.max(np.abs(pts))), 1e-12)
    xs = 256.0 + 240.0 * pts[:, 0] / r
    ys = 256.0 - 240.0 * pts[:, 1] / r
    coords = " ".join(f"{x:.6f},{y:.6f}" for x, y in zip(xs, ys))
    return ('<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" '
            'viewBox="0 0 512 512">\n'
            f'<polygon points="{coords}" fill="#1f77b4" fill-opacity="0.2" '
            'stroke="#1f77b4" stroke-width="1"/>\n</svg>\n')


def cmd_image(args):
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    if a.shape != b.shape:
        raise UsageError("A and B must have the same shape")
    if args.k < 1:
        raise UsageError("--k must be positive")
    pts = oneconstraint.image_boundary_polygon(a, b, args.k)
    if args.figure:
        from .plotting import save_image_figure

        save_image_figure(pts, args.figure)
    if args.out is None:
        write_matrix_csv(pts, sys.stdout)
        return None
    if args.out.endswith(".svg"):
        Path(args.out).write_text(_svg_polygon(pts))
    else:
        with open(args.out, "w") as fh:
            write_matrix_csv(pts, fh)
    return {"command": "image", "value": args.k, "out": args.out, "figure": args.figure,
            "residuals": {"orth": None, "constraint": 0.0}, "digest": _digest(a, b, args.k)}


# ------------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rotcvx", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the report (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def matrix_out(sp):
        sp.add_argument("--matrix-out", help="also write the matrix (.csv or .json)")

    w = sub.add_parser("wahba", help="best rotation mapping observations onto references")
    w.add_argument("obs", help="observed vectors u_i, one per line")
    w.add_argument("ref", help="reference vectors v_i, one per line")
    matrix_out(w)
    w.set_defaults(func=cmd_wahba)

    o = sub.add_parser("opt1", help="max <A,X> over SO(n) with <B,X> in [lo, hi]")
    o.add_argument("a", help="objective matrix file")
    o.add_argument("b", nargs="?", help="constraint matrix file")
    o.add_argument("--lo", type=float)
    o.add_argument("--hi", type=float)
    o.add_argument("--eps", type=float, default=1e-4)
    o.add_argument("--x0", help="reference rotation; constrain <X0, X> >= 1 + 2 cos(angle)")
    o.add_argument("--angle", type=float, help="angle bound in radians (with --x0)")
    matrix_out(o)
    o.set_defaults(func=cmd_opt1)

    d = sub.add_parser("diag", help="rotation with a prescribed or constrained diagonal")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", help="diagonal d, inline or file")
    g.add_argument("--ineq", help="rows a_1..a_n,b meaning <a, d> <= b")
    d.add_argument("--eps", type=float, default=1e-6)
    matrix_out(d)
    d.set_defaults(func=cmd_diag)

    s = sub.add_parser("sut", help="orthogonal matrices with prescribed entries above the diagonal")
    s.add_argument("--sigma", required=True, help="SUT entries in row-major order, inline or file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--rho", help="sign pattern such as +-+")
    g.add_argument("--opt", help="diagonal objective weights")
    s.add_argument("--group", choices=("so", "o"), default="so")
    matrix_out(s)
    s.set_defaults(func=cmd_sut)

    im = sub.add_parser("image", help="support points of the planar image of SO(n)")
    im.add_argument("a")
    im.add_argument("b")
    im.add_argument("--k", type=int, default=64)
    im.add_argument("--out", help="points.csv or plot.svg (default: CSV on stdout)")
    im.add_argument("--figure", help="also render a PNG figure")
    im.set_defaults(func=cmd_image)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        rep = args.func(args)
    except UsageError as exc:
        print(f"rotcvx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleExit as exc:
        rep = dict(exc.report or {})
        rep["status"] = "infeasible"
        rep["message"] = str(exc)
        print(json.dumps(rep, indent=2))
        return EXIT_INFEASIBLE
    except NumericalFailure as exc:
        print(f"rotcvx: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Infeasible as exc:
        print(json.dumps({"command": args.command, "status": "infeasible", "message": str(exc)}))
        return EXIT_INFEASIBLE
    except (RotcvxError, ValueError) as exc:
        print(f"rotcvx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if rep is not None:
        rep["status"] = "ok"
        rep["seed"] = args.seed
        rep["wall_ms"] = (time.perf_counter() - t0) * 1e3
        print(json.dumps(rep, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
