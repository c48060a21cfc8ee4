"""Command line front end.

Subcommands: diagnose, limit, grid, whitney, zeros, bumps.  Exit status is 0
on success, 2 on a usage error and 3 when a numerical module fails; the error
name is written to stderr in both failure cases.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import ExprError, NotComplexLinearError, QltError
from .expr import Expr, parse
from .extension import NEAR_TOL, quotient_eval
from .fixtures import bump_sum, catalog, fixture
from .limits import DEFAULT_SAMPLES, PathSpec, path_limit_empirical, path_limit_formula
from .ratio import derivative_ratio
from .whitney import Factor1D, remainder_table
from .zerofind import nearest_zero, refine_zero

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


def fmt(v: float) -> str:
    """Shortest round-trip decimal text; 'nan', 'inf', '-inf' for non-finite values."""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == 0:
        v = 0.0  # drop the sign of zero
    return repr(v)


def _json_num(v: float):
    v = float(v)
    return v if math.isfinite(v) else None


def _cplx(z: complex) -> list:
    return [_json_num(z.real), _json_num(z.imag)]


def _reals(text: str, flag: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip() != ""]
    except ValueError:
        raise UsageError(flag, f"expected comma separated reals, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(flag, f"expected finite reals, got {text!r}")
    return vals


def _names(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _parse_expr(source: str, variables: Sequence[str], flag: str) -> Expr:
    try:
        return parse(source, variables)
    except ExprError as exc:
        raise UsageError(flag, exc.describe()) from None
    except ValueError as exc:
        raise UsageError("--vars", str(exc)) from None


@dataclass
class Pair:
    name: str
    f: Expr
    g: Expr


def _pair(args) -> Pair:
    if getattr(args, "fixture", None):
        if args.f or args.g:
            raise UsageError("--fixture", "give either --fixture or --f/--g, not both")
        try:
            p = fixture(args.fixture)
        except KeyError as exc:
            raise UsageError("--fixture", str(exc.args[0])) from None
        return Pair(p.name, p.f, p.g)
    if not args.f or not args.g:
        raise UsageError("--f" if not args.f else "--g", "both --f and --g are required without --fixture")
    variables = _names(args.vars)
    return Pair("custom", _parse_expr(args.f, variables, "--f"), _parse_expr(args.g, variables, "--g"))


def _env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(name, f"expected an integer, got {raw!r}") from None
    if value < minimum:
        raise UsageError(name, f"must be at least {minimum}")
    return value


def _quad_order() -> int:
    return _env_int("QLT_QUAD_ORDER", 32)


def _dump(doc, out: TextIO) -> None:
    out.write(json.dumps(doc, separators=(",", ":"), allow_nan=False))
    out.write("\n")


# --------------------------------------------------------------------------
# diagnose

def cmd_diagnose(args, out: TextIO) -> int:
    pair = _pair(args)
    point = _reals(args.point, "--point")
    if len(point) != pair.f.n:
        raise UsageError("--point", f"expected {pair.f.n} coordinates, got {len(point)}")
    zero = nearest_zero(pair.f, pair.g, point, args.zero_tol, args.rank_tol)
    ratio = derivative_ratio(zero.jac_f, zero.jac_g, rank_tol=args.rank_tol,
                             classify_tol=args.tol)
    doc = {
        "pair": pair.name,
        "f": str(pair.f),
        "g": str(pair.g),
        "query": point,
        "zero": zero.as_dict(),
        "A": ratio.A.tolist(),
        "residual": ratio.residual,
        "sigma": list(ratio.sigma),
        "det": ratio.det,
    }
    cls = ratio.as_dict()
    doc["classification"] = cls["classification"]
    doc["defect"] = cls["defect"]
    if "lambda" in cls:
        doc["lambda"] = cls["lambda"]
    else:
        doc["reason"] = cls["reason"]
    _dump(doc, out)
    return EXIT_OK


# --------------------------------------------------------------------------
# limit

def cmd_limit(args, out: TextIO) -> int:
    pair = _pair(args)
    if args.path:
        paths = list(args.path)
    elif args.fixture:
        paths = [lim.path for lim in fixture(args.fixture).limits]
    else:
        raise UsageError("--path", "required without --fixture")
    samples = DEFAULT_SAMPLES if args.samples is None else tuple(_reals(args.samples, "--samples"))
    records = []
    for source in paths:
        try:
            path = PathSpec.parse(source, t0=args.t0)
        except ExprError as exc:
            raise UsageError("--path", exc.describe()) from None
        if path.n != pair.f.n:
            raise UsageError("--path", f"expected {pair.f.n} components, got {path.n}")
        formula = path_limit_formula(pair.f, pair.g, path)
        emp = path_limit_empirical(pair.f, pair.g, path, samples)
        records.append({
            "path": source,
            "formula": _cplx(formula.value),
            "g_prime": _cplx(formula.g_prime),
            "empirical": _cplx(emp.value),
            "discrepancy": abs(formula.value - emp.value),
            "table": [[t, *_cplx(q)] for t, q in emp.table],
        })
    _dump({"pair": pair.name, "limits": records}, out)
    return EXIT_OK


# --------------------------------------------------------------------------
# grid

@dataclass
class GridJob:
    f: Expr
    g: Expr
    window: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    resolution: tuple[int, int] = (101, 101)
    slice: tuple[float, ...] = ()
    output: str = "-"
    format: str = "csv"
    near_tol: float = NEAR_TOL
    name: str = "custom"
    quad_order: int | None = None
    threads: int = 1

    def validate(self) -> None:
        nx, ny = self.resolution
        if nx < 2 or ny < 2:
            raise UsageError("--res", "nx and ny must be at least 2")
        xmin, xmax, ymin, ymax = self.window
        if not (xmax > xmin and ymax > ymin):
            raise UsageError("--window", "window is degenerate")
        if len(self.slice) != self.f.n - 2:
            raise UsageError("--slice", f"need {self.f.n - 2} values for the coordinates beyond the first two")
        if self.format not in ("csv", "json"):
            raise UsageError("--format", "must be csv or json")


def _grid_row(job: GridJob, y: float, xs: np.ndarray) -> list[tuple[float, float, float, float, str]]:
    rows = []
    for x in xs:
        point = [float(x), float(y), *job.slice]
        try:
            q = quotient_eval(job.f, job.g, point, near_tol=job.near_tol, quad_order=job.quad_order)
            rows.append((float(x), float(y), q.value.real, q.value.imag, q.method))
        except NotComplexLinearError:
            rows.append((float(x), float(y), math.nan, math.nan, "on_gamma_undefined"))
        except QltError:
            rows.append((float(x), float(y), math.nan, math.nan, "error"))
    return rows


def compute_grid(job: GridJob) -> list[tuple[float, float, float, float, str]]:
    """Grid records ordered by y, then x."""
    job.validate()
    xmin, xmax, ymin, ymax = job.window
    nx, ny = job.resolution
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    if job.threads > 1:
        with ThreadPoolExecutor(max_workers=job.threads) as pool:
            chunks = list(pool.map(lambda y: _grid_row(job, y, xs), ys))
    else:
        chunks = [_grid_row(job, y, xs) for y in ys]
    return [r for chunk in chunks for r in chunk]


def emit_grid(job: GridJob, out: TextIO) -> None:
    records = compute_grid(job)
    if job.format == "csv":
        lines = ["x,y,re,im,method"]
        lines += [f"{fmt(x)},{fmt(y)},{fmt(re_)},{fmt(im)},{m}" for x, y, re_, im, m in records]
        out.write("\n".join(lines) + "\n")
    else:
        docs = [{"x": x, "y": y, "re": _json_num(re_), "im": _json_num(im), "method": m}
                for x, y, re_, im, m in records]
        out.write(json.dumps(docs, separators=(",", ":"), allow_nan=False) + "\n")


def _grid_job(args) -> GridJob:
    job_doc = {}
    if args.job:
        try:
            with open(args.job) as fh:
                job_doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError("--job", str(exc)) from None
        if not isinstance(job_doc, dict):
            raise UsageError("--job", "expected a JSON object")
    for key in ("fixture", "f", "g"):
        if getattr(args, key) is None and key in job_doc:
            setattr(args, key, job_doc[key])
    if args.vars is None:
        v = job_doc.get("vars", "x,y")
        args.vars = ",".join(v) if isinstance(v, list) else v
    pair = _pair(args)

    def pick(flag: str, key: str, default):
        value = getattr(args, flag)
        if value is not None:
            return value
        return job_doc.get(key, default)

    window = pick("window", "window", "-1,1,-1,1")
    window = _reals(window, "--window") if isinstance(window, str) else [float(v) for v in window]
    if len(window) != 4:
        raise UsageError("--window", "expected xmin,xmax,ymin,ymax")
    res = pick("res", "resolution", "101,101")
    res = _reals(res, "--res") if isinstance(res, str) else list(res)
    if len(res) != 2 or any(r != int(r) for r in res):
        raise UsageError("--res", "expected two integers nx,ny")
    sl = pick("slice", "slice", "")
    sl = (_reals(sl, "--slice") if sl.strip() else []) if isinstance(sl, str) else [float(v) for v in sl]
    job = GridJob(
        pair.f, pair.g,
        window=tuple(window),
        resolution=(int(res[0]), int(res[1])),
        slice=tuple(sl),
        output=pick("out", "output", "-"),
        format=pick("format", "format", "csv"),
        near_tol=float(pick("near_tol", "near_tol", NEAR_TOL)),
        name=pair.name,
        quad_order=_quad_order(),
        threads=_env_int("QLT_THREADS", 1),
    )
    job.validate()
    return job


def cmd_grid(args, out: TextIO) -> int:
    job = _grid_job(args)
    if job.output == "-":
        emit_grid(job, out)
    else:
        with open(job.output, "w", newline="\n") as fh:
            emit_grid(job, fh)
    return EXIT_OK


# --------------------------------------------------------------------------
# whitney

def cmd_whitney(args, out: TextIO) -> int:
    if args.path:
        variables = _names(args.vars)
        expr = _parse_expr(args.f, variables, "--f")
        try:
            path = PathSpec.parse(args.path)
        except ExprError as exc:
            raise UsageError("--path", exc.describe()) from None
        if path.n != expr.n:
            raise UsageError("--path", f"expected {expr.n} components, got {path.n}")
    else:
        variables = _names(args.vars) if args.vars else ["x"]
        if len(variables) != 1:
            raise UsageError("--vars", "a one-variable expression is expected without --path")
        expr = _parse_expr(args.f, variables, "--f")
        path = None
    if args.order < 1:
        raise UsageError("--order", "must be at least 1")
    f1d = Factor1D(expr, args.order, path)
    points = _reals(args.points, "--points")
    lines = ["x,j,re,im"]
    for x, j, v in remainder_table(f1d, points, _quad_order()):
        lines.append(f"{fmt(x)},{j},{fmt(v.real)},{fmt(v.imag)}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# zeros

def _read_seeds(path: str) -> list[list[float]]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("--seeds", str(exc)) from None
    seeds = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            seeds.append(_reals(line, "--seeds"))
    return seeds


def cmd_zeros(args, out: TextIO) -> int:
    pair = _pair(args)
    seeds = [_reals(s, "--seed") for s in (args.seed or [])]
    if args.seeds:
        seeds += _read_seeds(args.seeds)
    if not seeds:
        raise UsageError("--seeds", "no seeds given")
    n = pair.f.n
    names = pair.f.variables
    lines = [",".join(["index", "status", *names, "residual_f", "residual_g", "sigma2_f", "sigma2_g"])]
    failed = 0
    for k, seed in enumerate(seeds):
        if len(seed) != n:
            raise UsageError("--seeds", f"seed {k} has {len(seed)} coordinates, expected {n}")
        try:
            z = refine_zero(pair.f, pair.g, seed, args.zero_tol, args.rank_tol, args.max_iter)
        except QltError as exc:
            failed += 1
            print(f"error: seed {k}: {exc.describe()}", file=args.stderr)
            lines.append(",".join([str(k), exc.code, *["nan"] * (n + 4)]))
            continue
        vals = [*z.location, z.residual_f, z.residual_g, z.sigma2_f, z.sigma2_g]
        lines.append(",".join([str(k), "ok", *map(fmt, vals)]))
    out.write("\n".join(lines) + "\n")
    return EXIT_NUMERIC if failed else EXIT_OK


# --------------------------------------------------------------------------
# bumps

def cmd_bumps(args, out: TextIO) -> int:
    if args.n < 1:
        raise UsageError("--n", "must be at least 1")
    if args.samples < 1:
        raise UsageError("--samples", "must be at least 1")
    lines = ["t,x,y,z,value"]
    for k in range(1, args.samples + 1):
        t = 2.0 ** -k
        p = (t, 0.0, args.curve * math.sqrt(t))
        lines.append(",".join(fmt(v) for v in (t, *p, bump_sum(p, args.n))))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------

def _add_pair_args(p: argparse.ArgumentParser, vars_default: str | None = "x,y") -> None:
    p.add_argument("--fixture", help="catalogued pair: " + ", ".join(c.name for c in catalog()))
    p.add_argument("--f", help="numerator expression")
    p.add_argument("--g", help="denominator expression")
    p.add_argument("--vars", default=vars_default, help="comma separated variable names (default x,y)")


def _add_tols(p: argparse.ArgumentParser) -> None:
    p.add_argument("--zero-tol", type=float, default=1e-10)
    p.add_argument("--rank-tol", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagnose", help="certify the nearest zero and classify the derivative ratio")
    _add_pair_args(p)
    p.add_argument("--point", required=True, help="query point, comma separated")
    p.add_argument("--tol", type=float, default=1e-6, help="scaled-rotation tolerance")
    _add_tols(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("limit", help="path limit by formula and by sampling")
    _add_pair_args(p)
    p.add_argument("--path", action="append", help="path components in t, e.g. 't,2*t' (repeatable)")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--samples", help="offsets from t0, decreasing in magnitude")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("grid", help="emit f/g on a 2-D grid as CSV or JSON")
    _add_pair_args(p, vars_default=None)
    p.add_argument("--window", help="xmin,xmax,ymin,ymax (default -1,1,-1,1)")
    p.add_argument("--res", help="nx,ny (default 101,101)")
    p.add_argument("--slice", help="fixed values of coordinates 3..n")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file or - for stdout")
    p.add_argument("--near-tol", type=float)
    p.add_argument("--job", help="JSON file with the grid job fields")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("whitney", help="derivatives of the Hadamard remainder g(x) = (f(x)-f(0))/x")
    p.add_argument("--f", required=True)
    p.add_argument("--vars", default=None, help="variable names (default x)")
    p.add_argument("--path", help="optional path in t along which f is read")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--points", required=True)
    p.set_defaults(func=cmd_whitney)

    p = sub.add_parser("zeros", help="refine seeds to certified common simple zeros")
    _add_pair_args(p)
    p.add_argument("--seeds", help="file with one comma separated seed per line")
    p.add_argument("--seed", action="append", help="a single seed (repeatable)")
    p.add_argument("--max-iter", type=int, default=50)
    _add_tols(p)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("bumps", help="bump-sum field along (t, 0, a sqrt(t)) at t = 2^-k")
    p.add_argument("--curve", type=float, default=2.0, help="a in (t, 0, a sqrt t)")
    p.add_argument("--n", type=int, default=20, help="truncation N")
    p.add_argument("--samples", type=int, default=20, help="k = 1..samples")
    p.set_defaults(func=cmd_bumps)
    return parser


_NUMLIST = re.compile(r"-[\d.]")


def _join_negative_values(argv: list[str]) -> list[str]:
    # lets "--point -0.1,0.2" through argparse, which would read it as a flag
    out = []
    k = 0
    while k < len(argv):
        a = argv[k]
        if (a.startswith("--") and "=" not in a and k + 1 < len(argv)
                and _NUMLIST.match(argv[k + 1])):
            out.append(f"{a}={argv[k + 1]}")
            k += 2
            continue
        out.append(a)
        k += 1
    return out


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    args.stderr = stderr
    try:
        return args.func(args, stdout)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except QltError as exc:
        print(f"error: {exc.describe()}", file=stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: io.{type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
