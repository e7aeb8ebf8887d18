"""Command-line interface.

    betaflow sample --dist trivariate-h --p 2 --q 1.5 --r 1 --n 1000 --seed 7
    betaflow density --dist matrix-beta2 --p 1.5 --q 1.5 --at 0.5,0,0.5
    betaflow transform big-psi --in points.csv
    betaflow verify theorem1 --p 2 --q 1.5 --r 1 --n 100000
    betaflow funceq --from-shapes 1,1,1 --grid 10
    betaflow perpetuity --eq t --init 1.01 --init 100

Exit codes: 0 success (every emitted report passed), 1 a verification
report failed, 2 usage or domain error.
"""
import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import distributions as dist
from . import transforms as tr
from .domain import (
    GenMatrixParams,
    HPoint,
    MatrixBetaParams,
    Sym2,
    TanTriple,
    TriShapeParams,
    UnitCube3,
)
from .errors import DomainError, UsageError
from .funceq import SolutionParams, max_grid_residual, params_from_shapes
from .rng import RngStream
from .scenarios import SCENARIOS, VerifyConfig, perpetuity_run, run_scenario

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    pass


# -- output helpers -----------------------------------------------------------


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dumps(payload):
    return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"


def write_csv(stream, header, columns):
    stream.write(",".join(header) + "\n")
    cols = [np.atleast_1d(np.asarray(c, dtype=float)) for c in columns]
    lines = [",".join(format(v, ".17g") for v in row) for row in zip(*cols)]
    if lines:
        stream.write("\n".join(lines) + "\n")


def read_csv(stream, width):
    reader = csv.reader(stream)
    rows = [r for r in reader if r]
    if not rows:
        raise CliError("empty CSV input")
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]
    data = np.array([[float(v) for v in r] for r in rows], dtype=float).reshape(-1, width)
    return tuple(data[:, k] for k in range(width))


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _floats(text, count=None):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise CliError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise CliError("missing shape flag(s): " + ", ".join("--" + m for m in missing))
    return [getattr(args, n) for n in names]


# -- distributions table ------------------------------------------------------

# name -> (shape flags, header, sampler(rng, args, n), logpdf(point, args))
def _dist_table():
    def tri(args):
        return TriShapeParams(*_need(args, "p", "q", "r"))

    def mb(args):
        return MatrixBetaParams(*_need(args, "p", "q"))

    def gm(args):
        return GenMatrixParams(*_need(args, "a", "b", "c"))

    return {
        "beta": (("x",),
                 lambda rng, a, n: (dist.sample_beta(rng, *_need(a, "a", "b"), size=n),),
                 lambda pt, a: dist.beta_logpdf(pt[0], *_need(a, "a", "b"))),
        "beta2": (("x",),
                  lambda rng, a, n: (dist.sample_beta2(rng, *_need(a, "a", "b"), size=n),),
                  lambda pt, a: dist.beta2_logpdf(pt[0], *_need(a, "a", "b"))),
        "dirichlet3": (("w1", "w2", "w3"),
                       lambda rng, a, n: dist.sample_dirichlet3(rng, *_need(a, "p", "r", "q"), size=n),
                       None),
        "theorem1-cube": (("y1", "y2", "y3"),
                          lambda rng, a, n: dist.sample_theorem1_cube(rng, tri(a), n),
                          None),
        "trivariate-h": (("x1", "x2", "x3"),
                         lambda rng, a, n: dist.sample_trivariate_H(rng, tri(a), n),
                         lambda pt, a: dist.trivariate_H_logpdf(HPoint(*pt), tri(a))),
        "matrix-beta2": (("x11", "x12", "x22"),
                         lambda rng, a, n: dist.sample_matrix_beta2(rng, mb(a), n),
                         lambda pt, a: dist.matrix_beta2_logpdf(Sym2(*pt), mb(a))),
        "gen-matrix": (("x11", "x12", "x22"),
                       lambda rng, a, n: dist.sample_gen_matrix(rng, gm(a), n),
                       lambda pt, a: dist.gen_matrix_logpdf(Sym2(*pt), gm(a))),
    }


DISTRIBUTIONS = tuple(_dist_table())


def cmd_sample(args):
    header, sampler, _ = _dist_table()[args.dist]
    if args.n < 1:
        raise CliError("--n must be positive")
    cols = sampler(RngStream(args.seed, 0), args, args.n)
    buf = io.StringIO()
    write_csv(buf, header, cols)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_density(args):
    header, _, logpdf = _dist_table()[args.dist]
    if logpdf is None:
        raise CliError(f"no density command for {args.dist}")
    point = _floats(args.at, len(header))
    value = logpdf(point, args)
    _emit(dumps({"schema": SCHEMA, "dist": args.dist, "at": point, "logpdf": value}), args.out)
    return EXIT_OK


# -- transforms -----------------------------------------------------------------

TRANSFORMS = {
    "psi1": (HPoint, ("y1", "y2", "y3"), lambda x: tr.psi(1, x)),
    "psi2": (HPoint, ("y1", "y2", "y3"), lambda x: tr.psi(2, x)),
    "psi-inv1": (UnitCube3, ("x1", "x2", "x3"), lambda y: tr.psi_inv(1, y)),
    "psi-inv2": (UnitCube3, ("x1", "x2", "x3"), lambda y: tr.psi_inv(2, y)),
    "big-psi": (UnitCube3, ("z1", "z2", "z3"), tr.big_psi),
    "jacobian1": (HPoint, ("jacobian",), lambda x: (tr.psi_jacobian(1, x),)),
    "jacobian2": (HPoint, ("jacobian",), lambda x: (tr.psi_jacobian(2, x),)),
    "tan1": (Sym2, ("diag", "schur", "v"), lambda x: tr.tan_triple(1, x)),
    "tan2": (Sym2, ("diag", "schur", "v"), lambda x: tr.tan_triple(2, x)),
    "tan-inv1": (TanTriple, ("x11", "x12", "x22"), lambda t: tr.tan_triple_inv(1, t)),
    "tan-inv2": (TanTriple, ("x11", "x12", "x22"), lambda t: tr.tan_triple_inv(2, t)),
    "kshirsagar": (Sym2, ("t11", "t12", "t22"), tr.kshirsagar_decompose),
    "neutrality": (UnitCube3, ("z1", "z2", "z3"), tr.neutrality_map),
    "dirichlet-rep": (UnitCube3, ("u", "v1", "v2"), tr.dirichlet_rep),
}


def cmd_transform(args):
    point_type, header, fn = TRANSFORMS[args.map]
    if args.input in (None, "-"):
        cols = read_csv(sys.stdin, 3)
    else:
        with open(args.input, newline="") as fh:
            cols = read_csv(fh, 3)
    result = fn(point_type(*cols))
    buf = io.StringIO()
    write_csv(buf, header, result)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- verify / funceq / perpetuity -----------------------------------------------


def _verify_params(args, name):
    keys = {
        "theorem1": "pqr", "theorem1-independence": "pqr", "dirichlet-rep": "pqr",
        "perpetuity-r": "pqr", "perpetuity-s": "pqr", "perpetuity-t": "pqr",
        "matrix-beta": "pq", "kshirsagar": "pq", "gen-matrix": "abc", "neutrality": "pqrs",
        "funceq-family": "pqr",
    }[name]
    params = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if name == "funceq-family" and args.from_shapes:
        params.update(zip("pqr", _floats(args.from_shapes, 3)))
    return params


def _config(args):
    cfg = VerifyConfig()
    cfg.seeds = tuple(range(args.seed, args.seed + args.n_seeds))
    cfg.min_pass = args.min_pass if args.min_pass is not None else math.ceil(0.8 * args.n_seeds)
    for name in ("n", "alpha", "grid", "bins", "burn", "keep"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if args.n_perm is not None:
        cfg.n_perm = args.n_perm
    return cfg


def cmd_verify(args):
    cfg = _config(args)
    names = SCENARIOS if args.scenario == "all" else (args.scenario,)
    results = []
    for name in names:
        start = time.perf_counter()
        res = run_scenario(name, cfg, _verify_params(args, name) if args.scenario != "all" else None)
        entry = res.to_dict()
        entry["seconds"] = round(time.perf_counter() - start, 3)
        results.append((res, entry))
    reports = [r for res, _ in results for r in res.reports]
    passed = all(r.passed for r in reports)
    payload = {
        "schema": SCHEMA,
        "config": {"n": cfg.n, "seeds": list(cfg.seeds), "min_pass": cfg.min_pass, "alpha": cfg.alpha,
                   "n_perm": cfg.n_perm, "bins": cfg.bins, "grid": cfg.grid},
        "scenarios": [entry for _, entry in results],
        "summary": {"reports": len(reports), "failed": sum(not r.passed for r in reports), "pass": passed},
    }
    if args.no_timing:
        for entry in payload["scenarios"]:
            entry.pop("seconds")
    _emit(dumps(payload), args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_funceq(args):
    if args.from_shapes:
        params = params_from_shapes(*_floats(args.from_shapes, 3))
    else:
        A = tuple(getattr(args, f"A{i}") for i in range(1, 7))
        params = SolutionParams(args.alpha, args.beta, args.gamma, A)
    if args.grid < 2:
        raise CliError("--grid must be at least 2")
    res = max_grid_residual(params, args.grid)
    _emit(dumps({"schema": SCHEMA, "max_residual": res, "grid": args.grid, "params": params.to_dict(),
                 "constraint_gap": params.constraint_gap}), args.out)
    return EXIT_OK


def cmd_perpetuity(args):
    cfg = VerifyConfig(seeds=(args.seed,), burn=args.burn, keep=args.keep)
    params = {"p": args.p, "q": args.q, "r": args.r}
    reports, diagnostics, kept = perpetuity_run(cfg, args.eq, params, args.init)
    if args.csv:
        buf = io.StringIO()
        write_csv(buf, ("state",), (kept,))
        _emit(buf.getvalue(), args.csv)
    passed = all(r.passed for r in reports)
    payload = {"schema": SCHEMA, "eq": args.eq, "params": params, "seed": args.seed,
               "reports": [r.to_dict() for r in reports], "diagnostics": diagnostics, "pass": passed}
    _emit(dumps(payload), args.out)
    return EXIT_OK if passed else EXIT_FAIL


# -- parser -----------------------------------------------------------------------


def _add_shapes(p, names):
    for name in names:
        p.add_argument(f"--{name}", type=float, default=None, help=f"shape parameter {name}")


def build_parser():
    parser = argparse.ArgumentParser(prog="betaflow", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a CSV sample from a distribution")
    p.add_argument("--dist", required=True, choices=DISTRIBUTIONS)
    _add_shapes(p, "abcpqr")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("density", help="evaluate a log-density at one point")
    p.add_argument("--dist", required=True, choices=DISTRIBUTIONS)
    _add_shapes(p, "abcpqr")
    p.add_argument("--at", required=True, help="comma-separated coordinates")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("transform", help="apply a map to every row of a 3-column CSV")
    p.add_argument("map", choices=tuple(TRANSFORMS))
    p.add_argument("--in", dest="input", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run a verification scenario")
    p.add_argument("scenario", choices=SCENARIOS + ("all",))
    _add_shapes(p, "abcpqrs")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="first seed of the seed list")
    p.add_argument("--n-seeds", type=int, default=20)
    p.add_argument("--min-pass", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None, help="significance level")
    p.add_argument("--n-perm", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--burn", type=int, default=None)
    p.add_argument("--keep", type=int, default=None)
    p.add_argument("--from-shapes", default=None, help="p,q,r for funceq-family")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("funceq", help="max residual of a solution-family member on a grid")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    for i in range(1, 7):
        p.add_argument(f"--A{i}", type=float, default=0.0)
    p.add_argument("--from-shapes", default=None, help="p,q,r")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_funceq)

    p = sub.add_parser("perpetuity", help="run a stochastic-equation chain")
    p.add_argument("--eq", required=True, choices=("r", "s", "t"))
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=1.5)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--burn", type=int, default=1000)
    p.add_argument("--keep", type=int, default=100_000)
    p.add_argument("--init", type=float, action="append", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="write kept states here")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_perpetuity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, DomainError, UsageError, ValueError) as exc:
        sys.stdout.write(dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
