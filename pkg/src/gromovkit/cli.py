"""Command-line front end: ``gromovkit {gen,dist,verify,sweep}``.

Spaces are JSON files ``{"labels": [...], "dist": [[...]]}``.  Results go
to stdout as JSON (``dist``, ``verify --json``) or to files given with
``--out``.  The exit status is 0 when every check passes, 1 when a check
fails, and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .constructions import glue, l2_product
from .family import BranchSelectionError, ConfigError, FamilyConfig, default_config, sine_curve, sweep
from .gh import gh_bounds, hausdorff
from .metric import MetricStructureError, load_space, to_dict
from .pointed import PointedSpace, RoughIsometryCert, check_rough_isometry, pgh_upper
from .spider import SpiderParams, build_spider
from .suites import SUITES, run_suite


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _radius(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def cmd_gen(args) -> int:
    if args.kind == "spider":
        if args.a is None:
            raise UsageError("gen spider needs --a a1,a2,...")
        sp = build_spider(SpiderParams(tuple(_floats(args.a))), args.grid, args.K)
        _emit(sp.to_dict(), args.out)
    elif args.kind == "sine":
        _emit(to_dict(sine_curve(args.n, args.samples)), args.out)
    elif args.kind == "config":
        _emit(default_config(args.grid).to_dict(), args.out)
    else:
        if len(args.inputs) != 2:
            raise UsageError(f"gen {args.kind} needs two space files")
        X, Y = (load_space(p) for p in args.inputs)
        if args.kind == "product":
            _emit(to_dict(l2_product(X, Y)), args.out)
        else:
            px = args.px if args.px is not None else X.labels[0]
            py = args.py if args.py is not None else Y.labels[0]
            if set(X.labels) & set(Y.labels):
                X, Y, px, py = X.with_prefix("X:"), Y.with_prefix("Y:"), "X:" + px, "Y:" + py
            _emit(to_dict(glue(X, Y, px, py)), args.out)
    return 0


def _pointed(path: str, base: int) -> PointedSpace:
    return PointedSpace(load_space(path), base)


def cmd_dist(args) -> int:
    if args.mode == "gh":
        if len(args.inputs) != 2:
            raise UsageError("dist gh needs two space files")
        X, Y = (load_space(p) for p in args.inputs)
        _emit(gh_bounds(X, Y, cap=args.cap), None)
        return 0
    if args.mode == "hausdorff":
        if len(args.inputs) != 1 or args.A is None or args.B is None:
            raise UsageError("dist hausdorff needs one space file plus --A and --B label lists")
        Z = load_space(args.inputs[0])
        A = [Z.index(s) for s in args.A.split(",")]
        B = [Z.index(s) for s in args.B.split(",")]
        _emit({"hausdorff": hausdorff(A, B, Z)}, None)
        return 0
    # pgh-bound: either a stored certificate or a map to certify
    if args.cert:
        obj = json.loads(Path(args.cert).read_text())
        cert = RoughIsometryCert.from_dict(obj)
        if "X" in obj and "Y" in obj:
            X, Y = PointedSpace.from_dict(obj["X"]), PointedSpace.from_dict(obj["Y"])
            cert = check_rough_isometry(cert.mapping, X, Y, cert.R, cert.eps)
    else:
        if len(args.inputs) != 2 or args.map is None or args.eps is None:
            raise UsageError("dist pgh-bound needs --cert, or two space files with --map and --eps")
        X, Y = _pointed(args.inputs[0], args.base_x), _pointed(args.inputs[1], args.base_y)
        cert = check_rough_isometry(_ints(args.map), X, Y, _radius(args.R), args.eps)
    result = {"certificate": cert.to_dict()}
    if cert.verdict:
        result["bound"] = pgh_upper(cert)
    _emit(result, None)
    return 0 if cert.verdict else 1


def cmd_verify(args) -> int:
    kwargs = {}
    if args.max_size is not None:
        if args.suite not in ("gh-axioms", "perturbation", "glue-restrict"):
            raise UsageError(f"--max-size does not apply to {args.suite}")
        kwargs["max_size"] = args.max_size
    report = run_suite(args.suite, args.trials, args.seed, args.jobs, **kwargs)
    if args.json:
        _emit(report.to_dict(), None)
    else:
        print(report.summary())
        for f in report.failures[:10]:
            print(f"  trial {f['trial']}: {f['detail']}")
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=1))
    return 0 if report.ok else 1


def cmd_sweep(args) -> int:
    cfg = default_config() if args.config == "default" else FamilyConfig.load(args.config)
    grid = args.grid or cfg.grid
    result = sweep(cfg, grid, args.k)
    if args.out:
        result.write_csv(args.out)
    metric_ok = all(r["is_metric"] for r in result.rows)
    print(f"k={result.k}")
    print(f"rows={len(result.rows)} min_fingerprint_sep={result.injectivity.min_separation:.6g} all_metric={metric_ok}")
    return 0 if metric_ok and result.injectivity.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gromovkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a space (or the default family config) as JSON")
    g.add_argument("kind", choices=["spider", "sine", "product", "glue", "config"])
    g.add_argument("inputs", nargs="*", help="space files for product/glue")
    g.add_argument("--a", help="comma-separated leg parameters a_1,...,a_N")
    g.add_argument("--grid", type=int, default=16, help="samples per leg, or grid side for config")
    g.add_argument("--K", type=float, default=1.0, help="spider scale")
    g.add_argument("--n", type=int, default=3, help="sine curve: x ranges over [2^-n, 1]")
    g.add_argument("--samples", type=int, default=128)
    g.add_argument("--px", help="glue point label in the first space")
    g.add_argument("--py", help="glue point label in the second space")
    g.add_argument("--out", help="output file (default: stdout)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dist", help="distances and bounds, printed as JSON")
    d.add_argument("mode", choices=["gh", "hausdorff", "pgh-bound"])
    d.add_argument("inputs", nargs="*")
    d.add_argument("--cap", type=int, default=6, help="largest size for the exact GH solver")
    d.add_argument("--A", help="hausdorff: comma-separated labels of the first subset")
    d.add_argument("--B", help="hausdorff: comma-separated labels of the second subset")
    d.add_argument("--cert", help="pgh-bound: certificate JSON")
    d.add_argument("--map", help="pgh-bound: comma-separated image index of each point of X")
    d.add_argument("--R", default="inf")
    d.add_argument("--eps", type=float)
    d.add_argument("--base-x", type=int, default=0)
    d.add_argument("--base-y", type=int, default=0)
    d.set_defaults(func=cmd_dist)

    v = sub.add_parser("verify", help="run a randomized verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--max-size", type=int)
    v.add_argument("--json", action="store_true", help="print the full report as JSON")
    v.add_argument("--out", help="also write the JSON report here")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="select a branch and tabulate the family over a grid")
    s.add_argument("config", help="config JSON, or 'default'")
    s.add_argument("--grid", type=int)
    s.add_argument("--k", type=int, help="use this branch instead of selecting one")
    s.add_argument("--out", help="CSV output")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, MetricStructureError, ValueError, KeyError, OSError) as exc:
        print(f"gromovkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BranchSelectionError as exc:
        print(f"gromovkit {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
