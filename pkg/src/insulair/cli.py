"""Command-line interface: radial | compute | sweep | verify | optimize.

Every command prints a JSON run record and, with ``--out``, writes it (plus
any tables or traces) into that directory.  Exit codes: 0 success,
1 verification failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (apriori_bounds, lemma_check, lemma_constant, paradox_check,
                     shrinking_square_experiment, web_bound_2d, web_bound_nd)
from .fem import DEFAULT_RESOLUTION, dispersion_of, solve_layer
from .geometry import (Disk, af_margins, area, equivalent_ball_radius, minkowski_offset, perimeter,
                       quermass_ball, quermass_box, rectangle, regular_polygon, steiner_perimeter,
                       steiner_volume)
from .radial import (DIRICHLET, RadialConfig, dispersion_ball, dispersion_limit_dirichlet, is_dirichlet,
                     monotonicity_threshold, record)
from .search import SearchConfig, maximality_test, minimize_dispersion, random_convex, support_to_polygon
from .shapes import ShapeSpecError, load_shape, shape_to_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- helpers -------------------------------------------------------------------

def parse_beta(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "dirichlet"):
        return DIRICHLET
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("beta must be >= 0 or 'inf'")
    return value


def parse_resolution(text: str) -> tuple[int, int]:
    try:
        nt, ns = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("resolution must look like 256x64")
    return nt, ns


def parse_list(text: str, conv=float) -> list:
    return [conv(x) for x in text.split(",") if x.strip()]


def jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return None
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return jsonable(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: jsonable(r.get(c)) for c in columns})
    return buf.getvalue()


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return jsonable(cfg)


# --- commands ------------------------------------------------------------------

def cmd_radial(args) -> tuple[dict, int]:
    cfg = RadialConfig(args.n, args.R, args.beta, args.delta)
    out = record(cfg)
    if args.betas or args.deltas:
        betas = parse_list(args.betas, parse_beta) if args.betas else [args.beta]
        deltas = parse_list(args.deltas) if args.deltas else [args.delta]
        if not betas or not deltas:
            raise UsageError("empty sweep grid")
        rows = [record(RadialConfig(args.n, args.R, b, d)) for b in betas for d in deltas]
        out["table"] = rows
        if args.out:
            write_atomic(Path(args.out) / "radial.csv",
                         to_csv(rows, ["n", "R", "beta", "delta", "I", "c", "threshold"]))
    return out, EXIT_OK


def _load(args):
    if args.shape is None:
        if args.R is None:
            raise UsageError("need --shape or --R")
        return Disk(args.R)
    return load_shape(args.shape)


def cmd_compute(args) -> tuple[dict, int]:
    shape = _load(args)
    if isinstance(shape, list):  # box in n >= 3: analytic quantities only
        q = quermass_box(shape)
        wb = web_bound_nd(q, args.beta, args.delta, "box")
        return {"shape": shape_to_spec(shape), "quermass": list(q.W),
                "equivalent_ball_radius": equivalent_ball_radius(q),
                "I_upper_bound": wb.bound, "I_equivalent_ball": wb.I_star,
                "betaP_Omega": args.beta * steiner_perimeter(q, args.delta)}, EXIT_OK
    if args.delta == 0 or args.beta == 0:
        I = dispersion_of(shape, args.beta, args.delta, args.resolution)
        return {"shape": shape_to_spec(shape), "I": I}, EXIT_OK
    sol = solve_layer(shape, args.beta, args.delta, args.resolution)
    bounds = apriori_bounds(shape, args.beta, args.delta, sol.dispersion, args.resolution)
    out = {"shape": shape_to_spec(shape), **sol.to_json(), "apriori": bounds.to_json()}
    if isinstance(shape, Disk):
        out["oracle"] = dispersion_ball(RadialConfig(2, shape.radius, args.beta, args.delta))
    else:
        wb = web_bound_2d(shape, args.beta, args.delta)
        out["web_bound"] = wb.bound
        out["I_equal_perimeter_disk"] = wb.I_star
    return out, EXIT_OK


def cmd_sweep(args) -> tuple[dict, int]:
    shape = _load(args)
    betas = parse_list(args.betas, parse_beta)
    deltas = parse_list(args.deltas)
    if not betas or not deltas:
        raise UsageError("empty sweep grid")
    if isinstance(shape, list):
        raise UsageError("sweep supports planar shapes only")
    rows = []
    for b in betas:
        for d in deltas:
            if isinstance(shape, Disk):
                R = shape.radius
                I = dispersion_ball(RadialConfig(2, R, b, d))
                cap = dispersion_limit_dirichlet(2, R, d)
                betaP = b * 2 * math.pi * (R + d) if not is_dirichlet(b) else math.inf
                row = {"beta": b, "delta": d, "I": I, "bound_betaP": betaP, "bound_dirichlet": cap,
                       "threshold": monotonicity_threshold(2, b, R) if not is_dirichlet(b) else 0.0}
            else:
                rep = apriori_bounds(shape, b, d, None, args.resolution)
                row = {"beta": b, "delta": d, "I": rep.I, "bound_betaP": rep.betaP,
                       "bound_dirichlet": rep.capacity}
            rows.append(row)
    cols = ["beta", "delta", "I", "bound_betaP", "bound_dirichlet"]
    if isinstance(shape, Disk):
        cols.append("threshold")
    text = to_csv(rows, cols)
    if args.out:
        write_atomic(Path(args.out) / "sweep.csv", text)
    return {"shape": shape_to_spec(shape), "rows": rows, "csv": text}, EXIT_OK


# verification suites: each returns a JSON-ready dict with a 'passed' flag

def suite_steiner(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for i in range(100):
        D = support_to_polygon(random_convex(int(rng.integers(3, 40)), float(rng.uniform(0.5, 10)), rng).h)
        P, A = perimeter(D), area(D)
        for d in (0.1, 0.5, 1.0, 2.0):
            off = minkowski_offset(D, d)
            worst = max(worst, abs(off.length - (P + 2 * math.pi * d)) / off.length,
                        abs(off.area - (A + P * d + math.pi * d * d)) / off.area)
    return {"passed": worst <= 1e-10, "max_relative_error": worst}


def suite_af(args):
    ball_max = max(abs(v) for n in range(2, 6) for v in af_margins(quermass_ball(n, 1.7)).values())
    boxes = [[1, 1], [2, 1], [1, 1, 1], [2, 1, 1], [3, 2, 1, 0.5]]
    box_min = min(min(af_margins(quermass_box(b)).values()) for b in boxes if b != [1, 1])
    cube = quermass_box([1, 1, 1])
    return {"passed": ball_max <= 1e-12 and box_min > 0,
            "ball_max_abs_margin": ball_max, "box_min_margin": box_min,
            "cube_volume_delta1": steiner_volume(cube, 1.0)}


def suite_monotonicity(args):
    rng = np.random.default_rng(args.seed)
    bad = 0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        R = float(rng.uniform(0.2, 2.0))
        beta = float(rng.uniform(0.05, 0.95)) * (n - 1) / R
        t = monotonicity_threshold(n, beta, R)
        grid = np.linspace(0, 4 * t + 1, 201)[1:]
        I = np.array([dispersion_ball(RadialConfig(n, R, beta, d)) for d in grid])
        k = np.flatnonzero(np.diff(I) < 0)
        if len(k) == 0 or abs(grid[k[0]] - t) > 1.5 * (grid[1] - grid[0]) or np.any(np.diff(I)[k[0]:] > 0):
            bad += 1
    return {"passed": bad == 0, "failures": bad}


def suite_maximality(args):
    reps = []
    for beta, delta in ((1.0, 1.0), (0.2, 0.5), (10.0, 0.3)):
        r = maximality_test(args.samples, 32, 2 * math.pi, beta, delta, args.resolution, seed=args.seed)
        reps.append({"beta": beta, "delta": delta, "I_disk": r.I_disk, "tol": r.tol,
                     "min_margin": min(r.margins), "violations": len(r.violations)})
    return {"passed": all(r["violations"] == 0 for r in reps), "settings": reps}


def web_bound_corpus():
    return {
        "square": rectangle(1, 1),
        "rectangle_2x1": rectangle(2, 1),
        "thin_rectangle": rectangle(2, 0.01),
        "triangle": regular_polygon(3, 1.0),
        "hexagon": regular_polygon(6, 1.0),
        "random_16": support_to_polygon(random_convex(16, 5.0, 7).h),
    }


def suite_webbound(args):
    rows = []
    ok = True
    for name, D in web_bound_corpus().items():
        r = web_bound_2d(D, 1.0, 1.0, args.resolution, name)
        rows.append(r.to_json())
        ok &= r.fem_value <= r.bound <= r.I_star + 1e-6
    cube = web_bound_nd(quermass_box([1, 1, 1]), 1.0, 1.0, "unit_cube")
    rows.append(cube.to_json())
    ok &= cube.bound < cube.I_star
    return {"passed": bool(ok), "reports": rows}


def suite_lemma(args):
    lim = [abs(lemma_constant(n, 1.0, 1e-9) - (n - 1)) for n in (2, 3)]
    rep = lemma_check(args.R, 0.5, 500, seed=args.seed)
    return {"passed": rep.passed and max(lim) < 1e-6, "limit_errors": lim,
            "C": rep.C, "min_margin": rep.min_margin, "counterexamples": rep.counterexamples}


def suite_paradox(args):
    rep = paradox_check(args.R, args.beta, args.samples, args.resolution, seed=args.seed)
    margins = [s["margin"] for s in rep.samples]
    return {"passed": rep.passed, "delta0": rep.delta0, "min_margin": min(margins),
            "samples": len(margins)}


def suite_squares(args):
    rows = shrinking_square_experiment([1, 2, 4, 8, 16, 32], 1.0, 1.0, args.resolution)
    I = [r["I"] for r in rows]
    dec = all(b < a for a, b in zip(I, I[1:]))
    per = all(abs(r["P_D"] - 1) < 1e-12 for r in rows if r["P_D"] is not None)
    return {"passed": dec and per, "rows": rows, "ratio_last_first": I[-1] / I[0]}


SUITES = {
    "steiner": suite_steiner, "af": suite_af, "monotonicity": suite_monotonicity,
    "lemma": suite_lemma, "webbound": suite_webbound, "maximality": suite_maximality,
    "paradox": suite_paradox, "squares": suite_squares,
}


def cmd_verify(args) -> tuple[dict, int]:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite in ("paradox", "all") and not args.beta < 1 / args.R:
        raise UsageError("paradox regime requires beta < (n-1)/R")
    results = {name: SUITES[name](args) for name in names}
    passed = all(r["passed"] for r in results.values())
    return {"passed": passed, "suites": results}, (EXIT_OK if passed else EXIT_FAIL)


def cmd_optimize(args) -> tuple[dict, int]:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
    for key in ("constraint", "value", "m", "beta", "delta", "seed", "restarts", "max_iters", "resolution"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if "constraint" not in cfg or "value" not in cfg:
        raise UsageError("optimize needs a constraint type and value")
    try:
        config = SearchConfig(**cfg)
    except TypeError as exc:
        raise UsageError(f"bad optimize config: {exc}")
    trace = minimize_dispersion(config)
    shape = {"type": "polygon", "vertices": trace.best_polygon}
    if args.out:
        out = Path(args.out)
        write_atomic(out / "trace.jsonl", "".join(json.dumps(jsonable(it), sort_keys=True) + "\n"
                                                  for it in trace.iterations))
        write_atomic(out / "shape.json", dumps(shape))
    return {**trace.to_json(), "shape": shape}, EXIT_OK


# --- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="insulair", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, resolution=DEFAULT_RESOLUTION):
        sp.add_argument("--out", help="directory for the run record and tables")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--resolution", type=parse_resolution, default=resolution,
                        help="N_theta x N_s, e.g. 256x64")

    sp = sub.add_parser("radial", help="closed-form concentric-ball values")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--beta", type=parse_beta, default=1.0)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--betas", help="comma-separated beta values for a table")
    sp.add_argument("--deltas", help="comma-separated delta values for a table")
    common(sp)
    sp.set_defaults(func=cmd_radial)

    for name, func, help_ in (("compute", cmd_compute, "FEM dispersion of a shape"),
                              ("sweep", cmd_sweep, "(beta, delta) grid for a shape")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--shape", help="shape spec JSON file")
        sp.add_argument("--R", type=float, help="disk radius (when no --shape)")
        if name == "compute":
            sp.add_argument("--beta", type=parse_beta, default=1.0)
            sp.add_argument("--delta", type=float, default=1.0)
        else:
            sp.add_argument("--betas", required=True)
            sp.add_argument("--deltas", required=True)
        common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", default="all", choices=["all", *SUITES])
    sp.add_argument("--beta", type=parse_beta, default=0.5)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=20)
    common(sp, resolution=(128, 32))
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("optimize", help="search for dispersion-minimizing convex polygons")
    sp.add_argument("--config", help="JSON search config")
    sp.add_argument("--constraint", choices=["perimeter", "area"])
    sp.add_argument("--value", type=float)
    sp.add_argument("--m", type=int)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--max-iters", dest="max_iters", type=int)
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--resolution", type=parse_resolution)
    sp.set_defaults(func=cmd_optimize)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        outputs, code = args.func(args)
    except (UsageError, ShapeSpecError, ValueError) as exc:
        print(f"insulair {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rec = {"command": args.command, "config": _config(args), "version": __version__,
           "outputs": outputs, "duration": time.perf_counter() - start}
    text = dumps(rec)
    print(text)
    if getattr(args, "out", None):
        write_atomic(Path(args.out) / f"{args.command}.json", text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
