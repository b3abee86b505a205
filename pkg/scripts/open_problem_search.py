"""Minimize dispersion over convex m-gons under an area or perimeter constraint.

Writes the trace (JSON lines) and the best shape next to --out.
"""
import argparse
import json
import math
from dataclasses import asdict
from pathlib import Path

from insulair.fem import dispersion_of
from insulair.geometry import ConvexPolygon, Disk, area, perimeter
from insulair.search import SearchConfig, minimize_dispersion, regularity_deviation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--constraint", choices=["area", "perimeter"], default="area")
    ap.add_argument("--value", type=float, default=math.pi)
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--beta", type=float, default=10.0)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--restarts", type=int, default=10)
    ap.add_argument("--max-iters", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/open_problem")
    args = ap.parse_args()

    cfg = SearchConfig(args.constraint, args.value, args.m, args.beta, args.delta, args.seed,
                       args.restarts, args.max_iters)
    trace = minimize_dispersion(cfg)
    poly = ConvexPolygon(trace.best_polygon)
    if args.constraint == "area":
        R = math.sqrt(args.value / math.pi)
    else:
        R = args.value / (2 * math.pi)
    disk = dispersion_of(Disk(R), args.beta, args.delta, cfg.final_resolution)
    dev = regularity_deviation(trace.best_h)
    print(f"restart values: {', '.join(f'{v:.5f}' for v in trace.restart_values)}")
    print(f"best I = {trace.final_value:.6f} at {cfg.final_resolution}; disk with same constraint: {disk:.6f}")
    print(f"area {area(poly):.6f}, perimeter {perimeter(poly):.6f}, regularity deviation {100 * dev:.2f}%")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trace.jsonl", "w") as fh:
        for it in trace.iterations:
            fh.write(json.dumps(it) + "\n")
    (out / "shape.json").write_text(json.dumps({"type": "polygon", "vertices": trace.best_polygon}))
    (out / "summary.json").write_text(json.dumps({**trace.to_json(), "disk_value": disk,
                                                  "regularity_deviation": dev,
                                                  "config": asdict(cfg)}, indent=2))


if __name__ == "__main__":
    main()
