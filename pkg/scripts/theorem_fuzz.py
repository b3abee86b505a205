"""Random convex polygons of fixed perimeter versus the equal-perimeter disk."""
import argparse
import math

from insulair.search import maximality_test


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=60)
    ap.add_argument("--m", type=int, default=32)
    ap.add_argument("--perimeter", type=float, default=2 * math.pi)
    ap.add_argument("--resolution", type=int, nargs=2, default=(128, 32))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bad = 0
    for beta, delta in ((1.0, 1.0), (0.2, 0.5), (10.0, 0.3)):
        rep = maximality_test(args.samples, args.m, args.perimeter, beta, delta,
                              tuple(args.resolution), seed=args.seed)
        bad += len(rep.violations)
        print(f"beta={beta:5} delta={delta:4}  I_disk={rep.I_disk:.5f}  tol={rep.tol:.2e}  "
              f"max I={max(rep.values):.5f}  min margin={min(rep.margins):.5f}  "
              f"violations={len(rep.violations)}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
