"""Dispersion of the squares Q_k = (0, 1/k)^2 for growing k.

The decay is logarithmic in k for a fixed layer, so the ratio
I(Q_32)/I(Q_1) depends strongly on delta; both are printed.
"""
import argparse

from insulair.bounds import shrinking_square_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--deltas", type=float, nargs="+", default=[1.0, 0.01, 0.005])
    ap.add_argument("--ks", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--resolution", type=int, nargs=2, default=(256, 64))
    args = ap.parse_args()

    for delta in args.deltas:
        rows = shrinking_square_experiment(args.ks, args.beta, delta, tuple(args.resolution))
        print(f"delta = {delta}")
        print(f"  {'k':>4} {'P(Q_k)':>8} {'P(D_k)':>8} {'I(Q_k)':>10} {'beta P(Omega)':>14}")
        for r in rows:
            pd = f"{r['P_D']:.4f}" if r["P_D"] is not None else "-"
            print(f"  {r['k']:>4} {r['P_Q']:8.4f} {pd:>8} {r['I']:10.5f} {r['betaP_Omega']:14.5f}")
        print(f"  I(Q_{args.ks[-1]})/I(Q_{args.ks[0]}) = {rows[-1]['I'] / rows[0]['I']:.4f}")


if __name__ == "__main__":
    main()
