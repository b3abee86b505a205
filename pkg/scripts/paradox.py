"""Thin insulation of a disk with beta < 1/R: dispersion rises above beta * P(B_R)."""
import argparse

from insulair.bounds import lemma_check, paradox_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rep = paradox_check(args.R, args.beta, args.trials, seed=args.seed)
    print(f"delta0 = {rep.delta0:.6f}")
    for s in rep.samples:
        print(f"  dV={s['dV']:8.4f}  I={s['I']:.5f}  beta*P={s['betaP']:.5f}  {s['verdict']}")
    lem = lemma_check(args.R, min(rep.delta0, 0.5), 500, seed=args.seed)
    print(f"lemma check: C={lem.C:.5f}, min margin {lem.min_margin:.5f}, "
          f"{len(lem.counterexamples)} counterexamples")


if __name__ == "__main__":
    main()
