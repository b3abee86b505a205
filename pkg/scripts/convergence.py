"""FEM convergence on the concentric disk against the closed form, Robin and Dirichlet."""
import argparse
import json

from insulair.fem import convergence_study, layer_mesh, solve
from insulair.geometry import Disk
from insulair.radial import DIRICHLET, RadialConfig, dispersion_ball


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()

    res = [(64 * 2 ** k, 16 * 2 ** k) for k in range(args.levels)]
    ref = dispersion_ball(RadialConfig(2, args.R, args.beta, args.delta))
    cap = dispersion_ball(RadialConfig(2, args.R, DIRICHLET, args.delta))
    print(f"oracle I = {ref:.10f}, capacity = {cap:.10f}")
    print(f"{'resolution':>12} {'I_h':>14} {'error':>10} {'rate':>6} {'cap_h':>14} {'cap err':>10}")
    rows = convergence_study(Disk(args.R), args.beta, args.delta, res, reference=ref)
    out = []
    for (nt, ns), row in zip(res, rows):
        ch = solve(layer_mesh(Disk(args.R), args.delta, (nt, ns)), DIRICHLET).dispersion
        rate = f"{row.rate:.2f}" if row.rate else "-"
        print(f"{nt:>7}x{ns:<4} {row.I:14.10f} {row.error:10.2e} {rate:>6} {ch:14.10f} {abs(ch - cap):10.2e}")
        out.append({"resolution": [nt, ns], "I": row.I, "error": row.error, "rate": row.rate, "capacity": ch})
    print(json.dumps(out))


if __name__ == "__main__":
    main()
