#!/usr/bin/env python3
"""First-order widths against q for fixed p under the all-harmonics drive,
overlaid with the asymptotic law c(p) mu / (q lam^{2q}) (lam^q for even p).

Writes scaling.csv with columns p,q,width,law (at the given mu).
"""

import argparse
import math
import sys

from freqlock import perturbation as pt, wronskian as wr
from freqlock.forcing import Forcing
from freqlock.lienard import SystemParams, find_limit_cycle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="scaling.csv")
    ap.add_argument("--mu", type=float, default=0.01)
    ap.add_argument("--lam", type=float, default=2.0)
    ap.add_argument("--q-max", type=int, default=6)
    args = ap.parse_args()

    cyc = find_limit_cycle(SystemParams(5.0, 4.0))
    core = wr.variational_core(cyc)
    forcing = Forcing.poisson_kernel(args.lam)
    kernels = pt.kernel_functions(cyc, wr.build(cyc, p=2, q=1, core=core))
    rows = []
    for p in (1, 2, 3):
        c_asym = pt.scaling_constant(p, kernels, cyc, lam=args.lam) * math.log(args.lam)
        for q in range(1, args.q_max + 1):
            if math.gcd(p, q) != 1:
                continue
            res = pt.ResonanceSpec(p, q)
            wd = wr.build(cyc, p=p, q=q, core=core)
            first = pt.first_order(cyc, wd, kernels, forcing, res)
            width = args.mu * first.width_slope(res.rho * cyc.Omega0)
            power = 2 * q if p % 2 == 1 else q
            law = c_asym * args.mu / (q * args.lam**power)
            rows.append((p, q, width, law))
            print(f"p={p} q={q}: width={width:.4e}  law={law:.4e}")
    with open(args.out, "w") as fh:
        fh.write("p,q,width,law\n")
        for row in rows:
            fh.write(f"{row[0]},{row[1]},{row[2]:.14e},{row[3]:.14e}\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
