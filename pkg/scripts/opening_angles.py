#!/usr/bin/env python3
"""Opening angle of the dominant (2:1) tongue against alpha for several beta.

Writes angles.csv with columns alpha,beta,angle_deg where angle_deg is the
full vertex angle 2*theta1 in degrees.
"""

import argparse
import math
import sys

import numpy as np

from freqlock import perturbation as pt, wronskian as wr
from freqlock.forcing import Forcing
from freqlock.lienard import SystemParams, find_limit_cycle


def angle_deg(alpha, beta):
    cyc = find_limit_cycle(SystemParams(alpha, beta))
    wd = wr.build(cyc, p=2, q=1)
    kernels = pt.kernel_functions(cyc, wd)
    first = pt.first_order(cyc, wd, kernels, Forcing.harmonic(),
                           pt.ResonanceSpec(2, 1))
    th1, _ = first.angles(2 * cyc.Omega0)
    return math.degrees(2.0 * th1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="angles.csv")
    ap.add_argument("--betas", default="1.5,2.5,4.0")
    ap.add_argument("--alphas-per-beta", type=int, default=6)
    ap.add_argument("--alpha-max", type=float, default=10.0)
    args = ap.parse_args()
    rows = []
    for beta in (float(b) for b in args.betas.split(",")):
        for alpha in np.linspace(beta + 0.5, args.alpha_max, args.alphas_per_beta):
            deg = angle_deg(alpha, beta)
            rows.append((alpha, beta, deg))
            print(f"alpha={alpha:.3f} beta={beta:.2f}: 2*theta1 = {deg:.3f} deg")
    with open(args.out, "w") as fh:
        fh.write("alpha,beta,angle_deg\n")
        for row in rows:
            fh.write(",".join(f"{x:.14e}" for x in row) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
