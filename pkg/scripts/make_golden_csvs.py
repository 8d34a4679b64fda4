#!/usr/bin/env python3
"""Produce the golden CSV set consumed by the figure package's tests.

Runs the solver pipeline at alpha=5, beta=4 and writes small, committed
copies of every CSV schema the renderers read.
"""

import os
import subprocess
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from freqlock import perturbation as pt, tonguescan as ts, wronskian as wr
from freqlock.cli import _write_csv
from freqlock.forcing import Forcing
from freqlock.lienard import SystemParams, find_limit_cycle


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "figures/tests/golden"
    os.makedirs(out_dir, exist_ok=True)
    harmonic = Forcing.harmonic()
    cyc = find_limit_cycle(SystemParams(5.0, 4.0))
    core = wr.variational_core(cyc)
    wd = wr.build(cyc, p=2, q=1, core=core)
    kernels = pt.kernel_functions(cyc, wd)
    Om = cyc.Omega0

    _write_csv(os.path.join(out_dir, "kernel_coefficients.csv"),
               ["n", "K1_re", "K1_im", "K2_re", "K2_im"],
               [(n, float(kernels.khat1[n].real), float(kernels.khat1[n].imag),
                 float(kernels.khat2[n].real), float(kernels.khat2[n].imag))
                for n in range(len(kernels.khat1))])

    rows = []
    for p, law in ((2, (0.7557, 1.0)), (4, (0.7957, 1.0))):
        scan = ts.scan_tongue(5.0, 4.0, harmonic, p, 1, p * Om,
                              [0.02, 0.05, 0.1], width_law=law)
        for i in range(len(scan.mu)):
            rows.append((p, 1, float(scan.mu[i]), float(scan.omega_min[i]),
                         float(scan.omega_max[i]), float(scan.width[i])))
    _write_csv(os.path.join(out_dir, "tongues.csv"),
               ["p", "q", "mu", "omega_min", "omega_max", "width"], rows)

    omegas = np.linspace(1.5 * Om, 4.5 * Om, 41)
    ratios, flags = ts.staircase(5.0, 4.0, harmonic, 0.1, omegas)
    _write_csv(os.path.join(out_dir, "staircase.csv"),
               ["omega", "ratio", "status"],
               [(float(o), float(r), int(f)) for o, r, f in zip(omegas, ratios, flags)])

    here = os.path.dirname(os.path.abspath(__file__))
    subprocess.run([sys.executable, os.path.join(here, "opening_angles.py"),
                    "--out", os.path.join(out_dir, "angles.csv"),
                    "--betas", "1.5,4.0", "--alphas-per-beta", "4"], check=True)
    subprocess.run([sys.executable, os.path.join(here, "scaling_overlay.py"),
                    "--out", os.path.join(out_dir, "scaling.csv"),
                    "--q-max", "5"], check=True)
    subprocess.run([sys.executable, os.path.join(here, "fit_comparison.py"),
                    "--out", os.path.join(out_dir, "fitcomp.csv")], check=True)
    print(f"golden CSVs in {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
