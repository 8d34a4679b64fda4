"""Command-line front end.

Subcommands: limit-cycle, wronskian, coeffs, tongues, staircase, fit,
report.  All numeric output uses 15 significant digits in scientific
notation so results are byte-reproducible; exit status is 1 for bad
arguments, 2 for numerical failures (with a machine-readable line on
stderr).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fitting, perturbation as pt, tonguescan as ts, wronskian as wr
from .config import load_config
from .errors import FreqlockError, InvalidParams
from .forcing import Forcing
from .lienard import LimitCycleSettings, SystemParams, find_limit_cycle


def fmt(x):
    return f"{x:.14e}"


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(c) if isinstance(c, float) else str(c) for c in row) + "\n")
    return path


def _cycle(cfg):
    params = SystemParams(cfg.alpha, cfg.beta)
    return find_limit_cycle(params, LimitCycleSettings(
        n_samples=cfg.n_samples, transient_time=cfg.transient_time))


def _parse_rho(text):
    p, _, q = text.partition("/")
    if not q:
        p, _, q = text.partition(":")
    return (int(p), int(q)) if q else (int(p), 1)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_limit_cycle(cfg, args, out):
    cyc = _cycle(cfg)
    path = os.path.join(out, "limit_cycle.csv")
    with open(path, "w") as fh:
        fh.write("U0,T0,Omega0,f0\n")
        fh.write(f"{fmt(cyc.U0)},{fmt(cyc.T0)},{fmt(cyc.Omega0)},\n")
        fh.write("tau,u0,v0\n")
        for j in range(cyc.K):
            fh.write(f"{fmt(j * cyc.T0 / cyc.K)},{fmt(cyc.u[j])},{fmt(cyc.v[j])}\n")
    print(f"wrote {path}  (U0={cyc.U0:.12g}, T0={cyc.T0:.15g})")
    return 0


def cmd_wronskian(cfg, args, out):
    cyc = _cycle(cfg)
    p, q = _parse_rho(args.rho)
    wd = wr.build(cyc, p=p, q=q, settings=wr.WronskianSettings(
        r_c=cfg.r_c, series_degree=cfg.series_degree))
    path = os.path.join(out, "wronskian.csv")
    with open(path, "w") as fh:
        fh.write("f0,gamma_hat,A_quad,A_closed\n")
        fh.write(f"{fmt(wd.f0)},{fmt(wd.gamma_hat)},{fmt(wd.A_quad)},{fmt(wd.A_closed)}\n")
        fh.write("tau,w11,a,b\n")
        h = cyc.T0 / cyc.K
        for j in range(2 * cyc.K + 1):
            jj = j % cyc.K
            fh.write(f"{fmt(j * h)},{fmt(wd.w11[j])},{fmt(wd.a.values[jj])},"
                     f"{fmt(wd.b.values[jj])}\n")
    print(f"wrote {path}  (f0={wd.f0:.12g}, gamma={wd.gamma_hat:.12g}, "
          f"A={wd.A_quad:.12g}/{wd.A_closed:.12g})")
    return 0


def cmd_coeffs(cfg, args, out):
    cyc = _cycle(cfg)
    forcing = Forcing.parse(cfg.forcing)
    core = wr.variational_core(cyc)
    p, q = _parse_rho(args.rho)
    wd = wr.build(cyc, p=p, q=q, core=core)
    kernels = pt.kernel_functions(cyc, wd)
    path1 = _write_csv(
        os.path.join(out, "kernel_coefficients.csv"),
        ["n", "K1_re", "K1_im", "K2_re", "K2_im"],
        [(n, float(kernels.khat1[n].real), float(kernels.khat1[n].imag),
          float(kernels.khat2[n].real), float(kernels.khat2[n].imag))
         for n in range(len(kernels.khat1))])
    res = pt.ResonanceSpec(p, q)
    sigma = res.rho * cyc.Omega0
    try:
        first = pt.first_order(cyc, wd, kernels, forcing, res, cross_check=True)
        degen = False
    except pt.DegenerateExtremum as err:
        first, degen = err.args[1], True
    d2w = float("nan")
    if args.second_order:
        so = pt.second_order(cyc, wd, forcing, res,
                             first=None if degen else first,
                             n_tau0=cfg.tau0_points)
        d2w = so.width_coefficient
    th1, th2 = first.angles(sigma)
    nu0 = first.nu0 or 1
    path2 = _write_csv(
        os.path.join(out, "locking_summary.csv"),
        ["p", "q", "D1", "D2", "A", "M", "Delta1omega", "theta1", "theta2",
         "Delta2omega"],
        [(p, q, first.D1.get(nu0, 0.0), first.D2.get(nu0, 0.0), first.A,
          first.eps1_max, first.width_slope(sigma), th1, th2, d2w)])
    print(f"wrote {path1}\nwrote {path2}")
    return 0


def _scan_one(cfg, cyc, forcing, core, kernels, p, q):
    res = pt.ResonanceSpec(p, q)
    sigma = res.rho * cyc.Omega0
    wd = wr.build(cyc, p=p, q=q, core=core)
    try:
        first = pt.first_order(cyc, wd, kernels, forcing, res)
        law = (first.width_slope(sigma), 1.0)
    except pt.DegenerateExtremum:
        so = pt.second_order(cyc, wd, forcing, res, first=None,
                             n_tau0=max(16, cfg.tau0_points // 4))
        law = (so.width_coefficient, 2.0)
    mus = np.geomspace(cfg.mu_min, cfg.mu_max, cfg.mu_points)
    settings = ts.LockSettings(delta_lock=cfg.delta_lock,
                               steps_per_period=cfg.steps_per_period)
    return ts.scan_tongue(cfg.alpha, cfg.beta, forcing, p, q, sigma, mus,
                          settings=settings, width_law=law,
                          rel_tol=cfg.bisect_tol_rel)


def cmd_tongues(cfg, args, out):
    cyc = _cycle(cfg)
    forcing = Forcing.parse(cfg.forcing)
    core = wr.variational_core(cyc)
    kernels = pt.kernel_functions(cyc, wr.build(cyc, p=2, q=1, core=core))
    pairs = cfg.resonance_list()
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            results = list(ex.map(
                lambda pq: _scan_one(cfg, cyc, forcing, core, kernels, *pq), pairs))
    else:
        results = [_scan_one(cfg, cyc, forcing, core, kernels, *pq) for pq in pairs]
    rows = []
    for r in results:   # deterministic: resonance order, then mu order
        for i in range(len(r.mu)):
            rows.append((r.p, r.q, float(r.mu[i]), float(r.omega_min[i]),
                         float(r.omega_max[i]), float(r.width[i])))
    path = _write_csv(os.path.join(out, "tongues.csv"),
                      ["p", "q", "mu", "omega_min", "omega_max", "width"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_staircase(cfg, args, out):
    cyc = _cycle(cfg)
    forcing = Forcing.parse(cfg.forcing)
    omegas = np.linspace(cfg.omega_lo * cyc.Omega0, cfg.omega_hi * cyc.Omega0,
                         cfg.omega_points)
    settings = ts.LockSettings(delta_lock=cfg.delta_lock,
                               steps_per_period=cfg.steps_per_period)
    ratios, flags = ts.staircase(cfg.alpha, cfg.beta, forcing, args.mu, omegas,
                                 settings=settings)
    rows = [(float(om), float(r), int(fl))
            for om, r, fl in zip(omegas, ratios, flags)]
    path = _write_csv(os.path.join(out, "staircase.csv"),
                      ["omega", "ratio", "status"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_fit(cfg, args, out):
    table = {}
    with open(args.input) as fh:
        header = fh.readline().strip().split(",")
        idx = {name: header.index(name) for name in ("p", "q", "mu", "width")}
        for line in fh:
            cells = line.strip().split(",")
            if len(cells) < len(header):
                continue
            key = (int(cells[idx["p"]]), int(cells[idx["q"]]))
            table.setdefault(key, []).append(
                (float(cells[idx["mu"]]), float(cells[idx["width"]])))
    rows = []
    for (p, q), data in sorted(table.items()):
        r = fitting.fit_monomial(data)
        rows.append((p, q, r.a, r.b, r.mu_fit, r.n_fit))
    path = _write_csv(os.path.join(out, "fit.csv"),
                      ["p", "q", "a", "b", "mu_fit", "N_fit"], rows)
    print(f"wrote {path}")
    for row in rows:
        print(f"  {row[0]}:{row[1]}  width = {row[2]:.4g} * mu^{row[3]:.4g}"
              f"  (mu_fit={row[4]:.3g}, N={row[5]})")
    return 0


def cmd_report(cfg, args, out):
    cyc = _cycle(cfg)
    forcing = Forcing.parse(cfg.forcing)
    core = wr.variational_core(cyc)
    lines = [
        "cross-check block (alpha=%g, beta=%g, forcing=%s)" % (
            cfg.alpha, cfg.beta, cfg.forcing),
        "T0      = %.15g" % cyc.T0,
        "U0      = %.15g" % cyc.U0,
        "Omega0  = %.15g" % cyc.Omega0,
    ]
    kernels = None
    for p, q in cfg.resonance_list():
        wd = wr.build(cyc, p=p, q=q, core=core)
        if kernels is None:
            kernels = pt.kernel_functions(cyc, wd)
        res = pt.ResonanceSpec(p, q)
        sigma = res.rho * cyc.Omega0
        lines += [
            "-- resonance %d:%d --" % (p, q),
            "f0        = %.12g" % wd.f0,
            "gamma_hat = %.14g" % wd.gamma_hat,
            "A_quad    = %.15g" % wd.A_quad,
            "A_closed  = %.15g" % wd.A_closed,
        ]
        try:
            first = pt.first_order(cyc, wd, kernels, forcing, res)
            nu0 = first.nu0
            lines += [
                "D1(nu0=%d) = %.6g    D2 = %.6g" % (nu0, first.D1[nu0], first.D2[nu0]),
                "M = max eps1 = %.6g    width slope = %.6g" % (
                    first.eps1_max, first.width_slope(sigma)),
                "tan(theta1)+tan(theta2) = %.6g" % (
                    math.tan(first.angles(sigma)[0]) + math.tan(first.angles(sigma)[1])),
            ]
        except pt.DegenerateExtremum:
            lines.append("first order degenerate (selection rule empty)")
            if args.second_order:
                so = pt.second_order(cyc, wd, forcing, res, first=None,
                                     n_tau0=cfg.tau0_points)
                lines.append("Delta2omega = %.6g  (width = coeff * mu^2)"
                             % so.width_coefficient)
    text = "\n".join(lines) + "\n"
    path = os.path.join(out, "report.txt")
    with open(path, "w") as fh:
        fh.write(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="freqlock", description=__doc__)
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=None)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--beta", type=float, default=None)
    common.add_argument("--forcing", default=None)
    common.add_argument("--k", dest="n_samples", type=int, default=None)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("limit-cycle", parents=[common])
    p_wr = sub.add_parser("wronskian", parents=[common])
    p_wr.add_argument("--rho", default="2/1")
    p_co = sub.add_parser("coeffs", parents=[common])
    p_co.add_argument("--rho", default="2/1")
    p_co.add_argument("--second-order", action="store_true")
    p_to = sub.add_parser("tongues", parents=[common])
    p_to.add_argument("--resonances", default=None)
    p_to.add_argument("--mu-max", dest="mu_max", type=float, default=None)
    p_to.add_argument("--mu-min", dest="mu_min", type=float, default=None)
    p_to.add_argument("--mu-points", dest="mu_points", type=int, default=None)
    p_st = sub.add_parser("staircase", parents=[common])
    p_st.add_argument("--mu", type=float, required=True)
    p_st.add_argument("--omega-range", default=None, help="lo:hi in units of Omega0")
    p_fit = sub.add_parser("fit", parents=[common])
    p_fit.add_argument("--input", required=True)
    p_re = sub.add_parser("report", parents=[common])
    p_re.add_argument("--second-order", action="store_true")
    return ap


HANDLERS = {
    "limit-cycle": cmd_limit_cycle,
    "wronskian": cmd_wronskian,
    "coeffs": cmd_coeffs,
    "tongues": cmd_tongues,
    "staircase": cmd_staircase,
    "fit": cmd_fit,
    "report": cmd_report,
}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    overrides = {k: getattr(args, k, None) for k in
                 ("alpha", "beta", "forcing", "n_samples", "threads",
                  "mu_max", "mu_min", "mu_points", "resonances")}
    if getattr(args, "omega_range", None):
        lo, _, hi = args.omega_range.partition(":")
        overrides["omega_lo"], overrides["omega_hi"] = float(lo), float(hi)
    try:
        cfg = load_config(args.config, **overrides)
    except (InvalidParams, ValueError, OSError) as err:
        print(f"error: code={type(err).__name__} msg={err}", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    try:
        return HANDLERS[args.command](cfg, args, args.out)
    except InvalidParams as err:
        print(f"error: code={type(err).__name__} msg={err}", file=sys.stderr)
        return 1
    except FreqlockError as err:
        print(f"error: code={type(err).__name__} msg={err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
