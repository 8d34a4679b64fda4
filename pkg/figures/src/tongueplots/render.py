"""Render the standard figures from solver CSV output.

Each renderer is a pure function of the CSV contents: nothing is recomputed
from the model.  Renderers return a small dict of derived plot artifacts
(apex positions, series counts) that the tests assert on, and write the
image when an output path is given.
"""

from __future__ import annotations

import csv
import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class MissingColumn(KeyError):
    def __init__(self, column, path):
        super().__init__(column)
        self.column = column
        self.message = f"column {column!r} missing from {path}"

    def __str__(self):
        return self.message


def read_csv(path, columns):
    """Read named columns; raises MissingColumn with the offending name."""
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return {c: np.array([]) for c in columns}
        for col in columns:
            if col not in header:
                raise MissingColumn(col, path)
        idx = {c: header.index(c) for c in columns}
        out = {c: [] for c in columns}
        for row in reader:
            if len(row) < len(header):
                continue
            try:
                vals = {c: float(row[idx[c]]) for c in columns}
            except ValueError:
                continue
            for c, v in vals.items():
                out[c].append(v)
    return {c: np.asarray(v) for c, v in out.items()}


def _finish(fig, out_path, result):
    if out_path:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return result


def _warn_empty(kind):
    warnings.warn(f"{kind}: empty input, rendering blank axes")


def tongues(path, out_path=None, omega0=None):
    """Locking wedges in the (omega/Omega0, mu)-plane."""
    data = read_csv(path, ["p", "q", "mu", "omega_min", "omega_max"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    apices = {}
    if len(data["mu"]) == 0:
        _warn_empty("tongues")
        return _finish(fig, out_path, {"apices": apices, "n_tongues": 0})
    if omega0 is None:
        # infer the base frequency from the sharpest tip: at the smallest mu
        # the centre sits at (p/q) Omega0
        i = int(np.argmin(data["mu"]))
        rho = data["p"][i] / data["q"][i]
        omega0 = 0.5 * (data["omega_min"][i] + data["omega_max"][i]) / rho
    keys = sorted({(int(p), int(q)) for p, q in zip(data["p"], data["q"])})
    for p, q in keys:
        sel = (data["p"] == p) & (data["q"] == q)
        mu = data["mu"][sel]
        order = np.argsort(mu)
        lo = data["omega_min"][sel][order] / omega0
        hi = data["omega_max"][sel][order] / omega0
        mu = mu[order]
        ax.fill_betweenx(mu, lo, hi, alpha=0.5, label=f"{p}:{q}")
        apices[(p, q)] = 0.5 * (lo[0] + hi[0])
    ax.set_xlabel("omega / Omega0")
    ax.set_ylabel("mu")
    ax.set_title("frequency-locking tongues")
    ax.legend(loc="upper left", fontsize=8)
    return _finish(fig, out_path, {"apices": apices, "n_tongues": len(keys),
                                   "omega0": omega0})


def kcoeffs(path, out_path=None):
    """Kernel Fourier-coefficient magnitudes on a log axis."""
    data = read_csv(path, ["n", "K1_re", "K1_im", "K2_re", "K2_im"])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if len(data["n"]) == 0:
        _warn_empty("kcoeffs")
        return _finish(fig, out_path, {"n_even": 0})
    n = data["n"].astype(int)
    m1 = np.hypot(data["K1_re"], data["K1_im"])
    m2 = np.hypot(data["K2_re"], data["K2_im"])
    even = (n % 2 == 0) & (n > 0)
    ax.semilogy(n[even], np.maximum(m1[even], 1e-18), "x", label="|K1|")
    ax.semilogy(n[even], np.maximum(m2[even], 1e-18), "+", label="|K2|")
    ax.set_xlabel("harmonic")
    ax.set_ylabel("coefficient magnitude")
    ax.set_title("kernel coefficient decay (even harmonics)")
    ax.legend()
    return _finish(fig, out_path, {"n_even": int(even.sum())})


def angles(path, out_path=None):
    """Opening angle (degrees) against alpha, one line per beta."""
    data = read_csv(path, ["alpha", "beta", "angle_deg"])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if len(data["alpha"]) == 0:
        _warn_empty("angles")
        return _finish(fig, out_path, {"n_betas": 0})
    betas = sorted(set(data["beta"]))
    for b in betas:
        sel = data["beta"] == b
        order = np.argsort(data["alpha"][sel])
        ax.plot(data["alpha"][sel][order], data["angle_deg"][sel][order],
                marker=".", label=f"beta={b:g}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("opening angle (degrees)")
    ax.legend()
    return _finish(fig, out_path, {"n_betas": len(betas)})


def scaling(path, out_path=None):
    """Width against q for fixed p, with the asymptotic-law curves."""
    data = read_csv(path, ["p", "q", "width", "law"])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if len(data["p"]) == 0:
        _warn_empty("scaling")
        return _finish(fig, out_path, {"n_p": 0})
    ps = sorted(set(data["p"].astype(int)))
    for p in ps:
        sel = data["p"] == p
        order = np.argsort(data["q"][sel])
        q = data["q"][sel][order]
        ax.semilogy(q, data["width"][sel][order], "o", label=f"p={p} widths")
        ax.semilogy(q, data["law"][sel][order], "-", label=f"p={p} law")
    ax.set_xlabel("q")
    ax.set_ylabel("width")
    ax.legend(fontsize=8)
    return _finish(fig, out_path, {"n_p": len(ps)})


def fitcompare(path, out_path=None):
    """Data with the log-linear and nonlinear fit curves."""
    data = read_csv(path, ["x", "y", "fit_linear", "fit_nonlinear"])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    if len(data["x"]) == 0:
        _warn_empty("fitcompare")
        return _finish(fig, out_path, {"n_points": 0})
    order = np.argsort(data["x"])
    x = data["x"][order]
    ax.plot(x, data["y"][order], "k.", label="data")
    ax.plot(x, data["fit_linear"][order], "--", label="log-linear fit")
    ax.plot(x, data["fit_nonlinear"][order], "-", label="nonlinear fit")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend()
    return _finish(fig, out_path, {"n_points": len(x)})


def staircase(path, out_path=None):
    """Measured frequency ratio against drive frequency."""
    data = read_csv(path, ["omega", "ratio"])
    fig, ax = plt.subplots(figsize=(6, 4))
    if len(data["omega"]) == 0:
        _warn_empty("staircase")
        return _finish(fig, out_path, {"n_points": 0})
    order = np.argsort(data["omega"])
    ax.plot(data["omega"][order], data["ratio"][order], ".-", ms=3, lw=0.7)
    ax.set_xlabel("omega")
    ax.set_ylabel("omega / Omega")
    ax.set_title("devil's staircase")
    return _finish(fig, out_path, {"n_points": len(data["omega"])})


KINDS = {
    "tongues": tongues,
    "kcoeffs": kcoeffs,
    "angles": angles,
    "scaling": scaling,
    "fitcompare": fitcompare,
    "staircase": staircase,
}


def render(kind, in_path, out_path, **kw):
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {sorted(KINDS)}")
    return KINDS[kind](in_path, out_path, **kw)
