"""Weighted nonlinear least-squares fit of width data to a monomial a*mu^b.

The residual function is F(a, b) = || W(mu) (width - a mu^b) ||^2 with
weight W = 1/mu, minimized by Newton's method on the gradient after both
coordinates are normalized to the unit square.  A log-log linear fit is used
only to start the iteration: fitting in log space has a different minimizer
and biases the estimates, which compare_linear_vs_nonlinear demonstrates.

The fitting interval [0, mu_fit] is chosen adaptively: it starts at
max(0.1, largest mu whose width is below 1e-4) and shrinks until the
normalized residual is below 1e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NewtonDiverged, TooFewPoints

ZERO_WIDTH = 1e-11          # widths at or below this count as numerically zero
RESIDUAL_ACCEPT = 1e-3      # on normalized data
SHRINK = 0.8
MIN_POINTS = 8


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    mu_fit: float
    n_fit: int
    residual: float             # weighted SSE on normalized data


def _weighted_sse(mu, y, a, b):
    r = (y - a * mu**b) / mu
    return float(np.dot(r, r))


def _newton_power_fit(mu, y, a0, b0, max_iter=100, grad_tol=1e-12):
    """Newton iteration on grad F = 0 with backtracking; returns (a, b, F)."""
    a, b = a0, b0
    w2 = 1.0 / mu**2
    lnmu = np.log(mu)
    F = _weighted_sse(mu, y, a, b)
    for _ in range(max_iter):
        m = mu**b
        r = y - a * m
        ga = -2.0 * np.dot(w2, r * m)
        gb = -2.0 * a * np.dot(w2, r * m * lnmu)
        gnorm = math.hypot(ga, gb)
        if gnorm < grad_tol:
            return a, b, F
        haa = 2.0 * np.dot(w2, m * m)
        hab = 2.0 * np.dot(w2, m * lnmu * (a * m - r))
        hbb = 2.0 * a * np.dot(w2, m * lnmu * lnmu * (a * m - r))
        det = haa * hbb - hab * hab
        if abs(det) < 1e-300:
            break
        da = -(hbb * ga - hab * gb) / det
        db = -(haa * gb - hab * ga) / det
        if gnorm < 1e-6:
            # in the quadratic basin: plain Newton polishes past the point
            # where the descent test drowns in rounding
            a, b = a + da, b + db
            F = _weighted_sse(mu, y, a, b)
            continue
        step = 1.0
        for _ in range(30):
            Fn = _weighted_sse(mu, y, a + step * da, b + step * db)
            if Fn < F:
                break
            step *= 0.5
        else:
            return a, b, F          # no downhill step left: converged enough
        a, b, F = a + step * da, b + step * db, Fn
    raise NewtonDiverged("power-law fit did not reach the gradient tolerance")


def gradient(mu, y, a, b):
    """Analytic gradient of the weighted SSE (normalized units)."""
    w2 = 1.0 / mu**2
    m = mu**b
    r = y - a * m
    return np.array([-2.0 * np.dot(w2, r * m),
                     -2.0 * a * np.dot(w2, r * m * np.log(mu))])


def hessian(mu, y, a, b):
    w2 = 1.0 / mu**2
    m = mu**b
    lnmu = np.log(mu)
    r = y - a * m
    haa = 2.0 * np.dot(w2, m * m)
    hab = 2.0 * np.dot(w2, m * lnmu * (a * m - r))
    hbb = 2.0 * a * np.dot(w2, m * lnmu * lnmu * (a * m - r))
    return np.array([[haa, hab], [hab, hbb]])


def loglog_estimate(mu, y):
    """Linear fit in log-log space (starting guess only; biased)."""
    b, lna = np.polyfit(np.log(mu), np.log(y), 1)
    return math.exp(lna), b


def fit_monomial(data, mu_fit=None):
    """Fit (mu, width) pairs to a*mu^b with the adaptive interval rule.

    data is a sequence of (mu, width); zero widths (within numerical
    accuracy) are excluded.  Raises TooFewPoints below 8 usable points.
    """
    arr = np.asarray(sorted(data), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected (mu, width) pairs")
    mu_all, y_all = arr[:, 0], arr[:, 1]
    keep = (mu_all > 0) & (y_all > ZERO_WIDTH)
    mu_all, y_all = mu_all[keep], y_all[keep]
    if len(mu_all) < MIN_POINTS:
        raise TooFewPoints(f"only {len(mu_all)} usable points")

    if mu_fit is None:
        below = mu_all[y_all < 1e-4]
        mu_fit = max(0.1, float(below.max()) if len(below) else 0.0)
        mu_fit = min(mu_fit, float(mu_all.max()))

    while True:
        sel = mu_all <= mu_fit
        if sel.sum() < MIN_POINTS:
            raise TooFewPoints(
                f"interval [0, {mu_fit:.3g}] keeps only {int(sel.sum())} points")
        mu, y = mu_all[sel], y_all[sel]
        mu_s, y_s = mu.max(), y.max()
        mun, yn = mu / mu_s, y / y_s
        a0, b0 = loglog_estimate(mun, yn)
        a, b, F = _newton_power_fit(mun, yn, a0, b0)
        if F <= RESIDUAL_ACCEPT:
            return FitResult(a * y_s / mu_s**b, b, mu_fit, int(sel.sum()), F)
        mu_fit *= SHRINK


def compare_linear_vs_nonlinear(data):
    """Both fits plus their residuals in the original metric.

    Returns ((a_lin, b_lin, sse_lin), (a_nl, b_nl, sse_nl)); the log-linear
    route is biased toward small function values on noisy data.
    """
    arr = np.asarray(sorted(data), dtype=float)
    mu, y = arr[:, 0], arr[:, 1]
    mu_s, y_s = mu.max(), y.max()
    mun, yn = mu / mu_s, y / y_s
    a_lin, b_lin = loglog_estimate(mun, yn)
    a_nl, b_nl, _ = _newton_power_fit(mun, yn, a_lin, b_lin)

    def sse(a, b):
        r = yn - a * mun**b
        return float(np.dot(r, r))

    out_lin = (a_lin * y_s / mu_s**b_lin, b_lin, sse(a_lin, b_lin))
    out_nl = (a_nl * y_s / mu_s**b_nl, b_nl, sse(a_nl, b_nl))
    return out_lin, out_nl


def fit_exponential(x, y):
    """Fit y = a exp(b x) both by log-linear and true least squares.

    The exponential variant of the comparison figure; unweighted.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    b_lin, lna = np.polyfit(x, np.log(y), 1)
    a_lin = math.exp(lna)
    a, b = a_lin, b_lin

    def sse(a_, b_):
        r = y - a_ * np.exp(b_ * x)
        return float(np.dot(r, r))

    F = sse(a, b)
    for _ in range(200):
        e = np.exp(b * x)
        r = y - a * e
        ga = -2.0 * np.dot(r, e)
        gb = -2.0 * a * np.dot(r, x * e)
        haa = 2.0 * np.dot(e, e)
        hab = 2.0 * np.dot(x * e, 2.0 * a * e - y)
        hbb = 2.0 * a * np.dot(x * x * e, 2.0 * a * e - y)
        det = haa * hbb - hab * hab
        if abs(det) < 1e-300 or math.hypot(ga, gb) < 1e-12:
            break
        da = -(hbb * ga - hab * gb) / det
        db = -(haa * gb - hab * ga) / det
        step = 1.0
        while sse(a + step * da, b + step * db) >= F and step > 1e-10:
            step *= 0.5
        a, b = a + step * da, b + step * db
        F = sse(a, b)
    return (a_lin, b_lin, sse(a_lin, b_lin)), (a, b, F)
