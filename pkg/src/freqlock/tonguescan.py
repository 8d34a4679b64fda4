"""Simulation ground truth: stroboscopic lock detection, boundary bisection,
tongue scans and the devil's staircase.

The driven oscillator is integrated in rescaled time (drive period 2 pi) and
sampled once per drive period.  The orbit is locked to p:q when the strobe
sequence converges to a period-p cycle and the measured output frequency
satisfies omega/Omega = p/q.  Tongue boundaries in omega are then located by
bisection at fixed drive amplitude.

The inner loop is compiled with numba; a drive is passed to it as a small
code (0 harmonic, 1 poisson closed form, 2 explicit sine series) plus a
parameter and coefficient array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoBracket
from .forcing import Forcing

try:
    from numba import njit
except ImportError:                                    # pragma: no cover
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not args else args[0]

STATUS_UNLOCKED = 0
STATUS_LOCKED = 1
STATUS_UNBOUNDED = 2

ESCAPE_RADIUS = 100.0


@dataclass(frozen=True)
class LockSettings:
    delta_lock: float = 1e-6        # strobe period-p residual threshold
    ratio_tol: float = 1e-6         # |omega/Omega - p/q| threshold
    transient_periods: int = 300
    observation_periods: int = 128  # rounded up to a multiple of p
    steps_per_period: int = 400
    max_total_periods: int = 150_000  # narrow tongues lock at rate ~ width


@dataclass(frozen=True)
class LockProbe:
    alpha: float
    beta: float
    mu: float
    omega: float
    tau0: float
    forcing: Forcing
    p: int
    q: int
    settings: LockSettings = LockSettings()


@dataclass(frozen=True)
class LockResult:
    locked: bool
    status: int
    strobe_residual: float
    ratio: float                    # measured omega / Omega
    contraction: float              # residual decay factor per p periods


@dataclass(frozen=True)
class TongueResult:
    p: int
    q: int
    mu: np.ndarray = field(repr=False)
    omega_min: np.ndarray = field(repr=False)
    omega_max: np.ndarray = field(repr=False)

    @property
    def width(self):
        return self.omega_max - self.omega_min

    @property
    def center(self):
        return 0.5 * (self.omega_max + self.omega_min)


def _forcing_code(forcing: Forcing):
    if forcing.closed_form is not None:
        if forcing.closed_form[0] == "harmonic":
            return 0, 0.0, np.zeros(1)
        return 1, float(forcing.closed_form[1]), np.zeros(1)
    n_max = max(forcing.harmonics)
    coeffs = np.zeros(n_max + 1)
    for n, c in forcing.coefficients.items():
        coeffs[n] = c
    return 2, 0.0, coeffs


@njit(cache=True, nogil=True)
def _feval(code, lam, coeffs, x):
    if code == 0:
        return math.sin(x), math.cos(x)
    if code == 1:
        den = lam * lam + 1.0 - 2.0 * lam * math.cos(x)
        f = (lam * lam - 1.0) * math.sin(x) / den
        fp = (lam * lam - 1.0) * ((lam * lam + 1.0) * math.cos(x) - 2.0 * lam) / (den * den)
        return f, fp
    f = 0.0
    fp = 0.0
    for n in range(1, len(coeffs)):
        c = coeffs[n]
        if c != 0.0:
            f += c * math.sin(n * x)
            fp += n * c * math.cos(n * x)
    return f, fp


@njit(cache=True, nogil=True)
def _rhs(u, v, tau, alpha, beta, mu, omega, tau0, code, lam, coeffs):
    h = 1.0 - beta + 3.0 * beta * u * u
    k = u * (alpha - beta + beta * u * u)
    f, fp = _feval(code, lam, coeffs, tau + tau0)
    drive = (omega * v * (3.0 * u * u - 1.0) * f
             + u * (u * u - 1.0) * (f + omega * fp)) / (omega * omega)
    return v, -v * h / omega - k / (omega * omega) - mu * drive


@njit(cache=True, nogil=True)
def _strobe_run(alpha, beta, mu, omega, tau0, code, lam, coeffs, p,
                n_transient, n_observe, steps, u0, v0):
    """Integrate, strobe, and measure lock residual and output frequency.

    Returns (status, residual, ratio, contraction, u_end, v_end).  The
    frequency comes from counting upward zero crossings of u over the
    observation window, with quadratic interpolation at the two ends.
    """
    dt = 2.0 * math.pi / steps
    u, v = u0, v0
    tau = 0.0
    # transient
    for n in range(n_transient * steps):
        k1u, k1v = _rhs(u, v, tau, alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k2u, k2v = _rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, tau + 0.5 * dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k3u, k3v = _rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, tau + 0.5 * dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k4u, k4v = _rhs(u + dt * k3u, v + dt * k3v, tau + dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        u += dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v += dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        tau += dt
        if abs(u) > ESCAPE_RADIUS:
            return STATUS_UNBOUNDED, 1e300, 0.0, 1.0, u, v
    # observation: strobe once per drive period, count u zero crossings
    n_strobe = n_observe + p
    su = np.empty(n_strobe + 1)
    sv = np.empty(n_strobe + 1)
    su[0] = u
    sv[0] = v
    first_cross = -1.0
    last_cross = -1.0
    n_cross = 0
    u_prev = u
    for n in range(n_strobe * steps):
        k1u, k1v = _rhs(u, v, tau, alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k2u, k2v = _rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, tau + 0.5 * dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k3u, k3v = _rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, tau + 0.5 * dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        k4u, k4v = _rhs(u + dt * k3u, v + dt * k3v, tau + dt,
                        alpha, beta, mu, omega, tau0, code, lam, coeffs)
        u_prev = u
        u = u + dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        tau += dt
        if abs(u) > ESCAPE_RADIUS:
            return STATUS_UNBOUNDED, 1e300, 0.0, 1.0, u, v
        if u_prev <= 0.0 < u:
            frac = u_prev / (u_prev - u)
            t_cross = tau - dt + frac * dt
            if first_cross < 0.0:
                first_cross = t_cross
            last_cross = t_cross
            n_cross += 1
        if (n + 1) % steps == 0:
            idx = (n + 1) // steps
            su[idx] = u
            sv[idx] = v
    # strobe residual over the window, plus contraction estimate
    res = 0.0
    res_head = 0.0
    res_tail = 0.0
    half = n_observe // 2
    for n in range(n_observe):
        d = math.hypot(su[n + p] - su[n], sv[n + p] - sv[n])
        if d > res:
            res = d
        if n < half:
            if d > res_head:
                res_head = d
        else:
            if d > res_tail:
                res_tail = d
    contraction = res_tail / res_head if res_head > 0.0 else 0.0
    if n_cross < 2:
        return STATUS_UNLOCKED, res, 0.0, contraction, u, v
    cycles = float(n_cross - 1)
    ratio = (last_cross - first_cross) / (2.0 * math.pi * cycles)
    return STATUS_UNLOCKED, res, ratio, contraction, u, v


def is_locked(probe: LockProbe):
    """Decide p:q locking for one parameter point.

    Locked means the strobe orbit is (numerically) period p and the measured
    frequency ratio is p/q.  Because the phase pull-in rate inside a tongue
    scales with the tongue width, the run is extended while the residual
    keeps decaying, up to max_total_periods in all.
    """
    s = probe.settings
    code, lam, coeffs = _forcing_code(probe.forcing)
    n_obs = ((s.observation_periods + probe.p - 1) // probe.p) * probe.p
    u, v = 0.98, 0.0
    n_tr = s.transient_periods
    total = 0
    best = math.inf
    strikes = 0
    res = math.inf
    ratio = 0.0
    contraction = 1.0
    while True:
        status, res, ratio, contraction, u, v = _strobe_run(
            probe.alpha, probe.beta, probe.mu, probe.omega, probe.tau0,
            code, lam, coeffs, probe.p, n_tr, n_obs, s.steps_per_period, u, v)
        total += n_tr + n_obs + probe.p
        if status == STATUS_UNBOUNDED:
            return LockResult(False, status, math.inf, 0.0, 1.0)
        if res < s.delta_lock or total >= s.max_total_periods:
            break
        # extend while the residual keeps improving; one free strike covers
        # the non-monotone sweep past the repelling phase
        if res < 0.97 * best:
            strikes = 0
        else:
            strikes += 1
            if strikes >= 2:
                break
        best = min(best, res)
        n_tr = min(2 * n_tr, max(s.max_total_periods - total, 1))
    ratio_ok = ratio > 0.0 and abs(ratio - probe.p / probe.q) < s.ratio_tol * probe.p
    locked = bool(res < s.delta_lock and ratio_ok)
    return LockResult(locked, STATUS_LOCKED if locked else STATUS_UNLOCKED,
                      float(res), float(ratio), float(contraction))


def measured_ratio(probe: LockProbe):
    """omega / Omega regardless of lock status (staircase ordinate)."""
    s = probe.settings
    code, lam, coeffs = _forcing_code(probe.forcing)
    n_obs = ((s.observation_periods + probe.p - 1) // probe.p) * probe.p
    status, res, ratio, contraction, _, _ = _strobe_run(
        probe.alpha, probe.beta, probe.mu, probe.omega, probe.tau0,
        code, lam, coeffs, probe.p, s.transient_periods, n_obs,
        s.steps_per_period, 2.0, 0.0)
    return status, ratio


def _lock_tester(alpha, beta, forcing, p, q, mu, settings):
    def locked(om):
        return is_locked(LockProbe(alpha, beta, mu, om, 0.0, forcing, p, q,
                                   settings)).locked
    return locked


def measured_drift(alpha, beta, forcing, p, q, mu, omega, settings,
                   n_half, max_half=150_000):
    """Rotation-number drift omega/Omega - p/q outside a tongue.

    The drift is measured over two consecutive half-windows and the window
    is extended until the halves agree, so bursty near-edge slipping cannot
    masquerade as a clean rate.  Returns (drift, consistent).
    """
    code, lam, coeffs = _forcing_code(forcing)
    target = p / q
    u, v = 0.98, 0.0
    n_tr = settings.transient_periods
    while True:
        status, _, r1, _, u, v = _strobe_run(
            alpha, beta, mu, omega, 0.0, code, lam, coeffs, p,
            n_tr, n_half, settings.steps_per_period, u, v)
        if status == STATUS_UNBOUNDED:
            return math.inf, False
        status, _, r2, _, u, v = _strobe_run(
            alpha, beta, mu, omega, 0.0, code, lam, coeffs, p,
            0, n_half, settings.steps_per_period, u, v)
        if status == STATUS_UNBOUNDED:
            return math.inf, False
        d1, d2 = r1 - target, r2 - target
        mean = 0.5 * (d1 + d2)
        if (d1 * d2 > 0 and abs(d1 - d2) < 0.3 * abs(mean)
                and abs(mean) * n_half > 1.2):
            return mean, True
        if n_half >= max_half:
            return mean, False
        n_tr = 0
        n_half = min(3 * n_half, max_half)


def edge_by_drift(alpha, beta, forcing, p, q, mu, anchor, w_guess, side,
                  settings=None, depth_fracs=(0.15, 0.3, 0.6, 1.2),
                  base_window=30_000):
    """One tongue edge from the critical-slowdown law of the outside drift.

    Just past a saddle-node edge the drift grows like sqrt(distance), so
    drift^2 is smooth in omega and vanishes at the edge; measuring the drift
    at a few points outside (cheap: no pull-in transient) and extrapolating
    the root crosses the slow skin analytically instead of sampling it.
    """
    settings = settings or LockSettings()
    pts = []
    for frac in depth_fracs:
        om = anchor + side * (0.5 + frac) * w_guess
        drift, ok = measured_drift(alpha, beta, forcing, p, q, mu, om,
                                   settings, base_window)
        if ok and math.isfinite(drift) and abs(drift) < 0.2:
            pts.append((om, drift * drift))
    if len(pts) < 3:
        raise NoBracket(f"drift law needs 3 clean probes, got {len(pts)}")
    oms = np.array([o for o, _ in pts])
    d2s = np.array([d for _, d in pts])
    ref = oms[0]
    coeff = np.polyfit(oms - ref, d2s, min(2, len(pts) - 1))
    roots = np.roots(coeff)
    roots = roots[np.abs(roots.imag) < 1e-12].real + ref
    inner = oms[0]
    good = [r for r in roots
            if (r - inner) * side < 0 and abs(r - inner) < 1.2 * w_guess]
    if not good:
        raise NoBracket("no admissible root of the drift law")
    return min(good, key=lambda r: abs(r - inner))


def bisect_edge(locked, om_in, om_out, tol):
    """One tongue edge: bisection between a locked and an unlocked omega."""
    if not locked(om_in) or locked(om_out):
        raise NoBracket(f"bracket ({om_in}, {om_out}) does not straddle the edge")
    a, b = om_in, om_out
    while abs(b - a) > tol:
        mid = 0.5 * (a + b)
        if locked(mid):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def boundary_bisect(alpha, beta, forcing, p, q, mu, bracket_lo, bracket_hi,
                    settings=None, tol=None, omega0=None):
    """Locate both tongue edges in omega by bisection at fixed mu.

    bracket_lo and bracket_hi are (omega_locked, omega_unlocked) pairs for
    the lower and upper edge; NoBracket if a pair has equal lock status.
    """
    settings = settings or LockSettings()
    locked = _lock_tester(alpha, beta, forcing, p, q, mu, settings)
    t = tol if tol is not None else 1e-6 * (omega0 or abs(bracket_lo[0]))
    edges = sorted(bisect_edge(locked, om_in, om_out, t)
                   for om_in, om_out in (bracket_lo, bracket_hi))
    return edges[0], edges[1]


def scan_tongue(alpha, beta, forcing, p, q, omega_c, mu_values,
                settings=None, width_law=None, tol=None, rel_tol=0.02,
                width_floor=1e-9, max_budget=500_000, strategy="bisect"):
    """Boundaries over an ascending mu schedule.

    width_law = (a, b) predicts width a*mu^b for bracket seeding and for the
    relative bisection tolerance; otherwise each bracket is seeded from the
    previous boundaries widened by a factor two.  The locked inner point is
    searched around the previous centre, which tracks any centre-line drift.
    mu points whose bracket cannot be established are recorded as gaps, and
    widths below width_floor are not bisectable in double precision, so the
    point is skipped.

    strategy "bisect" locates edges by lock/unlock bisection; "drift"
    extrapolates the outside rotation-number drift to zero instead, which
    resolves narrow high-p tongues whose pull-in time (~ p^2/width drive
    periods) makes near-edge lock classification prohibitively slow.
    """
    settings = settings or LockSettings()
    mus, lows, highs = [], [], []
    center = omega_c
    prev = None                      # (mu, width) of the last success
    for mu in mu_values:
        if width_law is not None:
            expect = width_law[0] * mu ** width_law[1]
        elif prev is not None:
            expect = prev[1] * mu / prev[0]
        else:
            expect = 0.2 * mu
        if expect < width_floor:
            continue
        if strategy == "drift":
            try:
                lo = edge_by_drift(alpha, beta, forcing, p, q, mu, center,
                                   expect, -1.0, settings)
                hi = edge_by_drift(alpha, beta, forcing, p, q, mu, center,
                                   expect, 1.0, settings)
            except NoBracket:
                continue
            if not (lo < hi and 0.25 * expect < hi - lo < 4.0 * expect):
                continue
            mus.append(mu)
            lows.append(lo)
            highs.append(hi)
            center = 0.5 * (lo + hi)
            prev = (mu, hi - lo)
            continue
        # phase pull-in rate scales with the tongue width: budget accordingly
        cap = int(min(max(30.0 * p * p / expect, 20_000), max_budget))
        mu_settings = replace(settings, max_total_periods=cap)
        locked = _lock_tester(alpha, beta, forcing, p, q, mu, mu_settings)
        half = min(max(1.2 * expect, 10.0 * width_floor), 0.45 * omega_c)
        inner = None
        for shift in (0.0, -0.25, 0.25, -0.6, 0.6):
            cand = center + shift * expect
            if locked(cand):
                inner = cand
                break
        if inner is None:
            continue
        t = tol if tol is not None else max(rel_tol * expect, 1e-12)
        edges = []
        ok = True
        for sign in (-1.0, 1.0):
            outer, grow = inner + sign * half, 0
            while locked(outer) and grow < 8:
                outer = inner + sign * (outer - inner) * 2.0
                grow += 1
            if locked(outer):
                ok = False
                break
            edges.append(bisect_edge(locked, inner, outer, t))
        if not ok:
            continue
        lo, hi = sorted(edges)
        mus.append(mu)
        lows.append(lo)
        highs.append(hi)
        center = 0.5 * (lo + hi)
        prev = (mu, hi - lo)
    return TongueResult(p, q, np.array(mus), np.array(lows), np.array(highs))


def staircase(alpha, beta, forcing, mu, omega_values, settings=None):
    """Measured omega/Omega over an omega grid (plateaux at rationals)."""
    settings = settings or LockSettings()
    out = np.empty(len(omega_values))
    flags = np.zeros(len(omega_values), dtype=int)
    for i, om in enumerate(omega_values):
        status, ratio = measured_ratio(
            LockProbe(alpha, beta, mu, om, 0.0, forcing, 1, 1, settings))
        out[i] = ratio
        flags[i] = status
    return out, flags
