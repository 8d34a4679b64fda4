"""The driven oscillator and its unperturbed limit cycle.

The unperturbed equation, in physical time t,

    u'' + u' h(u) + k(u) = 0,
    h(u) = 1 - beta + 3 beta u^2,   k(u) = u (alpha - beta + beta u^2),

has a globally attracting limit cycle for alpha > beta > 1.  This module
integrates both the unperturbed and driven equations and computes the cycle
(U0, T0, Omega0) plus uniform samples of (u0, u0') over one period to close
to machine precision, by Runge-Kutta transients followed by Taylor-series
marching with Newton refinement of the u' = 0 crossing.

The driven equation is handled in rescaled time tau = omega t, where the
drive has period 2 pi:

    u'' + u' h(u)/omega + k(u)/omega^2 + mu Psi(u, u', tau + tau0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import series
from .errors import InvalidParams, NoConvergence, StepUnderflow
from .interp import PeriodicSamples


@dataclass(frozen=True)
class SystemParams:
    """Oscillator and drive parameters.

    alpha and beta fix the unperturbed oscillator; mu, omega and tau0 are the
    drive amplitude, frequency and initial phase.  alpha > beta > 1 is
    required for the attracting limit cycle.
    """

    alpha: float
    beta: float
    mu: float = 0.0
    omega: float = 1.0
    tau0: float = 0.0

    def __post_init__(self):
        if not (self.alpha > self.beta > 1.0):
            raise InvalidParams("requires alpha > beta > 1")
        if self.mu < 0 or self.omega <= 0:
            raise InvalidParams("requires mu >= 0 and omega > 0")
        object.__setattr__(self, "tau0", self.tau0 % (2.0 * math.pi))

    def h(self, u):
        return 1.0 - self.beta + 3.0 * self.beta * u * u

    def k(self, u):
        return u * (self.alpha - self.beta + self.beta * u * u)


@dataclass
class State:
    u: float
    v: float
    tau: float = 0.0


def rhs_unperturbed(params: SystemParams, state: State):
    """(du/dt, dv/dt) of the unperturbed oscillator in physical time."""
    u, v = state.u, state.v
    return v, -v * params.h(u) - params.k(u)


def rhs_perturbed(params: SystemParams, forcing, state: State):
    """(du/dtau, dv/dtau) of the driven oscillator in rescaled time."""
    u, v = state.u, state.v
    w = params.omega
    f = forcing.eval(state.tau + params.tau0)
    fp = forcing.eval_derivative(state.tau + params.tau0)
    drive = (w * v * (3.0 * u * u - 1.0) * f + u * (u * u - 1.0) * (f + w * fp)) / (w * w)
    return v, -v * params.h(u) / w - params.k(u) / (w * w) - params.mu * drive


def integrate_rk4(rhs, state: State, h, n_steps):
    """Classical fourth-order Runge-Kutta; rhs maps State -> (du, dv)."""
    u, v, tau = state.u, state.v, state.tau
    for _ in range(n_steps):
        k1u, k1v = rhs(State(u, v, tau))
        k2u, k2v = rhs(State(u + 0.5 * h * k1u, v + 0.5 * h * k1v, tau + 0.5 * h))
        k3u, k3v = rhs(State(u + 0.5 * h * k2u, v + 0.5 * h * k2v, tau + 0.5 * h))
        k4u, k4v = rhs(State(u + h * k3u, v + h * k3v, tau + h))
        u += h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v += h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        tau += h
    return State(u, v, tau)


def taylor_step(params: SystemParams, state: State, degree=30, radius=0.1):
    """Taylor polynomials of the unperturbed solution at state, plus a
    validated step size.

    The step is accepted once the last three coefficients satisfy the tail
    test |c_k| h^k < 1e-14 max(1, |u|), halving otherwise; raises
    StepUnderflow below 1e-12.
    """
    if degree < 4:
        raise ValueError("need degree >= 4 for the tail test")
    u_poly = series.lienard_series(params.alpha, params.beta, state.u, state.v, degree)
    v_poly = series.differentiate(u_poly)
    h = radius
    bound = 1e-14 * max(1.0, abs(state.u))
    while True:
        tail = np.abs(u_poly[degree - 2 :]) * h ** np.arange(degree - 2, degree + 1)
        if np.all(tail < bound):
            return u_poly, v_poly, h
        h *= 0.5
        if h < 1e-12:
            raise StepUnderflow("taylor step collapsed below 1e-12")


@dataclass(frozen=True)
class LimitCycleSettings:
    n_samples: int = 151            # odd, as required by the interpolation kernel
    transient_time: float = 200.0   # f0 > 0 makes the transient error ~ exp(-150)
    rk4_step: float = 2e-3
    taylor_degree: int = 30
    newton_max: int = 50
    newton_tol: float = 1e-14
    polish_loops: int = 3


@dataclass(frozen=True)
class LimitCycle:
    """The attracting periodic orbit, anchored at u(0) = U0 > 0, u'(0) = 0."""

    alpha: float
    beta: float
    U0: float
    T0: float
    u: np.ndarray = field(repr=False)   # u0 at nodes j*T0/K
    v: np.ndarray = field(repr=False)   # du0/dt at the same nodes
    series_pieces: list = field(repr=False, default_factory=list)
    closure_error: float = 0.0

    @property
    def Omega0(self):
        return 2.0 * math.pi / self.T0

    @property
    def K(self):
        return len(self.u)

    @property
    def u_samples(self):
        return PeriodicSamples(self.T0, self.u)

    @property
    def v_samples(self):
        return PeriodicSamples(self.T0, self.v)


def _newton_crossing(params, state, degree, guess=0.0, max_iter=50, tol=1e-14):
    """Refine dt with v(dt) = 0 by Newton on the Taylor series at state."""
    u_poly = series.lienard_series(params.alpha, params.beta, state.u, state.v, degree)
    v_poly = series.differentiate(u_poly)
    a_poly = series.differentiate(v_poly)
    dt = guess
    for _ in range(max_iter):
        step = series.evaluate(v_poly, dt) / series.evaluate(a_poly, dt)
        dt -= step
        if abs(step) < tol:
            u_new = series.evaluate(u_poly, dt)
            return dt, State(u_new, series.evaluate(v_poly, dt), state.tau + dt)
    raise NoConvergence("newton refinement of the v = 0 crossing stalled")


def _march_period(params, state, settings):
    """Taylor-march from a (U, 0) anchor to the next v = 0, u > 0 crossing.

    Returns the elapsed time and the refined crossing state.
    """
    deg = settings.taylor_degree
    t = 0.0
    cur = State(state.u, state.v, state.tau)
    pieces = []
    # initial nudge off the anchor so the crossing detector does not fire at 0
    u_poly, v_poly, h = taylor_step(params, cur, deg, radius=0.05)
    pieces.append((t, u_poly))
    cur = State(series.evaluate(u_poly, h), series.evaluate(v_poly, h), cur.tau + h)
    t += h
    for _ in range(10000):
        u_poly, v_poly, h = taylor_step(params, cur, deg, radius=0.05)
        u_next = series.evaluate(u_poly, h)
        v_next = series.evaluate(v_poly, h)
        if cur.u > 0 and cur.v > 0 and v_next <= 0.0:
            dt, refined = _newton_crossing(
                params, cur, deg, guess=0.5 * h, max_iter=settings.newton_max,
                tol=settings.newton_tol,
            )
            return t + dt, refined, pieces
        pieces.append((t, u_poly))
        cur = State(u_next, v_next, cur.tau + h)
        t += h
    raise NoConvergence("no v = 0 crossing found within the step budget")


def find_limit_cycle(params: SystemParams, settings: LimitCycleSettings | None = None):
    """Compute the limit cycle to near machine precision.

    Stages: (i) Runge-Kutta transient from (2, 0); (ii) locate the v = 0,
    u > 0 crossing by bisection on the integrated flow; (iii) Newton-refine
    the crossing on the local Taylor series and march whole periods until U0
    and T0 settle; then sample K points over one period by Taylor stepping.
    """
    settings = settings or LimitCycleSettings()
    p = SystemParams(params.alpha, params.beta)  # drive fields ignored here

    # (i) transient: the cycle attracts with rate <h(u0)> > 0
    n = int(round(settings.transient_time / settings.rk4_step))
    st = integrate_rk4(lambda s: rhs_unperturbed(p, s), State(2.0, 0.0, 0.0),
                       settings.rk4_step, n)

    # (ii) coarse crossing: v changes sign from + to - at the u > 0 maximum
    h = settings.rk4_step
    prev = st
    for _ in range(int(20.0 / h)):
        cur = integrate_rk4(lambda s: rhs_unperturbed(p, s), prev, h, 1)
        if prev.u > 0 and prev.v > 0 and cur.v <= 0:
            break
        prev = cur
    else:
        raise NoConvergence("transient never produced a u > 0 maximum")
    lo, hi, base = 0.0, h, prev
    for _ in range(60):  # bisection on v along the flow from `base`
        mid = 0.5 * (lo + hi)
        v_mid = integrate_rk4(lambda s: rhs_unperturbed(p, s), base, mid, 1).v if mid > 0 else base.v
        if v_mid > 0:
            lo = mid
        else:
            hi = mid
    st = integrate_rk4(lambda s: rhs_unperturbed(p, s), base, 0.5 * (lo + hi), 1)

    # (iii) Newton polish on the series, then march whole periods
    _, anchor = _newton_crossing(p, st, settings.taylor_degree,
                                 max_iter=settings.newton_max, tol=settings.newton_tol)
    T0 = None
    for _ in range(settings.polish_loops):
        T0, nxt, _ = _march_period(p, anchor, settings)
        if abs(nxt.u - anchor.u) < 1e-13 and T0 is not None:
            anchor = State(nxt.u, 0.0, 0.0)
            break
        anchor = State(nxt.u, 0.0, 0.0)
    U0 = anchor.u

    # fixed-step Taylor sampling of one period
    K = settings.n_samples
    dt = T0 / K
    u_nodes = np.empty(K)
    v_nodes = np.empty(K)
    pieces = []
    cur = State(U0, 0.0, 0.0)
    for j in range(K):
        u_nodes[j], v_nodes[j] = cur.u, cur.v
        u_poly = series.lienard_series(p.alpha, p.beta, cur.u, cur.v, settings.taylor_degree)
        v_poly = series.differentiate(u_poly)
        tail = np.abs(u_poly[-3:]) * dt ** np.arange(len(u_poly) - 3, len(u_poly))
        if np.any(tail > 1e-13 * max(1.0, abs(cur.u))):
            raise StepUnderflow("sampling step fails the coefficient tail test")
        pieces.append((j * dt, u_poly))
        cur = State(series.evaluate(u_poly, dt), series.evaluate(v_poly, dt), cur.tau + dt)
    closure = math.hypot(cur.u - U0, cur.v)

    return LimitCycle(p.alpha, p.beta, U0, T0, u_nodes, v_nodes, pieces, closure)
