"""Variational data of the unperturbed cycle.

Everything here is computed in physical time t on [0, 2*T0].  The normal
solution of the variational equation with w(0) = 1, w'(0) = 0 splits as

    w11(t) = a(t) + exp(-m t) b(t),      a(t) = gamma * u0'(t),

with a, b T0-periodic and m = <h(u0)> the mean damping along the cycle
(the Floquet decay rate of the cycle; m > 0).  w11 is assembled from the
quadrature representation

    w11(t) = k2 u0'(t) + u0'(t) * integral c1 exp(-F(t'))/u0'(t')^2 dt',
    F(t) = integral of h(u0) from 0 to t,      c1 = U0 (alpha - beta + beta U0^2),

whose integrand is singular at the half-period times j*T0/2 where u0'
vanishes.  Near those times a Taylor (Frobenius) series with the parity and
decay factor (-1)^j exp(-j m T0/2) replaces the quadrature, with continuity
constants k2 carried across each singular window (marching cases A-E).

Reported quantities follow the resonance convention used throughout the
tongue formulas: for the p:q resonance, sigma = rho*Omega0 with rho = p/q,

    f0       = m / sigma                (> 0),
    A_closed = U0 (alpha - beta + beta U0^2) * sigma,

and the quadrature value of A must agree with the closed form, which is the
standard numerical cross-check of the whole construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import series
from .errors import CrossCheckFailure, SingularitySpacing
from .interp import (PeriodicSamples, integrate_periodic, interpolate,
                     romberg, romberg_split)
from .lienard import LimitCycle


@dataclass(frozen=True)
class WronskianSettings:
    r_c: float = 1e-2          # half-width of the singular windows
    series_degree: int = 10
    romberg_tol: float = 1e-13


@dataclass(frozen=True)
class WronskianData:
    cycle: LimitCycle = field(repr=False)
    p: int
    q: int
    floquet_mean: float              # m = <h(u0)>, physical-time decay rate
    f0: float                        # m / (rho * Omega0)
    F_tilde: PeriodicSamples = field(repr=False)
    w11: np.ndarray = field(repr=False)          # nodes j*T0/K, j = 0..2K
    a: PeriodicSamples = field(repr=False)
    b: PeriodicSamples = field(repr=False)
    gamma_unscaled: float            # a(t) = gamma_unscaled * u0'(t), physical time
    r1: float                        # u0''(0) = -U0(alpha - beta + beta U0^2)
    A_quad: float
    A_closed: float
    b_periodicity_gap: float = 0.0

    @property
    def rho(self):
        return self.p / self.q

    @property
    def sigma(self):
        return self.rho * self.cycle.Omega0

    @property
    def c1(self):
        return -self.r1

    @property
    def gamma_hat(self):
        """Least-squares slope in the resonance-rescaled convention, where
        time runs at rate sigma and the anchor solution is scaled by sigma^2
        through c1; this is the value quoted alongside f0 and A."""
        return self.gamma_unscaled * self.sigma**3


def floquet_mean(cycle: LimitCycle):
    """Mean of h(u0) over one period (the contraction rate of the cycle)."""
    p = _params(cycle)
    return float(np.mean(p.h(cycle.u)))


def compute_F(cycle: LimitCycle, sigma):
    """Damping integral F, its linear growth rate, and the periodic rest.

    Returns (f0, F_tilde, F) with F(t) = integral of h(u0) from 0 to t
    evaluable anywhere, F_tilde = F - m*t sampled on the cycle grid, and
    f0 = <h>/sigma the reported growth rate for the resonance at hand.
    """
    p = _params(cycle)
    h_samples = PeriodicSamples(cycle.T0, p.h(cycle.u) - np.mean(p.h(cycle.u)))
    m = floquet_mean(cycle)

    def F(t):
        return integrate_periodic(h_samples, t) + m * np.asarray(t, dtype=float)

    # F_tilde is anchored at F_tilde(0) = 0, not at zero mean: the additive
    # constant matters wherever exp(F_tilde) weights an integrand.
    ft_nodes = integrate_periodic(h_samples, h_samples.nodes)
    F_tilde = PeriodicSamples(cycle.T0, ft_nodes)
    return m / sigma, F_tilde, F


def w11_series(alpha, beta, U0, degree=10):
    """Taylor coefficients of w11 about a u' = 0 anchor of the cycle.

    Built by the quadrature route: series for u0', F, exp(-F), the integrand
    exp(-F)/u0'^2, term-by-term integration (the 1/t residue cancels
    identically), product with c1*u0', and finally the multiple of u0' that
    enforces w11'(0) = 0.  The result is 1 + sum_{j>=2} R_j t^j.
    """
    work = degree + 4
    u = series.lienard_series(alpha, beta, U0, 0.0, work + 2)
    up = series.differentiate(u)
    c1 = U0 * (alpha - beta + beta * U0 * U0)

    u2 = series.mul(u, u, work)
    h = (1.0 - beta) * series._unit(work) + 3.0 * beta * u2
    F = series.integrate(h)[: work + 1]
    expF = series.exp_series(-F, work)

    s = up[1:]                       # u0' = t * s(t), s(0) = -c1
    inv_s2 = series.reciprocal(series.mul(s, s, work), work)
    laurent = series.mul(expF, inv_s2, work)      # integrand * t^2
    if abs(laurent[1]) > 1e-10 * abs(laurent[0]):
        raise CrossCheckFailure("log term in the w11 series did not cancel")

    # antiderivative of c1 * laurent / t^2: -L0/t + sum L_k t^(k-1)/(k-1)
    phi_reg = np.zeros(work + 1)     # regular part, coefficient of t^k
    phi_reg[1:work] = laurent[2:] / np.arange(1, work)
    w_bare = c1 * (series.mul(up, phi_reg, work) - laurent[0] * s[: work + 1])
    k2 = w_bare[1] / c1
    w = w_bare[: degree + 1] + k2 * up[: degree + 1]
    return w


def w11_grid(cycle: LimitCycle, F, settings: WronskianSettings | None = None):
    """March w11 over t = 0, h, ..., 2*T0 with h = T0/K.

    Regular stretches accumulate the quadrature integral by Romberg; inside
    each singular window the anchored series is used, with the continuity
    constant k2 re-solved on entry (cases A: stay inside, B: exit, C: enter,
    D: cross in one step, E: fully regular).
    """
    settings = settings or WronskianSettings()
    T0, K = cycle.T0, cycle.K
    h = T0 / K
    r_c = settings.r_c
    if h >= 0.5 * T0 - 2.0 * r_c:
        raise SingularitySpacing("step too large: a singular window could be skipped")
    m = floquet_mean(cycle)
    c1 = cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2)
    w_ser = w11_series(cycle.alpha, cycle.beta, cycle.U0, settings.series_degree)
    v_samp = cycle.v_samples

    def udot(t):
        return interpolate(v_samp, t)

    def integrand(t):
        return c1 * np.exp(-F(t)) / interpolate(v_samp, t) ** 2

    def series_value(t, j, k2):
        scale = (-1.0) ** j * math.exp(-j * m * T0 / 2.0)
        return k2 * udot(t) + scale * series.evaluate(w_ser, t - j * T0 / 2.0)

    def window(t):
        j = int(round(2.0 * t / T0))
        return j if abs(t - j * T0 / 2.0) <= r_c else None

    w = np.empty(2 * K + 1)
    w[0] = 1.0
    k2 = 0.0
    in_window = 0                    # t = 0 sits in window 0 with k2 = 0
    phi = None                       # running w11/u0' on a regular stretch
    t_prev = 0.0
    tol = settings.romberg_tol

    for i in range(1, 2 * K + 1):
        t = i * h
        j = window(t)
        if j is not None:
            if in_window is None:
                # case C: integrate up to the window edge, re-solve k2
                t_minus = j * T0 / 2.0 - r_c
                phi_edge = phi + romberg(integrand, t_prev, t_minus, rel_tol=tol)
                scale = (-1.0) ** j * math.exp(-j * m * T0 / 2.0)
                k2 = phi_edge - scale * series.evaluate(w_ser, t_minus - j * T0 / 2.0) / udot(t_minus)
            # case A (or the tail of C): series with the current k2
            w[i] = series_value(t, j, k2)
            in_window = j
            phi = None
        else:
            if in_window is not None:
                # case B: leave the window at its upper edge
                t_plus = in_window * T0 / 2.0 + r_c
                phi = series_value(t_plus, in_window, k2) / udot(t_plus)
                phi += romberg(integrand, t_plus, t, rel_tol=tol)
            else:
                j_cross = int(round((t_prev + t) / T0))
                crossed = (t_prev < j_cross * T0 / 2.0 - r_c) and (t > j_cross * T0 / 2.0 + r_c)
                if crossed:
                    # case D: C then B across the whole window
                    t_minus = j_cross * T0 / 2.0 - r_c
                    t_plus = j_cross * T0 / 2.0 + r_c
                    phi_edge = phi + romberg(integrand, t_prev, t_minus, rel_tol=tol)
                    scale = (-1.0) ** j_cross * math.exp(-j_cross * m * T0 / 2.0)
                    k2 = phi_edge - scale * series.evaluate(
                        w_ser, t_minus - j_cross * T0 / 2.0) / udot(t_minus)
                    phi = series_value(t_plus, j_cross, k2) / udot(t_plus)
                    phi += romberg(integrand, t_plus, t, rel_tol=tol)
                else:
                    # case E: plain quadrature
                    phi += romberg(integrand, t_prev, t, rel_tol=tol)
            w[i] = udot(t) * phi
            in_window = None
        t_prev = t
    return w


def extract_ab(cycle: LimitCycle, w11, m):
    """Split w11 into the periodic multiple of u0' and the decaying part.

    b comes from differencing w11 one period apart; gamma is the least-
    squares coefficient of u0' in what remains, and a = gamma * u0'.
    """
    T0, K = cycle.T0, cycle.K
    t = np.arange(K + 1) * (T0 / K)
    diff = w11[: K + 1] - w11[K:]
    b_ext = np.exp(m * t) * diff / (1.0 - math.exp(-m * T0))
    udot = np.concatenate([cycle.v, cycle.v[:1]])
    resid = w11[: K + 1] - np.exp(-m * t) * b_ext
    gamma_hat = float(np.dot(udot, resid) / np.dot(udot, udot))
    a = PeriodicSamples(T0, gamma_hat * cycle.v)
    b = PeriodicSamples(T0, b_ext[:K])
    return a, b, gamma_hat, abs(b_ext[K] - b_ext[0])


def compute_A(cycle: LimitCycle, F_tilde, b, sigma, rel_tol=1e-12, method="romberg"):
    """The compatibility normalization constant, two ways.

    Quadrature route: sigma times the period mean of
    exp(F_tilde) b (u0' h(u0) + 2 k(u0)).  Closed form:
    U0 (alpha - beta + beta U0^2) * sigma.  Raises CrossCheckFailure if the
    two disagree beyond 1e-9 relative.
    """
    p = _params(cycle)
    T0 = cycle.T0

    def integrand(t):
        u = interpolate(cycle.u_samples, t)
        du = interpolate(cycle.v_samples, t)
        return (np.exp(interpolate(F_tilde, t)) * interpolate(b, t)
                * (du * p.h(u) + 2.0 * p.k(u)))

    if method == "romberg":
        quad = romberg_split(integrand, 0.0, T0, rel_tol=rel_tol)
    else:
        vals = (np.exp(F_tilde.values) * b.values
                * (cycle.v * p.h(cycle.u) + 2.0 * p.k(cycle.u)))
        quad = integrate_periodic(PeriodicSamples(T0, vals), T0)
    A_quad = sigma * quad / T0
    A_closed = cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2) * sigma
    if abs(A_quad / A_closed - 1.0) > 1e-9:
        raise CrossCheckFailure(
            f"A quadrature {A_quad!r} vs closed form {A_closed!r} disagree")
    return A_quad, A_closed


def variational_core(cycle: LimitCycle, settings: WronskianSettings | None = None):
    """The resonance-independent part of the construction: F data, the w11
    grid, and the (a, b, gamma) split.  Returned as a dict consumed by
    build()."""
    settings = settings or WronskianSettings()
    m = floquet_mean(cycle)
    _, F_tilde, F = compute_F(cycle, 1.0)
    w11 = w11_grid(cycle, F, settings)
    a, b, gamma_u, gap = extract_ab(cycle, w11, m)
    return {"m": m, "F_tilde": F_tilde, "F": F, "w11": w11, "a": a, "b": b,
            "gamma_unscaled": gamma_u, "gap": gap}


def build(cycle: LimitCycle, p=2, q=1, settings: WronskianSettings | None = None,
          core=None):
    """Assemble the full variational data set for the p:q resonance."""
    settings = settings or WronskianSettings()
    core = core or variational_core(cycle, settings)
    sigma = (p / q) * cycle.Omega0
    A_quad, A_closed = compute_A(cycle, core["F_tilde"], core["b"], sigma,
                                 rel_tol=settings.romberg_tol)
    r1 = -cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2)
    return WronskianData(cycle, p, q, core["m"], core["m"] / sigma,
                         core["F_tilde"], core["w11"], core["a"], core["b"],
                         core["gamma_unscaled"], r1, A_quad, A_closed, core["gap"])


def _params(cycle):
    from .lienard import SystemParams

    return SystemParams(cycle.alpha, cycle.beta)
