"""Locking-interval widths from perturbation theory.

First order: the phase-compatibility function

    eps1(tau0) = (1/A) sum_nu c_nu (D1_nu cos(nu tau0) + D2_nu sin(nu tau0))

is assembled from trigonometric moments of the two kernel functions

    K1 = exp(F_tilde) b u0' (3 u0^2 - 1),
    K2 = exp(F_tilde) b u0 (u0^2 - 1),

(everything sampled in physical time on the cycle grid; u0' is the physical
slope).  A drive harmonic nu contributes to the p:q resonance only when
nu p / q is an even integer, which is the arithmetic selection rule
2|nu'| q = |nu| p.  The plateau is

    width(rho) ~ mu * rho^2 Omega0^2 * (max eps1 - min eps1).

Second order: the correction u1 to the locked orbit is built from the
periodic (a) and decaying (b) variational parts by quadrature, and the
tau0-dependent mean of the second-order mismatch against exp(F_tilde) b
gives eps2, whose swing yields the O(mu^2) width that dominates whenever
the first order vanishes.

Reported D and A values follow the same resonance-rescaled convention as
the wronskian module, so D/A ratios (and hence all widths and angles) are
convention-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CompatibilityViolated, DegenerateExtremum
from .forcing import Forcing
from .interp import (PeriodicSamples, exp_kernel_antiderivative,
                     fourier_coefficients, interpolate, kernel_antiderivative,
                     romberg_split)
from .lienard import LimitCycle
from .wronskian import WronskianData

TAU0_GRID = 64            # coarse extremization grid over the drive phase
GOLDEN_TOL = 1e-8


@dataclass(frozen=True)
class ResonanceSpec:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or math.gcd(self.p, self.q) != 1:
            raise ValueError("resonance p:q needs coprime positive integers")

    @property
    def rho(self):
        return self.p / self.q


@dataclass(frozen=True)
class KernelFunctions:
    """The two averaging kernels and their Fourier data.

    Sampled over one cycle period in physical time; coefficient n of the
    physical-time series corresponds to harmonic 2 nu' = n of the rescaled
    series for any resonance, so one kernel set serves every rho.
    """

    K1: PeriodicSamples = field(repr=False)
    K2: PeriodicSamples = field(repr=False)
    khat1: np.ndarray = field(repr=False)   # coefficients n = 0 .. (K-1)/2
    khat2: np.ndarray = field(repr=False)
    xi1: float                               # fitted even-harmonic decay rate
    Gamma: float                             # fitted decay prefactor

    def coefficient(self, i, n):
        kh = self.khat1 if i == 1 else self.khat2
        if n < 0:
            return np.conj(kh[-n]) if -n < len(kh) else 0.0
        return kh[n] if n < len(kh) else 0.0


def kernel_functions(cycle: LimitCycle, wdata: WronskianData, rho=None):
    """Build K1, K2 on the cycle grid and fit their coefficient decay."""
    eF = np.exp(wdata.F_tilde.values)
    b = wdata.b.values
    u, du = cycle.u, cycle.v
    k1 = PeriodicSamples(cycle.T0, eF * b * du * (3.0 * u * u - 1.0))
    k2 = PeriodicSamples(cycle.T0, eF * b * u * (u * u - 1.0))
    c1 = fourier_coefficients(k1)
    c2 = fourier_coefficients(k2)
    # decay fit over even harmonics 2..20: log|c_n| ~ log Gamma - xi1 n
    n = np.arange(2, 21, 2)
    mags = np.concatenate([np.abs(c1[n]), np.abs(c2[n])])
    ln = np.log(np.maximum(mags, 1e-300))
    nn = np.concatenate([n, n]).astype(float)
    slope, intercept = np.polyfit(nn, ln, 1)
    return KernelFunctions(k1, k2, c1, c2, xi1=-slope, Gamma=math.exp(intercept))


def selection_rule(res: ResonanceSpec, forcing: Forcing, harmonic_cutoff=None):
    """Drive harmonics that can open the p:q tongue at first order.

    Returns pairs (nu, nu') with 2|nu'| q = |nu| p and a nonzero drive
    coefficient; empty means the first-order width vanishes.
    """
    cutoff = harmonic_cutoff or (max(forcing.harmonics) if forcing.harmonics else 0)
    out = []
    for nu in forcing.harmonics:
        if nu > cutoff:
            continue
        if (nu * res.p) % (2 * res.q) == 0:
            nu_p = nu * res.p // (2 * res.q)
            out.append((nu, nu_p))
            out.append((nu, -nu_p))
    return out


def second_order_selection(res: ResonanceSpec, forcing: Forcing):
    """Harmonic triples (nu1, nu2, nu') feeding the O(mu^2) width.

    Pairs with nu1 + nu2 = nu' = 0 only shift the tongue centre; a triple
    with nu' != 0 makes eps2 non-constant and hence opens a plateau.
    """
    out = []
    for nu1 in forcing.harmonics:
        for s1 in (1, -1):
            for nu2 in forcing.harmonics:
                for s2 in (1, -1):
                    tot = abs(s1 * nu1 + s2 * nu2)
                    if (tot * res.p) % (2 * res.q) == 0:
                        nu_p = tot * res.p // (2 * res.q)
                        out.append((s1 * nu1, s2 * nu2, nu_p))
    return out


def _d_pair(kernels: KernelFunctions, n, Omega0):
    """(D1, D2) for a drive harmonic whose rescaled kernel index is n."""
    kh1 = kernels.coefficient(1, n)
    kh2 = kernels.coefficient(2, n)
    d1 = (kh1 + kh2).imag - n * Omega0 * kh2.real
    d2 = -(kh1 + kh2).real - n * Omega0 * kh2.imag
    return d1, d2


def b_coefficients_fourier(kernels, res: ResonanceSpec, nu, Omega0):
    """B_{ij nu} from the kernel Fourier data (reported convention)."""
    n_float = nu * res.p / res.q
    n = int(round(n_float))
    if abs(n_float - n) > 1e-12:
        return {key: 0.0 for key in ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2))}
    kh1 = kernels.coefficient(1, n)
    kh2 = kernels.coefficient(2, n)
    sig_nu = n * Omega0          # = nu * rho * Omega0
    return {(1, 1): -kh1.imag, (1, 2): kh1.real,
            (2, 1): -kh2.imag, (2, 2): kh2.real,
            (3, 1): sig_nu * kh2.real, (3, 2): sig_nu * kh2.imag}


def b_coefficients_quadrature(kernels, res: ResonanceSpec, nu, Omega0, rel_tol=1e-10):
    """The same moments by direct split-interval Romberg over q periods."""
    T0 = kernels.K1.period
    span = res.q * T0
    sig_nu = nu * (res.p / res.q) * Omega0
    out = {}
    for i, samp in ((1, kernels.K1), (2, kernels.K2)):
        for j, trig in ((1, np.sin), (2, np.cos)):
            val = romberg_split(
                lambda t, samp=samp, trig=trig: interpolate(samp, t) * trig(sig_nu * t),
                0.0, span, rel_tol=rel_tol) / span
            out[(i, j)] = val
    out[(3, 1)] = sig_nu * out[(2, 2)]
    out[(3, 2)] = -sig_nu * out[(2, 1)]
    return out


@dataclass(frozen=True)
class FirstOrderData:
    resonance: ResonanceSpec
    A: float
    B: dict = field(repr=False)                  # (i, j, nu) -> moment
    D1: dict = field(repr=False)                 # nu -> D1_nu (per unit drive coeff)
    D2: dict = field(repr=False)
    fhat: dict = field(repr=False)               # nu -> drive coefficient
    kbar1: dict = field(repr=False)
    kbar2: dict = field(repr=False)
    nu0: int | None
    nu1: int | None
    eps1_max: float
    eps1_min: float
    tau0_max: float
    tau0_min: float
    degenerate: bool

    def eps1(self, tau0):
        """The first-order compatibility function of the drive phase."""
        tau0 = np.asarray(tau0, dtype=float)
        out = np.zeros(tau0.shape)
        for nu, d1 in self.D1.items():
            out += self.fhat[nu] * (d1 * np.cos(nu * tau0) + self.D2[nu] * np.sin(nu * tau0))
        out /= self.A
        return out if out.ndim else float(out)

    @property
    def Q(self):
        return self.eps1_max - self.eps1_min

    def Q0(self, forcing):
        """Leading-harmonic approximation to Q (exact for one active nu)."""
        if self.nu0 is None:
            return 0.0
        return 2.0 * abs(forcing.coefficient(self.nu0)) * self.kbar_norm(self.nu0) / abs(self.A)

    def kbar_norm(self, nu):
        return math.hypot(self.D1[nu], self.D2[nu])

    def width_slope(self, sigma):
        """d(width)/d(mu) at the tip: sigma^2 (max - min) of eps1."""
        return sigma**2 * (self.eps1_max - self.eps1_min)

    def angles(self, sigma):
        """Half opening angles (theta1, theta2) of the tongue."""
        return (math.atan(-sigma**2 * self.eps1_min),
                math.atan(sigma**2 * self.eps1_max))


def _golden_refine(fn, lo, hi, maximize, tol=GOLDEN_TOL):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    sign = 1.0 if maximize else -1.0
    x1 = hi - g * (hi - lo)
    x2 = lo + g * (hi - lo)
    f1, f2 = sign * fn(x1), sign * fn(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = sign * fn(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = sign * fn(x1)
    x = 0.5 * (lo + hi)
    return x, fn(x)


def _extremize(fn, n_grid=TAU0_GRID):
    grid = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    vals = fn(grid)
    step = 2.0 * math.pi / n_grid
    i_max = int(np.argmax(vals))
    i_min = int(np.argmin(vals))
    scalar = lambda x: float(fn(np.array([x]))[0])
    t_max, v_max = _golden_refine(scalar, grid[i_max] - step, grid[i_max] + step, True)
    t_min, v_min = _golden_refine(scalar, grid[i_min] - step, grid[i_min] + step, False)
    return t_max, v_max, t_min, v_min


def first_order(cycle: LimitCycle, wdata: WronskianData, kernels: KernelFunctions,
                forcing: Forcing, res: ResonanceSpec, cross_check=False):
    """Assemble eps1 and the first-order width data for one resonance.

    Raises DegenerateExtremum when the selection rule admits nothing (the
    swing of eps1 is below 1e-13); callers then move on to second order.
    """
    Omega0 = cycle.Omega0
    sigma = res.rho * Omega0
    A = wdata.A_closed if wdata.rho == res.rho else (
        cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2) * sigma)
    B, D1, D2, kbar1, kbar2 = {}, {}, {}, {}, {}
    fhat = {nu: forcing.coefficient(nu) for nu in forcing.harmonics}
    active = []
    for nu in forcing.harmonics:
        bij = b_coefficients_fourier(kernels, res, nu, Omega0)
        if cross_check and any(abs(v) > 1e-14 for v in bij.values()):
            bq = b_coefficients_quadrature(kernels, res, nu, Omega0)
            for key in bij:
                if abs(bij[key] - bq[key]) > 1e-9 * max(1.0, abs(bij[key])):
                    raise CompatibilityViolated(
                        f"moment {key} disagrees between fourier and quadrature routes")
        for (i, j), v in bij.items():
            B[(i, j, nu)] = v
        d1 = -(bij[(1, 1)] + bij[(2, 1)] + bij[(3, 1)])
        d2 = -(bij[(1, 2)] + bij[(2, 2)] + bij[(3, 2)])
        D1[nu], D2[nu] = d1, d2
        kbar1[nu], kbar2[nu] = -d1, -d2
        if abs(d1) > 1e-12 or abs(d2) > 1e-12:
            active.append(nu)
    nu0 = active[0] if active else None
    nu1 = active[1] if len(active) > 1 else None

    data = FirstOrderData(res, A, B, D1, D2, fhat, kbar1, kbar2, nu0, nu1,
                          0.0, 0.0, 0.0, 0.0, degenerate=True)
    t_max, v_max, t_min, v_min = _extremize(data.eps1)
    # threshold sits above the double-precision noise floor of the moments
    degenerate = (v_max - v_min) < 1e-11
    data = FirstOrderData(res, A, B, D1, D2, fhat, kbar1, kbar2, nu0, nu1,
                          v_max, v_min, t_max, t_min, degenerate)
    if degenerate:
        raise DegenerateExtremum(
            f"first order vanishes for {res.p}:{res.q}; use second order", data)
    return data


def width_first_order(data: FirstOrderData, cycle: LimitCycle, mu=None):
    """Linear width law: width = mu * sigma^2 * (max - min) of eps1."""
    sigma = data.resonance.rho * cycle.Omega0
    slope = data.width_slope(sigma)
    return slope if mu is None else mu * slope


def width_full(data: FirstOrderData, cycle: LimitCycle, mu, d2_mean=0.0):
    """Width through the full frequency map rather than its linearization.

    omega_min,max = sigma / (1 + sigma eps) at the two extremes of eps; the
    optional d2_mean shifts both extremes by mu^2 times the mean of eps2.
    """
    sigma = data.resonance.rho * cycle.Omega0
    e_max = mu * data.eps1_max + mu * mu * d2_mean
    e_min = mu * data.eps1_min + mu * mu * d2_mean
    omega_min = sigma / (1.0 + sigma * e_max)
    omega_max = sigma / (1.0 + sigma * e_min)
    return omega_min, omega_max, omega_max - omega_min


def width_bound(res: ResonanceSpec, forcing: Forcing, kernels: KernelFunctions,
                cycle: LimitCycle):
    """Envelope C p^2 q^{-1} exp(-xi1 p) exp(-xi q) on the width slope.

    The constant comes from summing the harmonic series with the fitted
    kernel decay (xi1, Gamma) and the drive decay (xi, phi); generous by
    construction, it bounds every first-order slope.
    """
    Omega0 = cycle.Omega0
    r1 = cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2)
    xi, xi1 = forcing.xi, kernels.xi1
    C = (4.0 * Omega0 * (1.0 + 2.0 * Omega0) * forcing.phi * kernels.Gamma
         / (r1 * (1.0 - math.exp(-xi)) * (1.0 - math.exp(-min(xi1, 20.0)))))
    return C * res.p**2 / res.q * math.exp(-xi1 * res.p) * math.exp(-xi * res.q)


def scaling_constant(p, kernels: KernelFunctions, cycle: LimitCycle, lam=2.0):
    """Theory constant c(p) of the asymptotic law width ~ c mu / (q lam^{2q})
    (p odd; lam^q for p even) for the all-harmonics drive.

    c(p) = 2 p Omega0 Phi(lam) Kbar(n0) / (|r1| ln lam) with
    Phi(lam) = (lam^2 - 1)/lam, n0 = 2p for odd p and p for even p, and
    Kbar the per-unit-coefficient swing of the compatibility moments; the
    plain leading-harmonic constant (matching direct width fits as
    q grows) is c(p) * ln(lam).
    """
    n0 = 2 * p if p % 2 == 1 else p
    d1, d2 = _d_pair(kernels, n0, cycle.Omega0)
    kbar = math.hypot(d1, d2)
    r1 = cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2)
    phi = (lam * lam - 1.0) / lam
    return 2.0 * p * cycle.Omega0 * phi * kbar / (r1 * math.log(lam))


# ---------------------------------------------------------------------------
# second order
# ---------------------------------------------------------------------------


class ResonanceWorkspace:
    """Precomputed grids and quadrature operators for one resonance.

    Everything on N odd nodes over q cycle periods in physical time; the
    cumulative-integral operators (plain and exponentially weighted) are
    dense matrices built once and reused for every drive phase.
    """

    def __init__(self, cycle: LimitCycle, wdata: WronskianData, forcing: Forcing,
                 res: ResonanceSpec, n_samples=None):
        self.cycle = cycle
        self.wdata = wdata
        self.forcing = forcing
        self.res = res
        N = n_samples or (301 if res.q == 1 else 151 * res.q + (151 * res.q + 1) % 2)
        self.N = N
        self.P = res.q * cycle.T0                        # common period, physical time
        self.sigma = res.rho * cycle.Omega0
        self.m = wdata.floquet_mean
        t = np.arange(N) * (self.P / N)
        self.t = t
        self.u0 = interpolate(cycle.u_samples, t)
        self.du0 = interpolate(cycle.v_samples, t)       # physical slope
        self.v0 = self.du0 / self.sigma                  # rescaled slope
        self.Ft = interpolate(wdata.F_tilde, t)
        self.eF = np.exp(self.Ft)
        self.b = interpolate(wdata.b, t)
        self.a = wdata.gamma_unscaled * self.du0         # = gamma^resc * v0
        kU = cycle.U0 * (cycle.alpha - cycle.beta + cycle.beta * cycle.U0**2)
        self.A_clean = kU / self.sigma
        self.c_const = -self.sigma / (kU * wdata.gamma_unscaled)

        # cumulative integral of the interpolant at the nodes and at P
        j = np.arange(N)
        targets = np.concatenate([t, [self.P]])
        arg = targets.reshape(-1, 1) / self.P - j / N
        self._cum = self.P * (kernel_antiderivative(arg, N)
                              + kernel_antiderivative(j / N, N))
        # exponentially weighted: integral of exp(m s) x(s) ds from 0 to t
        z = -self.m * self.P
        upper = exp_kernel_antiderivative(z, arg.ravel(), N).reshape(arg.shape)
        lower = exp_kernel_antiderivative(z, -j / N, N)
        self._cum_exp = self.P * ((upper - lower) * np.exp(-z * j / N))

    def cumulative(self, values):
        """integral_0^t of the trig interpolant, at the nodes plus t = P."""
        return self._cum @ values

    def cumulative_exp(self, values):
        """integral_0^t exp(m s) x(s) ds, at the nodes plus t = P."""
        return self._cum_exp @ values

    def psi1(self, tau0, eps1):
        """Forcing term of the first-order variational problem."""
        params = _params(self.cycle)
        f = self.forcing.eval(self.sigma * self.t + tau0)
        fp = self.forcing.eval_derivative(self.sigma * self.t + tau0)
        h = params.h(self.u0)
        k = params.k(self.u0)
        drive = (self.v0 * (3.0 * self.u0**2 - 1.0) * f / self.sigma
                 + self.u0 * (self.u0**2 - 1.0) * (f / self.sigma**2 + fp / self.sigma))
        return -(eps1 * (self.v0 * h + 2.0 * k / self.sigma) + drive), f, fp

    def u1(self, tau0, eps1):
        """First-order orbit correction and its rescaled derivative."""
        psi, f, fp = self.psi1(tau0, eps1)
        g2 = self.eF * self.b * psi
        S2 = self.sigma * self.cumulative(g2)            # Q2(t) - Q2(0), nodes + P
        compat = S2[-1] / (self.sigma * self.P)
        if abs(compat) > 1e-9 * max(1.0, float(np.max(np.abs(g2)))):
            raise CompatibilityViolated(
                f"<exp(F~) b Psi1> = {compat:.3e} is not zero; eps1 inconsistent")
        g1 = self.eF * self.a * psi                      # exp(F) a Psi1 = e^{mt} g1
        I = self.sigma * self.cumulative_exp(g1)
        grow = math.expm1(self.m * self.P)
        q1_0 = I[-1] / grow
        emt = np.exp(-self.m * np.concatenate([self.t, [self.P]]))
        Q1 = emt * (q1_0 + I)
        a_ext = np.concatenate([self.a, self.a[:1]])
        b_ext = np.concatenate([self.b, self.b[:1]])
        u1 = self.c_const * (a_ext * (S2 - q1_0) - b_ext * Q1)
        gap = abs(u1[-1] - u1[0])
        u1 = u1[:-1]
        c = np.fft.rfft(u1)
        n = np.arange(len(c))
        v1 = np.fft.irfft(c * (2j * np.pi * n / self.P), n=self.N) / self.sigma
        return u1, v1, gap

    def d2(self, tau0, eps1):
        """eps2(tau0): the second-order compatibility value."""
        params = _params(self.cycle)
        u1, v1, _ = self.u1(tau0, eps1)
        f = self.forcing.eval(self.sigma * self.t + tau0)
        fp = self.forcing.eval_derivative(self.sigma * self.t + tau0)
        u0, v0, sig = self.u0, self.v0, self.sigma
        beta = self.cycle.beta
        hp = 6.0 * beta * u0
        kp = (self.cycle.alpha - beta) + 3.0 * beta * u0 * u0
        dH1_du = (eps1 * (v0 * hp + 2.0 * kp / sig)
                  + 6.0 * u0 * v0 * f / sig
                  + (3.0 * u0 * u0 - 1.0) * (f / sig**2 + fp / sig))
        dH1_dv = eps1 * params.h(u0) + (3.0 * u0 * u0 - 1.0) * f / sig
        G_uu = -(v0 * 6.0 * beta + 6.0 * beta * u0 / sig) / sig
        G_uv = -hp / sig
        xi_bar = (-u1 * dH1_du - v1 * dH1_dv
                  + 0.5 * u1 * u1 * G_uu + u1 * v1 * G_uv)
        xi_tilde = (-eps1**2 * params.k(u0)
                    - eps1 * v0 * (3.0 * u0 * u0 - 1.0) * f
                    - eps1 * (u0**3 - u0) * (2.0 * f / sig + fp))
        return float(np.mean(self.eF * self.b * (xi_bar + xi_tilde))) / self.A_clean


@dataclass(frozen=True)
class SecondOrderData:
    resonance: ResonanceSpec
    tau0_grid: np.ndarray = field(repr=False)
    d2_values: np.ndarray = field(repr=False)
    d2_mean: float
    d2_max: float
    d2_min: float
    width_coefficient: float          # sigma^2 (max - min): width = coeff * mu^2


def second_order(cycle: LimitCycle, wdata: WronskianData, forcing: Forcing,
                 res: ResonanceSpec, first: FirstOrderData | None = None,
                 n_tau0=TAU0_GRID, n_samples=None):
    """eps2 over a drive-phase grid and the O(mu^2) width coefficient."""
    ws = ResonanceWorkspace(cycle, wdata, forcing, res, n_samples)
    eps1_fn = (lambda t0: 0.0) if first is None or first.degenerate else first.eps1
    grid = np.linspace(0.0, 2.0 * math.pi, n_tau0, endpoint=False)
    vals = np.array([ws.d2(t0, float(np.asarray(eps1_fn(t0)))) for t0 in grid])
    scalar = lambda x: ws.d2(x, float(np.asarray(eps1_fn(x))))
    step = 2.0 * math.pi / n_tau0
    i_max, i_min = int(np.argmax(vals)), int(np.argmin(vals))
    _, v_max = _golden_refine(scalar, grid[i_max] - step, grid[i_max] + step, True,
                              tol=1e-6)
    _, v_min = _golden_refine(scalar, grid[i_min] - step, grid[i_min] + step, False,
                              tol=1e-6)
    sigma = res.rho * cycle.Omega0
    return SecondOrderData(res, grid, vals, float(np.mean(vals)), v_max, v_min,
                           sigma**2 * (v_max - v_min))


def u1_solution(cycle, wdata, forcing, res: ResonanceSpec, tau0, eps1=0.0,
                n_samples=None):
    """Sampled (u1, v1) over the locked period for one drive phase."""
    ws = ResonanceWorkspace(cycle, wdata, forcing, res, n_samples)
    u1, v1, gap = ws.u1(tau0, eps1)
    return ws.t, u1, v1, gap


def _params(cycle):
    from .lienard import SystemParams

    return SystemParams(cycle.alpha, cycle.beta)
