"""Trigonometric interpolation on uniform periodic grids, with closed-form
quadrature, plus Romberg integration for everything else.

Interpolation is built on the periodic sinc (Dirichlet) kernel

    I_K(t) = sin(K pi t) / (K sin pi t),   K odd,

which is 1-periodic, equals 1 at integers and 0 at the other nodes m/K.
Because the kernel is a trigonometric polynomial, the interpolant of sampled
data can be integrated exactly, both plainly and against an exponential
weight, so integrals of periodic data inherit the spectral accuracy of the
samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWeight, NoConvergence

# Switch-over to the Taylor expansion of I_K near integer arguments.
EPS_KERNEL = 1e-4

# Interior split point for integrals whose value may vanish: integrating
# [a, a+z(b-a)] and [a+z(b-a), b] separately keeps the relative error test
# of romberg() meaningful.  Approximately, but not exactly, one half.
SPLIT_POINT = 0.4872


def dirichlet_kernel(t, K):
    """Evaluate I_K(t) = sin(K pi t)/(K sin pi t) for odd K.

    Near-integer arguments (within EPS_KERNEL) use the series expansion
    through the sixth order in the offset, where the quotient form loses
    accuracy.
    """
    if K < 1 or K % 2 == 0:
        raise ValueError("kernel order K must be an odd positive integer")
    t = np.asarray(t, dtype=float)
    delta = t - np.round(t)
    near = np.abs(delta) < EPS_KERNEL
    safe = np.where(near, 0.25, t)  # dummy value away from the singularity
    direct = np.sin(K * np.pi * safe) / (K * np.sin(np.pi * safe))
    x = (np.pi * delta) ** 2
    series = 1.0 - (K**2 - 1.0) / 6.0 * (
        x
        - (3.0 * K**2 - 7.0) / 60.0 * x**2
        + (3.0 * K**4 - 18.0 * K**2 + 31.0) / 2520.0 * x**3
    )
    out = np.where(near, series, direct)
    return out if out.ndim else float(out)


def kernel_antiderivative(T, K):
    """J_K(T) = integral of I_K from 0 to T, in closed form.

    J_K is odd in T and J_K(n) = n/K for integer n.
    """
    T = np.asarray(T, dtype=float)
    i = np.arange(1, (K - 1) // 2 + 1)
    s = np.sin(2.0 * np.pi * np.outer(T, i)) @ (1.0 / i)
    out = T / K + s.reshape(T.shape) / (K * np.pi)
    return out if out.ndim else float(out)


def exp_kernel_antiderivative(zeta, T, K):
    """E_K(zeta, T) = integral of exp(-zeta*t) I_K(t) dt from 0 to T."""
    if abs(zeta) < 1e-12:
        raise DegenerateWeight("weight exponent too small; use the plain antiderivative")
    T = np.asarray(T, dtype=float)
    i = np.arange(1, (K - 1) // 2 + 1)
    w = 2.0 * np.pi * i
    ang = np.outer(T, w)
    damp = np.exp(-zeta * T).reshape(-1, 1)
    terms = (zeta + damp * (w * np.sin(ang) - zeta * np.cos(ang))) / (zeta**2 + w**2)
    out = (1.0 - np.exp(-zeta * T)) / (zeta * K) + (2.0 / K) * terms.sum(axis=1).reshape(T.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PeriodicSamples:
    """Values of a T-periodic function on the uniform grid j*period/K.

    The node count K must be odd: for even K the interpolation kernel has
    period 2 rather than 1 and nodal exactness is lost.
    """

    period: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.values.ndim != 1 or len(self.values) % 2 == 0:
            raise ValueError("need a 1-d array with an odd number of samples")

    @property
    def K(self):
        return len(self.values)

    @property
    def nodes(self):
        return np.arange(self.K) * (self.period / self.K)


def interpolate(s: PeriodicSamples, tau):
    """Evaluate the trigonometric interpolant of s at tau (scalar or array).

    Exact at the nodes and at any trigonometric polynomial of degree
    <= (K-1)/2; error decays like exp(-c*K) for analytic data.
    """
    tau = np.asarray(tau, dtype=float)
    j = np.arange(s.K)
    arg = tau.reshape(-1, 1) / s.period - j / s.K
    out = (dirichlet_kernel(arg, s.K) @ s.values).reshape(tau.shape)
    return out if out.ndim else float(out)


def integrate_periodic(s: PeriodicSamples, T):
    """Integral of the interpolant of s from 0 to T (T arbitrary, signed)."""
    T = np.asarray(T, dtype=float)
    j = np.arange(s.K)
    jk = kernel_antiderivative(T.reshape(-1, 1) / s.period - j / s.K, s.K)
    out = (s.period * ((jk + kernel_antiderivative(j / s.K, s.K)) @ s.values)).reshape(T.shape)
    return out if out.ndim else float(out)


def integrate_exp_weighted(s: PeriodicSamples, zeta, T):
    """Integral of exp(-zeta*tau) times the interpolant of s from 0 to T.

    zeta is in inverse units of tau and may have either sign; |zeta| below
    1e-12 raises DegenerateWeight (use integrate_periodic instead).
    """
    if abs(zeta) < 1e-12:
        raise DegenerateWeight("weight exponent too small; use integrate_periodic")
    T = np.asarray(T, dtype=float)
    z = zeta * s.period
    j = np.arange(s.K)
    upper = exp_kernel_antiderivative(z, (T.reshape(-1, 1) / s.period - j / s.K).ravel(), s.K)
    upper = upper.reshape(-1, s.K)
    lower = exp_kernel_antiderivative(z, -j / s.K, s.K)
    out = (s.period * ((upper - lower) @ (np.exp(-z * j / s.K) * s.values))).reshape(T.shape)
    return out if out.ndim else float(out)


def fourier_coefficients(s: PeriodicSamples, n_max=None):
    """Discrete Fourier coefficients c_n, n = 0 .. n_max, of the samples.

    c_n = (1/K) sum_j x_j exp(-2 pi i n j / K); for analytic data this equals
    the true coefficient up to aliasing O(exp(-c*K)).  Negative-n coefficients
    are the conjugates.
    """
    if n_max is None:
        n_max = (s.K - 1) // 2
    if n_max > (s.K - 1) // 2:
        raise ValueError("requested harmonics beyond the grid Nyquist limit")
    return np.fft.rfft(s.values)[: n_max + 1] / s.K


def spectral_derivative(s: PeriodicSamples, order=1):
    """Derivative of the interpolant, sampled on the same grid."""
    c = np.fft.rfft(s.values)
    n = np.arange(len(c))
    c = c * (2j * np.pi * n / s.period) ** order
    return PeriodicSamples(s.period, np.fft.irfft(c, n=s.K))


def romberg(g, a, b, rel_tol=1e-12, max_levels=20, min_levels=3):
    """Romberg integration of a smooth vectorized integrand on [a, b].

    Stops when successive diagonal extrapolants agree to rel_tol in relative
    terms; raises NoConvergence after max_levels halvings.  For integrals
    whose true value may be near zero, split the interval (see
    romberg_split) so the relative test stays meaningful.
    """
    if b == a:
        return 0.0
    r = np.zeros((max_levels, max_levels))
    h = b - a
    ga, gb = g(np.array([a, b]))
    r[0, 0] = 0.5 * h * (ga + gb)
    n = 1
    for i in range(1, max_levels):
        n *= 2
        h *= 0.5
        x = a + (2.0 * np.arange(1, n // 2 + 1) - 1.0) * h
        r[i, 0] = 0.5 * r[i - 1, 0] + h * np.sum(g(x))
        p4 = 1.0
        for k in range(1, i + 1):
            p4 *= 4.0
            r[i, k] = r[i, k - 1] + (r[i, k - 1] - r[i - 1, k - 1]) / (p4 - 1.0)
        if i >= min_levels and abs(r[i, i] - r[i - 1, i - 1]) <= rel_tol * max(
            abs(r[i, i]), 1e-300
        ):
            return r[i, i]
    raise NoConvergence(f"romberg did not reach rel_tol={rel_tol} in {max_levels} levels")


def romberg_split(g, a, b, rel_tol=1e-12, z=SPLIT_POINT, **kw):
    """Romberg over [a, b] split at the interior point a + z*(b - a).

    Used when the total integral may vanish although the integrand does not.
    """
    m = a + z * (b - a)
    return romberg(g, a, m, rel_tol=rel_tol, **kw) + romberg(g, m, b, rel_tol=rel_tol, **kw)
