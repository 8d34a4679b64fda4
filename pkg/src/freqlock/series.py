"""Truncated power-series arithmetic and Taylor recurrences for the
oscillator u'' + u' h(u) + k(u) = 0 with h(u) = 1 - b + 3bu^2 and
k(u) = u(a - b + bu^2).

Coefficient arrays are ascending in the exponent: c[k] multiplies t**k.
"""

from __future__ import annotations

import numpy as np


def mul(a, b, n=None):
    """Product of two truncated series, keeping degrees 0..n."""
    c = np.convolve(a, b)
    if n is not None:
        c = c[: n + 1]
    return c


def integrate(a, const=0.0):
    """Term-by-term antiderivative with constant term const."""
    out = np.empty(len(a) + 1)
    out[0] = const
    out[1:] = a / np.arange(1, len(a) + 1)
    return out


def differentiate(a):
    """Term-by-term derivative."""
    return a[1:] * np.arange(1, len(a))


def evaluate(a, t):
    """Horner evaluation at t (scalar or array)."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, a[-1], dtype=float)
    for c in a[-2::-1]:
        out = out * t + c
    return out if out.ndim else float(out)


def reciprocal(a, n):
    """Series of 1/a through degree n; a[0] must be nonzero."""
    if a[0] == 0:
        raise ZeroDivisionError("reciprocal of a series with zero constant term")
    r = np.zeros(n + 1)
    r[0] = 1.0 / a[0]
    for k in range(1, n + 1):
        m = min(k, len(a) - 1)
        r[k] = -np.dot(a[1 : m + 1], r[k - 1 :: -1][:m]) / a[0]
    return r


def exp_series(a, n):
    """Series of exp(a) through degree n."""
    e = np.zeros(n + 1)
    e[0] = np.exp(a[0])
    da = differentiate(a)  # exp(a)' = a' exp(a)
    for k in range(n):
        m = min(k, len(da) - 1)
        e[k + 1] = np.dot(da[: m + 1], e[k - m : k + 1][::-1]) / (k + 1)
    return e


def lienard_series(alpha, beta, u0, v0, degree):
    """Taylor coefficients of the solution through (u0, v0) at t = 0.

    Generated order by order from the recurrence the oscillator imposes on
    u'' = -u' h(u) - k(u); returns the u-coefficients (the v-series is the
    derivative).
    """
    a = np.zeros(degree + 1)
    a[0], a[1] = u0, v0
    for n in range(degree - 1):
        # series of u', u^2, u^3 through degree n, from a[0..n+1]
        up = a[1 : n + 2] * np.arange(1, n + 2)
        u2 = np.convolve(a[: n + 1], a[: n + 1])[: n + 1]
        u3 = np.convolve(u2, a[: n + 1])[n]
        uph = (1.0 - beta) * up[n] + 3.0 * beta * np.convolve(up, u2)[n]
        k_n = (alpha - beta) * a[n] + beta * u3
        a[n + 2] = -(uph + k_n) / ((n + 1) * (n + 2))
    return a


def variational_series(alpha, beta, u_coeffs, w0, dw0, degree):
    """Taylor coefficients of w'' = -h(u) w' - (h'(u) u' + k'(u)) w.

    u_coeffs is the solution series at the same expansion point.  Used as an
    independent check on the Frobenius construction of the same solution.
    """
    n_max = degree
    u = u_coeffs[: n_max + 1]
    up = differentiate(u)
    u2 = mul(u, u, n_max)
    h = (1.0 - beta) * _unit(n_max) + 3.0 * beta * u2
    hp_up = 6.0 * beta * mul(u, up, n_max)
    kp = (alpha - beta) * _unit(n_max) + 3.0 * beta * u2
    damp = h
    stiff = hp_up + kp
    w = np.zeros(degree + 1)
    w[0], w[1] = w0, dw0
    for n in range(degree - 1):
        wp = w[1 : n + 2] * np.arange(1, n + 2)
        t1 = np.dot(damp[: n + 1], wp[n::-1])
        t2 = np.dot(stiff[: n + 1], w[n::-1][: n + 1])
        w[n + 2] = -(t1 + t2) / ((n + 1) * (n + 2))
    return w


def _unit(n):
    e = np.zeros(n + 1)
    e[0] = 1.0
    return e
