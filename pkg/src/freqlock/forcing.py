"""Periodic drive signals given as odd sine series.

A drive is a sparse map harmonic -> amplitude together with decay metadata
(phi, xi) bounding |coefficient(n)| <= phi * exp(-xi * n).  Two closed-form
families are provided: the single harmonic sin(t), and the Poisson-kernel
drive

    f(t) = (lam^2 - 1) sin t / (lam^2 + 1 - 2 lam cos t)
         = ((lam^2 - 1)/lam) * sum_k sin(k t) / lam^k,   lam > 1,

whose harmonics decay geometrically with adjustable rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Default harmonic count when a closed form must be expanded; for lam >= 2
# the neglected tail is below 1e-18.
DEFAULT_TRUNCATION = 64


@dataclass(frozen=True)
class Forcing:
    """Odd 2*pi-periodic drive f(t) = sum_n c_n sin(n t)."""

    coefficients: dict[int, float]
    phi: float
    xi: float
    closed_form: tuple | None = None

    def __post_init__(self):
        for n, c in self.coefficients.items():
            if n < 1:
                raise ValueError("harmonic indices must be positive integers")
            if abs(c) > self.phi * math.exp(-self.xi * n) * (1 + 1e-12):
                raise ValueError(f"coefficient {n} violates the (phi, xi) decay bound")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def harmonic():
        """f(t) = sin t."""
        return Forcing({1: 1.0}, phi=math.e, xi=1.0, closed_form=("harmonic",))

    @staticmethod
    def poisson_kernel(lam, n_harmonics=DEFAULT_TRUNCATION):
        """All-harmonics drive with coefficient ((lam^2-1)/lam) * lam^(-n)."""
        if lam <= 1:
            raise ValueError("poisson kernel parameter must exceed 1")
        amp = (lam * lam - 1.0) / lam
        coeffs = {n: amp * lam ** (-n) for n in range(1, n_harmonics + 1)}
        return Forcing(coeffs, phi=amp, xi=math.log(lam), closed_form=("poisson", lam))

    @staticmethod
    def from_series(coeffs):
        """Explicit sine series; decay metadata fitted to envelope the data."""
        coeffs = {int(n): float(c) for n, c in coeffs.items() if c != 0.0}
        if not coeffs:
            raise ValueError("series drive needs at least one coefficient")
        xi = 1.0
        if len(coeffs) > 1:
            ns = sorted(coeffs)
            logs = [math.log(abs(coeffs[n])) for n in ns]
            slope = (logs[-1] - logs[0]) / (ns[-1] - ns[0])
            xi = max(1e-6, -slope)
        phi = max(abs(c) * math.exp(xi * n) for n, c in coeffs.items())
        return Forcing(coeffs, phi=phi, xi=xi)

    @staticmethod
    def parse(spec):
        """Parse a CLI drive spec: 'sin', 'poisson:lambda=2' or
        'series:1=1.0,2=0.25'."""
        spec = spec.strip()
        if spec == "sin":
            return Forcing.harmonic()
        if spec.startswith("poisson:"):
            arg = spec.split(":", 1)[1]
            arg = arg.split("=", 1)[1] if "=" in arg else arg
            return Forcing.poisson_kernel(float(arg))
        if spec.startswith("series:"):
            pairs = (item.split("=") for item in spec.split(":", 1)[1].split(","))
            return Forcing.from_series({int(n): float(c) for n, c in pairs})
        raise ValueError(f"unrecognized forcing spec {spec!r}")

    # -- evaluation --------------------------------------------------------

    def eval(self, tau):
        """f(tau); closed-form families bypass the series."""
        tau = np.asarray(tau, dtype=float)
        if self.closed_form is not None:
            if self.closed_form[0] == "harmonic":
                out = np.sin(tau)
            else:
                lam = self.closed_form[1]
                out = (lam * lam - 1.0) * np.sin(tau) / (lam * lam + 1.0 - 2.0 * lam * np.cos(tau))
            return out if out.ndim else float(out)
        out = np.zeros(tau.shape)
        for n, c in self.coefficients.items():
            out += c * np.sin(n * tau)
        return out if out.ndim else float(out)

    def eval_derivative(self, tau):
        """df/dtau."""
        tau = np.asarray(tau, dtype=float)
        if self.closed_form is not None:
            if self.closed_form[0] == "harmonic":
                out = np.cos(tau)
            else:
                lam = self.closed_form[1]
                den = lam * lam + 1.0 - 2.0 * lam * np.cos(tau)
                out = (lam * lam - 1.0) * ((lam * lam + 1.0) * np.cos(tau) - 2.0 * lam) / den**2
            return out if out.ndim else float(out)
        out = np.zeros(tau.shape)
        for n, c in self.coefficients.items():
            out += n * c * np.cos(n * tau)
        return out if out.ndim else float(out)

    # -- structure ---------------------------------------------------------

    def coefficient(self, n):
        return self.coefficients.get(n, 0.0)

    @property
    def harmonics(self):
        return sorted(self.coefficients)

    def truncate(self, n_keep):
        """Keep harmonics <= n_keep; the closed-form tag is dropped."""
        if n_keep < 1:
            raise ValueError("harmonic count must be at least 1")
        kept = {n: c for n, c in self.coefficients.items() if n <= n_keep}
        return Forcing(kept, phi=self.phi, xi=self.xi)

    def tail_bound(self, n_keep):
        """Bound on the sup error of truncate(n_keep): phi e^(-xi N)/(1-e^(-xi))."""
        return self.phi * math.exp(-self.xi * n_keep) / (1.0 - math.exp(-self.xi))
