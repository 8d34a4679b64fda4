"""Run configuration: one flat record of every grid and tolerance, loadable
from key=value files with command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import InvalidParams


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 5.0
    beta: float = 4.0
    forcing: str = "sin"
    resonances: str = "2:1"
    # grids
    n_samples: int = 151            # cycle samples per period (odd)
    tau0_points: int = 64
    mu_min: float = 1e-3
    mu_max: float = 0.5
    mu_points: int = 40
    omega_lo: float = 0.3           # staircase range, units of Omega0
    omega_hi: float = 5.0
    omega_points: int = 200
    # tolerances
    romberg_tol: float = 1e-12
    delta_lock: float = 1e-6
    bisect_tol_rel: float = 0.02
    r_c: float = 1e-2
    series_degree: int = 10
    transient_time: float = 200.0
    steps_per_period: int = 400
    threads: int = 1

    def __post_init__(self):
        if not (self.alpha > self.beta > 1.0):
            raise InvalidParams("requires alpha > beta > 1")
        for name in ("romberg_tol", "delta_lock", "bisect_tol_rel", "r_c"):
            if getattr(self, name) <= 0:
                raise InvalidParams(f"{name} must be positive")
        if self.n_samples % 2 == 0:
            raise InvalidParams("n_samples must be odd")

    def resonance_list(self):
        out = []
        for item in self.resonances.split(","):
            p, q = item.strip().split(":")
            out.append((int(p), int(q)))
        return out


def load_config(path=None, **overrides):
    """Build a RunConfig from an optional key=value file plus overrides."""
    values = {}
    if path is not None:
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                values[key.strip()] = val.strip()
    casts = {f.name: f.type for f in fields(RunConfig)}
    parsed = {}
    for key, val in values.items():
        if key not in casts:
            raise InvalidParams(f"unknown config key {key!r}")
        kind = casts[key]
        parsed[key] = val if kind == "str" else (int(val) if kind == "int" else float(val))
    parsed.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**parsed)
