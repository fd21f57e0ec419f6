"""Plane-pulse initial conditions and related landmarks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian-windowed sinusoid travelling in +x.

    ``sigma_sq`` is the variance of the Gaussian envelope in s^2, so the
    envelope is exp(-tau^2 / (2 sigma_sq)). Setting ``burst_cycles`` swaps
    the Gaussian for a flat-top burst with raised-cosine ramps of
    ``ramp_cycles`` periods on each side.
    """

    p0: float
    f0: float
    sigma_sq: float = 1e-10
    x0: float = 0.0
    strip_halfwidth: float | None = None
    taper_width: float = 0.0
    burst_cycles: float | None = None
    ramp_cycles: float = 2.0

    def __post_init__(self):
        if not self.p0 > 0:
            raise ValueError("p0 must be positive")
        if not self.f0 > 0:
            raise ValueError("f0 must be positive")
        if not self.sigma_sq > 0:
            raise ValueError("sigma_sq must be positive")
        if self.strip_halfwidth is not None and not self.strip_halfwidth > 0:
            raise ValueError("strip_halfwidth must be positive when given")
        if self.taper_width < 0:
            raise ValueError("taper_width must be non-negative")
        if self.burst_cycles is not None and not self.burst_cycles > 0:
            raise ValueError("burst_cycles must be positive when given")

    @property
    def omega0(self) -> float:
        return 2 * np.pi * self.f0

    @property
    def half_duration(self) -> float:
        """Retarded-time half width beyond which the pulse is negligible."""
        if self.burst_cycles is not None:
            return 0.5 * (self.burst_cycles + 2 * self.ramp_cycles) / self.f0
        return 6.0 * np.sqrt(self.sigma_sq)


def envelope(spec: PulseSpec, tau):
    tau = np.asarray(tau, dtype=float)
    if spec.burst_cycles is None:
        return np.exp(-(tau**2) / (2 * spec.sigma_sq))
    flat = 0.5 * spec.burst_cycles / spec.f0
    ramp = spec.ramp_cycles / spec.f0
    s = np.clip((np.abs(tau) - flat) / ramp, 0.0, 1.0) if ramp > 0 else (np.abs(tau) > flat) * 1.0
    return 0.5 * (1 + np.cos(np.pi * s))


def evaluate_pulse(spec: PulseSpec, x, t, c0: float):
    """Incident pressure p0 sin(w0 tau) env(tau), tau = t - (x - x0)/c0."""
    tau = t - (np.asarray(x, dtype=float) - spec.x0) / c0
    return spec.p0 * np.sin(spec.omega0 * tau) * envelope(spec, tau)


def strip_window(spec: PulseSpec, y):
    """Transverse weight: 1 inside |y| <= halfwidth, optional cosine taper outside."""
    y = np.abs(np.asarray(y, dtype=float))
    if spec.strip_halfwidth is None:
        return np.ones_like(y)
    if spec.taper_width <= 0:
        return (y <= spec.strip_halfwidth).astype(float)
    s = np.clip((y - spec.strip_halfwidth) / spec.taper_width, 0.0, 1.0)
    return 0.5 * (1 + np.cos(np.pi * s))


def pulse_field(spec: PulseSpec, grid: GridSpec, t: float, c0: float) -> np.ndarray:
    """Pressure of the incident pulse on the grid at time t.

    Propagation is along axis 0; in 2D/3D the strip limit applies to axis 1.
    """
    coords = grid.coords()
    p = evaluate_pulse(spec, coords[0], t, c0)
    if grid.ndim > 1:
        p = p * strip_window(spec, coords[1])
    return np.broadcast_to(p, grid.n).copy()


def shock_distance(p0: float, omega0: float, rho: float, c: float, beta: float) -> float:
    """Plane-wave shock formation distance rho c^3 / (beta omega0 p0)."""
    for name, v in dict(p0=p0, omega0=omega0, rho=rho, c=c, beta=beta).items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return rho * c**3 / (beta * omega0 * p0)
