"""Cosh-profile absorbing layer at the edges of the periodic domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec
from .stencils import d1dt_order2


def gamma_profile(n, u0: float = 2.0, alpha_decay: float = 0.1):
    """u0 / cosh^2(alpha_decay * n), n = distance to the boundary in grid points."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("distance from the boundary must be non-negative")
    return u0 / np.cosh(alpha_decay * n) ** 2


@dataclass(frozen=True, eq=False)
class AbsorberProfile:
    """Layer geometry plus the dimensionless damping map.

    The physical damping rate is ``rate_scale * gamma / dt`` (1/s); see
    :meth:`rate`.
    """

    gamma: np.ndarray
    thickness: int
    u0: float = 2.0
    alpha_decay: float = 0.1
    rate_scale: float = 0.05

    def rate(self, dt: float) -> np.ndarray:
        return self.rate_scale * self.gamma / dt

    @property
    def mask(self) -> np.ndarray:
        return self.gamma > 0


def edge_distance(grid: GridSpec, axis: int) -> np.ndarray:
    i = np.arange(grid.n[axis])
    return np.minimum(i, grid.n[axis] - 1 - i)


def absorber_profile(
    grid: GridSpec,
    thickness: int = 20,
    u0: float = 2.0,
    alpha_decay: float = 0.1,
    rate_scale: float = 0.05,
) -> AbsorberProfile:
    """Per-edge profiles summed over axes (corners get the sum of both edges)."""
    if thickness < 0:
        raise ValueError("thickness must be non-negative")
    if any(2 * thickness >= m for m in grid.n):
        raise ValueError(f"a {thickness}-point layer does not fit a grid of {grid.n}")
    gamma = np.zeros(grid.n)
    for axis in range(grid.ndim):
        n = edge_distance(grid, axis)
        g = np.where(n < thickness, gamma_profile(n, u0, alpha_decay), 0.0)
        shape = [1] * grid.ndim
        shape[axis] = grid.n[axis]
        gamma = gamma + g.reshape(shape)
    return AbsorberProfile(gamma, thickness, u0, alpha_decay, rate_scale)


def in_layer(grid: GridSpec, index, thickness: int) -> bool:
    return any(min(j, m - 1 - j) < thickness for j, m in zip(index, grid.n))


def absorber_term(history, rate: np.ndarray) -> np.ndarray:
    """Real-space damping term 2*G*df/dt + G^2*f with G the rate map (1/s)."""
    dfdt = d1dt_order2(history, history.dt)
    return rate * (2.0 * dfdt + rate * history[0])
