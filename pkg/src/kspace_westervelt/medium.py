"""Material maps and the coefficient maps of the normalized k-space equation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, irfft, rfft, spectral_laplacian, wavenumber_table


class MediumSmoothingWarning(UserWarning):
    """Low-pass filtering pushed c or rho more than 5% past its original range."""


@dataclass(frozen=True, eq=False)
class MediumMaps:
    c: np.ndarray
    rho: np.ndarray
    beta: np.ndarray
    delta: np.ndarray
    c0: float

    def __post_init__(self):
        shape = np.shape(self.c)
        for name in ("c", "rho", "beta", "delta"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)
        if np.any(self.c <= 0):
            raise ValueError("sound speed must be positive everywhere")
        if np.any(self.rho <= 0):
            raise ValueError("density must be positive everywhere")
        if np.any(self.delta < 0):
            raise ValueError("diffusivity must be non-negative everywhere")
        if not self.c0 > 0:
            raise ValueError(f"reference speed c0 must be positive, got {self.c0}")
        object.__setattr__(self, "c0", float(self.c0))

    @classmethod
    def homogeneous(cls, grid: GridSpec, c=1500.0, rho=1000.0, beta=0.0, delta=0.0, c0=None):
        fill = lambda v: np.full(grid.n, float(v))  # noqa: E731
        return cls(fill(c), fill(rho), fill(beta), fill(delta), c if c0 is None else c0)

    @property
    def shape(self):
        return self.c.shape

    @property
    def c_max(self) -> float:
        return float(self.c.max())

    @property
    def is_homogeneous(self) -> bool:
        return all(_is_constant(getattr(self, k)) for k in ("c", "rho", "beta", "delta"))

    def replace(self, **changes) -> "MediumMaps":
        kw = dict(c=self.c, rho=self.rho, beta=self.beta, delta=self.delta, c0=self.c0)
        kw.update(changes)
        return MediumMaps(**kw)


def _is_constant(arr: np.ndarray) -> bool:
    return bool(np.all(arr == arr.flat[0]))


@dataclass(frozen=True, eq=False)
class DerivedCoefficients:
    """Spatial coefficient maps multiplying f and its time derivatives.

    v_coef : c0^2/c^2 - 1
    q_coef : c0^2 sqrt(rho) lap(1/sqrt(rho))
    h_coef : c0^2 beta / (sqrt(rho) c^4)
    d_coef : c0^2 delta / c^4
    """

    v_coef: np.ndarray
    q_coef: np.ndarray
    h_coef: np.ndarray
    d_coef: np.ndarray

    @property
    def has_q(self) -> bool:
        return bool(np.any(self.q_coef))

    @property
    def has_h(self) -> bool:
        return bool(np.any(self.h_coef))

    @property
    def has_d(self) -> bool:
        return bool(np.any(self.d_coef))


def normalize_pressure(p: np.ndarray, medium: MediumMaps) -> np.ndarray:
    """f = p / sqrt(rho)."""
    rho = np.asarray(medium.rho)
    if np.any(rho <= 0):
        raise ValueError("density must be positive to normalize pressure")
    return np.asarray(p) / np.sqrt(rho)


def denormalize_field(f: np.ndarray, medium: MediumMaps) -> np.ndarray:
    return np.asarray(f) * np.sqrt(medium.rho)


def derive_coefficients(medium: MediumMaps, grid: GridSpec) -> DerivedCoefficients:
    if medium.shape != grid.n:
        raise ValueError(f"medium shape {medium.shape} does not match grid {grid.n}")
    c0sq = medium.c0**2
    c4 = medium.c**4
    sqrt_rho = np.sqrt(medium.rho)
    v_coef = c0sq / medium.c**2 - 1.0
    if _is_constant(medium.rho):
        q_coef = np.zeros(grid.n)
    else:
        table = wavenumber_table(grid)
        q_coef = c0sq * sqrt_rho * spectral_laplacian(1.0 / sqrt_rho, table)
    h_coef = c0sq * medium.beta / (sqrt_rho * c4)
    d_coef = c0sq * medium.delta / c4
    return DerivedCoefficients(v_coef, q_coef, h_coef, d_coef)


def lowpass(field: np.ndarray, grid: GridSpec, cutoff_fraction: float) -> np.ndarray:
    """Zero every wavenumber component above ``cutoff_fraction`` x Nyquist."""
    table = wavenumber_table(grid)
    keep = np.ones(table.k_sq_half.shape, dtype=bool)
    for k, h in zip(table.components_half, grid.dx):
        keep &= np.abs(k) <= cutoff_fraction * np.pi / h * (1 + 1e-12)
    return irfft(rfft(field) * keep, grid.n)


def smooth_medium(medium: MediumMaps, grid: GridSpec, cutoff_fraction: float) -> MediumMaps:
    """Low-pass every material map in k-space.

    Sharp inclusions ring after filtering; if c or rho leave their original
    range by more than 5% a :class:`MediumSmoothingWarning` reports the
    overshoot (relative to the original extreme value). Speeds and densities are floored at a small positive fraction
    of their minimum so the result is always a valid medium.
    """
    if not 0 < cutoff_fraction <= 1:
        raise ValueError(f"cutoff_fraction must lie in (0, 1], got {cutoff_fraction}")
    maps = {}
    for name in ("c", "rho", "beta", "delta"):
        arr = getattr(medium, name)
        maps[name] = arr.copy() if _is_constant(arr) else lowpass(arr, grid, cutoff_fraction)
    for name in ("c", "rho"):
        old, new = getattr(medium, name), maps[name]
        lo, hi = old.min(), old.max()
        over = max(new.max() / hi - 1.0, 1.0 - new.min() / lo, 0.0)
        if over > 0.05:
            warnings.warn(
                f"smoothing {name} leaves its original range by {100 * over:.1f}%",
                MediumSmoothingWarning,
                stacklevel=2,
            )
        maps[name] = np.maximum(new, 0.5 * lo)
    maps["delta"] = np.maximum(maps["delta"], 0.0)
    return MediumMaps(c0=medium.c0, **maps)
