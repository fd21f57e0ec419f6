"""Periodic Cartesian grids, FFT pairs and wavenumber tables.

Transform convention used everywhere in the package: the forward transform
is unnormalized and the inverse carries the 1/N factor (numpy/scipy default,
``norm="backward"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft


def _as_tuple(value, ndim=None, kind=float):
    if np.isscalar(value):
        value = (value,) * (ndim or 1)
    return tuple(kind(v) for v in value)


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid.

    ``origin`` is the physical coordinate of index 0 along each axis. When
    omitted the grid is centred so that index ``n // 2`` sits at x = 0, which
    keeps the origin on a grid node for every resolution of a sweep.
    """

    n: tuple[int, ...]
    dx: tuple[float, ...]
    origin: tuple[float, ...] | None = None

    def __post_init__(self):
        n = _as_tuple(self.n, kind=int)
        dx = _as_tuple(self.dx, len(n), float)
        if len(dx) != len(n):
            raise ValueError(f"n has {len(n)} axes but dx has {len(dx)}")
        if not 1 <= len(n) <= 3:
            raise ValueError(f"grids must be 1D, 2D or 3D, got {len(n)} axes")
        if any(v < 2 for v in n):
            raise ValueError(f"every axis needs at least 2 points, got n={n}")
        if any(not (h > 0 and np.isfinite(h)) for h in dx):
            raise ValueError(f"grid spacing must be positive, got dx={dx}")
        if self.origin is None:
            origin = tuple(-(m // 2) * h for m, h in zip(n, dx))
        else:
            origin = _as_tuple(self.origin, len(n), float)
            if len(origin) != len(n):
                raise ValueError("origin must have one entry per axis")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "origin", origin)

    @property
    def ndim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(m * h for m, h in zip(self.n, self.dx))

    @property
    def min_dx(self) -> float:
        return min(self.dx)

    def axis(self, i: int) -> np.ndarray:
        return self.origin[i] + self.dx[i] * np.arange(self.n[i])

    def coords(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays (one per axis, ``ij`` layout)."""
        out = []
        for i in range(self.ndim):
            shape = [1] * self.ndim
            shape[i] = self.n[i]
            out.append(self.axis(i).reshape(shape))
        return tuple(out)

    def index_of(self, position) -> tuple[int, ...]:
        """Nearest grid index of a physical position; raises if outside."""
        position = _as_tuple(position, self.ndim, float)
        if len(position) != self.ndim:
            raise ValueError(f"position {position} does not match a {self.ndim}D grid")
        idx = []
        for i, x in enumerate(position):
            j = int(round((x - self.origin[i]) / self.dx[i]))
            if not 0 <= j < self.n[i]:
                raise ValueError(f"position {position} lies outside the grid")
            idx.append(j)
        return tuple(idx)

    def position_of(self, index) -> tuple[float, ...]:
        return tuple(o + h * j for o, h, j in zip(self.origin, self.dx, index))

    def refined(self, factor: int) -> "GridSpec":
        """Grid with ``factor`` times as many points covering the same domain.

        Coarse node i coincides with fine node ``i * factor``.
        """
        return GridSpec(
            n=tuple(m * factor for m in self.n),
            dx=tuple(h / factor for h in self.dx),
            origin=self.origin,
        )


@dataclass(frozen=True)
class WavenumberTable:
    """Per-axis wavenumbers (rad/m) in DFT ordering and their magnitude.

    ``components`` hold broadcastable full-spectrum axis arrays. The
    ``*_half`` variants follow the ``rfftn`` layout (last axis truncated to
    n//2 + 1) and are what the time stepper multiplies against.
    """

    grid: GridSpec
    components: tuple[np.ndarray, ...]
    k_mag: np.ndarray
    components_half: tuple[np.ndarray, ...] = field(repr=False)

    @cached_property
    def k_mag_half(self) -> np.ndarray:
        return np.sqrt(sum(k**2 for k in self.components_half))

    @cached_property
    def k_sq_half(self) -> np.ndarray:
        return sum(k**2 for k in self.components_half) * np.ones(half_shape(self.grid))


def half_shape(grid: GridSpec) -> tuple[int, ...]:
    return grid.n[:-1] + (grid.n[-1] // 2 + 1,)


def _broadcast(vec, axis, ndim):
    shape = [1] * ndim
    shape[axis] = vec.size
    return vec.reshape(shape)


def wavenumber_table(grid: GridSpec) -> WavenumberTable:
    ndim = grid.ndim
    comps, comps_half = [], []
    for i, (m, h) in enumerate(zip(grid.n, grid.dx)):
        k = 2 * np.pi * np.fft.fftfreq(m, d=h)
        if m % 2 == 0:
            # fftfreq labels the Nyquist bin as negative; the table uses +pi/dx
            k[m // 2] = np.pi / h
        comps.append(_broadcast(k, i, ndim))
        if i == ndim - 1:
            k = 2 * np.pi * np.fft.rfftfreq(m, d=h)
        comps_half.append(_broadcast(k, i, ndim))
    k_mag = np.sqrt(sum(k**2 for k in comps)) * np.ones(grid.n)
    return WavenumberTable(grid, tuple(comps), k_mag, tuple(comps_half))


def _check_shape(array, shape, what="field"):
    if np.shape(array) != tuple(shape):
        raise ValueError(f"{what} shape {np.shape(array)} does not match grid {tuple(shape)}")


def forward_transform(field: np.ndarray, grid: GridSpec | None = None) -> np.ndarray:
    """Full complex DFT over all axes (unnormalized)."""
    if grid is not None:
        _check_shape(field, grid.n)
    return scipy.fft.fftn(field)


def inverse_transform(spectrum: np.ndarray, grid: GridSpec | None = None) -> np.ndarray:
    """Inverse of :func:`forward_transform`, returning the real part."""
    if grid is not None:
        _check_shape(spectrum, grid.n, "spectrum")
    return scipy.fft.ifftn(spectrum).real


# Real-input pair used on the hot path; same normalization as above.
def rfft(field: np.ndarray) -> np.ndarray:
    return scipy.fft.rfftn(field)


def irfft(spectrum: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    return scipy.fft.irfftn(spectrum, s=shape)


def spectral_laplacian(field: np.ndarray, table: WavenumberTable) -> np.ndarray:
    """Laplacian evaluated as ``-k^2`` in the Fourier domain."""
    shape = table.grid.n
    _check_shape(field, shape)
    return irfft(-table.k_sq_half * rfft(field), shape)
