"""Closed-form references: Bessel functions, the Fubini series, thermoviscous loss."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def bessel_jn_all(n_max: int, x: float) -> np.ndarray:
    """J_0(x) ... J_{n_max}(x) for real x >= 0 by Miller's backward recurrence.

    The recurrence J_{k-1} = (2k/x) J_k - J_{k+1} is started well above both
    n_max and x and normalized with J_0 + 2 sum J_{2k} = 1.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    x = float(x)
    if x < 0:
        # J_n(-x) = (-1)^n J_n(x)
        out = bessel_jn_all(n_max, -x)
        out[1::2] *= -1
        return out
    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x < 1e-8:
        # two-term series; the recurrence overflows for such small x
        n = np.arange(n_max + 1)
        lead = np.exp(n * (math.log(x) - math.log(2)) - np.array([math.lgamma(k + 1) for k in n]))
        return lead * (1 - (x / 2) ** 2 / (n + 1))
    start = 2 * ((max(n_max, int(x)) + 20 + int(math.sqrt(40 * max(n_max, x, 1.0)))) // 2)
    j_next, j_curr = 0.0, 1e-300
    norm = 0.0
    vals = np.zeros(start + 1)
    vals[start] = j_curr
    for k in range(start, 0, -1):
        j_prev = (2 * k / x) * j_curr - j_next
        j_next, j_curr = j_curr, j_prev
        vals[k - 1] = j_curr
        if abs(j_curr) > 1e250:
            vals[k - 1 :] *= 1e-250
            j_next *= 1e-250
            j_curr *= 1e-250
    norm = vals[0] + 2.0 * vals[2::2].sum()
    out[:] = vals[: n_max + 1] / norm
    return out


def bessel_jn(n: int, x: float) -> float:
    return float(bessel_jn_all(n, x)[n])


@dataclass(frozen=True)
class HarmonicTable:
    sigma_distance: float
    amplitudes: np.ndarray  # B_n for n = 1..n_max, fraction of p0

    @property
    def n_max(self) -> int:
        return len(self.amplitudes)

    def __getitem__(self, n: int) -> float:
        """B_n, 1-based like the harmonic number."""
        if not 1 <= n <= self.n_max:
            raise IndexError(f"harmonic {n} outside 1..{self.n_max}")
        return float(self.amplitudes[n - 1])


def fubini_harmonics(sigma_distance: float, n_max: int = 10) -> HarmonicTable:
    """Lossless plane-wave harmonics B_n = 2 J_n(n s) / (n s) before the shock (s < 1)."""
    s = float(sigma_distance)
    if not 0 < s < 1:
        raise ValueError(f"Fubini series needs 0 < sigma < 1, got {s}")
    amps = np.array([2.0 * bessel_jn(n, n * s) / (n * s) for n in range(1, n_max + 1)])
    return HarmonicTable(s, amps)


def thermoviscous_attenuation(delta: float, omega: float, c: float) -> float:
    """Small-signal amplitude attenuation delta omega^2 / (2 c^3) in Np/m."""
    if delta < 0 or omega < 0 or c <= 0:
        raise ValueError("delta and omega must be non-negative, c positive")
    return delta * omega**2 / (2 * c**3)


def np_per_m_to_db_per_cm(alpha: float) -> float:
    return alpha * 20 / math.log(10) / 100
