"""Post-processing: error norms, spectra, harmonic extraction and file export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class SensorTrace:
    """Pressure time series recorded at one grid node."""

    position: tuple[float, ...]
    dt: float
    samples: np.ndarray
    index: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt

    def __len__(self):
        return len(self.samples)


@dataclass
class FieldSnapshot:
    time: float
    step: int
    pressure: np.ndarray
    dx: tuple[float, ...] = ()
    origin: tuple[float, ...] = ()


@dataclass
class Spectrum:
    """Single-sided amplitude spectrum.

    ``amplitudes[k]`` is the amplitude (Pa) of the sinusoid at ``k * df``,
    i.e. 2|X_k|/N away from DC and Nyquist and |X_k|/N at those two bins,
    where X is the unnormalized DFT of the (windowed) trace.
    """

    df: float
    amplitudes: np.ndarray
    n_samples: int
    window: str = "none"
    coherent_gain: float = field(default=1.0, repr=False)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(len(self.amplitudes)) * self.df


def least_square_error(test, reference) -> float:
    """||test - ref||_2 / ||ref||_2."""
    test = np.asarray(test, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if test.shape != reference.shape:
        raise ValueError(f"shape mismatch: {test.shape} vs {reference.shape}")
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise ValueError("reference field has zero norm")
    return float(np.linalg.norm(test - reference) / ref_norm)


def spectrum(trace, window: str = "none", dt: float | None = None) -> Spectrum:
    """Amplitude spectrum of a trace (a :class:`SensorTrace` or raw samples + ``dt``)."""
    if isinstance(trace, SensorTrace):
        samples, dt = trace.samples, trace.dt
    else:
        samples = np.asarray(trace, dtype=float)
        if dt is None:
            raise ValueError("dt is required for raw sample arrays")
    n = len(samples)
    if n < 2:
        raise ValueError("spectrum needs at least two samples")
    if window == "none":
        w = np.ones(n)
    elif window == "hann":
        w = np.hanning(n)
    else:
        raise ValueError(f"unknown window {window!r}; use 'none' or 'hann'")
    gain = float(w.mean())
    amps = np.abs(np.fft.rfft(samples * w)) / (n * gain)
    amps[1 : (n + 1) // 2] *= 2.0
    return Spectrum(1.0 / (n * dt), amps, n, window, gain)


def spectral_energy(spec: Spectrum) -> float:
    """Sum of squared samples implied by an unwindowed spectrum (Parseval)."""
    if spec.window != "none":
        raise ValueError("Parseval only applies to unwindowed spectra")
    n = spec.n_samples
    a = spec.amplitudes.copy()
    a[1 : (n + 1) // 2] /= 2.0
    # a now holds |X_k|/N; interior bins appear twice in the full spectrum
    weights = np.full(len(a), 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    return float(n * np.sum(weights * a**2))


def harmonic_amplitudes(spec: Spectrum, f0: float, n_max: int) -> list[float]:
    """Peak amplitude within +-1 bin of each n*f0, n = 1..n_max."""
    if f0 / spec.df < 3:
        raise ValueError(
            f"f0 = {f0:g} Hz spans only {f0 / spec.df:.2f} bins of {spec.df:g} Hz; need at least 3"
        )
    out = []
    for n in range(1, n_max + 1):
        k = int(round(n * f0 / spec.df))
        if k >= len(spec.amplitudes):
            raise ValueError(f"harmonic {n} ({n * f0:g} Hz) is above the Nyquist frequency")
        lo, hi = max(k - 1, 0), min(k + 2, len(spec.amplitudes))
        out.append(float(spec.amplitudes[lo:hi].max()))
    return out


def dtft_amplitude(samples, dt: float, freqs) -> np.ndarray:
    """|sum_n x_n exp(-2 pi i f n dt)| * dt at arbitrary frequencies.

    Approximates the continuous Fourier transform magnitude, so traces with
    different sampling steps can be compared on a common frequency axis.
    """
    samples = np.asarray(samples, dtype=float)
    t = np.arange(len(samples)) * dt
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    out = np.empty(len(freqs))
    for i in range(0, len(freqs), 256):
        block = freqs[i : i + 256]
        out[i : i + 256] = np.abs(np.exp(-2j * np.pi * np.outer(block, t)) @ samples) * dt
    return out


def db_ratio(a, b):
    return 20.0 * np.log10(np.asarray(a, dtype=float) / np.asarray(b, dtype=float))


# -- file formats ----------------------------------------------------------

def write_trace_csv(path, trace: SensorTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "p"])
        for t, p in zip(trace.times, trace.samples):
            w.writerow([repr(float(t)), repr(float(p))])


def read_trace_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_spectrum_csv(path, spec: Spectrum) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["f", "amplitude"])
        for f, a in zip(spec.frequencies, spec.amplitudes):
            w.writerow([repr(float(f)), repr(float(a))])


def write_raw_field(path, array: np.ndarray, **meta) -> None:
    """Row-major little-endian float64 dump plus a ``.json`` sidecar with the shape."""
    path = Path(path)
    arr = np.ascontiguousarray(array, dtype="<f8")
    path.write_bytes(arr.tobytes(order="C"))
    sidecar = {"shape": list(arr.shape), "dtype": "float64", "byte_order": "little"}
    sidecar.update(meta)
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))


def read_raw_field(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    data = np.frombuffer(path.read_bytes(), dtype="<f8")
    expected = int(np.prod(meta["shape"]))
    if data.size != expected:
        raise ValueError(f"{path} holds {data.size} values, sidecar shape needs {expected}")
    return data.reshape(meta["shape"]).astype(float), meta


def write_snapshot(path, snap: FieldSnapshot) -> None:
    write_raw_field(
        path, snap.pressure, dx=list(snap.dx), origin=list(snap.origin), time=snap.time, step=snap.step
    )
