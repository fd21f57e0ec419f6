"""k-space time stepping of the normalized Westervelt equation.

The transformed auxiliary field W = FFT(f * c0^2/c^2) obeys

    W(t+dt) - 2W(t) + W(t-dt) = 4 sin^2(c0 k dt/2) [V - W - (Q - H - D + M)/(c0^2 k^2)]

Because v - w = -f, the bracket times 4 sin^2(.) equals
-P(k) (c0^2 k^2 F + G) with P(k) = 4 sin^2(c0 k dt/2)/(c0^2 k^2) and
G = FFT(q - h - d + m); P(0) = dt^2 is the continuous limit. The leapfrog
variant uses P(k) = dt^2 everywhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary import AbsorberProfile, absorber_term
from .grid import GridSpec, irfft, rfft, wavenumber_table
from .medium import DerivedCoefficients, MediumMaps, derive_coefficients
from .stencils import D2_ORDER2, D2_ORDER4, D3_ORDER3, HistoryBuffer


class StepScheme(str, enum.Enum):
    SINC = "sinc"
    LEAPFROG = "leapfrog"


class SimulationDiverged(RuntimeError):
    def __init__(self, step_index: int, reason: str):
        super().__init__(f"simulation diverged at step {step_index}: {reason}")
        self.step_index = step_index
        self.reason = reason


def cfl_limit(c0: float, c_max: float) -> float:
    """Largest CFL = c_max dt/dx with sin(CFL c0 pi / (2 c_max)) <= c0/c_max."""
    if c_max <= c0:
        return math.inf
    return 2 * c_max / (math.pi * c0) * math.asin(c0 / c_max)


@dataclass(frozen=True)
class StabilityReport:
    cfl: float
    cfl_max: float
    unconditionally_stable: bool

    @property
    def stable(self) -> bool:
        return self.cfl <= self.cfl_max

    def to_dict(self) -> dict:
        return {
            "cfl": self.cfl,
            "cfl_max": None if math.isinf(self.cfl_max) else self.cfl_max,
            "unconditionally_stable": self.unconditionally_stable,
            "stable": self.stable,
        }


def stability_check(grid: GridSpec, medium: MediumMaps, dt: float) -> StabilityReport:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    c_max = medium.c_max
    cfl = c_max * dt / grid.min_dx
    limit = cfl_limit(medium.c0, c_max)
    return StabilityReport(cfl, limit, math.isinf(limit))


@dataclass
class SolverState:
    W_curr: np.ndarray
    W_prev: np.ndarray
    history: HistoryBuffer
    t: float
    step_index: int

    @property
    def f(self) -> np.ndarray:
        return self.history[0]


class KSpaceSolver:
    """Owns the precomputed operators for one grid/medium/dt combination."""

    def __init__(
        self,
        grid: GridSpec,
        medium: MediumMaps,
        dt: float,
        scheme: StepScheme | str = StepScheme.SINC,
        absorber: AbsorberProfile | None = None,
        h_order: int = 4,
        max_growth: float = 1e6,
    ):
        if medium.shape != grid.n:
            raise ValueError(f"medium shape {medium.shape} does not match grid {grid.n}")
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        if h_order not in (2, 4):
            raise ValueError(f"h_order must be 2 or 4, got {h_order}")
        self.grid = grid
        self.medium = medium
        self.dt = float(dt)
        self.scheme = StepScheme(scheme)
        self.absorber = absorber
        self.h_stencil = D2_ORDER4 if h_order == 4 else D2_ORDER2
        self.max_growth = max_growth
        self.table = wavenumber_table(grid)
        self.coeffs: DerivedCoefficients = derive_coefficients(medium, grid)

        c0 = medium.c0
        self.c0k2 = c0**2 * self.table.k_sq_half
        self.propagator = self._propagator()
        self.w_scale = 1.0 + self.coeffs.v_coef
        self._trivial_scale = not np.any(self.coeffs.v_coef)
        self.rate = absorber.rate(self.dt) if absorber is not None else None
        self._reference_amplitude = None

    def _propagator(self) -> np.ndarray:
        dt = self.dt
        if self.scheme is StepScheme.LEAPFROG:
            return np.full(self.c0k2.shape, dt * dt)
        x = 0.5 * np.sqrt(self.c0k2) * dt
        # 4 sin^2(x) / (c0 k)^2 = dt^2 sinc^2(x); np.sinc(0) = 1 gives the k = 0 limit
        return dt * dt * np.sinc(x / np.pi) ** 2

    # -- field conversions ------------------------------------------------
    def w_from_f(self, f: np.ndarray) -> np.ndarray:
        return f if self._trivial_scale else f * self.w_scale

    def f_from_w(self, w: np.ndarray) -> np.ndarray:
        return w if self._trivial_scale else w / self.w_scale

    def pressure(self, f: np.ndarray) -> np.ndarray:
        return f * np.sqrt(self.medium.rho)

    # -- source terms -----------------------------------------------------
    def source_fields(self, state: SolverState) -> tuple:
        """Real-space (q, h, d); an entry is None when its coefficient vanishes."""
        hist = state.history
        if not hist.warm:
            raise ValueError(f"source terms need {hist.depth} history samples, have {len(hist)}")
        cf = self.coeffs
        q = cf.q_coef * hist[0] if cf.has_q else None
        h = None
        if cf.has_h:
            h = cf.h_coef * self.h_stencil.apply(hist.squares(self.h_stencil.depth), self.dt)
        d = cf.d_coef * D3_ORDER3.apply(hist, self.dt) if cf.has_d else None
        return q, h, d

    def compute_source_terms(self, state: SolverState):
        """Spectra (Q, H, D) in the real-FFT layout."""
        zero = np.zeros(self.c0k2.shape, dtype=complex)
        return tuple(zero if g is None else rfft(g) for g in self.source_fields(state))

    def absorber_field(self, state: SolverState) -> np.ndarray | None:
        if self.rate is None:
            return None
        if len(state.history) < 3:
            raise ValueError("absorber term needs 3 history samples")
        return absorber_term(state.history, self.rate)

    def absorber_source(self, state: SolverState) -> np.ndarray:
        m = self.absorber_field(state)
        return np.zeros(self.c0k2.shape, dtype=complex) if m is None else rfft(m)

    # -- stepping ---------------------------------------------------------
    def _combined_source(self, state: SolverState, linear: bool):
        if linear:
            return self.coeffs.q_coef * state.history[0] if self.coeffs.has_q else None
        q, h, d = self.source_fields(state)
        m = self.absorber_field(state)
        g = None
        for term, sign in ((q, 1.0), (h, -1.0), (d, -1.0), (m, 1.0)):
            if term is not None:
                g = sign * term if g is None else g + sign * term
        return g

    def _advance(self, state: SolverState, linear: bool = False) -> SolverState:
        f = state.history[0]
        F = state.W_curr if self._trivial_scale else rfft(f)
        rhs = self.c0k2 * F
        g = self._combined_source(state, linear)
        if g is not None:
            rhs = rhs + rfft(g)
        W_next = 2.0 * state.W_curr - state.W_prev - self.propagator * rhs
        f_next = self.f_from_w(irfft(W_next, self.grid.n))
        state.W_prev, state.W_curr = state.W_curr, W_next
        state.history.push(f_next)
        state.step_index += 1
        state.t = state.step_index * self.dt
        self._check_divergence(state)
        return state

    def step(self, state: SolverState) -> SolverState:
        """Advance one dt in place (full nonlinear, lossy, absorbing update)."""
        return self._advance(state, linear=False)

    def _check_divergence(self, state: SolverState) -> None:
        f = state.history[0]
        peak = float(np.max(np.abs(f)))
        if not np.isfinite(peak):
            raise SimulationDiverged(state.step_index, "non-finite field values")
        ref = self._reference_amplitude
        if ref and peak > self.max_growth * ref:
            raise SimulationDiverged(
                state.step_index, f"max|f| = {peak:.3e} exceeds {self.max_growth:g} x initial {ref:.3e}"
            )

    # -- bootstrap --------------------------------------------------------
    def _state_from_samples(self, samples: list[np.ndarray]) -> SolverState:
        hist = HistoryBuffer(self.dt)
        for f in samples:
            hist.push(np.asarray(f, dtype=float))
        n = len(samples) - 1
        state = SolverState(
            W_curr=rfft(self.w_from_f(hist[0])),
            W_prev=rfft(self.w_from_f(hist[1])),
            history=hist,
            t=n * self.dt,
            step_index=n,
        )
        return state

    def _set_reference(self, samples) -> None:
        self._reference_amplitude = max(float(np.max(np.abs(f))) for f in samples)

    def bootstrap_analytic(self, field_at: Callable[[float], np.ndarray], n_steps: int = 6) -> SolverState:
        """Fill the history by evaluating f(t) at t = 0, dt, ..., (n_steps-1) dt."""
        samples = [np.asarray(field_at(i * self.dt), dtype=float) for i in range(n_steps)]
        for s in samples:
            if s.shape != self.grid.n:
                raise ValueError(f"initial field shape {s.shape} does not match grid {self.grid.n}")
        self._set_reference(samples)
        return self._state_from_samples(samples)

    def bootstrap_linear(self, f0: np.ndarray, f1: np.ndarray | None = None, n_steps: int = 6) -> SolverState:
        """Warm the history with linear k-space steps (h, d and m held at zero).

        With ``f1`` omitted the field starts at rest: W(dt) is taken from the
        time-symmetric start W(-dt) = W(dt).
        """
        f0 = np.asarray(f0, dtype=float)
        if f0.shape != self.grid.n:
            raise ValueError(f"initial field shape {f0.shape} does not match grid {self.grid.n}")
        if f1 is None:
            W0 = rfft(self.w_from_f(f0))
            rhs = self.c0k2 * rfft(f0)
            if self.coeffs.has_q:
                rhs = rhs + rfft(self.coeffs.q_coef * f0)
            W1 = W0 - 0.5 * self.propagator * rhs
            f1 = self.f_from_w(irfft(W1, self.grid.n))
        state = self._state_from_samples([f0, np.asarray(f1, dtype=float)])
        self._set_reference([f0, f1])
        while len(state.history) < n_steps:
            self._advance(state, linear=True)
        return state


# -- run driver -----------------------------------------------------------------

class UnstableConfiguration(ValueError):
    pass


@dataclass
class RunOutputs:
    traces: dict
    snapshots: list
    report: dict
    pressure: np.ndarray | None = None
    # named secondary results, e.g. the unextrapolated fine reference run
    alternates: dict = field(default_factory=dict)


def _snapshot_steps(times, dt: float) -> dict[int, float]:
    return {int(round(t / dt)): t for t in times}


def run(config, keep_final: bool = False) -> RunOutputs:
    """Bootstrap, then step to ``config.solver.t_end``; record probes every step."""
    import time as _time

    from .analysis import FieldSnapshot, SensorTrace
    from .config import SIGMA_NOTE
    from .source import pulse_field, shock_distance

    grid = config.build_grid()
    medium = config.build_medium(grid)
    dt = config.resolve_dt(grid, medium)
    stab = stability_check(grid, medium, dt)
    if not stab.stable and not config.solver.force_unstable:
        raise UnstableConfiguration(
            f"CFL {stab.cfl:.4g} exceeds the stability limit {stab.cfl_max:.4g}; "
            "set solver.force_unstable to run anyway"
        )
    solver = KSpaceSolver(
        grid,
        medium,
        dt,
        scheme=config.solver.scheme,
        absorber=config.build_absorber(grid),
        h_order=config.solver.h_order,
        max_growth=config.solver.max_growth,
    )
    pulse = config.build_pulse()
    sqrt_rho = np.sqrt(medium.rho)

    def f_at(t):
        if pulse is None:
            return np.zeros(grid.n)
        return pulse_field(pulse, grid, t, config.incident_speed) / sqrt_rho

    mode = config.solver.bootstrap
    t0 = _time.perf_counter()
    if mode == "analytic":
        state = solver.bootstrap_analytic(f_at)
    else:
        state = solver.bootstrap_linear(f_at(0.0), f_at(dt))

    n_total = max(int(round(config.solver.t_end / dt)), state.step_index)
    probe_idx = {p.name: grid.index_of(p.position) for p in config.probes}
    samples = {name: np.empty(n_total + 1) for name in probe_idx}
    snap_steps = _snapshot_steps(config.snapshots, dt)
    snapshots = []
    max_p = np.empty(n_total + 1)

    def record(k, f):
        p = f * sqrt_rho
        for name, idx in probe_idx.items():
            samples[name][k] = p[idx]
        max_p[k] = float(np.max(np.abs(p)))
        if k in snap_steps:
            snapshots.append(FieldSnapshot(k * dt, k, p.copy(), grid.dx, grid.origin))

    for i in range(len(state.history) - 1, -1, -1):
        record(state.step_index - i, state.history[i])
    diverged = None
    try:
        while state.step_index < n_total:
            solver.step(state)
            record(state.step_index, state.f)
    except SimulationDiverged as exc:
        diverged = exc
    wall = _time.perf_counter() - t0

    last = state.step_index
    traces = {
        name: SensorTrace(grid.position_of(probe_idx[name]), dt, samples[name][: last + 1], probe_idx[name], name)
        for name in probe_idx
    }
    stride = max(1, (last + 1) // 1000)
    report = {
        "name": config.name,
        "config_hash": config.config_hash(),
        "config": config.to_dict(),
        "dt": dt,
        "steps": last,
        "t_final": last * dt,
        "scheme": solver.scheme.value,
        "bootstrap": mode,
        "stability": stab.to_dict(),
        "wall_time_s": wall,
        "max_abs_p": {"stride": stride, "values": max_p[: last + 1 : stride].tolist()},
        "sigma_convention": SIGMA_NOTE,
        "diverged": None if diverged is None else {"step": diverged.step_index, "reason": diverged.reason},
    }
    if pulse is not None and medium.is_homogeneous and float(medium.beta.flat[0]) > 0:
        xs = shock_distance(pulse.p0, pulse.omega0, float(medium.rho.flat[0]), float(medium.c.flat[0]), float(medium.beta.flat[0]))
        report["shock_distance_m"] = xs
        report["landmark_0p3_xs_m"] = 0.3 * xs
    out = RunOutputs(traces, snapshots, report, state.f * sqrt_rho if keep_final else None)
    if diverged is not None:
        diverged.outputs = out
        raise diverged
    return out
