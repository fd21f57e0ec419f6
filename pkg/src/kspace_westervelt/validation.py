"""Oracle-backed acceptance checks shared by ``cli validate`` and the test suite.

Every check returns a :class:`CheckResult` with the measured quantity, the
threshold and the margin (positive means passing with room to spare).
"""

from __future__ import annotations

import copy
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .analysis import db_ratio, dtft_amplitude, harmonic_amplitudes, least_square_error, spectrum
from .boundary import absorber_profile
from .config import load_preset
from .grid import GridSpec, irfft, forward_transform, inverse_transform, spectral_laplacian, wavenumber_table
from .medium import MediumMaps, denormalize_field, normalize_pressure
from .oracle.analytic import fubini_harmonics
from .oracle.analytic import np_per_m_to_db_per_cm, thermoviscous_attenuation
from .solver import KSpaceSolver, SimulationDiverged, StepScheme, run
from .source import PulseSpec, pulse_field, shock_distance
from .stencils import D1_ORDER2, D2_ORDER2, D2_ORDER4, D3_ORDER3


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: str
    threshold: str
    margin: float
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] {self.number:>2} {self.name}: {self.measured} (limit {self.threshold}, "
                f"margin {self.margin:+.3g}) [{self.seconds:.1f} s]")


def _timed(fn: Callable[[], CheckResult]) -> CheckResult:
    t0 = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t0
    return res


# -- 1: stencils ---------------------------------------------------------------

_MOMENT_TARGETS = {
    # stencil: (derivative order, {moment m: exact integer sum of w_i * i^m})
    "d2_order4": (D2_ORDER4, {0: 0, 1: 0, 2: 24, 3: -0, 4: 0, 5: 0}),
    "d2_order2": (D2_ORDER2, {0: 0, 1: 0, 2: 2, 3: 0}),
    "d3_order3": (D3_ORDER3, {0: 0, 1: 0, 2: 0, 3: -24, 4: 0, 5: 0}),
    "d1_order2": (D1_ORDER2, {0: 0, 1: -2, 2: 0}),
}


def check_stencils() -> CheckResult:
    problems = []
    for name, (st, targets) in _MOMENT_TARGETS.items():
        for m, target in targets.items():
            got = st.moment(m)
            if got != target:
                problems.append(f"{name} moment {m}: {got} != {target}")
    # polynomial inputs evaluated at t: derivative of (t - i dt)^p
    worst = 0.0
    rng = np.random.default_rng(7)
    for dt in (1e-3, 0.37, 2.0):
        t = float(rng.uniform(-3, 3))
        cases = [
            (D2_ORDER4, 2, lambda s: s**2, lambda s: 2.0),
            (D2_ORDER4, 2, lambda s: s**5, lambda s: 20 * s**3),
            (D2_ORDER2, 2, lambda s: s**3, lambda s: 6 * s),
            (D3_ORDER3, 3, lambda s: s**3, lambda s: 6.0),
            (D3_ORDER3, 3, lambda s: s**4, lambda s: 24 * s),
            (D1_ORDER2, 1, lambda s: s**2, lambda s: 2 * s),
        ]
        for st, _, g, exact in cases:
            samples = [np.array([g(Fraction(t) - i * Fraction(dt))], dtype=float) for i in range(st.depth)]
            got = float(st.apply(samples, dt)[0])
            want = float(exact(t))
            scale = max(abs(want), max(abs(float(s[0])) for s in samples) / dt ** st.derivative)
            worst = max(worst, abs(got - want) / scale)
    ok = not problems and worst <= 1e-12
    measured = "moments exact" if not problems else "; ".join(problems)
    return CheckResult(1, "stencil_exactness", ok, f"{measured}; worst polynomial rel. error {worst:.2e}",
                       "moments exact, 1e-12", 1e-12 - worst, details={"problems": problems})


# -- 2: homogeneous exactness -----------------------------------------------------

def check_linear_exactness(cfl: float = 2.0, steps: int = 1000) -> CheckResult:
    n, dx, c0 = 64, 1e-3, 1500.0
    grid = GridSpec(n, dx)
    medium = MediumMaps.homogeneous(grid, c=c0, rho=1000.0)
    dt = cfl * dx / c0
    k = 2 * np.pi * 11 / (n * dx)
    x = grid.axis(0)
    solver = KSpaceSolver(grid, medium, dt)
    state = solver.bootstrap_analytic(lambda t: np.cos(c0 * k * t) * np.cos(k * x))
    while state.step_index < steps:
        solver.step(state)
    exact = np.cos(c0 * k * state.t) * np.cos(k * x)
    err = float(np.max(np.abs(state.f - exact)))
    return CheckResult(2, "homogeneous_linear_exactness", err < 1e-10,
                       f"max amplitude error {err:.2e} after {steps} steps at CFL {cfl}", "1e-10", 1e-10 - err)


# -- 3/4: Fubini burst ---------------------------------------------------------------

def burst_harmonics(cfl: float = 0.1, periods: int = 8, n_max: int = 3):
    """k-space harmonic amplitudes (fraction of p0) of the burst preset, and the Fubini values."""
    cfg = load_preset("sec3a_1d_burst")
    cfg.solver.cfl = cfl
    out = run(cfg)
    trace = next(iter(out.traces.values()))
    src = cfg.source
    c = cfg.medium.background.c
    dist = trace.position[0] - src.x0
    xs = shock_distance(src.p0, 2 * np.pi * src.f0, cfg.medium.background.rho, c, cfg.medium.background.beta)
    # central window of whole periods around the burst centre
    per = int(round(1 / (src.f0 * trace.dt)))
    centre = int(round(dist / c / trace.dt))
    lo = centre - periods * per // 2
    seg = trace.samples[lo : lo + periods * per]
    amps = np.array(harmonic_amplitudes(spectrum(seg, dt=trace.dt), src.f0, n_max)) / src.p0
    fub = fubini_harmonics(dist / xs, n_max).amplitudes
    return amps, fub, dist / xs, trace


def check_fubini(tol_db: float = 0.5) -> CheckResult:
    amps, fub, sigma, _ = burst_harmonics(0.1)
    dev = db_ratio(amps, fub)
    worst = float(np.max(np.abs(dev)))
    return CheckResult(3, "fubini_1d_burst", worst <= tol_db,
                       f"harmonics 1-3 vs Fubini at sigma={sigma:.3f}: {np.round(dev, 3).tolist()} dB",
                       f"{tol_db} dB", tol_db - worst, details={"k_space": amps.tolist(), "fubini": fub.tolist()})


def check_cfl_robustness(tol_db: float = 0.5, f_split: float = 0.8e6) -> CheckResult:
    a1, _, _, tr1 = burst_harmonics(0.1)
    a4, _, _, tr4 = burst_harmonics(0.4)
    dev = db_ratio(a4, a1)
    worst = float(np.max(np.abs(dev)))
    # band-limited spectral error below and above the split frequency
    f_lo = np.linspace(1e4, f_split, 400)
    f_hi = np.linspace(f_split, 1.2e6, 200)
    e_lo = _rel_l2(dtft_amplitude(tr4.samples, tr4.dt, f_lo), dtft_amplitude(tr1.samples, tr1.dt, f_lo))
    e_hi = _rel_l2(dtft_amplitude(tr4.samples, tr4.dt, f_hi), dtft_amplitude(tr1.samples, tr1.dt, f_hi))
    band_tol = 10 ** (tol_db / 20) - 1
    ok = worst <= tol_db and e_lo <= band_tol
    margin = min(tol_db - worst, band_tol - e_lo)
    return CheckResult(4, "cfl_0p4_robustness", ok,
                       f"harmonics CFL 0.4 vs 0.1: {np.round(dev, 3).tolist()} dB; spectral rel. L2 "
                       f"below 0.8 MHz {e_lo:.4f}, above {e_hi:.4f}",
                       f"{tol_db} dB and {band_tol:.4f} below 0.8 MHz", margin,
                       details={"below": e_lo, "above": e_hi})


def _rel_l2(a, b) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


# -- 5: resolution bands ---------------------------------------------------------------

def check_resolution_bands(tol_db: float = 1.0) -> CheckResult:
    """Harmonic peaks n*f0 strictly below each run's Nyquist band agree with the lambda/8 run."""
    base = load_preset("sec3a_1d_homogeneous")
    lam = base.medium.background.c / 0.3e6
    f0 = base.source.f0
    results = {}
    traces = {}
    for ppw in (8, 6, 4, 2):
        cfg = copy.deepcopy(base)
        dx = lam / ppw
        cfg.grid.n = [int(round(0.4 / dx))]
        cfg.grid.dx = [dx]
        cfg.absorber.thickness = int(round(0.025 / dx))
        traces[ppw] = next(iter(run(cfg).traces.values()))
    ref = traces[8]
    worst = 0.0
    for ppw in (2, 4, 6):
        band = base.medium.background.c / (2 * lam / ppw)
        freqs = [k * f0 for k in range(1, 10) if k * f0 < band - 1e-6]
        a = dtft_amplitude(traces[ppw].samples, traces[ppw].dt, freqs)
        b = dtft_amplitude(ref.samples, ref.dt, freqs)
        dev = db_ratio(a, b)
        results[f"lambda/{ppw}"] = {"band_MHz": band / 1e6, "dB": np.round(dev, 3).tolist()}
        worst = max(worst, float(np.max(np.abs(dev))))
    text = "; ".join(f"{k} (<{v['band_MHz']:.1f} MHz) {v['dB']}" for k, v in results.items())
    return CheckResult(5, "resolution_bands", worst <= tol_db, text, f"{tol_db} dB", tol_db - worst, details=results)


# -- 6: attenuation ----------------------------------------------------------------

def check_attenuation(tol: float = 0.02) -> CheckResult:
    cfg = load_preset("attenuation_1d_linear")
    out = run(cfg)
    t0, t1 = out.traces["x0mm"], out.traces["x20mm"]
    f = cfg.source.f0
    a0 = dtft_amplitude(t0.samples, t0.dt, [f])[0]
    a1 = dtft_amplitude(t1.samples, t1.dt, [f])[0]
    dist_cm = (t1.position[0] - t0.position[0]) * 100
    measured = float(db_ratio(a0, a1)) / dist_cm
    bg = cfg.medium.background
    expected = np_per_m_to_db_per_cm(thermoviscous_attenuation(bg.delta, 2 * np.pi * f, bg.c))
    rel = abs(measured - expected) / expected
    return CheckResult(6, "thermoviscous_attenuation", rel <= tol,
                       f"{measured:.4f} dB/cm vs analytic {expected:.4f} dB/cm ({100 * rel:.2f}%)",
                       f"{100 * tol:.0f}%", tol - rel)


# -- 7: stability boundary ------------------------------------------------------------

def stability_run(cfl: float, steps: int = 2000, seed: int = 3):
    n, dx, c0 = 128, 1e-3, 1500.0
    grid = GridSpec(n, dx)
    medium = MediumMaps.homogeneous(grid, c=2 * c0, rho=1000.0, c0=c0)
    dt = cfl * dx / medium.c_max
    solver = KSpaceSolver(grid, medium, dt)
    f0 = np.random.default_rng(seed).standard_normal(n)
    state = solver.bootstrap_linear(f0)
    start = float(np.max(np.abs(f0)))
    try:
        while state.step_index < steps:
            solver.step(state)
    except SimulationDiverged as exc:
        return exc.step_index, None
    return None, float(np.max(np.abs(state.f))) / start


def check_stability_boundary() -> CheckResult:
    div_lo, growth_lo = stability_run(0.63)
    div_hi, _ = stability_run(0.70)
    ok = div_lo is None and growth_lo is not None and growth_lo < 10 and div_hi is not None
    measured = (f"CFL 0.63: {'bounded, max|f|/max|f0| = %.3g' % growth_lo if div_lo is None else 'diverged at %d' % div_lo}; "
                f"CFL 0.70: {'diverged at step %d' % div_hi if div_hi is not None else 'did not diverge'}")
    return CheckResult(7, "stability_boundary", ok, measured, "bounded at 0.63, divergence at 0.70 (limit 2/3)", 1.0 if ok else -1.0)


# -- 8: absorbing layer -------------------------------------------------------------

def _absorber_problem(L: float, thickness: int | None, cfl: float = 0.1):
    c, rho = 1500.0, 1000.0
    dx = c / 0.3e6 / 8
    grid = GridSpec(int(round(L / dx)), dx)
    medium = MediumMaps.homogeneous(grid, c=c, rho=rho)
    dt = cfl * dx / c
    ab = absorber_profile(grid, thickness) if thickness else None
    solver = KSpaceSolver(grid, medium, dt, absorber=ab)
    spec = PulseSpec(1e6, 0.2e6, sigma_sq=1e-10, x0=0.0)
    state = solver.bootstrap_analytic(lambda t: pulse_field(spec, grid, t, c) / math.sqrt(rho))
    return grid, solver, state


def check_absorber(tol_db: float = -50.0, tol_lse: float = 0.01, thickness: int = 40) -> CheckResult:
    c = 1500.0
    L = 0.6
    grid, solver, state = _absorber_problem(L, thickness)
    ip = grid.index_of(0.2)[0]
    n_steps = int(0.75 / c / solver.dt)
    # interior of the absorbing run vs the same window in a 2x domain without a layer
    big_grid, big_solver, big_state = _absorber_problem(2 * L, None)
    inner = slice(thickness, grid.n[0] - thickness)
    offset = big_grid.index_of(grid.position_of((0,)))[0]
    big_inner = slice(offset + thickness, offset + grid.n[0] - thickness)
    # the big domain's wrap re-enters the window after ~ (L/2 + L) of travel
    pre_wrap = int(0.9 / c / solver.dt)
    trace, diffs, norms = [], 0.0, 0.0
    while state.step_index < n_steps:
        solver.step(state)
        trace.append(state.f[ip])
        if state.step_index <= pre_wrap:
            big_solver.step(big_state)
            a, b = state.f[inner], big_state.f[big_inner]
            diffs += float(np.sum((a - b) ** 2))
            norms += float(np.sum(b**2))
    trace = np.array(trace)
    travel = (np.arange(len(trace)) + 6) * solver.dt * c
    incident = np.abs(trace[travel < 0.3]).max()
    reflected = np.abs(trace[(travel > 0.31) & (travel < 0.7)]).max()
    refl_db = float(db_ratio(reflected, incident))
    lse = math.sqrt(diffs / norms)
    ok = refl_db <= tol_db and lse <= tol_lse
    margin = min(tol_db - refl_db, (tol_lse - lse) / tol_lse)
    return CheckResult(8, "absorbing_layer", ok,
                       f"reflection {refl_db:.1f} dB; interior LSE vs 2x domain {lse:.2e}",
                       f"{tol_db} dB, {tol_lse}", margin)


# -- 9: 1D inhomogeneous vs FDTD ------------------------------------------------------

def inhomogeneous_harmonics(cfl: float | None = None, factor: int = 16):
    """dB differences of the first four harmonics (k-space minus FDTD) and the trace LSE."""
    from .oracle.fdtd import fdtd_reference

    cfg = load_preset("sec3b_1d_inhomogeneous")
    if cfl is not None:
        cfg.solver.cfl = cfl
    ks = next(iter(run(cfg).traces.values()))
    ref_out = fdtd_reference(cfg, factor=factor)
    ref = ref_out.traces[ks.name]
    f0 = cfg.source.f0
    freqs = [k * f0 for k in (1, 2, 3, 4)]
    dev = db_ratio(dtft_amplitude(ks.samples, ks.dt, freqs), dtft_amplitude(ref.samples, ref.dt, freqs))
    return dev, least_square_error(ks.samples, ref.samples), ref_out.report


def check_inhomogeneous_1d(factor: int = 16) -> CheckResult:
    dev, lse, report = inhomogeneous_harmonics(factor=factor)
    limits = np.array([0.5, 0.5, 1.0, 2.5])
    margin = float(np.min(limits - np.abs(dev)))
    est = report["self_check"]["estimated_error"]
    return CheckResult(9, "inhomogeneous_1d_vs_fdtd", margin >= 0,
                       f"harmonics 1-4 vs FDTD ({factor}x, est. error {est:.3g}): {np.round(dev, 3).tolist()} dB",
                       "0.5/0.5/1/2.5 dB", margin, details={"dB": dev.tolist(), "trace_lse": lse})


# -- 10: 2D fields vs FDTD (slow) --------------------------------------------------------

def field_errors(preset: str, factor: int = 8, window: float = 0.0125, **ref_kwargs):
    """Snapshot LSE of a 2D preset inside the central window.

    The reference is the Richardson combination of the ``factor`` and
    ``factor // 2`` FDTD runs; errors against the plain ``factor`` run are
    returned alongside.
    """
    from .oracle.fdtd import fdtd_reference

    cfg = load_preset(preset)
    ks = run(cfg)
    ref = fdtd_reference(cfg, factor=factor, extrapolate=True, **ref_kwargs)
    fine = ref.alternates["fine"]
    grid = cfg.build_grid()
    X, Y = grid.coords()
    win = np.broadcast_to((np.abs(X) <= window) & (np.abs(Y) <= window), grid.n)
    errs, errs_fine = [], []
    for a, b, c in zip(ks.snapshots, ref.snapshots, fine.snapshots):
        assert a.step == b.step == c.step
        errs.append(least_square_error(a.pressure[win], b.pressure[win]))
        errs_fine.append(least_square_error(a.pressure[win], c.pressure[win]))
    return errs, errs_fine, ref.report


def check_2d(factor: int = 8, **ref_kwargs) -> CheckResult:
    res = {name: field_errors(preset, factor, **ref_kwargs) for name, preset in (
        ("homogeneous", "sec3c_2d_homogeneous"),
        ("weak", "sec3d_2d_weak_scatterer"),
        ("strong", "sec3d_2d_strong_scatterer"),
    )}
    homog, weak, strong = (res[k][0] for k in ("homogeneous", "weak", "strong"))
    ok_h = max(homog) <= 0.05
    ok_s = max(strong) <= 0.15 and all(s > w for s, w in zip(strong, weak))
    margin = min(0.05 - max(homog), 0.15 - max(strong), min(s - w for s, w in zip(strong, weak)))
    fmt = lambda v: "/".join(f"{x:.4f}" for x in v)  # noqa: E731
    details = {k: {"extrapolated": v[0], f"fdtd_{factor}x": v[1],
                   "reference_error_estimate": v[2]["self_check"]["estimated_error"]} for k, v in res.items()}
    return CheckResult(10, "2d_fields_vs_fdtd", ok_h and ok_s,
                       f"LSE vs extrapolated FDTD: homogeneous {fmt(homog)}, weak {fmt(weak)}, strong {fmt(strong)}; "
                       f"vs plain {factor}x: homogeneous {fmt(res['homogeneous'][1])}, strong {fmt(res['strong'][1])}",
                       "homogeneous 0.05; strong 0.15 and > weak", margin, details=details)


# -- 11: invariants ---------------------------------------------------------------------

def check_invariants() -> CheckResult:
    rng = np.random.default_rng(11)
    failures = []
    grid = GridSpec((24, 18), (1e-3, 7e-4))
    x = rng.standard_normal(grid.n)
    X = forward_transform(x)
    if abs(np.sum(x**2) - np.sum(np.abs(X) ** 2) / x.size) > 1e-10 * np.sum(x**2):
        failures.append("Parseval")
    if np.max(np.abs(inverse_transform(X) - x)) > 1e-12 * np.max(np.abs(x)):
        failures.append("round trip")
    table = wavenumber_table(grid)
    y = rng.standard_normal(grid.n)
    lx, ly = spectral_laplacian(x, table), spectral_laplacian(y, table)
    if abs(np.sum(lx * y) - np.sum(x * ly)) > 1e-10 * np.sum(np.abs(lx * y)):
        failures.append("Laplacian self-adjoint")
    rho = 900 + 300 * rng.random(grid.n)
    med = MediumMaps(np.full(grid.n, 1500.0), rho, np.zeros(grid.n), np.zeros(grid.n), 1500.0)
    p = 1e6 * rng.standard_normal(grid.n)
    if np.max(np.abs(denormalize_field(normalize_pressure(p, med), med) - p)) > 1e-12 * np.max(np.abs(p)):
        failures.append("normalize/denormalize")
    # reconstruction identity and zero fixed point on a heterogeneous medium
    c = 1500 + 600 * rng.random(grid.n)
    med2 = MediumMaps(c, rho, np.full(grid.n, 3.5), np.full(grid.n, 1e-3), 1500.0)
    solver = KSpaceSolver(grid, med2, 0.2 * 7e-4 / c.max(), absorber=absorber_profile(grid, 4))
    f0 = np.exp(-((grid.coords()[0] / 3e-3) ** 2 + (grid.coords()[1] / 3e-3) ** 2))
    state = solver.bootstrap_linear(f0)
    for _ in range(20):
        solver.step(state)
        w = irfft(state.W_curr, grid.n)
        if np.max(np.abs(w / (1 + solver.coeffs.v_coef) - state.f)) > 1e-12 * np.max(np.abs(state.f)):
            failures.append("reconstruction identity")
            break
    zstate = solver.bootstrap_linear(np.zeros(grid.n))
    for _ in range(10):
        solver.step(zstate)
    if np.any(zstate.f != 0):
        failures.append("zero fixed point")
    # k = 0 limit: propagator at DC equals the tiny-k sinc limit
    dt = solver.dt
    tiny = 1e-8
    x_small = 0.5 * 1500.0 * tiny * dt
    limit = 4 * math.sin(x_small) ** 2 / (1500.0 * tiny) ** 2
    if abs(solver.propagator.flat[0] - limit) > 1e-8 * limit:
        failures.append("k=0 limit")
    # absorber energy monotonicity (pure layer, linear interior)
    g1 = GridSpec(200, 1e-3)
    m1 = MediumMaps.homogeneous(g1, c=1500.0, rho=1000.0)
    s1 = KSpaceSolver(g1, m1, 0.2e-3 / 1500, absorber=absorber_profile(g1, 60))
    xg = g1.axis(0)
    st1 = s1.bootstrap_linear(np.exp(-(((xg - xg[0] - 0.02) / 4e-3) ** 2)) + np.exp(-(((xg[-1] - xg - 0.02) / 4e-3) ** 2)))
    energies = []
    for _ in range(400):
        s1.step(st1)
        energies.append(_discrete_energy(s1, st1))
    e = np.array(energies)
    if np.any(np.diff(e) > 1e-9 * e[0]):
        failures.append("absorber energy monotonicity")
    # least-square error scale cases
    ref = rng.standard_normal(50)
    if least_square_error(ref, ref) != 0 or abs(least_square_error(2 * ref, ref) - 1) > 1e-15:
        failures.append("least-square error scale cases")
    ok = not failures
    return CheckResult(11, "property_invariants", ok,
                       "all invariants hold" if ok else "failed: " + ", ".join(failures), "exact/round-off",
                       1.0 if ok else -1.0)


def _discrete_energy(solver: KSpaceSolver, state) -> float:
    """Energy of the linear homogeneous recurrence (conserved without damping).

    For W+ - 2W + W- = -a W with a = c0^2 k^2 P(k), the quantity
    |W - W-|^2 + a W conj(W-) summed over k is invariant.
    """
    a = solver.propagator * solver.c0k2
    W, Wp = state.W_curr, state.W_prev
    e = np.abs(W - Wp) ** 2 + a * np.real(W * np.conj(Wp))
    weight = np.full(e.shape, 2.0)
    weight[..., 0] = 1.0
    if solver.grid.n[-1] % 2 == 0:
        weight[..., -1] = 1.0
    return float(np.sum(weight * e))


CHECKS: list[tuple[str, Callable[[], CheckResult], bool]] = [
    ("stencil_exactness", check_stencils, False),
    ("homogeneous_linear_exactness", check_linear_exactness, False),
    ("fubini_1d_burst", check_fubini, False),
    ("cfl_0p4_robustness", check_cfl_robustness, False),
    ("resolution_bands", check_resolution_bands, False),
    ("thermoviscous_attenuation", check_attenuation, False),
    ("stability_boundary", check_stability_boundary, False),
    ("absorbing_layer", check_absorber, False),
    ("inhomogeneous_1d_vs_fdtd", check_inhomogeneous_1d, False),
    ("2d_fields_vs_fdtd", check_2d, True),
    ("property_invariants", check_invariants, False),
]


def run_checks(name_filter: str | None = None, include_slow: bool = False) -> list[CheckResult]:
    out = []
    for name, fn, slow in CHECKS:
        if name_filter and name_filter not in name:
            continue
        if slow and not include_slow and not name_filter:
            continue
        out.append(_timed(fn))
    return out
