import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspace_westervelt.config import load_preset
from kspace_westervelt.grid import GridSpec
from kspace_westervelt.medium import MediumMaps
from kspace_westervelt.oracle.fdtd import band_limited_upsample
from kspace_westervelt.oracle import (
    FDTDSolver,
    bessel_jn,
    bessel_jn_all,
    fubini_harmonics,
    np_per_m_to_db_per_cm,
    thermoviscous_attenuation,
)
from kspace_westervelt.source import PulseSpec, evaluate_pulse, pulse_field

@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 10, 20, 40, 50])
@pytest.mark.parametrize("x", [1e-12, 0.6, 1.0, 2.5, 10.0, 30.0, 50.0])
def test_bessel_against_scipy(n, x):
    from scipy.special import jv

    assert bessel_jn(n, x) == pytest.approx(jv(n, x), rel=1e-10, abs=1e-14)


@given(st.floats(0.0, 50.0))
def test_bessel_sum_rule(x):
    j = bessel_jn_all(120, x)
    # sum_n J_n^2 over all integers is 1
    assert j[0] ** 2 + 2 * np.sum(j[1:] ** 2) == pytest.approx(1.0, abs=1e-10)


def test_bessel_negative_argument():
    assert bessel_jn(3, -2.0) == pytest.approx(-bessel_jn(3, 2.0))
    assert bessel_jn(0, 0.0) == 1.0 and bessel_jn(4, 0.0) == 0.0


def test_fubini_examples():
    near = fubini_harmonics(1e-6, 4)
    assert near[1] == pytest.approx(1.0, abs=1e-9)
    assert near[2] < 1e-5
    # sigma = 1 itself is rejected; approach it from below
    assert fubini_harmonics(1 - 1e-12, 1)[1] == pytest.approx(0.88010, abs=1e-5)
    assert fubini_harmonics(0.3, 3)[2] == pytest.approx(0.14555, abs=1e-4)
    for bad in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(ValueError):
            fubini_harmonics(bad)


@given(st.floats(0.01, 0.5))
def test_fubini_energy(sigma):
    b = fubini_harmonics(sigma, 50).amplitudes
    assert np.all(b >= 0) and b[0] <= 1
    energy = np.sum(b**2) / 2
    assert energy <= 0.5 + 1e-12
    assert energy == pytest.approx(0.5, abs=1e-4)


def test_attenuation_examples():
    a = thermoviscous_attenuation(1e-3, 2 * np.pi * 1e6, 1500.0)
    assert a == pytest.approx(5.85, abs=0.01)
    assert np_per_m_to_db_per_cm(a) == pytest.approx(0.508, abs=1e-3)
    assert thermoviscous_attenuation(0.0, 1e6, 1500.0) == 0
    assert thermoviscous_attenuation(1e-3, 2e6, 1500.0) == pytest.approx(4 * thermoviscous_attenuation(1e-3, 1e6, 1500.0))


# -- FDTD reference -------------------------------------------------------------------

def test_fdtd_linear_delay_and_shape():
    # second-order scheme: about 300 points per wavelength for 0.1 %
    c, dx = 1500.0, 2.5e-5
    g = GridSpec(9600, dx)
    m = MediumMaps.homogeneous(g, c=c, rho=1000.0)
    dt = 0.1 * dx / c
    spec = PulseSpec(1e5, 0.2e6, sigma_sq=1e-10, x0=-0.06)
    n = int(round(0.06 / c / dt))
    idx = g.index_of((0.0,))
    out = FDTDSolver(g, m, dt).run(lambda t: pulse_field(spec, g, t, c), n, {"p": idx}, [n])
    exact = pulse_field(spec, g, n * dt, c)
    assert np.linalg.norm(out.snapshots[n] - exact) / np.linalg.norm(exact) < 1e-3
    trace_exact = evaluate_pulse(spec, g.axis(0)[idx[0]], np.arange(n + 1) * dt, c)
    assert np.linalg.norm(out.traces["p"] - trace_exact) / np.linalg.norm(trace_exact) < 1e-3


def test_fdtd_zero_field():
    g = GridSpec((20, 20), (1e-3, 1e-3))
    m = MediumMaps.homogeneous(g, beta=3.5, delta=1e-3)
    out = FDTDSolver(g, m, 1e-8).run(lambda t: np.zeros(g.n), 50, {"c": (10, 10)}, [50])
    assert not np.any(out.snapshots[50]) and not np.any(out.traces["c"])


def test_fdtd_rejects_3d():
    g = GridSpec((4, 4, 4), (1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        FDTDSolver(g, MediumMaps.homogeneous(g), 0.1)


def test_fdtd_burst_matches_fubini():
    """Fine-grid FDTD on the burst preset reproduces Fubini within 1% for n <= 2."""
    from kspace_westervelt.analysis import harmonic_amplitudes, spectrum
    from kspace_westervelt.oracle.fdtd import fdtd_reference
    from kspace_westervelt.source import shock_distance

    cfg = load_preset("sec3a_1d_burst")
    ref = fdtd_reference(cfg, factor=8, self_check=False)
    tr = next(iter(ref.traces.values()))
    src, bg = cfg.source, cfg.medium.background
    dist = tr.position[0] - src.x0
    sigma = dist / shock_distance(src.p0, 2 * np.pi * src.f0, bg.rho, bg.c, bg.beta)
    per = int(round(1 / (src.f0 * tr.dt)))
    lo = int(round(dist / bg.c / tr.dt)) - 4 * per
    amps = np.array(harmonic_amplitudes(spectrum(tr.samples[lo : lo + 8 * per], dt=tr.dt), src.f0, 2)) / src.p0
    fub = fubini_harmonics(sigma, 2).amplitudes
    assert np.all(np.abs(amps / fub - 1) < 0.01)


def test_fdtd_and_kspace_converge_together():
    """Relative L2 difference of a smooth nonlinear 1D run shrinks over three refinements."""
    import copy

    from kspace_westervelt.oracle.fdtd import fdtd_reference
    from kspace_westervelt.solver import run

    base = load_preset("sec3a_1d_homogeneous")
    base.solver.t_end = 1.2e-4
    base.probes[0].position = [0.06]
    errs = []
    for dx in (1.25e-3, 0.625e-3, 0.3125e-3):
        cfg = copy.deepcopy(base)
        cfg.grid.n = [int(round(0.4 / dx))]
        cfg.grid.dx = [dx]
        cfg.absorber.thickness = int(round(0.025 / dx))
        ks = next(iter(run(cfg).traces.values()))
        fd = next(iter(fdtd_reference(cfg, factor=8, self_check=False).traces.values()))
        errs.append(np.linalg.norm(ks.samples - fd.samples) / np.linalg.norm(fd.samples))
    assert errs[0] > errs[1] > errs[2]


def test_fdtd_reference_self_check_reports():
    import copy

    from kspace_westervelt.oracle.fdtd import ReferenceNotConverged, fdtd_reference

    cfg = copy.deepcopy(load_preset("sec3a_1d_homogeneous"))
    cfg.solver.t_end = 5e-5
    cfg.probes[0].position = [-0.05]
    out = fdtd_reference(cfg, factor=4)
    chk = out.report["self_check"]
    assert chk["passed"] and chk["estimated_error"] <= chk["tolerance"]
    with pytest.raises(ReferenceNotConverged):
        fdtd_reference(cfg, factor=2, tolerance=1e-9)


@given(st.integers(4, 40), st.integers(2, 12), st.sampled_from([2, 4]))
def test_band_limited_upsample_keeps_samples(nx, ny, factor):
    rng = np.random.default_rng(nx * 100 + ny)
    x = rng.normal(size=(nx, ny))
    up = band_limited_upsample(x, factor)
    assert up.shape == (nx * factor, ny * factor)
    np.testing.assert_allclose(up[::factor, ::factor], x, atol=1e-12)


def test_band_limited_start_matches_analytic_for_smooth_pulse():
    g = GridSpec(400, 1e-3)
    spec = PulseSpec(1e5, 0.2e6, sigma_sq=1e-10, x0=0.0)
    coarse = pulse_field(spec, g, 0.0, 1500.0)
    exact = pulse_field(spec, g.refined(4), 0.0, 1500.0)
    np.testing.assert_allclose(band_limited_upsample(coarse, 4), exact, atol=1e-9 * spec.p0)


def test_reference_rejects_unknown_initial():
    from kspace_westervelt.oracle.fdtd import fdtd_reference

    with pytest.raises(ValueError):
        fdtd_reference(load_preset("sec3a_1d_homogeneous"), initial="smooth")
