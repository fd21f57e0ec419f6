import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspace_westervelt.boundary import absorber_profile, absorber_term, gamma_profile, in_layer
from kspace_westervelt.grid import GridSpec
from kspace_westervelt.medium import MediumMaps
from kspace_westervelt.solver import KSpaceSolver
from kspace_westervelt.stencils import HistoryBuffer
from kspace_westervelt.validation import _discrete_energy


def test_gamma_profile_values():
    assert gamma_profile(0) == 2.0
    assert gamma_profile(200) == pytest.approx(2 / math.cosh(20) ** 2)
    assert gamma_profile(200) < 1e-16
    # 2 / cosh(1)^2 = 2 / 2.381098
    assert gamma_profile(10) == pytest.approx(0.839949, abs=1e-6)
    with pytest.raises(ValueError):
        gamma_profile(-1)


@given(st.floats(0.1, 5.0), st.floats(0.01, 0.5))
def test_gamma_continuity(u0, alpha):
    g = gamma_profile(np.arange(100), u0, alpha)
    assert np.all(np.diff(g) <= 0)
    assert np.max(np.abs(np.diff(g))) <= u0 * alpha


def test_profile_geometry_1d():
    grid = GridSpec(100, 1e-3)
    prof = absorber_profile(grid, thickness=20)
    gam = prof.gamma
    assert gam[0] == 2.0 and gam[-1] == 2.0
    assert np.all(gam[20:80] == 0)
    assert np.all(gam[:20] > 0)
    assert np.all(np.diff(gam[:20]) < 0)  # increases toward the boundary
    assert np.all(np.diff(gam[80:]) > 0)
    assert in_layer(grid, (5,), 20) and not in_layer(grid, (50,), 20)


def test_corners_sum_edge_profiles():
    grid = GridSpec((40, 30), (1e-3, 1e-3))
    gam = absorber_profile(grid, thickness=8).gamma
    assert gam[0, 0] == pytest.approx(4.0)
    assert gam[2, 3] == pytest.approx(gamma_profile(2) + gamma_profile(3))
    assert gam[2, 15] == pytest.approx(gamma_profile(2))
    assert gam[20, 15] == 0


def test_profile_rejects_oversized_layer():
    with pytest.raises(ValueError):
        absorber_profile(GridSpec(20, 1.0), thickness=10)


def test_rate_is_per_step():
    grid = GridSpec(50, 1e-3)
    prof = absorber_profile(grid, 10, rate_scale=0.05)
    assert np.allclose(prof.rate(1e-7), 0.05 * prof.gamma / 1e-7)


def test_absorber_term_cases():
    dt = 1e-3
    rate = np.array([0.0, 3.0])
    h = HistoryBuffer(dt)
    for _ in range(3):
        h.push(np.array([2.0, 2.0]))
    m = absorber_term(h, rate)
    assert m[0] == 0
    assert m[1] == pytest.approx(9.0 * 2.0)  # constant field: G^2 f
    # sinusoid: 2 G f' + G^2 f to the stencil's O(dt^2)
    w, t = 50.0, 0.3
    h = HistoryBuffer(dt)
    for i in (2, 1, 0):
        h.push(np.array([math.sin(w * (t - i * dt))]))
    want = 2 * 3.0 * w * math.cos(w * t) + 9.0 * math.sin(w * t)
    assert absorber_term(h, np.array([3.0]))[0] == pytest.approx(want, rel=(w * dt) ** 2)


def test_no_absorber_means_no_m_term():
    grid = GridSpec(32, 1e-3)
    s = KSpaceSolver(grid, MediumMaps.homogeneous(grid), 1e-7)
    state = s.bootstrap_linear(np.sin(np.arange(32)))
    assert not np.any(s.absorber_source(state))


def test_energy_decreases_in_pure_layer():
    g = GridSpec(200, 1e-3)
    m = MediumMaps.homogeneous(g, c=1500.0, rho=1000.0)
    s = KSpaceSolver(g, m, 0.2e-3 / 1500, absorber=absorber_profile(g, 60))
    x = g.axis(0)
    f0 = np.exp(-(((x - x[0] - 0.02) / 4e-3) ** 2)) + np.exp(-(((x[-1] - x - 0.02) / 4e-3) ** 2))
    state = s.bootstrap_linear(f0)
    e = []
    for _ in range(400):
        s.step(state)
        e.append(_discrete_energy(s, state))
    e = np.array(e)
    assert np.all(np.diff(e) <= 1e-9 * e[0])
    assert e[-1] < 0.5 * e[0]


def test_energy_is_conserved_without_layer():
    g = GridSpec(64, 1e-3)
    s = KSpaceSolver(g, MediumMaps.homogeneous(g), 0.5e-3 / 1500)
    state = s.bootstrap_linear(np.exp(-((g.axis(0) / 3e-3) ** 2)))
    e0 = _discrete_energy(s, state)
    for _ in range(300):
        s.step(state)
    assert _discrete_energy(s, state) == pytest.approx(e0, rel=1e-10)


def test_nonlinear_lossy_layer_stays_bounded():
    g = GridSpec(400, 6.25e-4)
    m = MediumMaps.homogeneous(g, c=1500.0, rho=1000.0, beta=3.5, delta=1e-3)
    s = KSpaceSolver(g, m, 0.3 * 6.25e-4 / 1500, absorber=absorber_profile(g, 40))
    x = g.axis(0)
    # zero-mean packet: a unipolar pulse would leave a non-propagating k = 0 offset behind
    f0 = 1e6 / math.sqrt(1000) * np.exp(-((x / 1e-2) ** 2)) * np.sin(2 * np.pi * x / 7.5e-3)
    state = s.bootstrap_linear(f0)
    for _ in range(2000):
        s.step(state)
    assert np.max(np.abs(state.f)) < 0.01 * np.max(f0)
