import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kspace_westervelt.grid import (
    GridSpec,
    forward_transform,
    inverse_transform,
    irfft,
    rfft,
    spectral_laplacian,
    wavenumber_table,
)

PI = np.pi


def test_gridspec_invariants():
    g = GridSpec((8, 6), (1e-3, 2e-3))
    assert g.ndim == 2
    assert g.extent == pytest.approx((8e-3, 12e-3))
    assert g.index_of((0.0, 0.0)) == (4, 3)
    assert g.position_of((4, 3)) == pytest.approx((0.0, 0.0))
    with pytest.raises(ValueError):
        GridSpec(1, 1.0)
    with pytest.raises(ValueError):
        GridSpec(4, 0.0)
    with pytest.raises(ValueError):
        g.index_of((1.0, 0.0))


def test_refined_grid_keeps_coarse_nodes():
    g = GridSpec(10, 0.5)
    f = g.refined(4)
    assert np.allclose(f.axis(0)[::4], g.axis(0))


@pytest.mark.parametrize(
    "n, dx, comps, mag",
    [
        (2, 1.0, [0, PI], [0, PI]),
        (4, 1.0, [0, PI / 2, PI, -PI / 2], [0, PI / 2, PI, PI / 2]),
    ],
)
def test_wavenumber_table_1d(n, dx, comps, mag):
    t = wavenumber_table(GridSpec(n, dx))
    assert np.allclose(t.components[0], comps)
    assert np.allclose(t.k_mag, mag)


def test_wavenumber_table_2d_nyquist_corner():
    t = wavenumber_table(GridSpec((2, 2), (1.0, 1.0)))
    assert t.k_mag[1, 1] == pytest.approx(PI * np.sqrt(2))
    assert t.k_mag[0, 0] == 0


@given(st.integers(2, 40), st.floats(1e-4, 10.0))
def test_wavenumber_properties(n, dx):
    t = wavenumber_table(GridSpec(n, dx))
    k = t.k_mag
    assert k[0] == 0
    # odd n has no Nyquist bin: the top component is (n-1)/n of pi/dx
    top = PI / dx if n % 2 == 0 else PI / dx * (n - 1) / n
    assert np.max(np.abs(t.components[0])) == pytest.approx(top)
    # even under index negation
    assert np.allclose(k[1:], k[1:][::-1])


def test_wavenumber_norm_is_euclidean():
    t = wavenumber_table(GridSpec((6, 5, 4), (1.0, 0.5, 0.25)))
    kx, ky, kz = np.meshgrid(*t.components, indexing="ij")
    assert np.allclose(t.k_mag, np.sqrt(kx**2 + ky**2 + kz**2))


def test_half_tables_match_full():
    g = GridSpec((6, 7), (1.0, 0.3))
    t = wavenumber_table(g)
    assert np.allclose(t.k_mag_half, t.k_mag[:, : 7 // 2 + 1])


def test_transform_zero_and_shape_mismatch():
    g = GridSpec((4, 4), (1.0, 1.0))
    assert np.all(forward_transform(np.zeros(g.n)) == 0)
    with pytest.raises(ValueError):
        forward_transform(np.zeros((3, 4)), g)
    with pytest.raises(ValueError):
        inverse_transform(np.zeros((4, 5)), g)


def test_pure_tone_has_two_bins():
    n = 16
    x = np.arange(n)
    spec = forward_transform(np.cos(2 * PI * x / n))
    big = np.abs(spec) > 1e-9
    assert np.flatnonzero(big).tolist() == [1, n - 1]


@given(st.integers(0, 2**32 - 1), st.sampled_from([(16,), (9, 8), (5, 6, 4)]))
def test_round_trip_and_parseval(seed, shape):
    x = np.random.default_rng(seed).standard_normal(shape)
    X = forward_transform(x)
    assert np.max(np.abs(inverse_transform(X) - x)) <= 1e-12 * np.max(np.abs(x))
    assert np.sum(x**2) == pytest.approx(np.sum(np.abs(X) ** 2) / x.size, rel=1e-10)
    assert np.allclose(irfft(rfft(x), shape), x, atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_transform_linear(seed):
    r = np.random.default_rng(seed)
    a, b = r.standard_normal((2, 12, 10))
    s, t = r.standard_normal(2)
    assert np.allclose(forward_transform(s * a + t * b), s * forward_transform(a) + t * forward_transform(b))


def test_laplacian_matches_full_complex_definition(rng):
    g = GridSpec((10, 8), (1e-3, 2e-3))
    t = wavenumber_table(g)
    f = rng.standard_normal(g.n)
    ref = inverse_transform(-t.k_mag**2 * forward_transform(f))
    assert np.allclose(spectral_laplacian(f, t), ref, atol=1e-9 * np.max(np.abs(ref)))


def test_laplacian_constant_and_eigenfunction():
    g = GridSpec(64, 0.1)
    t = wavenumber_table(g)
    assert np.allclose(spectral_laplacian(np.full(64, 3.0), t), 0, atol=1e-12)
    k0 = 2 * PI * 5 / (64 * 0.1)
    x = g.axis(0)
    lap = spectral_laplacian(np.sin(k0 * x), t)
    assert np.max(np.abs(lap + k0**2 * np.sin(k0 * x))) <= 1e-10 * k0**2


def test_laplacian_vs_fine_finite_difference():
    # smooth periodic field; 6th-order centred differences on an 8x finer grid
    L = 1.0
    coarse = GridSpec(32, L / 32, origin=(0.0,))
    fine = coarse.refined(8)

    def field(x):
        return np.exp(np.sin(2 * PI * x / L)) + 0.3 * np.cos(6 * PI * x / L)

    f = field(fine.axis(0))
    h = fine.dx[0]
    c = [-49 / 18, 3 / 2, -3 / 20, 1 / 90]
    fd = c[0] * f + sum(ci * (np.roll(f, i) + np.roll(f, -i)) for i, ci in enumerate(c[1:], 1))
    fd /= h * h
    spectral = spectral_laplacian(field(coarse.axis(0)), wavenumber_table(coarse))
    assert np.max(np.abs(spectral - fd[::8])) <= 1e-6 * np.max(np.abs(fd))


@given(st.integers(0, 2**32 - 1))
def test_laplacian_self_adjoint(seed):
    r = np.random.default_rng(seed)
    g = GridSpec((7, 6), (1.0, 0.5))
    t = wavenumber_table(g)
    a, b = r.standard_normal((2, 7, 6))
    lhs = np.sum(spectral_laplacian(a, t) * b)
    rhs = np.sum(a * spectral_laplacian(b, t))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)
