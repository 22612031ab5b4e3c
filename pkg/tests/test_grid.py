import numpy as np
import pytest

from rnls import (Field, integrate, make_grid, sample_field, spectral_gradient,
                  spectral_laplacian, symmetrize_d4, transform_forward,
                  transform_inverse)
from rnls.errors import ConfigurationError

from conftest import gaussian, rel_l2


def test_make_grid_spacing_and_wavenumbers():
    g = make_grid(3.0, 8)
    assert g.spacing == pytest.approx(0.75)
    assert g.spacing * g.points_per_axis == pytest.approx(2 * g.half_width)
    k = np.sort(np.abs(g.wavenumbers))
    assert k[1] == pytest.approx(np.pi / 3.0)           # fundamental
    assert len(g.wavenumbers) == 8
    # all wavenumbers are integer multiples of the fundamental
    mult = g.wavenumbers / (np.pi / 3.0)
    assert np.allclose(mult, np.round(mult), atol=1e-13)

    assert make_grid(1.0, 128).spacing == pytest.approx(1.0 / 64.0)


def test_make_grid_node_coords():
    g = make_grid(2.0, 16)
    x = g.axis_coords
    assert x[0] == pytest.approx(-2.0)
    assert x[1] - x[0] == pytest.approx(g.spacing)
    assert x[-1] == pytest.approx(2.0 - g.spacing)


def test_make_grid_rejects_bad_sizes():
    with pytest.raises(ConfigurationError):
        make_grid(3.0, 7)       # odd
    with pytest.raises(ConfigurationError):
        make_grid(3.0, 6)       # too small
    with pytest.raises(ConfigurationError):
        make_grid(-1.0, 64)


def test_transform_round_trip(grid64):
    rng = np.random.default_rng(7)
    f = Field(grid64, rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64)))
    back = transform_inverse(transform_forward(f))
    assert rel_l2(back.values, f.values) < 1e-12


def test_transform_constant_field(grid64):
    f = Field(grid64, np.ones((64, 64), dtype=complex))
    F = transform_forward(f)
    assert F.values[0, 0] == pytest.approx(64 ** 2)
    off = F.values.copy()
    off[0, 0] = 0.0
    assert np.max(np.abs(off)) < 1e-9


def test_transform_single_mode():
    g = make_grid(3.0, 64)
    f = sample_field(g, lambda X, Y: np.exp(1j * (np.pi / 3.0) * X))
    F = transform_forward(f).values
    # energy concentrated in one mode at kx = pi/3
    idx = np.unravel_index(np.argmax(np.abs(F)), F.shape)
    assert g.wavenumbers[idx[0]] == pytest.approx(np.pi / 3.0)
    assert idx[1] == 0
    rest = F.copy()
    rest[idx] = 0.0
    assert np.max(np.abs(rest)) / np.abs(F[idx]) < 1e-12


def test_transform_size_mismatch(grid64):
    with pytest.raises(ConfigurationError):
        transform_forward(Field(grid64, np.zeros((32, 32), dtype=complex)))


def test_gradient_of_pure_mode():
    g = make_grid(3.0, 64)
    f = sample_field(g, lambda X, Y: np.exp(1j * (np.pi / 3.0) * X))
    dx, dy = spectral_gradient(f)
    exact = 1j * (np.pi / 3.0) * f.values
    assert np.max(np.abs(dx.values - exact)) < 1e-12
    assert np.max(np.abs(dy.values)) < 1e-12


def test_gradient_of_constant(grid64):
    f = Field(grid64, np.full((64, 64), 2.3 + 0.0j))
    dx, dy = spectral_gradient(f)
    assert np.max(np.abs(dx.values)) < 1e-12
    assert np.max(np.abs(dy.values)) < 1e-12


def test_laplacian_gaussian():
    # At half_width 8 the Gaussian decays below roundoff at the seam and the
    # spectral Laplacian is exact to quadrature accuracy.
    g = make_grid(8.0, 256)
    f = gaussian(g)
    X, Y = g.meshes()
    r2 = X ** 2 + Y ** 2
    exact = (r2 - 2.0) * np.exp(-r2 / 2.0)
    assert np.max(np.abs(spectral_laplacian(f).values - exact)) < 1e-8

    # At half_width 6 the periodized tail (e^-18 seam kink amplified by k^2)
    # floors the error near 5e-6; document the honest bound.
    g6 = make_grid(6.0, 256)
    f6 = gaussian(g6)
    X6, Y6 = g6.meshes()
    r26 = X6 ** 2 + Y6 ** 2
    exact6 = (r26 - 2.0) * np.exp(-r26 / 2.0)
    err6 = np.max(np.abs(spectral_laplacian(f6).values - exact6))
    assert err6 < 1e-5


def test_integrate_gaussians(grid256):
    X, Y = grid256.meshes()
    r2 = X ** 2 + Y ** 2
    assert integrate(np.exp(-r2), grid256) == pytest.approx(np.pi, abs=1e-10)
    assert integrate(r2 * np.exp(-r2), grid256) == pytest.approx(np.pi, abs=1e-10)
    assert integrate(np.zeros_like(r2), grid256) == 0.0


def test_integrate_linear_and_conjugation(grid64):
    rng = np.random.default_rng(3)
    a = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    b = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    ia, ib = integrate(a, grid64), integrate(b, grid64)
    assert integrate(2.0 * a + 3.0 * b, grid64) == pytest.approx(2 * ia + 3 * ib)
    assert integrate(np.conj(a), grid64) == pytest.approx(np.conj(ia))


def test_parseval(grid256):
    f = gaussian(grid256, sigma=1.3)
    phys = integrate(np.abs(f.values) ** 2, grid256)
    F = transform_forward(f)
    spec = grid256.spacing ** 2 / grid256.points_per_axis ** 2 * np.sum(np.abs(F.values) ** 2)
    assert abs(phys - spec) / phys < 1e-12


def test_field_finite_check(grid64):
    f = Field(grid64, np.ones((64, 64), dtype=complex))
    f.check_finite()
    f.values[3, 4] = np.nan
    with pytest.raises(ValueError):
        f.check_finite()
    f.diverged = True
    f.check_finite()        # flagged fields may carry non-finite samples


def test_symmetrize_d4_is_exactly_symmetric(grid64):
    rng = np.random.default_rng(11)
    f = Field(grid64, rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64)))
    s = symmetrize_d4(f).values
    n = 64
    flip = (n - np.arange(n)) % n
    assert np.array_equal(s, s[flip, :])
    assert np.array_equal(s, s[:, flip])
    assert np.array_equal(s, s.T)
