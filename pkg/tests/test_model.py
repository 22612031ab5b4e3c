import numpy as np
import pytest

from rnls import (angular_momentum, apply_rotation_term, energy, exponents,
                  integrate, make_grid, make_params, mass, potential,
                  sample_field)
from rnls.errors import ConfigurationError

from conftest import gaussian, vortex


def test_potential_presets():
    g = make_grid(4.0, 64)      # spacing 1/8 puts (1, 0) and (0, 1) on the lattice

    def at(params, x, y):
        X, Y = g.meshes()
        V = potential(params, g)
        i = int(np.argmin(np.abs(g.axis_coords - x)))
        j = int(np.argmin(np.abs(g.axis_coords - y)))
        assert g.axis_coords[i] == pytest.approx(x)
        return V[i, j]

    gpe_iso = make_params("gpe", p=3, lam=1.0, gamma1=1.0)
    assert at(gpe_iso, 1.0, 1.0) == pytest.approx(1.0)
    unit = make_params("unit", p=3, lam=1.0, gamma1=1.0)
    assert at(unit, 1.0, 0.0) == pytest.approx(1.0)
    gpe_aniso = make_params("gpe", p=3, lam=1.0, gamma1=1.0, gamma2=2.0)
    assert at(gpe_aniso, 0.0, 1.0) == pytest.approx(2.0)


def test_unit_convention_requires_isotropy():
    with pytest.raises(ConfigurationError):
        make_params("unit", p=3, lam=1.0, gamma1=1.0, gamma2=2.0)


def test_rotation_matrix_structure():
    from rnls import rotation_matrix
    M = rotation_matrix(make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)).matrix()
    assert np.array_equal(M, -M.T)          # skew-symmetric, hence trace(M) = div A = 0
    assert M[1, 0] == 0.5
    R = rotation_matrix(make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)).exp(np.pi)
    assert np.allclose(R, [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)


def test_rotation_on_radial_field(grid256):
    params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
    f = gaussian(grid256)
    val = integrate(np.conj(f.values) * apply_rotation_term(f, params).values, grid256)
    assert abs(val) < 1e-10


def test_rotation_on_vortex(grid256):
    # L_A (x+iy)e^{-r^2/2} = -Omega * field, so <f, L_A f> = -Omega * pi
    params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
    f = vortex(grid256)
    val = integrate(np.conj(f.values) * apply_rotation_term(f, params).values, grid256)
    assert val.real == pytest.approx(-0.5 * np.pi, abs=1e-8)
    assert angular_momentum(f, params) == pytest.approx(-0.5 * np.pi, abs=1e-8)


def test_rotation_zero_speed(grid64):
    params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.0)
    f = vortex(grid64)
    assert np.max(np.abs(apply_rotation_term(f, params).values)) == 0.0


def test_mass_energy_gaussian(grid256):
    f = gaussian(grid256)
    assert mass(f) == pytest.approx(np.pi, abs=1e-10)
    params = make_params("unit", p=3, lam=0.0, gamma1=1.0, omega_rot=0.0)
    # int |grad u|^2 = pi and int r^2 |u|^2 = pi in closed form
    assert energy(f, params) == pytest.approx(2.0 * np.pi, abs=1e-8)


def test_angular_momentum_phase_invariance(grid256):
    params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
    f = vortex(grid256)
    g = sample_field(grid256, lambda X, Y: np.exp(1j * 0.7) * (X + 1j * Y)
                     * np.exp(-(X ** 2 + Y ** 2) / 2.0))
    assert angular_momentum(g, params) == pytest.approx(angular_momentum(f, params),
                                                        rel=1e-12)


def test_rotation_term_hermitian_symmetry(grid256):
    # <g, L_A f> = conj(<f, L_A g>): L_A = i A.grad with A.grad
    # anti-self-adjoint, so L_A itself is symmetric (and <u, L_A u> real)
    params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
    f = sample_field(grid256, lambda X, Y: np.exp(-(X ** 2 + Y ** 2) / 2.0)
                     * (1 + 0.3 * X + 0.2j * Y))
    g = sample_field(grid256, lambda X, Y: np.exp(-(X ** 2 + Y ** 2) / 1.5) * (X - 0.5j))
    s_fg = integrate(np.conj(g.values) * apply_rotation_term(f, params).values, grid256)
    s_gf = integrate(np.conj(f.values) * apply_rotation_term(g, params).values, grid256)
    assert abs(s_fg - np.conj(s_gf)) < 1e-10


def test_energy_nonnegative_without_focusing(grid64):
    params = make_params("gpe", p=3, lam=0.0, gamma1=1.0, omega_rot=0.0)
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = sample_field(grid64, lambda X, Y: np.exp(-(X ** 2 + Y ** 2) / 2.0)
                         * (rng.standard_normal() + 0.5 * X * rng.standard_normal()
                            + 1j * rng.standard_normal() * Y))
        assert energy(f, params) >= 0.0


def test_exponents_values():
    e = exponents(make_params("unit", p=4, lam=1.0, gamma1=1.0))
    assert e.lower_exp == pytest.approx(1.0 / 3.0)
    assert e.upper_exp == pytest.approx(0.5)
    assert e.delta == pytest.approx(0.75)

    e3 = exponents(make_params("unit", p=3, lam=1.0, gamma1=1.0, dim_n=3))
    assert e3.lower_exp == pytest.approx(0.25)
    assert e3.upper_exp == pytest.approx(2.0 / 3.0)
    assert e3.delta == pytest.approx(2.0 / 3.0)

    # mass-critical in 2D
    ec = exponents(make_params("unit", p=3, lam=1.0, gamma1=1.0))
    assert ec.lower_exp == pytest.approx(0.5)


def test_exponents_p5_n2_rejected():
    with pytest.raises(ConfigurationError):
        exponents(make_params("unit", p=5.0, lam=1.0, gamma1=1.0))


def test_exponents_identity_and_monotonicity():
    # upper_exp = 2 (1 - delta) is an exact algebraic identity
    for n in (2, 3, 4, 5):
        lo = 1.0 + 4.0 / n
        hi = 5.0 if n == 2 else 1.0 + 4.0 / (n - 2)
        ps = np.linspace(lo + 1e-3, hi - 1e-3, 9)
        deltas = []
        for p in ps:
            e = exponents(make_params("unit", p=float(p), lam=1.0, gamma1=1.0, dim_n=n))
            assert abs(e.upper_exp - 2.0 * (1.0 - e.delta)) < 1e-15
            deltas.append(e.delta)
        assert np.all(np.diff(deltas) > 0), f"delta not increasing in p for n={n}"
        if n >= 3:
            assert deltas[0] > 0.5
            assert deltas[-1] < (n - 1.0) / (2.0 * n - 4.0)
    # increasing in n at fixed p where the windows overlap
    for p in (2.5, 2.8):
        d3 = exponents(make_params("unit", p=p, lam=1.0, gamma1=1.0, dim_n=3)).delta
        d4 = exponents(make_params("unit", p=p, lam=1.0, gamma1=1.0, dim_n=4)).delta
        assert d4 > d3


def test_supercritical_window_flag():
    assert make_params("gpe", p=4.0, lam=1.0, gamma1=1.0).supercritical_window
    assert not make_params("gpe", p=3.0, lam=1.0, gamma1=1.0).supercritical_window
    assert not make_params("gpe", p=6.0, lam=1.0, gamma1=1.0).supercritical_window
    assert make_params("gpe", p=3.0, lam=1.0, gamma1=1.0, dim_n=3).supercritical_window
