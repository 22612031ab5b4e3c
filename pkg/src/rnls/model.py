"""Equation conventions, coefficients, and the conserved functionals.

The generalized equation handled throughout is

    i u_t = -kin_coef * Lap(u) + V u - lam |u|^(p-1) u + L_A u,

with V = pot_coef * (gamma1^2 x^2 + gamma2^2 y^2) and L_A u = i A . grad u,
A = M x for a skew-symmetric M. Two coefficient presets are supported:

* "unit": kin_coef = pot_coef = 1, isotropic trap (gamma1 == gamma2).
* "gpe":  kin_coef = pot_coef = 1/2, the usual Gross-Pitaevskii
  normalization; the rotation term then reads -i*Omega*(y d_x - x d_y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError
from .grid import Field, GridSpec, integrate

CONVENTIONS = ("unit", "gpe")


@dataclass(frozen=True)
class ModelParams:
    """Physical coefficients plus the convention preset that fixed them."""

    p: float
    lam: float
    gamma1: float
    gamma2: float
    omega_rot: float
    kin_coef: float
    pot_coef: float
    dim_n: int = 2
    convention: str = "gpe"

    def __post_init__(self):
        if self.p <= 1:
            raise ConfigurationError(f"nonlinearity exponent p must exceed 1, got {self.p}")
        if self.lam < 0:
            raise ConfigurationError("lam must be nonnegative (focusing strength)")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ConfigurationError("trap frequencies must be nonnegative")
        if self.kin_coef <= 0 or self.pot_coef < 0:
            raise ConfigurationError("kin_coef must be positive, pot_coef nonnegative")
        if self.dim_n < 2:
            raise ConfigurationError("dim_n must be >= 2")
        if self.convention not in CONVENTIONS:
            raise ConfigurationError(f"unknown convention {self.convention!r}")
        if self.convention == "unit" and self.gamma1 != self.gamma2:
            raise ConfigurationError("unit convention requires an isotropic trap")

    @property
    def supercritical_window(self) -> bool:
        """True when p sits in the mass-supercritical, energy-subcritical window."""
        n = self.dim_n
        if n == 2:
            return 3.0 < self.p < 5.0
        return 1.0 + 4.0 / n < self.p < 1.0 + 4.0 / (n - 2)


def make_params(convention: str, p: float, lam: float, gamma1: float,
                gamma2: float = None, omega_rot: float = 0.0, dim_n: int = 2) -> ModelParams:
    """Build ModelParams with the preset coefficients for a convention."""
    if gamma2 is None:
        gamma2 = gamma1
    if convention == "unit":
        kin, pot = 1.0, 1.0
    elif convention == "gpe":
        kin, pot = 0.5, 0.5
    else:
        raise ConfigurationError(f"unknown convention {convention!r}")
    return ModelParams(p=float(p), lam=float(lam), gamma1=float(gamma1),
                       gamma2=float(gamma2), omega_rot=float(omega_rot),
                       kin_coef=kin, pot_coef=pot, dim_n=int(dim_n),
                       convention=convention)


@dataclass(frozen=True)
class RotationMatrix:
    """2-D skew-symmetric generator M = [[0, -m21], [m21, 0]], A(x) = M x."""

    m21: float

    def matrix(self) -> np.ndarray:
        return np.array([[0.0, -self.m21], [self.m21, 0.0]])

    def exp(self, t: float) -> np.ndarray:
        """Rotation e^{tM} (counterclockwise by m21*t)."""
        c, s = math.cos(self.m21 * t), math.sin(self.m21 * t)
        return np.array([[c, -s], [s, c]])

    def vector_field(self, X, Y):
        """A = M x componentwise: (-m21 * y, m21 * x)."""
        return -self.m21 * Y, self.m21 * X


def rotation_matrix(params: ModelParams) -> RotationMatrix:
    return RotationMatrix(params.omega_rot)


def potential(params: ModelParams, grid: GridSpec) -> np.ndarray:
    """Trap samples pot_coef * (gamma1^2 x^2 + gamma2^2 y^2)."""
    X, Y = grid.meshes()
    return params.pot_coef * (params.gamma1 ** 2 * X ** 2 + params.gamma2 ** 2 * Y ** 2)


def apply_rotation_term(f: Field, params: ModelParams) -> Field:
    """L_A f = i A . grad f with spectral derivatives.

    Under the gpe convention this equals -i*Omega*(y d_x - x d_y) f. The
    rotation coordinates use the seam-zeroed sawtooth so the discrete
    operator is exactly Hermitian (see GridSpec.rotation_coords).
    """
    grid = f.grid
    fhat = sfft.fft2(f.values)
    k = grid.wavenumbers
    dx = sfft.ifft2(1j * k[:, None] * fhat)
    dy = sfft.ifft2(1j * k[None, :] * fhat)
    Xr, Yr = grid.rotation_coords()
    ax, ay = rotation_matrix(params).vector_field(Xr, Yr)
    return Field(grid, 1j * (ax * dx + ay * dy))


def mass(f: Field) -> float:
    """Squared L2 norm of the field."""
    return float(integrate(np.abs(f.values) ** 2, f.grid))


def angular_momentum(f: Field, params: ModelParams) -> float:
    """Real part of <u, L_A u>; imaginary residue must be roundoff-level."""
    lf = apply_rotation_term(f, params)
    val = integrate(np.conj(f.values) * lf.values, f.grid)
    m = mass(f)
    tol = 1e-10 * max(1.0, abs(val.real), m)
    if abs(val.imag) > tol:
        raise ValueError(
            f"angular momentum has non-real residue {val.imag:.3e} beyond tolerance {tol:.3e}")
    return float(val.real)


def gradient_norm_sq(f: Field) -> float:
    """Integral of |grad u|^2 via Parseval (no inverse transforms)."""
    grid = f.grid
    fhat = sfft.fft2(f.values)
    k = grid.wavenumbers
    k2 = k[:, None] ** 2 + k[None, :] ** 2
    n2 = grid.points_per_axis ** 2
    return float(grid.spacing ** 2 / n2 * np.sum(k2 * np.abs(fhat) ** 2))


def energy(f: Field, params: ModelParams) -> float:
    """Conserved energy of the generalized equation.

    E[u] = int( kin_coef |grad u|^2 + V |u|^2 - (2 lam/(p+1)) |u|^(p+1) )
           + Re <u, L_A u>.
    """
    grid = f.grid
    absu2 = np.abs(f.values) ** 2
    kin = params.kin_coef * gradient_norm_sq(f)
    pot = integrate(potential(params, grid) * absu2, grid)
    nl = -2.0 * params.lam / (params.p + 1.0) * integrate(absu2 ** ((params.p + 1.0) / 2.0), grid)
    rot = angular_momentum(f, params) if params.omega_rot != 0.0 else 0.0
    return float(kin + pot + nl + rot)


@dataclass(frozen=True)
class Exponents:
    """Closed-form blowup-rate exponents for given (p, n)."""

    lower_exp: float
    upper_exp: float
    delta: float


def exponents(params: ModelParams) -> Exponents:
    """Lower-bound rate 1/(p-1) - (n-2)/4, space-time bound 2(5-p)/(5-p+(n-1)(p-1)),
    and delta = (n-1)(p-1)/(5-p+(n-1)(p-1))."""
    p, n = params.p, params.dim_n
    if p == 5.0 and n == 2:
        raise ConfigurationError("p = 5 with n = 2 is outside the admissible window")
    lower = 1.0 / (p - 1.0) - (n - 2.0) / 4.0
    denom = 5.0 - p + (n - 1.0) * (p - 1.0)
    if denom == 0.0:
        raise ConfigurationError(f"degenerate exponent denominator for p={p}, n={n}")
    upper = 2.0 * (5.0 - p) / denom
    delta = (n - 1.0) * (p - 1.0) / denom
    return Exponents(lower_exp=lower, upper_exp=upper, delta=delta)
