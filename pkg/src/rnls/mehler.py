"""Exact linear propagator for the isotropic trap with rotation.

The rotating harmonic oscillator H = -Lap + gamma^2 |x|^2 + L_A (unit
convention) has the closed-form Mehler-type kernel

    K_t(x, y) = (gamma / (2 pi i sin(2 gamma t)))
                * exp(i (gamma/2) (|x|^2 + |y|^2) cot(2 gamma t))
                * exp(-i gamma (e^{tM} x . y) / sin(2 gamma t)),

singular at the refocusing times t = k pi / (2 gamma). The dense-quadrature
apply below is O(N^4) and exists purely as an oracle for the split-step
integrator; it is capped at modest grid sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, ResourceLimitError, SingularTimeError
from .grid import Field
from .model import RotationMatrix

SIN_GUARD = 1e-6


@dataclass(frozen=True)
class KernelParams:
    """Isotropic trap frequency, evolution time, and rotation generator."""

    gamma: float
    t: float
    rotation: RotationMatrix

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("kernel gamma must be positive")
        if abs(math.sin(2.0 * self.gamma * self.t)) < SIN_GUARD:
            raise SingularTimeError(
                f"t = {self.t} is within the singularity guard of a refocusing time "
                f"(|sin(2 gamma t)| < {SIN_GUARD})")


def mehler_apply(f: Field, kp: KernelParams, max_points: int = 128) -> Field:
    """Dense-quadrature image spacing^2 * sum_y K_t(x, y) f(y).

    Oracle use only: cost O(N^4). The cross phase exp(c (e^{tM}x . y))
    factors over the two components of y, so the whole apply reduces to
    one (N^2 x N) @ (N x N) product followed by a weighted row sum.
    """
    grid = f.grid
    n = grid.points_per_axis
    if n > max_points:
        raise ResourceLimitError(
            f"dense Mehler quadrature capped at {max_points} points per axis, grid has {n}")

    s = math.sin(2.0 * kp.gamma * kp.t)
    cot = math.cos(2.0 * kp.gamma * kp.t) / s
    pref = kp.gamma / (2.0 * math.pi * 1j * s)
    coef = -1j * kp.gamma / s

    X, Y = grid.meshes()
    r2 = (X * X + Y * Y).ravel()
    quad_phase = np.exp(0.5j * kp.gamma * cot * r2)        # shared by x and y factors
    weighted = (quad_phase * f.values.ravel()).reshape(n, n)

    R = kp.rotation.exp(kp.t)
    a = (R[0, 0] * X + R[0, 1] * Y).ravel()                # (e^{tM} x) components
    b = (R[1, 0] * X + R[1, 1] * Y).ravel()
    xi = grid.axis_coords
    ea = np.exp(coef * a[:, None] * xi[None, :])           # (N^2, N)
    eb = np.exp(coef * b[:, None] * xi[None, :])
    out = np.einsum("pa,ab,pb->p", ea, weighted, eb, optimize=True)
    out *= pref * grid.spacing ** 2 * quad_phase
    return Field(grid, out.reshape(n, n))


def _quarter_turns(angle: float):
    """Number of exact quarter turns if angle is a multiple of pi/2, else None."""
    q = angle / (0.5 * math.pi)
    qr = round(q)
    if abs(q - qr) < 1e-12:
        return qr % 4
    return None


def _rotate_indices(values: np.ndarray, quarters: int) -> np.ndarray:
    """Sample f(e^{tM} x) for e^{tM} = quarter-turn rotations, exactly.

    On the periodic lattice the map (x, y) -> (-y, x) is the index
    permutation out[i, j] = f[(N - j) % N, i].
    """
    n = values.shape[0]
    idx = np.arange(n)
    flip = (n - idx) % n
    out = values
    for _ in range(quarters % 4):
        out = out[np.ix_(flip, idx)].T
    return np.ascontiguousarray(out)


def rotate_field(f: Field, t: float, params, max_points: int = 128) -> Field:
    """e^{-i t L_A} f, i.e. f sampled at e^{tM} x by Fourier interpolation.

    Quarter-turn angles reduce to exact index permutations and work at any
    grid size; other angles use dense evaluation of the Fourier series at
    the rotated nodes (capped like the Mehler quadrature).
    """
    grid = f.grid
    n = grid.points_per_axis
    rot = RotationMatrix(params.omega_rot) if not isinstance(params, RotationMatrix) else params
    angle = rot.m21 * t
    q = _quarter_turns(angle)
    if q is not None:
        return Field(grid, _rotate_indices(f.values, q))

    if n > max_points:
        raise ResourceLimitError(
            f"dense Fourier rotation capped at {max_points} points per axis, grid has {n}")
    fhat = sfft.fft2(f.values) / n ** 2
    R = rot.exp(t)
    X, Y = grid.meshes()
    xr = R[0, 0] * X + R[0, 1] * Y
    yr = R[1, 0] * X + R[1, 1] * Y
    k = grid.wavenumbers
    # DFT index j maps to coordinate x_j = -hw + j h, so the series reads
    # f(x) = (1/N^2) sum_k fhat_k exp(i k (x + hw)) per axis; the +hw shift
    # also makes the evaluation periodic without explicit wrapping.
    hw = grid.half_width
    ex = np.exp(1j * (xr.ravel() + hw)[:, None] * k[None, :])   # (N^2, N)
    ey = np.exp(1j * (yr.ravel() + hw)[:, None] * k[None, :])
    out = np.einsum("pa,ab,pb->p", ex, fhat, ey, optimize=True)
    return Field(grid, out.reshape(n, n))
