"""Spectral substrate: grids, transforms, derivatives, quadrature.

Shows the accuracy you can expect from the periodic spectral toolbox when
the field is confined well inside the domain.
"""
import numpy as np

from rnls import (integrate, make_grid, sample_field, spectral_gradient,
                  spectral_laplacian, transform_forward)

grid = make_grid(8.0, 256)
print(f"grid: [-{grid.half_width}, {grid.half_width}]^2, {grid.points_per_axis}^2 points, "
      f"spacing {grid.spacing:.4f}, fundamental wavenumber {np.pi/grid.half_width:.4f}")

u = sample_field(grid, lambda X, Y: np.exp(-(X**2 + Y**2) / 2))
X, Y = grid.meshes()
r2 = X**2 + Y**2

print("\nquadrature of known Gaussian integrals:")
print(f"  int e^(-r^2)      = {integrate(np.exp(-r2), grid):.15f}   (pi = {np.pi:.15f})")
print(f"  int r^2 e^(-r^2)  = {integrate(r2*np.exp(-r2), grid):.15f}")

lap = spectral_laplacian(u)
exact = (r2 - 2) * np.exp(-r2 / 2)
print(f"\nspectral Laplacian of e^(-r^2/2): max error {np.abs(lap.values - exact).max():.2e}")

dx, dy = spectral_gradient(u)
print(f"gradient max error: {np.abs(dx.values + X*np.exp(-r2/2)).max():.2e}")

F = transform_forward(u)
phys = integrate(np.abs(u.values)**2, grid)
spec = grid.spacing**2 / grid.points_per_axis**2 * np.sum(np.abs(F.values)**2)
print(f"\nParseval check: physical {phys:.15f} vs spectral {spec:.15f} "
      f"(rel diff {abs(phys-spec)/phys:.1e})")
