"""Ground states two ways.

1. The trapped rotating ground state on the grid by normalized gradient
   flow (chemical potential from the Rayleigh quotient, Euler-Lagrange
   residual checked from scratch).
2. The free radial profile Q'' + ((n-1)/r) Q' - Q + Q^p = 0 by shooting,
   including the classic closed forms it must hit.
"""
import numpy as np

from rnls import compute_ground_state, make_grid, make_params, solve_radial_profile

grid = make_grid(6.0, 128)

print("linear trap (analytic check: omega = (gamma1+gamma2)/2):")
for g1, g2 in ((1.0, 1.0), (1.0, 2.0)):
    params = make_params("gpe", p=3, lam=0.0, gamma1=g1, gamma2=g2)
    res = compute_ground_state(params, grid)
    print(f"  gamma=({g1},{g2}): omega = {res.chemical_potential:.10f}, "
          f"residual {res.residual:.1e}, {res.iterations} iterations")

print("\nfocusing cubic with rotation (p=3, lambda=1, Omega=0.5):")
params = make_params("gpe", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
res = compute_ground_state(params, grid)
print(f"  omega = {res.chemical_potential:.10f}, residual {res.residual:.1e}, "
      f"peak density {np.max(np.abs(res.field.values)**2):.4f}")

print("\nradial shooter:")
townes = solve_radial_profile(3.0, 2, r_max=20.0, dr=1e-3)
print(f"  p=3, n=2: Q(0) = {townes.q0:.10f}, ||Q||_2^2 = {townes.mass_l2_sq:.6f} "
      "(the collapse threshold mass of the cubic problem)")
sech = solve_radial_profile(3.0, 1, r_max=20.0, dr=1e-3)
err = np.max(np.abs(sech.q - np.sqrt(2)/np.cosh(sech.r)))
print(f"  p=3, n=1: max deviation from sqrt(2) sech(r): {err:.2e}")
