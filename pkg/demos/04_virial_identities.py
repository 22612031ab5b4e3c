"""Localized virial identities as a solver diagnostic.

J(t) = int phi |u|^2 for a compactly supported radial weight obeys closed
first and second time-derivative identities; on a bounded run their
finite-difference defects must shrink by 4x when dt halves. This is one
of the sharper end-to-end consistency checks on the whole discretization.
"""
import numpy as np

from rnls import (TimeConfig, evolve, make_cutoff, make_grid, make_params,
                  sample_field, verify_virial_identities)

grid = make_grid(9.0, 192)
cutoff = make_cutoff(3.0, grid)
params = make_params("unit", p=3, lam=1.0, gamma1=1.0, omega_rot=0.5)
print(f"cutoff: quadratic core r <= {2*cutoff.R}, support r <= {3*cutoff.R}, "
      f"max psi'' = {cutoff.psi_pp_max:.2f} (the proof-side cap psi'' <= 1 "
      "is deliberately not enforced; the identities do not need it)")


def run(make_u0, dt, form):
    u0 = sample_field(grid, make_u0)
    return evolve(u0, params, TimeConfig(t_end=0.5, dt0=dt, phase_budget=2.0),
                  cutoff=cutoff, virial_form=form).records


for label, maker, form in [
        ("radial data ", lambda X, Y: 1.2 * np.exp(-(X**2 + Y**2) / 2), "radial"),
        ("vortex data ", lambda X, Y: 0.9 * (X + 1j * Y) * np.exp(-(X**2 + Y**2) / 2),
         "general")]:
    rep = verify_virial_identities(run(maker, 1e-3, form), run(maker, 5e-4, form))
    print(f"\n{label} (J'' in the {form} form):")
    print(f"  |dJ/dt - J'|   : {rep['defect_J1']:.2e} -> {rep['defect_J1_half']:.2e} "
          f"(ratio {rep['ratio_J1']:.3f})")
    print(f"  |dJ'/dt - J''| : {rep['defect_J2']:.2e} -> {rep['defect_J2_half']:.2e} "
          f"(ratio {rep['ratio_J2']:.3f})")
    print(f"  order-2 window [3.5, 4.5]: {'PASS' if rep['passed'] else 'FAIL'}")
