"""Spectral simulator and verification suite for the focusing NLS with
rotation and a harmonic trap on a periodic square grid."""

from .grid import (Field, GridSpec, SpectralField, integrate, make_grid, norm_l2,
                   sample_field, spectral_gradient, spectral_laplacian,
                   symmetrize_d4, transform_forward, transform_inverse)
from .model import (Exponents, ModelParams, RotationMatrix, angular_momentum,
                    apply_rotation_term, energy, exponents, gradient_norm_sq,
                    make_params, mass, potential, rotation_matrix)
from .mehler import KernelParams, mehler_apply, rotate_field
from .groundstate import (GroundStateConfig, GroundStateResult, RadialProfile,
                          compute_ground_state, groundstate_residual,
                          solve_radial_profile)
from .evolution import RunOutcome, TimeConfig, evolve, step
from .diagnostics import (CutoffProfile, DiagnosticsContext, DiagnosticsRecord,
                          RateFit, check_universal_bound, fit_blowup_rate,
                          gn_exterior_ratio, make_cutoff, select_fit_window,
                          verify_virial_identities, virial_defects, virial_J,
                          virial_J1, virial_J2, virial_J2_general)
from .config import (ExperimentConfig, apply_overrides, load_config,
                     parse_config_text, save_config)
from .io import (read_diagnostics_csv, read_snapshot, write_diagnostics_csv,
                 write_report_json, write_snapshot)
from .experiments import (ThresholdResult, run_evolve, run_fit, run_groundstate,
                          run_threshold, run_verify)

__version__ = "0.1.0"
