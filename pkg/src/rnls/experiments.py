"""Scenario drivers behind the CLI: ground-state runs, evolution runs,
threshold bisection, the verification suite, and rate fitting.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .config import ExperimentConfig
from .diagnostics import (check_universal_bound, fit_blowup_rate, gn_exterior_ratio,
                          make_cutoff, select_fit_window, verify_virial_identities)
from .errors import BracketError
from .evolution import BLOWUP, BOUNDED, TimeConfig, evolve
from .grid import Field, make_grid, sample_field, symmetrize_d4
from .groundstate import compute_ground_state
from .io import (read_diagnostics_csv, write_diagnostics_csv, write_report_json,
                 write_snapshot)
from .mehler import KernelParams, mehler_apply
from .model import exponents, make_params, rotation_matrix


def _ensure_outdir(cfg: ExperimentConfig) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg.output_dir


def _cutoff_for(cfg: ExperimentConfig, grid):
    if cfg.cutoff_R > 0:
        return make_cutoff(cfg.cutoff_R, grid)
    return None


def run_groundstate(cfg: ExperimentConfig) -> dict:
    params, grid = cfg.model_params(), cfg.grid()
    res = compute_ground_state(params, grid, cfg.groundstate_config())
    out = _ensure_outdir(cfg)
    write_snapshot(os.path.join(out, "groundstate.rnls"), res.field, 0.0)
    summary = {
        "omega": res.chemical_potential,
        "residual": res.residual,
        "iterations": res.iterations,
        "sup_sq": float(np.max(np.abs(res.field.values) ** 2)),
    }
    write_report_json(os.path.join(out, "groundstate.json"), summary)
    return summary


def run_evolve(cfg: ExperimentConfig):
    params, grid = cfg.model_params(), cfg.grid()
    gs = compute_ground_state(params, grid, cfg.groundstate_config())
    u0 = Field(grid, cfg.amplitude * gs.field.values)
    out = _ensure_outdir(cfg)

    snaps = []

    def snapshot_sink(t, f):
        path = os.path.join(out, f"snapshot_{len(snaps):06d}.rnls")
        write_snapshot(path, f, t)
        snaps.append(path)

    outcome = evolve(u0, params, cfg.time_config(), cutoff=_cutoff_for(cfg, grid),
                     virial_form=cfg.virial_form, snapshot_sink=snapshot_sink)
    write_diagnostics_csv(os.path.join(out, "diagnostics.csv"), outcome.records)
    if not outcome.final_field.diverged:
        write_snapshot(os.path.join(out, "final.rnls"), outcome.final_field, outcome.t_final)
    write_report_json(os.path.join(out, "outcome.json"), {
        "classification": outcome.classification,
        "reason": outcome.reason,
        "t_final": outcome.t_final,
        "sup_growth": outcome.sup_growth,
        "estimated_T": outcome.estimated_T if outcome.estimated_T is not None else float("nan"),
        "amplitude": cfg.amplitude,
        "omega": gs.chemical_potential,
    })
    return outcome


@dataclass
class ThresholdResult:
    """Bisected blowup threshold with the classification trail."""

    C_star: float
    C_lo_final: float
    C_hi_final: float
    runs: List[Tuple[float, str]]
    monotone: bool = True


def run_threshold(cfg: ExperimentConfig) -> ThresholdResult:
    """Bisect the amplitude between a bounded and a blowup endpoint.

    One ground-state solve is shared by every classification run. An
    ambiguous classification is treated as not-bounded (it moves the upper
    endpoint) and flagged through the monotonicity check.
    """
    params, grid = cfg.model_params(), cfg.grid()
    gs = compute_ground_state(params, grid, cfg.groundstate_config())
    tcfg = cfg.time_config()
    runs: List[Tuple[float, str]] = []

    def classify(amplitude: float) -> str:
        outcome = evolve(Field(grid, amplitude * gs.field.values), params, tcfg,
                         cutoff=_cutoff_for(cfg, grid), virial_form=cfg.virial_form)
        runs.append((amplitude, outcome.classification))
        return outcome.classification

    lo, hi = cfg.bracket
    lo_class = classify(lo)
    hi_class = classify(hi)
    if lo_class != BOUNDED or hi_class != BLOWUP:
        raise BracketError(
            f"bracket does not straddle the threshold: C={lo} -> {lo_class}, C={hi} -> {hi_class}",
            runs=runs)

    while hi - lo > cfg.bracket_tol:
        mid = 0.5 * (lo + hi)
        if classify(mid) == BOUNDED:
            lo = mid
        else:
            hi = mid

    ordered = sorted(runs)
    bounded_above_blowup = False
    worst_blowup = None
    for amp, cls in ordered:
        if cls != BOUNDED and worst_blowup is None:
            worst_blowup = amp
        if cls == BOUNDED and worst_blowup is not None and amp > worst_blowup:
            bounded_above_blowup = True
    result = ThresholdResult(C_star=0.5 * (lo + hi), C_lo_final=lo, C_hi_final=hi,
                             runs=runs, monotone=not bounded_above_blowup)

    out = _ensure_outdir(cfg)
    write_report_json(os.path.join(out, "threshold.json"), {
        "C_star": result.C_star,
        "C_lo_final": result.C_lo_final,
        "C_hi_final": result.C_hi_final,
        "monotone": result.monotone,
        "runs": {repr(a): c for a, c in result.runs},
    })
    return result


def run_fit(cfg: ExperimentConfig) -> dict:
    """Fit the blowup rate from a previously written diagnostics.csv."""
    path = os.path.join(cfg.output_dir, "diagnostics.csv")
    records = read_diagnostics_csv(path)
    window = select_fit_window(records)
    fit = fit_blowup_rate(records, window)
    exps = exponents(cfg.model_params())
    bound = check_universal_bound(fit, exps)
    summary = {
        "T_hat": fit.T_hat,
        "kappa_hat": fit.kappa_hat,
        "gbound_slope": fit.gbound_slope,
        "r_squared": fit.r_squared,
        "low_confidence": fit.low_confidence,
        "tail_share": fit.tail_share,
        "window_lo": fit.window[0],
        "window_hi": fit.window[1],
        "lower_exp": exps.lower_exp,
        "upper_exp": exps.upper_exp,
        "bound_pass": bound["passed"],
        "bound_threshold": bound["threshold"],
    }
    write_report_json(os.path.join(cfg.output_dir, "fit.json"), summary)
    return summary


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------

GN_SIGMAS = (0.5, 1.0, 2.0, 4.0)
GN_RADII = (0.5, 1.0, 2.0)


def _suite(measured: float, threshold: float) -> dict:
    return {"pass": bool(measured <= threshold), "measured": float(measured),
            "threshold": float(threshold)}


def run_verify(cfg: ExperimentConfig) -> dict:
    """Conservation drifts, virial convergence order, propagator oracle,
    exterior Gagliardo-Nirenberg sweep, and ground-state residual.

    Emits a flat {suite: {pass, measured, threshold}} report (also written
    to output_dir/report.json).
    """
    params, grid = cfg.model_params(), cfg.grid()
    report = {}

    # conservation drifts on a bounded run from symmetrized (grid-radial) data
    gs = compute_ground_state(params, grid, cfg.groundstate_config())
    u0 = Field(grid, cfg.amplitude * symmetrize_d4(gs.field).values)
    outcome = evolve(u0, params, cfg.time_config())
    recs = outcome.records
    m = np.array([r.mass for r in recs])
    e = np.array([r.energy for r in recs])
    ell = np.array([r.ell_A for r in recs])
    report["conservation_mass"] = _suite(np.max(np.abs(m - m[0])) / m[0], 1e-10)
    report["conservation_energy"] = _suite(np.max(np.abs(e - e[0])) / abs(e[0]), 1e-6)
    report["conservation_ell"] = _suite(np.max(np.abs(ell)), 1e-9)

    report["groundstate_residual"] = _suite(
        gs.residual, 1e-8 * max(1.0, np.sqrt(cfg.gs_target_mass)))

    # virial identity convergence order (unit convention, isotropic). The
    # wide grid keeps the cutoff's blend seams (r = 2R, 3R) out in the
    # field's far tail, and the loose phase budget keeps the dt pair exact.
    vparams = make_params("unit", p=cfg.p, lam=cfg.lam, gamma1=cfg.gamma1,
                          omega_rot=cfg.omega_rot)
    vgrid = make_grid(9.0, 192)
    cutoff = make_cutoff(3.0, vgrid)
    v0 = sample_field(vgrid, lambda X, Y: 1.2 * np.exp(-(X ** 2 + Y ** 2) / 2.0))
    rec_full = evolve(v0, vparams, TimeConfig(t_end=0.5, dt0=cfg.dt0, phase_budget=2.0),
                      cutoff=cutoff, virial_form="radial").records
    rec_half = evolve(v0, vparams, TimeConfig(t_end=0.5, dt0=cfg.dt0 / 2, phase_budget=2.0),
                      cutoff=cutoff, virial_form="radial").records
    vir = verify_virial_identities(rec_full, rec_half)
    measured = max(abs(vir["ratio_J1"] - 4.0), abs(vir["ratio_J2"] - 4.0))
    report["virial_order"] = _suite(measured, 0.5)

    # split-step against the closed-form propagator (isotropic trap)
    mgrid = make_grid(6.0, 64)
    mparams = make_params("unit", p=cfg.p, lam=0.0, gamma1=cfg.gamma1,
                          omega_rot=cfg.omega_rot)
    w0 = sample_field(mgrid, lambda X, Y: np.exp(-(X ** 2 + Y ** 2) / 2.0))
    kp = KernelParams(gamma=cfg.gamma1, t=0.3, rotation=rotation_matrix(mparams))
    oracle = mehler_apply(w0, kp)
    num = evolve(w0, mparams, TimeConfig(t_end=0.3, dt0=1e-4, snapshot_every=1000))
    diff = num.final_field.values - oracle.values
    rel = float(np.sqrt(np.sum(np.abs(diff) ** 2) / np.sum(np.abs(oracle.values) ** 2)))
    report["mehler_agreement"] = _suite(rel, 1e-6)

    # exterior Gagliardo-Nirenberg sweep
    ggrid = make_grid(6.0, 256)
    worst = 0.0
    for sigma in GN_SIGMAS:
        u = sample_field(ggrid, lambda X, Y: np.exp(-sigma * (X ** 2 + Y ** 2) / 2.0))
        for R in GN_RADII:
            worst = max(worst, gn_exterior_ratio(u, R))
    report["gn_cap"] = _suite(worst, 1.0)

    out = _ensure_outdir(cfg)
    write_report_json(os.path.join(out, "report.json"), report)
    return report
