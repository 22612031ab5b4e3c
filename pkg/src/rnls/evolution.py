"""Time-dependent solver: Strang splitting with alternating-direction
treatment of the kinetic-plus-rotation generator, phase-budget adaptive
time stepping, and bounded/blowup run classification.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import List, Optional

import numpy as np
import scipy.fft as sfft

from .diagnostics import DiagnosticsContext, DiagnosticsRecord, fit_blowup_rate, select_fit_window
from .errors import ConfigurationError
from .grid import Field, GridSpec
from .model import ModelParams, potential

BOUNDED, BLOWUP, AMBIGUOUS = "bounded", "blowup", "ambiguous"
REACHED_T_END = "reached_t_end"
SUP_NORM_EXPLODED = "sup_norm_exploded"
DT_UNDERFLOW = "dt_underflow"
RESOLUTION_EXHAUSTED = "resolution_exhausted"

_HARD_GROWTH_CAP = 1e12


@dataclass
class TimeConfig:
    """Discretization and run-classification knobs."""

    t_end: float
    dt0: float = 1e-3
    dt_min: float = 1e-9
    phase_budget: float = 0.1
    blowup_factor: float = 100.0
    tail_tol: float = 1e-3
    snapshot_every: int = 0
    boundary_tol: float = 1e-2

    def __post_init__(self):
        if self.t_end <= 0 or self.dt0 <= 0 or self.dt_min <= 0:
            raise ConfigurationError("t_end, dt0, dt_min must be positive")
        if self.dt_min >= self.dt0:
            raise ConfigurationError("dt_min must be smaller than dt0")
        if self.blowup_factor <= 1:
            raise ConfigurationError("blowup_factor must exceed 1")
        if not (0.0 < self.tail_tol < 1.0):
            raise ConfigurationError("tail_tol must lie in (0, 1)")
        if self.phase_budget <= 0:
            raise ConfigurationError("phase_budget must be positive")
        if self.snapshot_every < 0:
            raise ConfigurationError("snapshot_every must be nonnegative")


@dataclass
class RunOutcome:
    """Classification of a simulation with its diagnostic trace."""

    classification: str
    t_final: float
    reason: str
    records: List[DiagnosticsRecord] = dc_field(default_factory=list)
    estimated_T: Optional[float] = None
    sup_growth: float = 1.0
    final_field: Optional[Field] = None


class _Stepper:
    """Precomputed arrays for the Strang/ADI step on one (grid, params) pair."""

    def __init__(self, grid: GridSpec, params: ModelParams):
        self.grid = grid
        self.params = params
        self.V = potential(params, grid)
        self.V_max = float(np.max(self.V))
        k = grid.wavenumbers
        xr = grid.axis_coords
        xr = xr.copy()
        xr[0] = 0.0  # seam-zeroed rotation coordinate (see GridSpec.rotation_coords)
        a, om = params.kin_coef, params.omega_rot
        # x-substep symbol a*kx^2 + Omega*y*kx on the (kx, y) lattice
        self.sym_x = a * k[:, None] ** 2 + om * k[:, None] * xr[None, :]
        # y-substep symbol a*ky^2 - Omega*x*ky on the (x, ky) lattice
        self.sym_y = a * k[None, :] ** 2 - om * xr[:, None] * k[None, :]
        self._phase_cache = {}

    def _phases(self, dt: float):
        # the halving cascade reuses few distinct dt values, so the ADI phase
        # arrays are worth caching; the local phase depends on |u| and is not
        cached = self._phase_cache.get(dt)
        if cached is None:
            cached = (np.exp(-1j * dt * self.sym_x), np.exp(-1j * dt * self.sym_y))
            if len(self._phase_cache) > 16:
                self._phase_cache.clear()
            self._phase_cache[dt] = cached
        return cached

    def local_full(self, values: np.ndarray, dt: float) -> np.ndarray:
        p = self.params
        if p.lam != 0.0:
            w = self.V - p.lam * np.abs(values) ** (p.p - 1.0)
        else:
            w = self.V
        return values * np.exp(-1j * dt * w)

    def adi(self, values: np.ndarray, dt: float, x_first: bool) -> np.ndarray:
        ex, ey = self._phases(dt)
        if x_first:
            values = sfft.ifft(ex * sfft.fft(values, axis=0), axis=0)
            values = sfft.ifft(ey * sfft.fft(values, axis=1), axis=1)
        else:
            values = sfft.ifft(ey * sfft.fft(values, axis=1), axis=1)
            values = sfft.ifft(ex * sfft.fft(values, axis=0), axis=0)
        return values

    def step(self, values: np.ndarray, dt: float) -> np.ndarray:
        values = self.adi(values, 0.5 * dt, True)
        values = self.local_full(values, dt)
        return self.adi(values, 0.5 * dt, False)


@lru_cache(maxsize=8)
def _stepper(grid: GridSpec, params: ModelParams) -> _Stepper:
    return _Stepper(grid, params)


def step(u: Field, dt: float, params: ModelParams) -> Field:
    """One Strang step of the generalized equation.

    Half-steps of the kinetic-plus-rotation ADI pair (x-axis substep first
    going in, y-axis substep first coming out) wrap the exact pointwise
    potential/nonlinear phase over the full dt. Each axis substep is
    diagonal after a 1-D transform, with the transverse coordinate a
    parameter in the symbol, integrated exactly as a scalar phase. The
    palindromic arrangement makes the step time-symmetric:
    step(step(u, dt), -dt) = u to roundoff.
    """
    if dt == 0.0:
        return u.copy()
    st = _stepper(u.grid, params)
    out = st.step(u.values, dt)
    f = Field(u.grid, out)
    if not np.all(np.isfinite(out)):
        f.diverged = True
    return f


def _boundary_ratio(absu2: np.ndarray, sup_sq: float) -> float:
    if sup_sq <= 0:
        return 0.0
    edge = max(float(np.max(absu2[0, :])), float(np.max(absu2[-1, :])),
               float(np.max(absu2[:, 0])), float(np.max(absu2[:, -1])))
    return edge / sup_sq


def evolve(u0: Field, params: ModelParams, tcfg: TimeConfig, sink=None,
           cutoff=None, virial_form: str = "radial", snapshot_sink=None) -> RunOutcome:
    """Advance u0 with adaptive Strang/ADI steps until t_end or blowup.

    The step size is the largest dt0/2^m keeping the per-step phase of the
    stiffest pointwise term within the budget: S*dt <= eta with
    S = lam*sup|u|^(p-1) + V_max; the run stops with dt_underflow when the
    cascade would push dt below dt_min. Records go to `sink` (and the
    returned outcome) every step, or every snapshot_every steps when that
    is positive; `snapshot_sink(t, Field)` fires at the same cadence.
    """
    st = _stepper(u0.grid, params)
    ctx = DiagnosticsContext(u0.grid, params, cutoff=cutoff, virial_form=virial_form)
    cadence = max(1, tcfg.snapshot_every)

    values = u0.values.copy()
    absu2 = np.abs(values) ** 2
    sup0 = float(np.max(absu2))
    if sup0 <= 0:
        raise ConfigurationError("initial field must have positive mass")
    sup_sq = sup0
    max_growth = 1.0

    records: List[DiagnosticsRecord] = []

    def emit(t, dt):
        rec = ctx.record(t, dt, values)
        records.append(rec)
        if sink is not None:
            sink(rec)
        if snapshot_sink is not None and tcfg.snapshot_every > 0:
            snapshot_sink(t, Field(u0.grid, values.copy()))
        return rec

    t = 0.0
    emit(t, 0.0)
    reason = REACHED_T_END
    n_step = 0
    lam, p_exp = params.lam, params.p

    while t < tcfg.t_end * (1.0 - 1e-15):
        # halving cascade keeping the per-step phase of the stiffest pointwise
        # term within the budget: largest dt0/2^m with stiff*dt <= eta. Long
        # constant-dt stretches preserve the splitting's error cancellation,
        # which a continuously varying dt destroys.
        stiff = lam * sup_sq ** ((p_exp - 1.0) / 2.0) + st.V_max
        dt = tcfg.dt0
        while stiff * dt > tcfg.phase_budget:
            dt *= 0.5
            if dt < tcfg.dt_min:
                break
        if dt < tcfg.dt_min:
            reason = DT_UNDERFLOW
            break
        dt = min(dt, tcfg.t_end - t)

        values = st.step(values, dt)
        t += dt
        n_step += 1

        if not np.all(np.isfinite(values)):
            reason = SUP_NORM_EXPLODED
            break
        absu2 = np.abs(values) ** 2
        sup_sq = float(np.max(absu2))
        max_growth = max(max_growth, sup_sq / sup0)
        if sup_sq / sup0 > _HARD_GROWTH_CAP:
            reason = SUP_NORM_EXPLODED
            break

        if n_step % cadence == 0 or t >= tcfg.t_end * (1.0 - 1e-15):
            rec = emit(t, dt)
            if rec.tail_frac > tcfg.tail_tol:
                reason = RESOLUTION_EXHAUSTED
                break
            if _boundary_ratio(absu2, sup_sq) > tcfg.boundary_tol:
                reason = RESOLUTION_EXHAUSTED
                break

    if records and records[-1].t < t and np.all(np.isfinite(values)):
        emit(t, records[-1].dt)

    if reason == REACHED_T_END:
        classification = BOUNDED
    elif max_growth >= tcfg.blowup_factor:
        classification = BLOWUP
    else:
        classification = AMBIGUOUS

    estimated_T = None
    if classification == BLOWUP:
        try:
            window = select_fit_window(records)
            estimated_T = fit_blowup_rate(records, window).T_hat
        except Exception:
            estimated_T = None

    final = Field(u0.grid, values, diverged=not bool(np.all(np.isfinite(values))))
    return RunOutcome(classification=classification, t_final=t, reason=reason,
                      records=records, estimated_T=estimated_T,
                      sup_growth=max_growth, final_field=final)
