"""Experiment configuration: a line-oriented `key = value` format with
namespaced keys (`model.p`, `grid.points_per_axis`, ...), `#` comments,
defaults for absent keys, and hard errors on unknown keys.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Tuple

from .errors import ConfigurationError
from .evolution import TimeConfig
from .grid import GridSpec, make_grid
from .groundstate import GroundStateConfig
from .model import CONVENTIONS, ModelParams, make_params

SCENARIOS = ("groundstate", "evolve", "threshold", "verify", "fit")


@dataclass
class ExperimentConfig:
    convention: str = "gpe"
    dim_n: int = 2
    p: float = 3.0
    lam: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    omega_rot: float = 0.5
    half_width: float = 3.0
    points_per_axis: int = 256
    t_end: float = 0.0          # 0 means "5 trap periods", resolved below
    dt0: float = 1e-3
    dt_min: float = 1e-9
    phase_budget: float = 0.1
    blowup_factor: float = 100.0
    tail_tol: float = 1e-3
    snapshot_every: int = 0
    boundary_tol: float = 1e-2
    gs_dt_imag: float = 1e-2
    gs_tol: float = 1e-10
    gs_max_iter: int = 100000
    gs_target_mass: float = 1.0
    cutoff_R: float = 0.0       # 0 disables the virial columns
    virial_form: str = "radial"
    scenario: str = "verify"
    amplitude: float = 1.0
    bracket: Tuple[float, float] = (2.0, 2.5)
    bracket_tol: float = 0.01
    output_dir: str = "out"

    def model_params(self) -> ModelParams:
        return make_params(self.convention, p=self.p, lam=self.lam,
                           gamma1=self.gamma1, gamma2=self.gamma2,
                           omega_rot=self.omega_rot, dim_n=self.dim_n)

    def grid(self) -> GridSpec:
        return make_grid(self.half_width, self.points_per_axis)

    def resolved_t_end(self) -> float:
        if self.t_end > 0:
            return self.t_end
        gmin = min(self.gamma1, self.gamma2)
        if gmin <= 0:
            raise ConfigurationError("t_end must be set explicitly for an untrapped run")
        return 5.0 / gmin

    def time_config(self) -> TimeConfig:
        return TimeConfig(t_end=self.resolved_t_end(), dt0=self.dt0, dt_min=self.dt_min,
                          phase_budget=self.phase_budget, blowup_factor=self.blowup_factor,
                          tail_tol=self.tail_tol, snapshot_every=self.snapshot_every,
                          boundary_tol=self.boundary_tol)

    def groundstate_config(self) -> GroundStateConfig:
        return GroundStateConfig(dt_imag=self.gs_dt_imag, tol=self.gs_tol,
                                 max_iter=self.gs_max_iter, target_mass=self.gs_target_mass)


# config key -> (attribute, parser); parsers raise ValueError on bad input
def _parse_bracket(text: str):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise ValueError("bracket needs two comma-separated values")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise ValueError("bracket must be ordered (lo < hi)")
    return (lo, hi)


def _parse_enum(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


def _parse_int(text: str) -> int:
    if not text.lstrip("+-").isdigit():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(text)


KEY_TABLE = {
    "model.convention": ("convention", _parse_enum(CONVENTIONS)),
    "model.dim_n": ("dim_n", _parse_int),
    "model.p": ("p", float),
    "model.lambda": ("lam", float),
    "model.gamma1": ("gamma1", float),
    "model.gamma2": ("gamma2", float),
    "model.omega_rot": ("omega_rot", float),
    "grid.half_width": ("half_width", float),
    "grid.points_per_axis": ("points_per_axis", _parse_int),
    "time.t_end": ("t_end", float),
    "time.dt0": ("dt0", float),
    "time.dt_min": ("dt_min", float),
    "time.phase_budget": ("phase_budget", float),
    "time.blowup_factor": ("blowup_factor", float),
    "time.tail_tol": ("tail_tol", float),
    "time.snapshot_every": ("snapshot_every", _parse_int),
    "time.boundary_tol": ("boundary_tol", float),
    "groundstate.dt_imag": ("gs_dt_imag", float),
    "groundstate.tol": ("gs_tol", float),
    "groundstate.max_iter": ("gs_max_iter", _parse_int),
    "groundstate.target_mass": ("gs_target_mass", float),
    "diagnostics.cutoff_R": ("cutoff_R", float),
    "diagnostics.virial_form": ("virial_form", _parse_enum(("radial", "general"))),
    "scenario": ("scenario", _parse_enum(SCENARIOS)),
    "amplitude": ("amplitude", float),
    "bracket": ("bracket", _parse_bracket),
    "bracket_tol": ("bracket_tol", float),
    "output_dir": ("output_dir", str),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in KEY_TABLE.items()}


def parse_config_text(text: str, source: str = "<config>") -> ExperimentConfig:
    cfg = ExperimentConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEY_TABLE:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigurationError(f"{source}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        attr, parser = KEY_TABLE[key]
        try:
            setattr(cfg, attr, parser(value))
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
    validate_config(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def apply_overrides(cfg: ExperimentConfig, overrides) -> ExperimentConfig:
    """Apply repeatable `key=value` strings on top of a parsed config."""
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form key=value")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEY_TABLE:
            raise ConfigurationError(f"override: unknown key {key!r}")
        attr, parser = KEY_TABLE[key]
        try:
            setattr(cfg, attr, parser(value))
        except ValueError as exc:
            raise ConfigurationError(f"override: bad value for {key}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    if cfg.amplitude <= 0:
        raise ConfigurationError("amplitude must be positive")
    if not cfg.bracket[0] < cfg.bracket[1]:
        raise ConfigurationError("bracket must be ordered")
    if cfg.bracket_tol <= 0:
        raise ConfigurationError("bracket_tol must be positive")
    cfg.model_params()     # surfaces coefficient errors early


def config_text(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        key = _ATTR_TO_KEY[f.name]
        value = getattr(cfg, f.name)
        if f.name == "bracket":
            value = f"{value[0]!r}, {value[1]!r}"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ExperimentConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_text(cfg))
