"""Plot rendering for snapshot and diagnostics files."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .formats import read_diagnostics, read_fit_report, read_snapshot

KINDS = ("density_surface", "invariants_timeseries", "rate_fit")

# fixed rendering defaults, for reproducibility
CMAP = "viridis"
SURFACE_VIEW = dict(elev=35, azim=-60)
FIGSIZE = (7.0, 5.5)
DPI = 130


@dataclass
class PlotJob:
    inputs: List[str]
    kind: str
    out: str
    annotations: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("job needs at least one input path")


def _annotation_title(ann: dict) -> str:
    parts = []
    if "p" in ann:
        parts.append(f"p={ann['p']:g}")
    if "gamma1" in ann and "gamma2" in ann:
        parts.append(f"gamma=({ann['gamma1']:g},{ann['gamma2']:g})")
    if "omega" in ann:
        parts.append(f"Omega={ann['omega']:g}")
    if "amplitude" in ann:
        parts.append(f"C={ann['amplitude']:g}")
    return ", ".join(parts)


def _render_density(job: PlotJob) -> dict:
    snap = read_snapshot(job.inputs[0])
    density = np.abs(snap.values) ** 2
    max_density = float(np.max(density))
    x = -snap.half_width + 2.0 * snap.half_width / snap.points_per_axis \
        * np.arange(snap.points_per_axis)
    X, Y = np.meshgrid(x, x, indexing="ij")

    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_subplot(111, projection="3d")
    stride = max(1, snap.points_per_axis // 128)
    surf = ax.plot_surface(X[::stride, ::stride], Y[::stride, ::stride],
                           density[::stride, ::stride], cmap=CMAP,
                           linewidth=0, antialiased=False)
    ax.view_init(**SURFACE_VIEW)
    fig.colorbar(surf, shrink=0.6)
    extra = _annotation_title(job.annotations)
    title = f"|psi|^2 at t={snap.t:.4g} (max {max_density:.6g})"
    if extra:
        title = f"{title}\n{extra}"
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.savefig(job.out)
    plt.close(fig)
    return {"out": job.out, "kind": job.kind, "max_density": max_density,
            "t": snap.t, "title": title}


def _render_invariants(job: PlotJob) -> dict:
    table = read_diagnostics(job.inputs[0])
    t = table["t"]
    fig, axes = plt.subplots(2, 2, figsize=FIGSIZE, dpi=DPI, sharex=True)
    panels = [("mass", axes[0, 0]), ("energy", axes[0, 1]),
              ("ell_A", axes[1, 0]), ("grad_norm_sq", axes[1, 1])]
    for name, ax in panels:
        ax.plot(t, table[name], lw=1.0)
        ax.set_title(name)
        ax.grid(alpha=0.3)
    if table.has_virial:
        axes[1, 1].clear()
        axes[1, 1].plot(t, table["J"], lw=1.0, label="J")
        axes[1, 1].plot(t, table["J1"], lw=1.0, label="J'")
        axes[1, 1].legend(fontsize=8)
        axes[1, 1].set_title("virial")
        axes[1, 1].grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("t")
    fig.suptitle(_annotation_title(job.annotations) or "invariants")
    fig.tight_layout()
    fig.savefig(job.out)
    plt.close(fig)
    return {"out": job.out, "kind": job.kind, "n_records": len(t),
            "mass_drift": float(np.max(np.abs(table["mass"] - table["mass"][0])))}


def _accumulate_g(t, grad_sq, T_hat):
    """g(t) = int_t^{t_last} (T_hat - s) ||grad u||^2 ds by reverse trapezoid."""
    w = (T_hat - t) * grad_sq
    seg = 0.5 * (w[1:] + w[:-1]) * np.diff(t)
    return np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])


def _render_rate_fit(job: PlotJob) -> dict:
    table = read_diagnostics(job.inputs[0])
    fit = read_fit_report(job.inputs[1]) if len(job.inputs) > 1 else {}
    T_hat = float(fit.get("T_hat", job.annotations.get("T", np.nan)))
    if not np.isfinite(T_hat):
        raise ValueError("rate_fit needs a fit report or a T annotation")
    t = table["t"]
    keep = (t < T_hat) & np.isfinite(table["grad_norm_sq"])
    lo = float(fit.get("window_lo", t[keep][0]))
    keep &= t >= lo
    tt = t[keep]
    g = _accumulate_g(tt, table["grad_norm_sq"][keep], T_hat)
    pos = g > 0
    logx = np.log(T_hat - tt[pos])
    logg = np.log(g[pos])

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.plot(logx, logg, ".", ms=3, label="g(t)")
    refs = {}
    for key, style in (("upper", "--"), ("lower", ":")):
        if key in job.annotations:
            slope = float(job.annotations[key])
            refs[key] = slope
            anchor = logg[len(logg) // 2] - slope * logx[len(logx) // 2]
            ax.plot(logx, slope * logx + anchor, style, label=f"slope {slope:g} ({key})")
    ax.set_xlabel("log(T_hat - t)")
    ax.set_ylabel("log g(t)")
    title = f"space-time bound fit, T_hat={T_hat:.5g}"
    if "gbound_slope" in fit:
        title += f", measured slope {fit['gbound_slope']:.4g}"
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(job.out)
    plt.close(fig)
    return {"out": job.out, "kind": job.kind, "T_hat": T_hat,
            "reference_slopes": refs, "n_points": int(np.sum(pos))}


def render(job: PlotJob) -> dict:
    """Render one job; returns a summary including the values drawn into the
    annotations (e.g. max_density equals the snapshot's computed maximum)."""
    if job.kind == "density_surface":
        return _render_density(job)
    if job.kind == "invariants_timeseries":
        return _render_invariants(job)
    return _render_rate_fit(job)
