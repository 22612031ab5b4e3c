"""Readers for the simulator's on-disk formats.

These parse the files directly (magic `RNLS1` snapshots, the diagnostics
CSV, fit-report JSON); the renderer does not import the simulator.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

SNAPSHOT_MAGIC = b"RNLS1"
CSV_HEADER = "t,mass,energy,ell_A,grad_norm_sq,sup_sq,dt,tail_frac,J,J1,J2"
CSV_COLUMNS = CSV_HEADER.split(",")


class ParseError(ValueError):
    """Malformed input file; the message names the byte or line offset."""


@dataclass
class Snapshot:
    points_per_axis: int
    half_width: float
    t: float
    values: np.ndarray      # complex (N, N), row-major


def read_snapshot(path) -> Snapshot:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:5] != SNAPSHOT_MAGIC:
        raise ParseError(f"{path}: bad magic at byte 0: {data[:5]!r}")
    if len(data) < 25:
        raise ParseError(f"{path}: truncated header at byte {len(data)}")
    n = struct.unpack_from("<I", data, 5)[0]
    half_width = struct.unpack_from("<d", data, 9)[0]
    t = struct.unpack_from("<d", data, 17)[0]
    expected = 25 + 16 * n * n
    if len(data) != expected:
        raise ParseError(f"{path}: bad payload length at byte 25: "
                         f"expected {expected} bytes total, got {len(data)}")
    values = np.frombuffer(data, dtype="<c16", offset=25).reshape(n, n)
    return Snapshot(points_per_axis=n, half_width=half_width, t=t, values=values)


@dataclass
class DiagnosticsTable:
    """Column arrays from a diagnostics CSV; optional columns hold NaN."""

    columns: dict

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def has_virial(self) -> bool:
        return not np.all(np.isnan(self.columns["J"]))


def read_diagnostics(path) -> DiagnosticsTable:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: line 1: empty file")
    if lines[0] != CSV_HEADER:
        raise ParseError(f"{path}: line 1: bad header {lines[0]!r}")
    if len(lines) < 2:
        raise ParseError(f"{path}: line 2: no data rows")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ParseError(f"{path}: line {lineno}: expected {len(CSV_COLUMNS)} "
                             f"columns, got {len(parts)}")
        try:
            rows.append([float(s) if s else float("nan") for s in parts])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    arr = np.array(rows)
    return DiagnosticsTable({name: arr[:, i] for i, name in enumerate(CSV_COLUMNS)})


def read_fit_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if "T_hat" not in report:
        raise ParseError(f"{path}: line 1: missing T_hat field")
    return report
