"""File formats: diagnostics CSV, bit-exact field snapshots, report JSON.

Snapshot layout: magic `RNLS1` (5 bytes), then little-endian u32
points_per_axis, f64 half_width, f64 t, then points_per_axis^2 complex
samples as interleaved little-endian f64 (re, im), row-major.
"""

from __future__ import annotations

import json
import struct
from typing import List

import numpy as np

from .diagnostics import DiagnosticsRecord
from .grid import Field, make_grid

CSV_HEADER = "t,mass,energy,ell_A,grad_norm_sq,sup_sq,dt,tail_frac,J,J1,J2"
SNAPSHOT_MAGIC = b"RNLS1"


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def diagnostics_csv_lines(records: List[DiagnosticsRecord]):
    yield CSV_HEADER + "\n"
    for r in records:
        yield (f"{_fmt(r.t)},{_fmt(r.mass)},{_fmt(r.energy)},{_fmt(r.ell_A)},"
               f"{_fmt(r.grad_norm_sq)},{_fmt(r.sup_sq)},{_fmt(r.dt)},{_fmt(r.tail_frac)},"
               f"{_fmt(r.J)},{_fmt(r.J1)},{_fmt(r.J2)}\n")


def write_diagnostics_csv(path, records: List[DiagnosticsRecord]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.writelines(diagnostics_csv_lines(records))


def read_diagnostics_csv(path) -> List[DiagnosticsRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}:1: bad diagnostics header {header!r}")
        records = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 11:
                raise ValueError(f"{path}:{lineno}: expected 11 columns, got {len(parts)}")
            opt = [None if s == "" else float(s) for s in parts[8:]]
            records.append(DiagnosticsRecord(
                t=float(parts[0]), mass=float(parts[1]), energy=float(parts[2]),
                ell_A=float(parts[3]), grad_norm_sq=float(parts[4]), sup_sq=float(parts[5]),
                dt=float(parts[6]), tail_frac=float(parts[7]),
                J=opt[0], J1=opt[1], J2=opt[2]))
    return records


def write_snapshot(path, f: Field, t: float):
    n = f.grid.points_per_axis
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", n))
        fh.write(struct.pack("<d", f.grid.half_width))
        fh.write(struct.pack("<d", float(t)))
        fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())


def read_snapshot(path):
    """Returns (Field, t). Raises ValueError naming the byte offset on malformed input."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:5] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic at byte 0: {data[:5]!r}")
    if len(data) < 5 + 4 + 8 + 8:
        raise ValueError(f"{path}: truncated header at byte {len(data)}")
    n = struct.unpack_from("<I", data, 5)[0]
    half_width = struct.unpack_from("<d", data, 9)[0]
    t = struct.unpack_from("<d", data, 17)[0]
    expected = 25 + 16 * n * n
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, got {len(data)} (payload at byte 25)")
    values = np.frombuffer(data, dtype="<c16", offset=25).reshape(n, n).astype(np.complex128)
    return Field(make_grid(half_width, n), values), t


def write_report_json(path, report: dict):
    """Flat {suite: {pass, measured, threshold}} report."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
