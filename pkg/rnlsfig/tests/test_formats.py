import struct

import numpy as np
import pytest

from rnlsfig import ParseError, read_diagnostics, read_fit_report, read_snapshot

CSV_HEADER = "t,mass,energy,ell_A,grad_norm_sq,sup_sq,dt,tail_frac,J,J1,J2"


def make_snapshot_bytes(n=8, half_width=3.0, t=0.5, values=None):
    if values is None:
        rng = np.random.default_rng(1)
        values = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    blob = b"RNLS1"
    blob += struct.pack("<I", n)
    blob += struct.pack("<d", half_width)
    blob += struct.pack("<d", t)
    blob += np.ascontiguousarray(values, dtype="<c16").tobytes()
    return blob, values


def test_snapshot_round_trip(tmp_path):
    path = tmp_path / "f.rnls"
    blob, values = make_snapshot_bytes()
    path.write_bytes(blob)
    snap = read_snapshot(path)
    assert snap.points_per_axis == 8
    assert snap.half_width == 3.0
    assert snap.t == 0.5
    assert np.array_equal(snap.values, values)


def test_snapshot_bad_magic(tmp_path):
    path = tmp_path / "bad.rnls"
    path.write_bytes(b"XXXXX" + b"\0" * 64)
    with pytest.raises(ParseError, match="byte 0"):
        read_snapshot(path)


def test_snapshot_truncated(tmp_path):
    blob, _ = make_snapshot_bytes()
    path = tmp_path / "t.rnls"
    path.write_bytes(blob[:-5])
    with pytest.raises(ParseError, match="byte 25"):
        read_snapshot(path)


def make_csv_text(n=50, virial=False, collapse_at=None):
    lines = [CSV_HEADER]
    T = 1.0
    for i in range(n):
        t = 0.4 * i / (n - 1)
        g2 = (T - t) ** (-2.0 / 3.0)
        extra = f",{0.5 + 0.01 * t!r},{-0.01 * t!r},{0.002!r}" if virial else ",,,"
        lines.append(f"{t!r},{1.0!r},{2.5!r},{0.0!r},{g2!r},{0.3 + t!r},{1e-3!r},{1e-9!r}"
                     + extra)
    return "\n".join(lines) + "\n"


def test_diagnostics_parse(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(make_csv_text(virial=True))
    table = read_diagnostics(path)
    assert len(table["t"]) == 50
    assert table.has_virial
    assert table["mass"][0] == 1.0


def test_diagnostics_optional_columns(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(make_csv_text(virial=False))
    table = read_diagnostics(path)
    assert not table.has_virial
    assert np.all(np.isnan(table["J"]))


def test_diagnostics_empty_and_bad(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(ParseError, match="line 1"):
        read_diagnostics(empty)
    bad = tmp_path / "b.csv"
    bad.write_text(CSV_HEADER + "\n1,2,3\n")
    with pytest.raises(ParseError, match="line 2"):
        read_diagnostics(bad)
    noheader = tmp_path / "h.csv"
    noheader.write_text("a,b,c\n")
    with pytest.raises(ParseError, match="line 1"):
        read_diagnostics(noheader)


def test_fit_report(tmp_path):
    path = tmp_path / "fit.json"
    path.write_text('{"T_hat": 0.87, "gbound_slope": 1.3}\n')
    assert read_fit_report(path)["T_hat"] == 0.87
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError, match="line"):
        read_fit_report(bad)
    missing = tmp_path / "m.json"
    missing.write_text('{"kappa_hat": 1.0}')
    with pytest.raises(ParseError, match="T_hat"):
        read_fit_report(missing)
