import os

import numpy as np
import pytest

from rnlsfig import ParseError, PlotJob, read_snapshot, render
from rnlsfig.cli import main as cli_main, parse_annotations

from test_formats import make_csv_text, make_snapshot_bytes


@pytest.fixture
def snapshot_path(tmp_path):
    n = 32
    x = np.linspace(-3, 3, n, endpoint=False)
    X, Y = np.meshgrid(x, x, indexing="ij")
    values = (1.7 * np.exp(-(X ** 2 + Y ** 2)) * np.exp(0.3j * X)).astype(complex)
    blob, _ = make_snapshot_bytes(n=n, half_width=3.0, t=1.25, values=values)
    path = tmp_path / "snap.rnls"
    path.write_bytes(blob)
    return path


def test_density_surface(snapshot_path, tmp_path):
    out = tmp_path / "density.png"
    job = PlotJob(inputs=[str(snapshot_path)], kind="density_surface", out=str(out),
                  annotations={"p": 3.0, "gamma1": 1.0, "gamma2": 1.0,
                               "omega": 0.5, "amplitude": 2.5})
    summary = render(job)
    assert out.exists() and out.stat().st_size > 0
    assert "p=3" in summary["title"]
    snap = read_snapshot(snapshot_path)
    assert summary["max_density"] == pytest.approx(np.max(np.abs(snap.values) ** 2),
                                                   abs=1e-12)


def test_invariants_timeseries(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text(make_csv_text(virial=True))
    out = tmp_path / "inv.png"
    summary = render(PlotJob(inputs=[str(csv)], kind="invariants_timeseries",
                             out=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert summary["n_records"] == 50


def test_rate_fit_plot(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text(make_csv_text())
    fit = tmp_path / "fit.json"
    fit.write_text('{"T_hat": 1.0, "window_lo": 0.0, "gbound_slope": 1.33}\n')
    out = tmp_path / "rate.png"
    summary = render(PlotJob(inputs=[str(csv), str(fit)], kind="rate_fit",
                             out=str(out), annotations={"lower": 1.0 / 3.0, "upper": 0.5}))
    assert out.exists() and out.stat().st_size > 0
    assert summary["reference_slopes"] == {"upper": 0.5, "lower": pytest.approx(1 / 3)}


def test_bad_kind_and_empty_inputs(tmp_path):
    with pytest.raises(ValueError):
        PlotJob(inputs=["x"], kind="pie_chart", out="y.png")
    with pytest.raises(ValueError):
        PlotJob(inputs=[], kind="rate_fit", out="y.png")


def test_render_empty_csv_fails(tmp_path):
    csv = tmp_path / "empty.csv"
    csv.write_text("")
    with pytest.raises(ParseError, match="line 1"):
        render(PlotJob(inputs=[str(csv)], kind="invariants_timeseries",
                       out=str(tmp_path / "x.png")))


def test_cli_render(snapshot_path, tmp_path, capsys):
    out = tmp_path / "cli.png"
    rc = cli_main(["render", "--kind", "density_surface", "--in", str(snapshot_path),
                   "--out", str(out), "--annotate", "p=3,omega=0.5,amplitude=2.5"])
    assert rc == 0
    assert out.exists() and out.stat().st_size > 0
    assert "max_density" in capsys.readouterr().out


def test_cli_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.rnls"
    bad.write_bytes(b"JUNK!" + b"\0" * 30)
    rc = cli_main(["render", "--kind", "density_surface", "--in", str(bad),
                   "--out", str(tmp_path / "x.png")])
    assert rc == 1
    assert "byte 0" in capsys.readouterr().err


def test_annotation_grammar():
    ann = parse_annotations("lower=0.3333,upper=0.5")
    assert ann == {"lower": 0.3333, "upper": 0.5}
    with pytest.raises(ValueError):
        parse_annotations("nothing")
    with pytest.raises(ValueError):
        parse_annotations("bogus=1")
