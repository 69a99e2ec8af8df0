import csv
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest

from implicitquad import __version__
from implicitquad.classify import Cell
from implicitquad.cli import main
from implicitquad.integrator import IntegrationConfig, integrate
from implicitquad.problem import ProblemSpec, bundled_problems, load_problem
from implicitquad.report import (
    CSV_HEADER,
    RunResult,
    emit_svg,
    render_svg,
    report_from_json,
    report_to_json,
    runs_from_json,
    runs_to_json,
    write_csv,
    zero_polylines,
)

from oracles import ANNULUS, annulus_area, cardioid_area, cassini_area

SVG = "{http://www.w3.org/2000/svg}"


def test_bundled_problems():
    assert bundled_problems() == ["annulus", "annulus_poly", "cardioid", "cassini", "cassini_poly", "spline"]
    a = load_problem("annulus")
    assert a.reference == pytest.approx(annulus_area(), rel=1e-15)
    assert a.tolerances == (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    assert load_problem("cassini").reference == pytest.approx(cassini_area(), abs=1e-12)
    card = load_problem("cardioid")
    assert card.reference == pytest.approx(cardioid_area(), rel=1e-12)
    assert set(card.singular_splits) == {("x", 0.0), ("y", 0.0)}
    sp = load_problem("spline")
    assert sp.reference == "oracle" and sp.function.is_spline


def test_problem_from_path(tmp_path):
    p = tmp_path / "disk.ini"
    p.write_text("[problem]\nname = disk\ndomain = 1 - x^2 - y^2 ; unit disk\nbbox = -1 1 -1 1\nreference = 3.141592653589793\n")
    spec = load_problem(p)
    rep = spec.integrate(tau=1e-6)
    assert abs(rep.value - math.pi) < 1e-6


def test_problem_validation(tmp_path):
    with pytest.raises(ValueError):
        ProblemSpec("x", domain="x", bbox=(1, 0, 0, 1))
    with pytest.raises(ValueError):
        ProblemSpec("x", domain="x", spline=str(tmp_path / "s.ini"))
    with pytest.raises(FileNotFoundError):
        ProblemSpec("x", spline=str(tmp_path / "missing.ini"))
    with pytest.raises((OSError, ValueError)):
        load_problem("no_such_problem")


def test_oracle_reference_is_cached():
    spec = load_problem("spline")
    spec = replace(spec, oracle_tol=1e-4)
    a = spec.reference_value()
    assert spec.reference_value() == a


def test_cli_annulus_csv(tmp_path, capsys):
    out = tmp_path / "a.csv"
    assert main(["--problem", "annulus", "--emit-csv", str(out), "--deterministic"]) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 7
    for r in rows[1:]:
        assert float(r[2]) < float(r[1])
        assert r[3] == "0.000"
    assert "adaptive" in capsys.readouterr().out


def test_cli_rows_are_tolerances_times_methods(tmp_path):
    out = tmp_path / "m.csv"
    argv = ["--problem", "annulus", "--tol", "1e-1", "1e-2", "--method", "adaptive", "uniform-l", "uniform-q",
            "--emit-csv", str(out), "-q"]
    assert main(argv) == 0
    rows = list(csv.reader(out.open()))[1:]
    assert len(rows) == 2 * 3
    assert [r[0] for r in rows] == ["adaptive"] * 2 + ["uniform-l"] * 2 + ["uniform-q"] * 2
    assert all(float(r[2]) < tol for r, tol in zip(rows, [1e-1, 1e-2] * 3))


def test_cli_levels(tmp_path):
    out = tmp_path / "l.csv"
    assert main(["--problem", "annulus", "--method", "uniform-q", "--level", "2", "3", "--emit-csv", str(out), "-q"]) == 0
    rows = list(csv.reader(out.open()))[1:]
    assert [r[1] for r in rows] == ["2", "3"]


def test_cli_cassini_corners(capsys):
    assert main(["--problem", "cassini", "--classifier", "corners", "--tol", "1e-6", "--report", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    run = doc["runs"][0]
    assert run["value"] == 0.0
    assert any("topology" in w for w in run["warnings"])
    for key in ("value", "error", "n_interior", "n_boundary", "cr", "residual_bound", "elapsed_ms", "warnings"):
        assert key in run


def test_cli_inline_domain(tmp_path):
    rep = tmp_path / "r.json"
    argv = ["--domain", "1 - x^2 - y^2", "--bbox", "-1", "1", "-1", "1", "--tol", "1e-5",
            "--reference", str(math.pi), "--report", str(rep), "-q"]
    assert main(argv) == 0
    doc = json.loads(rep.read_text())
    assert doc["runs"][0]["error"] < 1e-5


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["--domain", "x +* y", "--bbox", "0", "1", "0", "1"],
        ["--domain", "x"],
        ["--problem", "annulus", "--splits", "x=5"],
        ["--problem", "annulus", "--method", "uniform-q", "--reference", "oracle", "--oracle-tol", "-1"],
        ["--domain", "x", "--bbox", "0", "1", "0", "1", "--method", "uniform-l"],
        ["--problem", "nope"],
    ],
)
def test_cli_config_errors(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_argparse_errors():
    with pytest.raises(SystemExit) as info:
        main(["--method", "simpson"])
    assert info.value.code == 2


def test_cli_io_error(tmp_path, capsys):
    bad = tmp_path / "missing" / "out.csv"
    assert main(["--problem", "annulus", "--tol", "1e-1", "--emit-csv", str(bad), "-q"]) == 1
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "implicitquad", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
    out = subprocess.run([sys.executable, "-m", "implicitquad", "--list-problems"], capture_output=True, text=True)
    assert out.stdout.split() == bundled_problems()


def test_json_round_trip():
    rep = integrate(ANNULUS, "1", (-1, 1, -1, 1), tau=1e-3, max_depth=4)
    again = report_from_json(report_to_json(rep, error=1e-4))
    assert again == replace(rep, trace=None)
    runs = [RunResult(rep, 1e-3, 2e-5)]
    meta, back = runs_from_json(runs_to_json(runs, "annulus", annulus_area()))
    assert meta == {"problem": "annulus", "reference": annulus_area()}
    assert back[0].report == rep and back[0].error == 2e-5 and back[0].setting == 1e-3


def test_csv_rows():
    reps = [integrate(ANNULUS, "1", (-1, 1, -1, 1), tau=t) for t in (1e-1, 1e-2)]
    text = write_csv([RunResult(r, r.tau, None) for r in reps])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 3
    assert lines[1].split(",")[2] == ""


@pytest.fixture(scope="module")
def annulus_trace():
    return integrate(ANNULUS, "1", (-1, 1, -1, 1), tau=1e-3, trace=True)


def test_svg_is_deterministic(tmp_path, annulus_trace):
    f = load_problem("annulus").function
    box = Cell(-1, 1, -1, 1)
    a = emit_svg(annulus_trace.trace, f, box, tmp_path / "a.svg")
    again = integrate(ANNULUS, "1", (-1, 1, -1, 1), tau=1e-3, trace=True)
    b = emit_svg(again.trace, f, box, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert a == b
    ET.fromstring(a)


def test_svg_empty_trace():
    root = ET.fromstring(render_svg([], None, Cell(0, 2, 0, 1)))
    assert root.get("version") == "1.1"
    kids = list(root)
    assert len(kids) == 1 and kids[0].get("id") == "bbox"


def test_boundary_cells_touch_the_curve(annulus_trace):
    f = load_problem("annulus").function
    box = Cell(-1, 1, -1, 1)
    pts = np.vstack(zero_polylines(f, box))
    pad = 2 * box.width / 511
    for rec in annulus_trace.trace:
        if rec.cls != "boundary" or rec.decision == "subdivided":
            continue
        c = rec.cell
        inside = (
            (pts[:, 0] >= c.x0 - pad) & (pts[:, 0] <= c.x1 + pad)
            & (pts[:, 1] >= c.y0 - pad) & (pts[:, 1] <= c.y1 + pad)
        )
        assert inside.any(), c


def test_spline_svg_two_point_colors(tmp_path):
    assert main(["--problem", "spline", "--tol", "1e-2", "--reference", "0.7726609", "--emit-svg",
                 str(tmp_path / "s.svg"), "-q"]) == 0
    root = ET.parse(tmp_path / "s.svg").getroot()
    groups = {g.get("class"): g for g in root.iter(SVG + "g")}
    assert {"interior-cells", "boundary-cells", "interior-points", "boundary-points", "zero-curve"} <= set(groups)
    assert groups["interior-points"].get("fill") != groups["boundary-points"].get("fill")
    assert len(groups["interior-points"]) > 0 and len(groups["boundary-points"]) > 0
