"""Machine-readable outputs: JSON reports, CSV sweep tables and SVG figures."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .classify import Cell
from .integrator import IntegrationReport

__all__ = [
    "CSV_HEADER",
    "RunResult",
    "report_to_json",
    "report_from_json",
    "runs_to_json",
    "runs_from_json",
    "write_csv",
    "render_svg",
    "emit_svg",
    "zero_polylines",
]

CSV_HEADER = ("method", "setting", "error", "time_ms", "n_in", "n_bd", "cr")

CLI_METHOD = {"adaptive": "adaptive", "uniform_L": "uniform-l", "uniform_Q": "uniform-q"}

CELL_STROKE = {"interior": "#2ca02c", "boundary": "#1f77b4", "exterior": "#b0b0b0"}
POINT_FILL = {"interior": "#ff7f0e", "boundary": "#1f77b4"}
CURVE_STROKE = "#d62728"


@dataclass
class RunResult:
    """One integration run with its sweep setting and error (if a reference is known)."""

    report: IntegrationReport
    setting: float
    error: float | None = None

    @property
    def method(self) -> str:
        return CLI_METHOD[self.report.method]

    def to_dict(self) -> dict:
        d = self.report.to_dict()
        d["setting"] = self.setting
        d["error"] = self.error
        return d

    @classmethod
    def from_dict(cls, d: dict) -> RunResult:
        return cls(IntegrationReport.from_dict(d), d["setting"], d.get("error"))


# -- JSON ---------------------------------------------------------------------


def report_to_json(report: IntegrationReport, error: float | None = None, **extra) -> str:
    d = report.to_dict()
    d["error"] = error
    d.update(extra)
    return json.dumps(d, indent=2, sort_keys=True)


def report_from_json(text: str) -> IntegrationReport:
    return IntegrationReport.from_dict(json.loads(text))


def runs_to_json(runs, problem: str | None = None, reference: float | None = None) -> str:
    doc = {"problem": problem, "reference": reference, "runs": [r.to_dict() for r in runs]}
    return json.dumps(doc, indent=2, sort_keys=True)


def runs_from_json(text: str) -> tuple[dict, list[RunResult]]:
    doc = json.loads(text)
    runs = [RunResult.from_dict(d) for d in doc.pop("runs")]
    return doc, runs


# -- CSV ----------------------------------------------------------------------


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def write_csv(runs, path=None) -> str:
    """CSV table, one row per run; written to ``path`` when given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in runs:
        rep = r.report
        setting = int(r.setting) if rep.method != "adaptive" else repr(float(r.setting))
        w.writerow(
            [r.method, setting, _fmt(r.error), f"{rep.elapsed_ms:.3f}", rep.n_interior, rep.n_boundary, repr(rep.cr)]
        )
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# -- SVG ----------------------------------------------------------------------


def zero_polylines(f, bbox: Cell, resolution: int = 512) -> list[np.ndarray]:
    """Display-only polylines of ``f = 0`` by marching squares on a fine grid."""
    from contourpy import contour_generator

    x = np.linspace(bbox.x0, bbox.x1, resolution)
    y = np.linspace(bbox.y0, bbox.y1, resolution)
    X, Y = np.meshgrid(x, y)
    Z = np.asarray(f.eval_array(X, Y), dtype=float)
    gen = contour_generator(x, y, Z, line_type="Separate")
    return [np.asarray(line) for line in gen.lines(0.0) if len(line) > 1]


class _Canvas:
    def __init__(self, bbox: Cell, size: int, margin: int):
        self.bbox = bbox
        self.margin = margin
        aspect = bbox.height / bbox.width
        self.w = size
        self.h = max(1, round(size * aspect))
        self.sx = size / bbox.width
        self.sy = self.h / bbox.height

    def x(self, x) -> float:
        return self.margin + (x - self.bbox.x0) * self.sx

    def y(self, y) -> float:
        return self.margin + (self.bbox.y1 - y) * self.sy


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render_svg(trace, f, bbox: Cell, size: int = 512, margin: int = 8, curve: bool = True) -> str:
    """SVG 1.1 drawing of a traced run: cells stroked by class, integration
    points colored by cell class and the zero curve.  Output depends only on
    the inputs."""
    trace = list(trace or [])
    cv = _Canvas(bbox, size, margin)
    W = cv.w + 2 * margin
    H = cv.h + 2 * margin
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect id="bbox" x="{margin}" y="{margin}" width="{cv.w}" height="{cv.h}" '
        'fill="white" stroke="black" stroke-width="1"/>',
    ]
    drawn = [rec for rec in trace if rec.decision != "subdivided"]
    for cls in ("exterior", "interior", "boundary"):
        rects = [rec.cell for rec in drawn if rec.cls == cls]
        if not rects:
            continue
        out.append(f'<g class="{cls}-cells" fill="none" stroke="{CELL_STROKE[cls]}" stroke-width="0.6">')
        for c in rects:
            out.append(
                f'<rect x="{_num(cv.x(c.x0))}" y="{_num(cv.y(c.y1))}" '
                f'width="{_num(c.width * cv.sx)}" height="{_num(c.height * cv.sy)}"/>'
            )
        out.append("</g>")
    if curve and trace and f is not None:
        out.append(f'<g class="zero-curve" fill="none" stroke="{CURVE_STROKE}" stroke-width="1">')
        for line in zero_polylines(f, bbox):
            pts = " ".join(f"{_num(cv.x(px))},{_num(cv.y(py))}" for px, py in line)
            out.append(f'<polyline points="{pts}"/>')
        out.append("</g>")
    for cls in ("interior", "boundary"):
        pts = [rec.points for rec in drawn if rec.cls == cls and rec.points is not None]
        if not pts:
            continue
        out.append(f'<g class="{cls}-points" fill="{POINT_FILL[cls]}" stroke="none">')
        for px, py in np.vstack(pts):
            out.append(f'<circle cx="{_num(cv.x(px))}" cy="{_num(cv.y(py))}" r="1.2"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(trace, f, bbox: Cell, path, **kwargs) -> str:
    text = render_svg(trace, f, bbox, **kwargs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
