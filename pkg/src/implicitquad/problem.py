"""Problem definition files.

A problem file is INI text with a ``[problem]`` section::

    [problem]
    name = annulus
    domain = 0.04 - (sqrt(x^2 + y^2) - 0.6)^2     ; or: spline = surface.ini
    integrand = 1
    bbox = -1 1 -1 1
    splits = x=0 y=0
    reference = 1.5079644737231006                ; or: oracle
    oracle_tol = 1e-8
    tolerances = 1e-2 1e-4
    enclosure = natural

Relative spline paths resolve against the problem file's directory.  The
bundled fixtures are available by name (``load_problem("cardioid")``).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

from .classify import Cell
from .implicit import ImplicitFunction
from .integrator import IntegrationConfig, integrate, parse_split

__all__ = ["ProblemSpec", "load_problem", "bundled_problems", "DEFAULT_ORACLE_TOL"]

DEFAULT_ORACLE_TOL = 1e-8


def _fixture_dir() -> Path:
    return Path(str(resources.files("implicitquad") / "fixtures"))


def bundled_problems() -> list[str]:
    """Names of the problem files shipped with the package."""
    return sorted(p.stem for p in _fixture_dir().glob("*.ini") if "[problem]" in p.read_text())


@dataclass
class ProblemSpec:
    name: str
    domain: str | None = None
    spline: str | None = None
    integrand: str = "1"
    bbox: tuple = (0.0, 1.0, 0.0, 1.0)
    singular_splits: tuple = ()
    reference: float | str | None = None
    oracle_tol: float = DEFAULT_ORACLE_TOL
    tolerances: tuple = ()
    enclosure: str | None = None
    source: str | None = field(default=None, compare=False)
    _oracle: float | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if (self.domain is None) == (self.spline is None):
            raise ValueError(f"problem {self.name!r}: give exactly one of domain / spline")
        x0, x1, y0, y1 = (float(v) for v in self.bbox)
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"problem {self.name!r}: bbox {self.bbox} is not well ordered")
        self.bbox = (x0, x1, y0, y1)
        self.singular_splits = tuple(parse_split(s) for s in self.singular_splits)
        if isinstance(self.reference, str) and self.reference != "oracle":
            self.reference = float(self.reference)
        if self.spline is not None and not Path(self.spline).is_file():
            raise FileNotFoundError(f"problem {self.name!r}: spline file {self.spline} not found")
        self.tolerances = tuple(float(t) for t in self.tolerances)

    @cached_property
    def function(self) -> ImplicitFunction:
        if self.spline is not None:
            return ImplicitFunction.from_spline(self.spline)
        return ImplicitFunction.from_expression(self.domain)

    @cached_property
    def integrand_function(self) -> ImplicitFunction:
        return ImplicitFunction.from_expression(self.integrand)

    @property
    def cell(self) -> Cell:
        return Cell(*self.bbox)

    def config(self, base: IntegrationConfig | None = None, **overrides) -> IntegrationConfig:
        """``base`` with this problem's splits (and enclosure, unless overridden)."""
        base = base or IntegrationConfig()
        opts = {"singular_splits": self.singular_splits}
        if self.enclosure is not None:
            opts["enclosure"] = self.enclosure
        opts.update(overrides)
        return replace(base, **opts)

    def integrate(self, cfg: IntegrationConfig | None = None, **overrides):
        return integrate(self.function, self.integrand_function, self.cell, self.config(cfg, **overrides))

    def reference_value(self, base: IntegrationConfig | None = None) -> float | None:
        """Analytic reference, an adaptive oracle run, or None."""
        if self.reference is None or isinstance(self.reference, float):
            return self.reference
        if self._oracle is None:
            self._oracle = self.integrate(base, method="adaptive", tau=self.oracle_tol).value
        return self._oracle


def _split_words(text: str) -> list[str]:
    return text.replace(",", " ").split()


def load_problem(path_or_name) -> ProblemSpec:
    """Read a problem file, or a bundled fixture by name."""
    path = Path(path_or_name)
    if not path.is_file():
        candidate = _fixture_dir() / f"{path_or_name}.ini"
        if not candidate.is_file():
            raise FileNotFoundError(f"no problem file or bundled problem named {path_or_name!r}")
        path = candidate
    cp = configparser.ConfigParser(inline_comment_prefixes=(";",))
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    if "problem" not in cp:
        raise ValueError(f"{path}: missing [problem] section")
    sec = cp["problem"]
    spline = sec.get("spline")
    if spline is not None:
        spline = str((path.parent / spline).resolve())
    bbox = [float(v) for v in _split_words(sec.get("bbox", "0 1 0 1"))]
    if len(bbox) != 4:
        raise ValueError(f"{path}: bbox needs four numbers")
    return ProblemSpec(
        name=sec.get("name", path.stem),
        domain=sec.get("domain"),
        spline=spline,
        integrand=sec.get("integrand", "1"),
        bbox=tuple(bbox),
        singular_splits=tuple(_split_words(sec.get("splits", ""))),
        reference=sec.get("reference"),
        oracle_tol=sec.getfloat("oracle_tol", DEFAULT_ORACLE_TOL),
        tolerances=tuple(_split_words(sec.get("tolerances", ""))),
        enclosure=sec.get("enclosure"),
        source=str(path),
    )
