"""Parameter sweeps, the Table-2 style comparison and the property suite."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass

import numpy as np

from ..bounds import compute_bounds
from ..geometry import ConvexPolygon, inner_profile, measure
from ..inequalities import FunctionalSuite, functional_suite, verify
from ..pde import solve_functionals
from .families import DEFAULT_RESOLUTION, FamilySpec, random_polygon, realize, regular_polygon, rectangle, stadium, table2_values

BASE_COLUMNS = ("param", "alpha", "beta", "F1", "F2", "F3", "F4", "gap1", "gap2", "gap3", "gap4")
_RATIO = re.compile(r"^(\w+)/(alpha|beta|param)(?:\^(\d+(?:\.\d+)?))?$")


class SweepError(RuntimeError):
    def __init__(self, param, cause: Exception):
        super().__init__(f"sweep failed at parameter {param!r}: {cause}")
        self.param = param


def evaluate(shape, fem_tol: float = 1e-8) -> FunctionalSuite:
    """Functionals of a polygon (via FEM) or of a closed-form record."""
    if isinstance(shape, ConvexPolygon):
        return functional_suite(measure(shape), solve_functionals(shape, fem_tol))
    return functional_suite(shape)


def _row(param, s: FunctionalSuite) -> dict:
    g = s.gaps
    return {
        "param": float(param),
        "alpha": s.alpha,
        "beta": s.beta,
        "F1": s.F1,
        "F2": s.F2,
        "F3": s.F3,
        "F4": s.F4,
        "gap1": g[0],
        "gap2": g[1],
        "gap3": g[2],
        "gap4": g[3],
    }


def _ratio(row: dict, expr: str) -> float:
    m = _RATIO.match(expr)
    if not m or m.group(1) not in row:
        raise ValueError(f"bad ratio {expr!r}; expected e.g. gap1/alpha or gap2/beta^4")
    k = float(m.group(3) or 1)
    return row[m.group(1)] / row[m.group(2)] ** k


def _template(family: str) -> str:
    return family if "{}" in family else family + ":{}"


def sweep_rows(
    family: str,
    param_values,
    quantities=(),
    fem_tol: float = 1e-8,
    boundary_resolution: int = DEFAULT_RESOLUTION,
) -> list[dict]:
    """One row per parameter value; ``family`` is a spec with a ``{}`` placeholder."""
    values = sorted(float(v) for v in param_values)
    if len(values) < 2:
        raise ValueError("a sweep needs at least two parameter values")
    for q in quantities:
        m = _RATIO.match(q)
        if not m or m.group(1) not in BASE_COLUMNS:
            raise ValueError(f"bad ratio {q!r}; expected e.g. gap1/alpha or gap2/beta^4")
    template = _template(family)
    rows = []
    for v in values:
        try:
            spec = FamilySpec.parse(template.format(repr(v)), boundary_resolution)
            row = _row(v, evaluate(realize(spec), fem_tol))
            for q in quantities:
                row[q] = _ratio(row, q)
        except Exception as exc:  # any pipeline failure aborts the sweep with the offending value
            raise SweepError(v, exc) from exc
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    fields = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: repr(float(v)) for k, v in r.items()})
    return buf.getvalue()


def sweep(family: str, param_values, quantities=(), **kwargs) -> str:
    """CSV text for :func:`sweep_rows`."""
    return rows_to_csv(sweep_rows(family, param_values, quantities, **kwargs))


# ---------------------------------------------------------------------------
# table 2


TABLE2_PARAMS = {
    "thinning_box": (0.2, 0.1, 0.05),
    "sector": (0.4, 0.2, 0.1),
    "ellipse": (0.2, 0.1, 0.05),
}
EXACT_TOL = 1e-4


def _computed(poly: ConvexPolygon, fem_tol: float) -> dict:
    m = measure(poly)
    f = solve_functionals(poly, fem_tol)
    return {
        "area": m.area,
        "perimeter": m.perimeter,
        "inradius": m.inradius,
        "width": m.min_width,
        "diameter": m.diameter,
        "torsion": f.torsion,
        "lambda1": f.lambda1,
    }


def table2_report(fem_tol: float = 1e-8, params: dict | None = None) -> dict:
    """Pipeline values against the closed forms for the three thin families (plane case).

    Asymptotic entries are judged with relative tolerance ``10 * param``,
    exact ones with ``1e-4``.
    """
    params = TABLE2_PARAMS if params is None else params
    comparisons = []
    for kind, values in params.items():
        for p in values:
            spec = f"thinning_box:2:{p!r}" if kind == "thinning_box" else f"{kind}:{p!r}"
            computed = _computed(realize(spec), fem_tol)
            formula = table2_values(kind, p)
            for q in formula.QUANTITIES:
                target = getattr(formula, q)
                kind_q = formula.kinds.get(q, "exact")
                tol = 10 * p if kind_q == "asymptotic" else EXACT_TOL
                rel = abs(computed[q] - target) / abs(target)
                comparisons.append(
                    {
                        "family": kind,
                        "param": p,
                        "quantity": q,
                        "computed": computed[q],
                        "formula": target,
                        "kind": kind_q,
                        "rel_error": rel,
                        "tol": tol,
                        "pass": bool(rel <= tol),
                    }
                )
    return {"pass": all(c["pass"] for c in comparisons), "comparisons": comparisons}


# ---------------------------------------------------------------------------
# property suite


def fixed_shapes() -> list[tuple[str, ConvexPolygon]]:
    shapes = [
        ("unit_square", rectangle(1.0, 1.0)),
        ("equilateral_triangle", ConvexPolygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])),
        ("disk_256", regular_polygon(256, 1.0)),
    ]
    shapes += [(f"rectangle_1x{a}", rectangle(1.0, a)) for a in (0.5, 0.2, 0.1, 0.05)]
    shapes += [(f"regular_{k}gon", regular_polygon(k, 1.0)) for k in range(3, 13)]
    return shapes


def random_shapes(n: int, n_points: int = 30) -> list[tuple[str, ConvexPolygon]]:
    return [(f"random_polygon:{seed}:{n_points}", random_polygon(seed, n_points)) for seed in range(n)]


STADIUM_RESOLUTION = 8192


def stadium_deviation(l: float = 1.0, r: float = 0.25, resolution: int = STADIUM_RESOLUTION) -> float:
    """Largest ``|P(t) - (P - 2 pi t)| / P`` over the profile of an inscribed stadium.

    The inscribed arcs sit ``r (1 - cos(pi / resolution))`` inside the true
    ones, which leaves a thin sliver that collapses with a steep perimeter
    slope just below ``t = r``.  The deviation is about ``0.44 / resolution``.
    """
    prof = inner_profile(stadium(l, r, resolution))
    return float(np.max(np.abs(prof.per - (prof.perimeter - 2 * math.pi * prof.t))) / prof.perimeter)


@dataclass(frozen=True)
class SuiteResult:
    reports: tuple
    stadium_deviation: float
    stadium_tol: float = 1e-4

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports) and self.stadium_deviation < self.stadium_tol

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "shapes": [
                {"shape": r.shape, "pass": r.passed, "failures": [e.id for e in r.failures]} for r in self.reports
            ],
            "stadium": {"max_rel_deviation": self.stadium_deviation, "tol": self.stadium_tol},
        }


def run_suite(n_random: int, tolerance: float = 1e-9, include_fixed: bool = True, fem_tol: float = 1e-8) -> SuiteResult:
    shapes = (fixed_shapes() if include_fixed else []) + random_shapes(n_random)
    reports = tuple(verify(poly, tolerance, label=label, fem_tol=fem_tol) for label, poly in shapes)
    return SuiteResult(reports, stadium_deviation())


def compute(shape, fem_tol: float = 1e-8, label: str = "") -> dict:
    """Everything known about one shape, as a JSON-ready dict."""
    if isinstance(shape, ConvexPolygon):
        m = measure(shape)
        f = solve_functionals(shape, fem_tol)
        return {
            "shape": label,
            "measurements": m.to_dict(),
            "functionals": f.to_dict(),
            "bounds": compute_bounds(shape).to_dict(),
            "suite": functional_suite(m, f).to_dict(),
        }
    return {"shape": label or shape.label, "closed_form": shape.to_dict(), "suite": functional_suite(shape).to_dict()}
