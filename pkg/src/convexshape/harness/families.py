"""Parametric shape families, including the thinning box, narrow sector and narrow ellipse."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..geometry import ConvexPolygon, DegeneratePolygonError

DEFAULT_RESOLUTION = 512

# number of numeric parameters per kind (triangle takes a coordinate list)
KINDS = {
    "thinning_box": 2,
    "sector": 1,
    "ellipse": 1,
    "rectangle": 2,
    "disk": 1,
    "regular_polygon": 2,
    "triangle": 1,
    "stadium": 2,
    "random_polygon": 2,
}


class ClosedFormOnlyError(ValueError):
    code = "closed_form_only"

    def __init__(self, detail: str = ""):
        super().__init__(f"closed_form_only: {detail}" if detail else "closed_form_only")


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: tuple = ()
    boundary_resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {sorted(KINDS)}")
        if len(self.params) != KINDS[self.kind]:
            raise ValueError(f"{self.kind} takes {KINDS[self.kind]} parameter(s), got {len(self.params)}")
        if self.boundary_resolution < 8:
            raise ValueError("boundary_resolution must be at least 8")
        p = self.params
        if self.kind == "triangle":
            if len(p[0]) != 6:
                raise ValueError("triangle needs six coordinates x0,y0,x1,y1,x2,y2")
            return
        if any(not (isinstance(x, (int, float)) and math.isfinite(x)) for x in p):
            raise ValueError("parameters must be finite numbers")
        if self.kind == "random_polygon":
            if p[1] < 4:
                raise ValueError("random_polygon needs at least 4 points")
            return
        if self.kind == "stadium":
            if p[0] < 0 or p[1] <= 0:
                raise ValueError("stadium needs l >= 0 and r > 0")
            return
        if any(x <= 0 for x in p):
            raise ValueError("parameters must be strictly positive")
        if self.kind == "sector" and not p[0] < math.pi:
            raise ValueError("sector angle must lie in (0, pi)")
        if self.kind == "ellipse" and p[0] > 1:
            raise ValueError("ellipse semi-axis b must lie in (0, 1]")
        if self.kind == "thinning_box" and (p[0] < 2 or p[0] != int(p[0])):
            raise ValueError("thinning_box dimension must be an integer >= 2")
        if self.kind == "regular_polygon" and (p[0] < 3 or p[0] != int(p[0])):
            raise ValueError("regular_polygon needs an integer k >= 3")

    @classmethod
    def parse(cls, text: str, boundary_resolution: int = DEFAULT_RESOLUTION) -> FamilySpec:
        """Parse ``kind:p1:p2`` (for example ``rectangle:1:0.1`` or ``triangle:0,0,1,0,0,1``)."""
        parts = text.strip().split(":")
        kind, raw = parts[0], parts[1:]
        if kind not in KINDS:
            raise ValueError(f"unknown family {kind!r}; expected one of {sorted(KINDS)}")
        try:
            if kind == "triangle":
                params = tuple(tuple(float(x) for x in r.split(",")) for r in raw)
            elif kind in ("random_polygon", "thinning_box", "regular_polygon"):
                params = tuple(_int_or_float(r) for r in raw)
            else:
                params = tuple(float(r) for r in raw)
        except ValueError as exc:
            raise ValueError(f"malformed family spec {text!r}: {exc}") from None
        return cls(kind, params, boundary_resolution)

    @property
    def label(self) -> str:
        if self.kind == "triangle":
            return "triangle:" + ",".join(_fmt(x) for x in self.params[0])
        return ":".join([self.kind, *(_fmt(x) for x in self.params)])

    @property
    def is_polygonal(self) -> bool:
        return not (self.kind == "thinning_box" and self.params[0] >= 3)


def _int_or_float(s: str):
    v = float(s)
    return int(v) if v == int(v) and "." not in s and "e" not in s.lower() else v


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


@dataclass(frozen=True)
class ClosedFormValues:
    """Exact or asymptotic values of the scalar functionals of one family member.

    ``kinds`` maps each quantity to ``"exact"`` or ``"asymptotic"``;
    asymptotic values become exact only in the thinning limit.
    """

    label: str
    dim: int
    area: float
    perimeter: float
    inradius: float
    width: float
    diameter: float
    torsion: float
    lambda1: float
    kinds: dict = field(default_factory=dict)
    note: str = ""
    inner_fn: Callable | None = field(default=None, repr=False, compare=False)

    QUANTITIES = ("area", "perimeter", "inradius", "width", "diameter", "torsion", "lambda1")

    def inner(self, t):
        """``(mu(t), P(t))`` of the inner parallel sets, where known in closed form."""
        if self.inner_fn is None:
            raise ClosedFormOnlyError(f"no inner parallel sets for {self.label}")
        return self.inner_fn(np.asarray(t, dtype=float))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            **{q: {"value": getattr(self, q), "kind": self.kinds.get(q, "exact")} for q in self.QUANTITIES},
            "note": self.note,
        }


def thinning_box_values(n: int, a: float) -> ClosedFormValues:
    """``[0,1]^(n-1) x [0,a]``; the torsion is the slab value and so only asymptotic."""

    def inner(t):
        s = 1 - 2 * t
        mu = s ** (n - 1) * (a - 2 * t)
        per = 2 * s ** (n - 1) + 2 * (n - 1) * s ** (n - 2) * (a - 2 * t)
        return mu, per

    exact = dict.fromkeys(ClosedFormValues.QUANTITIES, "exact")
    exact["torsion"] = "asymptotic"
    return ClosedFormValues(
        label=f"thinning_box:{n}:{_fmt(a)}",
        dim=n,
        area=a,
        perimeter=2 + 2 * (n - 1) * a,
        inradius=a / 2,
        width=a,
        diameter=math.sqrt(n - 1 + a * a),
        torsion=a**3 / 12,
        lambda1=math.pi**2 * (n - 1 + 1 / a**2),
        kinds=exact,
        note="torsion a^3/12 is the slab value, approached as a -> 0",
        inner_fn=inner,
    )


def sector_values(theta: float) -> ClosedFormValues:
    asym = dict.fromkeys(("inradius", "width", "torsion", "lambda1"), "asymptotic")
    return ClosedFormValues(
        label=f"sector:{_fmt(theta)}",
        dim=2,
        area=theta / 2,
        perimeter=2 + theta,
        inradius=theta / 2,
        width=theta / 2,
        diameter=1.0,
        torsion=theta**3 / 48,
        lambda1=math.pi**2 / theta**2,
        kinds={q: asym.get(q, "exact") for q in ClosedFormValues.QUANTITIES},
        note="narrow-sector asymptotics as theta -> 0",
    )


def ellipse_values(b: float) -> ClosedFormValues:
    asym = dict.fromkeys(("perimeter", "torsion", "lambda1"), "asymptotic")
    return ClosedFormValues(
        label=f"ellipse:{_fmt(b)}",
        dim=2,
        area=math.pi * b,
        perimeter=4.0,
        inradius=b,
        width=2 * b,
        diameter=2.0,
        torsion=math.pi * b**3 / 4,
        lambda1=math.pi**2 / (4 * b * b),
        kinds={q: asym.get(q, "exact") for q in ClosedFormValues.QUANTITIES},
        note="narrow-ellipse asymptotics as b -> 0",
    )


def table2_values(kind: str, param: float, n: int = 2) -> ClosedFormValues:
    if kind == "thinning_box":
        return thinning_box_values(n, param)
    if kind == "sector":
        return sector_values(param)
    if kind == "ellipse":
        return ellipse_values(param)
    raise ValueError(f"no table values for {kind!r}")


# ---------------------------------------------------------------------------
# polygons


def rectangle(a: float, b: float) -> ConvexPolygon:
    return ConvexPolygon([[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]])


def regular_polygon(k: int, r: float = 1.0) -> ConvexPolygon:
    phi = 2 * math.pi * np.arange(k) / k
    return ConvexPolygon(r * np.column_stack([np.cos(phi), np.sin(phi)]))


def sector(theta: float, resolution: int = DEFAULT_RESOLUTION) -> ConvexPolygon:
    """Unit-radius sector ``{0 <= phi <= theta}`` with ``resolution`` vertices on the arc."""
    phi = np.linspace(0.0, theta, resolution)
    arc = np.column_stack([np.cos(phi), np.sin(phi)])
    return ConvexPolygon(np.vstack([[0.0, 0.0], arc]))


def ellipse(b: float, resolution: int = DEFAULT_RESOLUTION) -> ConvexPolygon:
    """``x^2 + (y/b)^2 <= 1``, inscribed, with the four axis endpoints among the vertices."""
    k = 4 * max(1, round(resolution / 4))
    phi = 2 * math.pi * np.arange(k) / k
    return ConvexPolygon(np.column_stack([np.cos(phi), b * np.sin(phi)]))


def stadium(l: float, r: float, resolution: int = DEFAULT_RESOLUTION) -> ConvexPolygon:
    """Segment of length ``l`` thickened by ``r``: two half-discs joined by a rectangle."""
    m = max(2, resolution // 2)
    phi = np.linspace(-math.pi / 2, math.pi / 2, m)
    right = np.column_stack([l + r * np.cos(phi), r * np.sin(phi)])
    left = np.column_stack([-r * np.cos(phi), -r * np.sin(phi)])
    return ConvexPolygon(np.vstack([right, left]))


def random_polygon(seed: int, n_points: int = 30) -> ConvexPolygon:
    """Convex hull of ``n_points`` uniform points in the unit square, deterministic per seed."""
    if n_points < 4:
        raise ValueError("n_points must be at least 4")
    for offset in range(10):
        rng = np.random.default_rng(seed if offset == 0 else [seed, offset])
        try:
            return ConvexPolygon.from_points(rng.random((n_points, 2)))
        except (DegeneratePolygonError, ValueError):
            continue
    raise DegeneratePolygonError(f"degenerate polygon: no valid hull for seed {seed}")


def realize(spec: FamilySpec | str) -> ConvexPolygon | ClosedFormValues:
    """Polygon for planar families; closed-form values for boxes in dimension three and up."""
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)
    p, res = spec.params, spec.boundary_resolution
    kind = spec.kind
    if kind == "thinning_box":
        n, a = p
        return rectangle(1.0, a) if n == 2 else thinning_box_values(n, a)
    if kind == "rectangle":
        return rectangle(*p)
    if kind == "sector":
        return sector(p[0], res)
    if kind == "ellipse":
        return ellipse(p[0], res)
    if kind == "disk":
        return regular_polygon(res, p[0])
    if kind == "regular_polygon":
        return regular_polygon(int(p[0]), p[1])
    if kind == "triangle":
        return ConvexPolygon(np.reshape(p[0], (3, 2)))
    if kind == "stadium":
        return stadium(p[0], p[1], res)
    return random_polygon(int(p[0]), int(p[1]))


def require_polygon(spec: FamilySpec | str) -> ConvexPolygon:
    shape = realize(spec)
    if not isinstance(shape, ConvexPolygon):
        raise ClosedFormOnlyError(f"{shape.label} has no planar polygon; use closed-form values")
    return shape
