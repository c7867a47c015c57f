"""Exact computational geometry on convex polygons.

Everything here works on :class:`ConvexPolygon`, an immutable counterclockwise
vertex list.  Inner parallel sets are computed exactly: the erosion of a convex
polygon by ``t`` is the intersection of its edge half-planes moved inward by
``t``, and between the instants at which an edge collapses the perimeter of the
eroded set is linear in ``t`` and its area quadratic.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

COLLINEAR_TOL = 1e-12
DUPLICATE_TOL = 1e-12


class DegeneratePolygonError(ValueError):
    """Raised for polygons with (numerically) zero area."""

    def __init__(self, msg="degenerate polygon"):
        super().__init__(msg)


class Direction(NamedTuple):
    """Unit vector in the plane."""

    x: float
    y: float

    @classmethod
    def from_vector(cls, v) -> Direction:
        x, y = float(v[0]), float(v[1])
        norm = math.hypot(x, y)
        if norm == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(x / norm, y / norm)

    @classmethod
    def from_angle(cls, theta: float) -> Direction:
        return cls(math.cos(theta), math.sin(theta))

    def __neg__(self) -> Direction:
        return Direction(-self.x, -self.y)


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _perimeter(v: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1).sum())


def _clean_vertices(v: np.ndarray) -> np.ndarray:
    """Drop repeated and collinear vertices; return CCW order."""
    span = np.ptp(v, axis=0)
    scale = float(np.hypot(*span)) if len(v) else 0.0
    if scale == 0.0:
        raise DegeneratePolygonError()
    if _signed_area(v) < 0:
        v = v[::-1]
    changed = True
    while changed and len(v) >= 3:
        changed = False
        step = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        keep = step > DUPLICATE_TOL * scale
        if not keep.all():
            v = v[keep]
            changed = True
            continue
        prev = np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0)
        a, b = v - prev, nxt - v
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        flat = np.abs(cross) <= COLLINEAR_TOL * scale**2
        if flat.any():
            # remove one at a time so that two adjacent flat vertices are judged afresh
            v = np.delete(v, int(np.argmax(flat)), axis=0)
            changed = True
    if len(v) < 3:
        raise DegeneratePolygonError()
    return v


class ConvexPolygon:
    """A convex polygon with counterclockwise vertices.

    Construction merges duplicate and collinear vertices and reverses clockwise
    input.  Non-convex input raises ``ValueError``; a polygon with no area
    raises :class:`DegeneratePolygonError`.
    """

    __slots__ = ("_v", "__dict__")

    def __init__(self, vertices: Sequence[Sequence[float]] | np.ndarray):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DegeneratePolygonError()
        if not np.isfinite(v).all():
            raise ValueError("vertex coordinates must be finite")
        v = _clean_vertices(v)
        a, b = v - np.roll(v, 1, axis=0), np.roll(v, -1, axis=0) - v
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        if (cross <= 0).any():
            raise ValueError("polygon is not convex")
        turning = np.arctan2(cross, np.einsum("ij,ij->i", a, b))
        if abs(turning.sum() - 2 * math.pi) > 1e-6:
            raise ValueError("polygon is not convex (self-overlapping)")
        if _signed_area(v) <= 1e-14 * float(np.hypot(*np.ptp(v, axis=0))) ** 2:
            raise DegeneratePolygonError()
        v.flags.writeable = False
        self._v = v

    @classmethod
    def from_points(cls, points) -> ConvexPolygon:
        """Convex hull of an arbitrary point cloud."""
        pts = np.asarray(points, dtype=float)
        try:
            hull = ConvexHull(pts)
        except Exception as exc:  # qhull raises its own error type
            raise DegeneratePolygonError() from exc
        return cls(pts[hull.vertices])

    @classmethod
    def from_json(cls, text: str) -> ConvexPolygon:
        data = json.loads(text)
        if not isinstance(data, dict) or "vertices" not in data:
            raise ValueError('polygon JSON must be an object with a "vertices" array')
        return cls(data["vertices"])

    def to_json(self) -> str:
        return json.dumps({"vertices": self._v.tolist()})

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    def __len__(self) -> int:
        return len(self._v)

    def __repr__(self) -> str:
        return f"ConvexPolygon({len(self._v)} vertices, area={self.area:.6g})"

    def scaled(self, factor: float) -> ConvexPolygon:
        return ConvexPolygon(self._v * factor)

    def translated(self, offset) -> ConvexPolygon:
        return ConvexPolygon(self._v + np.asarray(offset, dtype=float))

    @cached_property
    def area(self) -> float:
        return _signed_area(self._v)

    @cached_property
    def perimeter(self) -> float:
        return _perimeter(self._v)

    @cached_property
    def scale(self) -> float:
        """Bounding-box diagonal, the reference length for tolerances."""
        return float(np.hypot(*np.ptp(self._v, axis=0)))

    @cached_property
    def edge_normals(self) -> np.ndarray:
        """Inward unit normals, one per edge ``v[i] -> v[i+1]``."""
        e = np.roll(self._v, -1, axis=0) - self._v
        n = np.column_stack([-e[:, 1], e[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    @cached_property
    def edge_offsets(self) -> np.ndarray:
        """``c`` such that edge ``i`` lies on ``n_i . x = c_i`` and the interior has ``n_i . x > c_i``."""
        return np.einsum("ij,ij->i", self.edge_normals, self._v)

    @cached_property
    def _erosion(self) -> _ErosionSchedule:
        return _ErosionSchedule.build(self)

    def contains(self, point, tol: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        return bool((self.edge_normals @ p - self.edge_offsets >= -tol).all())


# ---------------------------------------------------------------------------
# scalar functionals


def area(poly: ConvexPolygon) -> float:
    return poly.area


def perimeter(poly: ConvexPolygon) -> float:
    return poly.perimeter


def support(poly: ConvexPolygon, direction) -> float:
    """Support function ``h(y) = max_x x . y``."""
    d = np.asarray(direction, dtype=float)
    return float((poly.vertices @ d).max())


def width(poly: ConvexPolygon, direction) -> float:
    d = np.asarray(direction, dtype=float)
    proj = poly.vertices @ d
    return float(proj.max() - proj.min())


def min_width(poly: ConvexPolygon) -> float:
    """Minimal width, attained in the direction normal to some edge."""
    proj = poly.edge_normals @ poly.vertices.T
    return float((proj.max(axis=1) - proj.min(axis=1)).min())


def diameter(poly: ConvexPolygon) -> float:
    v = poly.vertices
    d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=-1)
    return float(math.sqrt(d2.max()))


def inradius_center(poly: ConvexPolygon) -> tuple[float, np.ndarray]:
    """Chebyshev center of the polygon.

    Solves ``max r`` subject to ``n_i . x - r >= c_i`` and polishes the LP
    optimum on its active constraints, so that the returned radius is the
    exact distance from the center to the nearest edge line.  When the center
    is not unique (the optimal set is a segment, as for a rectangle) the
    midpoint of that segment is returned.
    """
    n, c = poly.edge_normals, poly.edge_offsets
    # the LP solver works with absolute tolerances, so solve it at unit scale
    origin, scale = poly.vertices.mean(axis=0), poly.scale
    A = np.column_stack([-n, np.ones(len(n))])
    res = linprog(
        [0.0, 0.0, -1.0],
        A_ub=A,
        b_ub=-(c - n @ origin) / scale,
        bounds=[(None, None), (None, None), (0, None)],
        method="highs",
    )
    if res.status != 0 or res.x[2] <= 1e-14:
        raise DegeneratePolygonError()
    res.x[:] = np.append(origin + scale * res.x[:2], scale * res.x[2])
    center = res.x[:2]
    slack = n @ center - res.x[2] - c
    order = np.argsort(slack)
    active = order[slack[order] <= 1e-7 * poly.scale]
    system = np.column_stack([n, -np.ones(len(n))])
    for i, j, k in itertools.combinations(active, 3):
        rows = [i, j, k]
        if abs(np.linalg.det(system[rows])) < 1e-9:
            continue
        x = np.linalg.solve(system[rows], c[rows])
        if x[2] >= res.x[2] - 1e-7 * poly.scale and (n @ x[:2] - c >= x[2] - 1e-12 * poly.scale).all():
            center = x[:2]
            break
    # the set of optimal centers is the inner parallel set at depth R
    ends = poly._erosion.vertices_at(poly._erosion.inradius)
    d2 = ((ends[:, None, :] - ends[None, :, :]) ** 2).sum(axis=-1)
    a, b = np.unravel_index(np.argmax(d2), d2.shape)
    if d2[a, b] > (1e-9 * poly.scale) ** 2:
        center = 0.5 * (ends[a] + ends[b])
    r = float((n @ center - c).min())
    return r, np.array(center)


def inradius(poly: ConvexPolygon) -> float:
    return inradius_center(poly)[0]


# ---------------------------------------------------------------------------
# inner parallel sets


def _vertex_velocity(n: np.ndarray) -> np.ndarray:
    """Velocity of vertex ``i`` (joining lines ``i-1`` and ``i``) as every line moves inward at unit speed.

    Moving anchored vertices along these bisector directions stays accurate
    when consecutive edges are nearly collinear, where intersecting the
    offset lines directly would lose most significant digits.
    """
    n0 = np.roll(n, 1, axis=0)
    dot = np.einsum("ij,ij->i", n0, n)
    cross = n0[:, 0] * n[:, 1] - n0[:, 1] * n[:, 0]
    flat = dot >= 0.0
    # both solve n0 . u = n . u = 1; each is well conditioned on its own half of the turning angles
    u = np.empty_like(n)
    u[flat] = (n0[flat] + n[flat]) / (1.0 + dot[flat])[:, None]
    sharp = ~flat
    u[sharp] = np.column_stack([n[sharp, 1] - n0[sharp, 1], n0[sharp, 0] - n[sharp, 0]]) / cross[sharp][:, None]
    return u


def _turning(n: np.ndarray) -> np.ndarray:
    """Exterior angle at each vertex, between line ``i-1`` and line ``i``."""
    n0 = np.roll(n, 1, axis=0)
    cross = n0[:, 0] * n[:, 1] - n0[:, 1] * n[:, 0]
    dot = np.einsum("ij,ij->i", n0, n)
    return np.mod(np.arctan2(cross, dot), 2 * math.pi)


@dataclass(frozen=True)
class _ErosionSchedule:
    """Piecewise description of ``t -> Omega_t``.

    ``times[k]`` is the start of segment ``k`` and ``active[k]`` the edges that
    survive on ``[times[k], times[k+1])``; ``times[-1]`` is the inradius.
    """

    normals: np.ndarray
    offsets: np.ndarray
    times: tuple[float, ...]
    active: tuple[np.ndarray, ...]
    anchors: tuple[np.ndarray, ...]

    @classmethod
    def build(cls, poly: ConvexPolygon) -> _ErosionSchedule:
        n_all, c_all = poly.edge_normals, poly.edge_offsets
        tol = 1e-12 * poly.scale
        idx = np.arange(len(n_all))
        v = poly.vertices
        t = 0.0
        times, active, anchors = [0.0], [idx], [v]
        while True:
            n = n_all[idx]
            phi = _turning(n)
            length = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
            half = np.tan(phi / 2)
            rate = half + np.roll(half, -1)
            dt = length / rate
            step = float(dt.min())
            t_next = t + step
            vanish = dt <= step + tol
            keep = idx[~vanish]
            closed = len(keep) >= 3 and (_turning(n_all[keep]) < math.pi - 1e-12).all()
            if not closed:
                times.append(t_next)
                break
            # the start vertex of each surviving edge is where it meets its new neighbour
            v = (v + step * _vertex_velocity(n))[~vanish]
            t, idx = t_next, keep
            times.append(t)
            active.append(idx)
            anchors.append(v)
        return cls(n_all, c_all, tuple(times), tuple(active), tuple(anchors))

    @property
    def inradius(self) -> float:
        return self.times[-1]

    def segment(self, t: float) -> int:
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(k, 0), len(self.active) - 1)

    def vertices_at(self, t: float, k: int | None = None) -> np.ndarray:
        k = self.segment(t) if k is None else k
        return self.anchors[k] + (t - self.times[k]) * _vertex_velocity(self.normals[self.active[k]])

    def perimeter_slope(self, k: int) -> float:
        """``-dP/dt`` on segment ``k``."""
        phi = _turning(self.normals[self.active[k]])
        return float(2 * np.tan(phi / 2).sum())


def erode(poly: ConvexPolygon, t: float) -> ConvexPolygon | None:
    """Inner parallel set ``{x : d(x, boundary) > t}``; ``None`` once ``t >= R``."""
    if t < 0:
        raise ValueError("erosion depth must be non-negative")
    if t == 0:
        return poly
    sched = poly._erosion
    if t >= sched.inradius * (1 - 1e-12):
        return None
    try:
        return ConvexPolygon(sched.vertices_at(t))
    except DegeneratePolygonError:
        return None


def erosion_breakpoints(poly: ConvexPolygon) -> np.ndarray:
    """Depths at which some edge of the eroded polygon collapses, from 0 up to the inradius."""
    return np.array(poly._erosion.times)


@dataclass(frozen=True)
class InnerParallelProfile:
    """Sampled area ``mu(t)`` and perimeter ``per(t)`` of the inner parallel sets.

    Every breakpoint is a sample, so on each sample interval ``per`` is exactly
    linear and ``mu`` exactly quadratic.  ``slope[i]`` is ``-dper/dt`` on the
    interval ``[t[i], t[i+1]]``.
    """

    t: np.ndarray
    mu: np.ndarray
    per: np.ndarray
    slope: np.ndarray
    inradius: float
    breakpoints: np.ndarray

    @property
    def area(self) -> float:
        return float(self.mu[0])

    @property
    def perimeter(self) -> float:
        return float(self.per[0])

    def __len__(self) -> int:
        return len(self.t)


def inner_profile(poly: ConvexPolygon, n_samples: int = 512) -> InnerParallelProfile:
    if n_samples < 16:
        raise ValueError("n_samples must be at least 16")
    sched = poly._erosion
    R = sched.inradius
    bps = np.array(sched.times)
    grid = np.union1d(np.linspace(0.0, R, n_samples), bps)
    # merge samples closer than the breakpoint resolution, keeping breakpoints
    keep = np.ones(len(grid), dtype=bool)
    is_bp = np.isin(grid, bps)
    gap = np.diff(grid) <= 1e-10 * max(R, 1e-300)
    for i in np.nonzero(gap)[0]:
        if is_bp[i + 1] and not is_bp[i]:
            keep[i] = False
        else:
            keep[i + 1] = False
    keep[0] = keep[-1] = True
    grid = grid[keep]

    mu = np.empty(len(grid))
    per = np.empty(len(grid))
    slope = np.empty(len(grid))
    for i, t in enumerate(grid):
        k = sched.segment(t)
        if t >= R:
            k = len(sched.active) - 1
        v = sched.vertices_at(t, k)
        mu[i] = _signed_area(v)
        per[i] = _perimeter(v)
        slope[i] = sched.perimeter_slope(k)
    mu[-1] = 0.0
    mu[0], per[0] = poly.area, poly.perimeter
    return InnerParallelProfile(grid, mu, per, slope, R, bps)


def profile_at(profile: InnerParallelProfile, t) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``(mu, per)`` at arbitrary depths from the piecewise-polynomial interpolant."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, profile.inradius)
    i = np.clip(np.searchsorted(profile.t, t, side="right") - 1, 0, len(profile.t) - 2)
    tau = t - profile.t[i]
    s = profile.slope[i]
    p0 = profile.per[i]
    return profile.mu[i] - p0 * tau + 0.5 * s * tau**2, p0 - s * tau


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)

INTEGRANDS = ("mu2_over_per", "t2_per", "t_per", "mu")


def profile_integral(profile: InnerParallelProfile, integrand) -> float:
    """Integral over ``[0, R]`` of a function of ``(t, mu(t), per(t))``.

    ``integrand`` is one of :data:`INTEGRANDS`, integrated in closed form on
    each interval, or a vectorised callable ``f(t, mu, per)`` integrated with
    10-point Gauss-Legendre on each interval of the exact interpolant.
    """
    t0 = profile.t[:-1]
    h = np.diff(profile.t)
    m0, p0, s = profile.mu[:-1], profile.per[:-1], profile.slope[:-1]
    if callable(integrand):
        return _gauss_integral(profile, integrand)
    if integrand == "mu":
        return float((m0 * h - p0 * h**2 / 2 + s * h**3 / 6).sum())
    if integrand == "t_per":
        return float((t0 * p0 * h + (p0 - s * t0) * h**2 / 2 - s * h**3 / 3).sum())
    if integrand == "t2_per":
        return float(
            (t0**2 * p0 * h + (2 * t0 * p0 - s * t0**2) * h**2 / 2 + (p0 - 2 * s * t0) * h**3 / 3 - s * h**4 / 4).sum()
        )
    if integrand == "mu2_over_per":
        return _mu2_over_per(profile)
    raise ValueError(f"unknown integrand {integrand!r}; expected one of {INTEGRANDS}")


def _gauss_integral(profile: InnerParallelProfile, f) -> float:
    t0 = profile.t[:-1, None]
    h = np.diff(profile.t)[:, None]
    tau = 0.5 * h * (_GL_NODES[None, :] + 1)
    s = profile.slope[:-1, None]
    p0 = profile.per[:-1, None]
    mu = profile.mu[:-1, None] - p0 * tau + 0.5 * s * tau**2
    per = p0 - s * tau
    vals = f(t0 + tau, np.maximum(mu, 0.0), np.maximum(per, 0.0))
    return float((0.5 * h * vals * _GL_WEIGHTS[None, :]).sum())


def _mu2_over_per(profile: InnerParallelProfile) -> float:
    # In u = per, mu = A + u^2 / (2 s) on each interval (s >= 2 pi > 0 always),
    # so mu^2 / u integrates to logs and powers.  Short intervals far from the
    # pole at u = 0 go to Gauss-Legendre, where the closed form would cancel.
    h = np.diff(profile.t)
    m0, p0, s = profile.mu[:-1], profile.per[:-1], profile.slope[:-1]
    p1 = p0 - s * h
    total = 0.0
    short = s * h <= 0.05 * p0
    if short.any():
        tau = 0.5 * h[short, None] * (_GL_NODES[None, :] + 1)
        ss, pp = s[short, None], p0[short, None]
        mu = m0[short, None] - pp * tau + 0.5 * ss * tau**2
        per = pp - ss * tau
        total += float((0.5 * h[short, None] * (mu**2 / per) * _GL_WEIGHTS[None, :]).sum())
    for i in np.nonzero(~short)[0]:
        si, a0, a1 = s[i], p0[i], max(p1[i], 0.0)
        A = m0[i] - a0**2 / (2 * si)
        # P reaches 0 only when the collapse is a point, and then mu -> 0 forces A = 0
        if a1 <= 0.0 or abs(A) <= 1e-12 * a0**2 / (2 * si):
            A = 0.0
        log_term = A * A * math.log(a0 / a1) if A != 0.0 else 0.0
        total += (log_term + A * (a0**2 - a1**2) / (2 * si) + (a0**4 - a1**4) / (16 * si**2)) / si
    return float(total)


# ---------------------------------------------------------------------------
# aggregate measurements


@dataclass(frozen=True)
class ShapeMeasurements:
    area: float
    perimeter: float
    inradius: float
    incenter: tuple[float, float]
    min_width: float
    diameter: float
    alpha: float
    beta: float
    dim: int = 2

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "perimeter": self.perimeter,
            "inradius": self.inradius,
            "incenter": list(self.incenter),
            "min_width": self.min_width,
            "diameter": self.diameter,
            "alpha": self.alpha,
            "beta": self.beta,
        }


def measure(poly: ConvexPolygon) -> ShapeMeasurements:
    r, center = inradius_center(poly)
    w, d = min_width(poly), diameter(poly)
    a, p = poly.area, poly.perimeter
    return ShapeMeasurements(
        area=a,
        perimeter=p,
        inradius=r,
        incenter=(float(center[0]), float(center[1])),
        min_width=w,
        diameter=d,
        alpha=w / d,
        beta=p * r / a - 1.0,
    )
