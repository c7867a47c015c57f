"""Independent reference computations used only by the tests."""

import math

import numpy as np
from scipy import integrate
from scipy.optimize import minimize, minimize_scalar
from scipy.spatial import HalfspaceIntersection
from scipy.special import jn_zeros


def bessel_disk_lambda() -> float:
    return float(jn_zeros(0, 1)[0] ** 2)


def rectangle_lambda(a: float, b: float) -> float:
    return math.pi**2 * (1 / a**2 + 1 / b**2)


def rectangle_torsion_double_series(a: float, b: float, terms: int = 401) -> float:
    """``T = sum 64 a b / (pi^6 m^2 n^2 (m^2/a^2 + n^2/b^2))`` over odd m, n (eigenfunction expansion)."""
    k = np.arange(1, terms + 1, 2, dtype=float)
    m, n = np.meshgrid(k, k)
    return float((64 * a * b / (math.pi**6 * m**2 * n**2 * (m**2 / a**2 + n**2 / b**2))).sum())


def brute_min_width(vertices, n_dirs: int = 3600, refine: bool = True) -> float:
    """Scan ``n_dirs`` directions, then polish every candidate direction with a bounded 1D search.

    The width has a kink at its minimum, so the raw scan is only first-order
    accurate in the angular step; the polish removes that.
    """
    v = np.asarray(vertices, float)
    phi = np.linspace(0.0, math.pi, n_dirs, endpoint=False)
    d = np.column_stack([np.cos(phi), np.sin(phi)])
    proj = v @ d.T
    w = proj.max(axis=0) - proj.min(axis=0)
    if not refine:
        return float(w.min())

    def width_at(a):
        p = v @ np.array([math.cos(a), math.sin(a)])
        return p.max() - p.min()

    # the width is diam-Lipschitz in the angle, so the true minimum lies
    # within one step of a grid direction no worse than best + diam * step
    step = math.pi / n_dirs
    diam = float(np.sqrt(((v[:, None] - v[None]) ** 2).sum(-1).max()))
    best = float(w.min())
    for k in np.flatnonzero(w <= best + diam * step):
        res = minimize_scalar(width_at, bounds=(phi[k] - step, phi[k] + step), method="bounded", options={"xatol": 1e-13})
        best = min(best, float(res.fun))
    return best


def halfplane_erosion(vertices, t: float, center=None):
    """Vertices of the eroded polygon by qhull half-space intersection, or ``None`` if empty.

    ``center`` is an optional precomputed ``chebyshev_by_optimisation(vertices)``.
    """
    v = np.asarray(vertices, float)
    e = np.roll(v, -1, axis=0) - v
    normal = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]  # outward for CCW
    offs = (normal * v).sum(axis=1) - t
    halfspaces = np.column_stack([normal, -offs])
    c = chebyshev_by_optimisation(v) if center is None else center
    if c[0] <= t + 1e-9:
        return None
    hs = HalfspaceIntersection(halfspaces, c[1])
    pts = hs.intersections
    centre = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - centre[1], pts[:, 0] - centre[0]))
    return pts[order]


def chebyshev_by_optimisation(vertices):
    """Maximise the distance to the nearest edge line with Nelder-Mead from the centroid."""
    v = np.asarray(vertices, float)
    e = np.roll(v, -1, axis=0) - v
    inward = np.column_stack([-e[:, 1], e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
    off = (inward * v).sum(axis=1)

    def neg(x):
        return -np.min(inward @ x - off)

    best = None
    for start in [v.mean(axis=0), *v[:: max(1, len(v) // 4)] * 0.5 + v.mean(axis=0) * 0.5]:
        res = minimize(neg, start, method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000})
        if best is None or res.fun < best.fun:
            best = res
    return -best.fun, best.x


def shoelace(v) -> float:
    v = np.asarray(v)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def quad(f, a, b) -> float:
    return integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def halfplane_profile(vertices):
    """``(mu, per, R)``: area and perimeter of inner parallel sets by qhull, independent of the package erosion."""
    center = chebyshev_by_optimisation(vertices)
    R = center[0]

    def mu(t):
        pts = halfplane_erosion(vertices, t, center)
        return 0.0 if pts is None else shoelace(pts)

    def per(t):
        pts = halfplane_erosion(vertices, t, center)
        return 0.0 if pts is None else float(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum())

    return mu, per, R
