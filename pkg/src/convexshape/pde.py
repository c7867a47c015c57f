"""P1 finite elements for the torsion problem and the first Dirichlet eigenvalue.

Both solvers run on two nested meshes (a base mesh refined once and twice by
midpoint subdivision) and Richardson-extrapolate with exponent 2.  Conforming
P1 approximates the torsion from below and the eigenvalue from above, so the
fine-level values bracket the extrapolated ones from the known side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay

from .geometry import ConvexPolygon, DegeneratePolygonError, diameter, inradius

CG_MAX_ITER = 100_000
EIG_MAX_ITER = 5_000


class SolverError(RuntimeError):
    """Iterative solver failure; ``code`` is ``cg_divergence`` or ``eig_divergence``."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


@dataclass(frozen=True)
class TriangleMesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray

    @property
    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique undirected edges and, per triangle, the index of each of its three edges.

        Local edge ``k`` of a triangle is opposite local vertex ``k``.
        """
        tri = self.triangles
        local = np.stack([tri[:, [1, 2]], tri[:, [2, 0]], tri[:, [0, 1]]], axis=1).reshape(-1, 2)
        local = np.sort(local, axis=1)
        uniq, inv = np.unique(local, axis=0, return_inverse=True)
        return uniq, inv.reshape(-1, 3)

    @property
    def max_edge(self) -> float:
        e, _ = self.edges()
        return float(np.linalg.norm(self.nodes[e[:, 0]] - self.nodes[e[:, 1]], axis=1).max())

    def refine(self) -> TriangleMesh:
        """Uniform red refinement: every triangle splits into four similar ones."""
        e, tri_edges = self.edges()
        n0 = len(self.nodes)
        mid = 0.5 * (self.nodes[e[:, 0]] + self.nodes[e[:, 1]])
        counts = np.bincount(tri_edges.ravel(), minlength=len(e))
        mid_boundary = counts == 1
        m = tri_edges + n0
        a, b, c = self.triangles.T
        ma, mb, mc = m.T  # opposite a, b, c
        new = np.concatenate(
            [
                np.column_stack([a, mc, mb]),
                np.column_stack([b, ma, mc]),
                np.column_stack([c, mb, ma]),
                np.column_stack([ma, mb, mc]),
            ]
        )
        return TriangleMesh(
            np.vstack([self.nodes, mid]),
            new,
            np.concatenate([self.boundary, mid_boundary]),
        )


def _boundary_points(poly: ConvexPolygon, spacing: float) -> np.ndarray:
    v = poly.vertices
    pts = []
    for p, q in zip(v, np.roll(v, -1, axis=0)):
        k = max(1, int(math.ceil(np.linalg.norm(q - p) / spacing)))
        s = np.arange(k)[:, None] / k
        pts.append(p + s * (q - p))
    return np.vstack(pts)


def _interior_points(poly: ConvexPolygon, spacing: float, origin: np.ndarray) -> np.ndarray:
    """Triangular lattice anchored at ``origin``, kept half a spacing away from the boundary."""
    v = poly.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    dy = spacing * math.sqrt(3) / 2
    j = np.arange(math.floor((lo[1] - origin[1]) / dy), math.ceil((hi[1] - origin[1]) / dy) + 1)
    i = np.arange(math.floor((lo[0] - origin[0]) / spacing) - 1, math.ceil((hi[0] - origin[0]) / spacing) + 2)
    I, J = np.meshgrid(i, j)
    x = origin[0] + spacing * (I + 0.5 * (J % 2))
    y = origin[1] + dy * J
    pts = np.column_stack([x.ravel(), y.ravel()])
    dist = pts @ poly.edge_normals.T - poly.edge_offsets
    return pts[(dist > 0.5 * spacing).all(axis=1)]


def base_mesh(poly: ConvexPolygon, spacing: float) -> TriangleMesh:
    """Delaunay mesh of boundary points and an interior triangular lattice."""
    if spacing <= 0:
        raise ValueError("mesh spacing must be positive")
    bnd = _boundary_points(poly, spacing)
    inner = _interior_points(poly, spacing, poly.vertices[0])
    nodes = np.vstack([bnd, inner])
    tri = Delaunay(nodes).simplices.astype(np.int64)
    boundary = np.r_[np.ones(len(bnd), bool), np.zeros(len(inner), bool)]
    areas = TriangleMesh(nodes, tri, boundary).areas
    tri[areas < 0] = tri[areas < 0][:, [0, 2, 1]]
    # qhull can emit slivers of zero area along collinear boundary runs
    tri = tri[np.abs(areas) > 1e-14 * poly.area]
    mesh = TriangleMesh(nodes, tri, boundary)
    if abs(mesh.areas.sum() - poly.area) > 1e-10 * poly.area:
        raise DegeneratePolygonError("mesh does not cover the polygon")
    return mesh


def triangulate(poly: ConvexPolygon, target_h: float) -> TriangleMesh:
    """Conforming mesh with every edge no longer than ``target_h``."""
    if target_h <= 0:
        raise ValueError("target_h must be positive")
    mesh = base_mesh(poly, target_h / 2)
    while mesh.max_edge > target_h:
        mesh = mesh.refine()
    return mesh


def default_spacing(poly: ConvexPolygon, r: float | None = None) -> float:
    """Base-mesh spacing: resolve both the overall size and the thinnest direction."""
    r = inradius(poly) if r is None else r
    return min(diameter(poly) / 20.0, r / 3.0)


# ---------------------------------------------------------------------------
# assembly and linear algebra


@dataclass(frozen=True)
class _System:
    K: sp.csr_matrix
    M: sp.csr_matrix
    load: np.ndarray
    free: np.ndarray


def assemble(mesh: TriangleMesh) -> _System:
    """Stiffness, consistent mass and unit load, restricted to the free (interior) nodes."""
    p = mesh.nodes[mesh.triangles]
    area = mesh.areas
    # gradients of the barycentric coordinates, times 2*area
    g = np.stack(
        [
            np.column_stack([p[:, 1, 1] - p[:, 2, 1], p[:, 2, 0] - p[:, 1, 0]]),
            np.column_stack([p[:, 2, 1] - p[:, 0, 1], p[:, 0, 0] - p[:, 2, 0]]),
            np.column_stack([p[:, 0, 1] - p[:, 1, 1], p[:, 1, 0] - p[:, 0, 0]]),
        ],
        axis=1,
    )
    ke = np.einsum("tik,tjk->tij", g, g) / (4.0 * area)[:, None, None]
    me = (np.ones((3, 3)) + np.eye(3))[None] * (area / 12.0)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = len(mesh.nodes)
    K = sp.csr_matrix((ke.ravel(), (rows, cols)), shape=(n, n))
    M = sp.csr_matrix((me.ravel(), (rows, cols)), shape=(n, n))
    load = np.bincount(mesh.triangles.ravel(), weights=np.repeat(area / 3.0, 3), minlength=n)
    free = np.nonzero(~mesh.boundary)[0]
    return _System(K[free][:, free].tocsr(), M[free][:, free].tocsr(), load[free], free)


def pcg(A, b, tol: float, x0=None, max_iter: int = CG_MAX_ITER) -> np.ndarray:
    """Jacobi-preconditioned conjugate gradients; stops at ``|r| <= tol * |b|``."""
    dinv = 1.0 / A.diagonal()
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - A @ x
    target = tol * np.linalg.norm(b)
    if np.linalg.norm(r) <= target:
        return x
    z = dinv * r
    d = z.copy()
    rz = r @ z
    for _ in range(max_iter):
        Ad = A @ d
        step = rz / (d @ Ad)
        x += step * d
        r -= step * Ad
        if np.linalg.norm(r) <= target:
            return x
        z = dinv * r
        rz, rz_old = r @ z, rz
        d = z + (rz / rz_old) * d
    raise SolverError("cg_divergence", f"no convergence in {max_iter} iterations")


def _torsion_on(system: _System, tol: float) -> tuple[float, np.ndarray]:
    u = pcg(system.K, system.load, tol)
    return float(system.load @ u), u


def _lambda_on(system: _System, tol: float, shift: float, start: np.ndarray) -> tuple[float, np.ndarray]:
    """Shifted inverse iteration for the smallest generalized eigenvalue.

    ``shift`` must be a strict lower bound of the discrete eigenvalue so the
    shifted operator stays positive definite for CG.
    """
    K, M = system.K, system.M
    A = (K - shift * M).tocsr()
    x = start / math.sqrt(start @ (M @ start))
    rq = float(x @ (K @ x))
    inner_tol = max(min(1e-10, 0.1 * tol), 1e-13)
    for _ in range(EIG_MAX_ITER):
        y = pcg(A, M @ x, inner_tol, x0=x / max(rq - shift, 1e-300))
        norm = math.sqrt(y @ (M @ y))
        if not np.isfinite(norm) or norm == 0.0:
            raise SolverError("eig_divergence", "iterate vanished")
        x = y / norm
        rq_new = float(x @ (K @ x))
        if abs(rq_new - rq) <= tol * abs(rq_new):
            return rq_new, x
        rq = rq_new
    raise SolverError("eig_divergence", f"no convergence in {EIG_MAX_ITER} iterations")


def _prolong(coarse: TriangleMesh, values_full: np.ndarray) -> np.ndarray:
    """Nodal interpolation of a coarse P1 field onto its midpoint refinement."""
    e, _ = coarse.edges()
    return np.concatenate([values_full, 0.5 * (values_full[e[:, 0]] + values_full[e[:, 1]])])


@dataclass(frozen=True)
class FunctionalValues:
    torsion: float
    torsion_error: float
    lambda1: float
    lambda1_error: float
    mesh_size: float
    levels: tuple[tuple[float, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "torsion": self.torsion,
            "torsion_error": self.torsion_error,
            "lambda1": self.lambda1,
            "lambda1_error": self.lambda1_error,
            "mesh_size": self.mesh_size,
        }


def _check_tol(tol: float) -> None:
    if not 1e-8 <= tol <= 1e-2:
        raise ValueError("tol must lie in [1e-8, 1e-2]")


def _richardson(coarse: float, fine: float) -> tuple[float, float]:
    ext = fine + (fine - coarse) / 3.0
    return ext, abs(ext - fine)


def solve_functionals(
    poly: ConvexPolygon,
    tol: float = 1e-8,
    spacing: float | None = None,
    torsion: bool = True,
    eigenvalue: bool = True,
) -> FunctionalValues:
    """Torsional rigidity and first eigenvalue on shared meshes."""
    _check_tol(tol)
    r = inradius(poly)
    h = default_spacing(poly, r) if spacing is None else spacing
    coarse = base_mesh(poly, h).refine()
    fine = coarse.refine()
    shift = math.pi**2 / (4.0 * r * r)

    T, lam, start = [], [], None
    for mesh in (coarse, fine):
        system = assemble(mesh)
        t_val, u = _torsion_on(system, tol)
        T.append(t_val)
        if eigenvalue:
            if start is None:
                x0 = u
            else:
                full = np.zeros(len(prev_mesh.nodes))
                full[prev_free] = start
                x0 = _prolong(prev_mesh, full)[system.free]
            lam_val, vec = _lambda_on(system, tol, shift, x0)
            lam.append(lam_val)
            start, prev_mesh, prev_free = vec, mesh, system.free
    T_ext, T_err = _richardson(*T)
    T_err += tol * T_ext
    if eigenvalue:
        L_ext, L_err = _richardson(*lam)
        L_err += tol * L_ext
    else:
        L_ext = L_err = math.nan
    if not torsion:
        T_ext = T_err = math.nan
    levels = tuple(zip(T, lam)) if eigenvalue else tuple((t, math.nan) for t in T)
    return FunctionalValues(T_ext, T_err, L_ext, L_err, fine.max_edge, levels)


def solve_torsion(poly: ConvexPolygon, tol: float = 1e-8) -> tuple[float, float]:
    """``T = int u`` with ``-Laplace u = 1``, ``u = 0`` on the boundary; returns ``(T, error_estimate)``."""
    f = solve_functionals(poly, tol, eigenvalue=False)
    return f.torsion, f.torsion_error


def solve_lambda1(poly: ConvexPolygon, tol: float = 1e-8) -> tuple[float, float]:
    """First Dirichlet eigenvalue; returns ``(lambda, error_estimate)``."""
    f = solve_functionals(poly, tol)
    return f.lambda1, f.lambda1_error


def closed_form_rectangle_torsion(a: float, b: float) -> float:
    """Torsional rigidity (``-Laplace u = 1``) of an ``a`` by ``b`` rectangle, by Fourier series."""
    if a <= 0 or b <= 0:
        raise ValueError("side lengths must be positive")
    if a > b:
        a, b = b, a
    head = a**3 * b / 3.0
    coef = 64.0 * a**4 / math.pi**5
    total, k = 0.0, 1
    while True:
        term = math.tanh(k * math.pi * b / (2 * a)) / k**5
        total += term
        if coef * term < 1e-14 * (head - coef * total):
            break
        k += 2
    return (head - coef * total) / 4.0
