"""Shape functionals, asymmetries, explicit constants and the inequality report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Protocol, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .bounds import BoundValues, compute_bounds
from .geometry import ConvexPolygon, ShapeMeasurements, erode, inner_profile, measure
from .pde import FunctionalValues, solve_functionals

PI2_4 = math.pi**2 / 4


class ShapeMismatchError(ValueError):
    code = "shape_mismatch"

    def __init__(self, detail: str = ""):
        super().__init__(f"shape_mismatch: {detail}" if detail else "shape_mismatch")


# ---------------------------------------------------------------------------
# constants


@lru_cache(maxsize=None)
def ball_lambda(n: int) -> float:
    """First Dirichlet eigenvalue of the unit ball in R^n: the square of the first zero of J_{n/2-1}."""
    nu = n / 2 - 1
    # the first zero of J_nu lies in (nu, nu + 2 (nu + 1)^(1/3) + 2) for nu >= 0
    lo, hi = max(nu, 1e-3), nu + 2 * (nu + 1) ** (1 / 3) + 2
    grid = np.linspace(lo, hi, 400)
    vals = jv(nu, grid)
    k = int(np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0][0])
    return brentq(lambda x: jv(nu, x), grid[k], grid[k + 1], xtol=1e-15) ** 2


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def inradius_width_ratio(n: int) -> float:
    """Best constant ``c`` in ``R >= c w`` for convex bodies in R^n."""
    return math.sqrt(n + 2) / (2 * n + 2) if n % 2 == 0 else 1 / (2 * math.sqrt(n))


def perimeter_diameter_bound(n: int, diam: float) -> float:
    """Upper bound for the perimeter of a convex body in terms of its diameter."""
    return n * ball_volume(n) * (n / (2 * n + 2)) ** ((n - 1) / 2) * diam ** (n - 1)


def c1(n: int) -> float:
    return 1.0 / (2**3 * 3**4 * n**3)


def c2(n: int) -> float:
    return math.pi**2 / (2**5 * 3**4 * n**3 * (2 * n - 1))


def q1(n: int, beta: float) -> float:
    return beta / (6 * n)


def q2(n: int, beta: float) -> float:
    return 1.0 / (1.0 + beta / n)


@dataclass(frozen=True)
class PaperConstants:
    """Explicit constants, with the three planar ones obtained by chaining the proofs at n = 2."""

    K2D: float
    C3_2D: float
    C4_2D: float
    c2: float = 2 * math.pi

    @staticmethod
    def C1(n: int) -> float:
        return c1(n)

    @staticmethod
    def C2(n: int) -> float:
        return c2(n)

    @staticmethod
    def q1(n: int, beta: float) -> float:
        return q1(n, beta)

    @staticmethod
    def q2(n: int, beta: float) -> float:
        return q2(n, beta)


def derive_2d_constants() -> PaperConstants:
    """Chain the planar proof estimates into constants against ``alpha = w / diam``.

    Each proof ends with ``gap >= k * R / P`` for some ``k``.  In the plane
    ``R >= w / 3`` and ``P <= 2 pi diam / sqrt(3)``, so ``R / P >= sqrt(3) / (6 pi) * alpha``.
    """
    n, cn = 2, 2 * math.pi
    r_over_p = inradius_width_ratio(n) / perimeter_diameter_bound(n, 1.0)
    return PaperConstants(
        K2D=cn / (2 * n) * r_over_p,
        C3_2D=27 * cn / (256 * n) * r_over_p,
        C4_2D=math.pi**2 * cn / (8 * n) * (math.pi - 2) / (2 * math.pi) * r_over_p,
        c2=cn,
    )


CONSTANTS = derive_2d_constants()


# ---------------------------------------------------------------------------
# functionals


def asymmetries(m) -> tuple[float, float]:
    """``(alpha, beta) = (w / diam, P R / |Omega| - 1)``."""
    width = m.min_width if hasattr(m, "min_width") else m.width
    return width / m.diameter, m.perimeter * m.inradius / m.area - 1.0


@dataclass(frozen=True)
class FunctionalSuite:
    F1: float
    F2: float
    F3: float
    F4: float
    alpha: float
    beta: float
    F1_err: float = 0.0
    F2_err: float = 0.0
    F3_err: float = 0.0
    F4_err: float = 0.0

    @property
    def gaps(self) -> tuple[float, float, float, float]:
        """Distances to the extremal values: ``F1 - 1/3, pi^2/4 - F2, 1/3 - F3, F4 - pi^2/4``."""
        return self.F1 - 1 / 3, PI2_4 - self.F2, 1 / 3 - self.F3, self.F4 - PI2_4

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("F1", "F2", "F3", "F4", "alpha", "beta")}


def functional_suite(m, f: FunctionalValues | None = None) -> FunctionalSuite:
    """Build the four functionals from measurements and solver output.

    ``m`` may also be a closed-form record carrying its own ``torsion`` and
    ``lambda1``, in which case ``f`` is omitted.
    """
    if f is None:
        T, lam, dT, dlam = m.torsion, m.lambda1, 0.0, 0.0
    else:
        T, lam, dT, dlam = f.torsion, f.lambda1, f.torsion_error, f.lambda1_error
    area, per, r = m.area, m.perimeter, m.inradius
    alpha, beta = asymmetries(m)
    F1 = T * per**2 / area**3
    F2 = lam * area**2 / per**2
    F3 = T / (r**2 * area)
    F4 = lam * r**2
    return FunctionalSuite(
        F1, F2, F3, F4, alpha, beta,
        F1_err=F1 * dT / T, F2_err=F2 * dlam / lam, F3_err=F3 * dT / T, F4_err=F4 * dlam / lam,
    )


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class InequalityEntry:
    id: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tol: float
    relation: str = ">="

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class InequalityReport:
    shape: str
    entries: tuple[InequalityEntry, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[InequalityEntry]:
        return [e for e in self.entries if not e.passed]

    def __getitem__(self, key: str) -> InequalityEntry:
        for e in self.entries:
            if e.id == key:
                return e
        raise KeyError(key)

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def to_dict(self) -> dict:
        return {"shape": self.shape, "entries": [e.to_dict() for e in self.entries]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _geom_tol(*values: float) -> float:
    return 1e-9 * max(1.0, *(abs(v) for v in values))


class _Builder:
    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self.entries: list[InequalityEntry] = []

    def _tol(self, err: float | None, lhs: float, rhs: float) -> float:
        if err is None:
            return _geom_tol(lhs, rhs)
        return max(self.tolerance, 10.0 * err, 1e-12 * max(abs(lhs), abs(rhs)))

    def ge(self, id_, lhs, rhs, err=None, strict=False):
        tol = self._tol(err, lhs, rhs)
        margin = lhs - rhs
        self.entries.append(
            InequalityEntry(id_, float(lhs), float(rhs), float(margin), bool(margin >= -tol), tol, ">" if strict else ">=")
        )

    def le(self, id_, lhs, rhs, err=None):
        tol = self._tol(err, lhs, rhs)
        margin = rhs - lhs
        self.entries.append(InequalityEntry(id_, float(lhs), float(rhs), float(margin), bool(margin >= -tol), tol, "<="))

    def between(self, id_, lo, value, hi, err=None, strict_lo=False):
        """``lo <= value <= hi``; the margin is the smaller slack and ``rhs`` the binding bound."""
        tol = self._tol(err, value, max(abs(lo), abs(hi)))
        m_lo, m_hi = value - lo, hi - value
        margin, rhs = (m_lo, lo) if m_lo <= m_hi else (m_hi, hi)
        self.entries.append(
            InequalityEntry(id_, float(value), float(rhs), float(margin), bool(margin >= -tol), tol, "in")
        )


class ClosedForm(Protocol):
    """Any record with exact scalar data for a body in R^n (see ``harness.families``)."""

    dim: int
    area: float
    perimeter: float
    inradius: float
    width: float
    diameter: float
    torsion: float
    lambda1: float

    def inner(self, t): ...


def _profile_entries(b: _Builder, area, per, R, t, mu, p, slope) -> None:
    """PROF-1..4 and the two calculus checks, each reported at its worst sample."""
    t, mu, p = np.asarray(t), np.asarray(mu), np.asarray(p)

    def worst(id_, lhs, rhs, kind):
        margin = lhs - rhs if kind == "ge" else rhs - lhs
        i = int(np.argmin(margin))
        getattr(b, kind)(id_, lhs[i], rhs[i])

    worst("PROF-1", mu / area, 1.0 - per * t / area, "ge")
    worst("PROF-2", p / per, 1.0 - 2 * math.pi * t / per, "le")
    worst("PROF-3", p / per, 1.0 - 2 * math.pi * (area - mu) / per**2, "le")
    if slope is not None:
        s = np.asarray(slope)[:-1]
        d = R - t[:-1]
        worst("PROF-4", mu[:-1] / area, (per * d - 0.5 * d**2 * s) / area, "le")
        h = np.diff(t)
        fd = -np.diff(mu) / h
        avg = 0.5 * (p[:-1] + p[1:])
        i = int(np.argmax(np.abs(fd - avg)))
        b.le("PROF-D", abs(fd[i] - avg[i]) / per, 0.0)
        if len(t) > 2:
            # concavity of P: each interior sample lies above the chord of its neighbours
            w = (t[1:-1] - t[:-2]) / (t[2:] - t[:-2])
            chord = (1 - w) * p[:-2] + w * p[2:]
            worst("PROF-C", p[1:-1] / per, chord / per, "ge")


def _common_entries(b: _Builder, s: FunctionalSuite, n: int) -> None:
    g1, g2, g3, g4 = s.gaps
    beta = s.beta
    b.ge("Q1-LO", g1, c1(n) * beta**3, s.F1_err)
    b.le("Q1-HI", g1, (n + 1) / 3 * beta, s.F1_err)
    b.ge("Q2-LO", g2, c2(n) * beta**4, s.F2_err)
    b.le("Q2-HI", g2, math.pi**2 / 2 * beta, s.F2_err)
    if n == 2:
        b.ge("Q3-LO", g3, beta / 6, s.F3_err, strict=True)
    b.le("Q3-HI", g3, 2 * beta / 3, s.F3_err)
    b.le("Q4", g4, math.pi**2 * (n + 1) / 4 * beta, s.F4_err)


def _chain_entries(b: _Builder, s: FunctionalSuite, n: int) -> None:
    if n == 2:
        b.between("CHAIN-T", 1 / 3, s.F1, 2 / 3, s.F1_err)
    else:
        b.ge("CHAIN-T", s.F1, 1 / 3, s.F1_err)
    b.between("CHAIN-L", math.pi**2 / (4 * n**2), s.F2, PI2_4, s.F2_err)
    b.between("CHAIN-M", 1 / (n * (n + 2)), s.F3, 1 / 3, s.F3_err)
    b.between("CHAIN-H", PI2_4, s.F4, ball_lambda(n), s.F4_err)


def _geometry_entries(b: _Builder, n, area, per, R, w, diam) -> None:
    b.between("G1", inradius_width_ratio(n) * w, R, w / 2)
    b.le("G2", per, perimeter_diameter_bound(n, diam))
    b.between("G3", 1.0, per * R / area, float(n), strict_lo=True)


def _inner_set_entries(b: _Builder, n, area, per, beta, mu_bar, per_bar) -> None:
    b.ge("L1", mu_bar / area, q1(n, beta))
    b.le("L2", per_bar / per, q2(n, beta))


def verify(
    shape: ConvexPolygon | ClosedForm,
    tolerance: float = 1e-9,
    *,
    functionals: FunctionalValues | None = None,
    measurements: ShapeMeasurements | None = None,
    label: str | None = None,
    fem_tol: float = 1e-8,
    n_samples: int = 512,
) -> InequalityReport:
    """Evaluate every inequality in scope on one shape.

    FEM-dependent entries use ``max(tolerance, 10 * propagated error)``;
    purely geometric entries use ``1e-9`` relative to the compared values.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    b = _Builder(tolerance)
    if isinstance(shape, ConvexPolygon):
        m = measure(shape)
        if measurements is not None:
            for key in ("area", "perimeter", "inradius", "min_width", "diameter"):
                a, c = getattr(m, key), getattr(measurements, key)
                if abs(a - c) > 1e-9 * max(abs(a), abs(c)):
                    raise ShapeMismatchError(f"{key} differs: {c} given, {a} measured")
        f = functionals if functionals is not None else solve_functionals(shape, fem_tol)
        if not (f.torsion > 0 and f.lambda1 > 0):
            raise ShapeMismatchError("functional values must be positive")
        s = functional_suite(m, f)
        _chain_entries(b, s, 2)
        _common_entries(b, s, 2)
        cst = CONSTANTS
        b.ge("Q5", s.beta, cst.K2D * s.alpha)
        g1, g2, _, _ = s.gaps
        b.ge("Q6", g1, cst.C3_2D * s.alpha, s.F1_err)
        b.ge("Q7", g2, cst.C4_2D * s.alpha, s.F2_err)
        tbar = m.area / m.perimeter
        inner = erode(shape, tbar)
        _inner_set_entries(b, 2, m.area, m.perimeter, s.beta, inner.area, inner.perimeter)
        _geometry_entries(b, 2, m.area, m.perimeter, m.inradius, m.min_width, m.diameter)
        prof = inner_profile(shape, n_samples)
        _profile_entries(b, m.area, m.perimeter, m.inradius, prof.t, prof.mu, prof.per, prof.slope)
        bnd: BoundValues = compute_bounds(prof)
        b.between("BND-T", bnd.web_torsion, f.torsion, bnd.makai_torsion_upper, f.torsion_error)
        b.le("BND-L", f.lambda1, bnd.polya_lambda_upper, f.lambda1_error)
        return InequalityReport(label or "polygon", tuple(b.entries))

    if functionals is not None or measurements is not None:
        raise ShapeMismatchError("closed-form shapes carry their own values")
    n = shape.dim
    s = functional_suite(shape)
    _chain_entries(b, s, n)
    _common_entries(b, s, n)
    tbar = shape.area / shape.perimeter
    mu_bar, per_bar = shape.inner(tbar)
    _inner_set_entries(b, n, shape.area, shape.perimeter, s.beta, mu_bar, per_bar)
    _geometry_entries(b, n, shape.area, shape.perimeter, shape.inradius, shape.width, shape.diameter)
    t = np.linspace(0.0, shape.inradius, 257)
    mu, p = shape.inner(t)
    worst = int(np.argmin(mu / shape.area - (1.0 - shape.perimeter * t / shape.area)))
    b.ge("PROF-1", mu[worst] / shape.area, 1.0 - shape.perimeter * t[worst] / shape.area)
    return InequalityReport(label or getattr(shape, "label", f"closed-form n={n}"), tuple(b.entries))


# ---------------------------------------------------------------------------
# empirical constants


def empirical_constant(
    family_sweep: Iterable[Sequence[float]], remainder: str = "alpha", power: float = 1.0
) -> float:
    """Smallest ``gap / remainder**power`` over sweep points ``(alpha, beta, gap)``.

    No constant larger than the returned value can make ``gap >= K * remainder**power``
    hold on every sampled shape, so it bounds the best constant from above.
    """
    if remainder not in ("alpha", "beta"):
        raise ValueError("remainder must be 'alpha' or 'beta'")
    pts = [tuple(map(float, p)) for p in family_sweep]
    if not pts:
        raise ValueError("empty sweep")
    idx = 0 if remainder == "alpha" else 1
    return min(p[2] / p[idx] ** power for p in pts)
