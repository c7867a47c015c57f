import math

import numpy as np
import pytest
from conftest import ngon, rect, unit_square
from oracles import halfplane_profile, quad

from convexshape.bounds import (
    BoundValues,
    compute_bounds,
    makai_torsion_upper,
    polya_lambda_upper,
    web_torsion_lower,
)
from convexshape.geometry import inner_profile, inradius
from convexshape.harness.families import random_polygon
from convexshape.pde import solve_functionals


def rectangle_profile(a, b):
    """Exact inner parallel sets of an ``a`` by ``b`` rectangle."""
    return (lambda t: (a - 2 * t) * (b - 2 * t)), (lambda t: 2 * (a - 2 * t) + 2 * (b - 2 * t)), min(a, b) / 2


def quad_bounds(mu, per, R):
    omega = mu(0.0)
    web = quad(lambda t: mu(t) ** 2 / per(t) if per(t) > 0 else 0.0, 0, R)
    makai = quad(lambda t: t * t * per(t), 0, R)
    k = math.pi / (2 * omega)
    integral = quad(lambda t: math.sin(k * mu(t)) ** 2 * per(t) ** 3, 0, R)
    polya = math.pi**2 / (2 * omega**3) * integral
    return web, makai, polya


class TestSquare:
    def test_web(self):
        assert web_torsion_lower(inner_profile(unit_square())) == pytest.approx(1 / 32, rel=1e-12)

    def test_makai(self):
        assert makai_torsion_upper(inner_profile(unit_square())) == pytest.approx(1 / 24, rel=1e-12)

    def test_polya_matches_quadrature(self):
        _, _, polya = quad_bounds(*rectangle_profile(1, 1))
        assert polya_lambda_upper(inner_profile(unit_square())) == pytest.approx(polya, rel=1e-6)

    def test_polya_bracket(self):
        lam = 2 * math.pi**2
        value = polya_lambda_upper(inner_profile(unit_square()))
        assert lam <= value <= 1.45 * lam

    def test_polya_closed_form(self):
        # on the square, mu = (1-2t)^2 and P = 4(1-2t); substituting s = 1-2t gives 2 pi^2 + 8
        value = polya_lambda_upper(inner_profile(unit_square()))
        assert value == pytest.approx(2 * math.pi**2 + 8, rel=1e-6)


class TestDisk:
    def test_web(self, disk256):
        assert web_torsion_lower(inner_profile(disk256)) == pytest.approx(math.pi / 8, rel=1e-3)

    def test_makai(self, disk256):
        assert makai_torsion_upper(inner_profile(disk256)) == pytest.approx(math.pi / 6, rel=1e-3)

    def test_web_ratio_improves_with_resolution(self):
        ratios = []
        for k in (16, 64, 256):
            poly = ngon(k)
            ratios.append(web_torsion_lower(inner_profile(poly)) / solve_functionals(poly).torsion)
        assert ratios[0] < ratios[1] < ratios[2] <= 1.0 + 1e-6
        assert ratios[2] >= 0.995


class TestRectangles:
    @pytest.mark.parametrize("a", [0.5, 0.2, 0.05])
    def test_against_quadrature(self, a):
        web, makai, polya = quad_bounds(*rectangle_profile(1, a))
        b = compute_bounds(rect(a))
        assert b.web_torsion == pytest.approx(web, rel=1e-9)
        assert b.makai_torsion_upper == pytest.approx(makai, rel=1e-9)
        assert b.polya_lambda_upper == pytest.approx(polya, rel=1e-6)

    def test_web_thinning_limit(self):
        values = []
        for a in (0.1, 0.01, 0.001):
            p = rect(a)
            values.append(web_torsion_lower(inner_profile(p)) * p.perimeter**2 / p.area**3)
        assert abs(values[-1] - 1 / 3) < abs(values[0] - 1 / 3)
        assert values[-1] == pytest.approx(1 / 3, rel=1e-2)

    @pytest.mark.parametrize("a", [0.2, 0.05])
    def test_makai_over_slab(self, a):
        # on a 1 by a rectangle the integral of d^2 is a^3/12 * (1 - a/2)
        ratio = makai_torsion_upper(inner_profile(rect(a))) / (a**3 / 12)
        assert ratio == pytest.approx(1 - a / 2, rel=1e-9)

    @pytest.mark.parametrize("a", [0.2, 0.05, 0.01])
    def test_polya_scaled_below_limit(self, a):
        p = rect(a)
        assert polya_lambda_upper(inner_profile(p)) * p.area**2 / p.perimeter**2 <= math.pi**2 / 4

    def test_polya_scaled_approaches_limit(self):
        scaled = [polya_lambda_upper(inner_profile(rect(a))) * (a / (2 + 2 * a)) ** 2 for a in (0.1, 0.01, 0.001)]
        assert scaled[0] < scaled[1] < scaled[2]
        assert scaled[-1] == pytest.approx(math.pi**2 / 4, rel=1e-2)


class TestRandomPolygons:
    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @pytest.mark.parametrize("seed", [1, 7])
    def test_against_halfplane_profile(self, seed):
        poly = random_polygon(seed)
        web, makai, polya = quad_bounds(*halfplane_profile(poly.vertices))
        b = compute_bounds(poly)
        assert b.web_torsion == pytest.approx(web, rel=1e-6)
        assert b.makai_torsion_upper == pytest.approx(makai, rel=1e-6)
        assert b.polya_lambda_upper == pytest.approx(polya, rel=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_sandwich(self, seed):
        poly = random_polygon(seed)
        b = compute_bounds(poly)
        f = solve_functionals(poly)
        r = inradius(poly)
        assert b.web_torsion < f.torsion - 10 * f.torsion_error
        assert f.torsion + 10 * f.torsion_error < b.makai_torsion_upper
        assert math.pi**2 / (4 * r * r) < f.lambda1 - 10 * f.lambda1_error
        assert f.lambda1 + 10 * f.lambda1_error < b.polya_lambda_upper

    @pytest.mark.parametrize("seed", range(5))
    def test_web_below_makai(self, seed):
        b = compute_bounds(random_polygon(seed))
        assert 0 < b.web_torsion <= b.makai_torsion_upper
        assert np.isfinite(b.polya_lambda_upper) and b.polya_lambda_upper > 0


class TestScaling:
    @pytest.mark.parametrize("k", [0.1, 4.0])
    def test_homogeneity(self, k):
        poly = random_polygon(11)
        b, bk = compute_bounds(poly), compute_bounds(poly.scaled(k))
        assert bk.web_torsion == pytest.approx(k**4 * b.web_torsion, rel=1e-9)
        assert bk.makai_torsion_upper == pytest.approx(k**4 * b.makai_torsion_upper, rel=1e-9)
        assert bk.polya_lambda_upper == pytest.approx(b.polya_lambda_upper / k**2, rel=1e-9)


def test_profile_and_polygon_inputs_agree():
    poly = random_polygon(4)
    assert compute_bounds(poly) == compute_bounds(inner_profile(poly))


def test_to_dict():
    d = compute_bounds(unit_square()).to_dict()
    assert set(d) == {"web_torsion", "makai_torsion_upper", "polya_lambda_upper"}
    assert isinstance(BoundValues(**d), BoundValues)
