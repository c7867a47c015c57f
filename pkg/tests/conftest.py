import math

import numpy as np
import pytest
from hypothesis import assume, settings
from hypothesis import strategies as st

from convexshape.geometry import ConvexPolygon, DegeneratePolygonError

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def unit_square():
    return ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def rect(a, b=None):
    if b is None:
        a, b = 1.0, a
    return ConvexPolygon([[0, 0], [a, 0], [a, b], [0, b]])


def ngon(k, r=1.0):
    phi = 2 * math.pi * np.arange(k) / k
    return ConvexPolygon(r * np.column_stack([np.cos(phi), np.sin(phi)]))


RIGHT_TRIANGLE = [[0, 0], [1, 0], [0, 1]]
EQUILATERAL = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def right_triangle():
    return ConvexPolygon(RIGHT_TRIANGLE)


@pytest.fixture(scope="session")
def disk256():
    return ngon(256)


@st.composite
def convex_polygons(draw, min_points=4, max_points=30, min_area=0.0):
    n = draw(st.integers(min_points, max_points))
    coords = draw(
        st.lists(
            st.tuples(st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False)),
            min_size=n,
            max_size=n,
        )
    )
    try:
        poly = ConvexPolygon.from_points(np.array(coords))
    except DegeneratePolygonError:
        assume(False)
    assume(poly.area > min_area)
    return poly
