import math

import numpy as np
import pytest

from cellgeom import EdgeFunctions, build_cell, circumradius, edge_functions, geodesic_dist_sq, wrap_to_cell
from conftest import random_params
from moduli import TorusParams, canonical_basis
from ts_errors import FoldingError, NumericalError


def test_cell_has_unit_area(rng):
    for p in random_params(rng, 30, b_max=3.0):
        assert build_cell(p).area == pytest.approx(1.0, abs=1e-12)


def test_vertex_counts():
    assert len(build_cell(TorusParams(0.0, 1.0)).vertices) == 4
    assert len(build_cell(TorusParams(0.0, 1.7)).vertices) == 4
    assert len(build_cell(TorusParams(0.2, 1.2)).vertices) == 6


def test_square_cell_is_the_centered_unit_square(square):
    cell = build_cell(square)
    assert sorted(map(tuple, np.round(cell.vertices, 12).tolist())) == [
        (-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]
    assert cell.r1 == pytest.approx(0.5)
    assert cell.r2 == pytest.approx(math.sqrt(0.5))


def test_every_vertex_lies_on_the_circumcircle(rng):
    for p in random_params(rng, 30):
        cell = build_cell(p)
        radii = np.hypot(cell.vertices[:, 0], cell.vertices[:, 1])
        assert np.allclose(radii, circumradius(p), atol=1e-12)


def test_inradius_is_the_distance_to_the_vertical_edge(rng):
    for p in random_params(rng, 10):
        cell = build_cell(p)
        assert cell.r1 == pytest.approx(cell.vertices[:, 0].max(), abs=1e-14)
        assert cell.r1 <= cell.r2


def test_equilateral_cell_is_a_regular_hexagon(equilateral):
    cell = build_cell(equilateral)
    v = cell.vertices
    edges = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
    assert len(v) == 6
    assert np.allclose(edges, edges[0], atol=1e-12)
    assert cell.r2 == pytest.approx(edges[0], abs=1e-12)


def test_half_height_matches_the_edge_function(rng):
    for p in random_params(rng, 10):
        e = edge_functions(p)
        assert e.half_height == pytest.approx(float(e.y2(e.x1)), abs=1e-13)
        assert e.half_height == pytest.approx(float(e.y1(-e.x1)), abs=1e-13)


@pytest.mark.parametrize("name", ["y1", "y2"])
def test_edge_derivatives_match_finite_differences(rng, name):
    """
    The closed-form a and b derivatives of y1 and y2 agree with central differences at a fixed x.

    :param rng: The seeded generator fixture
    :param name: Which edge function to check
    """
    h = 1e-6
    for p in random_params(rng, 10, a_range=(0.05, 0.45)):
        a, b = p.a, p.b + 0.5
        x = rng.uniform(-0.3, 0.3)
        e = EdgeFunctions(a, b)

        fd_a = (getattr(EdgeFunctions(a + h, b), name)(x) - getattr(EdgeFunctions(a - h, b), name)(x)) / (2 * h)
        fd_b = (getattr(EdgeFunctions(a, b + h), name)(x) - getattr(EdgeFunctions(a, b - h), name)(x)) / (2 * h)
        assert float(getattr(e, f"d{name}_da")(x)) == pytest.approx(float(fd_a), abs=1e-7)
        assert float(getattr(e, f"d{name}_db")(x)) == pytest.approx(float(fd_b), abs=1e-7)


def test_geodesic_distance_is_lattice_invariant_and_symmetric(rng):
    for p in random_params(rng, 10):
        B = canonical_basis(p)
        x = rng.uniform(-2, 2, size=(20, 2))
        y = rng.uniform(-2, 2, size=(20, 2))
        shift = B @ rng.integers(-3, 4, size=2)
        d = geodesic_dist_sq(p, x, y, cross_check=True)
        assert np.allclose(d, geodesic_dist_sq(p, x + shift, y), atol=1e-12)
        assert np.allclose(d, geodesic_dist_sq(p, y, x), atol=1e-12)
        assert np.all(d <= circumradius(p) ** 2 + 1e-12)


def test_geodesic_distance_inside_the_cell_is_euclidean(rng):
    for p in random_params(rng, 10):
        cell = build_cell(p)
        points = 0.95 * cell.vertices[rng.integers(len(cell.vertices), size=15)] * rng.uniform(0, 1, size=(15, 1))
        d = geodesic_dist_sq(p, points, np.zeros(2))
        assert np.allclose(d, (points ** 2).sum(axis=1), atol=1e-13)
    assert geodesic_dist_sq(TorusParams.square(), [0.2, 0.1], [0.0, 0.0]) == pytest.approx(0.05)


def test_wrap_to_cell(rng):
    for p in random_params(rng, 10):
        cell = build_cell(p)
        B = canonical_basis(p)
        for _ in range(10):
            x = rng.uniform(-5, 5, size=2)
            wrapped = wrap_to_cell(p, x)
            assert cell.polygon.contains(wrapped, tol=1e-9)[0]
            coords = np.linalg.solve(B, x - wrapped)
            assert np.allclose(coords, np.round(coords), atol=1e-9)



def test_wrapped_point_realizes_the_geodesic_distance(rng):
    for p in random_params(rng, 10):
        points = rng.uniform(-4, 4, size=(25, 2))
        distances = geodesic_dist_sq(p, points, np.zeros(2))
        wrapped = np.array([wrap_to_cell(p, x) for x in points])
        assert np.allclose(distances, (wrapped ** 2).sum(axis=1), rtol=0, atol=1e-12)


def test_wrap_to_cell_reports_a_fold_budget_overrun():
    with pytest.raises(FoldingError) as info:
        wrap_to_cell(TorusParams.square(), [2.3, -1.4], max_folds=0)
    assert isinstance(info.value, NumericalError)

def test_center_of_the_fundamental_parallelogram(rng):
    for p in random_params(rng, 5):
        center = build_cell(p).center
        assert np.allclose(center, [(p.a + 1) / (2 * math.sqrt(p.b)), math.sqrt(p.b) / 2], atol=1e-14)
