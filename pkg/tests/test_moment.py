import math

import numpy as np
import pytest

from moment import (Disc, ProfileKind, clipped_voronoi, lemma2_check, make_distance_profile, moment_lemma_check,
                    moment_theorem_check, omega, omega_convexity_check, parse_distance_profile,
                    random_convex_polygon, random_points_in, segment_area, segment_from_area, vertex_count_check)
from quadrature import ConvexPolygon
from ts_errors import (AreaOutOfRangeError, BadParameterError, DegenerateRegionError, DomainError,
                       DuplicateSitesError, NotMonotoneError, OriginOutsideError)

UNIT_SQUARE = ConvexPolygon([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def exp_profile():
    return make_distance_profile("exp")


def test_distance_profiles():
    assert parse_distance_profile("exp").label == "exp:1.0"
    assert parse_distance_profile("exp:2").label == "exp:2.0"
    assert float(parse_distance_profile("linear:2")(1.0)) == pytest.approx(0.5)
    assert float(parse_distance_profile("linear:2")(3.0)) == 0.0
    assert float(parse_distance_profile("gaussian:1")(1.0)) == pytest.approx(math.exp(-1))
    assert parse_distance_profile("identity").kind == ProfileKind.INCREASING
    assert float(make_distance_profile("exp").at_points([[3.0, 4.0]], center=[0.0, 0.0])[0]) == \
        pytest.approx(math.exp(-5))
    for spec in ("cubic", "exp:0", "linear", "exp:x", "constant:1"):
        with pytest.raises(BadParameterError):
            parse_distance_profile(spec)


def test_segment_from_area():
    d = Disc(1.0)
    segment = segment_from_area(d, 0.5)
    assert segment.h == pytest.approx(0.5675398, abs=1e-6)
    assert segment_area(1.0, segment.h) == pytest.approx(0.5, abs=1e-12)
    assert segment_from_area(d, 0.0).h == 1.0
    assert segment_from_area(d, d.area).h == -1.0
    assert segment_from_area(d, d.area / 2).h == pytest.approx(0.0, abs=1e-12)
    assert segment_from_area(Disc(2.0), 2.0).h == pytest.approx(2 * 0.5675398, abs=1e-6)
    with pytest.raises(AreaOutOfRangeError):
        segment_from_area(d, -0.1)
    with pytest.raises(AreaOutOfRangeError):
        segment_from_area(d, 4.0)
    with pytest.raises(BadParameterError):
        Disc(0.0)


def test_omega_values():
    d = Disc(1.0)
    constant = make_distance_profile("constant")
    assert omega(d, 0.7, constant) == pytest.approx(0.7, abs=1e-10)
    assert omega(d, 0.0, constant) == 0.0
    assert omega(d, math.pi / 2, make_distance_profile("linear", 1.0)) == pytest.approx(math.pi / 6, abs=1e-9)
    assert omega(d, math.pi, make_distance_profile("linear", 1.0)) == pytest.approx(math.pi / 3, abs=1e-9)


@pytest.mark.parametrize("spec", ["constant", "exp", "gaussian:1", "linear:2"])
@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
def test_omega_is_convex_for_non_increasing_profiles(spec, radius):
    report = omega_convexity_check(Disc(radius), parse_distance_profile(spec), n_samples=20)
    assert report.ok, report.to_dict()
    assert report.increasing


def test_omega_is_not_convex_for_an_increasing_profile():
    report = omega_convexity_check(Disc(1.0), make_distance_profile("identity"), n_samples=20)
    assert not report.ok
    s0, s1, s2 = report.violations[0]
    assert s0 < s1 < s2
    with pytest.raises(BadParameterError):
        omega_convexity_check(Disc(1.0), make_distance_profile("exp"), n_samples=2)


def test_lemma2_is_an_equality_for_the_constant_profile():
    result = lemma2_check(Disc(1.0), [0.3, 0.2], [-0.4, 0.5], make_distance_profile("constant"))
    assert result.lhs == pytest.approx(result.area, abs=1e-10)
    assert result.rhs == pytest.approx(result.area, abs=1e-10)
    assert result.ok


def test_lemma2_on_the_circle_is_a_segment(exp_profile):
    a = [math.cos(0.3), math.sin(0.3)]
    b = [math.cos(2.1), math.sin(2.1)]
    result = lemma2_check(Disc(1.0), a, b, exp_profile)
    assert result.area == pytest.approx(segment_area(1.0, math.cos(0.9)), abs=1e-12)
    assert result.lhs == pytest.approx(result.rhs, abs=1e-8)
    assert result.ok


def test_lemma2_holds_for_random_pairs(rng, exp_profile):
    """
    The region cut by a chord path has at least the moment of the segment with its area.

    :param rng: The seeded generator fixture
    :param exp_profile: The exp(-t) profile fixture
    """
    for radius in (0.5, 1.0, 2.0):
        d = Disc(radius)
        checked = 0
        while checked < 60:
            a, b = rng.uniform(-radius, radius, size=(2, 2))
            if np.hypot(*a) > radius or np.hypot(*b) > radius:
                continue
            result = lemma2_check(d, a, b, exp_profile)
            assert result.ok, (a, b, result)
            assert 0 < result.area < d.area
            checked += 1


def test_lemma2_degenerate_inputs(exp_profile):
    d = Disc(1.0)
    with pytest.raises(DegenerateRegionError):
        lemma2_check(d, [0.5, 0.0], [-0.25, 0.0], exp_profile)
    with pytest.raises(DegenerateRegionError):
        lemma2_check(d, [0.0, 0.0], [0.5, 0.5], exp_profile)
    with pytest.raises(BadParameterError):
        lemma2_check(d, [1.5, 0.0], [0.0, 0.5], exp_profile)


def test_voronoi_of_a_single_site_is_the_container():
    v = clipped_voronoi(UNIT_SQUARE, [[0.3, 0.4]])
    assert v.cells[0].area == pytest.approx(1.0)
    assert v.vertex_counts == [4]


def test_voronoi_of_two_sites_halves_the_square():
    v = clipped_voronoi(UNIT_SQUARE, [[0.25, 0.5], [0.75, 0.5]])
    assert [cell.area for cell in v.cells] == pytest.approx([0.5, 0.5])
    assert v.vertex_counts == [4, 4]
    assert vertex_count_check(v) == (8, 12, True)


def test_voronoi_cells_tile_the_container(rng):
    C = random_convex_polygon(rng, 6)
    sites = random_points_in(C, rng, 8)
    v = clipped_voronoi(C, sites)
    assert v.total_area == pytest.approx(C.area, abs=1e-12)
    centroids = np.array([cell.centroid for cell in v.cells])
    assert v.nearest_site(centroids).tolist() == list(range(8))
    assert vertex_count_check(v).ok


def test_voronoi_projects_outside_sites():
    v = clipped_voronoi(UNIT_SQUARE, [[2.0, 0.5], [0.25, 0.5]])
    assert v.sites[0].tolist() == [1.0, 0.5]
    assert v.cells[0].vertices[:, 0].min() == pytest.approx(0.625)


def test_voronoi_rejects_duplicate_sites():
    with pytest.raises(DuplicateSitesError):
        clipped_voronoi(UNIT_SQUARE, [[0.2, 0.2], [0.2, 0.2]])
    with pytest.raises(DuplicateSitesError):
        clipped_voronoi(UNIT_SQUARE, [[1.5, 0.5], [1.2, 0.5]])
    with pytest.raises(BadParameterError):
        clipped_voronoi(UNIT_SQUARE, np.zeros((0, 2)))


def test_vertex_count_needs_a_hexagonal_container():
    heptagon = ConvexPolygon.regular(7, 1.0)
    with pytest.raises(DomainError):
        vertex_count_check(clipped_voronoi(heptagon, [[0.0, 0.0]]))


def test_moment_theorem_is_an_equality_for_the_regular_hexagon(exp_profile):
    result = moment_theorem_check(ConvexPolygon.regular(6, 1.0), [[0.0, 0.0]], exp_profile)
    assert result.margin == pytest.approx(0.0, abs=1e-9)
    assert result.ok


def test_moment_theorem_is_strict_for_the_square(exp_profile):
    result = moment_theorem_check(UNIT_SQUARE, [[0.5, 0.5]], exp_profile)
    assert result.margin > 1e-4
    assert result.ok


def test_moment_theorem_with_the_constant_profile(rng):
    C = random_convex_polygon(rng, 6)
    result = moment_theorem_check(C, random_points_in(C, rng, 5), make_distance_profile("constant"))
    assert result.lhs == pytest.approx(C.area, abs=1e-10)
    assert result.margin == pytest.approx(0.0, abs=1e-10)
    assert result.ok


def test_moment_theorem_on_random_configurations(rng, exp_profile):
    for _ in range(20):
        C = random_convex_polygon(rng, 6)
        sites = random_points_in(C, rng, int(rng.integers(1, 9)))
        result = moment_theorem_check(C, sites, exp_profile)
        assert result.ok, (C, sites, result)


def test_moment_theorem_rejects_increasing_profiles_and_large_containers(exp_profile):
    with pytest.raises(NotMonotoneError):
        moment_theorem_check(UNIT_SQUARE, [[0.5, 0.5]], make_distance_profile("identity"))
    with pytest.raises(DomainError):
        moment_theorem_check(ConvexPolygon.regular(8, 1.0), [[0.0, 0.0]], exp_profile)


def test_moment_lemma_is_an_equality_for_regular_polygons(exp_profile):
    for n in (3, 5, 12):
        result = moment_lemma_check(ConvexPolygon.regular(n, 1.0, rotation=0.4), exp_profile)
        assert result.margin == pytest.approx(0.0, abs=1e-8)
        assert result.ok


def test_moment_lemma_is_strict_for_a_stretched_hexagon(exp_profile):
    stretched = ConvexPolygon.regular(6, 1.0).transformed(np.diag([2.0, 0.5]))
    result = moment_lemma_check(stretched, exp_profile)
    assert result.margin > 1e-4
    assert result.ok


def test_moment_lemma_with_the_constant_profile():
    result = moment_lemma_check(ConvexPolygon.regular(4, 1.0).translated([0.2, 0.1]), make_distance_profile("constant"))
    assert result.lhs == pytest.approx(1.0, abs=1e-10)
    assert result.rhs == pytest.approx(1.0, abs=1e-10)


def test_moment_lemma_translates_polygons_away_from_the_origin(exp_profile):
    far = UNIT_SQUARE.translated([3.0, 1.0])
    moved = moment_lemma_check(far, exp_profile)
    on_corner = moment_lemma_check(UNIT_SQUARE, exp_profile)
    assert moved.lhs == pytest.approx(on_corner.lhs, abs=1e-10)
    assert moved.ok
    with pytest.raises(OriginOutsideError):
        moment_lemma_check(far, exp_profile, translate=False)


def test_moment_lemma_corner_range(exp_profile):
    with pytest.raises(DomainError):
        moment_lemma_check(ConvexPolygon.regular(13, 1.0), exp_profile)


def test_random_generators(rng):
    for n in (3, 6, 12):
        C = random_convex_polygon(rng, n)
        assert 3 <= C.n_vertices <= n
        points = random_points_in(C, rng, 50)
        assert points.shape == (50, 2)
        assert C.contains(points).all()
