"""
Moment inequalities for radial profiles in the plane: the convexity of the segment moment omega, the segment
rearrangement inequality, the vertex-count bound for clipped Voronoi partitions and the moment theorem and lemma
comparing a polygon with the regular polygon of the same area.

Profiles here act on the distance |x|, not on its square as the torus kernels do.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, List, NamedTuple, Optional

import numpy as np
from scipy import optimize

from quadrature import ConvexPolygon, QuadratureConfig, integrate_1d, integrate_polygon
from ts_errors import (AreaOutOfRangeError, BadParameterError, DegenerateRegionError, DomainError,
                       DuplicateSitesError, NotMonotoneError, OriginOutsideError)

BISECTION_TOL = 1e-13
CONVEXITY_TOL = 1e-9
INEQUALITY_TOL = 1e-9
SITE_SEPARATION = 1e-9
VERTEX_MERGE = 1e-9
ANGLE_TOL = 1e-9

logger = logging.getLogger(__name__)


class ProfileKind(str, enum.Enum):
    NON_INCREASING = "non-increasing"
    INCREASING = "increasing"


@dataclass(frozen=True)
class DistanceProfile:
    """A radial profile f acting on the distance |x|. ``profile`` must accept numpy arrays."""
    profile: Callable
    label: str
    kind: ProfileKind = ProfileKind.NON_INCREASING

    def __call__(self, t):
        return np.asarray(self.profile(np.asarray(t, dtype=float)), dtype=float)

    def at_points(self, points, center=None) -> np.ndarray:
        """Evaluate f(|x - center|) on an (N, 2) array of points."""
        points = np.asarray(points, dtype=float)
        if center is not None:
            points = points - np.asarray(center, dtype=float)
        return self(np.sqrt((points ** 2).sum(axis=-1)))


def _constant(t):
    return np.ones_like(t)


def _exponential(t, rate):
    return np.exp(-rate * t)


def _gaussian(t, length):
    return np.exp(-(t / length) ** 2)


def _linear(t, reach):
    return np.clip(1 - t / reach, 0.0, None)


def _identity(t):
    return np.asarray(t, dtype=float).copy()


def make_distance_profile(name: str, *params: float) -> DistanceProfile:
    """
    Build a distance profile.

    :param name: "constant", "exp" (rate, default 1), "gaussian" (length), "linear" (reach: f(t) = max(0, 1 - t/reach))
                 or "identity" (the increasing profile f(t) = t)
    """
    params = tuple(float(x) for x in params)
    if any(not (math.isfinite(x) and x > 0) for x in params):
        raise BadParameterError(f"Profile '{name}' needs positive parameters, got {params}")
    if name == "constant" and not params:
        return DistanceProfile(_constant, "constant")
    if name == "exp" and len(params) <= 1:
        rate = params[0] if params else 1.0
        return DistanceProfile(partial(_exponential, rate=rate), f"exp:{rate!r}")
    if name == "gaussian" and len(params) == 1:
        return DistanceProfile(partial(_gaussian, length=params[0]), f"gaussian:{params[0]!r}")
    if name == "linear" and len(params) == 1:
        return DistanceProfile(partial(_linear, reach=params[0]), f"linear:{params[0]!r}")
    if name == "identity" and not params:
        return DistanceProfile(_identity, "identity", ProfileKind.INCREASING)
    raise BadParameterError(f"Unknown distance profile '{name}' with parameters {params}")


def parse_distance_profile(spec: str) -> DistanceProfile:
    name, *raw = spec.strip().split(":")
    try:
        params = [float(x) for x in raw]
    except ValueError:
        raise BadParameterError(f"Profile spec '{spec}' has a non-numeric parameter")
    return make_distance_profile(name, *params)


def _require_non_increasing(f: DistanceProfile, reach: float, n: int = 1000):
    t = np.linspace(0.0, reach, n)
    rises = np.flatnonzero(np.diff(f(t)) > 0)
    if len(rises):
        pair = (float(t[rises[0]]), float(t[rises[0] + 1]))
        raise NotMonotoneError(f"Profile '{f.label}' increases between {pair[0]!r} and {pair[1]!r}", witness=pair)


@dataclass(frozen=True)
class Disc:
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise BadParameterError(f"Disc radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


def segment_area(r: float, h: float) -> float:
    """Area of the part of the disc of radius r beyond the chord at signed offset h from the center."""
    h = min(max(h, -r), r)
    return r * r * math.acos(h / r) - h * math.sqrt(max(r * r - h * h, 0.0))


@dataclass(frozen=True)
class CircularSegment:
    """The segment {x : x_1 >= h} of a disc, with its area."""
    disc: Disc
    h: float
    area: float


def segment_from_area(d: Disc, s: float, tol: float = BISECTION_TOL) -> CircularSegment:
    """
    Find the chord offset of the segment with area ``s`` by bisection.

    :raises AreaOutOfRangeError: If s is negative or exceeds the disc area
    """
    r = d.radius
    if not (math.isfinite(s) and 0 <= s <= d.area * (1 + 1e-15)):
        raise AreaOutOfRangeError(f"Segment area must lie in [0, {d.area!r}], got {s!r}")
    if s == 0:
        return CircularSegment(d, r, 0.0)
    if s >= d.area:
        return CircularSegment(d, -r, d.area)
    h = optimize.bisect(lambda x: segment_area(r, x) - s, -r, r, xtol=tol * r, maxiter=400)
    return CircularSegment(d, float(h), float(s))


def _radial_moment(f: DistanceProfile, rho: float, cfg: QuadratureConfig) -> float:
    """int_0^rho f(t) t dt."""
    return integrate_1d(0.0, rho, lambda t: float(f(t)) * t, cfg).value


def omega(d: Disc, s: float, f: DistanceProfile, cfg: QuadratureConfig = None) -> float:
    """
    The moment of the segment with area s: the integral of f(|x|) over it.

    In polar coordinates the circle of radius rho meets the segment {x_1 >= h} in an arc of angle
    2 arccos(h / rho) (clipped to [0, 2 pi]), which reduces the integral to one dimension.
    """
    cfg = cfg or QuadratureConfig()
    segment = segment_from_area(d, s)
    r, h = d.radius, segment.h
    if segment.area == 0:
        return 0.0

    def ring(rho):
        if rho == 0:
            return 0.0
        return float(f(rho)) * rho * 2 * math.acos(min(max(h / rho, -1.0), 1.0))

    return integrate_1d(max(h, 0.0), r, ring, cfg, breakpoints=[abs(h)]).value


@dataclass
class OmegaConvexityReport:
    radius: float
    profile: str
    n_samples: int
    min_second_difference: float
    increasing: bool
    violations: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "profile": self.profile,
            "n_samples": self.n_samples,
            "min_second_difference": self.min_second_difference,
            "increasing": self.increasing,
            "violations": [list(v) for v in self.violations],
            "ok": self.ok,
        }


def omega_convexity_check(d: Disc, f: DistanceProfile, n_samples: int = 50,
                          cfg: QuadratureConfig = None) -> OmegaConvexityReport:
    """
    Sample omega on s_j = j |K| / (2 n), j = 0..n-1, and report every second difference below -1e-9 with the
    (s_{j-1}, s_j, s_{j+1}) triple as witness.
    """
    if n_samples < 3:
        raise BadParameterError(f"Need at least 3 samples, got {n_samples}")
    s = d.area / 2 * np.arange(n_samples) / n_samples
    # second differences amplify quadrature noise
    cfg = (cfg or QuadratureConfig()).with_changes(rel_tol=1e-12, abs_tol=1e-14)
    values = np.array([omega(d, float(x), f, cfg) for x in s])
    second = values[:-2] - 2 * values[1:-1] + values[2:]
    violations = [(float(s[j]), float(s[j + 1]), float(s[j + 2]))
                  for j in np.flatnonzero(second < -CONVEXITY_TOL)]
    if violations:
        logger.debug(f"omega is not convex for '{f.label}' on r = {d.radius!r}: {len(violations)} violation(s)")
    return OmegaConvexityReport(d.radius, f.label, n_samples, float(second.min()),
                                bool(np.all(np.diff(values) > 0)), violations)


class Lemma2Result(NamedTuple):
    lhs: float
    rhs: float
    area: float
    ok: bool


def lemma2_check(d: Disc, a_pt, b_pt, f: DistanceProfile, cfg: QuadratureConfig = None) -> Lemma2Result:
    """
    Compare the moment of the region R cut from the disc by the path a' -> a -> b -> b' and the arc b' -> a'
    (a', b' the radial projections of a, b onto the circle) with the moment of the segment of the same area.

    R is the circular sector between the rays through a and b minus the triangle (o, a, b); its moment is computed in
    polar coordinates around the origin.

    :return: Lemma2Result with lhs = integral over R, rhs = omega(|R|) and ok = rhs <= lhs + 1e-9
    :raises DegenerateRegionError: If a, b and the origin are collinear
    """
    cfg = cfg or QuadratureConfig()
    r = d.radius
    a_pt = np.asarray(a_pt, dtype=float)
    b_pt = np.asarray(b_pt, dtype=float)
    for name, pt in (("a", a_pt), ("b", b_pt)):
        if np.hypot(*pt) > r * (1 + 1e-12):
            raise BadParameterError(f"Point {name} = {pt.tolist()} lies outside the disc")
        if np.hypot(*pt) < ANGLE_TOL * r:
            raise DegenerateRegionError(f"Point {name} coincides with the origin")
    start = math.atan2(b_pt[1], b_pt[0])
    sweep = math.atan2(a_pt[1], a_pt[0]) - start
    sweep = (sweep + math.pi) % (2 * math.pi) - math.pi
    if abs(sweep) < ANGLE_TOL or math.pi - abs(sweep) < ANGLE_TOL:
        raise DegenerateRegionError(f"a = {a_pt.tolist()}, b = {b_pt.tolist()} and the origin are collinear")
    direction = 1.0 if sweep > 0 else -1.0
    span = abs(sweep)

    chord = a_pt - b_pt
    normal = np.array([chord[1], -chord[0]])
    reach = float(normal @ b_pt)

    def triangle_column(theta):
        u = np.array([math.cos(start + direction * theta), math.sin(start + direction * theta)])
        return _radial_moment(f, reach / float(normal @ u), cfg)

    cross = abs(a_pt[0] * b_pt[1] - a_pt[1] * b_pt[0])
    area = 0.5 * r * r * span - 0.5 * cross
    sector = span * _radial_moment(f, r, cfg)
    triangle = integrate_1d(0.0, span, triangle_column, cfg).value
    lhs = sector - triangle
    rhs = omega(d, min(max(area, 0.0), d.area), f, cfg)
    return Lemma2Result(lhs, rhs, area, rhs <= lhs + INEQUALITY_TOL)


@dataclass
class ClippedVoronoi:
    container: ConvexPolygon
    sites: np.ndarray
    cells: List[ConvexPolygon]
    vertex_counts: List[int]

    @property
    def total_area(self) -> float:
        return float(sum(cell.area for cell in self.cells))

    def nearest_site(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dist = ((points[:, None, :] - self.sites[None, :, :]) ** 2).sum(axis=-1)
        return dist.argmin(axis=1)


def clipped_voronoi(C: ConvexPolygon, sites) -> ClippedVoronoi:
    """
    Voronoi partition of C: each cell is C clipped by the bisector half-planes against every other site.

    Sites outside C are first projected onto C.

    :raises DuplicateSitesError: If two (projected) sites are closer than 1e-9
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    if sites.ndim != 2 or sites.shape[1] != 2 or len(sites) == 0:
        raise BadParameterError(f"Sites must be a non-empty (n, 2) array, got shape {sites.shape}")
    inside = C.contains(sites)
    sites = np.array([s if ok else C.nearest_point(s) for s, ok in zip(sites, inside)])
    if len(sites) > 1:
        gaps = np.sqrt(((sites[:, None, :] - sites[None, :, :]) ** 2).sum(axis=-1))
        gaps[np.diag_indices(len(sites))] = np.inf
        if gaps.min() <= SITE_SEPARATION:
            i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
            raise DuplicateSitesError(f"Sites {i} and {j} coincide at {sites[i].tolist()}")

    cells = []
    for i, site in enumerate(sites):
        cell = C
        for j, other in enumerate(sites):
            if i == j:
                continue
            normal = other - site
            cell = cell.clip(normal, float(normal @ (site + other) / 2))
            if cell is None:
                raise DegenerateRegionError(f"Voronoi cell of site {i} collapsed")
        cells.append(cell)
    counts = [cell.simplified(VERTEX_MERGE).n_vertices for cell in cells]
    return ClippedVoronoi(C, sites, cells, counts)


class VertexCountResult(NamedTuple):
    N: int
    bound: int
    ok: bool


def vertex_count_check(v: ClippedVoronoi) -> VertexCountResult:
    """
    Total number of cell vertices N against 6n.

    :raises DomainError: If the container has more than six corners
    """
    if v.container.simplified(VERTEX_MERGE).n_vertices > 6:
        raise DomainError("The vertex-count bound is stated for containers with at most six corners")
    total = int(sum(v.vertex_counts))
    bound = 6 * len(v.sites)
    return VertexCountResult(total, bound, total <= bound)


class MomentResult(NamedTuple):
    lhs: float
    rhs: float
    margin: float
    ok: bool


def _polygon_moment(poly: ConvexPolygon, f: DistanceProfile, center, cfg: QuadratureConfig):
    center = np.asarray(center, dtype=float)
    apex = center if poly.contains(center)[0] else None
    result = integrate_polygon(poly, partial(f.at_points, center=center), cfg, apex=apex)
    return result.value, result.error


def moment_theorem_check(C: ConvexPolygon, sites, f: DistanceProfile, cfg: QuadratureConfig = None) -> MomentResult:
    """
    Compare the integral over C of f(distance to the nearest site) with n times the moment of the regular hexagon of
    area |C| / n centered at the origin.

    :param C: A convex polygon with at most six corners
    :param sites: The n sites (projected onto C if outside)
    :param f: A non-increasing distance profile
    """
    cfg = cfg or QuadratureConfig()
    if C.simplified(VERTEX_MERGE).n_vertices > 6:
        raise DomainError("The moment theorem is stated for containers with at most six corners")
    _require_non_increasing(f, C.diameter)
    v = clipped_voronoi(C, sites)
    n = len(v.sites)
    lhs, lhs_err = 0.0, 0.0
    for cell, site in zip(v.cells, v.sites):
        value, err = _polygon_moment(cell, f, site, cfg)
        lhs += value
        lhs_err += err
    hexagon = ConvexPolygon.regular(6, C.area / n)
    rhs_one, rhs_err = _polygon_moment(hexagon, f, (0.0, 0.0), cfg)
    rhs = n * rhs_one
    margin = rhs - lhs
    return MomentResult(lhs, rhs, margin, margin >= -(INEQUALITY_TOL + lhs_err + n * rhs_err))


def moment_lemma_check(C: ConvexPolygon, f: DistanceProfile, cfg: QuadratureConfig = None,
                       translate: bool = True) -> MomentResult:
    """
    Compare the moment of C about the origin with that of the regular polygon with as many corners and the same area.

    If the origin is outside C and ``translate`` is set, C is first moved by minus its nearest point to the origin;
    that moves every point of C closer to the origin.

    :raises OriginOutsideError: If the origin is outside C and ``translate`` is False
    """
    cfg = cfg or QuadratureConfig()
    n = C.simplified(VERTEX_MERGE).n_vertices
    if not 3 <= n <= 12:
        raise DomainError(f"The moment lemma is checked for 3 to 12 corners, got {n}")
    _require_non_increasing(f, C.diameter + np.hypot(*C.centroid))
    origin = np.zeros(2)
    if not C.contains(origin)[0]:
        if not translate:
            raise OriginOutsideError("The polygon does not contain the origin")
        C = C.translated(-C.nearest_point(origin))
    lhs, lhs_err = _polygon_moment(C, f, origin, cfg)
    rhs, rhs_err = _polygon_moment(ConvexPolygon.regular(n, C.area), f, origin, cfg)
    margin = rhs - lhs
    return MomentResult(lhs, rhs, margin, margin >= -(INEQUALITY_TOL + lhs_err + rhs_err))


def random_convex_polygon(rng: np.random.Generator, n_vertices: int, min_radius: float = 0.5,
                          max_radius: float = 1.5) -> ConvexPolygon:
    """
    A random convex polygon with at most ``n_vertices`` corners: sorted random angles on a star of random radii,
    then the convex hull.
    """
    while True:
        angles = np.sort(rng.uniform(0, 2 * math.pi, n_vertices))
        radii = rng.uniform(min_radius, max_radius, n_vertices)
        points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
        poly = ConvexPolygon.from_points(points)
        simplified = poly.simplified(VERTEX_MERGE)
        if simplified.n_vertices >= 3 and simplified.area > 1e-3:
            return simplified


def random_points_in(poly: ConvexPolygon, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points drawn uniformly from a convex polygon by rejection from its bounding box."""
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    found = []
    while len(found) < n:
        candidates = rng.uniform(lo, hi, size=(4 * n, 2))
        found.extend(candidates[poly.contains(candidates, tol=0.0)])
    return np.array(found[:n])
