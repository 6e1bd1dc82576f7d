# Deterministic adaptive quadrature over convex polygons and intervals.
import itertools
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.spatial import ConvexHull

from ts_errors import BadParameterError, DepthExceededError, NonFiniteIntegrandError

CONVEXITY_TOL = 1e-12
MERGE_TOL = 1e-12

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Tolerances and budgets shared by every integral in the toolkit.

    :param rel_tol: Relative tolerance on the integral value
    :param abs_tol: Absolute tolerance on the integral value
    :param max_depth: Maximum number of 4-way subdivisions of a root triangle
    :param rule_order: Degree of the triangle rule, 7 or 5 (the embedded rule is one order lower)
    :param max_triangles: Budget of triangles evaluated by one polygon integral
    :param max_intervals: Budget of subintervals for one 1-D integral
    :param min_depth: Subdivisions applied before any triangle may be accepted
    :param strict: Raise DepthExceededError instead of returning a flagged value when a budget runs out
    """
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 30
    rule_order: int = 7
    max_triangles: int = 2_000_000
    max_intervals: int = 500
    min_depth: int = 3
    strict: bool = False

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise BadParameterError(f"Tolerances must be positive, got rel_tol={self.rel_tol}, abs_tol={self.abs_tol}")
        if self.max_depth < 1:
            raise BadParameterError(f"max_depth must be at least 1, got {self.max_depth}")
        if self.rule_order not in TRIANGLE_RULES:
            raise BadParameterError(f"Unsupported rule_order {self.rule_order}; "
                                    f"choose one of {sorted(TRIANGLE_RULES)}")
        if self.max_triangles < 1 or self.max_intervals < 1:
            raise BadParameterError("Quadrature budgets must be positive")
        if not (0 <= self.min_depth <= self.max_depth):
            raise BadParameterError(f"min_depth must lie in [0, max_depth], got {self.min_depth}")

    @classmethod
    def from_mapping(cls, conf: Mapping) -> "QuadratureConfig":
        """
        Build a config from an UPPERCASE configuration mapping, ignoring keys it does not know.

        :param conf: A mapping such as the one returned by ``cli.create_config``
        :return: A QuadratureConfig
        """
        keys = {
            "REL_TOL": "rel_tol",
            "ABS_TOL": "abs_tol",
            "MAX_DEPTH": "max_depth",
            "RULE_ORDER": "rule_order",
            "MAX_TRIANGLES": "max_triangles",
            "MAX_INTERVALS": "max_intervals",
            "MIN_DEPTH": "min_depth",
            "STRICT_QUADRATURE": "strict",
        }
        return cls(**{field: conf[key] for key, field in keys.items() if key in conf})

    def with_changes(self, **changes) -> "QuadratureConfig":
        return replace(self, **changes)


class QuadResult(NamedTuple):
    value: float
    error: float
    depth_exceeded: bool = False


class TriangleRule(NamedTuple):
    barycentric: np.ndarray
    weights: np.ndarray
    degree: int


def _orbit(coords: Sequence[float], weight: float):
    points = sorted(set(itertools.permutations(coords)))
    return [(p, weight) for p in points]


def _build_rule(orbits, degree: int) -> TriangleRule:
    entries = [entry for orbit in orbits for entry in orbit]
    bary = np.array([p for p, _ in entries], dtype=float)
    bary /= bary.sum(axis=1, keepdims=True)
    weights = np.array([w for _, w in entries], dtype=float)
    return TriangleRule(bary, weights, degree)


_THIRD = 1.0 / 3.0
_SQRT15 = math.sqrt(15.0)

# 13-point degree-7 rule (one negative weight at the centroid)
RULE_7 = _build_rule([
    _orbit((_THIRD, _THIRD, _THIRD), -0.149570044467670),
    _orbit((0.479308067841923, 0.260345966079038, 0.260345966079038), 0.175615257433204),
    _orbit((0.869739794195568, 0.065130102902216, 0.065130102902216), 0.053347235608839),
    _orbit((0.638444188569809, 0.312865496004875, 0.048690315425316), 0.077113760890257),
], degree=7)

# 7-point degree-5 rule
RULE_5 = _build_rule([
    _orbit((_THIRD, _THIRD, _THIRD), 0.225),
    _orbit(((9 + 2 * _SQRT15) / 21, (6 - _SQRT15) / 21, (6 - _SQRT15) / 21), (155 - _SQRT15) / 1200),
    _orbit(((9 - 2 * _SQRT15) / 21, (6 + _SQRT15) / 21, (6 + _SQRT15) / 21), (155 + _SQRT15) / 1200),
], degree=5)

# 6-point degree-4 rule
RULE_4 = _build_rule([
    _orbit((0.816847572980459, 0.091576213509771, 0.091576213509771), 0.109951743655322),
    _orbit((0.108103018168070, 0.445948490915965, 0.445948490915965), 0.223381589678011),
], degree=4)

# rule_order -> (primary rule, embedded estimator)
TRIANGLE_RULES = {7: (RULE_7, RULE_5), 5: (RULE_5, RULE_4)}


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _dedupe(vertices: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Drop cyclically consecutive vertices closer than ``tol``."""
    kept = []
    for v in vertices:
        if not kept or np.hypot(*(v - kept[-1])) > tol:
            kept.append(v)
    while len(kept) > 1 and np.hypot(*(kept[0] - kept[-1])) <= tol:
        kept.pop()
    return np.array(kept, dtype=float).reshape(-1, 2)


class ConvexPolygon:
    """A convex polygon with counter-clockwise vertices."""

    def __init__(self, vertices, tol: float = CONVEXITY_TOL):
        """
        Validate and store a vertex list.

        :param vertices: An (n, 2) array-like of counter-clockwise vertices, n >= 3
        :param tol: Slack allowed on the cross products of consecutive edges
        """
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise BadParameterError(f"A polygon needs at least 3 planar vertices, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise BadParameterError("Polygon vertices must be finite")
        area = _signed_area(v)
        if area <= 0:
            raise BadParameterError(f"Polygon vertices must be counter-clockwise with nonzero area (area={area})")
        edges = np.roll(v, -1, axis=0) - v
        turns = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
        scale = max(1.0, float(np.max(np.abs(v))) ** 2)
        if np.any(turns < -tol * scale):
            raise BadParameterError("Polygon is not convex")
        v.setflags(write=False)
        self._vertices = v
        self._area = area

    @classmethod
    def from_points(cls, points) -> "ConvexPolygon":
        """Return the convex hull of a point cloud."""
        points = np.asarray(points, dtype=float)
        hull = ConvexHull(points)
        return cls(points[hull.vertices])

    @classmethod
    def regular(cls, n: int, area: float, rotation: float = 0.0) -> "ConvexPolygon":
        """
        Return the regular n-gon of the given area centered at the origin.

        :param n: The number of vertices (at least 3)
        :param area: The target area
        :param rotation: The polar angle of the first vertex
        """
        if n < 3 or area <= 0:
            raise BadParameterError(f"A regular polygon needs n >= 3 and positive area, got n={n}, area={area}")
        radius = math.sqrt(2 * area / (n * math.sin(2 * math.pi / n)))
        angles = rotation + 2 * math.pi * np.arange(n) / n
        return cls(radius * np.column_stack([np.cos(angles), np.sin(angles)]))

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def area(self) -> float:
        return self._area

    @property
    def centroid(self) -> np.ndarray:
        v = self._vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return ((v + w) * cross[:, None]).sum(axis=0) / (6 * self._area)

    @property
    def diameter(self) -> float:
        diffs = self._vertices[:, None, :] - self._vertices[None, :, :]
        return float(np.sqrt((diffs ** 2).sum(axis=-1)).max())

    def fan_triangles(self, apex=None) -> np.ndarray:
        """
        Triangulate the polygon as a fan around ``apex`` (default: the centroid).

        Triangles of zero area (an apex on the boundary) are dropped.

        :return: An array of shape (m, 3, 2)
        """
        center = self.centroid if apex is None else np.asarray(apex, dtype=float)
        v = self._vertices
        w = np.roll(v, -1, axis=0)
        tris = np.stack([np.broadcast_to(center, v.shape), v, w], axis=1)
        areas = _triangle_areas(tris)
        return tris[areas > 1e-15 * self._area]

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        """Return a boolean mask of the points lying in the closed polygon (up to ``tol``)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        v = self._vertices
        e = np.roll(v, -1, axis=0) - v
        rel = p[:, None, :] - v[None, :, :]
        cross = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
        lengths = np.hypot(e[:, 0], e[:, 1])
        return np.all(cross >= -tol * lengths[None, :], axis=1)

    def clip(self, normal, offset: float) -> Optional["ConvexPolygon"]:
        """
        Intersect with the half-plane ``normal . x <= offset`` (one Sutherland-Hodgman pass).

        :return: The clipped polygon, or None if nothing of positive area remains
        """
        normal = np.asarray(normal, dtype=float)
        v = self._vertices
        side = v @ normal - offset
        out = []
        for i in range(len(v)):
            cur, nxt = v[i], v[(i + 1) % len(v)]
            s_cur, s_nxt = side[i], side[(i + 1) % len(v)]
            if s_cur <= 0:
                out.append(cur)
            if (s_cur < 0 < s_nxt) or (s_nxt < 0 < s_cur):
                t = s_cur / (s_cur - s_nxt)
                out.append(cur + t * (nxt - cur))
        if len(out) < 3:
            return None
        out = _dedupe(np.array(out))
        if len(out) < 3 or _signed_area(out) <= 1e-15 * self._area:
            return None
        return ConvexPolygon(out)

    def simplified(self, tol: float = 1e-9) -> "ConvexPolygon":
        """Merge vertices closer than ``tol`` and drop vertices where the boundary does not turn."""
        v = _dedupe(self._vertices, tol)
        changed = True
        while changed and len(v) > 3:
            changed = False
            prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
            a, b = v - prev, nxt - v
            turn = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
            norms = np.hypot(a[:, 0], a[:, 1]) * np.hypot(b[:, 0], b[:, 1])
            flat = np.flatnonzero(np.abs(turn) <= tol * norms)
            if len(flat):
                v = np.delete(v, flat[0], axis=0)
                changed = True
        return ConvexPolygon(v)

    def translated(self, shift) -> "ConvexPolygon":
        return ConvexPolygon(self._vertices + np.asarray(shift, dtype=float))

    def transformed(self, matrix) -> "ConvexPolygon":
        """Apply a linear map, reversing the vertex order if it flips orientation."""
        matrix = np.asarray(matrix, dtype=float)
        v = self._vertices @ matrix.T
        if np.linalg.det(matrix) < 0:
            v = v[::-1]
        return ConvexPolygon(v)

    def nearest_point(self, point) -> np.ndarray:
        """Return the point of the closed polygon closest to ``point``."""
        p = np.asarray(point, dtype=float)
        if self.contains(p)[0]:
            return p.copy()
        v = self._vertices
        e = np.roll(v, -1, axis=0) - v
        t = np.clip(((p - v) * e).sum(axis=1) / (e ** 2).sum(axis=1), 0.0, 1.0)
        candidates = v + t[:, None] * e
        return candidates[np.argmin(((candidates - p) ** 2).sum(axis=1))]

    def to_list(self):
        return self._vertices.tolist()

    def __len__(self):
        return self.n_vertices

    def __repr__(self):
        return f"ConvexPolygon({self._vertices.tolist()!r})"


def as_polygon(poly) -> ConvexPolygon:
    return poly if isinstance(poly, ConvexPolygon) else ConvexPolygon(poly)


def _triangle_areas(tris: np.ndarray) -> np.ndarray:
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _subdivide(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    children = np.stack([
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ], axis=1)
    return children.reshape(-1, 3, 2)


def _evaluate(tris: np.ndarray, g: Callable, rules) -> tuple:
    primary, embedded = rules
    bary = np.vstack([primary.barycentric, embedded.barycentric])
    points = np.einsum("nk,tkd->tnd", bary, tris)
    values = np.asarray(g(points.reshape(-1, 2)), dtype=float).reshape(len(tris), len(bary))
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        witness = points[bad[0], bad[1]]
        raise NonFiniteIntegrandError(f"Integrand is not finite at {witness.tolist()}", witness=witness)
    areas = _triangle_areas(tris)
    n_primary = len(primary.weights)
    hi = areas * (values[:, :n_primary] @ primary.weights)
    lo = areas * (values[:, n_primary:] @ embedded.weights)
    return hi, lo, areas


def integrate_polygon(poly, g: Callable, cfg: QuadratureConfig = None, apex=None) -> QuadResult:
    """
    Integrate ``g`` over a convex polygon by adaptive triangle subdivision.

    The polygon is fanned into triangles around its centroid (or ``apex``). Every triangle is integrated with the
    primary rule and the embedded lower-order rule; a triangle is accepted once the two agree within its area share of
    ``max(abs_tol, rel_tol * |value|)``, otherwise it is split into four. Evaluation and summation order are fixed, so
    the result is reproducible bit for bit.

    :param poly: A ConvexPolygon (or a counter-clockwise vertex array)
    :param g: A vectorized integrand mapping an (N, 2) array of points to N values
    :param cfg: (optional) The quadrature configuration
    :param apex: (optional) The interior point to fan the polygon from
    :return: A QuadResult of value, error estimate and whether the budget was exhausted
    """
    cfg = cfg or QuadratureConfig()
    poly = as_polygon(poly)
    rules = TRIANGLE_RULES[cfg.rule_order]
    total_area = poly.area
    active = poly.fan_triangles(apex)

    accepted_value = 0.0
    accepted_error = 0.0
    evaluated = 0
    depth = 0
    exceeded = False
    while True:
        hi, lo, areas = _evaluate(active, g, rules)
        evaluated += len(active)
        err = np.abs(hi - lo)
        estimate = accepted_value + float(hi.sum())
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(estimate))
        if depth >= cfg.min_depth:
            done = err <= tol * areas / total_area
        else:
            done = np.zeros(len(active), dtype=bool)
        accepted_value += float(hi[done].sum())
        accepted_error += float(err[done].sum())
        pending = ~done
        n_pending = int(pending.sum())
        if n_pending == 0:
            break
        # a point singularity keeps a few triangles pending at every level; stop once the total is small enough
        if depth >= cfg.min_depth and accepted_error + float(err[pending].sum()) <= tol:
            accepted_value += float(hi[pending].sum())
            accepted_error += float(err[pending].sum())
            break
        if depth >= cfg.max_depth or evaluated + 4 * n_pending > cfg.max_triangles:
            accepted_value += float(hi[pending].sum())
            accepted_error += float(err[pending].sum())
            exceeded = True
            break
        active = _subdivide(active[pending])
        depth += 1

    if exceeded:
        message = (f"Polygon quadrature stopped at depth {depth} after {evaluated} triangles "
                   f"(value {accepted_value!r}, error estimate {accepted_error:.3e})")
        if cfg.strict:
            raise DepthExceededError(message, best_value=accepted_value, error_estimate=accepted_error)
        logger.warning(message)
    return QuadResult(accepted_value, accepted_error, exceeded)


def integrate_1d(lo: float, hi: float, g: Callable[[float], float], cfg: QuadratureConfig = None,
                 breakpoints: Iterable[float] = None) -> QuadResult:
    """
    Integrate a scalar function over [lo, hi] with adaptive Gauss-Kronrod (QUADPACK).

    :param lo: The lower limit
    :param hi: The upper limit (must not be below ``lo``)
    :param g: The integrand, called with one float
    :param cfg: (optional) The quadrature configuration
    :param breakpoints: (optional) Points inside the interval where ``g`` is not smooth
    :return: A QuadResult of value, error estimate and whether the budget was exhausted
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise BadParameterError(f"Integration limits must be finite, got [{lo}, {hi}]")
    if lo > hi:
        raise BadParameterError(f"Integration limits must satisfy lo <= hi, got [{lo}, {hi}]")
    if lo == hi:
        return QuadResult(0.0, 0.0, False)

    def checked(x):
        y = float(g(x))
        if not math.isfinite(y):
            raise NonFiniteIntegrandError(f"Integrand is not finite at {x!r}", witness=x)
        return y

    inner = None
    if breakpoints is not None:
        inner = sorted({float(x) for x in breakpoints if lo < x < hi}) or None
    out = integrate.quad(checked, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_intervals,
                         points=inner, full_output=1)
    value, error = float(out[0]), float(out[1])
    exceeded = len(out) > 3
    if exceeded:
        message = f"Interval quadrature on [{lo!r}, {hi!r}] did not converge: {out[3]}"
        if cfg.strict:
            raise DepthExceededError(message, best_value=value, error_estimate=error)
        logger.warning(message)
    return QuadResult(value, error, exceeded)
