"""
The Dirichlet-Voronoi cell D_{a,b} of the origin and the geodesic distance on the torus T_{a,b}.

The cell is the centrally symmetric polygon bounded by the vertical lines x = +-x1 and the lines y = +-y1(x),
y = +-y2(x) where

    y1(x) = ((1 - a)^2 / b + b) / (2 sqrt(b)) + (1 - a) x / b    on [-x1, x2]
    y2(x) = (a^2 / b + b) / (2 sqrt(b)) - a x / b                on [x2, x1]

with x1 = 1 / (2 sqrt(b)) and x2 = (a - 1/2) / sqrt(b).
"""
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from moduli import TorusParams, canonical_basis
from quadrature import ConvexPolygon
from ts_errors import FoldingError

VERTEX_MERGE_TOL = 1e-12
WINDOW = 2
CHECK_WINDOW = 3


@dataclass(frozen=True)
class EdgeFunctions:
    """The affine edge functions y1, y2 of D_{a,b} and their parameter derivatives."""
    a: float
    b: float

    @property
    def x1(self) -> float:
        return 1 / (2 * math.sqrt(self.b))

    @property
    def x2(self) -> float:
        return (self.a - 0.5) / math.sqrt(self.b)

    @property
    def intercept1(self) -> float:
        a, b = self.a, self.b
        return ((1 - a) ** 2 / b + b) / (2 * math.sqrt(b))

    @property
    def slope1(self) -> float:
        return (1 - self.a) / self.b

    @property
    def intercept2(self) -> float:
        a, b = self.a, self.b
        return (a * a / b + b) / (2 * math.sqrt(b))

    @property
    def slope2(self) -> float:
        return -self.a / self.b

    @property
    def half_height(self) -> float:
        """Half the length of the vertical edge at x = x1, equal to y2(x1) = y1(-x1)."""
        a, b = self.a, self.b
        return (a * a - a + b * b) / (2 * b ** 1.5)

    def y1(self, x):
        return self.intercept1 + self.slope1 * np.asarray(x, dtype=float)

    def y2(self, x):
        return self.intercept2 + self.slope2 * np.asarray(x, dtype=float)

    def dy1_da(self, x):
        a, b = self.a, self.b
        return ((a - 1) / math.sqrt(b) - np.asarray(x, dtype=float)) / b

    def dy2_da(self, x):
        a, b = self.a, self.b
        return (a / math.sqrt(b) - np.asarray(x, dtype=float)) / b

    def dy1_db(self, x):
        a, b = self.a, self.b
        x = np.asarray(x, dtype=float)
        return -0.75 * (1 - a) ** 2 * b ** -2.5 + 0.25 * b ** -0.5 - (1 - a) * x / b ** 2

    def dy2_db(self, x):
        a, b = self.a, self.b
        x = np.asarray(x, dtype=float)
        return -0.75 * a * a * b ** -2.5 + 0.25 * b ** -0.5 + a * x / b ** 2


def edge_functions(p: TorusParams) -> EdgeFunctions:
    return EdgeFunctions(p.a, p.b)


@dataclass(frozen=True, eq=False)
class VoronoiCell:
    """The Dirichlet-Voronoi cell of the origin for the lattice of ``params``."""
    params: TorusParams
    edges: EdgeFunctions
    vertices: np.ndarray

    @property
    def x1(self) -> float:
        return self.edges.x1

    @property
    def x2(self) -> float:
        return self.edges.x2

    @property
    def r1(self) -> float:
        """Inradius."""
        return 1 / (2 * math.sqrt(self.params.b))

    @property
    def r2(self) -> float:
        """Circumradius; every vertex lies at this distance from the origin."""
        return circumradius(self.params)

    @cached_property
    def polygon(self) -> ConvexPolygon:
        return ConvexPolygon(self.vertices)

    @property
    def area(self) -> float:
        return self.polygon.area

    @property
    def center(self) -> np.ndarray:
        """Center of the fundamental parallelogram B_{a,b} [0, 1]^2 with the origin at its bottom-left corner."""
        return canonical_basis(self.params) @ np.array([0.5, 0.5])

    def to_list(self):
        return self.vertices.tolist()


def circumradius(p: TorusParams) -> float:
    a, b = p.a, p.b
    return math.sqrt((a * a + b * b) * ((a - 1) ** 2 + b * b) / (4 * b ** 3))


def build_cell(p: TorusParams) -> VoronoiCell:
    """
    Construct D_{a,b} from the explicit half-plane description.

    The vertices, counter-clockwise from the right end of the upper-right edge, are P1 = (x1, y2(x1)),
    P2 = (x2, y2(x2)), P3 = (-x1, y1(-x1)) and their reflections through the origin. For a = 0 the points P2 and P3
    coincide and the cell is the rectangle with four vertices.

    :param p: A point of U
    :return: The VoronoiCell
    """
    e = edge_functions(p)
    x1, x2 = e.x1, e.x2
    upper = [
        (x1, float(e.y2(x1))),
        (x2, float(e.y2(x2))),
        (-x1, float(e.y1(-x1))),
    ]
    raw = np.array(upper + [(-x, -y) for x, y in upper])
    vertices = [raw[0]]
    for v in raw[1:]:
        if np.hypot(*(v - vertices[-1])) > VERTEX_MERGE_TOL:
            vertices.append(v)
    if np.hypot(*(vertices[0] - vertices[-1])) <= VERTEX_MERGE_TOL:
        vertices.pop()
    vertices = np.array(vertices)
    vertices.setflags(write=False)
    return VoronoiCell(p, e, vertices)


def _window_offsets(width: int) -> np.ndarray:
    return np.array(list(itertools.product(range(-width, width + 1), repeat=2)), dtype=float)


def geodesic_dist_sq(p: TorusParams, x, y, cross_check: bool = False):
    """
    Squared geodesic distance between points of T_{a,b}.

    The difference is wrapped into the fundamental parallelogram by rounding its lattice coordinates and then
    minimized over the 5x5 window of lattice translates around it.

    :param p: The torus
    :param x: A point or an (N, 2) array of points
    :param y: A point or an (N, 2) array of points
    :param cross_check: Also search a 7x7 window and assert the minimum does not change
    :return: A float, or an array of N floats
    """
    B = canonical_basis(p)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim == 1 and y.ndim == 1
    d = np.atleast_2d(x - y)
    coords = np.linalg.solve(B, d.T).T
    base = (coords - np.round(coords)) @ B.T

    def windowed(width):
        shifts = _window_offsets(width) @ B.T
        cand = base[:, None, :] - shifts[None, :, :]
        return (cand ** 2).sum(axis=-1).min(axis=1)

    dist = windowed(WINDOW)
    if cross_check:
        wide = windowed(CHECK_WINDOW)
        assert np.allclose(dist, wide, rtol=0, atol=1e-15), "5x5 translate window missed a minimizer"
    return float(dist[0]) if scalar else dist


def wrap_to_cell(p: TorusParams, x, max_folds: int = 1000) -> np.ndarray:
    """
    Map a point to its translate inside D_{a,b} by folding across the six Voronoi-relevant half-planes.

    :param p: The torus
    :param x: A point
    :param max_folds: A safety bound on the number of folding steps
    :return: The translate of ``x`` lying in the cell
    """
    B = canonical_basis(p)
    v1, v2 = B[:, 0], B[:, 1]
    relevant = [v1, v2, v2 - v1, -v1, -v2, v1 - v2]
    coords = np.linalg.solve(B, np.asarray(x, dtype=float))
    point = B @ (coords - np.round(coords))
    for _ in range(max_folds):
        for v in relevant:
            if point @ v > v @ v / 2 + 1e-15:
                point = point - v
                break
        else:
            return point
    raise FoldingError(f"Folding {x!r} into the cell did not terminate")
