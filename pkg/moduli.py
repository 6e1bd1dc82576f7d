"""
Unit-volume flat tori: the moduli space U, canonical bases, reduction of arbitrary bases into U and dual lattices.

A point (a, b) of U = {0 <= a <= 1/2, b > 0, a^2 + b^2 >= 1} stands for the lattice generated by the columns of
B_{a,b} = [[1/sqrt(b), a/sqrt(b)], [0, sqrt(b)]].
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from ts_errors import BadParameterError, DegenerateBasisError, NonUnimodularError, RadiusTooLargeError

MEMBERSHIP_TOL = 1e-12
COERCE_TOL = 1e-7
UNIMODULAR_TOL = 1e-9
MAX_CONDITION = 1e12
ENUMERATION_CAP = 10 ** 6
DUAL_TOL = 1e-10

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TorusParams:
    """A point (a, b) of the moduli space U of unit-volume flat tori."""
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise BadParameterError(f"Torus parameters must be finite, got ({a}, {b})")
        if b <= 0:
            raise BadParameterError(f"b must be positive, got {b}")
        if a < -MEMBERSHIP_TOL or a > 0.5 + MEMBERSHIP_TOL:
            raise BadParameterError(f"a must lie in [0, 1/2], got {a}")
        if a * a + b * b < 1 - MEMBERSHIP_TOL:
            raise BadParameterError(f"(a, b) = ({a}, {b}) violates a^2 + b^2 >= 1")

    @classmethod
    def coerce(cls, a: float, b: float, tol: float = COERCE_TOL) -> "TorusParams":
        """
        Snap a point lying within ``tol`` of U onto U, then validate it.

        Used for user input such as ``0.5,0.8660254`` and for the output of floating-point reduction.
        """
        a, b = float(a), float(b)
        if -tol <= a < 0:
            a = 0.0
        elif 0.5 < a <= 0.5 + tol:
            a = 0.5
        if b > 0 and 1 - tol <= a * a + b * b < 1:
            b = math.sqrt(1 - a * a)
        return cls(a, b)

    @classmethod
    def parse(cls, text: str) -> "TorusParams":
        """Parse ``"a,b"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise BadParameterError(f"Expected 'a,b', got '{text}'")
        try:
            a, b = (float(part) for part in parts)
        except ValueError:
            raise BadParameterError(f"Expected two numbers in 'a,b', got '{text}'")
        return cls.coerce(a, b)

    @classmethod
    def square(cls) -> "TorusParams":
        return cls(0.0, 1.0)

    @classmethod
    def equilateral(cls) -> "TorusParams":
        return cls(0.5, math.sqrt(3) / 2)

    @staticmethod
    def lower_b(a: float) -> float:
        """The smallest b with (a, b) in U."""
        return math.sqrt(max(0.0, 1 - a * a))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


class ReductionResult(NamedTuple):
    params: TorusParams
    unimodular: np.ndarray
    orthogonal: np.ndarray


class DualLattice(NamedTuple):
    basis: np.ndarray
    primal: np.ndarray


class DualVectors(NamedTuple):
    indices: np.ndarray
    vectors: np.ndarray


def basis_from_ab(a: float, b: float) -> np.ndarray:
    """Return the matrix [[1/sqrt(b), a/sqrt(b)], [0, sqrt(b)]] for any real a and b > 0, in U or not."""
    if not b > 0:
        raise BadParameterError(f"b must be positive, got {b}")
    root = math.sqrt(b)
    return np.array([[1 / root, a / root], [0.0, root]])


def canonical_basis(p: TorusParams) -> np.ndarray:
    """
    Return the canonical basis B_{a,b} of a point of U.

    :param p: A point of U
    :return: A 2x2 array whose columns generate the lattice
    """
    return basis_from_ab(p.a, p.b)


def _as_basis(B) -> np.ndarray:
    B = np.array(B, dtype=float)
    if B.shape != (2, 2):
        raise BadParameterError(f"A basis must be a 2x2 matrix, got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise BadParameterError("Basis entries must be finite")
    if abs(np.linalg.det(B)) < 1e-300 or np.linalg.cond(B) > MAX_CONDITION:
        raise DegenerateBasisError(f"Basis columns are numerically dependent: {B.tolist()}")
    return B


def reduce_basis(B) -> ReductionResult:
    """
    Reduce a unit-volume lattice basis to its point of U.

    The shortest lattice vector u is found by Lagrange-Gauss reduction; the partner v is made to form an acute angle
    with it (0 <= u.v <= |u|^2 / 2), the plane is rotated so that u points along the positive x-axis and reflected so
    that v lies in the upper half-plane. Then b = 1/|u|^2 and a = u.v / |u|^2.

    :param B: A 2x2 matrix whose columns generate the lattice
    :return: The point of U together with a unimodular integer W and an orthogonal Q with B W = Q B_{a,b}
    """
    B = _as_basis(B)
    det = np.linalg.det(B)
    if abs(abs(det) - 1) > UNIMODULAR_TOL:
        raise NonUnimodularError(f"Basis has |det| = {abs(det)!r}, expected 1")

    u, v = B[:, 0].copy(), B[:, 1].copy()
    W = np.eye(2, dtype=np.int64)
    while True:
        if v @ v < u @ u:
            u, v = v, u
            W = W[:, ::-1].copy()
        m = int(round((u @ v) / (u @ u)))
        if m == 0:
            break
        v = v - m * u
        W[:, 1] -= m * W[:, 0]
    if u @ v < 0:
        v = -v
        W[:, 1] *= -1

    theta = math.atan2(u[1], u[0])
    rotation = np.array([[math.cos(theta), math.sin(theta)], [-math.sin(theta), math.cos(theta)]])
    M = rotation
    if (rotation @ v)[1] < 0:
        M = np.diag([1.0, -1.0]) @ rotation

    uu = float(u @ u)
    a = float(u @ v) / uu
    b = 1.0 / uu
    params = TorusParams.coerce(min(max(a, 0.0), 0.5), b, tol=UNIMODULAR_TOL)
    logger.debug(f"Reduced basis {B.tolist()} to (a, b) = ({params.a!r}, {params.b!r})")
    return ReductionResult(params, W, M.T)


def dual_basis(B) -> DualLattice:
    """
    Return the dual lattice, generated by the inverse transpose of ``B``.

    :param B: A 2x2 matrix whose columns generate the primal lattice
    :return: A DualLattice holding the dual basis and the primal basis
    """
    B = _as_basis(B)
    return DualLattice(np.linalg.inv(B).T, B)


def enumerate_dual(d: DualLattice, radius: float, cap: int = ENUMERATION_CAP) -> DualVectors:
    """
    List every dual vector of norm at most ``radius``, sorted by norm and then by integer coordinates.

    :param d: The dual lattice
    :param radius: The enumeration radius (positive)
    :param cap: The largest number of vectors allowed
    :return: The integer coordinates (m, n) and the vectors k = basis (m, n)
    """
    if not radius > 0:
        raise BadParameterError(f"Enumeration radius must be positive, got {radius}")
    covolume = abs(np.linalg.det(d.basis))
    expected = math.pi * radius ** 2 / covolume
    if expected > cap:
        raise RadiusTooLargeError(f"Radius {radius} would enumerate about {int(expected)} vectors (cap {cap})")

    inverse = np.linalg.inv(d.basis)
    m_max = int(math.floor(radius * np.linalg.norm(inverse[0]) + 1e-9))
    n_max = int(math.floor(radius * np.linalg.norm(inverse[1]) + 1e-9))
    if (2 * m_max + 1) * (2 * n_max + 1) > 16 * cap:
        raise RadiusTooLargeError(f"Radius {radius} spans a {2 * m_max + 1}x{2 * n_max + 1} search box (cap {cap})")
    mm, nn = np.meshgrid(np.arange(-m_max, m_max + 1), np.arange(-n_max, n_max + 1), indexing="ij")
    indices = np.column_stack([mm.ravel(), nn.ravel()])
    vectors = indices @ d.basis.T
    norms = np.sqrt((vectors ** 2).sum(axis=1))
    keep = norms <= radius * (1 + 1e-12)
    indices, vectors, norms = indices[keep], vectors[keep], norms[keep]
    if len(indices) > cap:
        raise RadiusTooLargeError(f"Radius {radius} enumerates {len(indices)} vectors (cap {cap})")
    order = np.lexsort((indices[:, 1], indices[:, 0], np.round(norms, 12)))
    return DualVectors(indices[order], vectors[order])


def is_dual_vector(B, k, tol: float = DUAL_TOL) -> bool:
    """Return True if ``k`` has integer inner products with both columns of ``B``."""
    products = np.asarray(B, dtype=float).T @ np.asarray(k, dtype=float)
    scale = 1.0 + float(np.linalg.norm(k))
    return bool(np.all(np.abs(products - np.round(products)) <= tol * scale))


def isometric_disguise(B, rng: np.random.Generator, max_entry: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Return ``Q B W`` for a random orthogonal Q and a random unimodular W, plus W.

    The result generates an isometric copy of the same lattice.
    """
    theta = rng.uniform(0, 2 * math.pi)
    Q = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    if rng.random() < 0.5:
        Q = Q @ np.diag([1.0, -1.0])
    while True:
        W = rng.integers(-max_entry, max_entry + 1, size=(2, 2))
        if abs(round(np.linalg.det(W))) == 1:
            break
    return Q @ np.asarray(B, dtype=float) @ W, W
