"""
Eigenvalues of the integral operator A_f on T_{a,b}.

A_f is diagonalized by the characters x -> exp(2 pi i k.x), k in the dual lattice, with eigenvalues

    gamma(k) = integral over D_{a,b} of f(|x|^2) cos(2 pi k.x) dx.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import List, Tuple

import numpy as np

from cellgeom import build_cell, geodesic_dist_sq
from kernels import Kernel
from moduli import ENUMERATION_CAP, TorusParams, canonical_basis, dual_basis, enumerate_dual, is_dual_vector
from quadrature import ConvexPolygon, QuadratureConfig, integrate_polygon
from ts_errors import NotDualVectorError, SymmetryViolationError
from ts_util import parallel_map

SINE_TOL = 1e-9
DOMINANCE_TOL = 1e-10

logger = logging.getLogger(__name__)


def _check_dual(p: TorusParams, k: np.ndarray):
    if not is_dual_vector(canonical_basis(p), k):
        raise NotDualVectorError(f"k = {k.tolist()} is not in the dual lattice of ({p.a!r}, {p.b!r})")


def gamma(p: TorusParams, k, kernel: Kernel, cfg: QuadratureConfig = None, check_dual: bool = True) -> float:
    """
    Eigenvalue of A_f for the dual vector ``k``.

    :param p: The torus
    :param k: A dual lattice vector
    :param kernel: The kernel
    :param cfg: (optional) The quadrature configuration
    :param check_dual: Reject vectors that are not in the dual lattice
    :return: gamma(k), a real number
    :raises NotDualVectorError: If ``k`` has non-integer inner products with the lattice generators
    :raises SymmetryViolationError: If the sine part of the integral does not vanish
    """
    k = np.asarray(k, dtype=float)
    if check_dual:
        _check_dual(p, k)
    cell = build_cell(p).polygon
    if not np.any(k):
        return integrate_polygon(cell, kernel.at_points, cfg).value

    def real_part(points):
        return kernel.at_points(points) * np.cos(2 * math.pi * (points @ k))

    def imaginary_part(points):
        return kernel.at_points(points) * np.sin(2 * math.pi * (points @ k))

    value = integrate_polygon(cell, real_part, cfg).value
    sine = integrate_polygon(cell, imaginary_part, cfg).value
    if abs(sine) >= SINE_TOL:
        raise SymmetryViolationError(f"Sine part {sine!r} of gamma({k.tolist()}) does not vanish")
    return value


def gamma_parallelogram(p: TorusParams, k, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """
    Eigenvalue of A_f computed over the fundamental parallelogram B_{a,b} [0, 1]^2 with the geodesic distance to its
    center c, i.e. the integral of f(d^2(x, c)) cos(2 pi k.(x - c)).

    The integrand has kinks where the nearest translate of c changes, so this path converges slowly; it exists to
    check the cell-centered computation.
    """
    k = np.asarray(k, dtype=float)
    _check_dual(p, k)
    B = canonical_basis(p)
    corners = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]) @ B.T
    center = B @ np.array([0.5, 0.5])

    def integrand(points):
        phase = np.cos(2 * math.pi * ((points - center) @ k))
        return kernel(geodesic_dist_sq(p, points, center)) * phase

    return integrate_polygon(ConvexPolygon(corners), integrand, cfg).value


def operator_norm(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """The L^2 operator norm of A_f, its largest eigenvalue gamma(0)."""
    return gamma(p, np.zeros(2), kernel, cfg)


def hs_norm(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """
    The integral of f^2(d^2(x, c)) over the torus.

    This is the quantity reported as the Hilbert-Schmidt norm; under the textbook convention it is the square of that
    norm.
    """
    cell = build_cell(p).polygon

    def squared(points):
        return kernel.at_points(points) ** 2

    return integrate_polygon(cell, squared, cfg).value


@dataclass
class SpectrumEntry:
    index: Tuple[int, int]
    k: Tuple[float, float]
    gamma: float

    @property
    def magnitude(self) -> float:
        return abs(self.gamma)

    def to_dict(self) -> dict:
        return {"k": list(self.index), "vector": list(self.k), "gamma": self.gamma, "magnitude": self.magnitude}


@dataclass
class SpectrumReport:
    params: TorusParams
    kernel: str
    radius: float
    entries: List[SpectrumEntry] = field(default_factory=list)
    operator_norm: float = 0.0
    hs_norm: float = 0.0
    dominance_ok: bool = True
    symmetry_ok: bool = True
    max_symmetry_gap: float = 0.0

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "kernel": self.kernel,
            "radius": self.radius,
            "entries": [entry.to_dict() for entry in self.entries],
            "operator_norm": self.operator_norm,
            "hs_norm": self.hs_norm,
            "dominance_ok": self.dominance_ok,
            "symmetry_ok": self.symmetry_ok,
            "max_symmetry_gap": self.max_symmetry_gap,
        }


def _gamma_task(k, p, kernel, cfg):
    return gamma(p, k, kernel, cfg, check_dual=False)


def spectrum(p: TorusParams, kernel: Kernel, radius: float, cfg: QuadratureConfig = None, workers: int = None,
             cap: int = ENUMERATION_CAP, logger=None) -> SpectrumReport:
    """
    Compute gamma(k) for every dual vector with |k| <= radius and check dominance and symmetry.

    :param p: The torus
    :param kernel: The kernel (must be picklable when ``workers`` > 1)
    :param radius: The truncation radius
    :param cfg: (optional) The quadrature configuration
    :param workers: (optional) Requested worker processes, capped by TORUS_SPECTRA_THREADS
    :param cap: The enumeration cap
    :param logger: (optional) An instance of the logging.Logger class
    :return: A SpectrumReport, entries sorted by |k| and then by integer coordinates
    """
    logger = logger or logging.getLogger(__name__)
    dual = enumerate_dual(dual_basis(canonical_basis(p)), radius, cap)
    logger.info(f"Computing {len(dual.indices)} eigenvalue(s) for kernel '{kernel.label}' at ({p.a!r}, {p.b!r})...")
    values = parallel_map(partial(_gamma_task, p=p, kernel=kernel, cfg=cfg), list(dual.vectors), workers)

    report = SpectrumReport(p, kernel.label, float(radius))
    by_index = {}
    for index, vector, value in zip(dual.indices, dual.vectors, values):
        entry = SpectrumEntry((int(index[0]), int(index[1])), (float(vector[0]), float(vector[1])), float(value))
        report.entries.append(entry)
        by_index[entry.index] = entry.gamma

    report.operator_norm = by_index[(0, 0)]
    report.hs_norm = hs_norm(p, kernel, cfg)
    report.dominance_ok = all(e.magnitude <= report.operator_norm + DOMINANCE_TOL for e in report.entries)
    report.max_symmetry_gap = max(abs(g - by_index[(-m, -n)]) for (m, n), g in by_index.items())
    report.symmetry_ok = report.max_symmetry_gap <= DOMINANCE_TOL
    if not report.dominance_ok:
        logger.error(f"Eigenvalue dominance failed for kernel '{kernel.label}' at ({p.a!r}, {p.b!r})")
    if not report.symmetry_ok:
        logger.error(f"gamma(k) != gamma(-k) by {report.max_symmetry_gap:.3e}")
    logger.info("Finished computing spectrum")
    return report
