"""
The objective J(a, b) = integral over D_{a,b} of f(|x|^2), its closed-form partial derivatives and the quantities
used to show that the equilateral torus maximizes it.

Every derivative returned here is a derivative of J itself, not of J / 2.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from cellgeom import build_cell, edge_functions
from kernels import Kernel, Monotonicity
from moduli import TorusParams, basis_from_ab, reduce_basis
from quadrature import QuadratureConfig, integrate_1d, integrate_polygon
from ts_errors import (BadParameterError, DomainError, MonotonicityViolatedError, StepTooSmallError)
from ts_util import format_float, parallel_map

FD_STEP = 1e-5
HESSIAN_STEP = 1e-3
PATH_STEP = 1e-2
PATH_SLACK = 1e-9
GRAD_FLOOR = 1e-6
CLAIM_TOL = 1e-12
EQUILATERAL_B = math.sqrt(3) / 2

logger = logging.getLogger(__name__)


def _f(kernel: Kernel, t: float) -> float:
    return float(kernel(t))


def _inner_cfg(cfg: QuadratureConfig) -> QuadratureConfig:
    return cfg.with_changes(rel_tol=max(cfg.rel_tol / 10, 1e-14), abs_tol=cfg.abs_tol / 10)


def J(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """The objective J(a, b), integrated over the Voronoi cell."""
    return integrate_polygon(build_cell(p).polygon, kernel.at_points, cfg).value


def J_of_basis(B, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """J for the lattice generated by an arbitrary unit-volume basis, reduced into U first."""
    return J(reduce_basis(B).params, kernel, cfg)


def _J_anywhere(a: float, b: float, kernel: Kernel, cfg: QuadratureConfig) -> float:
    # stencil points may leave U; J is evaluated on the isometric lattice in U
    try:
        p = TorusParams(a, b)
    except BadParameterError:
        return J_of_basis(basis_from_ab(a, b), kernel, cfg)
    return J(p, kernel, cfg)


def J_halfplane(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """
    J by nested 1-D quadrature over the upper half of the cell, doubled by polar symmetry.

    :return: 2 (int_{-x1}^{x2} int_0^{y1(x)} f + int_{x2}^{x1} int_0^{y2(x)} f)
    """
    cfg = cfg or QuadratureConfig()
    inner = _inner_cfg(cfg)
    e = edge_functions(p)

    def column(x, top):
        return integrate_1d(0.0, float(top), lambda y: _f(kernel, x * x + y * y), inner).value

    left = integrate_1d(-e.x1, e.x2, lambda x: column(x, e.y1(x)), cfg).value
    right = integrate_1d(e.x2, e.x1, lambda x: column(x, e.y2(x)), cfg).value
    return 2 * (left + right)


def dJda(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """
    Closed-form dJ/da from the three edge integrals

        d(J/2)/da = int_{-x1}^{x2} f(x^2 + y1^2) dy1/da dx
                    + int_{x2}^{a/sqrt(b)} f(x^2 + y2^2) dy2/da dx + int_{a/sqrt(b)}^{x1} f(x^2 + y2^2) dy2/da dx

    with dy1/da = ((a - 1)/sqrt(b) - x)/b and dy2/da = (a/sqrt(b) - x)/b.
    """
    cfg = cfg or QuadratureConfig()
    e = edge_functions(p)
    split = p.a / math.sqrt(p.b)

    def lower(x):
        return _f(kernel, x * x + float(e.y1(x)) ** 2) * float(e.dy1_da(x))

    def upper(x):
        return _f(kernel, x * x + float(e.y2(x)) ** 2) * float(e.dy2_da(x))

    half = (integrate_1d(-e.x1, e.x2, lower, cfg).value
            + integrate_1d(e.x2, split, upper, cfg).value
            + integrate_1d(split, e.x1, upper, cfg).value)
    return 2 * half


def dJdb(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> float:
    """
    Closed-form dJ/db: the moving vertical edges at x = +-x1 contribute
    -(1 / (2 b^(3/2))) int_0^{y2(x1)} f(1/(4b) + y^2) dy to d(J/2)/db, and the slanted edges contribute
    int f(x^2 + y_i^2) dy_i/db dx over their x-intervals.
    """
    cfg = cfg or QuadratureConfig()
    e = edge_functions(p)
    b = p.b

    def vertical(y):
        return _f(kernel, 1 / (4 * b) + y * y)

    def lower(x):
        return _f(kernel, x * x + float(e.y1(x)) ** 2) * float(e.dy1_db(x))

    def upper(x):
        return _f(kernel, x * x + float(e.y2(x)) ** 2) * float(e.dy2_db(x))

    edge_term = -integrate_1d(0.0, e.half_height, vertical, cfg).value / (2 * b ** 1.5)
    half = (edge_term
            + integrate_1d(-e.x1, e.x2, lower, cfg).value
            + integrate_1d(e.x2, e.x1, upper, cfg).value)
    return 2 * half


def _fd_config(cfg: QuadratureConfig) -> QuadratureConfig:
    return cfg.with_changes(rel_tol=min(cfg.rel_tol, 1e-12), abs_tol=min(cfg.abs_tol, 1e-14))


@dataclass
class GradReport:
    params: TorusParams
    kernel: str
    step: float
    dJda_closed: float
    dJdb_closed: float
    dJda_fd: float
    dJdb_fd: float

    @property
    def agreement(self) -> float:
        """The larger of the two component-wise relative errors between closed form and finite differences."""
        errors = []
        for closed, fd in ((self.dJda_closed, self.dJda_fd), (self.dJdb_closed, self.dJdb_fd)):
            errors.append(abs(closed - fd) / max(abs(closed), abs(fd), GRAD_FLOOR))
        return max(errors)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "kernel": self.kernel,
            "step": self.step,
            "dJda_closed": self.dJda_closed,
            "dJdb_closed": self.dJdb_closed,
            "dJda_fd": self.dJda_fd,
            "dJdb_fd": self.dJdb_fd,
            "agreement": self.agreement,
        }


def grad_check(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None, h: float = FD_STEP) -> GradReport:
    """
    Compare the closed-form gradient with central differences of J.

    :param p: The torus
    :param kernel: The kernel
    :param cfg: (optional) The quadrature configuration; differences use a tightened copy
    :param h: The difference step
    :return: A GradReport
    """
    cfg = cfg or QuadratureConfig()
    if not h > 0:
        raise BadParameterError(f"Difference step must be positive, got {h}")
    fd_cfg = _fd_config(cfg)
    a, b = p.a, p.b
    da = (_J_anywhere(a + h, b, kernel, fd_cfg) - _J_anywhere(a - h, b, kernel, fd_cfg)) / (2 * h)
    db = (_J_anywhere(a, b + h, kernel, fd_cfg) - _J_anywhere(a, b - h, kernel, fd_cfg)) / (2 * h)
    return GradReport(p, kernel.label, h, dJda(p, kernel, cfg), dJdb(p, kernel, cfg), da, db)


def _a_args(a: float, b: float):
    s = a * a + b * b
    return ((1 - a) ** 2 + b * b) / (4 * b ** 3), s / (16 * b ** 3)


def A1(a: float, b: float, z):
    c1, _ = _a_args(a, b)
    z = np.asarray(z, dtype=float)
    return c1 * (b * b + a * a * z * z)


def A2(a: float, b: float, z):
    _, c2 = _a_args(a, b)
    z = np.asarray(z, dtype=float)
    return c2 * (4 * b * b + (1 - 2 * a - z) ** 2)


def A3(a: float, b: float, z):
    _, c2 = _a_args(a, b)
    z = np.asarray(z, dtype=float)
    return c2 * (4 * b * b + ((1 - 2 * a) * z - 1) ** 2)


class JaPieces(NamedTuple):
    I1: float
    I2: float
    I3: float
    identity_residual: float
    piece_one: float
    piece_two: float
    regroup_residual: float
    coefficient_residual: float
    dJda: float

    def to_dict(self) -> dict:
        return self._asdict()


def transformed_integrals(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None) -> JaPieces:
    """
    Compute I1, I2, I3 in the z in [-1, 1] coordinates, with d(J/2)/da = -I1 + I2 - I3, where

        I1 = 1/(16 b^2) int 4a(1-a) f(A1(z)) (1 - z) dz
        I2 = 1/(16 b^2) int f(A2(z)) (1 - z) dz
        I3 = 1/(16 b^2) int (1-2a)^2 f(A3(z)) (1 - z) dz

    The two regrouped pieces 4a(1-a) I2 - I1 and (1-2a)^2 I2 - I3 are non-negative for a non-increasing f.

    :return: JaPieces including the residual against dJda / 2
    """
    cfg = cfg or QuadratureConfig()
    a, b = p.a, p.b
    scale = 1 / (16 * b * b)
    c_one = 4 * a * (1 - a)
    c_three = (1 - 2 * a) ** 2

    def weighted(func):
        return lambda z: _f(kernel, float(func(a, b, z))) * (1 - z)

    I1 = scale * c_one * integrate_1d(-1.0, 1.0, weighted(A1), cfg).value
    I2 = scale * integrate_1d(-1.0, 1.0, weighted(A2), cfg).value
    I3 = scale * c_three * integrate_1d(-1.0, 1.0, weighted(A3), cfg).value
    derivative = dJda(p, kernel, cfg)
    combined = -I1 + I2 - I3
    piece_one = c_one * I2 - I1
    piece_two = c_three * I2 - I3
    return JaPieces(
        I1=I1, I2=I2, I3=I3,
        identity_residual=abs(combined - derivative / 2),
        piece_one=piece_one,
        piece_two=piece_two,
        regroup_residual=abs((piece_one + piece_two) - combined),
        coefficient_residual=abs(c_one + c_three - 1),
        dJda=derivative,
    )


@dataclass
class ClaimReport:
    params: TorusParams
    z_samples: int
    min_a1_minus_a2: float
    min_a3_minus_a2: float
    boundary_left: float
    boundary_right: float
    boundary_right_expected: float
    max_second_difference: float

    @property
    def claim_one_ok(self) -> bool:
        return self.min_a1_minus_a2 >= -CLAIM_TOL

    @property
    def claim_two_ok(self) -> bool:
        return self.params.a == 0 or self.min_a3_minus_a2 > 0

    @property
    def boundary_ok(self) -> bool:
        return (abs(self.boundary_left) <= CLAIM_TOL
                and abs(self.boundary_right - self.boundary_right_expected) <= CLAIM_TOL)

    @property
    def concavity_ok(self) -> bool:
        return self.max_second_difference <= CLAIM_TOL

    @property
    def ok(self) -> bool:
        return self.claim_one_ok and self.claim_two_ok and self.boundary_ok and self.concavity_ok

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "z_samples": self.z_samples,
            "min_a1_minus_a2": self.min_a1_minus_a2,
            "min_a3_minus_a2": self.min_a3_minus_a2,
            "boundary_left": self.boundary_left,
            "boundary_right": self.boundary_right,
            "boundary_right_expected": self.boundary_right_expected,
            "max_second_difference": self.max_second_difference,
            "claim_one_ok": self.claim_one_ok,
            "claim_two_ok": self.claim_two_ok,
            "boundary_ok": self.boundary_ok,
            "concavity_ok": self.concavity_ok,
            "ok": self.ok,
        }


def claim_check(p: TorusParams, z_samples: int = 1001) -> ClaimReport:
    """
    Sample A1, A2, A3 on a uniform grid of [-1, 1] and check A1 >= A2, A3 > A2 (inside the interval), the boundary
    values of A1 - A2 and the concavity of A1 - A2.
    """
    if z_samples < 3:
        raise BadParameterError(f"Need at least 3 z samples, got {z_samples}")
    a, b = p.a, p.b
    z = np.linspace(-1.0, 1.0, z_samples)
    gap = A1(a, b, z) - A2(a, b, z)
    interior = z[1:-1]
    return ClaimReport(
        params=p,
        z_samples=z_samples,
        min_a1_minus_a2=float(gap.min()),
        min_a3_minus_a2=float((A3(a, b, interior) - A2(a, b, interior)).min()),
        boundary_left=float(A1(a, b, -1.0) - A2(a, b, -1.0)),
        boundary_right=float(A1(a, b, 1.0) - A2(a, b, 1.0)),
        boundary_right_expected=(1 - 2 * a) * (a * a + b * b) / (4 * b ** 3),
        max_second_difference=float(np.diff(gap, 2).max()),
    )


@dataclass
class LemmaJbReport:
    params: TorusParams
    z1: float
    z_samples: int
    max_violation: float
    gap_at_zero: float
    K2_direct: Optional[float] = None
    K2_reduced: Optional[float] = None
    dJdb_reduced: Optional[float] = None
    dJdb_closed: Optional[float] = None

    @property
    def inequality_ok(self) -> bool:
        return self.max_violation <= CLAIM_TOL

    @property
    def K2_residual(self) -> Optional[float]:
        if self.K2_direct is None:
            return None
        return abs(self.K2_direct - self.K2_reduced)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "z1": self.z1,
            "z_samples": self.z_samples,
            "max_violation": self.max_violation,
            "gap_at_zero": self.gap_at_zero,
            "inequality_ok": self.inequality_ok,
            "K2_direct": self.K2_direct,
            "K2_reduced": self.K2_reduced,
            "K2_residual": self.K2_residual,
            "dJdb_reduced": self.dJdb_reduced,
            "dJdb_closed": self.dJdb_closed,
        }


def _jb_sides(b: float, z):
    z = np.asarray(z, dtype=float)
    lhs = 1 / (4 * b) + z * z
    rhs = (1 + 4 * b * b) / (16 * b) + (1 + 4 * b * b) * z * z / (4 * b * b - 1) ** 2
    return lhs, rhs


def lemma_jb_inequality(p: TorusParams, z_samples: int = 1001, kernel: Kernel = None,
                        cfg: QuadratureConfig = None) -> LemmaJbReport:
    """
    On the line a = 1/2, check 1/(4b) + z^2 <= (1 + 4b^2)/(16b) + (1 + 4b^2) z^2 / (4b^2 - 1)^2 on (0, z1),
    z1 = (4b^2 - 1) / (8 b^(3/2)), and, given a kernel, compare the slanted-edge term K2 of d(J/2)/db computed
    directly against its reduced form on (0, z1).

    :raises DomainError: If a != 1/2
    """
    if abs(p.a - 0.5) > CLAIM_TOL:
        raise DomainError(f"The d/db inequality is stated on a = 1/2, got a = {p.a!r}")
    if z_samples < 1:
        raise BadParameterError(f"Need at least 1 z sample, got {z_samples}")
    b = p.b
    z1 = (4 * b * b - 1) / (8 * b ** 1.5)
    z = z1 * np.arange(1, z_samples + 1) / (z_samples + 1)
    lhs, rhs = _jb_sides(b, z)
    lhs0, rhs0 = _jb_sides(b, 0.0)
    report = LemmaJbReport(p, z1, z_samples, float((lhs - rhs).max()), float(rhs0 - lhs0))
    if kernel is None:
        return report

    cfg = cfg or QuadratureConfig()
    e = edge_functions(p)
    coef = (1 + 4 * b * b) / (4 * b * b - 1) ** 2

    def slanted(x):
        return _f(kernel, x * x + float(e.y2(x)) ** 2) * float(e.dy2_db(x))

    def reduced(t):
        return _f(kernel, (1 + 4 * b * b) / (16 * b) + coef * t * t)

    def difference(t):
        return reduced(t) - _f(kernel, 1 / (4 * b) + t * t)

    report.K2_direct = 2 * integrate_1d(0.0, e.x1, slanted, cfg).value
    report.K2_reduced = integrate_1d(0.0, z1, reduced, cfg).value / (2 * b ** 1.5)
    report.dJdb_reduced = 2 * integrate_1d(0.0, z1, difference, cfg).value / (2 * b ** 1.5)
    report.dJdb_closed = dJdb(p, kernel, cfg)
    return report


@dataclass
class HessianReport:
    params: TorusParams
    kernel: str
    step: float
    matrix: Tuple[Tuple[float, float], Tuple[float, float]]
    eigenvalues: Tuple[float, float]
    noise_floor: float
    below_noise: bool

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "kernel": self.kernel,
            "step": self.step,
            "matrix": [list(row) for row in self.matrix],
            "eigenvalues": list(self.eigenvalues),
            "noise_floor": self.noise_floor,
            "below_noise": self.below_noise,
        }


def symmetric_eigenvalues(haa: float, hab: float, hbb: float) -> Tuple[float, float]:
    """Eigenvalues of [[haa, hab], [hab, hbb]] in ascending order."""
    mean = (haa + hbb) / 2
    radius = math.hypot((haa - hbb) / 2, hab)
    return mean - radius, mean + radius


def hessian_fd(p: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None, h: float = HESSIAN_STEP) -> HessianReport:
    """
    Central-difference Hessian of J in (a, b).

    Stencil points outside U are evaluated on their isometric lattice in U, which makes the stencil at a = 0 or at the
    boundary curve see the mirror image of J.

    :raises StepTooSmallError: If the estimated cancellation noise exceeds 10% of the largest entry
    """
    cfg = cfg or QuadratureConfig()
    if not h > 0:
        raise BadParameterError(f"Difference step must be positive, got {h}")
    a, b = p.a, p.b

    def at(da, db):
        return _J_anywhere(a + da * h, b + db * h, kernel, cfg)

    centre = at(0, 0)
    haa = (at(1, 0) - 2 * centre + at(-1, 0)) / h ** 2
    hbb = (at(0, 1) - 2 * centre + at(0, -1)) / h ** 2
    hab = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h ** 2)

    noise = 4 * max(cfg.abs_tol, cfg.rel_tol * abs(centre)) / h ** 2
    largest = max(abs(haa), abs(hbb), abs(hab))
    below_noise = largest <= noise
    if below_noise:
        haa = hbb = hab = 0.0
    elif noise > 0.1 * largest:
        raise StepTooSmallError(f"Hessian entries ({largest:.3e}) are within 10x of the quadrature noise "
                                f"({noise:.3e}); increase the step or tighten the tolerances")
    return HessianReport(p, kernel.label, h, ((haa, hab), (hab, hbb)), symmetric_eigenvalues(haa, hab, hbb),
                         noise, below_noise)


class PathSample(NamedTuple):
    a: float
    b: float
    J: float
    phase: int


@dataclass
class PathResult:
    start: TorusParams
    waypoint: TorusParams
    end: TorusParams
    kernel: str
    samples: List[PathSample] = field(default_factory=list)
    flat_steps: List[int] = field(default_factory=list)

    @property
    def values(self) -> List[float]:
        return [s.J for s in self.samples]

    @property
    def strictly_increasing(self) -> bool:
        return all(later > earlier for earlier, later in zip(self.values, self.values[1:]))

    def to_dict(self) -> dict:
        return {
            "start": self.start.to_dict(),
            "waypoint": self.waypoint.to_dict(),
            "end": self.end.to_dict(),
            "kernel": self.kernel,
            "samples": [s._asdict() for s in self.samples],
            "strictly_increasing": self.strictly_increasing,
            "flat_steps": list(self.flat_steps),
        }


def _steps(begin: float, finish: float, step: float) -> List[float]:
    """Uniform points from begin to finish (both included) with spacing at most ``step``."""
    span = abs(finish - begin)
    if span == 0:
        return [begin]
    n = max(1, math.ceil(span / step - 1e-12))
    return [begin + (finish - begin) * i / n for i in range(n)] + [finish]


def optimize_path(start: TorusParams, kernel: Kernel, cfg: QuadratureConfig = None, step: float = PATH_STEP,
                  slack: float = PATH_SLACK, logger=None) -> PathResult:
    """
    Follow the rearrangement path: raise a to 1/2 at fixed b, then lower b to sqrt(3)/2 at a = 1/2, recording J.

    :param start: The starting torus
    :param kernel: A strictly decreasing kernel
    :param cfg: (optional) The quadrature configuration
    :param step: The largest parameter step
    :param slack: Decreases of J up to this size are recorded in ``flat_steps`` instead of raised
    :param logger: (optional) An instance of the logging.Logger class
    :return: The PathResult
    :raises MonotonicityViolatedError: If J decreases by more than ``slack`` along the path
    """
    logger = logger or logging.getLogger(__name__)
    if kernel.monotonicity != Monotonicity.STRICT:
        raise BadParameterError(f"The rearrangement path needs a strictly decreasing kernel, got '{kernel.label}'")
    if not step > 0:
        raise BadParameterError(f"Path step must be positive, got {step}")
    b0 = start.b
    waypoint = TorusParams.coerce(0.5, b0)
    end = TorusParams.equilateral()
    result = PathResult(start, waypoint, end, kernel.label)

    logger.info(f"Following the rearrangement path from ({start.a!r}, {start.b!r})...")
    for a in _steps(start.a, 0.5, step):
        p = start if a == start.a else TorusParams.coerce(a, b0)
        result.samples.append(PathSample(p.a, p.b, J(p, kernel, cfg), 1))
    floor = TorusParams.lower_b(0.5)
    for b in _steps(b0, end.b, step)[1:]:
        p = TorusParams.coerce(0.5, max(b, floor, end.b))
        result.samples.append(PathSample(p.a, p.b, J(p, kernel, cfg), 2))

    values = result.values
    for i in range(1, len(values)):
        change = values[i] - values[i - 1]
        if change < -slack:
            raise MonotonicityViolatedError(f"J decreased by {-change:.3e} at path step {i} "
                                            f"(a={result.samples[i].a!r}, b={result.samples[i].b!r})", step=i)
        if change <= 0:
            result.flat_steps.append(i)
            logger.warning(f"J did not increase at path step {i} (change {change:.3e})")
    logger.info(f"Finished path with {len(values)} sample(s): J {values[0]!r} -> {values[-1]!r}")
    return result


@dataclass
class SweepResult:
    kernel: str
    na: int
    nb: int
    b_max: float
    rows: List[Tuple[float, float, float]] = field(default_factory=list)

    @property
    def argmax(self) -> Tuple[float, float, float]:
        return max(self.rows, key=lambda row: row[2])

    def to_csv(self) -> str:
        lines = ["a,b,J"]
        for a, b, value in self.rows:
            lines.append(",".join(format_float(x) for x in (a, b, value)))
        return "\n".join(lines) + "\n"


def sweep_nodes(na: int, nb: int, b_max: float) -> List[TorusParams]:
    """
    Grid nodes of U with b <= b_max: a_i = i / (2 (na - 1)) and, for each a_i, b running uniformly from the lower
    boundary sqrt(1 - a_i^2) to b_max. The equilateral point is the node (na - 1, 0).
    """
    if na < 2 or nb < 2:
        raise BadParameterError(f"A sweep needs at least 2 nodes per axis, got {na}x{nb}")
    if not b_max > 1:
        raise BadParameterError(f"b_max must exceed 1, got {b_max}")
    nodes = []
    for i in range(na):
        a = 0.5 * i / (na - 1)
        lo = TorusParams.lower_b(a)
        for j in range(nb):
            nodes.append(TorusParams.coerce(a, lo + (b_max - lo) * j / (nb - 1)))
    return nodes


def _sweep_task(p, kernel, cfg):
    return J(p, kernel, cfg)


def grid_sweep(kernel: Kernel, cfg: QuadratureConfig = None, na: int = 51, nb: int = 51, b_max: float = 2.0,
               workers: int = None, logger=None) -> SweepResult:
    """
    Evaluate J on the sweep grid (see ``sweep_nodes``), assembling rows in grid order.

    :param workers: (optional) Requested worker processes, capped by TORUS_SPECTRA_THREADS
    :param logger: (optional) An instance of the logging.Logger class
    """
    logger = logger or logging.getLogger(__name__)
    nodes = sweep_nodes(na, nb, b_max)
    logger.info(f"Sweeping {na}x{nb} grid with kernel '{kernel.label}'...")
    values = parallel_map(partial(_sweep_task, kernel=kernel, cfg=cfg), nodes, workers)
    result = SweepResult(kernel.label, na, nb, float(b_max))
    result.rows = [(p.a, p.b, float(v)) for p, v in zip(nodes, values)]
    a, b, value = result.argmax
    logger.info(f"Finished sweep: argmax J = {value!r} at (a, b) = ({a!r}, {b!r})")
    return result
