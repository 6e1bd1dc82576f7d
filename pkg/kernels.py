"""
Isotropic stationary kernel profiles f, evaluated on the squared geodesic distance.
"""
import enum
import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, NamedTuple, Optional

import numpy as np

from cellgeom import build_cell, circumradius
from moduli import TorusParams
from quadrature import QuadratureConfig, integrate_polygon
from ts_errors import BadParameterError, NotMonotoneError, NotPositiveError

N_SAMPLES = 1000

logger = logging.getLogger(__name__)


class Monotonicity(str, enum.Enum):
    STRICT = "strictly-decreasing"
    NON_INCREASING = "non-increasing"


@dataclass(frozen=True)
class Kernel:
    """
    A profile f acting on squared distance t = d^2, with its monotonicity class.

    ``profile`` must accept numpy arrays. Built-in profiles are module-level functions bound with ``functools.partial``
    so that kernels can be sent to worker processes.
    """
    profile: Callable
    monotonicity: Monotonicity
    label: str

    def __call__(self, t):
        return np.asarray(self.profile(np.asarray(t, dtype=float)), dtype=float)

    def at_points(self, points) -> np.ndarray:
        """Evaluate f(|x|^2) on an (N, 2) array of points."""
        points = np.asarray(points, dtype=float)
        return self((points ** 2).sum(axis=-1))

    def squared(self) -> "Kernel":
        """The kernel with profile f^2 (same monotonicity for a positive f)."""
        return Kernel(partial(_squared_profile, inner=self.profile), self.monotonicity, f"({self.label})^2")


def _squared_profile(t, inner):
    return np.asarray(inner(t), dtype=float) ** 2


def _constant_profile(t):
    return np.ones_like(np.asarray(t, dtype=float))


def _gaussian_profile(t, length):
    return np.exp(-np.asarray(t, dtype=float) / (length * length))


def _inverse_power_profile(t, eps, power):
    return (eps + np.asarray(t, dtype=float)) ** (-power)


def _ball_indicator_profile(t, radius):
    return (np.asarray(t, dtype=float) <= radius * radius).astype(float)


def _require_positive(name: str, **values):
    for key, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise BadParameterError(f"Kernel '{name}' needs {key} > 0, got {value!r}")


def make_builtin(name: str, *params: float) -> Kernel:
    """
    Build one of the built-in kernels.

    :param name: One of "constant", "gaussian" (length), "inverse-power" (eps, power), "ball-indicator" (radius)
    :param params: The numeric parameters of the kernel
    :return: The Kernel
    """
    params = tuple(float(x) for x in params)
    expected = {"constant": 0, "gaussian": 1, "inverse-power": 2, "ball-indicator": 1}
    if name not in expected:
        raise BadParameterError(f"Unknown kernel '{name}'; choose one of {sorted(expected)}")
    if len(params) != expected[name]:
        raise BadParameterError(f"Kernel '{name}' takes {expected[name]} parameter(s), got {len(params)}")
    if name == "constant":
        return Kernel(_constant_profile, Monotonicity.NON_INCREASING, "constant")
    if name == "gaussian":
        (length,) = params
        _require_positive(name, length=length)
        return Kernel(partial(_gaussian_profile, length=length), Monotonicity.STRICT, f"gaussian:{length!r}")
    if name == "inverse-power":
        eps, power = params
        _require_positive(name, eps=eps, power=power)
        return Kernel(partial(_inverse_power_profile, eps=eps, power=power), Monotonicity.STRICT,
                      f"invpow:{eps!r}:{power!r}")
    (radius,) = params
    _require_positive(name, radius=radius)
    return Kernel(partial(_ball_indicator_profile, radius=radius), Monotonicity.NON_INCREASING, f"ball:{radius!r}")


_SPEC_NAMES = {
    "constant": "constant",
    "gaussian": "gaussian",
    "invpow": "inverse-power",
    "inverse-power": "inverse-power",
    "ball": "ball-indicator",
    "ball-indicator": "ball-indicator",
}


def parse_kernel_spec(spec: str) -> Kernel:
    """
    Parse a command-line kernel spec such as ``constant``, ``gaussian:0.3``, ``invpow:1.0:2.0`` or ``ball:0.5``.

    :raises BadParameterError: If the name is unknown or a parameter is not a positive number
    """
    name, *raw = spec.strip().split(":")
    if name not in _SPEC_NAMES:
        raise BadParameterError(f"Unknown kernel spec '{spec}'")
    try:
        params = [float(x) for x in raw]
    except ValueError:
        raise BadParameterError(f"Kernel spec '{spec}' has a non-numeric parameter")
    return make_builtin(_SPEC_NAMES[name], *params)


class AdmissibilityReport(NamedTuple):
    label: str
    params: TorusParams
    sq_integral: float
    positive: bool
    monotone: bool
    strict: bool
    sample_max: float

    def to_dict(self) -> dict:
        return {
            "kernel": self.label,
            "params": self.params.to_dict(),
            "sq_integral": self.sq_integral,
            "positive": self.positive,
            "monotone": self.monotone,
            "strict": self.strict,
            "sample_max": self.sample_max,
        }


def check_admissible(k: Kernel, p: TorusParams, cfg: QuadratureConfig = None,
                     n_samples: int = N_SAMPLES, sample_max: Optional[float] = None) -> AdmissibilityReport:
    """
    Check that a kernel is admissible on T_{a,b}: f is non-negative with f(0) > 0, non-increasing (strictly, if its
    class says so) on a sampled grid, and f^2 is integrable over the Voronoi cell.

    :param k: The kernel
    :param p: The torus
    :param cfg: (optional) Quadrature configuration for the f^2 integral
    :param n_samples: Grid size for the sampling checks
    :param sample_max: Right end of the sampled range; defaults to twice the squared circumradius
    :return: An AdmissibilityReport
    :raises NotPositiveError: With the offending argument as witness
    :raises NotMonotoneError: With the offending (t1, t2) pair as witness
    """
    if sample_max is None:
        sample_max = 2 * circumradius(p) ** 2
    t = np.linspace(0.0, sample_max, n_samples)
    values = k(t)
    bad = np.flatnonzero(~np.isfinite(values) | (values < 0))
    if len(bad) or not values[0] > 0:
        t_bad = float(t[bad[0]]) if len(bad) else 0.0
        raise NotPositiveError(f"Kernel '{k.label}' is not positive at t = {t_bad!r}", witness=t_bad)
    steps = np.diff(values)
    strict = k.monotonicity == Monotonicity.STRICT
    rising = steps > 0
    if strict:
        # once f underflows to zero the samples cannot decrease any further
        rising |= (steps == 0) & (values[:-1] > np.finfo(float).tiny)
    rises = np.flatnonzero(rising)
    if len(rises):
        i = int(rises[0])
        pair = (float(t[i]), float(t[i + 1]))
        raise NotMonotoneError(f"Kernel '{k.label}' is not {k.monotonicity.value} between t = {pair[0]!r} "
                               f"and t = {pair[1]!r}", witness=pair)
    squared = k.squared()
    sq_integral = integrate_polygon(build_cell(p).polygon, squared.at_points, cfg).value
    if not math.isfinite(sq_integral):
        raise NotPositiveError(f"Kernel '{k.label}' is not square integrable over the cell")
    logger.debug(f"Kernel '{k.label}' is admissible at ({p.a!r}, {p.b!r}): integral of f^2 = {sq_integral!r}")
    return AdmissibilityReport(k.label, p, sq_integral, True, True, strict, sample_max)
