import math

import numpy as np
import pytest

from kernels import make_builtin
from moduli import TorusParams
from quadrature import QuadratureConfig


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """
    Keep user configuration and thread settings out of the tests.

    :param monkeypatch: The pytest monkeypatch fixture
    :param tmp_path: A temporary directory used as the home directory
    """
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.delenv("TORUS_SPECTRA_CONFIG", raising=False)
    monkeypatch.delenv("TORUS_SPECTRA_THREADS", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def loose_cfg():
    return QuadratureConfig(rel_tol=1e-8, abs_tol=1e-10)


@pytest.fixture
def tight_cfg():
    return QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15)


@pytest.fixture
def indicator_cfg():
    """Tolerances for discontinuous kernels, whose integrals converge only linearly in the triangle size."""
    return QuadratureConfig(rel_tol=1e-7, abs_tol=1e-9, max_depth=14, min_depth=5)


@pytest.fixture
def gaussian():
    return make_builtin("gaussian", 0.3)


@pytest.fixture
def constant():
    return make_builtin("constant")


@pytest.fixture
def square():
    return TorusParams.square()


@pytest.fixture
def equilateral():
    return TorusParams.equilateral()


def random_params(rng: np.random.Generator, n: int, a_range=(0.0, 0.5), b_max: float = 2.0):
    """
    Draw points of U with b <= b_max.

    :param rng: The random generator
    :param n: The number of points
    :param a_range: The range of a
    :param b_max: The largest b
    :return: A list of TorusParams
    """
    points = []
    for _ in range(n):
        a = rng.uniform(*a_range)
        lo = math.sqrt(1 - a * a)
        points.append(TorusParams(a, rng.uniform(lo, b_max)))
    return points
