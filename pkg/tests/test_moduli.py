import math

import numpy as np
import pytest

from conftest import random_params
from moduli import (TorusParams, basis_from_ab, canonical_basis, dual_basis, enumerate_dual, is_dual_vector,
                    isometric_disguise, reduce_basis)
from ts_errors import BadParameterError, DegenerateBasisError, NonUnimodularError, RadiusTooLargeError


@pytest.mark.parametrize("a, b", [(0.6, 1.0), (-0.1, 1.0), (0.2, 0.5), (0.0, 0.0), (math.nan, 1.0)])
def test_points_outside_u_are_rejected(a, b):
    with pytest.raises(BadParameterError):
        TorusParams(a, b)


def test_parse_snaps_rounded_input_onto_u():
    p = TorusParams.parse("0.5,0.8660254")
    assert p.a == 0.5
    assert p.b == pytest.approx(math.sqrt(3) / 2, abs=1e-7)
    assert p.a ** 2 + p.b ** 2 >= 1 - 1e-12
    with pytest.raises(BadParameterError):
        TorusParams.parse("0.5")
    with pytest.raises(BadParameterError):
        TorusParams.parse("x,1")


def test_canonical_basis_is_unimodular(rng):
    for p in random_params(rng, 20):
        assert np.linalg.det(canonical_basis(p)) == pytest.approx(1.0, abs=1e-12)


def test_identity_reduces_to_the_square_torus():
    result = reduce_basis(np.eye(2))
    assert result.params == TorusParams(0.0, 1.0)


def test_reduction_round_trip(rng):
    """
    Reducing the canonical basis of a point, or any isometric disguise of it, gives back the point.

    :param rng: The seeded generator fixture
    """
    for p in random_params(rng, 100, b_max=3.0):
        B = canonical_basis(p)
        direct = reduce_basis(B).params
        assert direct.a == pytest.approx(p.a, abs=1e-9)
        assert direct.b == pytest.approx(p.b, abs=1e-9)

        disguised, _ = isometric_disguise(B, rng)
        result = reduce_basis(disguised)
        assert result.params.a == pytest.approx(p.a, abs=1e-9)
        assert result.params.b == pytest.approx(p.b, abs=1e-9)
        W, Q = result.unimodular, result.orthogonal
        assert abs(round(np.linalg.det(W))) == 1
        assert np.allclose(Q.T @ Q, np.eye(2), atol=1e-12)
        assert np.allclose(disguised @ W, Q @ canonical_basis(result.params), atol=1e-8)


def test_reduction_errors():
    with pytest.raises(NonUnimodularError):
        reduce_basis(2 * np.eye(2))
    with pytest.raises(DegenerateBasisError):
        reduce_basis([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
    with pytest.raises(BadParameterError):
        reduce_basis(np.eye(3))


def test_dual_basis_pairs_to_identity(rng):
    for p in random_params(rng, 10):
        B = canonical_basis(p)
        D = dual_basis(B).basis
        assert np.allclose(B.T @ D, np.eye(2), atol=1e-12)


def test_enumerate_dual_on_the_square_torus():
    dual = enumerate_dual(dual_basis(np.eye(2)), 1.0)
    assert len(dual.indices) == 5
    assert dual.indices[0].tolist() == [0, 0]
    assert sorted(map(tuple, dual.indices[1:].tolist())) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    norms = np.hypot(dual.vectors[:, 0], dual.vectors[:, 1])
    assert np.all(np.diff(norms) >= -1e-12)


def test_enumerate_dual_counts_match_the_area(equilateral):
    dual = enumerate_dual(dual_basis(canonical_basis(equilateral)), 4.0)
    assert abs(len(dual.indices) - math.pi * 16) < 4 * 2 * math.pi * 4


def test_enumeration_cap():
    with pytest.raises(RadiusTooLargeError):
        enumerate_dual(dual_basis(np.eye(2)), 1e4, cap=1000)
    with pytest.raises(BadParameterError):
        enumerate_dual(dual_basis(np.eye(2)), 0.0)


def test_is_dual_vector(equilateral):
    B = canonical_basis(equilateral)
    D = dual_basis(B).basis
    assert is_dual_vector(B, D @ np.array([2, -1]))
    assert not is_dual_vector(B, D @ np.array([0.5, 0.0]))


def _successive_minima(B, reach=8):
    """Squared lengths of the two shortest independent vectors, by brute force over small coefficients."""
    coeffs = np.array([(m, n) for m in range(-reach, reach + 1) for n in range(-reach, reach + 1) if (m, n) != (0, 0)])
    vectors = coeffs @ np.asarray(B).T
    norms = np.einsum("ij,ij->i", vectors, vectors)
    first = vectors[np.argmin(norms)]
    independent = np.abs(vectors[:, 0] * first[1] - vectors[:, 1] * first[0]) > 1e-9
    return norms.min(), norms[independent].min()


def test_reduction_agrees_with_brute_force_minima(rng):
    for p in random_params(rng, 25):
        disguised, _ = isometric_disguise(canonical_basis(p), rng)
        first, second = _successive_minima(disguised)
        b = 1 / first
        a = math.sqrt(max(b * second - b * b, 0.0))
        result = reduce_basis(disguised).params
        assert result.b == pytest.approx(b, abs=1e-9)
        assert result.a == pytest.approx(a, abs=1e-6)


def test_reduction_folds_a_into_the_half_interval():
    result = reduce_basis(basis_from_ab(0.7, 1.0)).params
    assert result.a == pytest.approx(0.3, abs=1e-12)
    assert result.b == pytest.approx(1.0, abs=1e-12)


def test_reduction_ignores_a_shear(rng):
    shear = np.array([[1, 1], [0, 1]])
    for p in random_params(rng, 10):
        result = reduce_basis(canonical_basis(p) @ shear).params
        assert result.a == pytest.approx(p.a, abs=1e-9)
        assert result.b == pytest.approx(p.b, abs=1e-9)


def test_dual_basis_of_the_equilateral_torus():
    D = dual_basis(canonical_basis(TorusParams.equilateral())).basis
    assert np.allclose(D, [[0.93060, 0.0], [-0.53728, 1.07457]], atol=1e-5)
    assert np.allclose(dual_basis(D).basis, canonical_basis(TorusParams.equilateral()), atol=1e-12)
