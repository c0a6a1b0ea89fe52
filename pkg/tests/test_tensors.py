from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from masonryhom.exception import InputError
from masonryhom.tensors import ElasticityOperator, SymTensor, energy_norm, parse_elasticity, sym_dyad, sym_part

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)
vectors2 = st.tuples(finite, finite)
tensors2 = st.builds(lambda a, b, c: SymTensor.from_entries(a, b, c), finite, finite, finite)


def test_sym_dyad_of_unit_vector_with_itself():
    assert np.allclose(sym_dyad((1, 0), (1, 0)).to_matrix(), [[1, 0], [0, 0]])


def test_sym_dyad_symmetrizes_off_diagonal():
    assert np.allclose(sym_dyad((1, 0), (0, 1)).to_matrix(), [[0, 0.5], [0.5, 0]])


def test_sym_dyad_norm_identity():
    assert sym_dyad((2, 1), (1, 3)).norm() ** 2 == pytest.approx(37.5)


@given(vectors2, vectors2)
def test_sym_dyad_norm_identity_holds_generally(a, b):
    va, vb = np.array(a), np.array(b)
    expected = 0.5 * (va @ va * (vb @ vb) + (va @ vb) ** 2)
    assert sym_dyad(a, b).norm() ** 2 == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_sym_dyad_dimension_mismatch():
    with pytest.raises(InputError):
        sym_dyad((1, 0), (1, 0, 0))


def test_voigt_storage_is_orthonormal():
    xi = SymTensor.from_entries(1.0, 2.0, 3.0)
    m = xi.to_matrix()
    assert xi.norm() == pytest.approx(math.sqrt(float(np.sum(m * m))))
    assert xi.components[2] == pytest.approx(3.0 * math.sqrt(2.0))


def test_from_matrix_rejects_asymmetric():
    with pytest.raises(InputError):
        SymTensor.from_matrix([[1, 2], [0, 1]])
    assert np.allclose(sym_part([[1, 2], [0, 1]]).to_matrix(), [[1, 1], [1, 1]])


def test_from_dict_accepts_scalars_and_matrices():
    assert SymTensor.from_dict(2.5) == SymTensor(1, (2.5,))
    assert SymTensor.from_dict({'matrix': [[1, 0], [0, 2]]}) == SymTensor.from_entries(1, 2, 0)


def test_normalize_zero_raises():
    with pytest.raises(InputError):
        SymTensor.zeros(2).normalized()


@given(tensors2, tensors2, st.floats(min_value=-10, max_value=10))
def test_norm_axioms(a, b, t):
    assert (a + b).norm() <= a.norm() + b.norm() + 1e-9
    assert (t * a).norm() == pytest.approx(abs(t) * a.norm(), rel=1e-9, abs=1e-9)
    assert a.inner(b) == pytest.approx(float(np.sum(a.to_matrix() * b.to_matrix())), rel=1e-9, abs=1e-6)


def test_identity_energy_norm_is_frobenius():
    xi = SymTensor.from_entries(0.3, -1.2, 0.7)
    assert energy_norm(ElasticityOperator.identity(2), xi) == pytest.approx(xi.norm())
    assert energy_norm(ElasticityOperator.identity(2), SymTensor.zeros(2)) == 0.0


def test_scaled_energy_norm():
    A = ElasticityOperator.from_matrix(np.diag([4.0, 4.0, 4.0]))  # noqa: N806
    assert energy_norm(A, SymTensor.from_entries(1, 0, 0)) == pytest.approx(2.0)


@given(tensors2)
def test_alpha_and_m_sandwich_the_energy_norm(xi):
    A = ElasticityOperator.isotropic(2, 1.0, 0.5)  # noqa: N806
    n = xi.norm()
    assert math.sqrt(A.alpha) * n <= energy_norm(A, xi) + 1e-9
    assert energy_norm(A, xi) <= A.M * n + 1e-9


def test_elasticity_rejects_indefinite_matrices():
    with pytest.raises(InputError):
        ElasticityOperator(2, np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(InputError):
        ElasticityOperator.from_matrix(np.eye(2))


@pytest.mark.parametrize(
    ('text', 'alpha'),
    [('identity', 1.0), ('scaled:3', 3.0), ('iso:0,1', 2.0)],
)
def test_parse_elasticity(text, alpha):
    assert parse_elasticity(text, 2).alpha == pytest.approx(alpha)


def test_parse_elasticity_unknown():
    with pytest.raises(InputError):
        parse_elasticity('steel', 2)
