import numpy as np
import pytest

from src.errors import DimensionMismatch, NotMutuallyOrthogonal
from src.linalg.core import Projection, projection_from_vectors
from src.linalg.pinching import block_additivity_check, compress, pinch, split_bound_check
from src.linalg.schatten import schatten_norm
from src.states.generator import random_projection, random_projection_family


def coordinate_projection(dim, indices):
    diag = np.zeros(dim)
    diag[list(indices)] = 1.0
    return Projection(np.diag(diag).astype(np.complex128), len(indices))


def test_compress_identity_and_zero(random_matrix):
    A = random_matrix(3, 0)
    assert np.allclose(compress(Projection(np.eye(3), 3), A), A)
    assert np.array_equal(compress(Projection(np.zeros((3, 3)), 0), A), np.zeros((3, 3)))


def test_compress_extracts_block():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(compress(coordinate_projection(2, [0]), A), [[1.0, 0.0], [0.0, 0.0]])


def test_full_pinching_is_diagonal_part(random_matrix):
    A = random_matrix(4, 1)
    family = [coordinate_projection(4, [i]) for i in range(4)]
    assert np.allclose(pinch(A, family), np.diag(np.diagonal(A)))
    assert np.allclose(pinch(A, [Projection(np.eye(4), 4)]), A)


def test_pinching_contracts_trace_norm(random_matrix):
    A = random_matrix(6, 9)
    P = random_projection(6, 3, 4)
    pinched = pinch(A, [P, P.complement()])
    assert schatten_norm(pinched, 1) <= schatten_norm(A, 1) + 1e-10


def test_partial_family_contracts(random_matrix):
    A = random_matrix(6, 2)
    family = random_projection_family(6, [1, 2], 8)
    assert schatten_norm(pinch(A, family), 1) <= schatten_norm(A, 1) + 1e-10


def test_pinch_rejects_overlapping_projections(random_matrix):
    P = coordinate_projection(3, [0, 1])
    with pytest.raises(NotMutuallyOrthogonal):
        pinch(random_matrix(3, 0), [P, coordinate_projection(3, [1])])


def test_dimension_mismatch(random_matrix):
    with pytest.raises(DimensionMismatch):
        compress(coordinate_projection(2, [0]), random_matrix(3, 0))


def test_split_bound_commuting_case_is_equality():
    A = np.diag([0.5, -0.3, 0.2j])
    result = split_bound_check(A, coordinate_projection(3, [0, 2]))
    assert result.commuting
    assert result.lhs == pytest.approx(result.rhs, abs=1e-12)


def test_split_bound_zero_projection(random_matrix):
    A = random_matrix(4, 3)
    result = split_bound_check(A, Projection(np.zeros((4, 4)), 0))
    assert result.lhs == pytest.approx(schatten_norm(A, 1))
    assert result.rhs == pytest.approx(schatten_norm(A, 1))


def test_split_bound_non_commuting(random_matrix):
    A = random_matrix(5, 13)
    P = random_projection(5, 2, 13)
    result = split_bound_check(A, P)
    assert not result.commuting
    assert result.lhs <= result.rhs + 1e-10


def test_split_bound_eigenprojection_commutes(random_matrix):
    A = random_matrix(4, 5, hermitian=True)
    vecs = np.linalg.eigh(A)[1]
    result = split_bound_check(A, projection_from_vectors([vecs[:, 0], vecs[:, 3]]))
    assert result.commuting
    assert result.lhs == pytest.approx(result.rhs, rel=1e-10)


def test_block_additivity(random_matrix):
    A = random_matrix(6, 21)
    result = block_additivity_check(A, random_projection(6, 2, 21))
    assert result.lhs == pytest.approx(result.rhs, rel=1e-10)


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.5, -0.75), (1j, 0.3 - 2j)])
def test_compress_is_linear(random_matrix, a, b):
    P = random_projection(5, 2, 3)
    A, B = random_matrix(5, 30), random_matrix(5, 31)
    assert np.allclose(compress(P, a * A + b * B), a * compress(P, A) + b * compress(P, B), atol=1e-12)
