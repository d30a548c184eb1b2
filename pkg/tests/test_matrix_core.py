"""Test matrices, subspaces and Singer cycles."""

import galois
import numpy as np
import pytest

from src.factoriza.services.classical_groups import block_diag
from src.factoriza.services.field_core import field_of_order
from src.factoriza.services.matrix_core import (
    exterior_square_action,
    invariant_summands,
    jordan_partition_unipotent,
    kernel,
    matrix_order,
    matrix_power,
    projective_order,
    restrict_action,
    singer,
    subspace_from_vectors,
    twisted_tensor_action,
)
from src.factoriza.utils.exceptions import NotInvariantError, NotUnipotentError, ValidationError


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (2, 9)])
def test_singer_cycle_order(n, q):
    """Test that the Singer cycle has order q^n - 1 and the right projective order."""
    S = singer(n, field_of_order(q))
    assert matrix_order(S.c) == q**n - 1
    assert projective_order(S.c) == (q**n - 1) // (q - 1)


def test_singer_normalizer_acts_as_frobenius():
    """Test phi^-1 c phi = c^q."""
    S = singer(3, field_of_order(3))
    phi = S.normalizer_gen
    assert np.array_equal(np.linalg.inv(phi) @ S.c @ phi, matrix_power(S.c, 3))
    assert matrix_order(phi) == 3


def test_singer_rejects_dimension_zero():
    """Test singer with n = 0."""
    with pytest.raises(ValidationError):
        singer(0, field_of_order(2))


def test_jordan_partition():
    """Test Jordan block sizes of unipotent matrices."""
    GF = galois.GF(2)
    u = GF([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    assert jordan_partition_unipotent(u) == [2, 1]
    v = GF([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert jordan_partition_unipotent(v) == [3]
    assert jordan_partition_unipotent(GF.Identity(4)) == [1, 1, 1, 1]


def test_jordan_partition_rejects_non_unipotent():
    """Test that a non-unipotent matrix is refused."""
    GF = galois.GF(3)
    with pytest.raises(NotUnipotentError):
        jordan_partition_unipotent(GF([[2, 0], [0, 1]]))


def test_left_kernel():
    """Test {v : v M = 0}."""
    GF = galois.GF(2)
    K = kernel(GF([[1, 1], [1, 1]]))
    assert K.dim == 1
    assert K.basis.tolist() == [[1, 1]]


def test_restrict_action_requires_invariance():
    """Test that restricting to a non-invariant subspace fails."""
    F = field_of_order(2)
    c = singer(3, F).c
    V = subspace_from_vectors(F.GF, F.GF([[1, 0, 0]]))
    with pytest.raises(NotInvariantError):
        restrict_action(c, V)


def test_invariant_summands_of_repeated_factor():
    """Test that diag(S, S) for a Singer cycle S of GL2(2) has five irreducible planes."""
    F = field_of_order(2)
    S = singer(2, F).c
    c = block_diag(F.GF, S, S)
    V = subspace_from_vectors(F.GF, F.GF.Identity(4))
    summands = invariant_summands(c, V, 2)
    assert len(summands) == 5
    assert all(W.dim == 2 for W in summands)
    assert len({W.key for W in summands}) == 5


def test_exterior_square_of_identity():
    """Test that the identity acts trivially on the exterior square."""
    GF = galois.GF(3)
    assert np.array_equal(exterior_square_action(GF.Identity(4)), GF.Identity(6))


def test_twisted_tensor_needs_quadratic_field():
    """Test the field check of the twisted tensor action."""
    GF = galois.GF(9)
    g = GF([[1, 1], [0, 1]])
    assert twisted_tensor_action(g, 3).shape == (4, 4)
    with pytest.raises(ValidationError):
        twisted_tensor_action(galois.GF(3).Identity(2), 3)
