"""Test Cayley tables, isomorphism and the reference registry."""

import numpy as np
import pytest

from src.factoriza.services.perm_engine import PermGroup, from_cycles, symmetric_group
from src.factoriza.services.small_groups import (
    are_isomorphic,
    cayley_table,
    conjugacy_class_key,
    cyclic,
    dihedral,
    direct_product,
    fingerprint,
    heisenberg,
    identify,
    identify_group,
    is_nilpotent_table,
    isomorphisms,
    metacyclic,
    order_counts,
    quaternion,
    registry,
    regular_cayley_table,
    semidihedral,
    subtable,
    two_generated_subgroups,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError


def test_cayley_table_identity_first():
    """Test that element 0 is the identity of the table"""
    T = cayley_table(symmetric_group(3))
    assert T.order == 6
    assert np.array_equal(T.table[0], np.arange(6))
    assert np.array_equal(T.table[:, 0], np.arange(6))
    assert all(T.table[i, T.inverses[i]] == 0 for i in range(6))


def test_cayley_table_cap():
    """Test the Cayley table size cap"""
    with pytest.raises(CapExceededError):
        cayley_table(symmetric_group(7))


@pytest.mark.parametrize(
    "group, counts",
    [
        (dihedral(8), {1: 1, 2: 5, 4: 2}),
        (quaternion(8), {1: 1, 2: 1, 4: 6}),
        (semidihedral(16), {1: 1, 2: 5, 4: 6, 8: 4}),
        (quaternion(16), {1: 1, 2: 1, 4: 10, 8: 4}),
        (cyclic(12), {1: 1, 2: 1, 3: 2, 4: 2, 6: 2, 12: 4}),
    ],
)
def test_reference_element_orders(group, counts):
    """Test element order statistics of the metacyclic reference groups"""
    assert order_counts(cayley_table(group)) == counts


def test_metacyclic_rejects_bad_law():
    """Test that an inconsistent presentation is refused"""
    with pytest.raises(ValidationError, match="metacyclic"):
        metacyclic(7, 2, 2, 0, "bad")


def test_heisenberg_invariants():
    """Test centre and exponent of the extraspecial groups of order 27"""
    plus = cayley_table(heisenberg(3))
    minus = cayley_table(registry()["3-^{1+2}"])
    assert plus.order == minus.order == 27
    assert plus.center_size() == minus.center_size() == 3
    assert plus.exponent() == 3
    assert minus.exponent() == 9
    assert not are_isomorphic(plus, minus)


def test_isomorphism_between_presentations():
    """Test that two presentations of D8 are recognised as isomorphic"""
    square = PermGroup(4, [from_cycles(4, [[0, 1, 2, 3]]), from_cycles(4, [[0, 2]])])
    T1, T2 = cayley_table(square), cayley_table(dihedral(8))
    assert are_isomorphic(T1, T2)
    # |Aut(D8)| = 8
    assert len(list(isomorphisms(T1, T2))) == 8


def test_isomorphisms_are_homomorphisms():
    """Test that each returned map respects the multiplication"""
    T = cayley_table(quaternion(8))
    for phi in isomorphisms(T, T):
        assert np.array_equal(phi[T.table], T.table[np.ix_(phi, phi)])


def test_fingerprint_separates_d8_q8():
    """Test that element orders separate D8 from Q8"""
    assert fingerprint(cayley_table(dihedral(8))) != fingerprint(cayley_table(quaternion(8)))


def test_regular_table_matches():
    """Test the point-labelled table of a regular group"""
    C = cyclic(12)
    T = regular_cayley_table(C)
    assert T.order == 12
    assert are_isomorphic(T, cayley_table(C))


def test_regular_table_rejects_non_regular():
    """Test that a non-regular group has no point-labelled table"""
    with pytest.raises(ValidationError, match="regular"):
        regular_cayley_table(symmetric_group(3))


@pytest.mark.parametrize("name", ["C6xC2", "D8xC3", "A4", "S4", "3:D8", "C3xQ16"])
def test_identify_registry_members(name):
    """Test that every registry member identifies as itself"""
    assert identify(cayley_table(registry()[name])) == name


def test_identify_cyclic_outside_registry():
    """Test that cyclic groups are named without a registry entry"""
    assert identify(cayley_table(cyclic(13))) == "C13"
    assert identify_group(cyclic(8)) == "C8"
    assert identify(cayley_table(direct_product(cyclic(2), cyclic(2), "V4"))) is None


def test_identify_group_unknown():
    """Test the fallback label for groups outside the registry"""
    assert identify_group(symmetric_group(5)) == "order 120"
    assert identify_group(direct_product(cyclic(2), cyclic(2), "V4")) == "order 4"


def test_direct_product_order():
    """Test the product action of two groups"""
    G = direct_product(dihedral(8), cyclic(3), "D8xC3")
    assert G.degree == 24
    assert G.order() == 24
    assert G.is_transitive()


def test_two_generated_subgroups_of_s3():
    """Test the subgroup list of S3 (all subgroups are 2-generated)"""
    T = cayley_table(symmetric_group(3))
    sizes = sorted(int(m.sum()) for m in two_generated_subgroups(T))
    assert sizes == [1, 2, 2, 2, 3, 6]
    keys = {conjugacy_class_key(T, m) for m in two_generated_subgroups(T)}
    assert len(keys) == 4


def test_subtable_and_nilpotency():
    """Test subtables and the upper central series test"""
    T = cayley_table(symmetric_group(4))
    assert not is_nilpotent_table(T)
    assert is_nilpotent_table(cayley_table(dihedral(8)))
    mask = next(m for m in two_generated_subgroups(T) if m.sum() == 8)
    sub = subtable(T, mask)
    assert sub.order == 8
    assert are_isomorphic(sub, cayley_table(dihedral(8)))
