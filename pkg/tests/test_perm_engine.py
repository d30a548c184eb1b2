"""Test the permutation group engine."""

import math

import numpy as np
import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from src.factoriza.config import config
from src.factoriza.services.perm_engine import (
    PermGroup,
    alternating_group,
    as_perm,
    center,
    centralizer,
    conj,
    coset_action,
    cyclic_group,
    cyclic_normalizer,
    derived_series,
    element_order_counts,
    extraspecial_type,
    find_conjugator,
    from_cycles,
    inv,
    is_identity,
    is_nilpotent,
    is_regular,
    is_semiregular,
    is_semiregular_by_elements,
    is_solvable,
    klein_normalizer,
    mul,
    nilpotency_class,
    normal_closure,
    normalizer,
    order_of_group_bounded,
    ordered_pair_action,
    perm_order,
    power,
    product_action,
    random_subgroup_of_order,
    restrict,
    subgroup_search,
    subset_action,
    sylow_subgroup,
    symmetric_group,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError


def _dihedral8():
    return PermGroup(4, [from_cycles(4, [[0, 1, 2, 3]]), from_cycles(4, [[0, 2]])], name="D8")


def _quaternion8():
    a = from_cycles(8, [[0, 1, 2, 3], [4, 5, 6, 7]])
    b = from_cycles(8, [[0, 4, 2, 6], [1, 7, 3, 5]])
    return PermGroup(8, [a, b], name="Q8")


def _psl27():
    # lines {i, i+1, i+3} mod 7; (2 6)(4 5) is an elation with axis {0, 1, 3}
    gens = [from_cycles(7, [[0, 1, 2, 3, 4, 5, 6]]), from_cycles(7, [[1, 2, 4], [3, 6, 5]]), from_cycles(7, [[2, 6], [4, 5]])]
    return PermGroup(7, gens, name="PSL2(7)")


def test_multiplication_is_left_to_right():
    """Test mul(a, b)[x] == b[a[x]]."""
    a = from_cycles(3, [[0, 1]])
    b = from_cycles(3, [[1, 2]])
    assert mul(a, b)[0] == 2
    assert is_identity(mul(a, inv(a)))
    assert np.array_equal(conj(a, b), mul(mul(inv(b), a), b))


def test_power_and_order():
    """Test powers and orders of permutations."""
    g = from_cycles(7, [[0, 1, 2], [3, 4]])
    assert perm_order(g) == 6
    assert is_identity(power(g, 6))
    assert np.array_equal(power(g, -1), inv(g))


def test_as_perm_validation():
    """Test rejected image lists."""
    with pytest.raises(ValidationError, match="bijection"):
        as_perm([0, 0, 1])
    with pytest.raises(ValidationError, match="expected 4"):
        as_perm([0, 1, 2], degree=4)


def test_group_rejects_mixed_degrees():
    """Test generators of the wrong degree."""
    with pytest.raises(ValidationError):
        PermGroup(4, [[1, 0, 2]])


@pytest.mark.parametrize(
    "make,order",
    [(lambda: symmetric_group(6), 720), (lambda: alternating_group(7), 2520), (_psl27, 168),
     (_dihedral8, 8), (_quaternion8, 8), (lambda: cyclic_group(11), 11)],
)
def test_order_against_sympy(make, order):
    """Test Schreier-Sims orders, with sympy as oracle."""
    G = make()
    assert G.order() == order
    assert PermutationGroup([Permutation(g.tolist()) for g in G.generators]).order() == order


@pytest.mark.parametrize("make", [lambda: symmetric_group(7), _psl27, lambda: alternating_group(8)])
def test_order_invariant_under_generator_shuffles(make):
    """Test that the BSGS order does not depend on generator order or redundancy."""
    G = make()
    rng = np.random.default_rng(3)
    for _ in range(5):
        gens = [G.generators[i] for i in rng.permutation(len(G.generators))]
        gens.append(mul(gens[0], gens[-1]))
        assert PermGroup(G.degree, gens).order() == G.order()


def test_orbit_stabilizer_identity():
    """Test |orbit| * |stabilizer| = |G| on every orbit."""
    G = PermGroup(9, [from_cycles(9, [[0, 1, 2]]), from_cycles(9, [[0, 1]]), from_cycles(9, [[3, 4, 5, 6]])])
    for orbit in G.orbits():
        assert len(orbit) * G.stabilizer(orbit[0]).order() == G.order()
    assert sorted(len(o) for o in G.orbits()) == [1, 1, 3, 4]


def test_membership():
    """Test sifting decides membership."""
    A5 = alternating_group(5)
    assert A5.contains(from_cycles(5, [[0, 1, 2]]))
    assert not A5.contains(from_cycles(5, [[0, 1]]))
    assert from_cycles(5, [[0, 1]]) in symmetric_group(5)


def test_elements_are_distinct():
    """Test element enumeration from the chain."""
    E = symmetric_group(4).elements()
    assert E.shape == (24, 4)
    assert len({row.tobytes() for row in E}) == 24
    assert element_order_counts(symmetric_group(4)) == {1: 1, 2: 9, 3: 8, 4: 6}


def test_element_enumeration_cap(monkeypatch):
    """Test that large groups are not enumerated."""
    monkeypatch.setattr(config, "ELEMENT_ENUMERATION_CAP", 100)
    with pytest.raises(CapExceededError):
        symmetric_group(6).elements()


def test_centralizer_center_and_normalizer():
    """Test centralizers, centres and normalizers in small groups."""
    S5 = symmetric_group(5)
    c = from_cycles(5, [[0, 1, 2, 3, 4]])
    assert centralizer(S5, [c]).order() == 5
    assert center(_dihedral8()).order() == 2
    assert center(S5).order() == 1
    assert normalizer(S5, PermGroup(5, [c])).order() == 20
    assert cyclic_normalizer(S5, c).order() == 20
    assert cyclic_normalizer(S5, c, units=4).order() == 20


def test_klein_normalizer():
    """Test the normalizer of the normal Klein group of S4."""
    x = from_cycles(4, [[0, 1], [2, 3]])
    y = from_cycles(4, [[0, 2], [1, 3]])
    assert klein_normalizer(symmetric_group(4), x, y).order() == 24


def test_find_conjugator():
    """Test element conjugacy search."""
    S4 = symmetric_group(4)
    a = from_cycles(4, [[0, 1, 2]])
    b = from_cycles(4, [[1, 2, 3]])
    g = find_conjugator(S4, a, b)
    assert g is not None and np.array_equal(conj(a, g), b)
    assert find_conjugator(S4, from_cycles(4, [[0, 1]]), a) is None


def test_subgroup_search_set_stabilizer():
    """Test the backtrack on the stabilizer of a 2-set in S5."""
    S5 = symmetric_group(5)

    def keeps(g):
        return set(g[[0, 1]].tolist()) == {0, 1}

    assert subgroup_search(S5, keeps).order() == 12


def test_series_and_solvability():
    """Test derived and lower central series."""
    assert [D.order() for D in derived_series(symmetric_group(4))] == [24, 12, 4, 1]
    assert is_solvable(symmetric_group(4))
    assert not is_solvable(alternating_group(5))
    assert is_nilpotent(_dihedral8())
    assert nilpotency_class(_dihedral8()) == 2
    assert not is_nilpotent(symmetric_group(3))


def test_normal_closure():
    """Test that a transposition closes to S4 and a double transposition to V4."""
    S4 = symmetric_group(4)
    assert normal_closure(S4, [from_cycles(4, [[0, 1]])]).order() == 24
    assert normal_closure(S4, [from_cycles(4, [[0, 1], [2, 3]])]).order() == 4


def test_extraspecial_types():
    """Test D8 against Q8, and non-extraspecial groups."""
    assert extraspecial_type(_dihedral8()) == "+"
    assert extraspecial_type(_quaternion8()) == "-"
    assert extraspecial_type(cyclic_group(8)) is None
    assert extraspecial_type(symmetric_group(4)) is None


@pytest.mark.parametrize("r,order", [(2, 16), (3, 9), (5, 5)])
def test_sylow_subgroups(r, order):
    """Test Sylow subgroups of S6."""
    P = sylow_subgroup(symmetric_group(6), r)
    assert P.order() == order
    assert P.is_subgroup_of(symmetric_group(6))


def test_regularity():
    """Test regular and semiregular groups."""
    assert is_regular(cyclic_group(7))
    assert not is_regular(symmetric_group(3))
    H = PermGroup(4, [from_cycles(4, [[0, 1], [2, 3]])])
    assert is_semiregular(H) and is_semiregular_by_elements(H)
    assert not is_semiregular(PermGroup(4, [from_cycles(4, [[0, 1]])]))


def test_coset_action():
    """Test S5 on the cosets of a point stabilizer and of A5."""
    S5 = symmetric_group(5)
    action = coset_action(S5, S5.stabilizer(4))
    assert action.degree == 5
    assert action.group.order() == 120
    assert coset_action(S5, alternating_group(5)).degree == 2
    H = PermGroup(5, [from_cycles(5, [[0, 1, 2, 3, 4]])])
    assert action.image_group(H).is_transitive()


def test_coset_cap(monkeypatch):
    """Test that a coset space above COSET_CAP is refused."""
    monkeypatch.setattr(config, "COSET_CAP", 4)
    S5 = symmetric_group(5)
    with pytest.raises(CapExceededError, match="coset space"):
        coset_action(S5, S5.stabilizer(4))


def test_order_bound():
    """Test the early exit of bounded Schreier-Sims."""
    S6 = symmetric_group(6)
    assert order_of_group_bounded(6, S6.generators, 1000) == 720
    assert order_of_group_bounded(6, S6.generators, 100) is None


def test_random_subgroup_of_order():
    """Test the seeded search for a subgroup of order 5 in S5."""
    H = random_subgroup_of_order(symmetric_group(5), 5, rng=np.random.default_rng(0), budget=3000)
    assert H is not None and H.order() == 5
    assert random_subgroup_of_order(symmetric_group(5), 7) is None


def test_pair_and_subset_actions():
    """Test actions on ordered pairs and on 2-subsets."""
    S4 = symmetric_group(4)
    pairs = ordered_pair_action(S4)
    assert pairs.degree == 12 and pairs.order() == 24 and pairs.is_transitive()
    subsets = subset_action(symmetric_group(5), 2)
    assert subsets.degree == 10 and subsets.order() == 120 and subsets.is_transitive()


def test_product_action():
    """Test S3 wr S2 on 9 points."""
    S3 = symmetric_group(3)
    assert product_action(S3, 2).order() == 36
    W = product_action(S3, 2, top=symmetric_group(2))
    assert W.degree == 9 and W.order() == 72


def test_restrict():
    """Test restriction to an invariant set."""
    G = PermGroup(5, [from_cycles(5, [[0, 1, 2]]), from_cycles(5, [[3, 4]])])
    R = restrict(G, [0, 1, 2])
    assert R.degree == 3 and R.order() == 3
    with pytest.raises(ValidationError, match="not invariant"):
        restrict(G, [0, 3])


def test_alternating_order_formula():
    """Test A_n orders for small n."""
    for n in range(3, 9):
        assert alternating_group(n).order() == math.factorial(n) // 2
