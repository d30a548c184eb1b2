"""Test the Mathieu assets, actions on sets and the small linear models."""

import pytest

from src.factoriza.services.formula import SPORADIC_ORDERS
from src.factoriza.services.perm_engine import as_perm
from src.factoriza.services.sporadic import (
    MATHIEU_DEGREES,
    action_on_sets,
    dodecad,
    load_generators,
    m11_on_pairs,
    m12_2,
    m22_2,
    m23_on_heptads,
    m23_on_pairs,
    mathieu,
    octads,
    psu33_deg28,
    sporadic_optional,
)
from src.factoriza.utils.exceptions import UnavailableGroupError, ValidationError


@pytest.mark.parametrize("name", sorted(MATHIEU_DEGREES))
def test_mathieu_assets(name):
    """Test that each asset generates a transitive group of the right order"""
    G = mathieu(name)
    assert G.degree == MATHIEU_DEGREES[name]
    assert G.order() == SPORADIC_ORDERS[name]
    assert G.is_transitive()


def test_mathieu_case_insensitive_and_unknown():
    """Test name lookup"""
    assert mathieu("m11").order() == mathieu("M11").order()
    with pytest.raises(ValidationError, match="unknown Mathieu group"):
        mathieu("M13")


def test_mathieu_point_stabilizers(m24):
    """Test that M23 is the stabilizer of point 23 in the M24 asset"""
    stab = m24.stabilizer(23)
    assert stab.order() == SPORADIC_ORDERS["M23"]
    for g in mathieu("M23").generators:
        assert m24.contains(as_perm(list(g) + [23], 24))


def test_load_generators_errors(tmp_path):
    """Test malformed and empty assets"""
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="empty"):
        load_generators(str(empty))
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n0 1 x\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="malformed"):
        load_generators(str(bad))
    with pytest.raises(FileNotFoundError):
        load_generators(str(tmp_path / "missing.txt"))


def test_load_generators(tmp_path):
    """Test a well-formed asset"""
    path = tmp_path / "c3.txt"
    path.write_text("# C3\n3\n1 2 0\n", encoding="utf-8")
    degree, gens = load_generators(str(path))
    assert degree == 3
    assert gens[0].tolist() == [1, 2, 0]


def test_optional_assets():
    """Test that absent optional assets are reported, unknown names refused"""
    with pytest.raises(UnavailableGroupError):
        sporadic_optional("J2.2")
    with pytest.raises(ValidationError, match="unknown optional group"):
        sporadic_optional("Ru")


def test_action_on_pairs():
    """Test M11 and M23 on two-sets"""
    assert m11_on_pairs().group.degree == 55
    act = m23_on_pairs()
    assert act.group.degree == 253
    assert act.group.order() == SPORADIC_ORDERS["M23"]
    assert act.index({1, 0}) == 0


def test_set_action_images(m12):
    """Test the induced permutation of a set action"""
    act = action_on_sets(m12, {0, 1, 2})
    assert act.group.degree == 220
    g = m12.generators[0]
    image = act.image(g)
    s = act.sets[5]
    assert act.sets[image[5]] == frozenset(int(g[x]) for x in s)


@pytest.mark.slow
def test_octads_and_dodecad():
    """Test the Steiner system S(5, 8, 24)"""
    blocks = octads()
    assert len(blocks) == 759
    assert all(len(b) == 8 for b in blocks)
    # any five points lie in exactly one octad
    five = frozenset(sorted(blocks[0])[:5])
    assert sum(1 for b in blocks if five <= b) == 1
    assert len(dodecad()) == 12


@pytest.mark.slow
def test_heptads():
    """Test M23 on its 253 heptads"""
    act = m23_on_heptads()
    assert act.group.degree == 253
    assert all(len(s) == 7 for s in act.sets)


@pytest.mark.slow
def test_outer_mathieu_groups():
    """Test M12.2 on 24 points and M22.2 on 22 points"""
    G = m12_2()
    assert G.degree == 24
    assert G.order() == 2 * SPORADIC_ORDERS["M12"]
    H = m22_2()
    assert H.degree == 22
    assert H.order() == 2 * SPORADIC_ORDERS["M22"]
    assert H.is_transitive()


def test_psp43_model(psp43):
    """Test PSp4(3) on 27 points and its extension by the field automorphism"""
    assert psp43.group.degree == 27
    assert psp43.group.order() == 25920
    assert psp43.extended("PSp4(3).2").order() == 51840


def test_psu33_model():
    """Test PSU3(3) on its 28 isotropic points"""
    model = psu33_deg28()
    assert model.group.degree == 28
    assert model.group.order() == 6048
    assert model.group.is_transitive()
