"""Test the nilpotent semilinear subgroups and the product-action witnesses."""

import pytest

from src.factoriza.config import config
from src.factoriza.services.nilpotent import (
    GammaL1,
    GammaL1Variant,
    extraspecial_regular,
    gammaL1_nilpotent,
    nilpotent_transitive_census,
    wreath_product_regular,
)
from src.factoriza.services.perm_engine import (
    extraspecial_type,
    is_nilpotent,
    is_regular,
    perm_order,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError


def test_gammaL1_degrees_and_orders():
    """Test ΓL1(q^m) on vectors and on projective points"""
    vectors = GammaL1(7, 2)
    points = GammaL1(7, 2, projective=True)
    assert vectors.degree == 48
    assert points.degree == 8
    assert vectors.group().order() == 96
    assert perm_order(vectors.y()) == 2
    assert perm_order(GammaL1(2, 6).frobenius()) == 6


def test_gammaL1_rejects_bad_parameters(monkeypatch):
    """Test field order, m and domain cap checks"""
    with pytest.raises(ValidationError):
        GammaL1(6, 2)
    with pytest.raises(ValidationError, match="m must be positive"):
        GammaL1(7, 0)
    monkeypatch.setattr(config, "DOMAIN_CAP", 10)
    with pytest.raises(CapExceededError):
        GammaL1(7, 2)


@pytest.mark.parametrize(
    "q, which, order, transitive, regular",
    [
        (7, GammaL1Variant.SD, 96, True, False),
        (7, GammaL1Variant.Q, 48, True, True),
        (7, GammaL1Variant.D_TRANSITIVE, 8, True, True),
        (7, GammaL1Variant.D_INTRANSITIVE, 8, False, False),
        (3, GammaL1Variant.SD, 16, True, False),
        (31, GammaL1Variant.D_TRANSITIVE, 32, True, True),
    ],
)
def test_gammaL1_variants(q, which, order, transitive, regular):
    """Test the named nilpotent subgroups at Mersenne primes"""
    W = gammaL1_nilpotent(q, 2, which).group
    assert W.order() == order
    assert is_nilpotent(W)
    assert W.is_transitive() == transitive
    assert is_regular(W) == regular


def test_gammaL1_full_cycle_any_field():
    """Test the Singer-like full cycle for non-Mersenne fields"""
    W = gammaL1_nilpotent(5, 3, "full-cycle").group
    assert W.order() == 124
    assert is_regular(W)


def test_gammaL1_extraspecial_minus():
    """Test the Sylow 3-subgroup of PΓL1(64) on 9 points"""
    W = gammaL1_nilpotent(8, 2, GammaL1Variant.EXTRASPECIAL_MINUS).group
    assert W.degree == 9
    assert W.order() == 27
    assert extraspecial_type(W) == "-"
    with pytest.raises(ValidationError, match="PΓL1"):
        gammaL1_nilpotent(4, 3, GammaL1Variant.EXTRASPECIAL_MINUS)


@pytest.mark.parametrize("q", [5, 8, 9])
def test_gammaL1_variant_needs_mersenne_prime(q):
    """Test that SD, Q and D need a Mersenne prime"""
    with pytest.raises(ValidationError, match="Mersenne"):
        gammaL1_nilpotent(q, 2, GammaL1Variant.SD)


def test_unknown_variant():
    """Test an unknown variant name"""
    with pytest.raises(ValueError):
        gammaL1_nilpotent(7, 2, "cyclic")


def test_census_gammaL1_49():
    """Test the nilpotent transitive subgroups of ΓL1(49) up to conjugacy"""
    assert nilpotent_transitive_census(7) == ["C3xQ16", "C3xSD32", "C48"]


def test_census_gammaL1_9():
    """Test the census at q = 3: C8, Q8 and SD16, the last outside the registry by name"""
    assert nilpotent_transitive_census(3) == ["C8", "Q8", "order 16"]


@pytest.mark.slow
@pytest.mark.parametrize("sign", ["+", "-"])
def test_extraspecial_regular(sign):
    """Test both regular extraspecial subgroups of PSp4(3) on 27 points"""
    R = extraspecial_regular(sign)
    assert R.degree == 27
    assert R.order() == 27
    assert is_regular(R)
    assert extraspecial_type(R) == sign


def test_wreath_product_regular_rejects_empty():
    """Test parameter checks of the product construction"""
    with pytest.raises(ValidationError):
        wreath_product_regular(0, 0)
    with pytest.raises(ValidationError):
        wreath_product_regular(-1, 1)


def test_wreath_product_regular_cap(monkeypatch):
    """Test the product-action cap"""
    monkeypatch.setattr(config, "DOMAIN_CAP", 1000)
    with pytest.raises(CapExceededError):
        wreath_product_regular(3, 0)


@pytest.mark.slow
def test_wreath_product_regular_plain_factors():
    """Test (3^{1+2})^2 regular on 729 points inside PSp4(3) wr S2"""
    w = wreath_product_regular(2, 0)
    assert w.group.degree == 729
    assert w.group.order() == 729
    assert w.parent is not None
    assert w.parent.contains(w.group.generators[0])


@pytest.mark.slow
def test_wreath_product_regular_minus_type():
    """Test the product with minus-type plain factors"""
    w = wreath_product_regular(2, 0, "-")
    assert w.group.order() == 729
    assert is_regular(w.group)
    assert "3-^(1+2)" in w.label


@pytest.mark.slow
def test_wreath_product_regular_twisted_factor():
    """Test 3^6:3^{1+2} regular on 19683 points"""
    w = wreath_product_regular(0, 1)
    assert w.group.degree == 19683
    assert w.group.order() == 19683
    assert w.group.is_transitive()
    assert is_regular(w.group)
