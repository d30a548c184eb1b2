"""Test order formulas, expressions and the shape parser."""

from fractions import Fraction

import pytest

from src.factoriza.services.formula import (
    SPORADIC_ORDERS,
    Const,
    family_order,
    gcd,
    m,
    order_g2,
    order_gl,
    order_omega,
    order_pomega,
    order_psl,
    order_psp,
    order_psu,
    q,
    shape_order,
)
from src.factoriza.utils.exceptions import ValidationError


def test_expression_evaluates_and_prints():
    """Test that one expression both evaluates and prints"""
    ell = q**3 * (q**3 - 1) / gcd(2, q - 1)
    assert ell.value({"q": 3}) == 27 * 26 // 2
    assert ell.value({"q": 4}) == 64 * 63
    assert str(ell) == "q^3*(q^3-1)/(2,q-1)"


def test_expression_fraction_and_missing_parameter():
    """Test non-integral values and unset parameters"""
    half = q / 2
    assert half.evaluate({"q": 3}) == Fraction(3, 2)
    with pytest.raises(ValidationError, match="not an integer"):
        half.value({"q": 3})
    with pytest.raises(ValidationError, match="parameter m is not set"):
        (m + 1).value({"q": 2})


def test_const_and_reverse_operators():
    """Test integer operands on either side"""
    assert (2 - q).value({"q": 5}) == -3
    assert (Const(12) / q).value({"q": 4}) == 3
    assert str(1 + q) == "1+q"


@pytest.mark.parametrize(
    "fn, args, expected",
    [
        (order_gl, (2, 3), 48),
        (order_psl, (2, 7), 168),
        (order_psl, (3, 4), 20160),
        (order_psp, (4, 3), 25920),
        (order_psu, (3, 3), 6048),
        (order_psu, (4, 2), 25920),
        (order_g2, (3,), 4245696),
    ],
)
def test_classical_orders(fn, args, expected):
    """Test classical group orders against known values"""
    assert fn(*args) == expected


@pytest.mark.parametrize(
    "dim, q_, sign, expected",
    [
        (8, 2, "+", 174182400),
        (4, 2, "+", 36),
        (4, 2, "-", 60),
        (5, 3, "odd", 25920),
        (7, 3, "odd", 4585351680),
    ],
)
def test_orthogonal_orders(dim, q_, sign, expected):
    """Test simple orthogonal group orders"""
    assert order_pomega(dim, q_, sign) == expected


def test_omega_plus_eight_three():
    """Test the centre of Omega8+(3)"""
    assert order_omega(8, 3, "+") == 2 * order_pomega(8, 3, "+")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("PSL2(11)", 660),
        ("M22", 443520),
        ("3^4:2", 162),
        ("(3^3:13:3).2", 2106),
        ("2^{3+6}:(63:3)", 96768),
        ("5 x PSL2(16)", 20400),
        ("3_+^{1+2}", 27),
        ("3_-^{1+2}:8", 216),
        ("AGammaL1(8)", 168),
        ("O8+(2)", 348364800),
        ("POmega8+(3)", 4952179814400),
        ("A7", 2520),
        ("S6", 720),
        ("PSL3(4).2", 40320),
    ],
)
def test_shape_order(text, expected):
    """Test the shape notation parser"""
    assert shape_order(text) == expected


def test_shape_order_outer_parts():
    """Test optional outer parts"""
    assert shape_order("PSL2(8).@") == 504
    assert shape_order("PSL2(8).@", {"@": 3}) == 1512
    assert shape_order("11:5.@1.@2", {"@1": 2, "@2": 1}) == 110


@pytest.mark.parametrize("text", ["3^", "(3:2", "PSL2(4))", "3 ? 2", ""])
def test_shape_order_malformed(text):
    """Test that malformed shapes raise a validation error"""
    with pytest.raises(ValidationError):
        shape_order(text)


def test_family_order_errors():
    """Test unknown families and missing parameters"""
    with pytest.raises(ValidationError, match="unknown family"):
        family_order("XY", 2, None, 3)
    with pytest.raises(ValidationError, match="needs a parameter"):
        family_order("PSL", None, None, None)


def test_sporadic_orders_consistent():
    """Test that the Mathieu orders divide one another as point stabilizers"""
    assert SPORADIC_ORDERS["M24"] == 24 * SPORADIC_ORDERS["M23"]
    assert SPORADIC_ORDERS["M23"] == 23 * SPORADIC_ORDERS["M22"]
    assert SPORADIC_ORDERS["M12"] == 12 * SPORADIC_ORDERS["M11"]
    assert SPORADIC_ORDERS["M11"] == 11 * SPORADIC_ORDERS["M10"]
