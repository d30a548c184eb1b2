"""Test finite field construction and helpers."""

import galois
import numpy as np
import pytest

from src.factoriza.config import config
from src.factoriza.services.field_core import (
    PrimePower,
    field_of_order,
    frobenius,
    is_square,
    least_nonsquare,
    make_field,
    primitive_prime_divisor,
    quadratic_extension,
    square_classes,
    subfield_embedding,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError


def test_prime_power_from_order():
    """Test splitting a prime power."""
    assert PrimePower.from_order(64) == PrimePower(2, 6)
    assert PrimePower.from_order(49).q == 49


def test_prime_power_rejects_composites():
    """Test that non prime powers are rejected."""
    with pytest.raises(ValidationError, match="not a prime power"):
        PrimePower.from_order(12)
    with pytest.raises(ValidationError, match="not prime"):
        PrimePower(4, 1)


def test_least_lex_primitive_polynomials():
    """Test the defining polynomials of GF(4) and GF(8)."""
    assert make_field(2, 2).poly == galois.Poly([1, 1, 1])
    assert make_field(2, 3).poly == galois.Poly([1, 1, 0, 1])
    assert make_field(2, 4).poly.is_primitive()


def test_prime_field_uses_least_primitive_root():
    """Test the primitive element of prime fields."""
    assert make_field(5, 1).primitive == 2
    assert make_field(7, 1).primitive == 3
    assert make_field(2, 1).primitive == 1


@pytest.mark.parametrize("q", [2, 3, 4, 8, 9, 25, 27])
def test_log_antilog_tables_are_inverse(q):
    """Test that log and antilog invert each other."""
    F = field_of_order(q)
    assert F.log[0] == -1
    assert sorted(F.antilog.tolist()) == list(range(1, q))
    for x in range(1, q):
        assert F.antilog[F.log[x]] == x


def test_frobenius_fixes_prime_field():
    """Test that x -> x^p fixes exactly the prime field."""
    F = field_of_order(9)
    fixed = [x for x in range(9) if frobenius(F, x) == x]
    assert len(fixed) == 3
    assert all(frobenius(F, frobenius(F, x)) == x for x in range(9))


def test_square_classes():
    """Test squares and non-squares of GF(7)."""
    F = field_of_order(7)
    squares, others = square_classes(F)
    assert squares == [1, 2, 4]
    assert others == [3, 5, 6]
    assert least_nonsquare(F) == 3
    assert is_square(field_of_order(8), 5)


def test_least_nonsquare_even_field():
    """Test that even fields have no non-squares."""
    with pytest.raises(ValidationError):
        least_nonsquare(field_of_order(4))


@pytest.mark.parametrize(
    "q,m,expected",
    [(2, 3, 7), (3, 4, 5), (2, 4, 5), (5, 2, 3), (2, 6, None), (3, 2, None), (7, 2, None)],
)
def test_primitive_prime_divisor(q, m, expected):
    """Test Zsigmondy primes, including the exceptions."""
    assert primitive_prime_divisor(q, m) == expected


def test_subfield_embedding_image_is_subfield():
    """Test that GF(4) lands on the elements fixed by x -> x^4 in GF(16)."""
    big, small = field_of_order(16), field_of_order(4)
    emb = subfield_embedding(big, small)
    GF = big.GF
    fixed = sorted(int(x) for x in GF.elements if x**4 == x)
    assert sorted(emb.tolist()) == fixed
    a, b = 2, 3
    assert GF(emb[a]) * GF(emb[b]) == GF(emb[int(small.GF(a) * small.GF(b))])


def test_subfield_embedding_rejects_non_subfield():
    """Test that GF(4) is not a subfield of GF(8)."""
    with pytest.raises(ValidationError, match="not a subfield"):
        subfield_embedding(field_of_order(8), field_of_order(4))


def test_quadratic_extension_coordinates():
    """Test x = b + c*xi with b, c in the subfield."""
    ext = quadratic_extension(3)
    GF = ext.big.GF
    x = GF.elements
    b, c = ext.coordinates(x)
    assert np.array_equal(b + c * GF(ext.xi), x)
    assert len(ext.to_small(b)) == 9
    theta = GF(ext.skew_unit())
    assert theta**3 == -theta


def test_field_cap(monkeypatch):
    """Test that fields above the cap are refused."""
    monkeypatch.setattr(config, "FIELD_CAP", 8)
    with pytest.raises(CapExceededError, match="exceeds cap 8"):
        make_field.__wrapped__(13, 1)
