"""Exact arithmetic in GF(p^f) and the number theory the constructions lean on.

Fields are galois FieldArray classes built on the lexicographically least
primitive polynomial (coefficients compared low degree first), so that the
class of ``x`` is a primitive element. Element indices are galois' integer
representation: the vector of polynomial coefficients read as base-p digits.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import galois
import numpy as np
from sympy import isprime, primefactors

from src.factoriza.config import config
from src.factoriza.utils.exceptions import CapExceededError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrimePower:
    """q = p^f with p prime."""

    p: int
    f: int

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise ValidationError(f"{self.p} is not prime", {"p": self.p})
        if self.f < 1:
            raise ValidationError(f"exponent must be >= 1, got {self.f}", {"f": self.f})

    @property
    def q(self) -> int:
        return self.p**self.f

    @classmethod
    def from_order(cls, q: int) -> "PrimePower":
        """Split a prime power into (p, f)."""
        if q < 2:
            raise ValidationError(f"{q} is not a prime power")
        ps = primefactors(q)
        if len(ps) != 1:
            raise ValidationError(f"{q} is not a prime power")
        p = int(ps[0])
        f = 0
        while q % p == 0:
            q //= p
            f += 1
        return cls(p, f)


@dataclass(frozen=True, eq=False)
class FieldTable:
    """GF(q) with log/antilog tables with respect to a fixed primitive element.

    Attributes:
        spec: the prime power.
        GF: galois FieldArray class for the field.
        poly: defining polynomial over GF(p).
        primitive: index of the chosen primitive element.
        antilog: antilog[k] = primitive^k, length q-1.
        log: log[x] for x != 0; log[0] = -1.
    """

    spec: PrimePower
    GF: Any
    poly: Any
    primitive: int
    antilog: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def f(self) -> int:
        return self.spec.f

    def __call__(self, values: Any) -> Any:
        return self.GF(values)

    def zeros(self, shape: Any) -> Any:
        return self.GF.Zeros(shape)

    def identity(self, n: int) -> Any:
        return self.GF.Identity(n)

    def power(self, k: int) -> int:
        """Index of primitive^k."""
        return int(self.antilog[k % (self.q - 1)])

    def prime_basis(self) -> list[int]:
        """A GF(p)-basis of GF(q): 1, x, ..., x^{f-1} as indices."""
        return [self.p**i for i in range(self.f)]

    def __repr__(self) -> str:
        return f"FieldTable(GF({self.q}))"


def _least_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = primefactors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
    raise ValidationError(f"no primitive root mod {p}")  # unreachable for prime p


def least_primitive_poly(base: Any, degree: int) -> Any:
    """Lexicographically least monic primitive polynomial over a galois field class.

    Coefficient vectors (c_0, ..., c_{degree-1}) are compared with c_0 most
    significant, i.e. low degree first.
    """
    for coeffs in itertools.product(range(base.order), repeat=degree):
        if coeffs[0] == 0:
            continue
        poly = galois.Poly(list(coeffs) + [1], field=base, order="asc")
        if poly.is_primitive():
            return poly
    raise ValidationError(f"no primitive polynomial of degree {degree} over GF({base.order})")


@lru_cache(maxsize=64)
def make_field(p: int, f: int) -> FieldTable:
    """Build GF(p^f) on its least-lex primitive polynomial.

    For f = 1 the primitive element is the least primitive root of p; for
    f > 1 it is the class of x.

    Raises:
        ValidationError: p is not prime or f < 1.
        CapExceededError: p^f is above the configured field cap.
    """
    spec = PrimePower(p, f)
    if spec.q > config.FIELD_CAP:
        raise CapExceededError("field", spec.q, config.FIELD_CAP)

    prime_field = galois.GF(p)
    if f == 1:
        g = _least_primitive_root(p)
        poly = galois.Poly([(-g) % p, 1], field=prime_field, order="asc")
        GF = galois.GF(p, primitive_element=g) if p > 2 else prime_field
        primitive = g
    else:
        poly = least_primitive_poly(prime_field, f)
        GF = galois.GF(p**f, irreducible_poly=poly)
        primitive = p  # integer representation of x

    alpha = GF(primitive)
    antilog = (alpha ** np.arange(spec.q - 1)).view(np.ndarray).astype(np.int64)
    log = np.full(spec.q, -1, dtype=np.int64)
    log[antilog] = np.arange(spec.q - 1)
    logger.debug("built GF(%d) with defining polynomial %s", spec.q, poly)
    return FieldTable(spec, GF, poly, primitive, antilog, log)


def field_of_order(q: int) -> FieldTable:
    """make_field for a prime power given as an integer."""
    spec = PrimePower.from_order(q)
    return make_field(spec.p, spec.f)


def frobenius(F: FieldTable, x: int, k: int = 1) -> int:
    """x^(p^k) as an element index."""
    if x == 0:
        return 0
    e = pow(F.p, k % F.f, F.q - 1) if F.q > 2 else 1
    return F.power(int(F.log[x]) * e)


def is_square(F: FieldTable, x: int) -> bool:
    """True iff x = y^2 for some y in F."""
    if x == 0 or F.p == 2:
        return True
    return int(F.log[x]) % 2 == 0


def square_classes(F: FieldTable) -> tuple[list[int], list[int]]:
    """Nonzero squares and non-squares of an odd field, as sorted indices."""
    nonzero = range(1, F.q)
    squares = sorted(x for x in nonzero if is_square(F, x))
    others = sorted(x for x in nonzero if not is_square(F, x))
    return squares, others


def least_nonsquare(F: FieldTable) -> int:
    """Smallest index that is not a square (q odd)."""
    if F.p == 2:
        raise ValidationError("every element of an even field is a square")
    return square_classes(F)[1][0]


def primitive_prime_divisor(q: int, m: int) -> int | None:
    """Least prime dividing q^m - 1 but no q^i - 1 with i < m (Zsigmondy).

    Returns None exactly for (m, q) = (6, 2) and for m = 2 with q + 1 a power of 2.
    """
    if q < 2 or m < 2:
        raise ValidationError("primitive_prime_divisor needs q >= 2 and m >= 2")
    for r in primefactors(q**m - 1):
        if all((q**i - 1) % r for i in range(1, m)):
            return int(r)
    return None


def subfield_embedding(big: FieldTable, small: FieldTable) -> np.ndarray:
    """Index map GF(q) -> GF(q^k).

    The small field's primitive element goes to the least root, in the big
    field, of its defining polynomial, and powers follow.
    """
    if big.p != small.p or big.f % small.f:
        raise ValidationError(f"GF({small.q}) is not a subfield of GF({big.q})")
    emb = np.zeros(small.q, dtype=np.int64)
    if small.f == 1:
        emb[:] = np.arange(small.q)  # prime field elements keep their index
        return emb
    lifted = galois.Poly(small.poly.coeffs.view(np.ndarray), field=big.GF)
    beta = min(int(r) for r in lifted.roots())
    b = big.GF(beta)
    for k in range(small.q - 1):
        emb[small.power(k)] = int(b**k)
    return emb


@dataclass(frozen=True, eq=False)
class QuadraticExtension:
    """GF(q) inside GF(q^2) with conjugation x -> x^q and F_q-coordinates.

    Every x in GF(q^2) is written uniquely as b + c*xi with b, c in GF(q),
    where xi is the big field's primitive element.
    """

    big: FieldTable
    small: FieldTable
    embed: np.ndarray = field(repr=False)
    xi: int

    @property
    def q(self) -> int:
        return self.small.q

    def conj(self, x: Any) -> Any:
        """Entrywise q-power on a big-field array."""
        return x**self.q

    def coordinates(self, x: Any) -> tuple[Any, Any]:
        """(b, c) arrays of big-field elements in the embedded GF(q) with x = b + c*xi."""
        GF = self.big.GF
        xi = GF(self.xi)
        c = (x - self.conj(x)) / (xi - xi**self.q)
        b = x - c * xi
        return b, c

    def to_small(self, x: Any) -> np.ndarray:
        """Indices in GF(q) of embedded elements."""
        back = np.zeros(self.big.q, dtype=np.int64) - 1
        back[self.embed] = np.arange(self.small.q)
        out = back[np.asarray(x.view(np.ndarray), dtype=np.int64)]
        if (out < 0).any():
            raise ValidationError("element is not in the subfield")
        return out

    def from_small(self, x: Any) -> Any:
        return self.big.GF(self.embed[np.asarray(x, dtype=np.int64)])

    def skew_unit(self) -> int:
        """theta with theta^q = -theta: 1 in characteristic 2, else xi^((q+1)/2)."""
        if self.big.p == 2:
            return 1
        return self.big.power((self.q + 1) // 2)


@lru_cache(maxsize=32)
def quadratic_extension(q: int) -> QuadraticExtension:
    """GF(q) ⊂ GF(q^2) with the fixed embedding."""
    small = field_of_order(q)
    big = make_field(small.p, 2 * small.f)
    return QuadraticExtension(big, small, subfield_embedding(big, small), big.primitive)
