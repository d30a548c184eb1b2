"""Nilpotent transitive subgroups: semilinear groups and product-action witnesses.

ΓL1(q^m) acts on the nonzero vectors of GF(q^m) and, modulo GF(q)*, on the
projective points of GF(q)^m. Both actions are written in discrete-log
coordinates: the vector ω^i is point i of Z_{q^m-1} and the projective point
⟨ω^i⟩ is point i of Z_N with N = (q^m-1)/(q-1). Multiplication by ω is
i -> i+1 and the field automorphism v -> v^(p^k) is i -> p^k i.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from src.factoriza.config import config
from src.factoriza.services.field_core import PrimePower
from src.factoriza.services.perm_engine import (
    Perm,
    PermGroup,
    SubgroupWitness,
    center,
    diagonal_element,
    extraspecial_type,
    identity,
    inv,
    is_nilpotent,
    is_regular,
    mul,
    power,
    product_action,
    symmetric_group,
)
from src.factoriza.services.regular_search import regular_subgroup_search
from src.factoriza.services.small_groups import (
    cayley_table,
    conjugacy_class_key,
    identify,
    is_nilpotent_table,
    subtable,
    two_generated_subgroups,
)
from src.factoriza.services.sporadic import psp43_deg27
from src.factoriza.utils.exceptions import CapExceededError, ConstructionError, ValidationError

logger = logging.getLogger(__name__)


class GammaL1Variant(str, Enum):
    """Named nilpotent subgroups of ΓL1(q^m)"""

    FULL_CYCLE = "full-cycle"
    SD = "SD"
    Q = "Q"
    D_TRANSITIVE = "D-transitive"
    D_INTRANSITIVE = "D-intransitive"
    EXTRASPECIAL_MINUS = "3^{1+2}-minus"


def _is_mersenne(q: int) -> bool:
    return q >= 3 and (q + 1) & q == 0


@dataclass(frozen=True)
class GammaL1:
    """ΓL1(q^m) on nonzero vectors, or on projective points when ``projective``."""

    q: int
    m: int
    projective: bool = False

    def __post_init__(self) -> None:
        PrimePower.from_order(self.q)
        if self.m < 1:
            raise ValidationError(f"m must be positive, got {self.m}")
        if self.degree > config.DOMAIN_CAP:
            raise CapExceededError("ΓL1 domain", self.degree, config.DOMAIN_CAP)

    @property
    def p(self) -> int:
        return PrimePower.from_order(self.q).p

    @property
    def degree(self) -> int:
        n = self.q**self.m - 1
        return n // (self.q - 1) if self.projective else n

    def x(self) -> Perm:
        """Multiplication by the primitive element."""
        n = self.degree
        return ((np.arange(n) + 1) % n).astype(np.int32)

    def frobenius(self, k: int = 1) -> Perm:
        """v -> v^(p^k)."""
        n = self.degree
        return ((np.arange(n, dtype=np.int64) * pow(self.p, k, n)) % n).astype(np.int32)

    def y(self) -> Perm:
        """v -> v^q, the GF(q)-linear field automorphism."""
        return self.frobenius(PrimePower.from_order(self.q).f)

    def group(self) -> PermGroup:
        label = "PΓL1" if self.projective else "ΓL1"
        return PermGroup(self.degree, [self.x(), self.frobenius(1)], name=f"{label}({self.q}^{self.m})")


def gammaL1_nilpotent(q: int, m: int, which: GammaL1Variant | str) -> SubgroupWitness:
    """A named nilpotent subgroup of ΓL1(q^m).

    full-cycle is ⟨x⟩ on nonzero vectors for any (q, m). SD and Q need m = 2
    and q a Mersenne prime, and act on nonzero vectors through
    x1 = x^(2(q+1)), x2 = x^((q-1)/2) and y. The D variants act on the q+1
    projective points for the same q; 3^{1+2}-minus is the Sylow 3-subgroup
    of PΓL1(64) on 9 points.

    Raises:
        ValidationError: the variant is not defined at (q, m).
        ConstructionError: the built group fails its structural checks.
    """
    which = GammaL1Variant(which)
    label = f"{which.value} in ΓL1({q}^{m})"
    if which is GammaL1Variant.FULL_CYCLE:
        model = GammaL1(q, m)
        W = PermGroup(model.degree, [model.x()], name=label, order_hint=model.degree)
        return _checked(SubgroupWitness(W, label, model.group()), order=model.degree, regular=True)

    if which is GammaL1Variant.EXTRASPECIAL_MINUS:
        if (q, m) != (8, 2):
            raise ValidationError("3^{1+2}-minus is built in PΓL1(64) only", {"q": q, "m": m})
        model = GammaL1(8, 2, projective=True)
        W = PermGroup(9, [model.x(), model.frobenius(2)], name=label)
        witness = _checked(SubgroupWitness(W, label, model.group()), order=27, transitive=True)
        if extraspecial_type(W) != "-":
            raise ConstructionError(f"{label} is not extraspecial of minus type")
        return witness

    if m != 2 or not _is_mersenne(q) or PrimePower.from_order(q).f != 1:
        raise ValidationError(f"{which.value} needs m = 2 and q a Mersenne prime", {"q": q, "m": m})

    if which in (GammaL1Variant.D_TRANSITIVE, GammaL1Variant.D_INTRANSITIVE):
        model = GammaL1(q, 2, projective=True)
        x, y = model.x(), model.y()
        second = mul(x, y) if which is GammaL1Variant.D_TRANSITIVE else y
        W = PermGroup(q + 1, [power(x, 2), second], name=label)
        return _checked(
            SubgroupWitness(W, label, model.group()),
            order=q + 1,
            transitive=which is GammaL1Variant.D_TRANSITIVE,
        )

    model = GammaL1(q, 2)
    x, y = model.x(), model.y()
    x1 = power(x, 2 * (q + 1))
    x2 = power(x, (q - 1) // 2)
    if which is GammaL1Variant.SD:
        W = PermGroup(model.degree, [x1, x2, y], name=label)
        return _checked(SubgroupWitness(W, label, model.group()), order=2 * (q * q - 1), transitive=True)
    W = PermGroup(model.degree, [x1, power(x2, 2), mul(x2, y)], name=label)
    return _checked(SubgroupWitness(W, label, model.group()), order=q * q - 1, regular=True)


def _checked(
    w: SubgroupWitness, *, order: int, transitive: bool | None = None, regular: bool | None = None
) -> SubgroupWitness:
    G = w.group
    if G.order() != order:
        raise ConstructionError(f"{w.label}: order {G.order()}, expected {order}")
    if not is_nilpotent(G):
        raise ConstructionError(f"{w.label} is not nilpotent")
    if transitive is not None and G.is_transitive() != transitive:
        raise ConstructionError(f"{w.label}: transitivity is {G.is_transitive()}, expected {transitive}")
    if regular is not None and is_regular(G) != regular:
        raise ConstructionError(f"{w.label}: regularity is {is_regular(G)}, expected {regular}")
    logger.debug("%s: order %d, orbits %d", w.label, order, len(G.orbits()))
    return w


def nilpotent_transitive_census(q: int, m: int = 2) -> list[str]:
    """Nilpotent transitive subgroups of ΓL1(q^m) on nonzero vectors, up to conjugacy.

    Every subgroup of ΓL1(q^m) is metacyclic, so the two-generated subgroups
    of its Cayley table are all of them. Names come from the shape registry.
    """
    model = GammaL1(q, m)
    T = cayley_table(model.group())
    assert T.elements is not None
    reps: dict[bytes, str] = {}
    for mask in two_generated_subgroups(T):
        members = T.elements[mask]
        if np.unique(members[:, 0]).shape[0] != model.degree:
            continue
        sub = subtable(T, mask)
        if not is_nilpotent_table(sub):
            continue
        key = conjugacy_class_key(T, mask)
        if key not in reps:
            reps[key] = identify(sub) or f"order {sub.order}"
    names = sorted(reps.values())
    logger.info("ΓL1(%d^%d): nilpotent transitive classes %s", q, m, names)
    return names


# ---------------------------------------------------------------------------
# regular subgroups of PSp4(3) wr S_d in product action


@lru_cache(maxsize=2)
def extraspecial_regular(sign: str) -> PermGroup:
    """The regular subgroup 3^{1+2} of the given sign in PSp4(3) on 27 points."""
    if sign not in ("+", "-"):
        raise ValidationError(f"sign must be '+' or '-', got {sign}")
    for cls in regular_subgroup_search(psp43_deg27().group, nilpotent_only=True):
        if cls.extraspecial == sign:
            return cls.group
    raise ConstructionError(f"no regular 3{sign}^(1+2) in PSp4(3) on 27 points")


def _split(P: PermGroup) -> tuple[list[Perm], Perm]:
    """Generators of a normal C3 x C3 in 3+^{1+2} and an element y outside it."""
    Z = center(P)
    z = Z.generators[0]
    a = next(g for g in P.generators if not Z.contains(g))
    X = PermGroup(P.degree, [z, a])
    y = next(g for g in P.generators if not X.contains(g))
    return [z, a], y


def _coordinate_shift(m: int, d: int, pi: list[int]) -> Perm:
    """Coordinate permutation of the product action, matching product_action."""
    degree = m**d
    coords = np.stack(np.unravel_index(np.arange(degree), (m,) * d, order="F"))
    moved = np.empty_like(coords)
    moved[pi] = coords
    return ((m ** np.arange(d)) @ moved).astype(np.int32)


def _embed(g: Perm, i: int, d: int) -> Perm:
    m = g.shape[0]
    return diagonal_element([g if j == i else identity(m) for j in range(d)])


def _twisted_block(P: PermGroup) -> list[Perm]:
    """3^6:3^{1+2} on 27^3 points: (X1 x X2 x X3):(⟨y1/y2, y2/y3⟩:⟨y1 π⟩).

    Modulo X1 x X2 x X3 the group acts on (P/X)^3 = C3^3. The y_i/y_j keep
    the coordinate sum and y1 π shifts it by one, so H is regular.
    """
    x_gens, y = _split(P)
    gens = [_embed(x, i, 3) for i in range(3) for x in x_gens]
    ys = [_embed(y, i, 3) for i in range(3)]
    gens.append(mul(ys[0], inv(ys[1])))
    gens.append(mul(ys[1], inv(ys[2])))
    pi = _coordinate_shift(P.degree, 3, [1, 2, 0])
    gens.append(mul(ys[0], pi))
    return gens


def _lift(gens: list[Perm], m: int, offset: int, width: int, d: int) -> list[Perm]:
    """Place permutations of m^width points into coordinates offset.. of m^d points."""
    if width == d:
        return gens
    degree = m**d
    coords = np.stack(np.unravel_index(np.arange(degree), (m,) * d, order="F"))
    block = coords[offset : offset + width]
    local = (m ** np.arange(width)) @ block
    out = []
    for g in gens:
        image = np.stack(np.unravel_index(g[local], (m,) * width, order="F"))
        moved = coords.copy()
        moved[offset : offset + width] = image
        out.append(((m ** np.arange(d)) @ moved).astype(np.int32))
    return out


def wreath_product_regular(e: int, f: int, sign: str = "+") -> SubgroupWitness:
    """(3^{1+2})^e x (3^6:3^{1+2})^f, regular in PSp4(3) wr S_d on 27^d points, d = e + 3f.

    ``sign`` selects the extraspecial type of the e plain factors; the
    twisted factors are built from the plus type.

    Raises:
        ValidationError: negative e or f, or d = 0.
        CapExceededError: 27^d above the product-action cap.
    """
    if e < 0 or f < 0 or e + f == 0:
        raise ValidationError("need e, f >= 0 with e + 3f >= 1", {"e": e, "f": f})
    d = e + 3 * f
    m = 27
    if m**d > min(config.DOMAIN_CAP, 10**5):
        raise CapExceededError("product action", m**d, min(config.DOMAIN_CAP, 10**5))
    gens: list[Perm] = []
    if e:
        plain = extraspecial_regular(sign)
        for i in range(e):
            gens.extend(_lift(plain.generators, m, i, 1, d))
    if f:
        twisted = _twisted_block(extraspecial_regular("+"))
        for j in range(f):
            gens.extend(_lift(twisted, m, e + 3 * j, 3, d))
    label = f"(3{sign}^(1+2))^{e} x (3^6:3^(1+2))^{f}"
    H = PermGroup(m**d, gens, name=label)
    parent = None
    if d <= 2:
        parent = product_action(psp43_deg27().group, d, symmetric_group(d) if d > 1 else None, name=f"PSp4(3) wr S{d}")
    witness = SubgroupWitness(H, label, parent)
    if not is_regular(H):
        raise ConstructionError(f"{label}: order {H.order()} on {H.degree} points is not regular")
    logger.info("%s regular on %d points", label, H.degree)
    return witness
