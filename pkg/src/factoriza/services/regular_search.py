"""Regular subgroups of transitive permutation groups of small degree.

A nilpotent regular subgroup R is the direct product of its Sylow subgroups,
each semiregular. The search therefore runs prime by prime: the semiregular
subgroups of a Sylow subgroup of the current centralizer, enumerated from
fixed-point-free elements on its Cayley table, are multiplied onto the
partial product. Classes are merged up to conjugacy in G at degree up to 32
and up to isomorphism fingerprint above that.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from sympy import factorint

from src.factoriza.config import config
from src.factoriza.models.report import RegularClass
from src.factoriza.services.perm_engine import (
    PermGroup,
    centralizer,
    extraspecial_type,
    is_nilpotent,
    is_regular,
    is_semiregular,
    mul,
    random_subgroup_of_order,
    r_part,
    sylow_subgroup,
)
from src.factoriza.services.small_groups import (
    CayleyTable,
    cayley_table,
    conjugacy_class_key,
    fingerprint,
    identify,
    isomorphisms,
    regular_cayley_table,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError

logger = logging.getLogger(__name__)

CONJUGACY_DEGREE_CAP = 32


@dataclass(eq=False)
class RegularSubgroup:
    """A regular subgroup with its isomorphism tags."""

    group: PermGroup
    table: CayleyTable = field(repr=False)
    shape: str
    nilpotent: bool
    extraspecial: str | None = None
    up_to: str = "conjugacy"

    def to_model(self) -> RegularClass:
        return RegularClass(
            shape=self.shape,
            order=self.group.order(),
            nilpotent=self.nilpotent,
            extraspecial=self.extraspecial,
            up_to=self.up_to,
            generators=[g.tolist() for g in self.group.generators],
        )


def semiregular_subgroups(P: PermGroup, order: int) -> list[PermGroup]:
    """Semiregular subgroups of P of the given order, one per P-class.

    P must be small enough for a Cayley table. Subgroups are grown one
    fixed-point-free generator at a time and deduplicated by P-conjugacy at
    every layer.
    """
    if P.order() % order:
        return []
    if order == 1:
        return [PermGroup(P.degree)]
    T = cayley_table(P)
    assert T.elements is not None
    E = T.elements
    ident = np.arange(P.degree, dtype=E.dtype)
    fpf = np.all(E != ident, axis=1)
    fpf[0] = True
    candidates = [int(i) for i in np.flatnonzero(fpf) if i != 0]

    def admissible(mask: np.ndarray) -> bool:
        size = int(mask.sum())
        return bool(fpf[mask].all()) and order % size == 0

    frontier: dict[bytes, tuple[np.ndarray, list[int]]] = {}
    for x in candidates:
        mask = T.closure([x])
        if admissible(mask):
            frontier.setdefault(conjugacy_class_key(T, mask), (mask, [x]))
    found: dict[bytes, tuple[np.ndarray, list[int]]] = {}
    while frontier:
        nxt: dict[bytes, tuple[np.ndarray, list[int]]] = {}
        raw_seen: set[bytes] = set()
        for key, (mask, gens) in frontier.items():
            if int(mask.sum()) == order:
                found[key] = (mask, gens)
                continue
            for y in candidates:
                if mask[y]:
                    continue
                grown = T.closure(gens + [y])
                raw = np.packbits(grown).tobytes()
                if raw in raw_seen or not admissible(grown):
                    continue
                raw_seen.add(raw)
                nxt.setdefault(conjugacy_class_key(T, grown), (grown, gens + [y]))
        logger.debug("semiregular layer: %d classes", len(nxt))
        frontier = nxt
    return [
        PermGroup(P.degree, [E[g] for g in gens], order_hint=order)
        for _key, (_mask, gens) in sorted(found.items())
    ]


def _conjugate_in(G: PermGroup, R1: PermGroup, R2: PermGroup) -> bool:
    """Whether R1^g = R2 for some g in G, for regular R1, R2.

    Conjugators in Sym(n) form the coset N(R2)-translate of the point maps
    induced by isomorphisms R1 -> R2 between their regular tables.
    """
    T1, T2 = regular_cayley_table(R1), regular_cayley_table(R2)
    assert T2.elements is not None
    for phi in isomorphisms(T1, T2):
        sigma = phi.astype(np.int32)
        for r in T2.elements:
            if G.contains(mul(sigma, r)):
                return True
    return False


def _tag(R: PermGroup, up_to: str) -> RegularSubgroup:
    T = regular_cayley_table(R)
    shape = identify(T) or "order {} profile {}".format(T.order, fingerprint(T)[1])
    return RegularSubgroup(
        group=R,
        table=T,
        shape=shape,
        nilpotent=is_nilpotent(R),
        extraspecial=extraspecial_type(R),
        up_to=up_to,
    )


def _merge(G: PermGroup, groups: list[PermGroup]) -> list[RegularSubgroup]:
    up_to = "conjugacy" if G.degree <= CONJUGACY_DEGREE_CAP else "fingerprint"
    reps: list[RegularSubgroup] = []
    for R in groups:
        tagged = _tag(R, up_to)
        fp = fingerprint(tagged.table)
        duplicate = False
        for rep in reps:
            if fingerprint(rep.table) != fp:
                continue
            if up_to == "fingerprint" or _conjugate_in(G, rep.group, R):
                duplicate = True
                break
        if not duplicate:
            reps.append(tagged)
    return reps


def nilpotent_regular_subgroups(G: PermGroup, rng: np.random.Generator | None = None) -> list[PermGroup]:
    """Every nilpotent regular subgroup of G up to G-conjugacy (before merging)."""
    n = G.degree
    rng = rng or np.random.default_rng(config.SEED)
    primes = sorted(factorint(n))
    partial: list[PermGroup] = [PermGroup(n)]
    for p in primes:
        target = r_part(n, p)
        grown: list[PermGroup] = []
        for R in partial:
            C = centralizer(G, R.generators) if R.generators else G
            P = sylow_subgroup(C, p, rng)
            logger.debug("prime %d: Sylow of order %d in a centralizer of order %d", p, P.order(), C.order())
            for S in semiregular_subgroups(P, target):
                prod = PermGroup(n, R.generators + S.generators, order_hint=R.order() * target)
                if prod.order() == R.order() * target and is_semiregular(prod):
                    grown.append(prod)
        partial = grown
    return [R for R in partial if is_regular(R)]


def regular_subgroup_search(
    G: PermGroup,
    nilpotent_only: bool = True,
    *,
    rng: np.random.Generator | None = None,
    budget: int | None = None,
) -> list[RegularSubgroup]:
    """Regular subgroups of a transitive group of small degree.

    Nilpotent classes are found exhaustively. Without ``nilpotent_only`` the
    nilpotent classes are followed by non-nilpotent ones sampled from seeded
    random 2-generated subgroups of order n; those extra classes are a lower
    bound, not a census.

    Raises:
        CapExceededError: degree above SEARCH_DEGREE_CAP.
        ValidationError: G is not transitive.
    """
    n = G.degree
    if n > config.SEARCH_DEGREE_CAP:
        raise CapExceededError("regular-subgroup search degree", n, config.SEARCH_DEGREE_CAP)
    if not G.is_transitive():
        raise ValidationError("regular subgroups are searched in transitive groups")
    rng = rng or np.random.default_rng(config.SEED)
    found = nilpotent_regular_subgroups(G, rng)
    logger.info(
        "%s: %d nilpotent regular candidates", G.name or "G", len(found), extra={"tag": "SEARCH"}
    )
    if not nilpotent_only:
        attempts = budget or config.RANDOM_BUDGET
        for _ in range(max(1, attempts // 200)):
            R = random_subgroup_of_order(G, n, rng=rng, budget=200, predicate=is_regular)
            if R is not None and not is_nilpotent(R):
                found.append(R)
    classes = _merge(G, found)
    logger.info(
        "%s: %d classes of regular subgroups", G.name or "G", len(classes), extra={"tag": "SEARCH"}
    )
    return classes

