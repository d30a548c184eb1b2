"""Cayley tables, isomorphism tests and named reference groups.

Search results are named by isomorphism with a small registry of reference
groups (cyclic, dihedral, quaternion, semidihedral, extraspecial and a few
products) built from metacyclic laws or explicit permutations.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from src.factoriza.services.perm_engine import (
    PermGroup,
    Perm,
    from_cycles,
    identity,
    perm_order,
)
from src.factoriza.utils.exceptions import CapExceededError, ValidationError

logger = logging.getLogger(__name__)

CAYLEY_CAP = 2000


@dataclass(eq=False)
class CayleyTable:
    """Multiplication table with element 0 the identity.

    ``table[i, j]`` is the index of e_i * e_j.
    """

    table: np.ndarray = field(repr=False)
    elements: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    @property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1)

    def element_orders(self) -> np.ndarray:
        out = np.ones(self.order, dtype=np.int64)
        for i in range(1, self.order):
            k, x = 1, i
            while x != 0:
                x = int(self.table[x, i])
                k += 1
            out[i] = k
        return out

    def center_size(self) -> int:
        return int(np.count_nonzero(np.all(self.table == self.table.T, axis=1)))

    def exponent(self) -> int:
        return int(math.lcm(*(int(o) for o in self.element_orders())))

    def closure(self, gens: Sequence[int]) -> np.ndarray:
        """Boolean mask of the subgroup generated by gens."""
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for g in gens:
                    v = int(self.table[u, g])
                    if not mask[v]:
                        mask[v] = True
                        nxt.append(v)
            frontier = nxt
        return mask

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


def cayley_table(G: PermGroup) -> CayleyTable:
    """Full multiplication table of a permutation group of order at most 2000.

    Raises:
        CapExceededError: |G| > 2000.
    """
    N = G.order()
    if N > CAYLEY_CAP:
        raise CapExceededError("Cayley table", N, CAYLEY_CAP)
    E = G.elements()
    ident = identity(G.degree)
    # identity first
    first = int(np.flatnonzero(np.all(E == ident, axis=1))[0])
    order = [first] + [i for i in range(N) if i != first]
    E = E[order]
    base = np.array(G.base if G.base else [0], dtype=np.int64)
    keys = {E[i, base].tobytes(): i for i in range(N)}
    table = np.empty((N, N), dtype=np.int32)
    for i in range(N):
        prods = E[:, E[i][base]]  # row j: base images of e_i * e_j
        table[i] = [keys[row.tobytes()] for row in prods]
    return CayleyTable(table, E)


def regular_cayley_table(R: PermGroup, origin: int = 0) -> CayleyTable:
    """Table of a regular group with element x the one sending origin to x.

    Point labels then double as element labels, and a point map fixing the
    origin that is an isomorphism R1 -> R2 conjugates R1 onto R2.
    """
    E = R.elements()
    if E.shape[0] != R.degree:
        raise ValidationError("group is not regular")
    by_point = np.empty_like(E)
    by_point[E[:, origin]] = E
    # element x * element y sends origin to by_point[y][x]
    table = by_point.T.copy()
    if origin != 0:
        raise ValidationError("regular tables use origin 0")
    return CayleyTable(table.astype(np.int32), by_point)


def fingerprint(T: CayleyTable) -> tuple:
    orders = T.element_orders()
    stats = tuple(sorted(np.unique(orders, return_counts=True)[1].tolist()))
    profile = tuple(zip(*np.unique(orders, return_counts=True)))
    return (T.order, tuple((int(a), int(b)) for a, b in profile), T.center_size(), T.exponent(), stats)


def generating_set(T: CayleyTable) -> list[int]:
    """Greedy small generating set, high-order elements first."""
    orders = T.element_orders()
    candidates = sorted(range(1, T.order), key=lambda i: (-int(orders[i]), i))
    gens: list[int] = []
    span = T.closure(gens)
    for c in candidates:
        if span.all():
            break
        if not span[c]:
            gens.append(c)
            span = T.closure(gens)
    return gens


def _extend(T1: CayleyTable, T2: CayleyTable, gens: list[int], images: Sequence[int]) -> np.ndarray | None:
    phi = np.full(T1.order, -1, dtype=np.int64)
    used = np.zeros(T2.order, dtype=bool)
    phi[0] = 0
    used[0] = True
    queue = [0]
    while queue:
        u = queue.pop()
        for g, img in zip(gens, images):
            v = int(T1.table[u, g])
            w = int(T2.table[phi[u], img])
            if phi[v] >= 0:
                if phi[v] != w:
                    return None
                continue
            if used[w]:
                return None
            phi[v] = w
            used[w] = True
            queue.append(v)
    return phi if (phi >= 0).all() else None


def isomorphisms(T1: CayleyTable, T2: CayleyTable) -> Iterator[np.ndarray]:
    """Every isomorphism T1 -> T2 as an index map."""
    if T1.order != T2.order or fingerprint(T1) != fingerprint(T2):
        return
    gens = generating_set(T1)
    o1, o2 = T1.element_orders(), T2.element_orders()
    pools = [np.flatnonzero(o2 == o1[g]).tolist() for g in gens]
    for images in itertools.product(*pools):
        phi = _extend(T1, T2, gens, images)
        if phi is not None:
            yield phi


def are_isomorphic(T1: CayleyTable, T2: CayleyTable) -> bool:
    return next(isomorphisms(T1, T2), None) is not None


# ---------------------------------------------------------------------------
# reference groups


def group_from_law(order: int, law: Callable[[int, int], int], gens: Sequence[int], name: str) -> PermGroup:
    """Right regular representation of an abstract group given by its law."""
    perms = [np.array([law(h, g) for h in range(order)], dtype=np.int32) for g in gens]
    return PermGroup(order, perms, name=name, order_hint=order)


def metacyclic(m: int, s: int, r: int, t: int, name: str) -> PermGroup:
    """<x, y | x^m, y^s = x^t, y x = x^r y>, element x^a y^b at index a + m b."""
    if pow(r, s, m) != 1 % m or (t * r - t) % m:
        raise ValidationError("inconsistent metacyclic parameters", {"m": m, "s": s, "r": r, "t": t})

    def law(h: int, g: int) -> int:
        a1, b1 = h % m, h // m
        a2, b2 = g % m, g // m
        a = a1 + a2 * pow(r, b1, m)
        b = b1 + b2
        if b >= s:
            a += t
            b -= s
        return (a % m) + m * b

    return group_from_law(m * s, law, [1, m] if s > 1 else [1], name)


def cyclic(n: int) -> PermGroup:
    return metacyclic(n, 1, 1, 0, f"C{n}")


def dihedral(n: int) -> PermGroup:
    """Dihedral group of order n."""
    return metacyclic(n // 2, 2, -1 % (n // 2) if n > 4 else 1, 0, f"D{n}")


def quaternion(n: int) -> PermGroup:
    """Generalized quaternion group of order n."""
    m = n // 2
    return metacyclic(m, 2, m - 1, m // 2, f"Q{n}")


def semidihedral(n: int) -> PermGroup:
    m = n // 2
    return metacyclic(m, 2, m // 2 - 1, 0, f"SD{n}")


def heisenberg(p: int) -> PermGroup:
    """p_+^{1+2}: triples (a, b, c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')."""

    def law(h: int, g: int) -> int:
        a1, b1, c1 = h % p, (h // p) % p, h // (p * p)
        a2, b2, c2 = g % p, (g // p) % p, g // (p * p)
        return (a1 + a2) % p + p * ((b1 + b2) % p) + p * p * ((c1 + c2 + a1 * b2) % p)

    return group_from_law(p**3, law, [1, p], f"{p}+^{{1+2}}")


def direct_product(A: PermGroup, B: PermGroup, name: str) -> PermGroup:
    """A x B on the product of the two point sets."""
    n1, n2 = A.degree, B.degree
    a_gens = [np.array([A_g[i % n1] + n1 * (i // n1) for i in range(n1 * n2)], dtype=np.int32) for A_g in A.generators]
    b_gens = [np.array([i % n1 + n1 * B_g[i // n1] for i in range(n1 * n2)], dtype=np.int32) for B_g in B.generators]
    return PermGroup(n1 * n2, a_gens + b_gens, name=name, order_hint=A.order() * B.order())


def _three_by_d8() -> PermGroup:
    # index-2 subgroup {(s, d): sign(s) = chi(d)} of S3 x D8 on 3 + 4 points,
    # ker chi = <r^2, s>
    n = 7
    three = from_cycles(n, [[0, 1, 2]])
    twist = from_cycles(n, [[0, 1], [3, 4, 5, 6]])
    refl = from_cycles(n, [[4, 6]])
    return PermGroup(n, [three, twist, refl], name="3:D8", order_hint=24)


@lru_cache(maxsize=1)
def registry() -> dict[str, PermGroup]:
    """Named reference groups used to label search results."""
    a4 = PermGroup(4, [from_cycles(4, [[0, 1, 2]]), from_cycles(4, [[0, 1], [2, 3]])], name="A4", order_hint=12)
    s4 = PermGroup(4, [from_cycles(4, [[0, 1, 2, 3]]), from_cycles(4, [[0, 1]])], name="S4", order_hint=24)
    groups = [
        cyclic(11),
        cyclic(12),
        cyclic(23),
        cyclic(24),
        cyclic(48),
        direct_product(cyclic(6), cyclic(2), "C6xC2"),
        dihedral(8),
        dihedral(12),
        dihedral(24),
        quaternion(8),
        quaternion(16),
        semidihedral(32),
        a4,
        s4,
        direct_product(dihedral(8), cyclic(3), "D8xC3"),
        _three_by_d8(),
        direct_product(a4, cyclic(2), "A4xC2"),
        direct_product(cyclic(3), quaternion(16), "C3xQ16"),
        direct_product(cyclic(3), semidihedral(32), "C3xSD32"),
        direct_product(cyclic(3), dihedral(16), "C3xD16"),
        heisenberg(3),
        metacyclic(9, 3, 4, 0, "3-^{1+2}"),
    ]
    return {g.name or "": g for g in groups}


@lru_cache(maxsize=64)
def _registry_table(name: str) -> CayleyTable:
    return cayley_table(registry()[name])


def identify(table: CayleyTable) -> str | None:
    """Registry name of a group isomorphic to the table, if any.

    Cyclic groups are named C<n> without a registry entry.
    """
    if table.order > 1 and int(table.element_orders().max()) == table.order:
        return f"C{table.order}"
    fp = fingerprint(table)
    for name, G in registry().items():
        if G.order() != table.order:
            continue
        ref = _registry_table(name)
        if fingerprint(ref) == fp and are_isomorphic(ref, table):
            return name
    return None


def identify_group(G: PermGroup) -> str:
    """Registry name, or 'order N' when no reference group matches."""
    if G.order() > CAYLEY_CAP:
        return f"order {G.order()}"
    return identify(cayley_table(G)) or f"order {G.order()}"


# ---------------------------------------------------------------------------
# subgroups of small groups


def two_generated_subgroups(T: CayleyTable) -> list[np.ndarray]:
    """Every subgroup generated by at most two elements, as boolean masks."""
    seen: dict[bytes, np.ndarray] = {}
    for a in range(T.order):
        for b in range(a, T.order):
            mask = T.closure([a, b])
            seen.setdefault(np.packbits(mask).tobytes(), mask)
    return list(seen.values())


def conjugacy_class_key(T: CayleyTable, mask: np.ndarray) -> bytes:
    """Least packed mask over all conjugates of a subgroup."""
    inv = T.inverses
    members = np.flatnonzero(mask)
    best = None
    for g in range(T.order):
        conj = T.table[T.table[inv[g], members], g]
        m = np.zeros(T.order, dtype=bool)
        m[conj] = True
        key = np.packbits(m).tobytes()
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def subtable(T: CayleyTable, mask: np.ndarray) -> CayleyTable:
    """Cayley table of a subgroup given by its mask."""
    members = np.flatnonzero(mask)
    index = np.full(T.order, -1, dtype=np.int64)
    index[members] = np.arange(members.shape[0])
    return CayleyTable(index[T.table[np.ix_(members, members)]].astype(np.int32))


def is_nilpotent_table(T: CayleyTable) -> bool:
    """Nilpotent iff the upper central series reaches the whole group."""
    current = np.zeros(T.order, dtype=bool)
    current[0] = True
    inv = T.inverses
    while not current.all():
        # next centre term: g with [g, h] in current for every h
        nxt = np.array(
            [
                all(current[T.table[T.table[inv[g], inv[h]], T.table[g, h]]] for h in range(T.order))
                for g in range(T.order)
            ]
        )
        if np.array_equal(nxt, current):
            return False
        current = nxt
    return True


def perm_of_element(T: CayleyTable, i: int) -> Perm:
    """Right multiplication by element i on the table's indices."""
    return T.table[:, i].astype(np.int32)


def order_counts(T: CayleyTable) -> dict[int, int]:
    o = T.element_orders()
    vals, counts = np.unique(o, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def perm_orders(perms: Sequence[Perm]) -> list[int]:
    return [perm_order(p) for p in perms]
