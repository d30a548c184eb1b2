"""Permutation groups: base and strong generating sets, orbits and searches.

A permutation is an int32 image array ``p`` with ``p[x]`` the image of x.
Products compose left to right: ``mul(a, b)[x] == b[a[x]]``.
"""

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from sympy import factorint

from src.factoriza.config import config
from src.factoriza.utils.exceptions import CapExceededError, ValidationError

logger = logging.getLogger(__name__)

Perm = np.ndarray

# Transversal elements are cached explicitly while orbit * degree stays below this.
_EXPLICIT_LIMIT = 4_000_000


def identity(n: int) -> Perm:
    return np.arange(n, dtype=np.int32)


def as_perm(images: Iterable[int] | np.ndarray, degree: int | None = None) -> Perm:
    """Validated image array.

    Raises:
        ValidationError: not a bijection of {0..n-1}, or wrong degree.
    """
    arr = np.asarray(images, dtype=np.int32)
    if arr.ndim != 1:
        raise ValidationError("permutation must be a 1-D image list")
    if degree is not None and arr.shape[0] != degree:
        raise ValidationError(f"permutation of degree {arr.shape[0]}, expected {degree}")
    if not np.array_equal(np.sort(arr), np.arange(arr.shape[0])):
        raise ValidationError("image list is not a bijection")
    return arr


def mul(a: Perm, b: Perm) -> Perm:
    """a then b."""
    return b[a]


def inv(a: Perm) -> Perm:
    out = np.empty_like(a)
    out[a] = np.arange(a.shape[0], dtype=a.dtype)
    return out


def conj(a: Perm, g: Perm) -> Perm:
    """a^g = g^-1 a g."""
    return g[a[inv(g)]]


def commutator(a: Perm, b: Perm) -> Perm:
    """[a, b] = a^-1 b^-1 a b."""
    return mul(mul(inv(a), inv(b)), mul(a, b))


def is_identity(a: Perm) -> bool:
    return bool(np.array_equal(a, np.arange(a.shape[0])))


def power(a: Perm, k: int) -> Perm:
    if k < 0:
        a, k = inv(a), -k
    result = identity(a.shape[0])
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def cycles(a: Perm) -> list[list[int]]:
    seen = np.zeros(a.shape[0], dtype=bool)
    out = []
    for start in range(a.shape[0]):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = int(a[x])
        out.append(cyc)
    return out


def cycle_type(a: Perm) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(a)), reverse=True))


def perm_order(a: Perm) -> int:
    return reduce(math.lcm, (len(c) for c in cycles(a)), 1)


def fixed_count(a: Perm) -> int:
    return int(np.count_nonzero(a == np.arange(a.shape[0])))


def from_cycles(n: int, cycle_list: Iterable[Sequence[int]]) -> Perm:
    p = identity(n)
    for cyc in cycle_list:
        for i, x in enumerate(cyc):
            p[x] = cyc[(i + 1) % len(cyc)]
    return p


def perm_key(a: Perm) -> bytes:
    return a.tobytes()


class _OrderBoundExceeded(Exception):
    pass


class _Level:
    """One level of a stabilizer chain: base point, generators and orbit tree."""

    def __init__(self, point: int, degree: int) -> None:
        self.point = point
        self.degree = degree
        self.gens: list[Perm] = []
        self.orbit: list[int] = [point]
        self.parent = np.full(degree, -1, dtype=np.int64)
        self.via = np.full(degree, -1, dtype=np.int64)
        self._cache: dict[int, Perm] = {}

    def rebuild(self) -> None:
        self.parent[:] = -1
        self.via[:] = -1
        self.parent[self.point] = self.point
        self.orbit = [self.point]
        self._cache = {}
        i = 0
        while i < len(self.orbit):
            x = self.orbit[i]
            i += 1
            for gi, s in enumerate(self.gens):
                y = int(s[x])
                if self.parent[y] < 0:
                    self.parent[y] = x
                    self.via[y] = gi
                    self.orbit.append(y)

    def contains(self, x: int) -> bool:
        return bool(self.parent[x] >= 0)

    def rep(self, x: int) -> Perm:
        """u with point^u = x."""
        if x == self.point:
            return identity(self.degree)
        cached = self._cache.get(x)
        if cached is not None:
            return cached
        path = []
        y = x
        while y != self.point and y not in self._cache:
            path.append(int(self.via[y]))
            y = int(self.parent[y])
        u = self._cache[y] if y != self.point else identity(self.degree)
        for gi in reversed(path):
            u = mul(u, self.gens[gi])
        if len(self.orbit) * self.degree <= _EXPLICIT_LIMIT:
            self._cache[x] = u
        return u


class PermGroup:
    """A permutation group with a lazily built deterministic stabilizer chain.

    Args:
        degree: number of points.
        generators: image arrays; identities and duplicates are dropped.
        base: points forced to the front of the base.
        name: label used in logs and reports.
        order_hint: the known group order; Schreier-Sims stops once reached.
    """

    def __init__(
        self,
        degree: int,
        generators: Iterable[Perm | Sequence[int]] = (),
        *,
        base: Sequence[int] = (),
        name: str | None = None,
        order_hint: int | None = None,
    ) -> None:
        if degree < 1:
            raise ValidationError("degree must be positive")
        self.degree = degree
        self.name = name
        gens: list[Perm] = []
        seen: set[bytes] = set()
        for g in generators:
            p = g if isinstance(g, np.ndarray) and g.dtype == np.int32 else as_perm(g)
            if p.shape[0] != degree:
                raise ValidationError(f"generator of degree {p.shape[0]} in a group of degree {degree}")
            k = perm_key(p)
            if not is_identity(p) and k not in seen:
                seen.add(k)
                gens.append(p)
        self.generators = gens
        self._base_prefix = tuple(int(b) for b in base)
        self._order_hint = order_hint
        self._levels: list[_Level] | None = None

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} gens={len(self.generators)}>"

    # -- chain ---------------------------------------------------------------

    @property
    def levels(self) -> list[_Level]:
        if self._levels is None:
            self._levels = self._schreier_sims()
        return self._levels

    def _schreier_sims(self, order_bound: int | None = None) -> list[_Level]:
        n = self.degree
        levels: list[_Level] = []
        base: list[int] = []

        def add_level(point: int) -> None:
            levels.append(_Level(point, n))
            base.append(point)

        for b in self._base_prefix:
            add_level(b)
        for g in self.generators:
            if all(g[b] == b for b in base):
                add_level(int(np.flatnonzero(g != np.arange(n))[0]))
        for i, lv in enumerate(levels):
            lv.gens = [g for g in self.generators if all(g[b] == b for b in base[:i])]
            lv.rebuild()

        def current_order() -> int:
            return math.prod(len(lv.orbit) for lv in levels)

        i = len(levels) - 1
        while i >= 0:
            if self._order_hint is not None and current_order() == self._order_hint:
                break
            if order_bound is not None and current_order() > order_bound:
                raise _OrderBoundExceeded()
            lv = levels[i]
            restart = False
            for x in list(lv.orbit):
                ux = lv.rep(x)
                for s in list(lv.gens):
                    y = int(s[x])
                    h = mul(mul(ux, s), inv(lv.rep(y)))
                    if is_identity(h):
                        continue
                    residue, j = self._sift_levels(h, levels, i + 1)
                    if j < len(levels) or not is_identity(residue):
                        if j == len(levels):
                            add_level(int(np.flatnonzero(residue != np.arange(n))[0]))
                        for lev in range(i + 1, j + 1):
                            levels[lev].gens.append(residue)
                            levels[lev].rebuild()
                        i = j
                        restart = True
                        break
                if restart:
                    break
            if not restart:
                i -= 1
        # trailing trivial levels carry no information
        while levels and len(levels[-1].orbit) == 1 and len(levels) > len(self._base_prefix):
            levels.pop()
        logger.debug(
            "BSGS for %s: base length %d, orbits %s",
            self.name or "group",
            len(levels),
            [len(lv.orbit) for lv in levels],
        )
        return levels

    @staticmethod
    def _sift_levels(g: Perm, levels: list[_Level], start: int = 0) -> tuple[Perm, int]:
        for j in range(start, len(levels)):
            lv = levels[j]
            x = int(g[lv.point])
            if not lv.contains(x):
                return g, j
            if x != lv.point:
                g = mul(g, inv(lv.rep(x)))
        return g, len(levels)

    def sift(self, g: Perm) -> tuple[Perm, int]:
        """Residue of g and the level where sifting stopped."""
        return self._sift_levels(g, self.levels)

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self.levels]

    @property
    def strong_generators(self) -> list[Perm]:
        seen: dict[bytes, Perm] = {}
        for lv in self.levels:
            for g in lv.gens:
                seen.setdefault(perm_key(g), g)
        return list(seen.values()) or []

    def order(self) -> int:
        return math.prod(len(lv.orbit) for lv in self.levels)

    def contains(self, g: Perm) -> bool:
        if g.shape[0] != self.degree:
            return False
        residue, j = self.sift(g)
        return j == len(self.levels) and is_identity(residue)

    __contains__ = contains

    def with_base(self, prefix: Sequence[int]) -> "PermGroup":
        """Same group, chain rebuilt with the given base prefix."""
        return PermGroup(
            self.degree,
            self.strong_generators or self.generators,
            base=prefix,
            name=self.name,
            order_hint=self.order(),
        )

    def is_trivial(self) -> bool:
        return not self.generators

    # -- orbits --------------------------------------------------------------

    def orbit(self, point: int) -> list[int]:
        """BFS orbit, generators applied in list order."""
        if not 0 <= point < self.degree:
            raise ValidationError(f"point {point} out of range", {"degree": self.degree})
        seen = np.zeros(self.degree, dtype=bool)
        seen[point] = True
        out = [point]
        i = 0
        while i < len(out):
            x = out[i]
            i += 1
            for g in self.generators:
                y = int(g[x])
                if not seen[y]:
                    seen[y] = True
                    out.append(y)
        return out

    def orbits(self) -> list[list[int]]:
        """All orbits, labelled by their least point."""
        label = np.full(self.degree, -1, dtype=np.int64)
        out = []
        for p in range(self.degree):
            if label[p] < 0:
                orb = self.orbit(p)
                label[orb] = p
                out.append(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def stabilizer(self, point: int) -> "PermGroup":
        """Point stabilizer via Schreier generators on a chain with base prefix (point,)."""
        if not 0 <= point < self.degree:
            raise ValidationError(f"point {point} out of range", {"degree": self.degree})
        chain = self.with_base((point,))
        lv = chain.levels
        gens = lv[1].gens if len(lv) > 1 else []
        return PermGroup(
            self.degree, gens, name=f"{self.name or 'G'}_{point}", order_hint=chain.order() // len(lv[0].orbit)
        )

    # -- elements ------------------------------------------------------------

    def random_element(self, rng: np.random.Generator) -> Perm:
        """Uniform element: a product of random transversal elements."""
        g = identity(self.degree)
        for lv in reversed(self.levels):
            x = lv.orbit[int(rng.integers(len(lv.orbit)))]
            g = mul(g, lv.rep(x))
        return g

    def elements(self) -> np.ndarray:
        """All elements as rows of an array (guarded by ELEMENT_ENUMERATION_CAP)."""
        N = self.order()
        if N > config.ELEMENT_ENUMERATION_CAP or N * self.degree > 50 * config.ELEMENT_ENUMERATION_CAP:
            raise CapExceededError("element enumeration", N, config.ELEMENT_ENUMERATION_CAP)
        E = identity(self.degree)[None, :]
        for lv in reversed(self.levels):
            U = np.stack([lv.rep(x) for x in lv.orbit])
            # rows e * u for every e in E, u in U
            E = np.take(U, E, axis=1).reshape(-1, self.degree)
        return E

    def iter_elements(self) -> Iterator[Perm]:
        yield from self.elements()

    def subgroup(self, gens: Iterable[Perm], **kwargs: object) -> "PermGroup":
        return PermGroup(self.degree, gens, **kwargs)  # type: ignore[arg-type]

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(np.array_equal(mul(a, b), mul(b, a)) for a, b in itertools.combinations(gens, 2))


def order_of_group_bounded(degree: int, gens: Sequence[Perm], bound: int) -> int | None:
    """Order of ⟨gens⟩, or None once the chain shows it exceeds bound."""
    G = PermGroup(degree, gens)
    try:
        G._levels = G._schreier_sims(order_bound=bound)
    except _OrderBoundExceeded:
        return None
    order = G.order()
    return order if order <= bound else None


# ---------------------------------------------------------------------------
# regularity


def is_semiregular(H: PermGroup) -> bool:
    """Every orbit has length |H| (all point stabilizers trivial)."""
    N = H.order()
    return all(len(o) == N for o in H.orbits())


def is_regular(H: PermGroup) -> bool:
    return H.order() == H.degree and H.is_transitive()


def is_semiregular_by_elements(H: PermGroup) -> bool:
    """Cross-check for small orders: every non-identity element is fixed-point-free."""
    E = H.elements()
    ident = np.arange(H.degree)
    nontrivial = ~np.all(E == ident, axis=1)
    return bool(np.all(np.all(E[nontrivial] != ident, axis=1)))


# ---------------------------------------------------------------------------
# backtrack searches


def _propagate(
    fwd: np.ndarray, bwd: np.ndarray, x: int, y: int, pairs: Sequence[tuple[Perm, Perm]]
) -> bool:
    """Record x -> y and close under x -> y => a[x] -> b[y]; False on conflict."""
    stack = [(x, y)]
    while stack:
        u, v = stack.pop()
        if fwd[u] >= 0:
            if fwd[u] != v:
                return False
            continue
        if bwd[v] >= 0:
            return False
        fwd[u] = v
        bwd[v] = u
        for a, b in pairs:
            stack.append((int(a[u]), int(b[v])))
    return True


def _dfs(
    levels: list[_Level],
    j: int,
    h: Perm,
    fwd: np.ndarray,
    bwd: np.ndarray,
    prop: Callable[[Perm], bool],
    pairs: Sequence[tuple[Perm, Perm]],
    first_image: int | None = None,
) -> Perm | None:
    if j == len(levels):
        return h if prop(h) else None
    lv = levels[j]
    b = lv.point
    for x in lv.orbit:
        beta = int(h[x])
        if first_image is not None and beta != first_image:
            continue
        if fwd[b] >= 0 and fwd[b] != beta:
            continue
        f2, b2 = fwd.copy(), bwd.copy()
        if not _propagate(f2, b2, b, beta, pairs):
            continue
        found = _dfs(levels, j + 1, mul(lv.rep(x), h), f2, b2, prop, pairs)
        if found is not None:
            return found
    return None


def _orbit_of(gens: Sequence[Perm], point: int, degree: int) -> set[int]:
    seen = {point}
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def subgroup_search(
    G: PermGroup,
    prop: Callable[[Perm], bool],
    *,
    pairs: Sequence[tuple[Perm, Perm]] = (),
    target_order: int | None = None,
    base: Sequence[int] = (),
    name: str | None = None,
) -> PermGroup:
    """The subgroup {g in G : prop(g)} by Sims' level-by-level backtrack.

    ``prop`` must define a subgroup. ``pairs`` lists (a, b) with a^g = b for
    every wanted g; they drive partial-map deduction. Levels are processed
    bottom-up; at each level candidate images inside an orbit of the part of
    the subgroup already found are skipped, and a failed image rules out its
    whole orbit under the subgroup of the next level.
    """
    chain = G.with_base(base) if base else G
    levels = chain.levels
    n = G.degree
    found: list[Perm] = []

    def reached() -> bool:
        if target_order is None:
            return False
        return PermGroup(n, found, order_hint=target_order).order() >= target_order

    for l in reversed(range(len(levels))):
        lv = levels[l]
        lower = list(found)
        failed: set[int] = set()
        fixed = np.full(n, -1, dtype=np.int64)
        fixed_b = np.full(n, -1, dtype=np.int64)
        ok = True
        for i in range(l):
            ok = ok and _propagate(fixed, fixed_b, levels[i].point, levels[i].point, pairs)
        if not ok:
            continue
        for gamma in sorted(lv.orbit):
            if gamma == lv.point or gamma in failed:
                continue
            if gamma in _orbit_of(found, lv.point, n):
                continue
            f2, b2 = fixed.copy(), fixed_b.copy()
            g = None
            if _propagate(f2, b2, lv.point, gamma, pairs):
                g = _dfs(levels, l, identity(n), fixed.copy(), fixed_b.copy(), prop, pairs, gamma)
            if g is None:
                failed |= _orbit_of(lower, gamma, n)
            else:
                found.append(g)
                if reached():
                    return PermGroup(n, found, name=name, order_hint=target_order)
    return PermGroup(n, found, name=name)


def centralizer(G: PermGroup, elements: Sequence[Perm], name: str | None = None) -> PermGroup:
    """C_G(elements)."""
    elems = [e for e in elements if not is_identity(e)]
    if not elems:
        return G

    def commutes(g: Perm) -> bool:
        return all(np.array_equal(mul(g, z), mul(z, g)) for z in elems)

    return subgroup_search(G, commutes, pairs=[(z, z) for z in elems], name=name)


def center(G: PermGroup) -> PermGroup:
    return centralizer(G, G.generators, name=f"Z({G.name or 'G'})")


def find_conjugator(
    G: PermGroup, a: Perm, b: Perm, also: Sequence[tuple[Perm, Perm]] = ()
) -> Perm | None:
    """Some g in G with a^g = b (and c^g = d for every (c, d) in ``also``), or None."""
    pairs = [(a, b), *also]
    if any(cycle_type(c) != cycle_type(d) for c, d in pairs):
        return None
    n = G.degree
    fwd = np.full(n, -1, dtype=np.int64)
    bwd = np.full(n, -1, dtype=np.int64)

    def maps(g: Perm) -> bool:
        return all(np.array_equal(conj(c, g), d) for c, d in pairs)

    return _dfs(G.levels, 0, identity(n), fwd, bwd, maps, pairs)


def normalizer(G: PermGroup, H: PermGroup, name: str | None = None) -> PermGroup:
    """N_G(H), by backtrack with a leaf test on H's generators."""
    if not H.generators:
        return G

    def normalizes(g: Perm) -> bool:
        return all(H.contains(conj(h, g)) for h in H.generators)

    return subgroup_search(G, normalizes, name=name)


def cyclic_normalizer(
    G: PermGroup, a: Perm, name: str | None = None, units: int | None = None
) -> PermGroup:
    """N_G(<a>), generated by C_G(a) and one conjugator a -> a^k per reachable unit k.

    Units already reached by the conjugators found so far are skipped. When
    ``units`` (the order of the image of N_G(<a>) in Aut(<a>)) is known, only
    k with k^units = 1 are tried and the search stops once that many are reached.
    """
    o = perm_order(a)
    gens = [a] + centralizer(G, [a]).generators
    found: list[int] = []
    reached = {1}
    for k in range(2, o):
        if units is not None and len(reached) >= units:
            break
        if math.gcd(k, o) != 1 or k in reached:
            continue
        if units is not None and pow(k, units, o) != 1:
            continue
        g = find_conjugator(G, a, power(a, k))
        if g is None:
            continue
        gens.append(g)
        found.append(k)
        frontier = [1]
        reached = {1}
        while frontier:
            r = frontier.pop()
            for u in found:
                t = (r * u) % o
                if t not in reached:
                    reached.add(t)
                    frontier.append(t)
    logger.debug("normalizer of a cyclic subgroup of order %d: %d units reached", o, len(reached))
    return PermGroup(G.degree, gens, name=name)


def klein_normalizer(G: PermGroup, x: Perm, y: Perm, name: str | None = None) -> PermGroup:
    """N_G(V) for V = <x, y> of order 4: C_G(V) and conjugators permuting x, y, xy."""
    xy = mul(x, y)
    gens = list(centralizer(G, [x, y]).generators)
    for bx, by in itertools.permutations([x, y, xy], 2):
        if bx is x and by is y:
            continue
        g = find_conjugator(G, x, bx, also=[(y, by)])
        if g is not None:
            gens.append(g)
    return PermGroup(G.degree, gens + [x, y], name=name)


def restrict(G: PermGroup, points: Sequence[int], name: str | None = None) -> PermGroup:
    """G acting on an invariant set, points renumbered in the given order.

    Raises:
        ValidationError: the set is not G-invariant.
    """
    pts = np.asarray([int(p) for p in points], dtype=np.int64)
    index = np.full(G.degree, -1, dtype=np.int64)
    index[pts] = np.arange(len(pts))
    gens = []
    for g in G.generators:
        img = index[g[pts]]
        if (img < 0).any():
            raise ValidationError("restriction to a set that is not invariant")
        gens.append(img.astype(np.int32))
    return PermGroup(len(pts), gens, name=name or G.name)


# ---------------------------------------------------------------------------
# closures and series


def normal_closure(G: PermGroup, gens: Sequence[Perm], name: str | None = None) -> PermGroup:
    """Smallest normal subgroup of G containing gens."""
    current = [g for g in gens if not is_identity(g)]
    N = PermGroup(G.degree, current)
    changed = True
    while changed:
        changed = False
        for x in list(N.generators):
            for s in G.generators:
                c = conj(x, s)
                if not N.contains(c):
                    current.append(c)
                    N = PermGroup(G.degree, current)
                    changed = True
    N.name = name
    return N


def derived_subgroup(G: PermGroup) -> PermGroup:
    comms = [commutator(a, b) for a, b in itertools.combinations(G.generators, 2)]
    return normal_closure(G, comms, name=f"[{G.name or 'G'},{G.name or 'G'}]")


def _series_guard(G: PermGroup) -> None:
    if G.order() > 10**8:
        raise CapExceededError("series computation", G.order(), 10**8)


def derived_series(G: PermGroup) -> list[PermGroup]:
    _series_guard(G)
    series = [G]
    while True:
        D = derived_subgroup(series[-1])
        if D.order() == series[-1].order():
            return series
        series.append(D)
        if D.order() == 1:
            return series


def lower_central_series(G: PermGroup) -> list[PermGroup]:
    _series_guard(G)
    series = [G]
    while True:
        comms = [commutator(x, g) for x in series[-1].generators for g in G.generators]
        nxt = normal_closure(G, comms)
        if nxt.order() == series[-1].order():
            return series
        series.append(nxt)
        if nxt.order() == 1:
            return series


def is_solvable(G: PermGroup) -> bool:
    return derived_series(G)[-1].order() == 1


def is_nilpotent(G: PermGroup) -> bool:
    return lower_central_series(G)[-1].order() == 1


def nilpotency_class(G: PermGroup) -> int | None:
    series = lower_central_series(G)
    return len(series) - 1 if series[-1].order() == 1 else None


def exponent(G: PermGroup) -> int:
    return reduce(math.lcm, (perm_order(g) for g in G.elements()), 1)


def element_order_counts(G: PermGroup) -> dict[int, int]:
    counts: dict[int, int] = {}
    for g in G.elements():
        o = perm_order(g)
        counts[o] = counts.get(o, 0) + 1
    return dict(sorted(counts.items()))


def extraspecial_type(G: PermGroup) -> str | None:
    """'+' or '-' for an extraspecial group, else None."""
    N = G.order()
    f = factorint(N)
    if len(f) != 1:
        return None
    p, e = next(iter(f.items()))
    if e < 3 or e % 2 == 0:
        return None
    Z = center(G)
    if Z.order() != p:
        return None
    for a, b in itertools.combinations(G.generators, 2):
        if not Z.contains(commutator(a, b)):
            return None
    if not all(Z.contains(power(g, p)) for g in G.generators):
        return None
    m = (e - 1) // 2
    if p == 2:
        ident = np.arange(G.degree)
        E = G.elements()
        squares_trivial = int(np.count_nonzero(np.all(np.take_along_axis(E, E, axis=1) == ident, axis=1)))
        return "+" if squares_trivial == 2 ** (2 * m) + 2**m else "-"
    return "+" if exponent(G) == p else "-"


@dataclass(eq=False)
class SubgroupWitness:
    """A subgroup of ``parent`` exhibited by generators, with structural tags.

    Raises:
        ValidationError: a generator does not lie in the parent.
    """

    group: PermGroup
    label: str
    parent: PermGroup | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.parent is not None:
            for g in self.group.generators:
                if not self.parent.contains(g):
                    raise ValidationError(f"{self.label}: generator outside {self.parent.name or 'the parent'}")

    @property
    def order(self) -> int:
        return self.group.order()

    def tags(self) -> dict[str, object]:
        G = self.group
        return {
            "order": G.order(),
            "transitive": G.is_transitive(),
            "regular": is_regular(G),
            "nilpotent": is_nilpotent(G),
            "solvable": is_solvable(G),
            "extraspecial": extraspecial_type(G),
        }


# ---------------------------------------------------------------------------
# Sylow subgroups


def r_part(n: int, r: int) -> int:
    out = 1
    while n % r == 0:
        n //= r
        out *= r
    return out


def _r_element(g: Perm, r: int) -> Perm | None:
    o = perm_order(g)
    rp = r_part(o, r)
    if rp == 1:
        return None
    return power(g, o // rp)


def _grow_r_group(G: PermGroup, r: int, target: int, rng: np.random.Generator, start: list[Perm]) -> PermGroup:
    P = PermGroup(G.degree, start)
    budget = config.RANDOM_BUDGET * 25
    for _ in range(budget):
        if P.order() == target:
            return P
        y = _r_element(G.random_element(rng), r)
        if y is None or P.contains(y):
            continue
        cand = order_of_group_bounded(G.degree, P.generators + [y], target)
        if cand is not None and cand == r_part(cand, r) and cand > P.order():
            P = PermGroup(G.degree, P.generators + [y])
    if P.order() == target:
        return P
    raise CapExceededError("Sylow growth attempts", budget, budget)


def sylow_subgroup(G: PermGroup, r: int, rng: np.random.Generator | None = None) -> PermGroup:
    """A Sylow r-subgroup.

    Descends through centralizers of random r-elements whose centralizer keeps
    the full r-part; a group in which no such element is non-central is
    finished by random r-group growth.
    """
    rng = rng or np.random.default_rng(config.SEED)
    target = r_part(G.order(), r)
    if target == 1:
        return PermGroup(G.degree, name=f"Syl{r}")
    current = G
    while current.order() != target:
        if current.order() <= 50_000:
            return _grow_r_group(current, r, target, rng, [])
        descended = False
        for _ in range(60):
            y = _r_element(current.random_element(rng), r)
            if y is None:
                continue
            C = centralizer(current, [y])
            if r_part(C.order(), r) == target and C.order() < current.order():
                logger.debug("Sylow %d: descend %d -> %d", r, current.order(), C.order())
                current = C
                descended = True
                break
        if not descended:
            return _grow_r_group(current, r, target, rng, [])
    current.name = f"Syl{r}"
    return current


# ---------------------------------------------------------------------------
# coset action


def _canonical_coset(K_levels: list[_Level], g: Perm) -> tuple[int, ...]:
    """Lexicographically least base image over the coset K g."""
    h = g
    images = []
    for lv in K_levels:
        best = min(lv.orbit, key=lambda x: int(h[x]))
        h = mul(lv.rep(best), h)
        images.append(int(h[lv.point]))
    return tuple(images)


@dataclass(eq=False)
class CosetAction:
    """G acting on the right cosets K g, cosets numbered in BFS order.

    Attributes:
        group: the image group (degree |G:K|, kernel not factored).
        generator_images: images of G's generators, in order.
        reps: one representative per coset.
    """

    group: PermGroup
    generator_images: list[Perm]
    reps: list[Perm] = field(repr=False)
    _key: Callable[[Perm], tuple[int, ...]] = field(repr=False)
    _index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def degree(self) -> int:
        return self.group.degree

    def image(self, g: Perm) -> Perm:
        """Permutation of the cosets induced by an element of G."""
        return np.array([self._index[self._key(mul(r, g))] for r in self.reps], dtype=np.int32)

    def image_group(self, H: PermGroup, name: str | None = None) -> PermGroup:
        """The image of a subgroup of G."""
        return PermGroup(self.degree, [self.image(h) for h in H.generators], name=name or H.name)


def coset_action(G: PermGroup, K: PermGroup, name: str | None = None) -> CosetAction:
    """Action of G on the right cosets of K.

    Raises:
        CapExceededError: |G:K| exceeds COSET_CAP.
    """
    index = G.order() // K.order()
    if index > config.COSET_CAP:
        raise CapExceededError("coset space", index, config.COSET_CAP)
    # K chained on G's base: the least base image over K g is a coset invariant
    K_levels = K.with_base(G.base).levels

    def key(g: Perm) -> tuple[int, ...]:
        return _canonical_coset(K_levels, g)

    reps = [identity(G.degree)]
    index_of = {key(reps[0]): 0}
    table = [[0] * len(G.generators)]
    i = 0
    while i < len(reps):
        r = reps[i]
        row = table[i]
        for si, s in enumerate(G.generators):
            c = mul(r, s)
            k = key(c)
            j = index_of.get(k)
            if j is None:
                j = len(reps)
                index_of[k] = j
                reps.append(c)
                table.append([0] * len(G.generators))
                if j >= config.COSET_CAP:
                    raise CapExceededError("coset space", j + 1, config.COSET_CAP)
            row[si] = j
        i += 1
    degree = len(reps)
    if degree != index:
        logger.warning("coset enumeration found %d cosets, expected %d", degree, index)
    images = [np.array([table[i][si] for i in range(degree)], dtype=np.int32) for si in range(len(G.generators))]
    group = PermGroup(
        degree, images, name=name or f"{G.name or 'G'}/{K.name or 'K'}"
    )
    logger.info("coset action of %s on %d cosets", G.name or "G", degree)
    return CosetAction(group, images, reps, key, index_of)


# ---------------------------------------------------------------------------
# random subgroups


def _divisors_above_one(n: int) -> list[int]:
    f = factorint(n)
    divs = [1]
    for p, e in f.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(d for d in divs if d > 1)


def random_subgroup_of_order(
    G: PermGroup,
    N: int,
    *,
    budget: int | None = None,
    rng: np.random.Generator | None = None,
    predicate: Callable[[PermGroup], bool] | None = None,
    name: str | None = None,
) -> PermGroup | None:
    """Seeded search for a 2-generated subgroup of order exactly N.

    None after the budget is inconclusive, not a proof of absence.
    """
    order = G.order()
    if N == order:
        return G
    if N < 1 or order % N:
        return None
    rng = rng or np.random.default_rng(config.SEED)
    budget = budget or config.RANDOM_BUDGET
    for attempt in range(budget):
        pair = []
        for _ in range(2):
            g = G.random_element(rng)
            o = perm_order(g)
            choices = _divisors_above_one(math.gcd(o, N))
            if not choices:
                break
            d = choices[int(rng.integers(len(choices)))]
            pair.append(power(g, o // d))
        if len(pair) < 2:
            continue
        got = order_of_group_bounded(G.degree, pair, N)
        if got != N:
            continue
        H = PermGroup(G.degree, pair, name=name, order_hint=N)
        if predicate is None or predicate(H):
            logger.debug("random subgroup of order %d after %d attempts", N, attempt + 1)
            return H
    return None


def random_stabilizer(
    G: PermGroup,
    test: Callable[[Perm], bool],
    target_order: int,
    *,
    rng: np.random.Generator | None = None,
    budget: int | None = None,
    name: str | None = None,
) -> PermGroup:
    """Subgroup of G generated by random elements passing test, grown to target_order.

    Raises:
        CapExceededError: the budget ran out first.
    """
    rng = rng or np.random.default_rng(config.SEED)
    budget = budget or config.RANDOM_BUDGET * 50
    gens: list[Perm] = []
    H = PermGroup(G.degree)
    for _ in range(budget):
        g = G.random_element(rng)
        if not test(g) or H.contains(g):
            continue
        gens.append(g)
        H = PermGroup(G.degree, gens, name=name)
        if H.order() == target_order:
            H._order_hint = target_order
            return H
    raise CapExceededError("random stabilizer samples", budget, budget)


# ---------------------------------------------------------------------------
# product action


def product_action(G1: PermGroup, d: int, top: PermGroup | None = None, name: str | None = None) -> PermGroup:
    """G1 wr top on m^d points, point (x_0..x_{d-1}) encoded as sum x_i m^i.

    Raises:
        CapExceededError: m^d exceeds DOMAIN_CAP.
    """
    m = G1.degree
    degree = m**d
    if degree > min(config.DOMAIN_CAP, 10**5):
        raise CapExceededError("product action", degree, min(config.DOMAIN_CAP, 10**5))
    if d == 1:
        return PermGroup(m, G1.generators, name=name or G1.name)
    coords = np.stack(np.unravel_index(np.arange(degree), (m,) * d, order="F"))
    weights = m ** np.arange(d)
    gens = []
    for i in range(d):
        for g in G1.generators:
            moved = coords.copy()
            moved[i] = g[coords[i]]
            gens.append((weights @ moved).astype(np.int32))
    if top is not None:
        if top.degree != d:
            raise ValidationError("top group must act on the coordinates")
        for pi in top.generators:
            moved = np.empty_like(coords)
            moved[pi] = coords
            gens.append((weights @ moved).astype(np.int32))
    order_hint = G1.order() ** d * (top.order() if top is not None else 1)
    return PermGroup(degree, gens, name=name, order_hint=order_hint)


def ordered_pair_action(
    G: PermGroup, elements: Sequence[Perm] | None = None, name: str | None = None
) -> PermGroup:
    """The action on ordered pairs (i, j), i != j, numbered row-major.

    ``elements`` defaults to G's generators; G's order is passed on as a hint
    only in that case.
    """
    n = G.degree
    if n * (n - 1) > config.COSET_CAP:
        raise CapExceededError("ordered pairs", n * (n - 1), config.COSET_CAP)
    I, J = np.nonzero(~np.eye(n, dtype=bool))
    index = np.full((n, n), -1, dtype=np.int64)
    index[I, J] = np.arange(I.shape[0])
    perms = G.generators if elements is None else elements
    gens = [index[g[I], g[J]].astype(np.int32) for g in perms]
    hint = G.order() if elements is None and G._order_hint is not None else None
    return PermGroup(I.shape[0], gens, name=name, order_hint=hint)


def subset_action(
    G: PermGroup, k: int, elements: Sequence[Perm] | None = None, name: str | None = None
) -> PermGroup:
    """The action on k-subsets, numbered in lexicographic order."""
    n = G.degree
    size = math.comb(n, k)
    if size > config.COSET_CAP:
        raise CapExceededError(f"{k}-subsets", size, config.COSET_CAP)
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    keys = combos @ weights
    perms = G.generators if elements is None else elements
    gens = [np.searchsorted(keys, np.sort(g[combos], axis=1) @ weights).astype(np.int32) for g in perms]
    hint = G.order() if elements is None and G._order_hint is not None else None
    return PermGroup(size, gens, name=name, order_hint=hint)


def diagonal_element(gs: Sequence[Perm]) -> Perm:
    """(g_0, ..., g_{d-1}) in the base group of a product action."""
    m = gs[0].shape[0]
    d = len(gs)
    degree = m**d
    coords = np.stack(np.unravel_index(np.arange(degree), (m,) * d, order="F"))
    moved = np.stack([gs[i][coords[i]] for i in range(d)])
    return ((m ** np.arange(d)) @ moved).astype(np.int32)


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append(from_cycles(n, [[0, 1]]))
    if n >= 3:
        gens.append(from_cycles(n, [list(range(n))]))
    return PermGroup(n, gens, name=f"S{n}", order_hint=math.factorial(n))


def alternating_group(n: int) -> PermGroup:
    gens = [from_cycles(n, [[0, 1, i]]) for i in range(2, n)]
    return PermGroup(n, gens, name=f"A{n}", order_hint=math.factorial(n) // 2 if n > 1 else 1)


def cyclic_group(n: int) -> PermGroup:
    return PermGroup(n, [from_cycles(n, [list(range(n))])] if n > 1 else [], name=f"C{n}", order_hint=n)
