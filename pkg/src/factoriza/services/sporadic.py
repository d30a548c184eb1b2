"""Mathieu groups from bundled generator assets, and small fixed models.

Generator assets are text files: a ``#`` comment line, the degree, then one
0-based image list per line. Orders are recomputed by Schreier-Sims and
compared with the known values before a group is handed out.
"""

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from src.factoriza.config import config
from src.factoriza.services.classical_groups import gu_generators, permutation_group, su3_generators
from src.factoriza.services.forms import DomainKind, FormKind, GeometricDomain, enumerate_domain, standard_form
from src.factoriza.services.formula import SPORADIC_ORDERS
from src.factoriza.services.perm_engine import (
    Perm,
    PermGroup,
    as_perm,
    perm_order,
    power,
    random_stabilizer,
    restrict,
)
from src.factoriza.utils.exceptions import (
    CapExceededError,
    ConstructionError,
    UnavailableGroupError,
    ValidationError,
)

logger = logging.getLogger(__name__)

MATHIEU_DEGREES = {"M11": 11, "M12": 12, "M22": 22, "M23": 23, "M24": 24}
OPTIONAL_ORDERS = {"J2.2": 1_209_600, "HS.2": 88_704_000}

_BASE_DIR = os.path.dirname(os.path.dirname(__file__))


def data_path(*parts: str) -> str:
    return os.path.join(_BASE_DIR, "data", *parts)


def load_generators(path: str) -> tuple[int, list[Perm]]:
    """Parse a generator asset.

    Raises:
        FileNotFoundError: the asset does not exist.
        ValidationError: malformed degree or image list.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValidationError(f"empty generator asset {os.path.basename(path)}")
    try:
        degree = int(lines[0])
        gens = [as_perm([int(x) for x in ln.split()], degree) for ln in lines[1:]]
    except ValueError as exc:
        raise ValidationError(f"malformed generator asset {os.path.basename(path)}: {exc}") from exc
    return degree, gens


def _validated(name: str, degree: int, gens: list[Perm], expected: int) -> PermGroup:
    G = PermGroup(degree, gens, name=name)
    got = G.order()
    if got != expected or not G.is_transitive():
        raise ConstructionError(
            f"{name}: generators give order {got}, expected {expected}",
            {"name": name, "order": got, "expected": expected},
        )
    logger.info("%s loaded: degree %d, order %d", name, degree, got)
    return G


@lru_cache(maxsize=None)
def mathieu(name: str) -> PermGroup:
    """M11, M12, M22, M23 or M24 in its natural action.

    Raises:
        ValidationError: unknown name.
        ConstructionError: the asset does not generate a group of the right order.
    """
    key = name.upper()
    if key not in MATHIEU_DEGREES:
        raise ValidationError(f"unknown Mathieu group {name}", {"known": sorted(MATHIEU_DEGREES)})
    degree, gens = load_generators(data_path("mathieu", f"{key}.txt"))
    if degree != MATHIEU_DEGREES[key]:
        raise ConstructionError(f"{key} asset has degree {degree}")
    return _validated(key, degree, gens, SPORADIC_ORDERS[key])


@lru_cache(maxsize=None)
def sporadic_optional(name: str) -> PermGroup:
    """J2.2 or HS.2 on 100 points, when the asset is bundled.

    Raises:
        ValidationError: unknown name.
        UnavailableGroupError: the asset is absent.
    """
    if name not in OPTIONAL_ORDERS:
        raise ValidationError(f"unknown optional group {name}", {"known": sorted(OPTIONAL_ORDERS)})
    path = data_path("sporadic", f"{name}.txt")
    if not os.path.exists(path):
        raise UnavailableGroupError(name)
    degree, gens = load_generators(path)
    return _validated(name, degree, gens, OPTIONAL_ORDERS[name])


# ---------------------------------------------------------------------------
# actions on sets


@dataclass(eq=False)
class SetAction:
    """G acting on the orbit of a point set; sets[i] is point i."""

    group: PermGroup
    sets: list[frozenset[int]] = field(repr=False)
    _where: dict[frozenset[int], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._where = {s: i for i, s in enumerate(self.sets)}

    def index(self, s: Iterable[int]) -> int:
        return self._where[frozenset(int(x) for x in s)]

    def image(self, g: Perm) -> Perm:
        """The permutation of the sets induced by a point permutation of the parent."""
        return np.array(
            [self._where[frozenset(int(g[x]) for x in s)] for s in self.sets], dtype=np.int32
        )

    def image_group(self, H: PermGroup, name: str | None = None) -> PermGroup:
        return PermGroup(
            len(self.sets),
            [self.image(h) for h in H.generators],
            name=name or H.name,
            order_hint=H.order(),
        )


def action_on_sets(G: PermGroup, seed: Iterable[int], name: str | None = None) -> SetAction:
    """Orbit of a set under G with the induced permutation group.

    Raises:
        CapExceededError: the orbit exceeds COSET_CAP.
    """
    start = frozenset(int(x) for x in seed)
    sets = [start]
    index = {start: 0}
    i = 0
    while i < len(sets):
        s = sets[i]
        i += 1
        for g in G.generators:
            t = frozenset(int(g[x]) for x in s)
            if t not in index:
                index[t] = len(sets)
                sets.append(t)
                if len(sets) > config.COSET_CAP:
                    raise CapExceededError("set orbit", len(sets), config.COSET_CAP)
    images = []
    for g in G.generators:
        images.append(np.array([index[frozenset(int(g[x]) for x in s)] for s in sets], dtype=np.int32))
    logger.debug("%s on %d-sets: orbit of length %d", G.name or "G", len(start), len(sets))
    group = PermGroup(len(sets), images, name=name or f"{G.name or 'G'} on {len(start)}-sets", order_hint=G.order())
    return SetAction(group, sets)


# ---------------------------------------------------------------------------
# the Steiner system of M24


def _involution_fixed_sets(G: PermGroup, size: int, rng: np.random.Generator, want: Callable[[frozenset[int]], bool]) -> frozenset[int]:
    for _ in range(config.RANDOM_BUDGET * 10):
        g = G.random_element(rng)
        o = perm_order(g)
        if o % 2:
            continue
        x = power(g, o // 2)
        fixed = frozenset(int(p) for p in np.flatnonzero(x == np.arange(G.degree)))
        if len(fixed) == size and want(fixed):
            return fixed
    raise ConstructionError(f"no involution with {size} fixed points found")


@lru_cache(maxsize=1)
def octads() -> list[frozenset[int]]:
    """The 759 octads: the orbit of the fixed-point set of a 1^8 2^8 involution."""
    M24 = mathieu("M24")
    rng = np.random.default_rng(config.SEED)
    first = _involution_fixed_sets(M24, 8, rng, lambda s: True)
    sets = action_on_sets(M24, first).sets
    if len(sets) != 759:
        raise ConstructionError(f"octad orbit has length {len(sets)}")
    return sets


@lru_cache(maxsize=1)
def dodecad() -> frozenset[int]:
    """The symmetric difference of two octads meeting in two points."""
    all_octads = octads()
    first = all_octads[0]
    for other in all_octads[1:]:
        if len(first & other) == 2:
            return first ^ other
    raise ConstructionError("no pair of octads meets in two points")  # unreachable


def _stabilizer_of_partition(G: PermGroup, parts: list[frozenset[int]], target: int, name: str) -> PermGroup:
    arrays = [np.array(sorted(p)) for p in parts]

    def keeps(g: Perm) -> bool:
        return {frozenset(int(x) for x in g[a]) for a in arrays} == set(parts)

    return random_stabilizer(G, keeps, target, name=name)


@lru_cache(maxsize=1)
def m12_2() -> PermGroup:
    """M12.2 on 24 points: the stabilizer in M24 of a dodecad and its complement."""
    D = dodecad()
    complement = frozenset(range(24)) - D
    return _stabilizer_of_partition(mathieu("M24"), [D, complement], 2 * SPORADIC_ORDERS["M12"], "M12.2")


@lru_cache(maxsize=1)
def m22_2() -> PermGroup:
    """M22.2 on 22 points: the stabilizer in M24 of {22, 23}, restricted to the rest."""
    stab = _stabilizer_of_partition(
        mathieu("M24"), [frozenset({22, 23})], 2 * SPORADIC_ORDERS["M22"], "M22.2 in M24"
    )
    return restrict(stab, list(range(22)), name="M22.2")


def m11_on_pairs() -> SetAction:
    """M11 on the 55 two-sets of its natural points."""
    return action_on_sets(mathieu("M11"), {0, 1}, name="M11 on 2-sets")


def m23_on_pairs() -> SetAction:
    """M23 on the 253 two-sets of its natural points."""
    return action_on_sets(mathieu("M23"), {0, 1}, name="M23 on 2-sets")


def m23_on_heptads() -> SetAction:
    """M23 on the 253 heptads: octads through the point fixed by M23, less that point.

    The M23 asset is the stabilizer of point 23 in the M24 asset.
    """
    heptad = next(o - {23} for o in octads() if 23 in o)
    act = action_on_sets(mathieu("M23"), heptad, name="M23 on heptads")
    if act.group.degree != 253:
        raise ConstructionError(f"heptad orbit has length {act.group.degree}")
    return act


# ---------------------------------------------------------------------------
# PSp4(3) ≅ PSU4(2) on 27 points, PSU3(3) on 28 points


@dataclass(eq=False)
class LinearModel:
    """A group induced on a geometric domain, with the domain kept."""

    group: PermGroup
    domain: GeometricDomain = field(repr=False)
    outer: Perm | None = field(default=None, repr=False)

    def extended(self, name: str) -> PermGroup:
        """The group together with the outer automorphism."""
        if self.outer is None:
            raise ValidationError(f"{self.group.name} has no outer automorphism attached")
        return PermGroup(
            self.group.degree,
            self.group.generators + [self.outer],
            name=name,
            order_hint=2 * self.group.order(),
        )


@lru_cache(maxsize=1)
def psp43_deg27() -> LinearModel:
    """PSU4(2) on the 27 totally isotropic lines of the hermitian space GF(4)^4.

    The outer automorphism is the field automorphism, which preserves the
    standard form.
    """
    form = standard_form(FormKind.HERMITIAN, 4, 2)
    dom = enumerate_domain(form, DomainKind.TOTALLY_SINGULAR, k=2)
    if dom.size != 27:
        raise ConstructionError(f"{dom.size} totally isotropic lines, expected 27")
    G = permutation_group(dom, gu_generators(form), name="PSp4(3)")
    if G.order() != 25920 or not G.is_transitive():
        raise ConstructionError(f"PSp4(3) model has order {G.order()}")
    stab = G.stabilizer(0).order()
    if stab != 960:
        raise ConstructionError(f"point stabilizer of order {stab}, expected 960")
    frob = dom.permutation(form.GF.Identity(4), frob=1)
    return LinearModel(G, dom, frob)


@lru_cache(maxsize=1)
def psu33_deg28() -> LinearModel:
    """PSU3(3) on the 28 isotropic points of GF(9)^3."""
    form = standard_form(FormKind.HERMITIAN, 3, 3)
    dom = enumerate_domain(form, DomainKind.TOTALLY_SINGULAR, k=1)
    G = permutation_group(dom, su3_generators(form), name="PSU3(3)")
    if dom.size != 28 or G.order() != 6048:
        raise ConstructionError(f"PSU3(3) model: {dom.size} points, order {G.order()}")
    return LinearModel(G, dom, dom.permutation(form.GF.Identity(3), frob=1))
