"""Witness triples (G, H, K) for the rows of the ℓ, exact, Type II and Type III tables.

A witness is a FactorizationInstance with H acting on Δ = G/K: on G's own
points when K is a point stabilizer, through a coset or induced action
otherwise. A K that is not a stabilizer is found by seeded random search
asking for |H ∩ K| = |H||K|/|G|; verify() then checks transitivity on Δ
independently of how K was found.
"""

import dataclasses
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from src.factoriza.config import config
from src.factoriza.models.report import Expectation, Verdict, VerificationReport
from src.factoriza.services.classical_groups import (
    elementary,
    gl_generators,
    permutation_group,
    sl_generators,
    su3_generators,
)
from src.factoriza.services.constructions import (
    G_DEGREE_CAP,
    build_case1,
    build_case3,
    build_case6,
    build_case7,
    build_case8,
)
from src.factoriza.services.factorization import FactorizationInstance, verify
from src.factoriza.services.field_core import FieldTable, field_of_order, subfield_embedding
from src.factoriza.services.forms import (
    DomainKind,
    FormKind,
    enumerate_domain,
    normalize_rows,
    standard_form,
    subspace_domain,
)
from src.factoriza.services.formula import SPORADIC_ORDERS, order_pgl, order_psl, order_psu
from src.factoriza.services.matrix_core import Mat, singer
from src.factoriza.services.nilpotent import extraspecial_regular
from src.factoriza.services.perm_engine import (
    Perm,
    PermGroup,
    alternating_group,
    centralizer,
    coset_action,
    cycle_type,
    cyclic_group,
    cyclic_normalizer,
    derived_subgroup,
    exponent,
    is_semiregular,
    is_solvable,
    klein_normalizer,
    normal_closure,
    normalizer,
    order_of_group_bounded,
    ordered_pair_action,
    perm_order,
    power,
    random_stabilizer,
    random_subgroup_of_order,
    subset_action,
    sylow_subgroup,
    symmetric_group,
)
from src.factoriza.services.small_groups import identify_group
from src.factoriza.services.sporadic import (
    LinearModel,
    action_on_sets,
    m11_on_pairs,
    m12_2,
    m22_2,
    m23_on_heptads,
    m23_on_pairs,
    mathieu,
    psp43_deg27,
    psu33_deg28,
    sporadic_optional,
)
from src.factoriza.utils.exceptions import ConstructionError, ValidationError

logger = logging.getLogger(__name__)

T3 = "T3 (values of ℓ)"
T4 = "T4 (exact factorizations)"
T5 = "T5 (exact families)"
T6 = "T6 (Type II factors)"
T7 = "T7 (Type III factors)"


def _rng() -> np.random.Generator:
    return np.random.default_rng(config.SEED)


def meet_order(H: PermGroup, K: PermGroup) -> int:
    """|H ∩ K| by enumerating H."""
    return sum(1 for h in H.iter_elements() if K.contains(h))


def _nonsolvable(K: PermGroup) -> bool:
    return not is_solvable(K)


def _complement(
    G: PermGroup,
    order: int,
    H: PermGroup,
    *,
    name: str,
    shape: str | None = None,
    predicate: Callable[[PermGroup], bool] | None = None,
    within: PermGroup | None = None,
) -> PermGroup:
    """A subgroup K of ``within`` (default G) of the given order with |H ∩ K| = |H||K|/|G|.

    Raises:
        ConstructionError: the order arithmetic is not integral, or the search budget ran out.
    """
    meet = Fraction(H.order() * order, G.order())
    if meet.denominator != 1:
        raise ConstructionError(f"|H||K|/|G| = {meet} for K = {name}", {"K": name, "order": order})

    def accept(K: PermGroup) -> bool:
        if shape is not None and identify_group(K) != shape:
            return False
        if predicate is not None and not predicate(K):
            return False
        return meet_order(H, K) == meet

    K = random_subgroup_of_order(within or G, order, rng=_rng(), predicate=accept, name=name)
    if K is None:
        raise ConstructionError(f"no {name} of order {order} found within the search budget", {"K": name})
    logger.info("found K = %s of order %d with |H ∩ K| = %d", name, order, meet)
    return K


def _on_cosets(G: PermGroup, H: PermGroup, K: PermGroup) -> tuple[PermGroup, PermGroup]:
    act = coset_action(G, K)
    return act.group, act.image_group(H)


def _witness(
    label: str,
    G: PermGroup | None,
    H: PermGroup,
    *,
    ell: int,
    exact: bool,
    citation: str,
    G_order: int | None = None,
    socle: tuple[int, int] | None = None,
    params: dict[str, Any] | None = None,
    notes: list[str] | None = None,
) -> FactorizationInstance:
    """Wrap H (already acting on Δ) with the row's expectations."""
    index = H.degree
    if G_order is None:
        if G is None:
            raise ValidationError("G_order is required when G is not carried")
        G_order = G.order()
    expect: dict[str, Any] = {"domain_size": index, "H_order": ell, "transitive": True, "exact": exact}
    citations = {
        "domain_size": f"|G:K| = {G_order}/{G_order // index}",
        "H_order": citation,
        "transitive": citation,
        "exact": citation,
    }
    if ell % index == 0:
        expect["stabilizer_order"] = ell // index
        citations["stabilizer_order"] = "|H ∩ K| = |H||K|/|G|"
    if G is not None and index <= G_DEGREE_CAP:
        expect["G_order"] = G_order
        citations["G_order"] = citation
    else:
        G = None
    return FactorizationInstance(
        label=label,
        H=H,
        G=G,
        expect=expect,
        citations=citations,
        socle_orders=socle or (ell, index),
        notes=list(notes or []),
        params=dict(params or {}),
    )


def _relabel(inst: FactorizationInstance, label: str, citation: str) -> FactorizationInstance:
    citations = dict(inst.citations)
    citations["H_order"] = citation
    return dataclasses.replace(inst, label=label, citations=citations)


def _element_of_order(G: PermGroup, k: int, rng: np.random.Generator | None = None) -> Perm:
    rng = rng or _rng()
    for _ in range(config.RANDOM_BUDGET):
        g = G.random_element(rng)
        o = perm_order(g)
        if o % k == 0:
            return power(g, o // k)
    raise ConstructionError(f"no element of order {k} in {G.name or 'G'} within the search budget")


# ---------------------------------------------------------------------------
# regular subgroups of a named shape


# shapes grown from a normal cyclic subgroup of the given order
_CYCLIC_CORE = {"C6xC2": 6, "D12": 6, "3:D8": 6, "D24": 12, "D8xC3": 12, "D22": 11}
# shapes grown from a normal Klein four-group
_KLEIN_CORE = ("A4", "S4", "A4xC2")


def _semiregular_element(G: PermGroup, k: int, rng: np.random.Generator) -> Perm:
    want = (k,) * (G.degree // k)
    for _ in range(config.RANDOM_BUDGET):
        g = G.random_element(rng)
        o = perm_order(g)
        if o % k:
            continue
        a = power(g, o // k)
        if cycle_type(a) == want:
            return a
    raise ConstructionError(f"no fixed-point-free element of order {k} found")


def _grow(
    N: PermGroup,
    start: list[Perm],
    target: int,
    rng: np.random.Generator,
    accept: Callable[[PermGroup], bool],
    attempts: int,
) -> PermGroup | None:
    """Extend <start> inside N by random elements, keeping it semiregular, up to order target."""
    deg = N.degree
    for _ in range(attempts):
        gens = list(start)
        order = PermGroup(deg, gens).order()
        misses = 0
        while order < target and misses < 30:
            g = N.random_element(rng)
            o = perm_order(g)
            choices = [d for d in range(2, o + 1) if o % d == 0 and target % d == 0]
            if not choices:
                misses += 1
                continue
            b = power(g, o // choices[int(rng.integers(len(choices)))])
            got = order_of_group_bounded(deg, gens + [b], target)
            if got is None or target % got or got == order:
                misses += 1
                continue
            if not is_semiregular(PermGroup(deg, gens + [b], order_hint=got)):
                misses += 1
                continue
            gens.append(b)
            order = got
        if order == target:
            R = PermGroup(deg, gens, order_hint=target)
            if accept(R):
                return R
    return None


def regular_of_shape(G: PermGroup, shape: str, *, attempts: int = 40) -> PermGroup:
    """A regular subgroup of G isomorphic to ``shape``, grown from a normal core.

    Cyclic cores grow inside N_G(<a>), Klein four cores inside N_G(V).

    Raises:
        ValidationError: no recipe for the shape.
        ConstructionError: nothing found within the attempts.
    """
    if shape not in _CYCLIC_CORE and shape not in _KLEIN_CORE:
        raise ValidationError(f"no recipe for a regular {shape}", {"known": [*_CYCLIC_CORE, *_KLEIN_CORE]})
    n = G.degree
    rng = _rng()

    def accept(R: PermGroup) -> bool:
        if shape == "D22":
            return not R.is_abelian()
        return identify_group(R) == shape

    for attempt in range(attempts):
        if shape in _CYCLIC_CORE:
            a = _semiregular_element(G, _CYCLIC_CORE[shape], rng)
            core, N = [a], cyclic_normalizer(G, a)
        else:
            x = _semiregular_element(G, 2, rng)
            V = _grow(centralizer(G, [x]), [x], 4, rng, lambda V: exponent(V) == 2, attempts=5)
            if V is None:
                continue
            core = list(V.generators)
            N = klein_normalizer(G, core[0], core[-1])
        R = _grow(N, core, n, rng, accept, attempts=50)
        if R is not None:
            R.name = shape
            logger.info("regular %s in %s after %d core choices", shape, G.name or "G", attempt + 1)
            return R
    raise ConstructionError(f"no regular {shape} found in {G.name or 'G'}", {"shape": shape})


# ---------------------------------------------------------------------------
# linear models


@lru_cache(maxsize=None)
def projective_line(q: int, kind: str = "PSL") -> LinearModel:
    """PSL2(q) or PGL2(q) on the q + 1 projective points; ``outer`` is the Frobenius when q is not prime."""
    if kind not in ("PSL", "PGL"):
        raise ValidationError(f"kind must be PSL or PGL, got {kind}")
    F = field_of_order(q)
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=F.GF, dim=2)
    gens = sl_generators(2, F) if kind == "PSL" else gl_generators(2, F)
    expected = order_psl(2, q) if kind == "PSL" else order_pgl(2, q)
    G = permutation_group(dom, gens, name=f"{kind}2({q})")
    if G.order() != expected:
        raise ConstructionError(f"{kind}2({q}) model has order {G.order()}, expected {expected}")
    outer = dom.permutation(F.GF.Identity(2), frob=1) if F.f > 1 else None
    return LinearModel(G, dom, outer)


def borel_subgroup(model: LinearModel, k: int, name: str | None = None) -> PermGroup:
    """q:k inside the stabilizer of <(0, 1)>, torus part diag(w, 1/w) of projective order k."""
    q = int(type(model.domain.points).order)
    F = field_of_order(q)
    GF = F.GF
    if ((q - 1) // math.gcd(2, q - 1)) % k:
        raise ValidationError(f"k = {k} does not divide (q-1)/(2,q-1) for q = {q}")
    dom = model.domain
    gens = [dom.permutation(elementary(GF, 2, 0, 1, GF(1)))]
    if k > 1:
        w = GF(F.primitive) ** ((q - 1) // (math.gcd(2, q - 1) * k))
        gens.append(dom.permutation(GF([[int(w), 0], [0, int(w**-1)]])))
    H = PermGroup(dom.size, gens, name=name or f"{q}:{k}")
    if H.order() != q * k:
        raise ConstructionError(f"Borel part has order {H.order()}, expected {q * k}")
    return H


def _line_row(
    label: str, q: int, k: int, K_order: int, citation: str, *, shape: str | None = None, exact: bool = True
) -> FactorizationInstance:
    model = projective_line(q)
    G = model.group
    H = borel_subgroup(model, k)
    K = _complement(G, K_order, H, name=shape or "A5", shape=shape, predicate=None if shape else _nonsolvable)
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=q * k, exact=exact, citation=citation, G_order=G.order(), params={"q": q})


def _pgl2_11_row(label: str, citation: str) -> FactorizationInstance:
    """PGL2(11) = 11:2 · A5, with 11:2 = <u, diag(-1, 1)>."""
    model = projective_line(11, "PGL")
    G = model.group
    GF = field_of_order(11).GF
    dom = model.domain
    H = PermGroup(
        dom.size,
        [dom.permutation(elementary(GF, 2, 0, 1, GF(1))), dom.permutation(GF([[10, 0], [0, 1]]))],
        name="11:2",
    )
    psl = projective_line(11).group
    K = _complement(G, 60, H, name="A5", predicate=lambda K: _nonsolvable(K) and K.is_subgroup_of(psl))
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(
        label, Gd, Hd, ell=22, exact=True, citation=citation, G_order=G.order(), socle=(11, 11), params={"outer": 2}
    )


@lru_cache(maxsize=1)
def pgammal2_16_row() -> FactorizationInstance:
    """PΓL2(16) = D34.4 · (2 x A5).2 on 68 cosets."""
    model = projective_line(16, "PGL")
    assert model.outer is not None
    F16, F4 = field_of_order(16), field_of_order(4)
    dom = model.domain
    G = PermGroup(dom.size, model.group.generators + [model.outer], name="PGammaL2(16)")
    if G.order() != 4 * order_pgl(2, 16):
        raise ConstructionError(f"PGammaL2(16) model has order {G.order()}")
    c = dom.permutation(singer(2, F16).c)
    H = cyclic_normalizer(G, c, name="D34.4", units=8)
    emb = subfield_embedding(F16, F4)
    lifted = [F16.GF(emb[np.asarray(m.view(np.ndarray))]) for m in sl_generators(2, F4)]
    K = PermGroup(dom.size, [dom.permutation(m) for m in lifted] + [model.outer], name="2.S5")
    if K.order() != 240:
        raise ConstructionError(f"subfield subgroup has order {K.order()}, expected 240")
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(
        "T6/case2",
        Gd,
        Hd,
        ell=136,
        exact=False,
        citation=f"{T6} case 2: PΓL2(16) = D34.4 · 2.S5",
        G_order=G.order(),
        socle=(68, 68),
    )


@lru_cache(maxsize=1)
def psl3_3_singer() -> tuple[PermGroup, PermGroup]:
    """PSL3(3) on 13 points with the Singer normalizer 13:3."""
    F = field_of_order(3)
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=F.GF, dim=3)
    G = permutation_group(dom, sl_generators(3, F), name="PSL3(3)")
    S = singer(3, F)
    H = PermGroup(dom.size, [dom.permutation(S.c), dom.permutation(S.normalizer_gen)], name="13:3")
    if G.order() != order_psl(3, 3) or H.order() != 39:
        raise ConstructionError(f"PSL3(3) model: |G| = {G.order()}, |H| = {H.order()}")
    return G, H


def _psl3_3_row(label: str, citation: str) -> FactorizationInstance:
    G, H = psl3_3_singer()
    K = _complement(G, 144, H, name="AGammaL1(9)", predicate=is_solvable)
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=39, exact=True, citation=citation, G_order=G.order())


def _psl5_2_row(label: str, citation: str) -> FactorizationInstance:
    """PSL5(2) on the 155 planes of GF(2)^5 with the Singer normalizer 31:5."""
    F = field_of_order(2)
    dom = subspace_domain(F.GF, 5, 2)
    G = permutation_group(dom, sl_generators(5, F), name="PSL5(2)")
    S = singer(5, F)
    H = PermGroup(dom.size, [dom.permutation(S.c), dom.permutation(S.normalizer_gen)], name="31:5")
    if G.order() != order_psl(5, 2) or H.order() != 155:
        raise ConstructionError(f"PSL5(2) model: |G| = {G.order()}, |H| = {H.order()}")
    return _witness(label, G, H, ell=155, exact=True, citation=citation)


def _doubled(perms: list[Perm]) -> list[Perm]:
    """Images on two disjoint copies of the points."""
    return [np.concatenate([g, g + g.shape[0]]).astype(np.int32) for g in perms]


def _psl3_8_row(label: str, citation: str) -> FactorizationInstance:
    """PSL3(8).3 = 73:9 · 2^{3+6}:7^2:3 on the 657 flags."""
    F = field_of_order(8)
    GF = F.GF
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=GF, dim=3)
    frob = dom.permutation(GF.Identity(3), frob=1)
    G = permutation_group(dom, sl_generators(3, F), name="PSL3(8).3", extra=[frob])
    if G.order() != 3 * order_psl(3, 8):
        raise ConstructionError(f"PSL3(8).3 model has order {G.order()}")
    H = cyclic_normalizer(G, dom.permutation(singer(3, F).c), name="73:9", units=9)
    # a flag (p, L) is the set {p} ∪ (L + 73) on two copies of the points
    P = dom.points
    line = [P[0]] + [P[1] + GF(a) * P[0] for a in range(F.q)]
    members = dom.index_of(normalize_rows(GF(np.stack([r.view(np.ndarray) for r in line]))))
    n = dom.size
    seed = {0} | {n + int(x) for x in members}
    doubled = PermGroup(2 * n, _doubled(G.generators), name="PSL3(8).3 doubled", order_hint=G.order())
    act = action_on_sets(doubled, seed, name="PSL3(8).3 on flags")
    Hd = act.image_group(PermGroup(2 * n, _doubled(H.generators), order_hint=H.order()), name="73:9")
    return _witness(label, act.group, Hd, ell=657, exact=True, citation=citation, G_order=G.order())


@lru_cache(maxsize=1)
def psu3_8_model() -> tuple[PermGroup, PermGroup]:
    """PSU3(8).3^2 (PGU3(8) and a field automorphism of order 3) on 513 isotropic points, with 57:9."""
    form = standard_form(FormKind.HERMITIAN, 3, 8)
    dom = enumerate_domain(form, DomainKind.TOTALLY_SINGULAR, k=1)
    GF = form.GF
    xi = GF(form.F.primitive)
    diag = GF(np.diag([int(xi), 1, int(xi**-8)]))
    pgu = permutation_group(dom, su3_generators(form) + [diag], name="PGU3(8)")
    G = PermGroup(
        dom.size, pgu.generators + [dom.permutation(GF.Identity(3), frob=2)], name="PSU3(8).3^2"
    )
    if dom.size != 513 or G.order() != 9 * order_psu(3, 8):
        raise ConstructionError(f"PSU3(8).3^2 model: {dom.size} points, order {G.order()}")
    a = _element_of_order(pgu, 57)
    H = cyclic_normalizer(G, a, name="57:9", units=9)
    if H.order() != 513:
        raise ConstructionError(f"normalizer of C57 has order {H.order()}, expected 513")
    return G, H


def _psu3_8_row(label: str, citation: str) -> FactorizationInstance:
    G, H = psu3_8_model()
    return _witness(label, G, H, ell=513, exact=True, citation=citation)


def _psu3_3_row(label: str, citation: str) -> FactorizationInstance:
    G = psu33_deg28().group
    H = G.stabilizer(0)
    H.name = "3+^{1+2}:8"
    K = _complement(G, 168, H, name="PSL2(7)", predicate=_nonsolvable)
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=216, exact=False, citation=citation, G_order=G.order())


# ---------------------------------------------------------------------------
# PSp4(3) on 27 points


def _psp43_row(label: str, sign: str, citation: str, *, exact: bool = True) -> FactorizationInstance:
    G = psp43_deg27().group
    R = extraspecial_regular(sign)
    return _witness(label, G, R, ell=27, exact=exact, citation=citation, params={"sign": sign})


def _psp43_outer_row(label: str, sign: str, citation: str) -> FactorizationInstance:
    """PSp4(3).2 = 3^{1+2}:2 · 2^4:A5 on 54 cosets."""
    model = psp43_deg27()
    G = model.group
    Gx = model.extended("PSp4(3).2")
    R = extraspecial_regular(sign)
    N = normalizer(Gx, R)
    t = next((g for g in N.iter_elements() if perm_order(g) == 2 and not G.contains(g)), None)
    if t is None:
        raise ConstructionError(f"no outer involution normalizes 3{sign}^(1+2)")
    H = PermGroup(G.degree, R.generators + [t], name=f"3{sign}^{{1+2}}:2")
    Gd, Hd = _on_cosets(Gx, H, G.stabilizer(0))
    return _witness(
        label, Gd, Hd, ell=54, exact=True, citation=citation, G_order=Gx.order(), socle=(27, 27),
        params={"sign": sign, "outer": 2},
    )


def _psp43_q8_row(label: str, citation: str) -> FactorizationInstance:
    """PSp4(3) = 3+^{1+2}:Q8 · S5 on 216 cosets."""
    G = psp43_deg27().group
    R = extraspecial_regular("+")
    Q = sylow_subgroup(normalizer(G, R), 2, rng=_rng())
    H = PermGroup(G.degree, R.generators + Q.generators, name="3+^{1+2}:Q8")
    K = _complement(G, 120, H, name="S5", predicate=_nonsolvable)
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=216, exact=True, citation=citation, G_order=G.order())


@lru_cache(maxsize=1)
def _psu42_parts() -> tuple[PermGroup, Perm]:
    """The normal 2^4 of the point stabilizer 2^4:A5, and an element of order 5 there."""
    S = psp43_deg27().group.stabilizer(0)
    rng = _rng()
    for _ in range(config.RANDOM_BUDGET):
        z = _element_of_order(S, 2, rng)
        E = normal_closure(S, [z], name="2^4")
        if E.order() == 16:
            return E, _element_of_order(S, 5, rng)
    raise ConstructionError("no involution of the point stabilizer has normal closure of order 16")


def _psu42_row(label: str, which: int, citation: str) -> FactorizationInstance:
    """PSU4(2) = 2^4:5 · 3+^{1+2}:2.A4 (which=9), 2^4:D10 (which=10), or PSU4(2).2 with 2^4:5:4 (which=11)."""
    model = psp43_deg27()
    G = model.group
    E, y = _psu42_parts()
    R = extraspecial_regular("+")
    if which == 9:
        H = PermGroup(G.degree, E.generators + [y], name="2^4:5")
        return _psu42_finish(label, G, H, normalizer(G, R), 80, citation)
    if which == 10:
        D = cyclic_normalizer(G.stabilizer(0), y, units=2)
        H = PermGroup(G.degree, E.generators + D.generators, name="2^4:D10")
        return _psu42_finish(label, G, H, normalizer(G, R), 160, citation)
    if which == 11:
        Gx = model.extended("PSU4(2).2")
        D = cyclic_normalizer(Gx.stabilizer(0), y, units=4)
        H = PermGroup(G.degree, E.generators + D.generators, name="2^4:5:4")
        K = _complement(
            Gx, 162, H, name="3+^{1+2}:S3", within=normalizer(Gx, R),
            predicate=lambda K: R.is_subgroup_of(K),
        )
        return _psu42_finish(label, Gx, H, K, 320, citation)
    raise ValidationError(f"no PSU4(2) witness {which}")


def _psu42_finish(
    label: str, G: PermGroup, H: PermGroup, K: PermGroup, ell: int, citation: str
) -> FactorizationInstance:
    if H.order() != ell:
        raise ConstructionError(f"{H.name} has order {H.order()}, expected {ell}")
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=ell, exact=ell == Gd.degree, citation=citation, G_order=G.order())


# ---------------------------------------------------------------------------
# alternating and symmetric groups


def _affine_perm(F: FieldTable, dim: int, M: Mat | None = None, shift: Any = None, frob: int = 0) -> Perm:
    """x -> x^(p^frob) M + shift on GF(q)^dim, vector v numbered sum v_i q^i."""
    q = F.q
    digits = np.stack(np.unravel_index(np.arange(q**dim), (q,) * dim, order="F"), axis=1)
    W = F.GF(digits)
    if frob:
        W = W ** (F.p**frob)
    if M is not None:
        W = W @ M
    if shift is not None:
        W = W + shift
    return (W.view(np.ndarray).astype(np.int64) @ (q ** np.arange(dim, dtype=np.int64))).astype(np.int32)


def affine_group(
    F: FieldTable, dim: int, linear: list[Mat], *, gamma: bool = False, name: str | None = None
) -> PermGroup:
    """Translations of GF(q)^dim, the given linear maps and, with gamma, the Frobenius."""
    GF = F.GF
    gens = []
    for i in range(dim):
        for lam in F.prime_basis():
            t = GF.Zeros(dim)
            t[i] = lam
            gens.append(_affine_perm(F, dim, shift=t))
    gens += [_affine_perm(F, dim, M=M) for M in linear]
    if gamma:
        gens.append(_affine_perm(F, dim, frob=1))
    return PermGroup(F.q**dim, gens, name=name)


def affine_line(q: int, gamma: bool = False) -> PermGroup:
    F = field_of_order(q)
    name = f"AGammaL1({q})" if gamma else f"AGL1({q})"
    return affine_group(F, 1, [F.GF([[F.primitive]])], gamma=gamma, name=name)


def _nearfield_like(C: PermGroup) -> bool:
    return is_solvable(C) and not derived_subgroup(C).is_abelian()


def sharply_2_transitive(p: int, complement_order: int) -> PermGroup:
    """p^2:C with C a solvable non-metacyclic subgroup of GL2(p) regular on the nonzero vectors."""
    F = field_of_order(p)
    L = PermGroup(p * p, [_affine_perm(F, 2, M=M) for M in gl_generators(2, F)], name=f"GL2({p})")

    def regular_on_nonzero(C: PermGroup) -> bool:
        return len(C.orbit(1)) == complement_order and _nearfield_like(C)

    C = random_subgroup_of_order(L, complement_order, rng=_rng(), predicate=regular_on_nonzero)
    if C is None:
        raise ConstructionError(f"no regular complement of order {complement_order} in GL2({p})")
    translations = affine_group(F, 2, []).generators
    return PermGroup(p * p, translations + C.generators, name=f"{p}^2:{complement_order}")


def _alt_triples_row(label: str, q: int, gamma: bool, citation: str) -> FactorizationInstance:
    """A_q on 3-subsets with AGL1(q) or AΓL1(q) regular."""
    H = affine_line(q, gamma)
    A = alternating_group(q)
    Hd = subset_action(A, 3, elements=H.generators, name=H.name)
    Gd = subset_action(A, 3, name=f"A{q} on 3-sets") if math.comb(q, 3) <= G_DEGREE_CAP else None
    ell = math.comb(q, 3)
    return _witness(label, Gd, Hd, ell=ell, exact=True, citation=citation, G_order=math.factorial(q) // 2)


def _a8_s5_row(label: str, citation: str) -> FactorizationInstance:
    """A8 = AΓL1(8) · S5."""
    G = alternating_group(8)
    H = affine_line(8, gamma=True)
    K = _complement(G, 120, H, name="S5", predicate=_nonsolvable)
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=168, exact=True, citation=citation, G_order=G.order())


def _pairs_row(
    label: str, p: int, complement_order: int, symmetric: bool, citation: str
) -> FactorizationInstance:
    """A_{p^2} or S_{p^2} on ordered pairs with p^2:C sharply 2-transitive."""
    n = p * p
    H = sharply_2_transitive(p, complement_order)
    big = symmetric_group(n) if symmetric else alternating_group(n)
    Hd = ordered_pair_action(big, elements=H.generators, name=H.name)
    Gd = ordered_pair_action(big, name=f"{big.name} on pairs") if n * (n - 1) <= G_DEGREE_CAP else None
    order = math.factorial(n) // (1 if symmetric else 2)
    return _witness(label, Gd, Hd, ell=n * (n - 1), exact=True, citation=citation, G_order=order)


# ---------------------------------------------------------------------------
# Mathieu and optional sporadic groups


def _mathieu_regular_row(label: str, G: PermGroup, shape: str, G_order: int, citation: str) -> FactorizationInstance:
    R = regular_of_shape(G, shape)
    return _witness(label, G, R, ell=G.degree, exact=True, citation=citation, G_order=G_order, params={"H": shape})


def _cyclic_regular_row(label: str, name: str, citation: str) -> FactorizationInstance:
    G = mathieu(name)
    a = _semiregular_element(G, G.degree, _rng())
    H = PermGroup(G.degree, [a], name=f"C{G.degree}", order_hint=G.degree)
    return _witness(label, G, H, ell=G.degree, exact=True, citation=citation)


def _mathieu_normalizer_row(
    label: str, name: str, prime: int, units: int, on: str, citation: str
) -> FactorizationInstance:
    """p:k = N(C_p) acting on 2-sets (M11, M23) or on heptads (M23)."""
    G = mathieu(name)
    H = cyclic_normalizer(G, _element_of_order(G, prime), name=f"{prime}:{units}", units=units)
    if on == "pairs":
        act = m11_on_pairs() if name == "M11" else m23_on_pairs()
    elif on == "heptads":
        act = m23_on_heptads()
    else:
        raise ValidationError(f"unknown domain {on}")
    Hd = act.image_group(H)
    return _witness(
        label, act.group, Hd, ell=prime * units, exact=True, citation=citation,
        G_order=SPORADIC_ORDERS[name], params={"on": on},
    )


def _m12_row(label: str, citation: str) -> FactorizationInstance:
    """M12 = (3^2:Q8).2 · PSL2(11) on 144 cosets."""
    G = mathieu("M12")
    M11 = G.stabilizer(11)

    def keeps_pair(g: Perm) -> bool:
        return {int(g[0]), int(g[1])} == {0, 1}

    H = random_stabilizer(M11, keeps_pair, 144, rng=_rng(), name="(3^2:Q8).2")
    K = _complement(G, 660, H, name="PSL2(11)", predicate=lambda K: K.is_transitive())
    Gd, Hd = _on_cosets(G, H, K)
    return _witness(label, Gd, Hd, ell=144, exact=True, citation=citation, G_order=G.order())


def _optional_row(label: str, name: str, citation: str) -> FactorizationInstance:
    """J2.2 or HS.2 on 100 points with a regular 5^2:4."""
    G = sporadic_optional(name)

    def regular(R: PermGroup) -> bool:
        return R.is_transitive() and is_solvable(R)

    R = random_subgroup_of_order(G, 100, rng=_rng(), predicate=regular, name="5^2:4")
    if R is None:
        raise ConstructionError(f"no regular 5^2:4 found in {name}")
    return _witness(label, G, R, ell=100, exact=True, citation=citation)


# ---------------------------------------------------------------------------
# row dispatch


EXACT_VARIANTS: dict[int, tuple[str, ...]] = {
    31: ("+", "-"),
    39: ("C6xC2", "A4", "D12"),
    40: ("S4", "D24", "D8xC3", "3:D8"),
    43: ("pairs", "heptads"),
    44: ("S4", "D24", "D8xC3", "3:D8", "A4xC2"),
}
EXACT_OUTER: dict[int, tuple[int, ...]] = {12: (1, 2), 31: (1, 2)}


def _cite(table: str, case: int | str, text: str) -> str:
    return f"{table} case {case}: {text}"


def exact_row(case: int, *, outer: int = 1, variant: str | None = None) -> FactorizationInstance:
    """Witness for a row of the exact-factorization table.

    Raises:
        ValidationError: the row or variant has no witness.
    """
    if outer not in EXACT_OUTER.get(case, (1,)):
        raise ValidationError(f"case {case} has no witness with |O| = {outer}")
    variants = EXACT_VARIANTS.get(case)
    if variants is not None:
        variant = variant or variants[0]
        if variant not in variants:
            raise ValidationError(f"case {case} has no variant {variant}", {"variants": list(variants)})
    label = f"T4/case{case}" + (f"/O={outer}" if outer > 1 else "") + (f"/{variant}" if variant else "")

    def cite(text: str) -> str:
        return _cite(T4, case, text)

    if case == 1:
        return _alt_triples_row(label, 8, False, cite("A8 = AGL1(8) · (A5 x 3).2"))
    if case == 2:
        return _a8_s5_row(label, cite("A8 = AΓL1(8) · S5"))
    if case in (3, 4):
        return _pairs_row(label, 5, 24, case == 4, cite("5^2:SL2(3) · A23 (S23)"))
    if case == 5:
        return _alt_triples_row(label, 32, True, cite("A32 = AΓL1(32) · (A29 x 3).2"))
    if case in (6, 7):
        return _pairs_row(label, 7, 48, case == 7, cite("7^2:Q8.S3 · A47 (S47)"))
    if case in (8, 9):
        return _pairs_row(label, 11, 120, case == 9, cite("11^2:SL2(3).5 · A119 (S119)"))
    if case == 12:
        if outer == 2:
            return _pgl2_11_row(label, cite("PGL2(11) = 11:2 · A5"))
        return _line_row(label, 11, 1, 60, cite("PSL2(11) = 11 · A5"))
    if case == 13:
        return _line_row(label, 11, 5, 12, cite("PSL2(11) = 11:5 · A4"), shape="A4")
    if case == 14:
        return _line_row(label, 23, 11, 24, cite("PSL2(23) = 23:11 · S4"), shape="S4")
    if case == 15:
        return _line_row(label, 29, 7, 60, cite("PSL2(29) = 29:7 · A5"))
    if case == 16:
        return _line_row(label, 59, 29, 60, cite("PSL2(59) = 59:29 · A5"))
    if case == 17:
        return _psl3_3_row(label, cite("PSL3(3) = 13:3 · AΓL1(9)"))
    if case == 19:
        return _psl3_8_row(label, cite("PSL3(8).3 = 73:9 · 2^{3+6}:7^2:3"))
    if case == 23:
        return _psl5_2_row(label, cite("PSL5(2) = 31:5 · 2^6:(S3 x PSL3(2))"))
    if case == 24:
        return _psu3_8_row(label, cite("PSU3(8).3^2 = 57:9 · 2^{3+6}:(63:3)"))
    if case == 31:
        assert variant is not None
        if outer == 2:
            return _psp43_outer_row(label, variant, cite(f"PSp4(3).2 = 3{variant}^{{1+2}}:2 · 2^4:A5"))
        return _psp43_row(label, variant, cite(f"PSp4(3) = 3{variant}^{{1+2}} · 2^4:A5"))
    if case == 32:
        return _psp43_q8_row(label, cite("PSp4(3) = 3+^{1+2}:Q8 · S5"))
    if case == 36:
        return _cyclic_regular_row(label, "M11", cite("M11 = C11 · M10"))
    if case == 37:
        return _mathieu_normalizer_row(label, "M11", 11, 5, "pairs", cite("M11 = 11:5 · (3^2:Q8).2"))
    if case == 38:
        return _m12_row(label, cite("M12 = (3^2:Q8).2 · PSL2(11)"))
    if case == 39:
        assert variant is not None
        G = mathieu("M12")
        return _mathieu_regular_row(label, G, variant, G.order(), cite(f"M12 = {variant} · M11"))
    if case == 40:
        assert variant is not None
        return _mathieu_regular_row(
            label, m12_2(), variant, 2 * SPORADIC_ORDERS["M12"], cite(f"M12.2 = {variant} · M11")
        )
    if case == 41:
        return _mathieu_regular_row(
            label, m22_2(), "D22", 2 * SPORADIC_ORDERS["M22"], cite("M22.2 = D22 · PSL3(4).2")
        )
    if case == 42:
        return _cyclic_regular_row(label, "M23", cite("M23 = C23 · M22"))
    if case == 43:
        assert variant is not None
        K = "PSL3(4).2" if variant == "pairs" else "2^4:A7"
        return _mathieu_normalizer_row(label, "M23", 23, 11, variant, cite(f"M23 = 23:11 · {K}"))
    if case == 44:
        assert variant is not None
        G = mathieu("M24")
        return _mathieu_regular_row(label, G, variant, G.order(), cite(f"M24 = {variant} · M23"))
    if case == 45:
        return _optional_row(label, "J2.2", cite("J2.2 = 5^2:4 · G2(2)"))
    if case == 46:
        return _optional_row(label, "HS.2", cite("HS.2 = 5^2:4 · M22.2"))
    raise ValidationError(f"exact-factorization case {case} has no witness", {"case": case})


TYPE2_ROWS = (1, 2, 3, 4, 5, 9, 10, 11, 18)


def type2_row(case: int) -> FactorizationInstance:
    """Witness for a row of the Type II table."""
    label = f"T6/case{case}"

    def cite(text: str) -> str:
        return _cite(T6, case, text)

    if case == 1:
        return _line_row(label, 11, 1, 60, cite("PSL2(11) = C11 · A5, ℓ = 11"))
    if case == 2:
        return pgammal2_16_row()
    if case == 3:
        return _line_row(label, 19, 9, 60, cite("PSL2(19) = 19:9 · A5, ℓ = 171"), exact=False)
    if case == 4:
        return _line_row(label, 29, 7, 60, cite("PSL2(29) = 29:7 · A5, ℓ = 203"))
    if case == 5:
        return _line_row(label, 59, 29, 60, cite("PSL2(59) = 59:29 · A5, ℓ = 1711"))
    if case == 9:
        return _psl5_2_row(label, cite("PSL5(2) = 31:5 · 2^6:(S3 x PSL3(2)), ℓ = 155"))
    if case in (10, 11):
        return _psp43_row(label, "+", cite("PSp4(3) = 3+^{1+2} · 2^4:A5, ℓ = 27"))
    if case == 18:
        return _psu3_3_row(label, cite("PSU3(3) = 3+^{1+2}:8 · PSL2(7), ℓ = 216"))
    raise ValidationError(f"Type II case {case} has no witness", {"case": case})


TYPE3_ROWS = (0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11)


def type3_row(case: int, q: int = 5) -> FactorizationInstance:
    """Witness for a row of the Type III table; q only matters for row 0."""
    label = f"T7/case{case}"

    def cite(text: str) -> str:
        return _cite(T7, case, text)

    if case == 0:
        return _relabel(build_case1(2, q), f"{label}/q={q}", cite("PGL2(q) = C_{q+1} · P1, ℓ = q+1"))
    if case == 1:
        return _line_row(label, 7, 1, 24, cite("PSL2(7) = C7 · S4, ℓ = 7"), shape="S4")
    if case == 2:
        return _line_row(label, 11, 5, 12, cite("PSL2(11) = 11:5 · A4, ℓ = 55"), shape="A4")
    if case == 3:
        return _line_row(label, 23, 11, 24, cite("PSL2(23) = 23:11 · S4, ℓ = 253"), shape="S4")
    if case == 4:
        return _relabel(build_case1(3, 3), label, cite("PSL3(3) = C13 · 3^2:2.S4, ℓ = 13"))
    if case == 5:
        return _psl3_3_row(label, cite("PSL3(3) = 13:3 · AΓL1(9), ℓ = 39"))
    if case == 7:
        return _psl3_8_row(label, cite("PSL3(8).3 = 73:9 · 2^{3+6}:7^2:3, ℓ = 657"))
    if case == 8:
        return _psu3_8_row(label, cite("PSU3(8).3^2 = 57:9 · 2^{3+6}:(63:3), ℓ = 513"))
    if case == 9:
        return _psu42_row(label, 9, cite("PSU4(2) = 2^4:5 · 3+^{1+2}:2.A4, ℓ = 80"))
    if case == 10:
        return _psu42_row(label, 10, cite("PSU4(2) = 2^4:D10 · 3+^{1+2}:2.A4, ℓ = 160"))
    if case == 11:
        return _psu42_row(label, 11, cite("PSU4(2).2 = 2^4:5:4 · 3+^{1+2}:S3, ℓ = 320"))
    raise ValidationError(f"Type III case {case} has no witness", {"case": case})


def exact_family(which: str, **params: int) -> FactorizationInstance:
    """Witness for one of the exact families (i)-(iv) at given parameters."""
    if which == "i":
        n = params.get("n", 6)
        G = symmetric_group(n)
        return _witness(
            f"T5/(i)/n={n}", G, cyclic_group(n), ell=n, exact=True,
            citation=_cite(T5, "(i)", "S_n = C_n · S_{n-1}"), params={"n": n},
        )
    if which == "ii":
        q = params.get("q", 8)
        H = affine_line(q)
        S = symmetric_group(q)
        Hd = ordered_pair_action(S, elements=H.generators, name=H.name)
        Gd = ordered_pair_action(S, name=f"S{q} on pairs")
        return _witness(
            f"T5/(ii)/q={q}", Gd, Hd, ell=q * (q - 1), exact=True,
            citation=_cite(T5, "(ii)", "S_q = AGL1(q) · S_{q-2}"), G_order=math.factorial(q), params={"q": q},
        )
    if which == "iii":
        n, q = params.get("n", 3), params.get("q", 2)
        return _relabel(build_case1(n, q), f"T5/(iii)/n={n},q={q}", _cite(T5, "(iii)", "PGL_n(q) = C · P1"))
    if which == "iv":
        m, q = params.get("m", 3), params.get("q", 2)
        if m < 3 or m % 2 == 0:
            raise ValidationError("family (iv) needs m >= 3 odd", {"m": m})
        return _relabel(
            build_case3(m, q), f"T5/(iv)/m={m},q={q}", _cite(T5, "(iv)", "Sp_2m(q) = q^m:(q^m-1) · O-_2m(q)")
        )
    raise ValidationError(f"unknown exact family {which}", {"known": ["i", "ii", "iii", "iv"]})


# ---------------------------------------------------------------------------
# ℓ(G0) witnesses


ELL_FAMILIES = (
    "A_n", "PSL2(q)", "PSL_n(q)", "PSU_2m(q)", "PSp_2m(q)", "PSp4(q)", "Omega_2m+1(q)", "POmega+_2m(q)",
    "PSL2(7)", "PSL2(11)", "PSU3(3)", "PSU3(8)", "PSp4(3)", "M11", "M12", "M22", "M23", "M24", "J2", "HS",
)


def ell_witness(family: str, **params: int) -> FactorizationInstance:
    """The witness triple of an ℓ-table row.

    Raises:
        ValidationError: no witness is modeled for the row.
        UnavailableGroupError: J2/HS requested without the optional asset.
    """
    label = f"T3/{family}"

    def cite(text: str) -> str:
        return _cite(T3, family, text)

    if family == "A_n":
        inst = exact_family("i", n=params.get("n", 8))
        return _relabel(inst, f"{label}/n={inst.params['n']}", cite("S_n = C_n · S_{n-1}, ℓ = n"))
    if family == "PSL2(q)":
        q = params.get("q", 8)
        return _relabel(build_case1(2, q), f"{label}/q={q}", cite("PGL2(q) = C_{q+1} · P1, ℓ = q+1"))
    if family == "PSL_n(q)":
        n, q = params.get("n", 3), params.get("q", 2)
        return _relabel(build_case1(n, q), f"{label}/n={n},q={q}", cite("PGL_n(q) = C · P1, ℓ = (q^n-1)/(q-1)"))
    if family == "PSU_2m(q)":
        m, q = params.get("m", 2), params.get("q", 2)
        return _relabel(build_case6(m, q), f"{label}/m={m},q={q}", cite("PGU_2m(q) = q^2m:(q^2m-1)/(q+1) · N1"))
    if family == "PSp_2m(q)":
        m, q = params.get("m", 3), params.get("q", 2)
        return _relabel(build_case3(m, q), f"{label}/m={m},q={q}", cite("PSp_2m(q) = q^m:(q^m-1) · O-_2m(q)"))
    if family == "PSp4(q)":
        q = params.get("q", 3)
        return _relabel(build_case7(2, q), f"{label}/q={q}", cite("PGSp4(q) = q^{1+2}:(q^2-1) · N, ℓ = q^3(q^2-1)"))
    if family == "Omega_2m+1(q)":
        m, q = params.get("m", 3), params.get("q", 3)
        return _relabel(build_case7(m, q), f"{label}/m={m},q={q}", cite("SO_2m+1(q) = H · N1-"))
    if family == "POmega+_2m(q)":
        m, q = params.get("m", 4), params.get("q", 2)
        return _relabel(build_case8(m, q), f"{label}/m={m},q={q}", cite("Ω+_2m(q) = q^m:(q^m-1)/d · N1"))
    if family == "PSL2(7)":
        return _relabel(type3_row(1), label, cite("PSL2(7) = C7 · S4, ℓ = 7"))
    if family == "PSL2(11)":
        return _relabel(exact_row(12), label, cite("PSL2(11) = C11 · A5, ℓ = 11"))
    if family == "PSU3(3)":
        return _relabel(type2_row(18), label, cite("PSU3(3) = 3+^{1+2}:8 · PSL2(7), ℓ = 216"))
    if family == "PSU3(8)":
        return _relabel(exact_row(24), label, cite("PSU3(8).3^2 = 57:9 · 2^{3+6}:(63:3), ℓ = 513"))
    if family == "PSp4(3)":
        return _relabel(exact_row(31), label, cite("PSp4(3) = 3+^{1+2} · 2^4:A5, ℓ = 27"))
    if family == "M11":
        return _relabel(exact_row(36), label, cite("M11 = C11 · M10, ℓ = 11"))
    if family == "M12":
        return _relabel(exact_row(39, variant="D12"), label, cite("M12 = D12 · M11, ℓ = 12"))
    if family == "M22":
        return _relabel(exact_row(41), label, cite("M22.2 = D22 · PSL3(4).2, ℓ = 22"))
    if family == "M23":
        return _relabel(exact_row(42), label, cite("M23 = C23 · M22, ℓ = 23"))
    if family == "M24":
        return _relabel(exact_row(44, variant="S4"), label, cite("M24 = S4 · M23, ℓ = 24"))
    if family == "J2":
        return _relabel(exact_row(45), label, cite("J2.2 = 5^2:4 · G2(2), ℓ = 100"))
    if family == "HS":
        return _relabel(exact_row(46), label, cite("HS.2 = 5^2:4 · M22.2, ℓ = 100"))
    raise ValidationError(f"no ℓ witness is modeled for {family}", {"known": list(ELL_FAMILIES)})


def ell_witness_check(family: str, ell: int | None = None, **params: int) -> VerificationReport:
    """verify() on the row's witness, with |H| = ℓ(G0) added as an expectation.

    Minimality of ℓ is not checked.
    """
    inst = ell_witness(family, **params)
    report = verify(inst)
    if ell is not None:
        matched = report.H_order == ell
        report.expectations.append(
            Expectation(key="ell", expected=ell, computed=report.H_order, matched=matched, citation=_cite(T3, family, "ℓ(G0)"))
        )
        if not matched:
            report.verdict = Verdict.FAIL
            logger.warning("%s: |H| = %d but ℓ = %d", inst.label, report.H_order, ell)
    return report
