"""Builders for the solvable factors of the Type I factorizations.

Each builder returns a FactorizationInstance: the factor H as a permutation
group on Δ = G/K, the expected values with their table citations, the
element classes whose fixed points are profiled and, where the factor
depends on a choice of invariant summand, the alternatives.

Cases 5 and 9 are special versions of Cases 7 and 8 and are built by them.
"""

import dataclasses
import logging
import math
from typing import Any, Callable

import numpy as np

from src.factoriza.services.classical_groups import (
    UnipotentRadical,
    block_diag,
    elementary,
    gl_generators,
    gu_generators,
    levi,
    omega_plus_generators,
    permutation_group,
    sl_generators,
    so_odd_center_generators,
    so_odd_generators,
    so_odd_radical_generators,
    sp_generators,
    unipotent_radical,
)
from src.factoriza.services.factorization import (
    FactorizationInstance,
    FixClass,
    Summand,
    classify_by,
)
from src.factoriza.services.field_core import field_of_order
from src.factoriza.services.forms import (
    DomainKind,
    FormKind,
    GeometricDomain,
    TypeSign,
    enumerate_domain,
    minus_forms_domain,
    standard_form,
)
from src.factoriza.services.formula import (
    order_pgl,
    order_psl,
    order_sp,
)
from src.factoriza.services.matrix_core import (
    Mat,
    Subspace,
    invariant_summands,
    matrix_power,
    rank,
    singer,
    subspace_from_vectors,
)
from src.factoriza.services.perm_engine import PermGroup, coset_action
from src.factoriza.utils.exceptions import ConstructionError, ValidationError

logger = logging.getLogger(__name__)

# G itself is carried along (and its order checked) up to this degree
G_DEGREE_CAP = 1200

T2 = "T2 (Type I factors)"


def _cite(row: str, text: str) -> str:
    return f"{row}: {text}"


def _maybe_group(domain: Any, gens: list[Mat], name: str) -> PermGroup | None:
    if domain.size > G_DEGREE_CAP:
        return None
    return permutation_group(domain, gens, name=name)


def _smallest_prime(n: int) -> int:
    return next(p for p in range(2, n + 1) if n % p == 0)


# ---------------------------------------------------------------------------
# summands of an abelian radical under a Levi Singer cycle


def _full_space(radical: UnipotentRadical) -> Subspace:
    GF = radical.small.GF
    return subspace_from_vectors(GF, GF.Identity(radical.dim))


def _ordered_summands(
    radical: UnipotentRadical, A: Mat, dim: int, prefer: Callable[[Subspace], bool] | None = None
) -> list[Subspace]:
    """dim-dimensional irreducible summands of U under S -> conj(A)^T S A.

    Summands satisfying ``prefer`` come first; the order is otherwise the
    deterministic one of invariant_summands.

    Raises:
        ConstructionError: no summand of that dimension.
    """
    R = radical.levi_action(A)
    found = invariant_summands(R, _full_space(radical), dim)
    if not found:
        raise ConstructionError(f"no invariant summand of dimension {dim}", {"radical_dim": radical.dim})
    if prefer is not None:
        found = sorted(found, key=lambda W: not prefer(W))
    return found


def _summand_factor(radical: UnipotentRadical, W: Subspace, torus: list[Mat]) -> list[Mat]:
    return radical.generators(W.basis) + torus


def _rank_classes(
    radical: UnipotentRadical, W: Subspace, domain: Any, predictions: dict[str, int]
) -> list[FixClass]:
    """Nontrivial elements of W grouped by rank(u - 1) = rank(S)."""
    pairs = []
    for S, u in radical.iter_elements(W.basis):
        r = rank(S)
        if r:
            pairs.append((f"rank {r}", domain.permutation(u)))
    return classify_by(pairs, predictions)


def _alternatives(
    radical: UnipotentRadical,
    summands: list[Subspace],
    chosen: int,
    torus: list[Mat],
    domain: Any,
) -> list[Summand]:
    out = []
    for i, W in enumerate(summands):
        if i == chosen:
            continue
        H = permutation_group(domain, _summand_factor(radical, W, torus), name=f"W{i}:C")
        out.append(Summand(index=i, dimension=W.dim, H=H))
    return out


def _select(summands: list[Subspace], index: int) -> Subspace:
    if not 0 <= index < len(summands):
        raise ValidationError(
            f"summand index {index} out of range", {"available": len(summands)}
        )
    return summands[index]


# ---------------------------------------------------------------------------
# Case 1: Singer cycles


def build_case1(n: int, q: int) -> FactorizationInstance:
    """PGL_n(q) = Singer · P_1 on projective points; H is regular."""
    if n < 2:
        raise ValidationError("Case 1 needs n >= 2", {"n": n})
    F = field_of_order(q)
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=F.GF, dim=n)
    ell = (q**n - 1) // (q - 1)
    H = permutation_group(dom, [singer(n, F).c], name=f"C{ell}")
    G = _maybe_group(dom, gl_generators(n, F), f"PGL{n}({q})")
    d = math.gcd(n, q - 1)
    expect: dict[str, Any] = {
        "domain_size": ell,
        "H_order": ell,
        "transitive": True,
        "exact": True,
        "stabilizer_order": 1,
    }
    citations = {
        "H_order": _cite(T2, "case 1, ℓ = (q^n-1)/(q-1)"),
        "exact": "T5 (iii): PGL_n(q) = C_{(q^n-1)/(q-1)} P_1",
        "domain_size": "projective points of GF(q)^n",
    }
    if G is not None:
        expect["G_order"] = order_pgl(n, q)
        citations["G_order"] = "|PGL_n(q)|"
    return FactorizationInstance(
        label=f"T2/case1/n={n},q={q}",
        H=H,
        G=G,
        kernel_order=q - 1,
        expect=expect,
        citations=citations,
        socle_orders=(ell // d, ell),
        params={"case": 1, "n": n, "q": q},
    )


# ---------------------------------------------------------------------------
# Case 2: PSL_4(q) = (q^3:(q^3-1)/(2,q-1)) · PSp_4(q).a


def build_case2(q: int, negative_control: bool = False) -> FactorizationInstance:
    """H = U:<t> in the point stabilizer of PSL_4(q), K the symplectic subgroup.

    Δ is the coset space of K. With ``negative_control`` H keeps only two of
    the three root directions of U, which cannot be transitive.
    """
    F = field_of_order(q)
    GF = F.GF
    points = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=GF, dim=4)
    g2 = math.gcd(2, q - 1)
    t = block_diag(GF, GF.Identity(1), matrix_power(singer(3, F).c, g2))
    G = permutation_group(points, sl_generators(4, F) + [t], name=f"PSL4({q})" + (".2" if q % 4 == 1 else ""))

    form = standard_form(FormKind.SYMPLECTIC, 4, q)
    k_gens = sp_generators(form)
    if q % 2:
        s = GF.Identity(4)
        s[0, 0] = s[1, 1] = GF(F.primitive)
        k_gens.append(s)
    K = permutation_group(points, k_gens, name=f"PGSp4({q})")
    action = coset_action(G, K)

    basis = F.prime_basis()
    directions = (1, 2) if negative_control else (1, 2, 3)
    roots = [elementary(GF, 4, i, 0, GF(lam)) for i in directions for lam in basis]
    if negative_control:
        torus = block_diag(GF, GF.Identity(1), singer(2, F).c, GF.Identity(1))
    else:
        torus = t
    H = action.image_group(permutation_group(points, roots + [torus]), name="U:T")

    degree = q * q * (q**3 - 1) // g2
    ell = q**3 * (q**3 - 1) // g2
    label = f"T2/case2/q={q}"
    if negative_control:
        return FactorizationInstance(
            label=label + "/control",
            H=H,
            expect={"transitive": False},
            citations={"transitive": "a solvable factor must contain the full unipotent radical"},
            params={"case": 2, "q": q, "control": "partial radical"},
        )
    extension = 2 if q % 4 == 1 else 1
    return FactorizationInstance(
        label=label,
        H=H,
        G=action.group,
        expect={
            "domain_size": degree,
            "H_order": ell,
            "transitive": True,
            "exact": False,
            "stabilizer_order": q,
            "G_order": order_psl(4, q) * extension,
        },
        citations={
            "H_order": _cite(T2, "case 2, ℓ = q^3(q^3-1)/(2,q-1)"),
            "stabilizer_order": "|H ∩ K| = q",
            "G_order": "G_1 = PSL_4(q), or PSL_4(q).2 when q ≡ 1 mod 4",
        },
        socle_orders=(ell // extension, degree),
        notes=[f"Δ = cosets of PGSp4({q}) ∩ G, degree {action.degree}"],
        params={"case": 2, "q": q},
    )


# ---------------------------------------------------------------------------
# Case 3 and 4: Sp_2m(q) = (q^m:(q^m-1)) · O^-_2m(q), q even


def _has_diagonal(radical: UnipotentRadical) -> Callable[[Subspace], bool]:
    diag = [k for k, (_kind, i, j) in enumerate(radical.slots) if i == j]

    def test(W: Subspace) -> bool:
        return bool(np.any(W.basis.view(np.ndarray)[:, diag] != 0))

    return test


def build_case3(
    m: int, q: int, summand_index: int = 0, negative_control: bool = False
) -> FactorizationInstance:
    """H = W:C in the stabilizer of a maximal totally isotropic subspace.

    For m odd Δ is the labelled form space G/Ω^-, where H is regular. For m
    even exactness fails, and Δ is the form space G/O^-, where H is
    transitive with point stabilizers of order 2. Fixed points of W are
    always counted on G/O^-.
    """
    if q % 2 or m < 2:
        raise ValidationError("Case 3 needs q even and m >= 2", {"m": m, "q": q})
    form = standard_form(FormKind.SYMPLECTIC, 2 * m, q)
    gens = sp_generators(form)
    labelled = m % 2 == 1
    dom = minus_forms_domain(form, gens, labelled=labelled)
    unlabelled = dataclasses.replace(dom, labelled=False)

    radical = unipotent_radical(form)
    c = singer(m, form.F).c
    summands = _ordered_summands(radical, c, m, prefer=_has_diagonal(radical))
    W = _select(summands, summand_index)
    ell = q**m * (q**m - 1)

    if negative_control:
        r = _smallest_prime(q**m - 1)
        sub = [levi(form, matrix_power(c, r))]
        H = permutation_group(dom, _summand_factor(radical, W, sub), name="W:C'")
        return FactorizationInstance(
            label=f"T2/case3/m={m},q={q}/control",
            H=H,
            expect={"transitive": False},
            citations={"transitive": "a proper subgroup of the torus is too small"},
            params={"case": 3, "m": m, "q": q, "control": f"torus index {r}"},
        )

    torus = [levi(form, c)]
    H = permutation_group(dom, _summand_factor(radical, W, torus), name=f"{q}^{m}:{q**m - 1}")
    fix_pred = q**m // 2
    fix_classes = _rank_classes(radical, W, unlabelled, {f"rank {m}": fix_pred})
    size = dom.size
    expect: dict[str, Any] = {
        "domain_size": size,
        "H_order": ell,
        "transitive": True,
        "exact": labelled,
        "stabilizer_order": ell // size,
        f"fix:rank {m}": fix_pred,
        f"census:rank {m}": q**m - 1,
    }
    citations = {
        "H_order": _cite(T2, "case 3, ℓ = q^m(q^m-1)"),
        "exact": "T5 (iv): exact for m >= 3 odd; no exact factorization when m = 2",
        f"fix:rank {m}": "fix(z) = q^m/2 on the cosets of O^-_2m(q)",
        f"census:rank {m}": "every nontrivial element of W has rank m",
    }
    G = _maybe_group(dom, gens, f"Sp{2 * m}({q})")
    if G is not None:
        expect["G_order"] = order_sp(2 * m, q)
        citations["G_order"] = "|Sp_2m(q)|"
    return FactorizationInstance(
        label=f"T2/case3/m={m},q={q}",
        H=H,
        G=G,
        expect=expect,
        citations=citations,
        fix_classes=fix_classes,
        summands=_alternatives(radical, summands, summand_index, torus, dom),
        socle_orders=(ell, size),
        notes=[f"Δ = {'G/Ω^-' if labelled else 'G/O^-'}, summand {summand_index} of {len(summands)}"],
        params={"case": 3, "m": m, "q": q, "summand": summand_index},
    )


def build_case4(q: int, summand_index: int = 0) -> FactorizationInstance:
    """Sp_4(q) with the graph automorphism: Case 3 at m = 2."""
    inst = build_case3(2, q, summand_index)
    inst.label = f"T2/case4/q={q}"
    inst.citations["H_order"] = _cite(T2, "case 4, ℓ = q^2(q^2-1)")
    inst.notes.append("built as Case 3 with m = 2; the graph automorphism of Sp_4(q) swaps the two parabolics")
    inst.params = {"case": 4, "q": q, "summand": summand_index}
    return inst


# ---------------------------------------------------------------------------
# Case 6: GU_2m(q) = (q^2m:(q^2m-1)/(q+1)) · N_1


def build_case6(m: int, q: int, summand_index: int = 0) -> FactorizationInstance:
    """H = W:C on the nondegenerate points of the unitary space GF(q^2)^2m."""
    if m < 2:
        raise ValidationError("Case 6 needs m >= 2", {"m": m})
    form = standard_form(FormKind.HERMITIAN, 2 * m, q)
    dom = enumerate_domain(form, DomainKind.NONDEGENERATE_POINTS)
    radical = unipotent_radical(form)
    c = singer(m, form.F).c
    summands = _ordered_summands(radical, c, 2 * m)
    W = _select(summands, summand_index)
    torus = [levi(form, c)]
    H = permutation_group(dom, _summand_factor(radical, W, torus), name="W:C")

    ell = q ** (2 * m) * (q ** (2 * m) - 1) // (q + 1)
    low = (q ** (2 * m) - 1) // (q + 1)
    fix_pred = q ** (2 * m - 1) * (q - 1)
    fix_classes = _rank_classes(radical, W, dom, {f"rank {m - 1}": fix_pred, f"rank {m}": 0})
    size = q ** (2 * m - 1) * (q ** (2 * m) - 1) // (q + 1)
    expect: dict[str, Any] = {
        "domain_size": size,
        "H_order": ell,
        "transitive": True,
        "exact": False,
        "stabilizer_order": ell // size,
        f"census:rank {m - 1}": low,
        f"census:rank {m}": q ** (2 * m) - 1 - low,
    }
    G = _maybe_group(dom, gu_generators(form), f"PGU{2 * m}({q})")
    return FactorizationInstance(
        label=f"T2/case6/m={m},q={q}",
        H=H,
        G=G,
        kernel_order=q + 1,
        expect=expect,
        citations={
            "H_order": _cite(T2, "case 6, ℓ = q^2m(q^2m-1)/(q+1)"),
            f"fix:rank {m - 1}": "fix(z) = q^(2m-1)(q-1)",
            f"census:rank {m - 1}": "W has (q^2m-1)/(q+1) elements of rank m-1",
        },
        fix_classes=fix_classes,
        summands=_alternatives(radical, summands, summand_index, torus, dom),
        notes=["orders are taken modulo the q+1 scalars of GU"],
        params={"case": 6, "m": m, "q": q, "summand": summand_index},
    )


# ---------------------------------------------------------------------------
# Case 7: SO_2m+1(q) = (q^(m(m+1)/2):(q^m-1)/e) · N_1^-, q odd


def case7_e(m: int, q: int) -> int:
    """e = 2 iff q^m ≡ 3 mod 4."""
    return 2 if q**m % 4 == 3 else 1


def build_case7(m: int, q: int, negative_control: bool = False) -> FactorizationInstance:
    """H = U:D with the full radical U and D of index e in the Levi torus.

    The negative control replaces D by an even-order subgroup D' of the
    torus: the whole torus's 2-part when e = 2, its index-2 subgroup when
    e = 1.
    """
    if q % 2 == 0 or m < 2:
        raise ValidationError("Case 7 needs q odd and m >= 2", {"m": m, "q": q})
    form = standard_form(FormKind.QUADRATIC, 2 * m + 1, q)
    dom = enumerate_domain(form, DomainKind.MINUS_POINTS)
    u_gens = so_odd_radical_generators(form)

    U = permutation_group(dom, u_gens, name="U")
    Z = permutation_group(dom, so_odd_center_generators(form), name="Z(U)")
    if U.order() != q ** (m * (m + 1) // 2) or Z.order() != q ** (m * (m - 1) // 2):
        raise ConstructionError(
            "radical orders disagree with q^(m(m+1)/2) and q^(m(m-1)/2)",
            {"U": U.order(), "Z": Z.order()},
        )

    e = case7_e(m, q)
    c = singer(m, form.F).c
    N = q**m - 1
    ell = q ** (m * (m + 1) // 2) * N // e
    size = q**m * N // 2
    label = f"T2/case{'5' if m == 2 else '7'}/m={m},q={q}"

    if negative_control:
        two_part = N & -N
        power = N // two_part if e == 2 else 2
        H = permutation_group(dom, u_gens + [levi(form, matrix_power(c, power))], name="U:D'")
        return FactorizationInstance(
            label=label + "/control",
            H=H,
            expect={"transitive": False},
            citations={"transitive": "G = HK only when |D| is odd"},
            params={"case": 7, "m": m, "q": q, "control": f"|D'| = {N // power}"},
        )

    H = permutation_group(dom, u_gens + [levi(form, matrix_power(c, e))], name="U:D")
    expect: dict[str, Any] = {
        "domain_size": size,
        "H_order": ell,
        "transitive": True,
        "exact": False,
        "stabilizer_order": ell // size,
    }
    citations = {
        "H_order": _cite(T2, "case 7, ℓ = (1/e) q^(m(m+1)/2)(q^m-1)"),
        "domain_size": "|G:K| = q^m(q^m-1)/2",
    }
    G = _maybe_group(dom, so_odd_generators(form), f"SO{2 * m + 1}({q})")
    notes = [f"e = {e}"]
    if m == 2:
        citations["H_order"] = _cite(T2, "case 5, ℓ = q^3(q^2-1)")
        notes.append("Case 5 is Case 7 at m = 2")
    return FactorizationInstance(
        label=label,
        H=H,
        G=G,
        expect=expect,
        citations=citations,
        notes=notes,
        params={"case": 5 if m == 2 else 7, "m": m, "q": q, "e": e},
    )


# ---------------------------------------------------------------------------
# Case 8: Ω^+_2m(q) = (q^m:(q^m-1)/(2,q-1)) · N_1


def _case8_domain(form: Any, square_class: int) -> GeometricDomain:
    if form.q % 2 == 0:
        return enumerate_domain(form, DomainKind.NONSINGULAR_POINTS)
    return enumerate_domain(form, DomainKind.NONDEGENERATE_POINTS, square_class=square_class)


def build_case8(m: int, q: int, summand_index: int = 0, case: int = 8) -> FactorizationInstance:
    """H = W:C, W an m-dimensional summand of the alternating radical.

    ``case`` is 9 when the instance stands for the Ω+8(q) row.

    For q odd the class of Q(v) on Δ is not fixed in advance: the square
    class is tried first and the non-square class only if H is intransitive
    there.
    """
    if m < 4:
        raise ValidationError("Case 8 needs m >= 4", {"m": m})
    form = standard_form(FormKind.QUADRATIC, 2 * m, q, TypeSign.PLUS)
    radical = unipotent_radical(form)
    c = singer(m, form.F).c
    summands = _ordered_summands(radical, c, m)
    W = _select(summands, summand_index)
    torus = [levi(form, c)]
    factor = _summand_factor(radical, W, torus)

    square_class = 0
    dom = _case8_domain(form, square_class)
    H = permutation_group(dom, factor, name="W:C")
    if q % 2 and not H.is_transitive():
        logger.info("case 8: square class 0 intransitive, trying non-squares")
        square_class = 1
        dom = _case8_domain(form, square_class)
        H = permutation_group(dom, factor, name="W:C")

    g2 = math.gcd(2, q - 1)
    ell = q**m * (q**m - 1) // g2
    size = dom.size
    expect: dict[str, Any] = {
        "domain_size": size,
        "H_order": ell,
        "transitive": True,
        "exact": False,
        "stabilizer_order": ell // size,
    }
    citations = {
        "H_order": _cite(T2, "case 8, ℓ = q^m(q^m-1)/(2,q-1)"),
    }
    if m % 2 == 0:
        low = (q**m - 1) // (q + 1)
        fix_pred = q ** (m - 1) * (q * q - 1) // g2
        predictions = {f"rank {m - 2}": fix_pred, f"rank {m}": 0}
        expect[f"census:rank {m - 2}"] = low
        expect[f"census:rank {m}"] = q**m - 1 - low
        citations[f"fix:rank {m - 2}"] = "fix(z) = q^(m-1)(q^2-1)/(2,q-1)"
        citations[f"census:rank {m - 2}"] = "W contains (q^m-1)/(q+1) elements of rank m-2"
    else:
        predictions = {f"rank {m - 1}": q ** (m - 1) * (q - 1) // g2}
        expect[f"census:rank {m - 1}"] = q**m - 1
        citations[f"census:rank {m - 1}"] = "every nontrivial element of W has rank m-1"
        citations[f"fix:rank {m - 1}"] = "fix(z) = q^(m-1)(q-1)/(2,q-1)"
    fix_classes = _rank_classes(radical, W, dom, predictions)
    G = _maybe_group(dom, omega_plus_generators(form), f"Ω+{2 * m}({q})")
    return FactorizationInstance(
        label=f"T2/case{case}/m={m},q={q}",
        H=H,
        G=G,
        kernel_order=g2,
        expect=expect,
        citations=citations,
        fix_classes=fix_classes,
        summands=_alternatives(radical, summands, summand_index, torus, dom),
        notes=[f"square class {square_class}"] if q % 2 else [],
        params={"case": case, "m": m, "q": q, "summand": summand_index},
    )


def build_case(case: int, **params: Any) -> FactorizationInstance:
    """Dispatch on the Type I case number (5 and 9 are folded into 7 and 8).

    Raises:
        ValidationError: unknown case or missing parameters.
    """
    try:
        if case == 1:
            return build_case1(params["n"], params["q"])
        if case == 2:
            return build_case2(params["q"], params.get("negative_control", False))
        if case == 3:
            return build_case3(
                params["m"], params["q"], params.get("summand", 0), params.get("negative_control", False)
            )
        if case == 4:
            return build_case4(params["q"], params.get("summand", 0))
        if case == 5:
            return build_case7(2, params["q"], params.get("negative_control", False))
        if case == 6:
            return build_case6(params["m"], params["q"], params.get("summand", 0))
        if case == 7:
            return build_case7(params["m"], params["q"], params.get("negative_control", False))
        if case == 8:
            return build_case8(params.get("m", 4), params["q"], params.get("summand", 0))
        if case == 9:
            return build_case8(4, params["q"], params.get("summand", 0), case=9)
    except KeyError as exc:
        raise ValidationError(f"case {case} needs parameter {exc.args[0]}") from exc
    raise ValidationError(f"unknown Type I case {case}", {"case": case})

