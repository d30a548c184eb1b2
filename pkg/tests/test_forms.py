"""Test classical forms, isometry groups and geometric domains."""

import galois
import numpy as np
import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from src.factoriza.config import config
from src.factoriza.services.classical_groups import (
    gu_generators,
    omega_plus_generators,
    permutation_group,
    sl_generators,
    so_odd_generators,
    sp_generators,
    su3_generators,
)
from src.factoriza.services.field_core import field_of_order
from src.factoriza.services.forms import (
    DomainKind,
    FormKind,
    TypeSign,
    dickson_invariant,
    enumerate_domain,
    gaussian_binomial,
    involution_type,
    is_isometry,
    minus_forms_domain,
    projective_points,
    random_isometry,
    reflection,
    standard_form,
    subspace_domain,
    symplectic_transvection,
)
from src.factoriza.utils.exceptions import (
    CapExceededError,
    NotInvolutionError,
    NotIsometryError,
    ValidationError,
)


def _sympy_order(G):
    return PermutationGroup([Permutation(g.tolist()) for g in G.generators]).order()


def test_standard_form_parameter_errors():
    """Test illegal form parameters."""
    with pytest.raises(ValidationError, match="even dimension"):
        standard_form(FormKind.SYMPLECTIC, 3, 2)
    with pytest.raises(ValidationError, match="q odd"):
        standard_form(FormKind.QUADRATIC, 5, 2)
    with pytest.raises(ValidationError, match="need a sign"):
        standard_form(FormKind.QUADRATIC, 4, 3)
    with pytest.raises(ValidationError, match="too small"):
        standard_form("hermitian", 1, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_minus_form_has_no_singular_points_in_dimension_two(q):
    """Test that the 2-dimensional minus form is anisotropic."""
    form = standard_form(FormKind.QUADRATIC, 2, q, TypeSign.MINUS)
    P = projective_points(form.GF, 2)
    assert np.all(form.values(P).view(np.ndarray) != 0)


@pytest.mark.parametrize("sign", ["+", "-"])
@pytest.mark.parametrize("dim,q", [(4, 2), (6, 2), (4, 4)])
def test_dickson_invariant_is_additive(sign, dim, q):
    """Test D(gh) = D(g) + D(h) on random isometries."""
    form = standard_form(FormKind.QUADRATIC, dim, q, sign)
    rng = np.random.default_rng(7)
    for _ in range(100):
        g = random_isometry(form, rng, length=int(rng.integers(1, 5)))
        h = random_isometry(form, rng, length=int(rng.integers(1, 5)))
        assert is_isometry(g @ h, form)
        assert dickson_invariant(g @ h, form) == (dickson_invariant(g, form) + dickson_invariant(h, form)) % 2


def test_reflection_has_dickson_invariant_one():
    """Test that a transvection in a nonsingular vector is odd."""
    form = standard_form(FormKind.QUADRATIC, 4, 2, "+")
    GF = form.GF
    v = GF([1, 0, 1, 0])
    assert dickson_invariant(reflection(form, v), form) == 1
    with pytest.raises(ValidationError, match="nonsingular"):
        reflection(form, GF([1, 0, 0, 0]))


def test_dickson_invariant_rejects_non_isometry():
    """Test the isometry check of the Dickson invariant."""
    form = standard_form(FormKind.QUADRATIC, 4, 2, "+")
    g = form.GF([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(NotIsometryError):
        dickson_invariant(g, form)
    with pytest.raises(ValidationError):
        dickson_invariant(g, standard_form(FormKind.QUADRATIC, 4, 3, "+"))


def _unipotent(S):
    GF = galois.GF(2)
    I, Z = np.eye(2, dtype=int), np.zeros((2, 2), dtype=int)
    return GF(np.block([[I, np.array(S)], [Z, I]]))


@pytest.mark.parametrize(
    "S,expected",
    [([[0, 1], [1, 0]], "a2"), ([[1, 0], [0, 1]], "c2"), ([[1, 0], [0, 0]], "b1")],
)
def test_involution_types(S, expected):
    """Test the a/b/c classification of involutions of Sp4(2)."""
    form = standard_form(FormKind.SYMPLECTIC, 4, 2)
    assert str(involution_type(_unipotent(S), form)) == expected


def test_involution_type_errors():
    """Test non-involutions and non-isometries."""
    form = standard_form(FormKind.SYMPLECTIC, 4, 2)
    GF = form.GF
    with pytest.raises(NotInvolutionError):
        involution_type(GF.Identity(4), form)
    x = GF.Identity(4)
    x[0, 1] = 1
    with pytest.raises(NotIsometryError):
        involution_type(x, form)


def test_transvection_is_b1():
    """Test that a symplectic transvection is a b1 involution."""
    form = standard_form(FormKind.SYMPLECTIC, 6, 2)
    GF = form.GF
    t = symplectic_transvection(form, GF([1, 0, 0, 0, 1, 0]), GF(1))
    assert str(involution_type(t, form)) == "b1"


def test_gaussian_binomial():
    """Test counts of subspaces."""
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(5, 2, 2) == 155
    assert subspace_domain(galois.GF(2), 5, 2).size == 155


def test_domain_sizes():
    """Test enumerated domains against their closed forms."""
    assert enumerate_domain(standard_form("hermitian", 4, 2), DomainKind.TOTALLY_SINGULAR, k=2).size == 27
    assert enumerate_domain(standard_form("hermitian", 3, 3), DomainKind.TOTALLY_SINGULAR).size == 28
    assert enumerate_domain(standard_form("symplectic", 4, 3), DomainKind.TOTALLY_SINGULAR).size == 40
    assert enumerate_domain(standard_form("quadratic", 4, 2, "+"), DomainKind.NONSINGULAR_POINTS).size == 6
    assert enumerate_domain(standard_form("hermitian", 4, 2), DomainKind.NONDEGENERATE_POINTS).size == 40


def test_domain_without_form_needs_field():
    """Test the arguments of a formless domain."""
    with pytest.raises(ValidationError):
        enumerate_domain(None, DomainKind.PROJECTIVE_POINTS)


def test_projective_points_small():
    """Test the point sets of the line and the plane, whose last block has no free coordinates."""
    GF = galois.GF(2)
    assert projective_points(GF, 1).tolist() == [[1]]
    assert projective_points(GF, 2).tolist() == [[1, 0], [1, 1], [0, 1]]
    assert projective_points(galois.GF(3), 3).shape == (13, 3)


def test_domain_cap(monkeypatch):
    """Test that a domain above DOMAIN_CAP is refused."""
    monkeypatch.setattr(config, "DOMAIN_CAP", 10)
    with pytest.raises(CapExceededError, match="projective point set"):
        projective_points(galois.GF(3), 3)


def test_identity_permutation():
    """Test that the identity matrix acts trivially."""
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=galois.GF(3), dim=3)
    assert np.array_equal(dom.permutation(galois.GF(3).Identity(3)), np.arange(13))
    assert dom.fixed_count(galois.GF(3).Identity(3)) == 13


def test_sl3_2_on_points():
    """Test PSL3(2) on the Fano plane, with sympy as oracle."""
    F = field_of_order(2)
    dom = enumerate_domain(None, DomainKind.PROJECTIVE_POINTS, GF=F.GF, dim=3)
    G = permutation_group(dom, sl_generators(3, F))
    assert G.order() == 168
    assert _sympy_order(G) == 168


@pytest.mark.parametrize(
    "kind,dim,q,sign,domain,k,order",
    [
        ("symplectic", 4, 2, None, DomainKind.PROJECTIVE_POINTS, 1, 720),
        ("symplectic", 4, 3, None, DomainKind.PROJECTIVE_POINTS, 1, 25920),
        ("quadratic", 4, 2, "+", DomainKind.PROJECTIVE_POINTS, 1, 36),
        ("hermitian", 4, 2, None, DomainKind.TOTALLY_SINGULAR, 2, 25920),
        ("hermitian", 3, 3, None, DomainKind.TOTALLY_SINGULAR, 1, 6048),
        ("quadratic", 5, 3, None, DomainKind.TOTALLY_SINGULAR, 1, 51840),
    ],
)
def test_isometry_group_orders(kind, dim, q, sign, domain, k, order):
    """Test the orders of the classical groups induced on point sets."""
    form = standard_form(kind, dim, q, sign)
    dom = enumerate_domain(form, domain, k=k)
    if kind == "symplectic":
        gens = sp_generators(form)
    elif kind == "quadratic" and dim % 2 == 0:
        gens = omega_plus_generators(form)
    elif kind == "quadratic":
        gens = so_odd_generators(form)
    elif dim == 3:
        gens = su3_generators(form)
    else:
        gens = gu_generators(form)
    assert all(is_isometry(g, form) for g in gens)
    assert permutation_group(dom, gens).order() == order


def test_minus_forms_domain():
    """Test the Sp4(2)-orbit of minus-type forms and its labelled double cover."""
    form = standard_form(FormKind.SYMPLECTIC, 4, 2)
    gens = sp_generators(form)
    plain = minus_forms_domain(form, gens)
    assert plain.size == 6
    labelled = minus_forms_domain(form, gens, labelled=True)
    assert labelled.size == 12
    G = permutation_group(labelled, gens)
    assert G.is_transitive()
    assert G.order() == 720


def test_minus_forms_domain_needs_even_symplectic():
    """Test the form check of the minus-form domain."""
    form = standard_form(FormKind.SYMPLECTIC, 4, 3)
    with pytest.raises(ValidationError):
        minus_forms_domain(form, sp_generators(form))
