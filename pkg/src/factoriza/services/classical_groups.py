"""Generator sets of the classical groups and their abelian unipotent radicals.

Every group is generated by a Levi subgroup of a maximal parabolic together
with root elements of the radical and of the opposite radical. Matrices act
on row vectors in the bases fixed by ``forms.standard_form``.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from src.factoriza.services.field_core import FieldTable
from src.factoriza.services.forms import (
    ClassicalForm,
    FormKind,
    GeometricDomain,
    QuadraticFormDomain,
    TypeSign,
    assert_isometries,
)
from src.factoriza.services.matrix_core import Mat, rank
from src.factoriza.services.perm_engine import PermGroup
from src.factoriza.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def elementary(GF: Any, n: int, i: int, j: int, lam: Any) -> Mat:
    """I + lam E_ij."""
    g = GF.Identity(n)
    g[i, j] += lam
    return g


def sl_generators(n: int, F: FieldTable) -> list[Mat]:
    """Adjacent transvections with F_p-basis coefficients."""
    GF = F.GF
    gens = []
    for i in range(n - 1):
        for lam in F.prime_basis():
            gens.append(elementary(GF, n, i, i + 1, GF(lam)))
            gens.append(elementary(GF, n, i + 1, i, GF(lam)))
    return gens


def gl_generators(n: int, F: FieldTable) -> list[Mat]:
    gens = sl_generators(n, F)
    if F.q > 2:
        t = F.GF.Identity(n)
        t[0, 0] = F.GF(F.primitive)
        gens.append(t)
    return gens


def block_diag(GF: Any, *blocks: Mat) -> Mat:
    size = sum(int(b.shape[0]) for b in blocks)
    out = GF.Zeros((size, size))
    at = 0
    for b in blocks:
        k = int(b.shape[0])
        out[at : at + k, at : at + k] = b
        at += k
    return out


def levi(form: ClassicalForm, A: Mat) -> Mat:
    """Levi element of the stabilizer of <e_1..e_m> acting as A on that space.

    diag(A, A^-T) for symplectic and even quadratic forms, diag(A, conj(A)^-T)
    for even hermitian forms, diag(A, A^-T, 1) for odd quadratic forms.
    """
    GF = form.GF
    dual = np.linalg.inv(form.conj(A)).T
    if form.kind is FormKind.QUADRATIC and form.dim % 2:
        return block_diag(GF, A, dual, GF.Identity(1))
    if form.dim % 2:
        raise ValidationError("odd-dimensional hermitian Levi factors are built by su3_generators")
    return block_diag(GF, A, dual)


def _swap(form: ClassicalForm) -> Mat:
    """e_i <-> f_i, fixing the odd basis vector."""
    GF = form.GF
    m = form.m
    s = GF.Zeros((form.dim, form.dim))
    for i in range(m):
        s[i, m + i] = 1
        s[m + i, i] = 1
    if form.dim % 2:
        s[2 * m, 2 * m] = 1
    return s


# ---------------------------------------------------------------------------
# abelian radicals


@dataclass(eq=False)
class UnipotentRadical:
    """The abelian radical {u(S)} of the stabilizer of <e_1..e_m>.

    u(S) sends f_i to f_i + sum_j S_ij e_j. S runs over symmetric matrices
    (symplectic), alternating matrices (plus-type quadratic) or matrices with
    S + conj(S)^T = 0 (hermitian). Coordinates live over GF(q) even when the
    matrices live over GF(q^2).
    """

    form: ClassicalForm
    small: FieldTable
    basis: list[Mat] = field(repr=False)
    slots: list[tuple[int, int, int]] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.small.q**self.dim

    def matrix(self, S: Mat) -> Mat:
        GF = self.form.GF
        m = self.form.m
        g = GF.Identity(self.form.dim)
        g[m:, :m] = S
        return g

    def combination(self, coords: Any) -> Mat:
        """S = sum_k coords_k basis_k for small-field coordinates."""
        GF = self.form.GF
        S = GF.Zeros((self.form.m, self.form.m))
        for c, B in zip(np.asarray(coords, dtype=np.int64), self.basis):
            if c:
                S = S + self._lift(int(c)) * B
        return S

    def element(self, coords: Any) -> Mat:
        return self.matrix(self.combination(coords))

    def _lift(self, c: int) -> Any:
        ext = self.form.ext
        GF = self.form.GF
        return GF(int(ext.embed[c])) if ext is not None else GF(c)

    def coordinates(self, S: Mat) -> Any:
        """Small-field coordinates of a radical matrix S."""
        ext = self.form.ext
        out = np.zeros(self.dim, dtype=np.int64)
        for k, (kind, i, j) in enumerate(self.slots):
            x = S[i, j]
            if ext is None:
                out[k] = int(x)
                continue
            if kind == 0:
                out[k] = int(ext.to_small(x / self.form.GF(ext.skew_unit()))[()])
            else:
                b, c = ext.coordinates(x)
                out[k] = int(ext.to_small(b if kind == 1 else c)[()])
        return self.small.GF(out)

    def levi_action(self, A: Mat) -> Mat:
        """Small-field matrix of S -> conj(A)^T S A on coordinates (rows)."""
        Abar_t = self.form.conj(A).T
        rows = [self.coordinates(Abar_t @ B @ A) for B in self.basis]
        return self.small.GF(np.stack([r.view(np.ndarray) for r in rows]))

    def generators(self, coords_basis: Any) -> list[Mat]:
        """Matrices generating the additive group spanned by the given rows."""
        out = []
        for row in coords_basis:
            for lam in self.small.prime_basis():
                out.append(self.element((self.small.GF(lam) * row).view(np.ndarray)))
        return out

    def iter_elements(self, coords_basis: Any) -> Iterator[tuple[Mat, Mat]]:
        """(S, u(S)) for every element of the span of coords_basis."""
        GF = self.small.GF
        k = int(coords_basis.shape[0])
        for combo in itertools.product(range(self.small.q), repeat=k):
            vec = GF(np.array(combo, dtype=np.int64)) @ coords_basis if k else GF.Zeros(self.dim)
            S = self.combination(vec.view(np.ndarray))
            yield S, self.matrix(S)


def unipotent_radical(form: ClassicalForm) -> UnipotentRadical:
    """Radical of P_m for Sp_2m, O+_2m or GU_2m in the standard basis."""
    if form.dim % 2:
        raise ValidationError("the P_m radical is abelian only for even dimension")
    m = form.m
    if form.kind is FormKind.QUADRATIC and form.sign is not TypeSign.PLUS:
        raise ValidationError("quadratic radicals are built for plus-type forms")
    GF = form.GF
    basis: list[Mat] = []
    slots: list[tuple[int, int, int]] = []
    if form.kind is FormKind.HERMITIAN:
        ext = form.ext
        assert ext is not None
        small = ext.small
        theta = GF(ext.skew_unit())
        xi = GF(ext.xi)
        for i in range(m):
            B = GF.Zeros((m, m))
            B[i, i] = theta
            basis.append(B)
            slots.append((0, i, i))
        for i, j in itertools.combinations(range(m), 2):
            for kind, a in ((1, GF(1)), (2, xi)):
                B = GF.Zeros((m, m))
                B[i, j] = a
                B[j, i] = -(a**ext.q)
                basis.append(B)
                slots.append((kind, i, j))
        return UnipotentRadical(form, small, basis, slots)

    small = form.F
    if form.kind is FormKind.SYMPLECTIC:
        for i in range(m):
            B = GF.Zeros((m, m))
            B[i, i] = 1
            basis.append(B)
            slots.append((0, i, i))
    for i, j in itertools.combinations(range(m), 2):
        B = GF.Zeros((m, m))
        B[i, j] = 1
        B[j, i] = 1 if form.kind is FormKind.SYMPLECTIC else -GF(1)
        basis.append(B)
        slots.append((0, i, j))
    return UnipotentRadical(form, small, basis, slots)


def _radical_roots(radical: UnipotentRadical) -> list[Mat]:
    """One root element per F_p-basis scalar: enough to generate the radical under the Levi."""
    first = np.zeros(radical.dim, dtype=np.int64)
    first[0] = 1
    return radical.generators(radical.small.GF(first[None, :]))


def _with_opposite(form: ClassicalForm, roots: list[Mat]) -> list[Mat]:
    s = _swap(form)
    return roots + [s @ r @ s for r in roots]


def sp_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of Sp_2m(q)."""
    if form.kind is not FormKind.SYMPLECTIC:
        raise ValidationError("sp_generators needs a symplectic form")
    levis = [levi(form, A) for A in gl_generators(form.m, form.F)]
    gens = levis + _with_opposite(form, _radical_roots(unipotent_radical(form)))
    assert_isometries(gens, form)
    return gens


def omega_plus_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of Omega+_2m(q) for q even and of SO+_2m(q) for q odd."""
    if form.kind is not FormKind.QUADRATIC or form.sign is not TypeSign.PLUS:
        raise ValidationError("omega_plus_generators needs a plus-type quadratic form")
    levis = [levi(form, A) for A in gl_generators(form.m, form.F)]
    gens = levis + _with_opposite(form, _radical_roots(unipotent_radical(form)))
    assert_isometries(gens, form)
    return gens


def gu_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of GU_2m(q)."""
    if form.kind is not FormKind.HERMITIAN or form.dim % 2:
        raise ValidationError("gu_generators needs an even-dimensional hermitian form")
    levis = [levi(form, A) for A in gl_generators(form.m, form.F)]
    gens = levis + _with_opposite(form, _radical_roots(unipotent_radical(form)))
    assert_isometries(gens, form)
    return gens


def _su3_root(form: ClassicalForm, a: Any, b: Any) -> Mat:
    # e -> e + a v + b f, v -> v - conj(a) f
    GF = form.GF
    g = GF.Identity(3)
    g[0, 1] = a
    g[0, 2] = b
    g[1, 2] = -form.conj(a)
    return g


def _su3_partner(form: ClassicalForm, a: Any) -> Any:
    """Least b with b + conj(b) + a conj(a) = 0."""
    GF = form.GF
    target = -(a * form.conj(a))
    for b in range(GF.order):
        x = GF(b)
        if x + form.conj(x) == target:
            return x
    raise ValidationError("no root element for this coefficient")  # unreachable


def su3_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of SU_3(q): root elements, a diagonal torus element and the e <-> f swap."""
    if form.kind is not FormKind.HERMITIAN or form.dim != 3:
        raise ValidationError("su3_generators needs the 3-dimensional hermitian form")
    ext = form.ext
    assert ext is not None
    GF = form.GF
    q = ext.q
    gens = []
    for a in form.F.prime_basis():
        gens.append(_su3_root(form, GF(a), _su3_partner(form, GF(a))))
    theta = GF(ext.skew_unit())
    for lam in ext.small.prime_basis():
        gens.append(_su3_root(form, GF(0), theta * ext.from_small(lam)))
    xi = GF(ext.xi)
    gens.append(block_diag(GF, xi[None, None], (xi ** (q - 1))[None, None], (xi ** (-q))[None, None]))
    w = GF.Zeros((3, 3))
    w[0, 2] = w[2, 0] = 1
    w[1, 1] = -GF(1)
    gens.append(w)
    assert_isometries(gens, form)
    return gens


# ---------------------------------------------------------------------------
# SO_{2m+1}(q), q odd


def so_odd_radical_element(form: ClassicalForm, a: Any, A: Mat) -> Mat:
    """u(a, A) in the radical of P_m, A alternating.

    With S = A - a a^T: f_i -> f_i + sum_j S_ij e_j + a_i v and
    v -> v - 2 sum_j a_j e_j.
    """
    GF = form.GF
    m = form.m
    a = GF(np.asarray(a, dtype=np.int64).reshape(m)) if not isinstance(a, GF) else a.reshape(m)
    S = A - np.outer(a, a).view(GF)
    g = GF.Identity(form.dim)
    g[m : 2 * m, :m] = S
    g[m : 2 * m, 2 * m] = a
    g[2 * m, :m] = -GF(2) * a
    return g


def _alternating(GF: Any, m: int, i: int, j: int, lam: Any) -> Mat:
    A = GF.Zeros((m, m))
    A[i, j] = lam
    A[j, i] = -lam
    return A


def so_odd_center_generators(form: ClassicalForm) -> list[Mat]:
    """y_ij(lam) = u(0, lam (E_ij - E_ji)), generating the centre of the radical."""
    GF = form.GF
    m = form.m
    zero = GF.Zeros(m)
    return [
        so_odd_radical_element(form, zero, _alternating(GF, m, i, j, GF(lam)))
        for i, j in itertools.combinations(range(m), 2)
        for lam in form.F.prime_basis()
    ]


def so_odd_radical_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of the full radical of P_m in SO_2m+1(q)."""
    GF = form.GF
    m = form.m
    zero_A = GF.Zeros((m, m))
    gens = []
    for i in range(m):
        for lam in form.F.prime_basis():
            a = GF.Zeros(m)
            a[i] = lam
            gens.append(so_odd_radical_element(form, a, zero_A))
    return gens + so_odd_center_generators(form)


def so_odd_generators(form: ClassicalForm) -> list[Mat]:
    """Generators of SO_2m+1(q)."""
    if form.kind is not FormKind.QUADRATIC or form.dim % 2 == 0:
        raise ValidationError("so_odd_generators needs an odd-dimensional quadratic form")
    levis = [levi(form, A) for A in gl_generators(form.m, form.F)]
    gens = levis + _with_opposite(form, so_odd_radical_generators(form))
    assert_isometries(gens, form)
    return gens


# ---------------------------------------------------------------------------
# permutation images


def permutation_group(
    domain: GeometricDomain | QuadraticFormDomain,
    gens: list[Mat],
    *,
    name: str | None = None,
    order_hint: int | None = None,
    extra: list[np.ndarray] | None = None,
) -> PermGroup:
    """The group induced on a domain by matrix generators (plus extra permutations)."""
    perms = [domain.permutation(g) for g in gens] + list(extra or [])
    logger.debug("%s: %d generators on %d points", name or "group", len(perms), domain.size)
    return PermGroup(domain.size, perms, name=name, order_hint=order_hint)


def jordan_rank(g: Mat) -> int:
    """rank(g - 1)."""
    return rank(g - type(g).Identity(g.shape[0]))
