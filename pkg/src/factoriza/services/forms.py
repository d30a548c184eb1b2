"""Classical forms, geometric domains and the even-characteristic invariants.

Bases follow the usual standard-basis conventions:

* symplectic and even-dimensional forms: e_1..e_m, f_1..f_m
* odd-dimensional quadratic forms: e_1..e_m, f_1..f_m, v
* odd-dimensional hermitian forms: e_1..e_m, v, f_1..f_m

Quadratic forms are stored as an upper-triangular matrix Qm with
Q(x) = x Qm x^T, whose polarization is Qm + Qm^T.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from src.factoriza.config import config
from src.factoriza.services.field_core import (
    FieldTable,
    QuadraticExtension,
    field_of_order,
    is_square,
    least_nonsquare,
    quadratic_extension,
)
from src.factoriza.services.matrix_core import Mat, is_identity, rank
from src.factoriza.utils.exceptions import (
    CapExceededError,
    ConstructionError,
    NotInvolutionError,
    NotIsometryError,
    ValidationError,
)

logger = logging.getLogger(__name__)


class FormKind(str, Enum):
    """形式の種類"""

    SYMPLECTIC = "symplectic"
    HERMITIAN = "hermitian"
    QUADRATIC = "quadratic"


class TypeSign(str, Enum):
    """Witt type of a quadratic form."""

    PLUS = "+"
    MINUS = "-"
    ODD = "odd"


class DomainKind(str, Enum):
    """Point sets a classical group acts on."""

    PROJECTIVE_POINTS = "projective_points"
    TOTALLY_SINGULAR = "totally_singular"
    NONDEGENERATE_POINTS = "nondegenerate_points"
    NONSINGULAR_POINTS = "nonsingular_points"
    MINUS_POINTS = "minus_points"
    MINUS_FORMS = "minus_forms"
    SUBSPACES = "subspaces"


@dataclass(frozen=True)
class InvolutionType:
    """a_s, b_s or c_s."""

    letter: str
    s: int

    def __str__(self) -> str:
        return f"{self.letter}{self.s}"


@dataclass(frozen=True, eq=False)
class ClassicalForm:
    """A nondegenerate form on GF(q)^dim (GF(q^2)^dim when hermitian).

    Attributes:
        kind: symplectic, hermitian or quadratic.
        dim: dimension of the natural module.
        F: the field the matrices live in.
        gram: Gram matrix of the bilinear or sesquilinear part.
        quad: upper-triangular Qm for quadratic forms, else None.
        sign: Witt type for quadratic forms, else None.
        ext: GF(q) inside GF(q^2) for hermitian forms.
    """

    kind: FormKind
    dim: int
    F: FieldTable
    gram: Mat = field(repr=False)
    quad: Mat | None = field(default=None, repr=False)
    sign: TypeSign | None = None
    ext: QuadraticExtension | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        """Order of the base field (q, not q^2, for hermitian forms)."""
        return self.ext.q if self.ext is not None else self.F.q

    @property
    def GF(self) -> Any:
        return self.F.GF

    @property
    def m(self) -> int:
        return self.dim // 2

    def conj(self, x: Any) -> Any:
        return self.ext.conj(x) if self.ext is not None else x

    def pairing(self, u: Any, v: Any) -> Any:
        """(u, v) for row vectors, vectorized over leading axes of u."""
        return np.sum((u @ self.gram) * self.conj(v), axis=-1)

    def values(self, vectors: Any) -> Any:
        """Q(v) for each row of vectors (quadratic forms only)."""
        if self.quad is None:
            raise ValidationError(f"{self.kind.value} forms carry no quadratic values")
        return np.sum((vectors @ self.quad) * vectors, axis=-1)

    def radical_free(self) -> bool:
        return rank(self.gram) == self.dim


def _triangularize(M: Mat) -> Mat:
    """Upper-triangular matrix of the quadratic map x -> x M x^T."""
    upper = np.triu(M.view(np.ndarray))
    lower = np.tril(M.view(np.ndarray), -1).T
    GF = type(M)
    return GF(upper) + GF(lower)


def _block(GF: Any, blocks: list[list[Any]]) -> Mat:
    return GF(np.block([[np.asarray(b.view(np.ndarray)) for b in row] for row in blocks]))


def _minus_block_even(F: FieldTable) -> int:
    """Least delta with x^2 + x + delta irreducible over an even field."""
    GF = F.GF
    squares_plus = {int(GF(y) ** 2 + GF(y)) for y in range(F.q)}
    for delta in range(1, F.q):
        if delta not in squares_plus:
            return delta
    raise ConstructionError(f"no irreducible x^2+x+d over GF({F.q})")  # unreachable


def standard_form(kind: FormKind | str, dim: int, q: int, sign: TypeSign | str | None = None) -> ClassicalForm:
    """Standard form of the given kind.

    Args:
        kind: symplectic, hermitian or quadratic.
        dim: dimension of the natural module.
        q: base field order (hermitian forms live over GF(q^2)).
        sign: '+', '-' or 'odd' for quadratic forms.

    Returns:
        ClassicalForm in standard-basis conventions.

    Raises:
        ValidationError: illegal parameter combination.
    """
    kind = FormKind(kind)
    if dim < 2:
        raise ValidationError(f"dimension {dim} is too small", {"dim": dim})

    if kind is FormKind.SYMPLECTIC:
        if dim % 2:
            raise ValidationError("symplectic forms need even dimension", {"dim": dim})
        F = field_of_order(q)
        m = dim // 2
        I, Z = F.GF.Identity(m), F.GF.Zeros((m, m))
        gram = _block(F.GF, [[Z, I], [-I, Z]])
        return _checked(ClassicalForm(kind, dim, F, gram))

    if kind is FormKind.HERMITIAN:
        ext = quadratic_extension(q)
        F = ext.big
        GF = F.GF
        m = dim // 2
        gram = GF.Zeros((dim, dim))
        if dim % 2 == 0:
            for i in range(m):
                gram[i, m + i] = gram[m + i, i] = 1
        else:
            # e_1..e_m, v, f_1..f_m: antidiagonal
            for i in range(dim):
                gram[i, dim - 1 - i] = 1
        return _checked(ClassicalForm(kind, dim, F, gram, ext=ext))

    F = field_of_order(q)
    GF = F.GF
    m = dim // 2
    if dim % 2:
        if sign not in (None, TypeSign.ODD, "odd"):
            raise ValidationError("odd-dimensional quadratic forms have no Witt sign")
        if F.p == 2:
            raise ValidationError("odd-dimensional quadratic forms need q odd", {"q": q})
        quad = GF.Zeros((dim, dim))
        for i in range(m):
            quad[i, m + i] = 1
        quad[dim - 1, dim - 1] = 1
        return _checked(ClassicalForm(kind, dim, F, quad + quad.T, quad, TypeSign.ODD))

    if sign is None:
        raise ValidationError("even-dimensional quadratic forms need a sign")
    sign = TypeSign(sign)
    if sign is TypeSign.ODD:
        raise ValidationError("'odd' sign needs odd dimension", {"dim": dim})
    quad = GF.Zeros((dim, dim))
    for i in range(m):
        quad[i, m + i] = 1
    if sign is TypeSign.MINUS:
        e, f = m - 1, dim - 1
        if F.p == 2:
            quad[e, e] = 1
            quad[f, f] = _minus_block_even(F)
        else:
            # a^2 - mu b^2 with mu the least non-square
            quad[e, f] = 0
            quad[e, e] = 1
            quad[f, f] = -GF(least_nonsquare(F))
    return _checked(ClassicalForm(kind, dim, F, quad + quad.T, quad, sign))


def _checked(form: ClassicalForm) -> ClassicalForm:
    g = form.gram
    arr = g.view(np.ndarray)
    if form.kind is FormKind.SYMPLECTIC:
        if not (np.array_equal(arr, (-g.T).view(np.ndarray)) and not np.diag(arr).any()):
            raise ConstructionError("symplectic Gram matrix is not alternating")
    elif form.kind is FormKind.HERMITIAN:
        if not np.array_equal(arr, form.conj(g.T).view(np.ndarray)):
            raise ConstructionError("hermitian Gram matrix is not hermitian")
    if not form.radical_free():
        raise ConstructionError("form is degenerate", {"kind": form.kind.value, "dim": form.dim})
    return form


def is_isometry(g: Mat, form: ClassicalForm) -> bool:
    """True iff g preserves the form (and every Q-value for quadratic forms)."""
    if g.shape != (form.dim, form.dim):
        raise ValidationError(f"matrix shape {g.shape} does not match dimension {form.dim}")
    if form.kind is FormKind.QUADRATIC:
        image = _triangularize(g @ form.quad @ g.T)
        return bool(np.array_equal(image.view(np.ndarray), form.quad.view(np.ndarray)))
    image = g @ form.gram @ form.conj(g).T
    return bool(np.array_equal(image.view(np.ndarray), form.gram.view(np.ndarray)))


def assert_isometries(gens: list[Mat], form: ClassicalForm) -> None:
    """Raise if any generator leaves the form."""
    for i, g in enumerate(gens):
        if not is_isometry(g, form):
            raise NotIsometryError(f"generator {i} is not an isometry of the {form.kind.value} form")


def reflection(form: ClassicalForm, v: Any) -> Mat:
    """Orthogonal reflection (transvection for q even) in a nonsingular vector v."""
    GF = form.GF
    Qv = form.values(v[None, :])[0]
    if Qv == 0:
        raise ValidationError("reflection needs a nonsingular vector")
    col = (form.gram @ v[:, None]) / Qv
    return GF.Identity(form.dim) - col @ v[None, :]


def symplectic_transvection(form: ClassicalForm, v: Any, lam: Any) -> Mat:
    """x -> x + lam (x, v) v."""
    GF = form.GF
    return GF.Identity(form.dim) + lam * (form.gram @ v[:, None]) @ v[None, :]


def random_isometry(form: ClassicalForm, rng: np.random.Generator, length: int = 6) -> Mat:
    """Product of random reflections (quadratic) or transvections (symplectic)."""
    GF = form.GF
    g = GF.Identity(form.dim)
    made = 0
    while made < length:
        v = GF(rng.integers(0, form.F.q, form.dim))
        if not v.view(np.ndarray).any():
            continue
        if form.kind is FormKind.QUADRATIC:
            if form.values(v[None, :])[0] == 0:
                continue
            g = g @ reflection(form, v)
        elif form.kind is FormKind.SYMPLECTIC:
            lam = GF(int(rng.integers(1, form.F.q)))
            g = g @ symplectic_transvection(form, v, lam)
        else:
            raise ValidationError("random isometries are built for quadratic and symplectic forms")
        made += 1
    return g


def dickson_invariant(g: Mat, form: ClassicalForm) -> int:
    """rank(g - 1) mod 2 for an isometry of an even-characteristic quadratic form.

    Raises:
        ValidationError: the form is not quadratic over an even field.
        NotIsometryError: g does not preserve the form.
    """
    if form.kind is not FormKind.QUADRATIC or form.F.p != 2:
        raise ValidationError("the Dickson invariant is defined here for q even quadratic forms")
    if not is_isometry(g, form):
        raise NotIsometryError()
    return rank(g - form.GF.Identity(form.dim)) % 2


def involution_type(x: Mat, form: ClassicalForm) -> InvolutionType:
    """a/b/c type of an involution of an even-characteristic symplectic group.

    The letter is a iff (v, v x) = 0 for every v, i.e. iff J x^T is an
    alternating matrix; otherwise b for odd s and c for even s.

    Raises:
        NotInvolutionError: x^2 != 1 or x = 1.
        NotIsometryError: x is not symplectic.
    """
    if form.kind is not FormKind.SYMPLECTIC or form.F.p != 2:
        raise ValidationError("involution types are defined for q even symplectic forms")
    if is_identity(x) or not is_identity(x @ x):
        raise NotInvolutionError()
    if not is_isometry(x, form):
        raise NotIsometryError()
    s = rank(x - form.GF.Identity(form.dim))
    M = (form.gram @ x.T).view(np.ndarray)
    if not np.diag(M).any() and np.array_equal(M, M.T):
        return InvolutionType("a", s)
    return InvolutionType("b" if s % 2 else "c", s)


# ---------------------------------------------------------------------------
# point sets


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    weights = base ** np.arange(rows.shape[-1], dtype=np.int64)
    return rows.astype(np.int64) @ weights


def projective_points(GF: Any, n: int) -> Mat:
    """Canonical representatives of the 1-spaces of GF^n (first nonzero entry 1)."""
    q = GF.order
    total = (q**n - 1) // (q - 1)
    if total > config.DOMAIN_CAP:
        raise CapExceededError("projective point set", total, config.DOMAIN_CAP)
    blocks = []
    for lead in range(n):
        tail = n - 1 - lead
        rest = np.array(list(itertools.product(range(q), repeat=tail)), dtype=np.int64)
        rest = rest.reshape(len(rest), tail)
        block = np.zeros((rest.shape[0], n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = rest
        blocks.append(block)
    return GF(np.vstack(blocks))


def normalize_rows(X: Mat) -> Mat:
    """Scale each nonzero row so that its first nonzero entry is 1."""
    arr = X.view(np.ndarray)
    lead_idx = np.argmax(arr != 0, axis=1)
    lead = X[np.arange(X.shape[0]), lead_idx]
    return X / lead[:, None]


def enumerate_subspaces(GF: Any, n: int, k: int) -> Mat:
    """All k-subspaces of GF^n as rref bases, shape (N, k, n)."""
    q = GF.order
    out: list[np.ndarray] = []
    for pivots in itertools.combinations(range(n), k):
        free = [(i, c) for i in range(k) for c in range(pivots[i] + 1, n) if c not in pivots]
        for values in itertools.product(range(q), repeat=len(free)):
            R = np.zeros((k, n), dtype=np.int64)
            for i, p in enumerate(pivots):
                R[i, p] = 1
            for (i, c), val in zip(free, values):
                R[i, c] = val
            out.append(R)
    return GF(np.array(out).reshape(-1, k, n))


def _rref_batch(B: Mat) -> Mat:
    return type(B)(np.stack([b.row_reduce().view(np.ndarray) for b in B]))


@dataclass(eq=False)
class GeometricDomain:
    """A point set with canonical representatives and O(log N) lookup.

    Points are 1-spaces (rows of ``points``) or k-spaces (rref bases,
    ``points`` of shape (N, k, n)).
    """

    kind: DomainKind
    form: ClassicalForm | None
    points: Mat = field(repr=False)
    keys: np.ndarray = field(repr=False)
    k: int = 1

    @property
    def size(self) -> int:
        return int(self.keys.shape[0])

    def __len__(self) -> int:
        return self.size

    @property
    def base(self) -> int:
        return int(type(self.points).order)

    def key_of(self, reps: Mat) -> np.ndarray:
        flat = reps.view(np.ndarray).reshape(reps.shape[0], -1)
        return _encode(flat, self.base)

    def index_of(self, reps: Mat) -> np.ndarray:
        """Indices of canonical representatives."""
        keys = self.key_of(reps)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, self.size - 1)
        if not np.array_equal(self.keys[idx], keys):
            raise ConstructionError("image leaves the domain", {"kind": self.kind.value})
        return idx

    def image(self, g: Mat, frob: int = 0) -> Mat:
        """Canonical images of every point under v -> v^(p^frob) g."""
        P = self.points
        if frob:
            P = P ** (type(P).characteristic**frob)
        if self.k == 1:
            return normalize_rows(P @ g)
        n = P.shape[-1]
        moved = (P.reshape(-1, n) @ g).reshape(P.shape)
        return _rref_batch(moved)

    def permutation(self, g: Mat, frob: int = 0) -> np.ndarray:
        """Image array of g (optionally composed with a field automorphism)."""
        return self.index_of(self.image(g, frob)).astype(np.int32)

    def fixed_count(self, g: Mat) -> int:
        perm = self.permutation(g)
        return int(np.count_nonzero(perm == np.arange(self.size)))


def _domain_from(kind: DomainKind, form: ClassicalForm | None, points: Mat, k: int = 1) -> GeometricDomain:
    flat = points.view(np.ndarray).reshape(points.shape[0], -1)
    keys = _encode(flat, type(points).order)
    order = np.argsort(keys, kind="stable")
    return GeometricDomain(kind, form, points[order], keys[order], k)


def expected_domain_size(form: ClassicalForm, kind: DomainKind, k: int = 1) -> int | None:
    """Closed-form point counts for the instantiated domains."""
    q, m = form.q, form.m
    if kind is DomainKind.NONDEGENERATE_POINTS and form.kind is FormKind.HERMITIAN and form.dim % 2 == 0:
        return q ** (2 * m - 1) * (q ** (2 * m) - 1) // (q + 1)
    if kind is DomainKind.NONSINGULAR_POINTS and form.sign is TypeSign.PLUS and q % 2 == 0:
        return q ** (m - 1) * (q**m - 1)
    if kind is DomainKind.NONDEGENERATE_POINTS and form.sign is TypeSign.PLUS:
        return q ** (m - 1) * (q**m - 1) // 2
    if kind is DomainKind.MINUS_POINTS:
        return q**m * (q**m - 1) // 2
    if kind is DomainKind.MINUS_FORMS:
        return q**m * (q**m - 1) // 2
    if kind is DomainKind.TOTALLY_SINGULAR and form.kind is FormKind.HERMITIAN and (form.dim, k) == (4, 2):
        return (q + 1) * (q**3 + 1)
    if kind is DomainKind.TOTALLY_SINGULAR and k == 1 and form.kind is FormKind.HERMITIAN and form.dim == 3:
        return q**3 + 1
    return None


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-subspaces of GF(q)^n."""
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_domain(GF: Any, n: int, k: int) -> GeometricDomain:
    """All k-subspaces of GF^n, for GL_n acting on k-spaces.

    Raises:
        CapExceededError: the count exceeds DOMAIN_CAP.
    """
    if not 1 <= k < n:
        raise ValidationError("subspace dimension out of range", {"n": n, "k": k})
    total = gaussian_binomial(n, k, GF.order)
    if total > config.DOMAIN_CAP:
        raise CapExceededError("subspace set", total, config.DOMAIN_CAP)
    subs = enumerate_subspaces(GF, n, k)
    if k == 1:
        return _domain_from(DomainKind.PROJECTIVE_POINTS, None, subs.reshape(-1, n))
    return _domain_from(DomainKind.SUBSPACES, None, subs, k)


def enumerate_domain(
    form: ClassicalForm | None,
    kind: DomainKind | str,
    *,
    k: int = 1,
    square_class: int = 0,
    GF: Any = None,
    dim: int | None = None,
) -> GeometricDomain:
    """Enumerate a geometric domain and assert its closed-form size.

    Args:
        form: the ambient form (None for plain projective points).
        kind: which point set.
        k: subspace dimension for totally singular subspaces.
        square_class: 0 for Q(v) a square, 1 for a non-square (Case 8, q odd).
        GF, dim: field and dimension when form is None.

    Raises:
        CapExceededError: the ambient point count exceeds DOMAIN_CAP.
        ConstructionError: the enumerated count disagrees with the formula.
    """
    kind = DomainKind(kind)
    if kind is DomainKind.MINUS_FORMS:
        raise ValidationError("use minus_forms_domain for the quadratic-form domain")
    if form is None:
        if GF is None or dim is None:
            raise ValidationError("a domain without a form needs GF and dim")
        if kind is DomainKind.PROJECTIVE_POINTS:
            return _domain_from(kind, None, projective_points(GF, dim))
        if kind is DomainKind.SUBSPACES:
            return subspace_domain(GF, dim, k)
        raise ValidationError(f"domain {kind.value} needs a form")

    field_ = form.GF
    if kind is DomainKind.PROJECTIVE_POINTS:
        return _domain_from(kind, form, projective_points(field_, form.dim))

    if kind is DomainKind.TOTALLY_SINGULAR:
        subs = enumerate_subspaces(field_, form.dim, k)
        if subs.shape[0] > config.DOMAIN_CAP:
            raise CapExceededError("subspace set", int(subs.shape[0]), config.DOMAIN_CAP)
        keep = np.ones(subs.shape[0], dtype=bool)
        for i in range(k):
            for j in range(i, k):
                keep &= form.pairing(subs[:, i, :], subs[:, j, :]).view(np.ndarray) == 0
            if form.quad is not None:
                keep &= form.values(subs[:, i, :]).view(np.ndarray) == 0
        points = subs[keep]
        if k == 1:
            points = points.reshape(-1, form.dim)
        dom = _domain_from(kind, form, points, k)
    else:
        P = projective_points(field_, form.dim)
        if kind is DomainKind.NONDEGENERATE_POINTS and form.kind is FormKind.HERMITIAN:
            keep = form.pairing(P, P).view(np.ndarray) != 0
        elif kind is DomainKind.NONSINGULAR_POINTS:
            keep = form.values(P).view(np.ndarray) != 0
        elif kind is DomainKind.NONDEGENERATE_POINTS:
            vals = form.values(P).view(np.ndarray)
            keep = np.array([v != 0 and (is_square(form.F, int(v)) == (square_class == 0)) for v in vals])
        elif kind is DomainKind.MINUS_POINTS:
            # Q(v_0) = 1 for the odd basis vector, whose perp is of plus type
            vals = form.values(P).view(np.ndarray)
            keep = np.array([v != 0 and not is_square(form.F, int(v)) for v in vals])
        else:
            raise ValidationError(f"domain {kind.value} is not defined for {form.kind.value} forms")
        dom = _domain_from(kind, form, P[keep])

    expected = expected_domain_size(form, kind, k)
    if expected is not None and dom.size != expected:
        raise ConstructionError(
            f"{kind.value}: enumerated {dom.size} points, expected {expected}",
            {"kind": kind.value, "size": dom.size, "expected": expected},
        )
    logger.debug("enumerated %s: %d points", kind.value, dom.size)
    return dom


# ---------------------------------------------------------------------------
# minus-type quadratic forms polarizing to a symplectic form (q even)


def _move_forms(c: Mat, g_inv: Mat, upper: Mat) -> Mat:
    # c'_k = Q_c(row_k(g^-1))
    offdiag = np.sum((g_inv @ upper) * g_inv, axis=-1)
    return offdiag + c @ (g_inv**2).T


@dataclass(eq=False)
class QuadraticFormDomain:
    """Minus-type quadratic forms Q with polarization J, optionally with a label.

    A form is stored by its diagonal vector c (c_i = Q(basis_i)); Sp acts by
    Q^g(v) = Q(v g^-1). With ``labelled`` the domain is the double cover
    G/Omega: pairs (Q, eps), where eps moves by the Dickson invariant of
    t_Q g t_{Q^g}^-1 along a fixed transversal t.
    """

    form: ClassicalForm
    base_form: ClassicalForm
    forms: Mat = field(repr=False)
    keys: np.ndarray = field(repr=False)
    transversal: list[Mat] = field(repr=False)
    labelled: bool = False
    kind: DomainKind = DomainKind.MINUS_FORMS

    @property
    def count(self) -> int:
        return int(self.keys.shape[0])

    @property
    def size(self) -> int:
        return self.count * (2 if self.labelled else 1)

    def __len__(self) -> int:
        return self.size

    @property
    def _upper(self) -> Mat:
        return type(self.form.gram)(np.triu(self.form.gram.view(np.ndarray), 1))

    def form_permutation(self, g: Mat) -> np.ndarray:
        g_inv = np.linalg.inv(g)
        moved = _move_forms(self.forms, g_inv, self._upper)
        keys = _encode(moved.view(np.ndarray), self.form.F.q)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, self.count - 1)
        if not np.array_equal(self.keys[idx], keys):
            raise ConstructionError("matrix does not preserve the symplectic form")
        return idx.astype(np.int32)

    def permutation(self, g: Mat) -> np.ndarray:
        perm = self.form_permutation(g)
        if not self.labelled:
            return perm
        out = np.empty(self.size, dtype=np.int32)
        for i in range(self.count):
            j = int(perm[i])
            x = self.transversal[i] @ g @ np.linalg.inv(self.transversal[j])
            eps = dickson_invariant(x, self.base_form)
            out[2 * i] = 2 * j + eps
            out[2 * i + 1] = 2 * j + (1 - eps)
        return out

    def fixed_count(self, g: Mat) -> int:
        perm = self.permutation(g)
        return int(np.count_nonzero(perm == np.arange(self.size)))


def minus_forms_domain(
    form: ClassicalForm, generators: list[Mat], labelled: bool = False
) -> QuadraticFormDomain:
    """Orbit of the standard minus form under ⟨generators⟩ ≤ Sp(form), by BFS.

    Raises:
        ValidationError: form is not symplectic over an even field.
        ConstructionError: the orbit size is not q^m(q^m-1)/2.
    """
    if form.kind is not FormKind.SYMPLECTIC or form.F.p != 2:
        raise ValidationError("minus-type form domains are built over q even symplectic spaces")
    base = standard_form(FormKind.QUADRATIC, form.dim, form.q, TypeSign.MINUS)
    GF = form.GF
    start = GF(np.diag(base.quad.view(np.ndarray)))
    upper = GF(np.triu(form.gram.view(np.ndarray), 1))
    inverses = [np.linalg.inv(s) for s in generators]

    key0 = int(_encode(start.view(np.ndarray)[None, :], form.F.q)[0])
    seen: dict[int, int] = {key0: 0}
    forms = [start]
    trans = [GF.Identity(form.dim)]
    queue = 0
    target = expected_domain_size(form, DomainKind.MINUS_FORMS)
    cap = config.DOMAIN_CAP
    while queue < len(forms):
        c, t = forms[queue], trans[queue]
        queue += 1
        for s, s_inv in zip(generators, inverses):
            c2 = _move_forms(c, s_inv, upper)
            key = int(_encode(c2.view(np.ndarray)[None, :], form.F.q)[0])
            if key not in seen:
                seen[key] = len(forms)
                forms.append(c2)
                trans.append(t @ s)
                if len(forms) > cap:
                    raise CapExceededError("minus-form orbit", len(forms), cap)

    if target is not None and len(forms) != target:
        raise ConstructionError(
            f"minus-form orbit has {len(forms)} forms, expected {target}",
            {"size": len(forms), "expected": target},
        )
    keys = np.array(list(seen.keys()), dtype=np.int64)
    index = np.array(list(seen.values()))
    order = np.argsort(keys)
    stacked = GF(np.stack([f.view(np.ndarray) for f in forms]))
    logger.debug("minus-form domain: %d forms (labelled=%s)", len(forms), labelled)
    return QuadraticFormDomain(
        form,
        base,
        stacked[index[order]],
        keys[order],
        [trans[i] for i in index[order]],
        labelled,
    )

