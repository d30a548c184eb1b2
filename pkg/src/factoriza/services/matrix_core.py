"""Matrices and modules over GF(q).

Matrices are galois FieldArrays acting on row vectors (v -> v @ g). Subspaces
are stored by their reduced row echelon basis, which is unique per subspace.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import galois
import numpy as np
from sympy import factorint

from src.factoriza.services.field_core import FieldTable, least_primitive_poly
from src.factoriza.utils.exceptions import (
    NotInvariantError,
    NotUnipotentError,
    ValidationError,
)

logger = logging.getLogger(__name__)

Mat = Any  # galois FieldArray, 2-D


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace given by its rref basis (rows)."""

    ambient: int
    basis: Any = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.basis.view(np.ndarray).ravel())

    @property
    def pivots(self) -> list[int]:
        arr = self.basis.view(np.ndarray)
        return [int(np.flatnonzero(row)[0]) for row in arr]

    def coordinates(self, vectors: Any) -> Any:
        """Coordinates of vectors lying in the subspace, read at the pivot columns."""
        return vectors[..., self.pivots]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subspace) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


def rref(M: Mat) -> Mat:
    """Reduced row echelon form, zero rows kept at the bottom."""
    if M.shape[0] == 0:
        return M
    return M.row_reduce()


def rank(M: Mat) -> int:
    if M.size == 0:
        return 0
    return int(np.linalg.matrix_rank(M))


def subspace_from_vectors(GF: Any, vectors: Mat, ambient: int | None = None) -> Subspace:
    """Span of the given row vectors."""
    n = ambient if ambient is not None else int(vectors.shape[1])
    if vectors.shape[0] == 0:
        return Subspace(n, GF.Zeros((0, n)))
    R = rref(vectors)
    nonzero = np.any(R.view(np.ndarray) != 0, axis=1)
    return Subspace(n, R[nonzero])


def kernel(M: Mat) -> Subspace:
    """Left kernel {v : v @ M = 0}."""
    GF = type(M)
    rows = int(M.shape[0])
    if M.shape[1] == 0:
        return Subspace(rows, GF.Identity(rows))
    ns = M.T.null_space()
    return subspace_from_vectors(GF, ns, rows)


def is_invariant(c: Mat, V: Subspace) -> bool:
    if V.dim == 0:
        return True
    stacked = np.vstack([V.basis, V.basis @ c])
    return rank(stacked) == V.dim


def restrict_action(c: Mat, V: Subspace) -> Mat:
    """Matrix of c on V in the coordinates of V's rref basis."""
    if not is_invariant(c, V):
        raise NotInvariantError()
    return V.coordinates(V.basis @ c)


def matrix_power(g: Mat, k: int) -> Mat:
    return np.linalg.matrix_power(g, k)


def is_identity(g: Mat) -> bool:
    n = g.shape[0]
    return bool(np.array_equal(g.view(np.ndarray), np.eye(n, dtype=g.view(np.ndarray).dtype)))


def is_scalar(g: Mat) -> bool:
    arr = g.view(np.ndarray)
    d = arr[0, 0]
    return bool(d != 0 and np.array_equal(arr, d * np.eye(arr.shape[0], dtype=arr.dtype)))


def _gl_exponent(n: int, q: int) -> int:
    """Exponent-friendly multiple of every element order in GL_n(q)."""
    total = 1
    for i in range(1, n + 1):
        total *= q**i - 1
    p = factorint(q)
    char = next(iter(p))
    pp = 1
    while pp < n:
        pp *= char
    return total * pp


def order_from_multiple(g: Mat, multiple: int, one: Any = None) -> int:
    """Exact order of g given a multiple of it (factored-order exponentiation)."""
    ident = one if one is not None else type(g).Identity(g.shape[0])
    order = multiple
    for r, e in factorint(multiple).items():
        for _ in range(e):
            cand = order // r
            if np.array_equal(matrix_power(g, cand), ident):
                order = cand
            else:
                break
    return order


def matrix_order(g: Mat) -> int:
    """Multiplicative order of an invertible matrix."""
    n = int(g.shape[0])
    q = type(g).order
    return order_from_multiple(g, _gl_exponent(n, q))


def projective_order(g: Mat) -> int:
    """Order of g modulo scalars."""
    n = int(g.shape[0])
    q = type(g).order
    order = _gl_exponent(n, q)
    for r, e in factorint(order).items():
        for _ in range(e):
            cand = order // r
            if is_scalar(matrix_power(g, cand)):
                order = cand
            else:
                break
    return order


@dataclass(frozen=True, eq=False)
class SingerData:
    """Singer cycle c of GL_n(q) and the Frobenius phi with phi^-1 c phi = c^q."""

    n: int
    F: FieldTable
    poly: Any
    c: Mat = field(repr=False)
    normalizer_gen: Mat = field(repr=False)

    @property
    def q(self) -> int:
        return self.F.q


@lru_cache(maxsize=64)
def _singer_cached(n: int, q: int, F: FieldTable) -> SingerData:
    GF = F.GF
    if n == 1:
        c = GF([[F.primitive]])
        return SingerData(1, F, galois.Poly([1, 0], field=GF), c, GF.Identity(1))
    poly = least_primitive_poly(GF, n)
    coeffs = poly.coeffs[::-1]  # ascending
    c = GF.Zeros((n, n))
    for i in range(n - 1):
        c[i, i + 1] = 1
    c[n - 1, :] = -coeffs[:n]
    # Frobenius y -> y^q on GF(q)[x]/(poly), row i = coordinates of x^(i q)
    x = galois.Poly([1, 0], field=GF)
    phi = GF.Zeros((n, n))
    for i in range(n):
        r = pow(x, i * q, poly)
        rc = r.coeffs[::-1]
        phi[i, : len(rc)] = rc
    return SingerData(n, F, poly, c, phi)


def singer(n: int, F: FieldTable) -> SingerData:
    """Singer cycle of GL_n(q): companion matrix of the least-lex primitive polynomial.

    Args:
        n: dimension, n >= 1.
        F: the field GF(q).
    """
    if n < 1:
        raise ValidationError("singer needs n >= 1")
    return _singer_cached(n, F.q, F)


def jordan_partition_unipotent(u: Mat) -> list[int]:
    """Jordan block sizes of a unipotent matrix, largest first.

    Raises:
        NotUnipotentError: u - 1 is not nilpotent.
    """
    GF = type(u)
    n = int(u.shape[0])
    N = u - GF.Identity(n)
    ranks = [n]
    P = GF.Identity(n)
    for _ in range(n):
        P = P @ N
        ranks.append(rank(P))
    if ranks[-1] != 0:
        raise NotUnipotentError()
    ranks.append(0)
    blocks: list[int] = []
    for k in range(1, n + 1):
        at_least_k = ranks[k - 1] - ranks[k]
        at_least_next = ranks[k] - ranks[k + 1]
        blocks.extend([k] * (at_least_k - at_least_next))
    return sorted(blocks, reverse=True)


def wedge_pairs(m: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(m), 2))


def exterior_square_action(g: Mat) -> Mat:
    """Action of g on Λ²X, basis x_i ∧ x_j (i < j) in lexicographic order."""
    pairs = wedge_pairs(int(g.shape[0]))
    if not pairs:
        return type(g).Identity(0)
    I = np.array([p[0] for p in pairs])
    J = np.array([p[1] for p in pairs])
    # entry [(i,j),(k,l)] = g_ik g_jl - g_il g_jk
    return g[I][:, I] * g[J][:, J] - g[I][:, J] * g[J][:, I]


def twisted_tensor_action(g: Mat, q: int) -> Mat:
    """Action of g on X ⊗ X^(q) over GF(q^2): Kronecker product of g and g^(q)."""
    GF = type(g)
    if GF.order != q * q:
        raise ValidationError(f"field of order {GF.order} is not GF({q}^2)")
    n = int(g.shape[0])
    gq = g**q
    return (g[:, None, :, None] * gq[None, :, None, :]).reshape(n * n, n * n)


def _span_cyclic(v: Mat, R: Mat, d: int) -> Mat:
    rows = [v]
    for _ in range(d - 1):
        rows.append(rows[-1] @ R)
    return np.vstack(rows)


def _all_vectors(GF: Any, basis: Mat) -> Any:
    """Every nonzero vector of the span of basis rows."""
    k = int(basis.shape[0])
    coeffs = GF(np.array(list(itertools.product(range(GF.order), repeat=k))[1:]))
    return coeffs @ basis


def invariant_summands(c: Mat, V: Subspace, target_dim: int) -> list[Subspace]:
    """All <c>-irreducible c-invariant subspaces of V of dimension target_dim.

    Uses the factorization of the characteristic polynomial of c on V. A
    factor of multiplicity one gives its kernel directly; repeated factors
    are resolved by enumerating the cyclic submodules of the kernel.

    Raises:
        NotInvariantError: V is not c-invariant.
    """
    GF = type(c)
    R = restrict_action(c, V)
    if V.dim == 0:
        return []
    factors, mults = R.characteristic_poly().factors()
    found: dict[tuple[int, ...], Subspace] = {}
    for f, _mult in zip(factors, mults):
        if f.degree != target_dim:
            continue
        K = kernel(f(R, elementwise=False))
        if K.dim == target_dim:
            S = subspace_from_vectors(GF, K.basis @ V.basis, V.ambient)
            found[S.key] = S
            continue
        for v in _all_vectors(GF, K.basis):
            span = subspace_from_vectors(GF, _span_cyclic(v[None, :], R, target_dim))
            if span.dim != target_dim:
                continue
            S = subspace_from_vectors(GF, span.basis @ V.basis, V.ambient)
            found.setdefault(S.key, S)
    logger.debug("invariant_summands: %d summands of dim %d", len(found), target_dim)
    return [found[k] for k in sorted(found)]
