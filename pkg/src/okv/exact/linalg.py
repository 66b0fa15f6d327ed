"""Exact integer and rational linear algebra: Hermite normal form and lattices.

Integer matrices are plain nested sequences of Python ints; rationals are
:class:`fractions.Fraction`. Nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _check_rows(rows: Sequence[Sequence]) -> int:
    if len(rows) == 0:
        raise ValueError("matrix must have at least one row")
    n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise DimensionMismatch(f"row lengths differ: {len(r)} != {n}")
    return n


def _combine(A, i, j, a, b, c, d):
    # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    ri, rj = A[i], A[j]
    A[i] = [a * x + b * y for x, y in zip(ri, rj)]
    A[j] = [c * x + d * y for x, y in zip(ri, rj)]


@dataclass(frozen=True)
class Lattice:
    """A Z-submodule of Z^n stored by its row Hermite normal form basis."""

    ambient_dim: int
    basis: tuple[IntVector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def span(cls, vectors: Sequence[Sequence[int]], ambient_dim: int | None = None) -> "Lattice":
        vectors = [tuple(int(x) for x in v) for v in vectors]
        if not vectors:
            if ambient_dim is None:
                raise ValueError("ambient_dim required for an empty generating set")
            return cls(ambient_dim, ())
        return hnf(vectors)[0]

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def reduce(self, v: Sequence[int]) -> tuple[list[int], list[int]]:
        """Reduce ``v`` against the basis; return (remainder, coefficients)."""
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{self.ambient_dim}")
        w = [int(x) for x in v]
        coeffs = []
        for row, c in zip(self.basis, self.pivots()):
            q = w[c] // row[c]
            if q:
                w = [x - q * y for x, y in zip(w, row)]
            coeffs.append(q)
        return w, coeffs

    def __contains__(self, v) -> bool:
        return lattice_membership(self, v)

    def coordinates(self, v: Sequence[int]) -> IntVector:
        """Integer coefficients of ``v`` in the basis; raises if ``v`` is not in the lattice."""
        w, coeffs = self.reduce(v)
        if any(w):
            raise ValueError(f"{tuple(v)} is not in the lattice")
        return tuple(coeffs)

    def contains_many(self, X) -> np.ndarray:
        """Vectorised membership for the rows of an integer array."""
        W = np.array(X, dtype=object)
        if W.ndim != 2 or W.shape[1] != self.ambient_dim:
            raise DimensionMismatch(f"expected rows of length {self.ambient_dim}")
        for row, c in zip(self.basis, self.pivots()):
            q = W[:, c] // row[c]
            W = W - np.outer(q, np.array(row, dtype=object))
        return ~(W != 0).any(axis=1)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(lattice_membership(self, b) for b in other.basis)

    def index_in(self, other: "Lattice") -> int | None:
        """[other : self] when self is a full-rank sublattice of other, else None."""
        if self.rank != other.rank or not other.contains_lattice(self):
            return None
        rows = [other.coordinates(b) for b in self.basis]
        return abs(det(rows))

    def scaled(self, k: int) -> "Lattice":
        return Lattice.span([[k * x for x in row] for row in self.basis], self.ambient_dim)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim,
                "basis": [[str(x) for x in row] for row in self.basis]}


def hnf(rows: Sequence[Sequence[int]]) -> tuple[Lattice, list[list[int]]]:
    """Row Hermite normal form.

    Returns ``(H, U)`` where ``U`` is unimodular and ``U @ rows`` equals the
    basis rows of ``H`` followed by zero rows. Pivots are positive and the
    entries above each pivot lie in ``[0, pivot)``, which makes the basis
    unique for a given row span.
    """
    n = _check_rows(rows)
    A = [[int(x) for x in r] for r in rows]
    m = len(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            b = A[i][col]
            if b == 0:
                continue
            a = A[r][col]
            g, x, y = xgcd(a, b)
            _combine(A, r, i, x, y, -b // g, a // g)
            _combine(U, r, i, x, y, -b // g, a // g)
        piv = A[r][col]
        if piv == 0:
            continue
        if piv < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
            piv = -piv
        for i in range(r):
            q = A[i][col] // piv
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return Lattice(n, tuple(tuple(row) for row in A[:r])), U


def span_many(X, ambient_dim: int | None = None, batch: int = 64) -> Lattice:
    """Z-span of many integer rows: HNF of a growing subset, verified against every row."""
    X = np.asarray(X)
    n = X.shape[1] if X.ndim == 2 else ambient_dim
    rows = [tuple(int(x) for x in r) for r in X[:batch]]
    L = Lattice.span(rows, n)
    while True:
        missing = np.flatnonzero(~L.contains_many(X))
        if not len(missing):
            return L
        L = Lattice.span(list(L.basis) + [tuple(int(x) for x in X[i]) for i in missing[:batch]], n)


def lattice_membership(L: Lattice, v: Sequence[int]) -> bool:
    w, _ = L.reduce(v)
    return not any(w)


def left_kernel(rows: Sequence[Sequence[int]]) -> Lattice:
    """Integer vectors ``x`` with ``x @ rows == 0``, as a lattice in Z^len(rows)."""
    H, U = hnf(rows)
    return Lattice.span(U[H.rank:], len(rows))


def kernel_lattice(matrix: Sequence[Sequence[int]], moduli: Sequence[int] | None = None) -> Lattice:
    """Kernel of ``x -> x @ matrix`` (mod ``moduli`` per output coordinate; 0 means Z)."""
    n = len(matrix)
    if moduli is None or not any(moduli):
        return left_kernel(matrix)
    s = len(matrix[0])
    if len(moduli) != s:
        raise DimensionMismatch("one modulus per output coordinate")
    extra = [[m if j == i else 0 for j in range(s)] for i, m in enumerate(moduli) if m]
    K = left_kernel(list(matrix) + extra)
    return Lattice.span([row[:n] for row in K.basis], n)


def intersect(L1: Lattice, L2: Lattice) -> Lattice:
    if L1.ambient_dim != L2.ambient_dim:
        raise DimensionMismatch("lattices live in different ambient spaces")
    if L1.rank == 0 or L2.rank == 0:
        return Lattice(L1.ambient_dim, ())
    stacked = list(L1.basis) + [[-x for x in row] for row in L2.basis]
    K = left_kernel(stacked)
    k1 = L1.rank
    vecs = [[sum(a * row[j] for a, row in zip(coeffs[:k1], L1.basis)) for j in range(L1.ambient_dim)]
            for coeffs in K.basis]
    return Lattice.span(vecs, L1.ambient_dim)


def det(M: Sequence[Sequence]) -> int | Fraction:
    """Determinant by fraction-free Bareiss elimination (exact for ints and Fractions)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    if any(len(r) != n for r in A):
        raise DimensionMismatch("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return [], []
    n = len(A[0])
    pivots = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(A)) if A[i][col] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][col]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank_q(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def solve_q(M: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some rational solution ``x`` of ``M x = b`` (column convention), or None."""
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    R, piv = rref(aug)
    ncols = len(M[0])
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(R, piv):
        x[c] = row[-1]
    return x
