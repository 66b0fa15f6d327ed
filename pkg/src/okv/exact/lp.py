"""Exact rational linear programming by the two-phase simplex method.

Bland's rule is used throughout so degenerate problems cannot cycle. The
solver is meant for the small feasibility and bounding problems that come up
at desk scale, not for large LPs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import DimensionMismatch


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(T, basis, r, c):
    inv = 1 / T[r][c]
    T[r] = [v * inv for v in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]
    basis[r] = c


def _run_simplex(T, basis, ncols):
    """Minimise the objective stored in the last row of T (as reduced costs)."""
    obj = T[-1]
    while True:
        c = next((j for j in range(ncols) if obj[j] < 0), None)
        if c is None:
            return "optimal"
        best = None
        for i in range(len(T) - 1):
            a = T[i][c]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], c)
        obj = T[-1]


def linprog_eq(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimise ``c.x`` subject to ``A x = b`` and ``x >= 0``, exactly."""
    m = len(A)
    n = len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise DimensionMismatch("inconsistent LP dimensions")
    rows = []
    for row, bi in zip(A, b):
        row = [Fraction(v) for v in row]
        bi = Fraction(bi)
        if bi < 0:
            row, bi = [-v for v in row], -bi
        rows.append((row, bi))
    # phase I: artificial variables n..n+m-1
    T = []
    for i, (row, bi) in enumerate(rows):
        T.append(row + [Fraction(int(i == k)) for k in range(m)] + [bi])
    basis = list(range(n, n + m))
    obj = [Fraction(0)] * (n + m + 1)
    for row in T:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    T.append(obj)
    _run_simplex(T, basis, n + m)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T) - 1:
        if basis[i] >= n:
            c_in = next((j for j in range(n) if T[i][j] != 0), None)
            if c_in is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, c_in)
        i += 1
    T = [row[:n] + row[-1:] for row in T[:-1]]
    cost = [Fraction(v) for v in c] + [Fraction(0)]
    for r, bj in enumerate(basis):
        f = cost[bj]
        if f != 0:
            cost = [a - f * v for a, v in zip(cost, T[r])]
    T.append(cost)
    status = _run_simplex(T, basis, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for r, bj in enumerate(basis):
        x[bj] = T[r][-1]
    return LPResult("optimal", x, sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0)))


def linprog(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=False) -> LPResult:
    """Minimise ``c.x`` with ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are nonnegative unless ``free`` is set, in which case each one
    is split into a difference of two nonnegative parts.
    """
    n = len(c)
    k = 2 * n if free else n
    s = len(A_ub)

    def expand(row):
        row = [Fraction(v) for v in row]
        return row + [-v for v in row] if free else row

    A, b = [], []
    for i, (row, bi) in enumerate(zip(A_ub, b_ub)):
        A.append(expand(row) + [Fraction(int(i == j)) for j in range(s)])
        b.append(bi)
    for row, bi in zip(A_eq, b_eq):
        A.append(expand(row) + [Fraction(0)] * s)
        b.append(bi)
    cost = expand(c) + [Fraction(0)] * s
    if not A:
        if any(v != 0 for v in cost):
            return LPResult("unbounded") if free or any(v < 0 for v in cost) else LPResult(
                "optimal", [Fraction(0)] * n, Fraction(0))
        return LPResult("optimal", [Fraction(0)] * n, Fraction(0))
    res = linprog_eq(cost, A, b)
    if res.status != "optimal":
        return res
    x = res.x[:k]
    if free:
        x = [a - bb for a, bb in zip(x[:n], x[n:])]
    return LPResult("optimal", x, res.value)


def rationalize_combination(points: Sequence[Sequence], target: Sequence,
                            side_constraints: tuple[Sequence[Sequence], Sequence] | None = None
                            ) -> list[Fraction] | None:
    """Nonnegative rational ``lam`` with ``sum(lam_i * points_i) == target``.

    ``side_constraints = (A, b)`` adds the rows ``sum_i A[j][i] * lam_i == b[j]``
    (for instance ``A = [[1]*len(points)], b = [1]`` for a convex combination).
    Returns a vertex solution of the feasibility polytope, or ``None`` when no
    real solution exists (then no rational one does either).
    """
    if not points:
        raise ValueError("need at least one point")
    dim = len(target)
    for p in points:
        if len(p) != dim:
            raise DimensionMismatch(f"point of length {len(p)} vs target of length {dim}")
    A = [[Fraction(p[j]) for p in points] for j in range(dim)]
    b = [Fraction(t) for t in target]
    if side_constraints is not None:
        SA, Sb = side_constraints
        for row, bi in zip(SA, Sb):
            if len(row) != len(points):
                raise DimensionMismatch("side constraint row length must equal the number of points")
            A.append([Fraction(v) for v in row])
            b.append(Fraction(bi))
    res = linprog_eq([0] * len(points), A, b)
    return res.x if res.status == "optimal" else None
