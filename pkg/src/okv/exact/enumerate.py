"""Lattice points inside rational polytopes.

The general path scans a box in lattice coordinates with numpy and filters
with the exact integer H-representation of the polytope. Cross-polytopes
over ``s * Z^n`` have a dedicated generator and a closed-form count.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from ..errors import CapExceeded, DimensionMismatch
from .linalg import IntVector, Lattice, solve_q
from .lp import linprog
from .polytope import RationalPolytope

DEFAULT_CAP = 10 ** 8
_CHUNK = 1 << 18
_INT_SAFE = 2 ** 62


def l1_ball_count(D: int, R: int) -> int:
    """Number of points of ``Z^D`` with l1 norm at most ``R``."""
    if D < 0:
        raise ValueError("negative dimension")
    R = int(R)
    if R < 0:
        return 0
    total, term = 0, 1
    for k in range(min(D, R) + 1):
        # term = 2^k C(D, k) C(R, k), updated in place
        total += term
        term = term * 2 * (D - k) * (R - k) // ((k + 1) * (k + 1))
    return total


def l1_ball_points(D: int, R: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All points of ``Z^D`` with l1 norm at most ``R``, lexicographically sorted."""
    R = int(R)
    total = l1_ball_count(D, R)
    if total > cap:
        raise CapExceeded("l1 ball", total, cap)
    if R < 0:
        return np.zeros((0, D), dtype=np.int64)
    pts = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for _ in range(D):
        blocks, budgets = [], []
        for v in range(-R, R + 1):
            sel = used + abs(v) <= R
            if not sel.any():
                continue
            block = pts[sel]
            blocks.append(np.hstack([block, np.full((len(block), 1), v, dtype=np.int64)]))
            budgets.append(used[sel] + abs(v))
        pts = np.vstack(blocks)
        used = np.concatenate(budgets)
    return _lex_sorted(pts)


def _lex_sorted(X: np.ndarray) -> np.ndarray:
    if len(X) == 0 or X.shape[1] == 0:
        return X
    if X.dtype == object:
        return np.array(sorted(map(tuple, X)), dtype=object).reshape(X.shape)
    order = np.lexsort(X.T[::-1])
    return X[order]


def _diag_scale(L: Lattice) -> int | None:
    n = L.ambient_dim
    if L.rank != n:
        return None
    s = L.basis[0][0]
    for i, row in enumerate(L.basis):
        if any(x != (s if i == j else 0) for j, x in enumerate(row)):
            return None
    return s


def _reduced_basis(L: Lattice) -> tuple:
    """An LLL-reduced basis of ``L``; short bases keep the coordinate box tight."""
    if L.rank < 2:
        return L.basis
    M = DomainMatrix([[ZZ(x) for x in row] for row in L.basis], (L.rank, L.ambient_dim), ZZ)
    return tuple(tuple(int(x) for x in row) for row in M.lll().to_list())


def _coordinate_box(B: tuple, n: int, P: RationalPolytope):
    """Integer bounds on coordinates (in the basis ``B``) of lattice points in ``P`` (None if empty)."""
    r = len(B)
    if r == n:
        # x = c B  =>  c = x B^{-1}; images of the vertices bound the coordinates
        BT = [[B[i][j] for i in range(r)] for j in range(n)]
        coords = [solve_q(BT, list(v)) for v in P.vertices]
        lo = [math.ceil(min(c[j] for c in coords)) for j in range(r)]
        hi = [math.floor(max(c[j] for c in coords)) for j in range(r)]
    else:
        A_ub = [[sum(Fraction(f.normal[k]) * B[j][k] for k in range(n)) for j in range(r)] for f in P.facets]
        b_ub = [f.offset for f in P.facets]
        A_eq = [[sum(Fraction(e[k]) * B[j][k] for k in range(n)) for j in range(r)] for e, _ in P.equalities]
        b_eq = [b for _, b in P.equalities]
        if P.dim == 0:
            A_eq += [[Fraction(B[j][k]) for j in range(r)] for k in range(n)]
            b_eq += list(P.vertices[0])
        lo, hi = [], []
        for j in range(r):
            c = [0] * r
            c[j] = 1
            res = linprog(c, A_ub, b_ub, A_eq, b_eq, free=True)
            if res.status == "infeasible":
                return None
            lo.append(math.ceil(res.value))
            res = linprog([-x for x in c], A_ub, b_ub, A_eq, b_eq, free=True)
            hi.append(math.floor(-res.value))
    if any(a > b for a, b in zip(lo, hi)):
        return None
    return lo, hi


def lattice_points_array(L: Lattice, P: RationalPolytope, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Points of ``L`` inside ``P`` as a lexicographically sorted integer array.

    The array is int64 when entries are safely bounded and object otherwise.
    """
    n = L.ambient_dim
    if P.ambient_dim != n:
        raise DimensionMismatch(f"lattice in Z^{n} vs polytope in R^{P.ambient_dim}")
    if P.is_empty:
        return np.zeros((0, n), dtype=np.int64)
    if L.rank == 0:
        zero = (Fraction(0),) * n
        return np.zeros((1 if P.contains(zero) else 0, n), dtype=np.int64)
    R = P.l1_radius()
    s = _diag_scale(L)
    if R is not None and s is not None:
        return s * l1_ball_points(n, math.floor(R / s), cap)
    B = _reduced_basis(L)
    box = _coordinate_box(B, n, P)
    if box is None:
        return np.zeros((0, n), dtype=np.int64)
    lo, hi = box
    widths = [b - a + 1 for a, b in zip(lo, hi)]
    total = math.prod(widths)
    if total > cap:
        raise CapExceeded("lattice enumeration", total, cap)
    bound = max(max(abs(a), abs(b)) for a, b in zip(lo, hi)) * max(abs(x) for row in B for x in row) * L.rank
    big = bound >= _INT_SAFE // max(1, max(sum(abs(x) for x in f.normal) for f in P.facets) if P.facets else 1)
    Bm = np.array(B, dtype=object if big else np.int64)
    lo_arr = np.array(lo, dtype=object if big else np.int64)
    out = []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(total, start + _CHUNK))
        idx = np.stack(np.unravel_index(flat, widths), axis=1)
        C = (idx.astype(object) if big else idx.astype(np.int64)) + lo_arr
        X = C @ Bm
        keep = P.contains_many(X)
        if keep.any():
            out.append(X[keep])
    if not out:
        return np.zeros((0, n), dtype=object if big else np.int64)
    return _lex_sorted(np.vstack(out))


def enumerate_lattice_points(L: Lattice, P: RationalPolytope, cap: int = DEFAULT_CAP) -> list[IntVector]:
    """Points of ``L`` in ``P`` (boundary included) as a sorted list of int tuples."""
    return [tuple(int(x) for x in row) for row in lattice_points_array(L, P, cap)]


def count_lattice_points(L: Lattice, P: RationalPolytope, cap: int = DEFAULT_CAP) -> int:
    """``#(L ∩ P)``, in closed form for cross-polytopes over ``s * Z^n``."""
    R = P.l1_radius()
    s = _diag_scale(L)
    if R is not None and s is not None and P.ambient_dim == L.ambient_dim:
        return l1_ball_count(L.ambient_dim, math.floor(R / s))
    return len(lattice_points_array(L, P, cap))
