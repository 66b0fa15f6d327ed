import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from okv.errors import CapExceeded, DimensionMismatch
from okv.exact import (Lattice, box, convex_hull, count_lattice_points, cross_polytope, det, enumerate_lattice_points,
                       hnf, intersect, kernel_lattice, l1_ball_count, l1_ball_points, lattice_points_array, linprog,
                       minkowski_sum, polytope_volume, rank_q, rationalize_combination, solve_q, span_many,
                       triangulate)

small_int = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(small_int, min_size=c, max_size=c), min_size=1, max_size=max_rows))


# lattices -------------------------------------------------------------------------


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_hnf_is_row_canonical_and_transform_is_unimodular(A):
    H, U = hnf(A)
    assert abs(det(U)) == 1
    prod = [[sum(u * a for u, a in zip(row, col)) for col in zip(*A)] for row in U]
    assert [tuple(r) for r in prod[:H.rank]] == list(H.basis)
    assert not any(any(r) for r in prod[H.rank:])
    assert H.rank == sympy.Matrix(A).rank()
    piv = H.pivots()
    assert piv == sorted(piv)
    for i, (row, c) in enumerate(zip(H.basis, piv)):
        assert row[c] > 0 and all(x == 0 for x in row[:c])
        for above in H.basis[:i]:
            assert 0 <= above[c] < row[c]


@given(matrices(), st.lists(small_int, min_size=4, max_size=4))
@settings(max_examples=100, deadline=None)
def test_membership_matches_rational_solve_with_integrality(A, v):
    v = v[:len(A[0])]
    L = Lattice.span(A)
    # independent check: solve over Q in the HNF basis and test integrality
    if L.rank == 0:
        assert (v in L) == (not any(v))
        return
    sol = solve_q([list(c) for c in zip(*L.basis)], v)
    expected = sol is not None and all(Fraction(x).denominator == 1 for x in sol)
    assert (v in L) == expected


def test_lattice_operations():
    L = Lattice.span([[2, 0], [0, 3]])
    M = Lattice.span([[3, 0], [0, 2]])
    assert intersect(L, M) == Lattice.span([[6, 0], [0, 6]])
    assert L.index_in(Lattice.full(2)) == 6
    K = kernel_lattice([[1], [1]])
    assert K == Lattice.span([[1, -1]])
    Km = kernel_lattice([[1], [1]], [2])
    assert (1, 1) in Km and (1, 0) not in Km
    X = np.array([[2, 3], [4, 6], [0, 1]])
    assert span_many(X) == Lattice.span(X.tolist())
    assert list(L.contains_many(np.array([[2, 3], [1, 0], [4, -3]]))) == [True, False, True]


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hnf([[1, 2], [1]])


def test_rank_and_det_against_sympy():
    A = [[1, 2, 3], [4, 5, 6], [7, 8, 10]]
    assert det(A) == sympy.Matrix(A).det()
    assert rank_q([[1, 2], [2, 4]]) == 1


# linear programming -----------------------------------------------------------------


def test_linprog_small_problem():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0 -> (8/5, 6/5)
    res = linprog([-1, -1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert res.status == "optimal"
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]
    assert res.value == Fraction(-14, 5)
    assert linprog([-1, 0], A_ub=[[0, 1]], b_ub=[1]).status == "unbounded"
    assert linprog([0], A_eq=[[1]], b_eq=[-1]).status == "infeasible"


def test_rationalize_combination():
    pts = [(1, 0), (0, 1), (1, 1)]
    convex = ([[1, 1, 1]], [1])
    lam = rationalize_combination(pts, (Fraction(2, 3), Fraction(2, 3)), convex)
    assert lam is not None and sum(lam) == 1
    assert tuple(sum(l * p[j] for l, p in zip(lam, pts)) for j in range(2)) == (Fraction(2, 3), Fraction(2, 3))
    # coordinate sum of any convex combination is at least 1
    assert rationalize_combination(pts, (Fraction(1, 3), Fraction(1, 3)), convex) is None


# polytopes --------------------------------------------------------------------------


@given(st.integers(2, 5), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_hull_volume_matches_scipy(dim, seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(-5, 6, size=(dim + 6, dim))
    if np.linalg.matrix_rank(pts - pts[0]) < dim:
        return
    P = convex_hull(pts.tolist())
    ref = ConvexHull(pts)
    assert float(polytope_volume(P)) == pytest.approx(ref.volume, rel=1e-9)
    assert sorted(map(tuple, pts[ref.vertices].tolist())) == sorted(tuple(int(x) for x in v) for v in P.vertices)
    assert all(P.contains(p) for p in pts.tolist())


def test_hull_of_large_integer_array():
    pts = l1_ball_points(4, 5)
    P = convex_hull(pts)
    assert len(P.vertices) == 8
    assert polytope_volume(P) == Fraction(2 ** 4 * 5 ** 4, 24)


def test_lower_dimensional_hull_and_triangulation():
    P = convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    assert P.dim == 2 and polytope_volume(P) == 0
    Q = box([0, 0], [2, 3])
    tri = triangulate(Q)
    assert sum(abs(det([[b - a for a, b in zip(s[0], v)] for v in s[1:]])) for s in tri) / 2 == 6


def test_minkowski_sum_and_scaling():
    S = minkowski_sum(box([0, 0], [1, 1]), cross_polytope(2, 1))
    assert polytope_volume(S) == 7  # vol K + 2 V(K, L) + vol L = 1 + 4 + 2
    C = cross_polytope(3, 2).scale(Fraction(1, 2))
    assert C == cross_polytope(3, 1)
    assert C.is_symmetric()
    assert C.l1_radius() == 1


# enumeration ------------------------------------------------------------------------


@pytest.mark.parametrize("D,R", [(d, r) for d in range(5) for r in range(7)])
def test_l1_count_brute_force(D, R):
    brute = sum(1 for v in itertools.product(range(-R, R + 1), repeat=D) if sum(map(abs, v)) <= R)
    assert l1_ball_count(D, R) == brute
    if D:
        assert len(l1_ball_points(D, R)) == brute


def brute_points(L, P, bound):
    n = L.ambient_dim
    return sorted(v for v in itertools.product(range(-bound, bound + 1), repeat=n) if v in L and P.contains(v))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    gens = rng.integers(-3, 4, size=(n, n)).tolist()
    L = Lattice.span(gens, n)
    raw = [[Fraction(int(rng.integers(-7, 8)), int(rng.integers(1, 3))) for _ in range(n)] for _ in range(3)]
    P = convex_hull(raw + [[-x for x in v] for v in raw])
    got = enumerate_lattice_points(L, P)
    assert got == brute_points(L, P, 8)
    assert count_lattice_points(L, P) == len(got)


def test_skewed_lattice_enumeration():
    L = Lattice.span([[1, 1000], [0, 1001]])
    P = cross_polytope(2, 3)
    assert len(lattice_points_array(L, P)) == len(brute_points(L, P, 3))


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        lattice_points_array(Lattice.full(3), cross_polytope(3, 50), cap=1000)
