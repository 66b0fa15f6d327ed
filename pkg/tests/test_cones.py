import itertools
from fractions import Fraction

import pytest

from okv.cones import (ConvexLattice, SemigroupPresentation, check_counting_lemma, check_dilation_bound,
                       cone_membership_Q, cone_open_probe, cone_sum_witness, convex_lattice_hull,
                       counting_lemma_suite, is_convex_lattice, mfold_sum, sat_certificate, sat_membership)
from okv.errors import NotSymmetric
from okv.exact import Lattice, cross_polytope


def test_mfold_sum():
    assert sorted(mfold_sum([(0,), (1,)], 3)) == [(0,), (1,), (2,), (3,)]
    assert len(mfold_sum([(1, 0), (0, 1)], 2)) == 3


def test_convex_lattice_hull_brute_force():
    K = [(0, 0), (2, 0), (0, 2), (2, 2), (4, 2)]
    cl = convex_lattice_hull(K)
    assert isinstance(cl, ConvexLattice)
    lattice = Lattice.span(K)
    brute = {v for v in itertools.product(range(-1, 6), repeat=2) if v in lattice and cl.hull.contains(v)}
    assert set(cl.points) == brute
    assert (2, 2) in cl and (1, 1) not in cl
    assert is_convex_lattice(cl.points)
    assert not is_convex_lattice([(0,), (2,), (6,)])


def test_cone_membership_and_saturation():
    gens = SemigroupPresentation.of([(2, 0), (1, 1)])
    assert cone_membership_Q(gens, (3, 1))
    assert not cone_membership_Q(gens, (0, 1))
    assert not cone_membership_Q(gens, (0, 0))
    assert cone_membership_Q(SemigroupPresentation.of([(1, 0)], contains_zero=True), (0, 0))
    k, c = sat_certificate(gens, (1, 0))
    assert k * 1 == sum(ci * g[0] for ci, g in zip(c, gens.generators)) and k >= 1
    assert sat_membership(gens, (3, 1)) and not sat_membership(gens, (-1, 0))
    # opposite generators put 0 in the cone with positive weights
    assert cone_membership_Q(SemigroupPresentation.of([(1,), (-1,)]), (0,))


def test_cone_probes():
    gens = SemigroupPresentation.of([(1, 0), (1, 1)])
    assert cone_open_probe(gens, (2, 1), (0, 1)) == 1
    assert cone_open_probe(gens, (1, 1), (-1, 1)) is None
    with pytest.raises(ValueError):
        cone_open_probe(gens, (0, 1), (1, 0))
    u, v, lam_s, lam_t = cone_sum_witness([(1, 0)], [(0, 1)], (2, 2))
    assert u == (2, 0) and v == (0, 2) and all(x >= 0 for x in lam_s + lam_t)
    assert cone_sum_witness([(1, 0)], [(0, 1)], (-1, 0)) is None


def test_counting_lemma_instances():
    K = [(x,) for x in range(-3, 4)]
    eq1, eq2 = check_counting_lemma(K, [[1]], [2])
    assert eq1["pass"] and eq2["pass"]
    assert eq1["counts"]["r(K)"] == "2"
    with pytest.raises(NotSymmetric):
        check_counting_lemma([(1,)], [[1]])
    rep = check_dilation_bound(Lattice.full(2), cross_polytope(2, 1), Fraction(3, 2))
    assert rep["pass"] and rep["counts"]["L∩aΔ"] == "5"


def test_counting_suite_is_seeded():
    a = counting_lemma_suite(20, seed=4)
    b = counting_lemma_suite(20, seed=4)
    assert a["failures"] == 0
    assert [r["instance_hash"] for r in a["reports"]] == [r["instance_hash"] for r in b["reports"]]
