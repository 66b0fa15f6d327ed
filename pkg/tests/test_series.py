import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from okv.errors import DimensionMismatch
from okv.poly import Section, monomials
from okv.series import (SUP_NUMERIC, VARIANTS, MetricModel, SubvarietyY, assignment_inclusions, h0_hat,
                        h0_hat_count, model_sum, nu_image, nu_image_fast, nu_image_fast_set, product_property,
                        restricted_series, twist, validate_nu_fast)
from okv.supnorm import IN, OUT, decide_sup, monomial_sup_sq, sup_enclosure
from okv.volume import default_flag


def brute_l1(D, R):
    return sum(1 for v in itertools.product(range(-R, R + 1), repeat=D) if sum(map(abs, v)) <= R)


@pytest.mark.parametrize("n,q,m", [(1, 2, 0), (1, 2, 1), (1, 2, 2), (1, Fraction(3, 2), 3), (2, 2, 1),
                                   (1, Fraction(1, 2), 2)])
def test_h0_count_brute_force(n, q, m):
    model = MetricModel(n, q=Fraction(q))
    D = math.comb(m + n, n)
    assert h0_hat_count(model, m) == brute_l1(D, math.floor(Fraction(q) ** m))
    assert len(h0_hat(model, m).points) == h0_hat_count(model, m)


def test_model_algebra():
    a = MetricModel(1, q=2)
    b = twist(a, Fraction(3, 2))
    assert b.q == 3
    s = model_sum(a, b)
    assert (s.q, s.degree) == (6, 2)
    assert s.rank(2) == math.comb(4 + 1, 1)
    assert MetricModel.from_json(s.to_dict()) == s
    with pytest.raises(ValueError):
        MetricModel(1, q=0)
    with pytest.raises(ValueError):
        twist(a, -1)


def test_restricted_variants_on_coordinate_line():
    model = MetricModel(2, q=Fraction(3, 2))
    Y = SubvarietyY(2, (0,))
    for m in (1, 2, 3):
        sizes = {v: restricted_series(model, m, Y, v).count for v in VARIANTS}
        assert sizes["QUOT"] == sizes["SUB"] == brute_l1(m + 1, math.floor(Fraction(3, 2) ** m))
        literal = restricted_series(model, m, Y, "CL", literal=True)
        certified = restricted_series(model, m, Y, "CL", literal=False)
        assert literal.count == certified.count
    with pytest.raises(DimensionMismatch):
        restricted_series(model, 1, SubvarietyY(1, (0,)), "QUOT")


def test_inclusions_and_products():
    rng = np.random.default_rng(0)
    model = MetricModel(1, q=2)
    Y = SubvarietyY(1, (0,))
    for m in (1, 2):
        inc = assignment_inclusions(model, m, Y)
        assert inc["cl_in_quot"] and inc["quot_in_sub"]
        for v in VARIANTS:
            assert product_property(model, Y, v, m, 1, 25, rng)["failures"] == 0


def test_fast_valuation_image_matches_enumeration():
    for q in (Fraction(1), Fraction(3, 2), Fraction(2)):
        for p in (2, 5):
            model = MetricModel(1, q=q)
            flag = default_flag(1, p)
            assert validate_nu_fast(model, flag, range(4))["ok"]
    model = MetricModel(1, q=2)
    flag = default_flag(1, 5)
    info = nu_image_fast(model, 4, flag)
    assert info["count"] == 10 == len(nu_image_fast_set(model, 4, flag))
    enum = {tuple(v) for v in nu_image(h0_hat(model, 4), flag).tolist()}
    assert enum == nu_image_fast_set(model, 4, flag)


def test_sup_norm_primitives():
    assert monomial_sup_sq((1, 1)) == Fraction(1, 4)
    assert monomial_sup_sq((2, 0)) == 1
    exps = monomials(2, 1)
    lo, hi = sup_enclosure(exps, [1, 1])
    assert lo - 1e-9 <= math.sqrt(2) <= hi + 1e-9
    assert decide_sup(exps, [1, 1], Fraction(3, 2)).status == IN
    assert decide_sup(exps, [1, 1], Fraction(7, 5)).status == OUT
    assert decide_sup(exps, [3, 0], 3).status == IN


def test_sup_model_series_is_symmetric():
    s = h0_hat(MetricModel(1, SUP_NUMERIC, Fraction(7, 6)), 2)
    pts = s.point_set()
    assert all(tuple(-x for x in v) in pts for v in pts)
    assert s.count == 25


def test_section_arithmetic():
    a = Section.from_dict(1, 1, {(1, 0): 2, (0, 1): -1})
    b = Section.from_dict(1, 1, {(1, 0): 1, (0, 1): 1})
    prod = a * b
    assert prod.to_dict() == Section.from_dict(1, 2, {(2, 0): 2, (1, 1): 1, (0, 2): -1}).to_dict()
    assert prod.content() == 1 and a.scale(3).content() == 3
    assert Section.from_vector(1, 1, a.to_vector()).to_dict() == a.to_dict()
