import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from okv.errors import FlagError, NotPrime, ZeroSection
from okv.flags import (AffineFlag, good_flag_pn, padic_order, valuation_image_count, valuation_section,
                       valuation_vector_poly)
from okv.poly import Section, monomials_upto


def sympy_valuation(a, p, point, chain):
    """Order/divide/restrict with sympy polynomials over GF(p)."""
    n = len(point)
    xs = sympy.symbols(f"x0:{n}")
    ts = sympy.symbols(f"t0:{n}")
    expr = sum(c * sympy.prod([x ** k for x, k in zip(xs, e)]) for e, c in a.items())
    # x_{chain[k]} = t_k + point[chain[k]]
    expr = expr.subs({xs[j]: ts[k] + point[j] for k, j in enumerate(chain)}, simultaneous=True)
    f = sympy.Poly(sympy.expand(expr), *ts, modulus=p)
    out = []
    for i in range(n):
        v = min(m[i] for m in f.monoms())
        out.append(v)
        f = sympy.Poly(sympy.expand(f.as_expr() / ts[i] ** v), *ts, modulus=p)
        f = sympy.Poly(f.as_expr().subs(ts[i], 0), *ts, modulus=p)
    return tuple(out)


@given(st.integers(0, 10 ** 9))
@settings(max_examples=60, deadline=None)
def test_valuation_matches_sympy(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5, 7])
    n = rng.randint(1, 3)
    point = [rng.randrange(p) for _ in range(n)]
    chain = rng.sample(range(n), n)
    while True:
        a = {e: rng.randint(-9, 9) for e in rng.sample(monomials_upto(n, 4), 4)}
        if any(c % p for c in a.values()):
            break
    assert valuation_vector_poly(a, AffineFlag(p, point, chain)) == sympy_valuation(a, p, point, chain)


def test_worked_examples():
    f = AffineFlag(3, [0, 0], [0, 1])
    assert valuation_vector_poly({(1, 0): 1}, f) == (1, 0)
    assert valuation_vector_poly({(0, 1): 1, (1, 1): 1}, f) == (0, 1)
    assert valuation_vector_poly({(1, 1): 1, (2, 1): 1}, f) == (1, 1)
    # translated point (1, 0) with chain order swapped
    g = AffineFlag(3, [1, 0], [1, 0])
    assert valuation_vector_poly({(1, 0): 1, (0, 0): -1}, g) == (0, 1)


def test_section_valuation_has_padic_first_entry():
    flag = good_flag_pn(1, 5, [0, 1], [0])
    s = Section.from_dict(1, 2, {(2, 0): 25, (1, 1): 50})
    assert valuation_section(s, flag) == (2, 1)
    assert padic_order(-40, 2) == 3


def test_flag_validation():
    with pytest.raises(NotPrime):
        good_flag_pn(1, 4, [0, 1], [0])
    with pytest.raises(FlagError):
        good_flag_pn(1, 5, [0, 5], [0])
    with pytest.raises(FlagError):
        good_flag_pn(1, 5, [0, 1], [1])
    with pytest.raises(FlagError):
        AffineFlag(5, [1, 0], [0, 0])
    with pytest.raises(FlagError):
        AffineFlag(5, [1, 0], [0, 1], levels=[2, 0])
    with pytest.raises(ZeroSection):
        valuation_vector_poly({(1, 0): 5}, AffineFlag(5, [0, 0], [0, 1]))
    with pytest.raises(ZeroSection):
        valuation_section(Section.from_dict(1, 1, {}), good_flag_pn(1, 5, [0, 1], [0]))


def test_flag_point_is_normalised():
    f = good_flag_pn(2, 5, [2, 4, 0], [0, 2])
    assert f.point == (3, 1, 0) and f.chart == 1


def test_subspace_count_equals_dimension():
    f = AffineFlag(3, [0, 1], [1, 0])
    basis = [{(1, 0): 1}, {(0, 1): 1, (1, 0): 2}, {(2, 0): 1}]
    res = valuation_image_count(basis, f)
    assert res["dim"] == 3 and res["equal"]
    dependent = basis + [{(0, 1): 2, (1, 0): 1}]
    res = valuation_image_count(dependent, f)
    assert res["dim"] == 3 and res["count"] == 3
