import math
from fractions import Fraction

import mpmath
import pytest

from okv.errors import FlagError, NotSymmetric
from okv.exact import Lattice, convex_hull, cross_polytope
from okv.series import MetricModel, SubvarietyY
from okv.volume import (NormedModule, check_sandwich, check_sandwich_model, default_flag, ensure_fast_nu,
                        extrapolate, fit_gap_constant, fujita_kfold, gap_rhs, generation_check, lambda_norms,
                        okounkov_body, restricted_degree_identity, superadditivity_check, valuation_gap,
                        vhat_closed_form, vhat_vol_estimate)


def test_extrapolation_recovers_synthetic_expansion():
    # log N = a m^2 + b m log m exactly; no rounding of the counts is involved in the fit
    a, b = mpmath.mpf("0.7"), mpmath.mpf("-0.3")
    entries = []
    for m in (10, 20, 40):
        f = a * m ** 2 + b * m * mpmath.log(m)
        entries.append((m, int(mpmath.floor(mpmath.exp(f))), None))
    lim, err, method = extrapolate(entries, 2)
    assert method == "richardson2"
    assert abs(lim - 2 * a) < 1e-6 and err is not None


def test_closed_form_and_counts():
    cf = vhat_closed_form(MetricModel(1, q=2))
    assert cf["coeff"] == 2 and abs(cf["value"] - 2 * mpmath.log(2)) < 1e-30
    assert vhat_closed_form(MetricModel(1, q=1))["coeff"] == 0
    assert vhat_closed_form(MetricModel(2, q=2, degree=3), SubvarietyY(2, (0,)))["coeff"] == 2 * 3
    seq = vhat_vol_estimate(MetricModel(1, q=2), [1, 2, 3])
    assert [c for _, c, _ in seq.entries] == [13, 129, 3649]
    with pytest.raises(ValueError):
        vhat_vol_estimate(MetricModel(1, q=2), [3, 2])


def test_okounkov_body_small_levels():
    body = okounkov_body(MetricModel(1, q=2), default_flag(1, 2), 4)
    assert all(r["method"] == "enumerated" and r["graded_ok"] and r["fast_agrees"] for r in body.levels)
    assert body.volume > 0
    with pytest.raises(FlagError):
        okounkov_body(MetricModel(1, q=2), default_flag(2, 2), 2)


def test_gap_enumerated_equals_closed_form():
    model, flag = MetricModel(1, q=2), default_flag(1, 5)
    enum = valuation_gap(model, flag, 3)
    fast = valuation_gap(model, flag, 3, cap=10)
    assert enum.method == "enumerated" and fast.method == "closed form"
    assert (enum.nu_count, enum.count) == (fast.nu_count, fast.count) == (8, 3649)
    assert ensure_fast_nu(model, flag)["ok"]
    assert gap_rhs(5, 0, 1) == 0
    fit = fit_gap_constant([valuation_gap(model, flag, m) for m in (1, 2, 3)])
    assert fit["fits"] and fit["C"] > 0


def test_sandwich_on_sublattice():
    M = Lattice.span([[2, 0, 0], [1, 1, 0], [0, 0, 1]])
    rep = check_sandwich(M, cross_polytope(3, 4), default_flag(1, 3), 2)
    assert rep["pass"] and rep["beta"] == 9
    assert check_sandwich_model(MetricModel(1, q=3), 2, default_flag(1, 2))["pass"]
    with pytest.raises(NotSymmetric):
        check_sandwich(Lattice.full(3), convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]),
                       default_flag(1, 3), 2)


def test_fujita_small():
    rows = fujita_kfold(MetricModel(1, q=2), 1, 2)
    assert [r["CL_size"] for r in rows] == [13, 129]
    assert all(r["contain_ok"] and r["nu_superset_ok"] for r in rows)


def test_generation():
    assert generation_check(MetricModel(1, q=2), default_flag(1, 2), 2)["generates"]
    flat = generation_check(MetricModel(1, q=1), default_flag(1, 2), 3)
    assert not flat["generates"] and flat["rank"] == 2


def test_superadditivity():
    A, B = MetricModel(1, q=2), MetricModel(1, q=3)
    line = SubvarietyY(1, (0,))
    res = superadditivity_check(A, B, [99, 100, 199, 200], line)
    assert res["exact_identity"] and res["pass"]
    assert superadditivity_check(A, MetricModel(1, q=1), [1, 2])["skipped"]


def test_lambda_norms():
    square = convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert lambda_norms(NormedModule(Lattice.full(2), square)) == {
        "lambda_prime": 1, "lambda": 1, "pass": True}
    res = lambda_norms(NormedModule(Lattice.span([[2, 0], [0, 2]]), square))
    assert res["lambda"] == res["lambda_prime"] == 2
    # skewed lattice: the HNF basis is long, reduced vectors are short
    skew = lambda_norms(NormedModule(Lattice.span([[1, 100], [0, 101]]), square))
    assert skew["pass"] and skew["lambda"] <= 101
    with pytest.raises(NotSymmetric):
        NormedModule(Lattice.full(1), convex_hull([[0], [1]]))


def test_restricted_degree_identity():
    res = restricted_degree_identity(MetricModel(1, q=Fraction(3, 2)), 6)
    assert res["identity"] and res["lambda"] == Fraction(2, 3) ** 6
    assert math.isclose(-math.log(res["lambda"]) / 6, math.log(1.5))
