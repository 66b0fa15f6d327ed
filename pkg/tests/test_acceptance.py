"""Acceptance checks 1-10; each records one PASS/FAIL line shown in the terminal summary."""
from __future__ import annotations

import time
from fractions import Fraction

import mpmath
import numpy as np

from okv.cones import counting_lemma_suite
from okv.runner import random_normed_modules
from okv.selftest import count_oracle, subspace_counts, uniformizer_independence, valuation_additivity
from okv.series import (SUP_NUMERIC, VARIANTS, MetricModel, SubvarietyY, assignment_inclusions, product_property)
from okv.volume import (check_sandwich_model, default_flag, fit_gap_constant, fujita_kfold, lambda_norms,
                        okounkov_body, restricted_degree_identity, superadditivity_check, valuation_gap,
                        vhat_vol_estimate)

LOG2 = mpmath.log(2)


def P1(q) -> MetricModel:
    return MetricModel(1, q=Fraction(q))


def test_criterion_01_volume_limit(acceptance):
    t0 = time.perf_counter()
    seq = vhat_vol_estimate(P1(2), range(1, 201))
    dt = time.perf_counter() - t0
    target = 2 * LOG2
    rel = abs(seq.limit - target) / target
    acceptance(1, rel < 0.05 and dt < 60,
               f"limit {float(seq.limit):.6f} vs 2 log 2 = {float(target):.6f} (rel {float(rel):.2e} < 5%), {dt:.1f}s < 60s")


def test_criterion_02_restricted_volume(acceptance):
    Y = SubvarietyY(1, (0,))
    seq = vhat_vol_estimate(P1(2), [4999, 5000, 9999, 10000], Y, "QUOT")
    diff = abs(seq.limit - LOG2)
    # the count is 2 floor(2^m) + 1
    counts_ok = all(c == 2 * 2 ** m + 1 for m, c, _ in seq.entries)
    ident = restricted_degree_identity(P1(2), 10000)
    acceptance(2, diff < 1e-3 and counts_ok and ident["identity"],
               f"limit {float(seq.limit):.8f}, |limit - log 2| = {float(diff):.2e} < 1e-3; counts 2*2^m+1: {counts_ok}; "
               f"degree identity lambda = 2^-m: {ident['identity']}")


def test_criterion_03_gap(acceptance):
    model = P1(2)
    spot = valuation_gap(model, default_flag(1, 5), 4)
    spot_ok = spot.nu_count == 10 and spot.count == 335137 and abs(spot.gap - mpmath.mpf("3.372")) < 1e-2
    reports = []
    decay = {}
    for p in (5, 11):
        flag = default_flag(1, p)
        reps = {m: valuation_gap(model, flag, m) for m in (1, 2, 3, 4, 10, 50)}
        reports += reps.values()
        decay[p] = reps[50].gap / 50 ** 2 < reps[10].gap / 10 ** 2
    fit = fit_gap_constant(reports)
    ok = spot_ok and all(decay.values()) and fit["fits"]
    acceptance(3, ok, f"spot (p=5,m=4): nu={spot.nu_count}, count={spot.count}, gap={float(spot.gap):.4f}; "
                      f"gap/m^2 decreasing 10->50: {decay}; fitted C={float(fit['C']):.4f}")


def test_criterion_04_okounkov_body(acceptance):
    model = P1(2)
    bodies = {p: okounkov_body(model, default_flag(1, p), 30) for p in (2, 5, 11)}
    count_vhat = vhat_vol_estimate(model, [29, 30]).limit
    target = 2 * LOG2
    b2 = bodies[2]
    vol_ok = abs(b2.volume - 1) <= Fraction(1, 10)
    vhat_ok = abs(b2.vhat_from_body - target) / target <= 0.1
    disc = [abs(bodies[p].vhat_from_body - count_vhat) for p in (2, 5, 11)]
    decreasing = disc[0] > disc[1] > disc[2]
    acceptance(4, vol_ok and vhat_ok and decreasing,
               f"vol(body, p=2) = {b2.volume}; body vhat {float(b2.vhat_from_body):.5f}; "
               f"|body - count| over p=2,5,11: {[f'{float(d):.5f}' for d in disc]}")


def test_criterion_05_counting_lemmas(acceptance):
    t0 = time.perf_counter()
    suite = counting_lemma_suite(500, seed=0)
    sandwich = [check_sandwich_model(P1(q), m, default_flag(1, p))
                for m in range(4) for q in (2, 3) for p in (2, 3, 5)]
    dt = time.perf_counter() - t0
    bad = [r for r in sandwich if not r["pass"]]
    acceptance(5, suite["failures"] == 0 and not bad and dt < 120,
               f"counting lemmas: {suite['checks']} checks, {suite['failures']} failures; "
               f"sandwich: {len(sandwich)} instances, {len(bad)} failures; {dt:.1f}s < 120s")


def test_criterion_06_valuation_identities(acceptance):
    res = [valuation_additivity(200, 6), uniformizer_independence(100, 6), subspace_counts(100, 6)]
    acceptance(6, all(r["failures"] == 0 for r in res),
               "; ".join(f"{r['check']}: {r['instances']} instances, {r['failures']} failures" for r in res))


def test_criterion_07_count_oracle(acceptance):
    r = count_oracle(4, 6)
    acceptance(7, r["failures"] == 0 and r["instances"] == 35,
               f"N(D,R) vs brute force on D<=4, R<=6: {r['instances']} pairs, {r['failures']} mismatches")


def test_criterion_08_fujita(acceptance):
    rows = []
    for n in (1, 2):
        rows += fujita_kfold(P1(2), n, 3)
    ok = all(r["contain_ok"] and r["nu_superset_ok"] and r["normalized"] > 0 for r in rows)
    acceptance(8, ok, "; ".join(f"n={r['n']},k={r['k']}: CL={r['CL_size']}, nu {r['nu_CL']}>={r['nu_kfold']}"
                               for r in rows))


def test_criterion_09_superadditivity_and_lambda(acceptance):
    d1 = superadditivity_check(P1(2), P1(3), [99, 100, 199, 200], SubvarietyY(1, (0,)))
    d2 = superadditivity_check(P1(2), P1(2), [99, 100, 199, 200])
    lam = [lambda_norms(M) for M in random_normed_modules(100, seed=9, max_rank=3)]
    lam_bad = sum(not r["pass"] for r in lam)
    ok = d1["exact_identity"] and d1["pass"] and d2["equality"] and d2["pass"] and lam_bad == 0
    acceptance(9, ok, f"d'=1 exact identity: {d1['exact_identity']}; d'=2 |lhs-rhs| = "
                      f"{float(abs(d2['lhs'] - d2['rhs'])):.2e} <= tol {float(d2['tol']):.2e}; "
                      f"lambda: {len(lam)} instances, {lam_bad} failures")


def _structure(model, Y, ms, samples, rng):
    bad, undecided, cand = [], 0, 0
    for m in ms:
        inc = assignment_inclusions(model, m, Y)
        undecided += inc["undecided"]
        cand += inc["candidates"]
        if not (inc["cl_in_quot"] and inc["quot_in_sub"]):
            bad.append(("inclusion", m))
        for v in VARIANTS:
            if m <= 2 and product_property(model, Y, v, m, 1, samples, rng)["failures"]:
                bad.append(("product", v, m))
    return bad, undecided, cand


def test_criterion_10_assignment_structure(acceptance):
    rng = np.random.default_rng(10)
    bad = []
    for model, Y in [(P1(2), SubvarietyY(1, (0,))), (MetricModel(2, q=Fraction(3, 2)), SubvarietyY(2, (0,))),
                     (MetricModel(2, q=Fraction(3, 2)), SubvarietyY(2, (0, 1)))]:
        bad += _structure(model, Y, (1, 2, 3), 30, rng)[0]
    sup = MetricModel(1, SUP_NUMERIC, Fraction(7, 6))
    und = cand = 0
    for Y in (SubvarietyY.whole(1), SubvarietyY(1, (0,))):
        b, u, c = _structure(sup, Y, (1, 2, 3, 4), 20, rng)
        bad += b
        und += u
        cand += c
    rate = und / cand
    acceptance(10, not bad and rate < 0.05,
               f"inclusion/product failures: {bad}; SUP_NUMERIC q=7/6 n=1 m<=4: {und}/{cand} undecided "
               f"(rate {rate:.2%} < 5%)")
