"""Seeded randomized self-checks of identities that must hold exactly."""
from __future__ import annotations

import itertools
import random

from .cones import counting_lemma_suite
from .exact import hnf, l1_ball_count
from .flags import AffineFlag, good_flag_pn, valuation_image_count, valuation_section, valuation_vector_poly
from .poly import Section, monomials, monomials_upto


def _result(check: str, instances: int, failures: list) -> dict:
    return {"check": check, "instances": instances, "failures": len(failures), "examples": failures[:3]}


def hnf_canonicity(instances: int, seed: int) -> dict:
    """The HNF of ``A`` and of ``U A`` agree for random unimodular ``U``."""
    rng = random.Random(seed)
    bad = []
    for _ in range(instances):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        A = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        B = [list(r) for r in A]
        for _ in range(6):
            i, j = rng.sample(range(rows), 2) if rows > 1 else (0, 0)
            if i != j:
                c = rng.randint(-3, 3)
                B[i] = [x + c * y for x, y in zip(B[i], B[j])]
            if rng.random() < 0.3:
                B[i] = [-x for x in B[i]]
            if rng.random() < 0.3 and i != j:
                B[i], B[j] = B[j], B[i]
        H1, U = hnf(A)
        H2, _ = hnf(B)
        prod = [[sum(u * a for u, a in zip(urow, col)) for col in zip(*A)] for urow in U]
        ok = H1 == H2 and [tuple(r) for r in prod[:H1.rank]] == list(H1.basis) and not any(
            any(r) for r in prod[H1.rank:])
        if not ok:
            bad.append({"A": A, "B": B})
    return _result("hnf-canonical", instances, bad)


def _random_section(rng: random.Random, n: int, m: int) -> Section:
    while True:
        terms = {e: rng.randint(-6, 6) for e in rng.sample(monomials(n + 1, m), min(3, len(monomials(n + 1, m))))}
        s = Section.from_dict(n, m, terms)
        if not s.is_zero():
            return s


def _random_flag(rng: random.Random, n: int, p: int):
    while True:
        point = [rng.randrange(p) for _ in range(n + 1)]
        if any(point):
            break
    c = max(i for i, a in enumerate(point) if a)
    chain = [j for j in range(n + 1) if j != c]
    rng.shuffle(chain)
    return good_flag_pn(n, p, point, chain)


def valuation_additivity(pairs: int, seed: int) -> dict:
    """``nu(ab) = nu(a) + nu(b)`` for random sections and flags."""
    rng = random.Random(seed)
    bad = []
    for _ in range(pairs):
        n, p = rng.randint(1, 2), rng.choice([2, 3, 5])
        flag = _random_flag(rng, n, p)
        a = _random_section(rng, n, rng.randint(1, 3)).scale(p ** rng.randint(0, 2))
        b = _random_section(rng, n, rng.randint(1, 3))
        lhs = valuation_section(a * b, flag)
        rhs = tuple(x + y for x, y in zip(valuation_section(a, flag), valuation_section(b, flag)))
        if lhs != rhs:
            bad.append({"a": a.to_dict(), "b": b.to_dict(), "flag": flag.to_dict()})
    return _result("valuation-additivity", pairs, bad)


def uniformizer_independence(instances: int, seed: int) -> dict:
    """Replacing each ``t_i`` by ``t_i * u_i`` for random units leaves valuations unchanged."""
    rng = random.Random(seed)
    bad = []
    done = 0
    while done < instances:
        n, p = rng.randint(1, 3), rng.choice([2, 3, 5])
        flag = AffineFlag(p, [rng.randrange(p) for _ in range(n)], rng.sample(range(n), n))
        a = {e: rng.randint(-5, 5) for e in rng.sample(monomials_upto(n, 3), 4)}
        if not any(c % p for c in a.values()):
            continue
        done += 1
        base = valuation_vector_poly(a, flag)
        units = []
        for _ in range(n):
            u = {e: rng.randrange(p) for e in rng.sample(monomials_upto(n, 2), 3)}
            u[(0,) * n] = rng.randrange(1, p)
            units.append(u)
        if valuation_vector_poly(a, flag, units) != base:
            bad.append({"a": {str(k): v for k, v in a.items()}, "p": p})
    return _result("uniformizer-independence", instances, bad)


def subspace_counts(instances: int, seed: int) -> dict:
    """``#nu(V minus 0) = dim V`` for random F_p-subspaces of polynomials."""
    rng = random.Random(seed)
    bad = []
    for _ in range(instances):
        p = rng.choice([2, 3, 5])
        n = rng.randint(1, 2)
        k = rng.randint(1, 6 if p == 2 else (4 if p == 3 else 3))
        flag = AffineFlag(p, [rng.randrange(p) for _ in range(n)], rng.sample(range(n), n))
        basis = []
        while len(basis) < k:
            b = {e: rng.randrange(p) for e in rng.sample(monomials_upto(n, 3), 3)}
            if any(b.values()):
                basis.append(b)
        res = valuation_image_count(basis, flag)
        if not res["equal"]:
            bad.append({"p": p, "dim": res["dim"], "count": res["count"]})
    return _result("subspace-valuation-count", instances, bad)


def count_oracle(d_max: int = 4, r_max: int = 6) -> dict:
    """The closed-form l1 count against brute force for all small ``D, R``."""
    bad = []
    total = 0
    for D in range(d_max + 1):
        for R in range(r_max + 1):
            total += 1
            brute = sum(1 for v in itertools.product(range(-R, R + 1), repeat=D) if sum(map(abs, v)) <= R)
            if brute != l1_ball_count(D, R):
                bad.append({"D": D, "R": R})
    return _result("l1-count-formula", total, bad)


def run_selftest(seed: int, instances: int = 500) -> list[dict]:
    suite = counting_lemma_suite(instances, seed)
    out = [{"check": "counting-lemma", "instances": suite["checks"], "failures": suite["failures"],
            "examples": [r for r in suite["reports"] if not r["pass"]][:3]}]
    out.append(hnf_canonicity(200, seed))
    out.append(valuation_additivity(200, seed))
    out.append(uniformizer_independence(100, seed))
    out.append(subspace_counts(100, seed))
    out.append(count_oracle())
    return out
