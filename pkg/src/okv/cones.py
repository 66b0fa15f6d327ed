"""Rational cones, saturation, m-fold sums, convex lattices and counting lemma checks."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch, NotSymmetric
from .exact import (Lattice, RationalPolytope, convex_hull, count_lattice_points, enumerate_lattice_points,
                    rationalize_combination, span_many)
from .exact.enumerate import DEFAULT_CAP
from .jsonio import content_hash, fmt_log, log_int

IntVector = tuple[int, ...]


def _as_points(K: Iterable) -> list[IntVector]:
    out = []
    for k in K:
        out.append((int(k),) if isinstance(k, (int, np.integer)) else tuple(int(x) for x in k))
    if out and any(len(v) != len(out[0]) for v in out):
        raise DimensionMismatch("points of different lengths")
    return out


def canonical(K: Iterable) -> list[IntVector]:
    """Deduplicated, lexicographically sorted list of integer vectors."""
    return sorted(set(_as_points(K)))


@dataclass(frozen=True)
class SemigroupPresentation:
    """Generators of an additive semigroup in ``Z^n``; ``contains_zero`` adjoins 0."""

    ambient_dim: int
    generators: tuple[IntVector, ...]
    contains_zero: bool = False

    @classmethod
    def of(cls, gens: Iterable, contains_zero: bool = False) -> "SemigroupPresentation":
        pts = canonical(gens)
        if not pts:
            raise ValueError("need at least one generator")
        return cls(len(pts[0]), tuple(pts), contains_zero)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "contains_zero": self.contains_zero,
                "generators": [[str(x) for x in g] for g in self.generators]}


@dataclass(frozen=True)
class ConvexLattice:
    """``points = lattice ∩ hull``, enumerated in canonical order."""

    lattice: Lattice
    hull: RationalPolytope
    points: tuple[IntVector, ...]

    def __len__(self):
        return len(self.points)

    def __contains__(self, v) -> bool:
        v = tuple(int(x) for x in v)
        return v in self.lattice and self.hull.contains(v)


def mfold_sum(K: Iterable, m: int, cap: int = DEFAULT_CAP) -> list[IntVector]:
    """``{x_1 + ... + x_m : x_i in K}``, deduplicated and sorted."""
    if m < 1:
        raise ValueError("m must be positive")
    base = np.array(canonical(K), dtype=np.int64)
    if len(base) == 0:
        raise ValueError("K must be nonempty")
    cur = base
    for _ in range(m - 1):
        predicted = len(cur) * len(base)
        if predicted > cap:
            raise CapExceeded("m-fold sum", predicted, cap)
        cur = np.unique((cur[:, None, :] + base[None, :, :]).reshape(-1, base.shape[1]), axis=0)
    return [tuple(int(x) for x in row) for row in cur]


def convex_lattice_hull(K: Iterable, cap: int = DEFAULT_CAP) -> ConvexLattice:
    """``CL(K) = <K>_Z ∩ Conv(K)``."""
    pts = canonical(K)
    if not pts:
        raise ValueError("K must be nonempty")
    X = np.array(pts, dtype=object)
    if max(abs(x) for v in pts for x in v) < 2 ** 31:
        X = X.astype(np.int64)
    L = span_many(X)
    P = convex_hull(X)
    return ConvexLattice(L, P, tuple(enumerate_lattice_points(L, P, cap)))


def is_convex_lattice(K: Iterable, cap: int = DEFAULT_CAP) -> bool:
    pts = canonical(K)
    if not pts:
        return True
    return list(convex_lattice_hull(pts, cap).points) == pts


def _positive_zero_combination(gens: Sequence[IntVector]) -> list[Fraction] | None:
    n = len(gens[0])
    return rationalize_combination(gens, [0] * n, ([[1] * len(gens)], [1]))


def cone_membership_Q(gens: SemigroupPresentation, x: Sequence) -> bool:
    """Is ``x`` a combination of some nonempty sub-list of generators with positive rational weights?"""
    if len(x) != gens.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(x)} vs generators in dimension {gens.ambient_dim}")
    if not any(Fraction(v) for v in x):
        return gens.contains_zero or _positive_zero_combination(gens.generators) is not None
    return rationalize_combination(gens.generators, x) is not None


def cone_coefficients(gens: SemigroupPresentation, x: Sequence) -> list[Fraction] | None:
    """Nonnegative rational weights exhibiting ``x`` in the cone (None if not a member)."""
    if not any(Fraction(v) for v in x):
        if gens.contains_zero:
            return [Fraction(0)] * len(gens.generators)
        return _positive_zero_combination(gens.generators)
    return rationalize_combination(gens.generators, x)


def sat_certificate(gens: SemigroupPresentation, x: Sequence[int]) -> tuple[int, list[int]] | None:
    """``(k, c)`` with ``k * x = sum c_i g_i``, ``c_i >= 0`` integers, or None if ``x`` is not saturated.

    For ``x = 0`` with ``contains_zero`` the certificate is ``(1, zeros)``.
    """
    if len(x) != gens.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(x)} vs generators in dimension {gens.ambient_dim}")
    lam = cone_coefficients(gens, x)
    if lam is None:
        return None
    k = 1
    for v in lam:
        k = math.lcm(k, v.denominator)
    return k, [int(v * k) for v in lam]


def sat_membership(gens: SemigroupPresentation, x: Sequence[int]) -> bool:
    """Is some positive multiple of ``x`` in the semigroup generated by ``gens``?"""
    return sat_certificate(gens, x) is not None


def cone_open_probe(gens: SemigroupPresentation, a: Sequence, x: Sequence, depth: int = 20) -> Fraction | None:
    """Some dyadic ``delta = 2^-k`` (k <= depth) with ``a + delta x`` in the cone, or None."""
    if not cone_membership_Q(gens, a):
        raise ValueError("precondition violated: a is not in the rational cone")
    if len(x) != gens.ambient_dim:
        raise DimensionMismatch("direction has the wrong length")
    for k in range(depth + 1):
        delta = Fraction(1, 2 ** k)
        if cone_membership_Q(gens, [Fraction(ai) + delta * Fraction(xi) for ai, xi in zip(a, x)]):
            return delta
    return None


def cone_sum_witness(S: Sequence, T: Sequence, x: Sequence):
    """Split ``x`` in ``Cone(S + T)`` as ``u + v`` with ``u`` in ``Cone(S)``, ``v`` in ``Cone(T)``.

    Returns ``(u, v, lam_S, lam_T)`` with explicit nonnegative weights, or None
    when ``x`` is not in ``Cone(S + T)``.
    """
    S, T = _as_points(S), _as_points(T)
    pairs = [(i, j) for i in range(len(S)) for j in range(len(T))]
    sums = [tuple(a + b for a, b in zip(S[i], T[j])) for i, j in pairs]
    lam = cone_coefficients(SemigroupPresentation.of(sums), x) if sums else None
    if lam is None:
        return None
    # cone_coefficients works on the canonical generator order
    canon = canonical(sums)
    weight = {g: w for g, w in zip(canon, lam)}
    lam_S = [Fraction(0)] * len(S)
    lam_T = [Fraction(0)] * len(T)
    used: set = set()
    for (i, j), sv in zip(pairs, sums):
        if sv in used:
            continue
        used.add(sv)
        w = weight[sv]
        lam_S[i] += w
        lam_T[j] += w
    u = tuple(sum(w * s[k] for w, s in zip(lam_S, S)) for k in range(len(x)))
    v = tuple(sum(w * t[k] for w, t in zip(lam_T, T)) for k in range(len(x)))
    return u, v, lam_S, lam_T


def is_symmetric(K: Iterable) -> bool:
    pts = set(_as_points(K))
    return all(tuple(-x for x in v) in pts for v in pts)


def _apply(matrix: Sequence[Sequence[int]], moduli: Sequence[int] | None, pts: np.ndarray) -> np.ndarray:
    out = pts @ np.array(matrix, dtype=np.int64)
    if moduli is not None:
        for j, q in enumerate(moduli):
            if q:
                out[:, j] %= q
    return out


def _report(lemma: str, instance: dict, seed, lhs, rhs, ok: bool, counts: dict) -> dict:
    return {"lemma": lemma, "instance_hash": content_hash(instance), "seed": seed,
            "lhs": fmt_log(lhs), "rhs": fmt_log(rhs), "pass": bool(ok),
            "counts": {k: str(v) for k, v in counts.items()}}


def check_counting_lemma(K: Iterable, matrix: Sequence[Sequence[int]], moduli: Sequence[int] | None = None,
                         seed=None, cap: int = DEFAULT_CAP) -> list[dict]:
    """Both counting inequalities for a symmetric finite ``K`` and ``r(x) = x @ matrix`` (mod moduli).

    eq1: ``#r(K) * #(Ker ∩ 2*K) >= #K``; eq2: ``#r(K) * #(Ker ∩ K) <= #(2*K)``,
    compared exactly on integers and reported in logarithmic form.
    """
    pts = canonical(K)
    if not is_symmetric(pts):
        raise NotSymmetric("K must satisfy -K = K")
    if len(matrix) != len(pts[0]):
        raise DimensionMismatch("the map must have one row per ambient coordinate")
    A = np.array(pts, dtype=np.int64)
    K2 = np.array(mfold_sum(pts, 2, cap), dtype=np.int64)
    rK = np.unique(_apply(matrix, moduli, A), axis=0)
    ker_K = int((_apply(matrix, moduli, A) == 0).all(axis=1).sum())
    ker_2K = int((_apply(matrix, moduli, K2) == 0).all(axis=1).sum())
    nK, n2K, nr = len(pts), len(K2), len(rK)
    instance = {"K": pts, "matrix": [list(map(int, r)) for r in matrix], "moduli": list(moduli or [])}
    counts = {"r(K)": nr, "K": nK, "Ker∩2K": ker_2K, "2K": n2K, "Ker∩K": ker_K}
    eq1 = _report("counting-lemma:eq1", instance, seed, log_int(nr), log_int(nK) - log_int(ker_2K),
                  nr * ker_2K >= nK, counts)
    eq2 = _report("counting-lemma:eq2", instance, seed, log_int(nr), log_int(n2K) - log_int(ker_K),
                  nr * ker_K <= n2K, counts)
    return [eq1, eq2]


def check_dilation_bound(L: Lattice, delta: RationalPolytope, a, seed=None, cap: int = DEFAULT_CAP) -> dict:
    """``0 <= log#(L ∩ a Δ) - log#(L ∩ Δ) <= rank(L) log ceil(2a)`` for symmetric bounded ``Δ``."""
    a = Fraction(a)
    if a < 1:
        raise ValueError("dilation factor must be at least 1")
    if not delta.is_symmetric():
        raise NotSymmetric("Δ must be symmetric")
    c1 = count_lattice_points(L, delta, cap)
    c2 = count_lattice_points(L, delta.scale(a), cap)
    k = math.ceil(2 * a) ** L.rank
    diff = log_int(c2) - log_int(c1)
    instance = {"lattice": L.to_dict(), "delta": delta.to_dict(), "a": str(a)}
    return _report("counting-lemma:eq3", instance, seed, diff, log_int(k), c1 <= c2 <= k * c1,
                   {"L∩Δ": c1, "L∩aΔ": c2, "ceil(2a)^rank": k})


def _random_symmetric_set(rng: random.Random, dim: int, max_size: int) -> list[IntVector]:
    span = rng.randint(1, 4)
    pts: set = set()
    target = rng.randint(1, max_size // 2)
    for _ in range(target):
        v = tuple(rng.randint(-span, span) for _ in range(dim))
        pts.add(v)
        pts.add(tuple(-x for x in v))
    if rng.random() < 0.5:
        pts.add((0,) * dim)
    out = sorted(pts)
    while len(out) > max_size:
        v = out[-1]
        pts.discard(v)
        pts.discard(tuple(-x for x in v))
        out = sorted(pts)
    return out


def counting_lemma_suite(instances: int = 500, seed: int = 0, max_rank: int = 3, max_size: int = 50) -> dict:
    """Seeded random instances of all three counting inequalities."""
    rng = random.Random(seed)
    reports = []
    for t in range(instances):
        dim = rng.randint(1, max_rank)
        K = _random_symmetric_set(rng, dim, max_size)
        s = rng.randint(1, 3)
        matrix = [[rng.randint(-3, 3) for _ in range(s)] for _ in range(dim)]
        moduli = [rng.choice([0, 0, 2, 3, 5]) for _ in range(s)] if rng.random() < 0.4 else None
        reports.extend(check_counting_lemma(K, matrix, moduli, seed=[seed, t]))
        rank = rng.randint(1, dim)
        gens = [[rng.randint(-3, 3) for _ in range(dim)] for _ in range(rank)]
        L = Lattice.span(gens, dim)
        if L.rank == 0:
            L = Lattice.full(dim)
        raw = [[Fraction(rng.randint(-12, 12), rng.randint(1, 3)) for _ in range(dim)] for _ in range(rng.randint(1, 4))]
        raw += [[-x for x in v] for v in raw]
        delta = convex_hull(raw)
        a = Fraction(rng.randint(4, 12), 4)
        reports.append(check_dilation_bound(L, delta, a, seed=[seed, t]))
    failures = [r for r in reports if not r["pass"]]
    return {"instances": instances, "seed": seed, "checks": len(reports), "failures": len(failures),
            "reports": reports}
