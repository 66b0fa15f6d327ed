"""Valuation vectors along explicit coordinate flags on projective space over Z.

A flag over the prime ``p`` starts with the fibre at ``p``, then cuts the
fibre by translated coordinate hyperplanes through an F_p-rational point.
Sections are valued by the iterated order / divide / restrict procedure:
first the p-adic order of the content, then orders of vanishing of the
reduction along the chain of local coordinates at the point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from sympy import isprime

from .errors import CapExceeded, FlagError, NotPrime, ZeroSection
from .poly import Exp, Poly, Section, monomials, monomials_upto, poly_mul, poly_pow, rank_mod_p, reduce_mod, translate

ValuationVector = tuple[int, ...]


def _check_prime(p: int) -> int:
    p = int(p)
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class AffineFlag:
    """Full flag of translated coordinate hyperplanes through ``point`` in F_p^n.

    The k-th local coordinate is ``t_k = x_{chain[k]} - point[chain[k]]``.
    ``levels`` optionally states the constants of the hyperplanes
    ``x_{chain[k]} = levels[k]``; they must agree with the point.
    """

    p: int
    point: tuple[int, ...]
    chain: tuple[int, ...]

    def __init__(self, p, point, chain, levels=None):
        p = _check_prime(p)
        point = tuple(int(a) % p for a in point)
        chain = tuple(int(i) for i in chain)
        n = len(point)
        if sorted(chain) != list(range(n)):
            raise FlagError(f"chain {chain} must order all {n} affine coordinates exactly once")
        if levels is not None:
            if len(levels) != n:
                raise FlagError("one level per chain hyperplane")
            for k, b in enumerate(levels):
                if (int(b) - point[chain[k]]) % p:
                    raise FlagError(f"point does not lie on the hyperplane x_{chain[k]} = {b}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "chain", chain)

    @property
    def n(self) -> int:
        return len(self.point)

    def local(self, a: Mapping[Exp, int]) -> Poly:
        """``a`` rewritten in the local coordinates ``t`` (chain order), mod p."""
        reordered = {tuple(e[j] for j in self.chain): c for e, c in a.items()}
        shift = [self.point[j] for j in self.chain]
        return translate(reordered, shift, self.p)


def _ord(a: Poly, i: int) -> int:
    return min(e[i] for e in a)


def _restrict(a: Poly, i: int) -> Poly:
    return {e: c for e, c in a.items() if e[i] == 0}


def _valuation_local(num: Poly, n: int, p: int, units: Sequence[Poly] | None = None) -> ValuationVector:
    """Iterated order/divide/restrict on ``num / den`` in local coordinates."""
    den: Poly = {(0,) * n: 1}
    nu = []
    for i in range(n):
        v = _ord(num, i)
        nu.append(v)
        if v:
            num = {tuple(x - v if j == i else x for j, x in enumerate(e)): c for e, c in num.items()}
            if units is not None and units[i] is not None:
                den = poly_mul(den, poly_pow(units[i], v, n, p), p)
        num = _restrict(num, i)
        den = _restrict(den, i)
        if not den:
            raise FlagError(f"unit u_{i + 1} vanishes at the flag point")
        if not num:
            raise ZeroSection("restriction vanished identically")
    return tuple(nu)


def valuation_vector_poly(a: Mapping[Exp, int], flag: AffineFlag,
                          units: Sequence[Mapping[Exp, int] | None] | None = None) -> ValuationVector:
    """Valuation vector of a polynomial over F_p in ``flag.n`` variables.

    ``units[i]`` (in local coordinates) replaces the uniformiser ``t_i`` by
    ``t_i * units[i]``; the result does not depend on this choice.
    """
    p, n = flag.p, flag.n
    loc = flag.local(reduce_mod(a, p))
    if not loc:
        raise ZeroSection("the zero polynomial has no valuation vector")
    if units is not None:
        checked = []
        for u in units:
            if u is None:
                checked.append(None)
                continue
            u = reduce_mod(u, p)
            if u.get((0,) * n, 0) % p == 0:
                raise FlagError("a unit must not vanish at the flag point")
            checked.append(u)
        units = checked
    return _valuation_local(loc, n, p, units)


@dataclass(frozen=True)
class Flag:
    """Good flag on ``P^n_Z`` over ``p`` through an F_p-point, cut by coordinate hyperplanes.

    ``point`` is stored normalised so that its chart coordinate (the last one
    that is nonzero mod p) equals 1. ``chain`` lists the projective
    coordinates whose translated hyperplanes ``x_j = a_j x_c`` cut the chain.
    """

    n: int
    p: int
    point: tuple[int, ...]
    chain: tuple[int, ...]

    @property
    def d(self) -> int:
        return self.n + 1

    @property
    def chart(self) -> int:
        return max(i for i, a in enumerate(self.point) if a)

    @cached_property
    def affine(self) -> AffineFlag:
        c = self.chart
        others = [j for j in range(self.n + 1) if j != c]
        pos = {j: k for k, j in enumerate(others)}
        return AffineFlag(self.p, [self.point[j] for j in others], [pos[j] for j in self.chain])

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "point": list(self.point), "chain": list(self.chain)}

    @classmethod
    def from_json(cls, d: Mapping) -> "Flag":
        return good_flag_pn(int(d["n"]), int(d["p"]), d["point"], d["chain"])


def good_flag_pn(n: int, p: int, point: Sequence[int], chain: Sequence[int]) -> Flag:
    """Validated coordinate flag on ``P^n_Z`` over ``p``."""
    p = _check_prime(p)
    if n < 0:
        raise FlagError("n must be nonnegative")
    if len(point) != n + 1:
        raise FlagError(f"point needs {n + 1} homogeneous coordinates")
    red = [int(a) % p for a in point]
    if not any(red):
        raise FlagError("point is zero mod p")
    c = max(i for i, a in enumerate(red) if a)
    inv = pow(red[c], -1, p)
    norm = tuple(a * inv % p for a in red)
    chain = tuple(int(i) for i in chain)
    if len(chain) != n:
        raise FlagError(f"chain must have {n} hyperplanes")
    if len(set(chain)) != n:
        raise FlagError("duplicate chain hyperplanes")
    for j in chain:
        if not 0 <= j <= n:
            raise FlagError(f"coordinate index {j} out of range")
        if j == c:
            raise FlagError(f"coordinate {j} is the chart coordinate; its hyperplane misses the point")
    return Flag(n, p, norm, chain)


def padic_order(x: int, p: int) -> int:
    x = abs(int(x))
    if x == 0:
        raise ZeroSection("order of zero")
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


def chart_poly(s: Section, flag: Flag) -> Poly:
    """``s`` mod p dehomogenised at the chart coordinate (``omega = x_c^m``)."""
    c = flag.chart
    return reduce_mod({tuple(x for j, x in enumerate(e) if j != c): v for e, v in s.terms}, flag.p)


def valuation_section(s: Section, flag: Flag, units=None) -> ValuationVector:
    """The length ``n + 1`` valuation vector of a nonzero section."""
    if s.is_zero():
        raise ZeroSection("the zero section has no valuation vector")
    if s.n != flag.n:
        raise FlagError(f"section on P^{s.n} but flag on P^{flag.n}")
    p = flag.p
    v1 = padic_order(s.content(), p)
    reduced = Section.from_dict(s.n, s.m, {e: c // p ** v1 for e, c in s.terms})
    return (v1,) + valuation_vector_poly(chart_poly(reduced, flag), flag.affine, units)


class ValuationTable:
    """Vectorised valuation of many degree ``m`` sections given as coefficient vectors.

    Coefficient vectors use the lex-descending monomial basis of
    :func:`okv.poly.monomials`. A precomputed matrix maps the reduction mod p
    to coefficients in local coordinates; the tail of the valuation vector is
    the lex-smallest surviving local exponent.
    """

    def __init__(self, flag: Flag, m: int):
        self.flag = flag
        self.m = m
        n = flag.n
        self.local_monomials = sorted(monomials_upto(n, m))
        col = {e: i for i, e in enumerate(self.local_monomials)}
        mons = monomials(n + 1, m)
        T = np.zeros((len(mons), len(col)), dtype=np.int64)
        for r, e in enumerate(mons):
            loc = flag.affine.local(chart_poly(Section.monomial(e), flag))
            for le, c in loc.items():
                T[r, col[le]] = c
        self.T = T
        self._exps = np.array(self.local_monomials, dtype=np.int64).reshape(len(col), n)

    def __call__(self, vectors) -> np.ndarray:
        V = np.asarray(vectors)
        if V.ndim == 1:
            V = V[None, :]
        p = self.flag.p
        if V.dtype != object and V.size and np.abs(V).max() >= 2 ** 62:
            V = V.astype(object)
        N = len(V)
        nonzero = (V != 0).any(axis=1)
        if not nonzero.all():
            raise ZeroSection("the zero section has no valuation vector")
        v1 = np.zeros(N, dtype=np.int64)
        W = V.copy()
        active = np.ones(N, dtype=bool)
        while True:
            divisible = active & (W % p == 0).all(axis=1)
            if not divisible.any():
                break
            W[divisible] //= p
            v1[divisible] += 1
            active = divisible
        R = (W % p).astype(np.int64)
        loc = (R @ self.T) % p
        first = (loc != 0).argmax(axis=1)
        return np.hstack([v1[:, None], self._exps[first]])


def valuation_image_count(basis: Sequence[Mapping[Exp, int]], flag: AffineFlag, cap: int = 10 ** 7) -> dict:
    """``#nu(V minus 0)`` for the F_p-span ``V`` of ``basis``, by full enumeration."""
    p, n = flag.p, flag.n
    if not basis:
        return {"count": 0, "dim": 0, "equal": True}
    locs = [flag.local(reduce_mod(b, p)) for b in basis]
    if any(not loc for loc in locs):
        raise ZeroSection("basis elements must be nonzero mod p")
    deg = max(sum(e) for loc in locs for e in loc)
    cols = sorted(monomials_upto(n, deg))
    colidx = {e: i for i, e in enumerate(cols)}
    B = np.zeros((len(locs), len(cols)), dtype=np.int64)
    for i, loc in enumerate(locs):
        for e, c in loc.items():
            B[i, colidx[e]] = c
    dim = rank_mod_p(B.tolist(), p)
    k = len(locs)
    total = p ** k
    if total > cap:
        raise CapExceeded("subspace enumeration", total, cap)
    C = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64)
    V = (C @ B) % p
    V = V[(V != 0).any(axis=1)]
    firsts = set(int(i) for i in (V != 0).argmax(axis=1))
    count = len(firsts)
    return {"count": count, "dim": dim, "equal": count == dim}
