"""Homogeneous integer polynomials (sections) and sparse polynomials over F_p.

Polynomials are dicts mapping exponent tuples to coefficients. The monomial
basis of degree ``m`` forms in ``n + 1`` variables is ordered lexicographically
descending, so on the projective line index ``j`` is ``x^(m-j) y^j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch

Exp = tuple[int, ...]
Poly = dict  # Exp -> int


@lru_cache(maxsize=None)
def monomials(nvars: int, m: int) -> tuple[Exp, ...]:
    """Exponent tuples of length ``nvars`` summing to ``m``, lex descending."""
    if nvars == 0:
        return ((),) if m == 0 else ()
    if nvars == 1:
        return ((m,),)
    out = []
    for e0 in range(m, -1, -1):
        out.extend((e0,) + rest for rest in monomials(nvars - 1, m - e0))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, m: int) -> dict[Exp, int]:
    return {e: i for i, e in enumerate(monomials(nvars, m))}


def monomials_upto(nvars: int, m: int) -> list[Exp]:
    """All exponents of total degree at most ``m`` in ``nvars`` variables."""
    return [e for e in product(range(m + 1), repeat=nvars) if sum(e) <= m]


@dataclass(frozen=True)
class Section:
    """A degree ``m`` form in ``n + 1`` variables with integer coefficients."""

    n: int
    m: int
    terms: tuple[tuple[Exp, int], ...]

    def __post_init__(self):
        for e, c in self.terms:
            if len(e) != self.n + 1 or sum(e) != self.m or min(e) < 0:
                raise DimensionMismatch(f"exponent {e} is not a degree {self.m} monomial in {self.n + 1} variables")
            if c == 0:
                raise ValueError("zero coefficients are not stored")

    @classmethod
    def from_dict(cls, n: int, m: int, coeffs: Mapping[Sequence[int], int]) -> "Section":
        acc: dict[Exp, int] = {}
        for e, c in coeffs.items():
            e = tuple(int(x) for x in e)
            acc[e] = acc.get(e, 0) + int(c)
        return cls(n, m, tuple(sorted(((e, c) for e, c in acc.items() if c), reverse=True)))

    @classmethod
    def from_vector(cls, n: int, m: int, vec: Sequence[int]) -> "Section":
        mons = monomials(n + 1, m)
        if len(vec) != len(mons):
            raise DimensionMismatch(f"expected {len(mons)} coefficients, got {len(vec)}")
        return cls(n, m, tuple((e, int(c)) for e, c in zip(mons, vec) if c))

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: int = 1) -> "Section":
        return cls.from_dict(len(exps) - 1, sum(exps), {tuple(exps): coeff})

    @property
    def coeffs(self) -> dict[Exp, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_vector(self) -> list[int]:
        idx = monomial_index(self.n + 1, self.m)
        v = [0] * len(idx)
        for e, c in self.terms:
            v[idx[e]] = c
        return v

    def l1(self) -> int:
        return sum(abs(c) for _, c in self.terms)

    def content(self) -> int:
        if not self.terms:
            raise ValueError("content of the zero section")
        return math.gcd(*(c for _, c in self.terms))

    def __mul__(self, other: "Section") -> "Section":
        if self.n != other.n:
            raise DimensionMismatch("sections on different projective spaces")
        return Section.from_dict(self.n, self.m + other.m, poly_mul(self.coeffs, other.coeffs))

    def __neg__(self):
        return Section(self.n, self.m, tuple((e, -c) for e, c in self.terms))

    def scale(self, k: int) -> "Section":
        return Section.from_dict(self.n, self.m, {e: k * c for e, c in self.terms})

    def restrict(self, killed: Sequence[int]) -> "Section":
        """Set the variables in ``killed`` to zero; result lives on the surviving coordinates."""
        killed = set(killed)
        keep = [i for i in range(self.n + 1) if i not in killed]
        if not keep:
            raise ValueError("restriction to the empty subvariety")
        out = {tuple(e[i] for i in keep): c for e, c in self.terms if all(e[i] == 0 for i in killed)}
        return Section.from_dict(len(keep) - 1, self.m, out)

    def to_dict(self) -> dict:
        return {"m": self.m, "coeffs": {",".join(map(str, e)): str(c) for e, c in self.terms}}

    @classmethod
    def from_json(cls, d: Mapping) -> "Section":
        coeffs = {tuple(int(x) for x in k.split(",")): int(v) for k, v in d["coeffs"].items()}
        if not coeffs:
            raise ValueError("cannot infer the number of variables of an empty section")
        n = len(next(iter(coeffs))) - 1
        return cls.from_dict(n, int(d["m"]), coeffs)


def poly_mul(a: Mapping[Exp, int], b: Mapping[Exp, int], p: int | None = None) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return _clean(out, p)


def poly_add(a: Mapping[Exp, int], b: Mapping[Exp, int], p: int | None = None) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return _clean(out, p)


def poly_pow(a: Mapping[Exp, int], k: int, nvars: int, p: int | None = None) -> Poly:
    out: Poly = {(0,) * nvars: 1}
    base = dict(a)
    while k:
        if k & 1:
            out = poly_mul(out, base, p)
        k >>= 1
        if k:
            base = poly_mul(base, base, p)
    return out


def _clean(a: Poly, p: int | None) -> Poly:
    if p is None:
        return {e: c for e, c in a.items() if c}
    return {e: c % p for e, c in a.items() if c % p}


def reduce_mod(a: Mapping[Exp, int], p: int) -> Poly:
    return _clean(dict(a), p)


def translate(a: Mapping[Exp, int], shift: Sequence[int], p: int) -> Poly:
    """Substitute ``x_j = t_j + shift_j`` and reduce mod ``p``."""
    nv = len(shift)
    out: Poly = {}
    for e, c in a.items():
        term: Poly = {(0,) * nv: c % p}
        for j, (ej, sj) in enumerate(zip(e, shift)):
            if ej == 0:
                continue
            # (t_j + s_j)^ej by the binomial theorem
            fac = {}
            for k in range(ej + 1):
                coef = math.comb(ej, k) * pow(sj, ej - k, p) % p
                if coef:
                    ek = [0] * nv
                    ek[j] = k
                    fac[tuple(ek)] = coef
            term = poly_mul(term, fac, p)
        out = poly_add(out, term, p)
    return out


def rank_mod_p(rows, p: int) -> int:
    """Rank over F_p of an integer matrix (rows may be a large array)."""
    A = np.asarray(rows, dtype=object) if len(rows) else np.zeros((0, 0), dtype=np.int64)
    if A.size == 0:
        return 0
    A = np.unique((A % p).astype(np.int64), axis=0)
    r = 0
    for c in range(A.shape[1]):
        nz = np.flatnonzero(A[:, c])
        if not len(nz):
            continue
        piv = A[nz[0]] * pow(int(A[nz[0], c]), -1, p) % p
        A = (A - np.outer(A[:, c], piv)) % p
        A = A[(A != 0).any(axis=1)]
        r += 1
        if not len(A):
            break
    return r
