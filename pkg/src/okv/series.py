"""Norm-family models on projective space over Z and their small-section series.

Two kinds of model are provided. ``L1_TWIST`` measures a degree ``a*m`` form
by the l1 norm of its coefficients against the radius ``q^m``; everything is
exact and counts have a closed form. ``SUP_NUMERIC`` uses the sup norm on the
unit sphere with certified enclosures and is meant for small cross-checks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .cones import convex_lattice_hull
from .errors import CapExceeded, DimensionMismatch, FlagError
from .exact.enumerate import l1_ball_count, l1_ball_points
from .flags import Flag, ValuationTable
from .jsonio import content_hash, decode_rat, encode_rat
from .poly import Section, monomials, monomials_upto
from .supnorm import IN, OUT, UNDECIDED, decide_sup, sup_ball_points

log = logging.getLogger(__name__)

L1_TWIST = "L1_TWIST"
SUP_NUMERIC = "SUP_NUMERIC"
VARIANTS = ("CL", "QUOT", "SUB")
DEFAULT_SERIES_CAP = 2 * 10 ** 6


@dataclass(frozen=True)
class MetricModel:
    """``O(degree)`` on ``P^n_Z`` with the norm family twisted by the constant ``q``.

    At level ``m`` the sections are integer forms of degree ``degree * m``
    and the unit ball is the norm ball of radius ``q^m``.
    """

    n: int
    kind: str = L1_TWIST
    q: Fraction = Fraction(1)
    degree: int = 1
    precision_bits: int = 128

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.kind not in (L1_TWIST, SUP_NUMERIC):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.q <= 0:
            raise ValueError("the twist q must be positive")
        if self.n < 0 or self.degree < 1:
            raise ValueError("need n >= 0 and degree >= 1")
        if self.precision_bits < 53:
            raise ValueError("precision_bits must be at least 53")

    def radius(self, m: int) -> Fraction:
        return self.q ** m

    def int_radius(self, m: int) -> int:
        return math.floor(self.q ** m)

    def section_degree(self, m: int) -> int:
        return self.degree * m

    def rank(self, m: int, nvars: int | None = None) -> int:
        k = (self.n + 1) if nvars is None else nvars
        return math.comb(self.degree * m + k - 1, k - 1)

    def to_dict(self) -> dict:
        d = {"n": self.n, "kind": self.kind, "q": encode_rat(self.q)}
        if self.degree != 1:
            d["degree"] = self.degree
        if self.kind == SUP_NUMERIC:
            d["precision_bits"] = self.precision_bits
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "MetricModel":
        return cls(int(d["n"]), d.get("kind", L1_TWIST), decode_rat(d["q"]), int(d.get("degree", 1)),
                   int(d.get("precision_bits", 128)))

    @property
    def hash(self) -> str:
        return content_hash(self.to_dict())


def twist(model: MetricModel, mu) -> MetricModel:
    """The model twisted by the constant ``log mu``: ``q -> q * mu``."""
    mu = Fraction(mu)
    if mu <= 0:
        raise ValueError("twist factor must be positive")
    return replace(model, q=model.q * mu)


def model_sum(a: MetricModel, b: MetricModel) -> MetricModel:
    """Tensor product model: degrees add and twists multiply."""
    if a.n != b.n or a.kind != b.kind:
        raise ValueError("models must live on the same space and be of the same kind")
    return replace(a, q=a.q * b.q, degree=a.degree + b.degree)


@dataclass(frozen=True)
class SubvarietyY:
    """The coordinate subspace ``{x_i = 0 : i in killed}`` of ``P^n_Z``."""

    n: int
    killed: tuple[int, ...] = ()

    def __post_init__(self):
        k = tuple(sorted(set(int(i) for i in self.killed)))
        if any(not 0 <= i <= self.n for i in k):
            raise ValueError("coordinate index out of range")
        if len(k) > self.n:
            raise ValueError("Y would be empty")
        object.__setattr__(self, "killed", k)

    @classmethod
    def whole(cls, n: int) -> "SubvarietyY":
        return cls(n, ())

    @property
    def surviving(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n + 1) if i not in self.killed)

    @property
    def d_prime(self) -> int:
        return len(self.surviving)

    @property
    def is_whole(self) -> bool:
        return not self.killed

    def label(self) -> str:
        return "X" if self.is_whole else "{" + ",".join(f"x{i}=0" for i in self.killed) + "}"

    def to_dict(self) -> dict:
        return {"n": self.n, "killed": list(self.killed)}


@lru_cache(maxsize=None)
def restriction_columns(n: int, deg: int, killed: tuple[int, ...]) -> tuple[int, ...]:
    """Indices of ambient monomials that survive on Y, in Y's monomial order."""
    keep = [i for i in range(n + 1) if i not in killed]
    idx = {e: i for i, e in enumerate(monomials(n + 1, deg))}
    cols = []
    for ey in monomials(len(keep), deg):
        e = [0] * (n + 1)
        for j, x in zip(keep, ey):
            e[j] = x
        cols.append(idx[tuple(e)])
    return tuple(cols)


@dataclass(frozen=True)
class NormResult:
    """``||s|| / q^m`` as an enclosure, with the ball membership decision."""

    status: str
    ratio_lower: float | Fraction
    ratio_upper: float | Fraction
    exact: bool

    @property
    def in_ball(self) -> bool:
        return self.status == IN


def norm_log(s: Section, m: int, model: MetricModel) -> NormResult:
    """Decide ``||s|| <= q^m`` (exactly for l1, certified for the sup norm)."""
    if s.n != model.n or s.m != model.section_degree(m):
        raise DimensionMismatch(f"section of degree {s.m} on P^{s.n} does not match level {m} of the model")
    bound = model.radius(m)
    if model.kind == L1_TWIST:
        r = Fraction(s.l1()) / bound
        return NormResult(IN if r <= 1 else OUT, r, r, True)
    d = decide_sup([e for e, _ in s.terms], [c for _, c in s.terms], bound, model.precision_bits)
    if d.status == UNDECIDED:
        log.info("sup norm membership undecided for %s at level %d", s.to_dict(), m)
    b = float(bound)
    return NormResult(d.status, d.lower / b, d.upper / b, d.precision == "exact")


@dataclass
class ArithLinearSeries:
    """A symmetric convex lattice of small sections at level ``m``.

    ``points`` holds coefficient vectors in the monomial basis of the
    surviving coordinates (None when only counted). For certified-numeric
    models ``count`` is a lower bound and ``count_upper`` an upper bound.
    """

    model: MetricModel
    m: int
    Y: SubvarietyY
    variant: str
    count: int
    count_upper: int
    points: np.ndarray | None = None
    method: str = "enumerated"
    undecided: np.ndarray | None = None
    stats: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return self.Y.d_prime

    @property
    def rank(self) -> int:
        return self.model.rank(self.m, self.nvars)

    @property
    def exps(self) -> tuple:
        return monomials(self.nvars, self.model.section_degree(self.m))

    @property
    def exact(self) -> bool:
        return self.count == self.count_upper

    def point_set(self) -> set:
        if self.points is None:
            raise CapExceeded("series points", self.count, 0)
        if "_set" not in self.stats:
            self.stats["_set"] = set(map(tuple, self.points.tolist()))
        return self.stats["_set"]

    def sections(self):
        for row in self.points:
            yield Section.from_vector(self.nvars - 1, self.model.section_degree(self.m), [int(x) for x in row])

    def contains(self, vec: Sequence[int]) -> bool:
        """Membership of a coefficient vector (exact for l1 balls)."""
        if len(vec) != self.rank:
            raise DimensionMismatch("coefficient vector has the wrong length")
        if self.model.kind == L1_TWIST and (self.variant != "CL" or self.points is None):
            return sum(abs(int(x)) for x in vec) <= self.model.int_radius(self.m)
        return tuple(int(x) for x in vec) in self.point_set()


def _l1_series(model, m, Y, variant, cap, method="closed form"):
    D = model.rank(m, Y.d_prime)
    R = model.int_radius(m)
    count = l1_ball_count(D, R)
    pts = l1_ball_points(D, R) if count <= cap else None
    return ArithLinearSeries(model, m, Y, variant, count, count, pts, method)


def h0_hat(model: MetricModel, m: int, cap: int = DEFAULT_SERIES_CAP) -> ArithLinearSeries:
    """The complete series of forms of norm at most ``q^m`` at level ``m``."""
    if m < 0:
        raise ValueError("level must be nonnegative")
    Y = SubvarietyY.whole(model.n)
    if model.kind == L1_TWIST:
        return _l1_series(model, m, Y, "H0", cap)
    return _sup_series(model, m, Y, "H0")


@lru_cache(maxsize=64)
def _sup_ball_cached(nvars: int, deg: int, bound: Fraction, bits: int):
    return sup_ball_points(list(monomials(nvars, deg)), bound, bits)


def _sup_series(model, m, Y, variant):
    inside, und, stats = _sup_ball_cached(Y.d_prime, model.section_degree(m), model.radius(m), model.precision_bits)
    if len(und):
        log.info("level %d: %d undecided sup-norm memberships excluded", m, len(und))
    return ArithLinearSeries(model, m, Y, variant, len(inside), len(inside) + len(und), inside,
                             "certified numeric", und, dict(stats))


def h0_hat_count(model: MetricModel, m: int) -> int:
    """Exact ``#Ĥ⁰`` at level ``m`` for the l1 model: ``N(D, floor(q^m))``."""
    if model.kind != L1_TWIST:
        raise ValueError("closed-form counts exist only for the L1_TWIST model")
    return l1_ball_count(model.rank(m), model.int_radius(m))


def restrict_vectors(points: np.ndarray, model: MetricModel, m: int, Y: SubvarietyY) -> np.ndarray:
    cols = list(restriction_columns(model.n, model.section_degree(m), Y.killed))
    return points[:, cols]


def restricted_series(model: MetricModel, m: int, Y: SubvarietyY, variant: str,
                      cap: int = DEFAULT_SERIES_CAP, literal: bool | None = None) -> ArithLinearSeries:
    """Series on ``Y`` at level ``m`` for the assignment ``variant`` in CL / QUOT / SUB.

    QUOT uses the quotient norm (minimal lift), SUB the norm of the model
    restricted to ``Y``, and CL the convex lattice hull of the image of the
    complete series. For coordinate subspaces dropping the killed monomials is
    a minimal lift, so QUOT and SUB agree. CL is computed literally from the
    enumerated image when that fits under ``cap`` (or ``literal`` is set);
    otherwise, for l1 models, it is certified equal to the ball because the
    image contains every ``±R`` times a monomial and lies inside the ball.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if Y.n != model.n:
        raise DimensionMismatch("Y lives on a different projective space")
    if Y.is_whole:
        base = h0_hat(model, m, cap)
        base.variant = variant
        return base
    if model.kind == SUP_NUMERIC:
        if variant in ("QUOT", "SUB"):
            s = _sup_series(model, m, Y, variant)
            s.method = "certified numeric; zero lift is a minimal lift on coordinate Y"
            return s
        full = h0_hat(model, m)
        return _cl_from_image(model, m, Y, restrict_vectors(full.points, model, m, Y), cap)
    if variant in ("QUOT", "SUB"):
        return _l1_series(model, m, Y, variant, cap)
    full_count = h0_hat_count(model, m)
    use_literal = full_count <= cap if literal is None else literal
    if use_literal:
        full = h0_hat(model, m, max(cap, full_count))
        return _cl_from_image(model, m, Y, restrict_vectors(full.points, model, m, Y), cap)
    return _l1_series(model, m, Y, "CL", cap, method="certified")


def _cl_from_image(model, m, Y, image: np.ndarray, cap) -> ArithLinearSeries:
    img = np.unique(image, axis=0)
    if len(img) == 1 and not img.any():
        pts = img
    else:
        cl = convex_lattice_hull(img.tolist(), cap)
        pts = np.array(cl.points, dtype=np.int64).reshape(len(cl.points), img.shape[1])
    return ArithLinearSeries(model, m, Y, "CL", len(pts), len(pts), pts, "enumerated hull of the image")


# valuation images -----------------------------------------------------------------

def is_coordinate_flag(flag: Flag) -> bool:
    return sum(1 for a in flag.point if a) == 1


def nu_image_fast(model: MetricModel, m: int, flag: Flag, radius: int | None = None) -> dict:
    """Closed-form valuation image of the l1 ball for a flag through a coordinate point.

    A nonzero form with content ``p^i`` has l1 norm at least ``p^i``, and
    ``p^i`` times any monomial reaches ``(i, e)`` for every local exponent
    ``e`` of degree at most ``a*m``; hence the image is
    ``{(i, e) : p^i <= floor(q^m), |e| <= a*m}``. ``radius`` replaces
    ``floor(q^m)`` for an l1 ball of another size.
    """
    if model.kind != L1_TWIST:
        raise ValueError("fast valuation images exist only for the L1_TWIST model")
    if not is_coordinate_flag(flag):
        raise FlagError("fast valuation images need a flag through a coordinate point")
    R = model.int_radius(m) if radius is None else int(radius)
    deg = model.section_degree(m)
    nloc = flag.n
    if R < 1:
        return {"i_max": -1, "count": 0, "local_count": math.comb(deg + nloc, nloc)}
    i_max = 0
    while flag.p ** (i_max + 1) <= R:
        i_max += 1
    local = math.comb(deg + nloc, nloc)
    return {"i_max": i_max, "count": (i_max + 1) * local, "local_count": local}


def nu_image_fast_set(model: MetricModel, m: int, flag: Flag, radius: int | None = None) -> set:
    info = nu_image_fast(model, m, flag, radius)
    tails = monomials_upto(flag.n, model.section_degree(m))
    return {(i,) + tuple(e) for i in range(info["i_max"] + 1) for e in tails}


def nu_image(series: ArithLinearSeries, flag: Flag) -> np.ndarray:
    """Distinct valuation vectors of the nonzero elements of an enumerated series."""
    if series.points is None:
        raise CapExceeded("valuation image needs enumerated points", series.count, 0)
    if flag.n != series.nvars - 1:
        raise FlagError("flag lives on a space of the wrong dimension")
    pts = series.points
    pts = pts[(pts != 0).any(axis=1)]
    if len(pts) == 0:
        return np.zeros((0, flag.n + 1), dtype=np.int64)
    tab = _table(flag, series.model.section_degree(series.m))
    out = []
    for s in range(0, len(pts), 1 << 16):
        out.append(np.unique(tab(pts[s:s + 1 << 16]), axis=0))
    return np.unique(np.vstack(out), axis=0)


@lru_cache(maxsize=128)
def _table(flag: Flag, deg: int) -> ValuationTable:
    return ValuationTable(flag, deg)


def validate_nu_fast(model: MetricModel, flag: Flag, m_values: Sequence[int], cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Compare the closed-form valuation image with full enumeration at each level."""
    rows = []
    for m in m_values:
        fast = nu_image_fast_set(model, m, flag)
        series = h0_hat(model, m, cap) if flag.n == model.n else None
        if series is None or series.points is None:
            rows.append({"m": m, "checked": False})
            continue
        enum = set(map(tuple, nu_image(series, flag).tolist()))
        rows.append({"m": m, "checked": True, "equal": enum == fast, "count": len(enum)})
    return {"rows": rows, "ok": all(r.get("equal", True) for r in rows)}


def product_property(model: MetricModel, Y: SubvarietyY, variant: str, m1: int, m2: int, samples: int,
                     rng: np.random.Generator, cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Sampled check that products of members at levels m1, m2 are members at m1 + m2."""
    A = restricted_series(model, m1, Y, variant, cap)
    B = restricted_series(model, m2, Y, variant, cap)
    C = restricted_series(model, m1 + m2, Y, variant, cap)
    nY = Y.d_prime - 1
    degA, degB = model.section_degree(m1), model.section_degree(m2)
    fails, undecided = 0, 0
    for _ in range(samples):
        a = A.points[rng.integers(len(A.points))]
        b = B.points[rng.integers(len(B.points))]
        prod = Section.from_vector(nY, degA, a.tolist()) * Section.from_vector(nY, degB, b.tolist())
        vec = prod.to_vector() if not prod.is_zero() else [0] * C.rank
        if model.kind == L1_TWIST or variant == "CL":
            ok = C.contains(vec)
        else:
            d = decide_sup(monomials(Y.d_prime, model.section_degree(m1 + m2)), vec, model.radius(m1 + m2),
                           model.precision_bits)
            ok = d.status != OUT
            undecided += d.status == UNDECIDED
        fails += not ok
    return {"samples": samples, "failures": fails, "undecided": undecided}


def assignment_inclusions(model: MetricModel, m: int, Y: SubvarietyY, cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Check ``CL ⊆ QUOT ⊆ SUB`` at level ``m`` on enumerated series.

    For certified-numeric models a point outside the smaller series' decided
    members but among its UNDECIDED candidates is counted as undecided, not
    as a failure; the undecided rate is reported.
    """
    S = {v: restricted_series(model, m, Y, v, cap) for v in VARIANTS}
    for v, s in S.items():
        if s.points is None:
            raise CapExceeded(f"{v} series at level {m}", s.count, cap)

    def include(small, big):
        members = big.point_set()
        maybe = set(map(tuple, big.undecided.tolist())) if big.undecided is not None else set()
        missing = [v for v in small.point_set() if v not in members]
        unsure = sum(1 for v in missing if v in maybe)
        return len(missing) - unsure, unsure

    bad1, und1 = include(S["CL"], S["QUOT"])
    bad2, und2 = include(S["QUOT"], S["SUB"])
    pieces = list(S.values())
    if model.kind == SUP_NUMERIC and not Y.is_whole:
        pieces.append(h0_hat(model, m))
    cand = sum(int(s.stats.get("candidates", 0)) for s in pieces)
    undecided = sum(0 if s.undecided is None else len(s.undecided) for s in pieces)
    return {"m": m, "Y": Y.label(), "sizes": {v: s.count for v, s in S.items()},
            "cl_in_quot": bad1 == 0, "quot_in_sub": bad2 == 0, "undecided_pairs": und1 + und2,
            "undecided": undecided, "candidates": cand,
            "undecided_rate": undecided / cand if cand else 0.0}
