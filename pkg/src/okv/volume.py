"""Volume experiments: growth of small-section counts, valuation bodies and related checks.

Every count here is an exact integer. Logarithms are evaluated with mpmath at
128 bits and every comparison involving them carries an explicit tolerance.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .cones import mfold_sum
from .errors import CapExceeded, DimensionMismatch, FlagError, NotSymmetric
from .exact import (Lattice, RationalPolytope, convex_hull, count_lattice_points, cross_polytope, det, hnf,
                    intersect, lattice_points_array, polytope_volume, rank_q, span_many)
from .flags import Flag, good_flag_pn
from .jsonio import PREC_BITS, fmt_log, log_int, log_rat
from .poly import monomials, rank_mod_p
from .series import (DEFAULT_SERIES_CAP, L1_TWIST, ArithLinearSeries, MetricModel, SubvarietyY, _table,
                     h0_hat_count, is_coordinate_flag, model_sum, nu_image_fast, nu_image_fast_set,
                     restricted_series, validate_nu_fast)

log = logging.getLogger(__name__)

TOL = mpmath.mpf(2) ** (-100)


def _mp(x) -> mpmath.mpf:
    with mpmath.workprec(PREC_BITS):
        return +mpmath.mpf(x)


# counts and volume sequences -------------------------------------------------------

def series_count(model: MetricModel, m: int, Y: SubvarietyY | None = None, variant: str = "QUOT") -> int:
    """Exact size of the series at level ``m`` (lower bound for the certified-numeric model)."""
    Y = Y or SubvarietyY.whole(model.n)
    if model.kind == L1_TWIST and (Y.is_whole or variant != "CL"):
        return h0_hat_count(model, m) if Y.is_whole else \
            restricted_series(model, m, Y, variant, cap=0).count
    return restricted_series(model, m, Y, variant).count


def _fit_two(m1: int, m2: int, f1, f2, d: int) -> mpmath.mpf:
    """Solve ``f = a m^d + b m^(d-1) log m`` through two points; return ``a * d!``."""
    with mpmath.workprec(PREC_BITS):
        A = mpmath.matrix([[mpmath.mpf(m1) ** d, mpmath.mpf(m1) ** (d - 1) * mpmath.log(m1)],
                           [mpmath.mpf(m2) ** d, mpmath.mpf(m2) ** (d - 1) * mpmath.log(m2)]])
        a, _ = mpmath.lu_solve(A, mpmath.matrix([f1, f2]))
        return a * math.factorial(d)


@dataclass
class VolumeSequence:
    """Normalised log-counts ``d'! log N(m) / m^d'`` with an extrapolated limit."""

    d_prime: int
    entries: list = field(default_factory=list)
    limit: mpmath.mpf | None = None
    method: str = ""
    error: mpmath.mpf | None = None

    def logs(self) -> list:
        return [log_int(c) for _, c, _ in self.entries]

    def rows(self) -> list[dict]:
        lim = "" if self.limit is None else fmt_log(self.limit)
        return [{"m": m, "count": str(c), "normalized": fmt_log(v), "limit_est": lim} for m, c, v in self.entries]

    def to_dict(self) -> dict:
        return {"d_prime": self.d_prime, "method": self.method,
                "limit": None if self.limit is None else fmt_log(self.limit),
                "error": None if self.error is None else fmt_log(self.error),
                "entries": self.rows()}


def extrapolate(entries: Sequence, d: int, method: str = "richardson2") -> tuple:
    """(limit, error estimate or None, method actually used)."""
    if not entries:
        raise ValueError("nothing to extrapolate")
    if method == "last" or len(entries) < 2:
        return entries[-1][2], None, "last"
    if method != "richardson2":
        raise ValueError(f"unknown extrapolation method {method!r}")

    def est(sub):
        (m1, c1, _), (m2, c2, _) = sub[-2], sub[-1]
        return _fit_two(m1, m2, log_int(c1), log_int(c2), d)

    value = est(entries)
    half = [e for e in entries if e[0] <= entries[-1][0] // 2]
    err = abs(value - est(half)) if len(half) >= 2 else None
    return value, err, "richardson2"


def vhat_vol_estimate(model: MetricModel, m_list: Sequence[int], Y: SubvarietyY | None = None,
                      variant: str = "QUOT", method: str = "richardson2") -> VolumeSequence:
    """Exact counts along ``m_list`` and the extrapolated (restricted) arithmetic volume."""
    Y = Y or SubvarietyY.whole(model.n)
    ms = [int(m) for m in m_list]
    if not ms or any(m < 1 for m in ms) or any(a >= b for a, b in zip(ms, ms[1:])):
        raise ValueError("m_list must be strictly increasing positive levels")
    d = Y.d_prime
    seq = VolumeSequence(d)
    for m in ms:
        c = series_count(model, m, Y, variant)
        with mpmath.workprec(PREC_BITS):
            v = math.factorial(d) * log_int(c) / mpmath.mpf(m) ** d
        seq.entries.append((m, c, v))
    seq.limit, seq.error, seq.method = extrapolate(seq.entries, d, method)
    return seq


def vhat_closed_form(model: MetricModel, Y: SubvarietyY | None = None) -> dict:
    """Analytic limit ``c * log q`` for l1 models (``c = d' a^(d'-1)`` when ``q > 1``, else 0)."""
    Y = Y or SubvarietyY.whole(model.n)
    d = Y.d_prime
    coeff = d * model.degree ** (d - 1) if model.q > 1 else 0
    return {"coeff": coeff, "q": model.q, "value": coeff * log_rat(model.q) if coeff else _mp(0)}


# fast valuation images ----------------------------------------------------------

_VALIDATED: dict = {}

AUX_Q = (Fraction(1), Fraction(5, 4), Fraction(3, 2))


def ensure_fast_nu(model: MetricModel, flag: Flag, cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Validate the closed-form valuation image against enumeration at every level ``m <= 6``.

    Levels whose complete series exceeds ``cap`` are skipped for ``model``
    itself; the same characterisation is then exercised on the auxiliary
    twists ``q in {1, 5/4, 3/2}`` (same space, degree and flag), all of which
    must enumerate at least one level each. Results are cached.
    """
    if model.kind != L1_TWIST or not is_coordinate_flag(flag):
        raise FlagError("no fast valuation image for this model/flag")
    key = (model.n, model.degree, model.q, flag)
    if key in _VALIDATED:
        return _VALIDATED[key]
    reports = {}
    for q in (model.q,) + AUX_Q:
        aux = MetricModel(model.n, L1_TWIST, q, model.degree)
        levels = [m for m in range(7) if h0_hat_count(aux, m) <= cap]
        reports[str(q)] = validate_nu_fast(aux, flag, levels, cap)
    ok = all(r["ok"] for r in reports.values())
    checked = sum(1 for r in reports.values() for row in r["rows"] if row.get("checked"))
    out = {"ok": ok and checked > 0, "checked_levels": checked, "reports": reports}
    if not out["ok"]:
        raise FlagError("fast valuation image disagrees with enumeration")
    _VALIDATED[key] = out
    return out


def _nu_points(points: np.ndarray, flag: Flag, deg: int) -> set:
    pts = points[(points != 0).any(axis=1)]
    if not len(pts):
        return set()
    tab = _table(flag, deg)
    out = set()
    for s in range(0, len(pts), 1 << 16):
        out.update(map(tuple, tab(pts[s:s + (1 << 16)]).tolist()))
    return out


def _graded_check(points: np.ndarray, flag: Flag, deg: int) -> list[dict]:
    """Per ``nu_1 = i`` piece: distinct tails vs F_p-rank of the reductions of ``s / p^i``."""
    pts = points[(points != 0).any(axis=1)]
    if not len(pts):
        return []
    nu = _table(flag, deg)(pts)
    p = flag.p
    out = []
    for i in sorted(set(nu[:, 0].tolist())):
        sel = nu[:, 0] == i
        tails = len(np.unique(nu[sel, 1:], axis=0))
        red = (pts[sel].astype(object) // p ** i) % p
        dim = rank_mod_p(red, p)
        out.append({"i": i, "tails": tails, "dim": dim, "ok": tails <= dim})
    return out


# Okounkov bodies ------------------------------------------------------------------

@dataclass
class OkounkovBody:
    body: RationalPolytope
    volume: Fraction
    vhat_from_body: mpmath.mpf
    levels: list

    def to_dict(self) -> dict:
        return {"vertices": self.body.to_dict()["vertices"], "volume": str(self.volume),
                "vhat_from_body": fmt_log(self.vhat_from_body), "levels": self.levels}


def okounkov_body(model: MetricModel, flag: Flag, m_max: int, Y: SubvarietyY | None = None,
                  variant: str = "QUOT", cap: int = DEFAULT_SERIES_CAP) -> OkounkovBody:
    """Hull of ``(1/m) nu(series_m minus 0)`` over ``1 <= m <= m_max``.

    Levels whose series fits under ``cap`` are enumerated (and, for coordinate
    flags, compared with the closed form); larger levels use the closed form
    after it has been validated by :func:`ensure_fast_nu`.
    """
    Y = Y or SubvarietyY.whole(model.n)
    if flag.n != Y.d_prime - 1:
        raise FlagError("the flag must live on Y")
    if m_max < 1:
        raise ValueError("m_max must be positive")
    # every l1 variant on a coordinate Y is the l1 ball in Y's coordinates
    fast_ok = model.kind == L1_TWIST and is_coordinate_flag(flag)
    pts: list = []
    levels = []
    for m in range(1, m_max + 1):
        deg = model.section_degree(m)
        count = series_count(model, m, Y, variant) if model.kind == L1_TWIST else None
        if count is None or count <= cap:
            s = restricted_series(model, m, Y, variant, cap=max(cap, count or 0))
            nus = _nu_points(s.points, flag, deg)
            graded = _graded_check(s.points, flag, deg)
            row = {"m": m, "method": "enumerated", "nu_count": len(nus), "graded": graded,
                   "graded_ok": all(g["ok"] for g in graded)}
            if fast_ok:
                row["fast_agrees"] = nus == nu_image_fast_set(model, m, flag)
        else:
            if not fast_ok:
                raise CapExceeded("valuation image enumeration", count, cap)
            ensure_fast_nu(model, flag)
            info = nu_image_fast(model, m, flag)
            if info["count"] == 0:
                levels.append({"m": m, "method": "closed form", "nu_count": 0, "graded_ok": True})
                continue
            # the image is a box in nu_1 times a simplex in the tail: its corners suffice
            corners = [(0,) * flag.n] + [tuple(deg * int(j == k) for j in range(flag.n)) for k in range(flag.n)]
            nus = {(i,) + c for i in {0, info["i_max"]} for c in corners}
            # each graded piece holds every monomial, so tails = dim = C(deg + n', n')
            row = {"m": m, "method": "closed form", "nu_count": info["count"], "graded_ok": True}
        levels.append(row)
        pts.extend(tuple(Fraction(x, m) for x in v) for v in nus)
    if not pts:
        body = RationalPolytope((), flag.n + 1)
        return OkounkovBody(body, Fraction(0), _mp(0), levels)
    body = convex_hull(pts)
    vol = polytope_volume(body)
    with mpmath.workprec(PREC_BITS):
        vhat = mpmath.mpf(vol.numerator) / vol.denominator * math.factorial(flag.n + 1) * mpmath.log(flag.p)
    return OkounkovBody(body, vol, vhat, levels)


# the gap between valuation counts and log-counts ------------------------------------

def default_sigma(model: MetricModel) -> mpmath.mpf:
    """Documented default slope constant ``(n + 1) log q`` (``2 log 2`` for q = 2 on P^1)."""
    return (model.n + 1) * log_rat(model.q) if model.q > 1 else _mp(0)


def gap_rhs(p: int, rk: int, sigma) -> mpmath.mpf:
    """``(log(4 p rk) + (sigma + log(2 p rk)) / log p * log 4) * rk`` with ``rk H^0(O_X) = 1``."""
    if rk == 0:
        return _mp(0)
    with mpmath.workprec(PREC_BITS):
        lp = mpmath.log(p)
        return (mpmath.log(4 * p * rk) + (mpmath.mpf(sigma) + mpmath.log(2 * p * rk)) / lp * mpmath.log(4)) * rk


@dataclass
class GapReport:
    model_hash: str
    m: int
    p: int
    nu_count: int
    count: int
    log_count: mpmath.mpf
    gap: mpmath.mpf
    rhs: mpmath.mpf
    sigma: mpmath.mpf
    rank_K: int
    method: str

    @property
    def passed(self) -> bool:
        return self.gap <= self.rhs + TOL * max(1, abs(self.rhs))

    def row(self) -> dict:
        return {"model_hash": self.model_hash, "p": self.p, "m": self.m, "nu_count": str(self.nu_count),
                "log_count": fmt_log(self.log_count), "gap": fmt_log(self.gap), "rhs_sigma": fmt_log(self.rhs),
                "sigma": fmt_log(self.sigma), "pass": self.passed}


def valuation_gap(model: MetricModel, flag: Flag, m: int, sigma=None, cap: int = DEFAULT_SERIES_CAP) -> GapReport:
    """``|#nu * log p - log #K|`` for the complete series ``K`` at level ``m`` and its bound."""
    if flag.n != model.n:
        raise FlagError("flag and model live on different spaces")
    sigma = default_sigma(model) if sigma is None else _mp(sigma)
    count = h0_hat_count(model, m) if model.kind == L1_TWIST else None
    if count is not None and count > cap:
        ensure_fast_nu(model, flag, cap)
        nu = nu_image_fast(model, m, flag)["count"]
        method = "closed form"
    else:
        s = restricted_series(model, m, SubvarietyY.whole(model.n), "QUOT", cap=max(cap, count or 0))
        count = s.count
        nu = len(_nu_points(s.points, flag, model.section_degree(m)))
        method = "enumerated"
    rk = model.rank(m) if model.int_radius(m) >= 1 else 0
    with mpmath.workprec(PREC_BITS):
        lc = log_int(count)
        gap = abs(nu * mpmath.log(flag.p) - lc)
    return GapReport(model.hash, m, flag.p, nu, count, lc, gap, gap_rhs(flag.p, rk, sigma), sigma, rk, method)


def fit_gap_constant(reports: Sequence[GapReport]) -> dict:
    """Fit one ``C`` with ``gap <= C m log(p(m+1))`` over all reports; compare ``C`` times that shape with the bound."""
    if any(r.m < 1 for r in reports):
        raise ValueError("the shape vanishes at m = 0")
    ratios = []
    for r in reports:
        with mpmath.workprec(PREC_BITS):
            shape = r.m * mpmath.log(r.p * (r.m + 1))
        ratios.append((r, shape, r.gap / shape))
    C = max(x for *_, x in ratios)
    under_rhs = all(C * shape <= r.rhs for r, shape, _ in ratios if r.rank_K)
    return {"C": C, "shape_below_rhs": under_rhs,
            "fits": all(r.gap <= C * shape + TOL for r, shape, _ in ratios)}


# valuation-count sandwich ------------------------------------------------------

def check_sandwich(M: Lattice, delta: RationalPolytope, flag: Flag, deg: int,
                 cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Both inequalities bounding ``#nu_{Y1}(r(M ∩ Δ) minus 0) log p``.

    ``M`` is a lattice of coefficient vectors of degree ``deg`` forms,
    ``Δ`` a symmetric body, ``r`` reduction mod p, ``M' = M ∩ pZ^D`` and
    ``β = p rank M``. Compared exactly on integers:
    ``p^#nu #(M' ∩ βΔ) <= #(M ∩ 2βΔ)`` and ``#(M ∩ Δ/β) <= p^#nu #(M' ∩ 2Δ/β)``.
    """
    D = len(monomials(flag.n + 1, deg))
    if M.ambient_dim != D or delta.ambient_dim != D:
        raise DimensionMismatch(f"degree {deg} forms on P^{flag.n} have {D} coefficients")
    if not delta.is_symmetric():
        raise NotSymmetric("Δ must be symmetric")
    p = flag.p
    Mp = intersect(M, Lattice.full(D).scaled(p))
    beta = p * M.rank
    pts = lattice_points_array(M, delta, cap)
    red = pts[(pts % p != 0).any(axis=1)] if len(pts) else pts
    tails = set()
    if len(red):
        tab = _table(flag, deg)
        tails = set(map(tuple, tab(red % p)[:, 1:].tolist()))
    k = len(tails)
    if beta == 0:
        counts = {"M∩2βΔ": 1, "M'∩βΔ": 1, "M∩Δ/β": 1, "M'∩2Δ/β": 1}
    else:
        counts = {"M∩2βΔ": count_lattice_points(M, delta.scale(2 * beta), cap),
                  "M'∩βΔ": count_lattice_points(Mp, delta.scale(beta), cap),
                  "M∩Δ/β": count_lattice_points(M, delta.scale(Fraction(1, beta)), cap),
                  "M'∩2Δ/β": count_lattice_points(Mp, delta.scale(Fraction(2, beta)), cap)}
    eq1 = p ** k * counts["M'∩βΔ"] <= counts["M∩2βΔ"]
    eq2 = counts["M∩Δ/β"] <= p ** k * counts["M'∩2Δ/β"]
    with mpmath.workprec(PREC_BITS):
        mid = k * mpmath.log(p)
        upper = log_int(counts["M∩2βΔ"]) - log_int(counts["M'∩βΔ"])
        lower = log_int(counts["M∩Δ/β"]) - log_int(counts["M'∩2Δ/β"])
    return {"lemma": "valuation-count-sandwich", "p": p, "beta": beta, "nu_count": k, "nu_log": fmt_log(mid),
            "upper": fmt_log(upper), "lower": fmt_log(lower), "eq1": eq1, "eq2": eq2, "pass": eq1 and eq2,
            "counts": {key: str(v) for key, v in counts.items()}}


def check_sandwich_model(model: MetricModel, m: int, flag: Flag, cap: int = DEFAULT_SERIES_CAP) -> dict:
    """The sandwich for ``M = Z^D`` and the model's ball at level ``m``."""
    if model.kind != L1_TWIST:
        raise ValueError("the sandwich check needs an exact l1 model")
    D = model.rank(m)
    rep = check_sandwich(Lattice.full(D), cross_polytope(D, model.radius(m)), flag, model.section_degree(m), cap)
    rep.update({"model_hash": model.hash, "m": m})
    return rep


# Fujita-style k-fold products ------------------------------------------------------

def _product_map(nvars: int, d1: int, d2: int) -> np.ndarray:
    out_idx = {e: i for i, e in enumerate(monomials(nvars, d1 + d2))}
    A, B = monomials(nvars, d1), monomials(nvars, d2)
    S = np.zeros((len(A) * len(B), len(out_idx)), dtype=np.int64)
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            S[i * len(B) + j, out_idx[tuple(x + y for x, y in zip(a, b))]] = 1
    return S


def _products(P: np.ndarray, H: np.ndarray, S: np.ndarray, cap: int) -> np.ndarray:
    """Distinct products of rows of ``P`` and rows of ``H`` (coefficient vectors)."""
    total = len(P) * len(H)
    if total > cap:
        raise CapExceeded("k-fold products", total, cap)
    bound = int(np.abs(P).sum(axis=1).max()) * int(np.abs(H).sum(axis=1).max())
    if bound >= 2 ** 62:
        raise CapExceeded("product coefficients exceed int64", bound, 2 ** 62)
    out = []
    step = max(1, (1 << 20) // max(1, len(H) * P.shape[1] * H.shape[1]))
    for s in range(0, len(P), step):
        blk = P[s:s + step]
        Z = (blk[:, None, :, None] * H[None, :, None, :]).reshape(len(blk) * len(H), -1)
        out.append(np.unique(Z @ S, axis=0))
    return np.unique(np.vstack(out), axis=0)


def _positive_part(X: np.ndarray) -> np.ndarray:
    X = X[(X != 0).any(axis=1)]
    lead = X[np.arange(len(X)), (X != 0).argmax(axis=1)]
    return X[lead > 0]


def _target_contains_hull(target: ArithLinearSeries, L: Lattice, hull: RationalPolytope, cap: int) -> tuple:
    """Decide ``L ∩ hull ⊆ target``; returns (ok, how)."""
    m = target.m
    model = target.model
    l1_ball = model.kind == L1_TWIST and (target.variant != "CL" or target.method == "certified")
    if l1_ball:
        R = model.int_radius(m)
        return all(sum(abs(x) for x in v) <= R for v in hull.vertices), "hull vertices in the l1 ball"
    pts = lattice_points_array(L, hull, cap)
    members = target.point_set()
    return all(tuple(int(x) for x in v) in members for v in pts), "enumerated"


def fujita_kfold(model: MetricModel, n_level: int, k_max: int, Y: SubvarietyY | None = None,
                 variant: str = "QUOT", flag: Flag | None = None, cap: int = DEFAULT_SERIES_CAP) -> list[dict]:
    """Products of ``k`` small sections of level ``n`` and their convex lattice hulls, ``k = 1..k_max``."""
    Y = Y or SubvarietyY.whole(model.n)
    flag = flag or default_flag(Y.d_prime - 1)
    if flag.n != Y.d_prime - 1:
        raise FlagError("the flag must live on Y")
    H = restricted_series(model, n_level, Y, variant, cap)
    if H.points is None:
        raise CapExceeded("level-n series", H.count, cap)
    d = Y.d_prime
    deg_n = model.section_degree(n_level)
    Hp = _positive_part(H.points)
    base_nu = _nu_points(H.points, flag, deg_n)
    rows = []
    P = Hp
    for k in range(1, k_max + 1):
        if k > 1:
            S = _product_map(d, model.section_degree(n_level * (k - 1)), deg_n)
            P = _products(P, Hp, S, cap)
        D = P.shape[1]
        V = np.vstack([np.zeros((1, D), dtype=P.dtype), P, -P])
        level = k * n_level
        if len(V) == 1:
            L, hull = Lattice(D, ()), convex_hull(V)
        else:
            L, hull = span_many(V), convex_hull(V)
        in_lattice = bool(L.contains_many(V).all())
        in_hull = bool(hull.contains_many(V).all())
        target = restricted_series(model, level, Y, variant, cap=0 if model.kind == L1_TWIST else cap)
        sub_ok, how = _target_contains_hull(target, L, hull, cap)
        cl_size = count_lattice_points(L, hull, cap) if L.rank else 1
        # nu of the hull: enumerated when small, else the closed form for a full l1 ball
        R = hull.l1_radius()
        full = L.rank == D and L.basis == Lattice.full(D).basis
        if cl_size <= cap:
            cl_nu = _nu_points(lattice_points_array(L, hull, cap), flag, model.section_degree(level))
            nu_how = "enumerated"
        elif R is not None and full and R.denominator == 1 and is_coordinate_flag(flag) \
                and model.kind == L1_TWIST:
            ensure_fast_nu(model, flag)
            cl_nu = nu_image_fast_set(model, level, flag, radius=int(R))
            nu_how = "closed form"
        else:
            raise CapExceeded("convex lattice hull enumeration", cl_size, cap)
        kfold = set(mfold_sum(base_nu, k)) if base_nu else set()
        superset = kfold <= cl_nu
        with mpmath.workprec(PREC_BITS):
            normalized = log_int(cl_size) / (mpmath.mpf(n_level) ** d * mpmath.mpf(k) ** d)
        rows.append({"n": n_level, "k": k, "V_size": len(V), "CL_size": cl_size, "normalized": normalized,
                     "contain_ok": in_lattice and in_hull and sub_ok, "nu_superset_ok": superset,
                     "nu_CL": len(cl_nu), "nu_kfold": len(kfold), "containment_method": how,
                     "nu_method": nu_how})
    return rows


def default_flag(n: int, p: int = 2) -> Flag:
    """Flag over ``p`` through ``(0 : ... : 0 : 1)`` cut by ``x_0, ..., x_{n-1}``."""
    return good_flag_pn(n, p, [0] * n + [1], list(range(n)))


# superadditivity and generation ------------------------------------------------------

def superadditivity_check(A: MetricModel, B: MetricModel, m_list: Sequence[int], Y: SubvarietyY | None = None,
                          variant: str = "QUOT") -> dict:
    """``vhat(A+B)^(1/d') >= vhat(A)^(1/d') + vhat(B)^(1/d')`` on extrapolated limits."""
    Y = Y or SubvarietyY.whole(A.n)
    if A.q <= 1 or B.q <= 1:
        return {"skipped": True, "reason": "both models must be big (q > 1)", "pass": True}
    S = model_sum(A, B)
    d = Y.d_prime
    est = {k: vhat_vol_estimate(mod, m_list, Y, variant) for k, mod in (("A", A), ("B", B), ("A+B", S))}
    with mpmath.workprec(PREC_BITS):
        root = {k: v.limit ** (mpmath.mpf(1) / d) for k, v in est.items()}
        # propagate each estimate's error through x -> x^(1/d)
        prop = {k: (v.error or 0) * root[k] / (d * v.limit) for k, v in est.items()}
        lhs = root["A+B"]
        rhs = root["A"] + root["B"]
        tol = mpmath.mpf(10) ** -6 + sum(prop.values())
        cf = {k: vhat_closed_form(mod, Y) for k, mod in (("A", A), ("B", B), ("A+B", S))}
        cf_lhs = cf["A+B"]["value"] ** (mpmath.mpf(1) / d)
        cf_rhs = cf["A"]["value"] ** (mpmath.mpf(1) / d) + cf["B"]["value"] ** (mpmath.mpf(1) / d)
    out = {"skipped": False, "d_prime": d, "lhs": lhs, "rhs": rhs, "tol": tol,
           "pass": lhs >= rhs - tol, "equality": abs(lhs - rhs) <= tol,
           "closed_form_lhs": cf_lhs, "closed_form_rhs": cf_rhs,
           "closed_form_pass": cf_lhs >= cf_rhs - TOL * max(1, cf_rhs), "estimates": est}
    if d == 1:
        # limits are log q: additivity is the identity q_A q_B = q_{A+B}
        out["exact_identity"] = A.q * B.q == S.q
    return out


def generation_check(model: MetricModel, flag: Flag, m_max: int, Y: SubvarietyY | None = None,
                     variant: str = "QUOT", cap: int = DEFAULT_SERIES_CAP) -> dict:
    """Whether ``{(nu(s), m)}`` over nonzero restricted sections, ``m <= m_max``, generates ``Z^(d'+1)``."""
    Y = Y or SubvarietyY.whole(model.n)
    if flag.n != Y.d_prime - 1:
        raise FlagError("the flag must live on Y")
    vecs = set()
    for m in range(1, m_max + 1):
        s = restricted_series(model, m, Y, variant, cap)
        if s.points is None:
            raise CapExceeded("restricted series", s.count, cap)
        vecs.update(v + (m,) for v in _nu_points(s.points, flag, model.section_degree(m)))
    dim = Y.d_prime + 1
    if not vecs:
        return {"generates": False, "rank": 0, "hnf": [], "vectors": 0}
    L, _ = hnf(sorted(vecs))
    generates = L.rank == dim and L.basis == Lattice.full(dim).basis
    return {"generates": generates, "rank": L.rank, "hnf": [list(r) for r in L.basis], "vectors": len(vecs)}


# normed modules ---------------------------------------------------------------------

@dataclass(frozen=True)
class NormedModule:
    """A lattice with the gauge norm of a symmetric full-dimensional polytope."""

    lattice: Lattice
    ball: RationalPolytope

    def __post_init__(self):
        if self.ball.ambient_dim != self.lattice.ambient_dim:
            raise DimensionMismatch("ball and lattice live in different spaces")
        if not self.ball.is_symmetric():
            raise NotSymmetric("the unit ball must be symmetric")
        if self.ball.dim != self.ball.ambient_dim:
            raise ValueError("the unit ball must be full-dimensional")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def norm(self, v: Sequence) -> Fraction:
        return max(Fraction(sum(a * x for a, x in zip(f.normal, v))) / f.offset for f in self.ball.facets)


def _lambda_within(M: NormedModule, r: Fraction, cap: int, combo_cap: int) -> tuple:
    """``(λ', λ)`` if attained at norm ``<= r`` (None entries otherwise)."""
    pts = lattice_points_array(M.lattice, M.ball.scale(r), cap)
    by_norm: dict = {}
    for row in pts.tolist():
        v = tuple(int(x) for x in row)
        if any(v) and next(x for x in v if x) > 0:
            by_norm.setdefault(M.norm(v), []).append(v)
    rank = M.rank
    lam_p = None
    indep: list = []
    pool: list = []
    tried = 0
    for nv in sorted(by_norm):
        group = by_norm[nv]
        if lam_p is None:
            for v in group:
                if rank_q(indep + [v]) > len(indep):
                    indep.append(v)
            if len(indep) == rank:
                lam_p = nv
        fresh = len(pool)
        pool.extend(M.lattice.coordinates(v) for v in group)
        if lam_p is None:
            continue
        # only subsets using a vector of the current norm are new
        for combo in itertools.combinations(range(len(pool)), rank):
            if combo[-1] < fresh:
                continue
            tried += 1
            if tried > combo_cap:
                raise CapExceeded("basis search", tried, combo_cap)
            if abs(det([pool[i] for i in combo])) == 1:
                return lam_p, nv
    return lam_p, None


def lambda_norms(M: NormedModule, cap: int = 10 ** 6, combo_cap: int = 10 ** 6) -> dict:
    """Exact ``λ'`` (Q-basis radius) and ``λ`` (Z-basis radius) with the check ``λ' <= λ <= rank λ'``.

    The search radius doubles from the shortest basis vector; the HNF basis
    itself bounds ``λ``, so the loop ends.
    """
    r = M.rank
    if r == 0:
        return {"lambda_prime": Fraction(0), "lambda": Fraction(0), "pass": True}
    norms = [M.norm(b) for b in M.lattice.basis]
    radius, r_max = min(norms), max(norms)
    while True:
        lam_p, lam = _lambda_within(M, min(radius, r_max), cap, combo_cap)
        if lam is not None:
            break
        if radius >= r_max:
            raise RuntimeError("no free basis inside the HNF radius")
        radius *= 2
    return {"lambda_prime": lam_p, "lambda": lam, "pass": lam_p <= lam <= r * lam_p}


def restricted_degree_identity(model: MetricModel, m: int) -> dict:
    """On a line (d' = 1) the restricted twist has ``λ = q^(-m)``, so ``-log λ / m = log q``.

    Compared with the closed-form restricted volume at the formula level:
    both are ``1 * log q`` with the same rational ``q``.
    """
    R = model.radius(m)
    res = lambda_norms(NormedModule(Lattice.full(1), cross_polytope(1, R)))
    cf = vhat_closed_form(model, SubvarietyY(model.n, tuple(range(model.n))))
    lam = res["lambda"]
    formula_ok = cf["coeff"] == 1 and cf["q"] == model.q if model.q > 1 else cf["coeff"] == 0
    identity = lam == 1 / R and formula_ok
    return {"lambda": lam, "lambda_prime": res["lambda_prime"], "q": model.q, "m": m,
            "closed_form": cf, "identity": identity}
