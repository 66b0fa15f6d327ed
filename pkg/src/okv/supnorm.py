"""Certified enclosures of sup norms of forms over the unit sphere of C^(n+1).

A point of the sphere is written with hyperspherical angles ``theta`` in
``[0, pi/2]^n`` for the moduli and phases ``phi`` in ``[0, 2 pi]^n`` (the
phase of ``z_0`` is irrelevant). On a box with centre ``c`` and half widths
``h`` a second order Taylor bound gives

    |F| <= max over corners |F(c) + J(c) delta| + 1/2 sum_jk H_jk h_j h_k,

with ``H_jk = sum_a |c_a| D_j(a) D_k(a)`` built from first derivative bounds of
each monomial. Values at box centres give lower bounds. Float evaluation
carries an explicit rounding margin; near ties are re-run with mpmath.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import mpmath
import numpy as np

from .errors import CapExceeded

IN, OUT, UNDECIDED = "IN", "OUT", "UNDECIDED"
_FLOAT_REL = 1e-12


@dataclass(frozen=True)
class Decision:
    status: str
    lower: float
    upper: float
    boxes: int
    precision: str  # "exact", "float" or "mp<bits>"


def _exponent_arrays(exps: Sequence[Sequence[int]]):
    E = np.array(exps, dtype=np.int64)
    n = E.shape[1] - 1
    # angle j (0-based) carries cos^A sin^B with A = a_j, B = a_{j+1} + ... + a_n
    A = E[:, :n]
    B = np.cumsum(E[:, ::-1], axis=1)[:, ::-1][:, 1:]
    P = E[:, 1:]
    Dang = A + B
    return E, A, B, P, Dang


def monomial_sup_sq(alpha: Sequence[int]) -> Fraction:
    """Exact ``sup |z^alpha|^2`` over the unit sphere: ``prod (a_i/m)^(a_i)``."""
    m = sum(alpha)
    if m == 0:
        return Fraction(1)
    out = Fraction(1)
    for a in alpha:
        if a:
            out *= Fraction(a, m) ** a
    return out


class SupEvaluator:
    """Vectorised value / gradient evaluation of a batch of forms sharing a monomial list."""

    def __init__(self, exps: Sequence[Sequence[int]]):
        self.exps = [tuple(e) for e in exps]
        self.E, self.A, self.B, self.P, self.Dang = _exponent_arrays(self.exps)
        self.n = self.E.shape[1] - 1

    def basis(self, theta: np.ndarray, phi: np.ndarray, grad: bool = True):
        """Monomial values (G x K complex) and derivatives (G x K x 2n) at G points."""
        n = self.n
        G, K = theta.shape[0], len(self.exps)
        top = int(self.E.sum(axis=1).max()) + 2 if K else 2

        def powers(x):
            out = np.empty((len(x), top))
            out[:, 0] = 1.0
            for k in range(1, top):
                out[:, k] = out[:, k - 1] * x
            return out

        f = np.ones((G, K))
        fac, dfac = [], []
        for j in range(n):
            A, B = self.A[:, j], self.B[:, j]
            cp, sp = powers(np.cos(theta[:, j])), powers(np.sin(theta[:, j]))
            g = cp[:, A] * sp[:, B]
            fac.append(g)
            f = f * g
            if grad:
                # d/dtheta cos^A sin^B; the clipped indices carry a zero factor
                dfac.append(-A * cp[:, np.maximum(A - 1, 0)] * sp[:, B + 1]
                            + B * cp[:, A + 1] * sp[:, np.maximum(B - 1, 0)])
        ph = np.ones((G, K), dtype=complex)
        for j in range(n):
            e = np.exp(1j * phi[:, j])
            ep = np.empty((G, top), dtype=complex)
            ep[:, 0] = 1.0
            for k in range(1, top):
                ep[:, k] = ep[:, k - 1] * e
            ph = ph * ep[:, self.P[:, j]]
        vals = f * ph
        if not grad:
            return vals, None
        J = np.zeros((G, K, 2 * n), dtype=complex)
        for j in range(n):
            others = np.ones_like(f)
            for k in range(n):
                if k != j:
                    others = others * fac[k]
            J[:, :, j] = dfac[j] * others * ph
            J[:, :, n + j] = 1j * self.P[:, j][None, :] * vals
        return vals, J

    def hessian_bound(self, coeffs: np.ndarray) -> np.ndarray:
        """Per-form 2n x 2n bounds on second derivatives (N x 2n x 2n)."""
        D = np.hstack([self.Dang, self.P]).astype(float)  # K x 2n
        absC = np.abs(coeffs).astype(float)  # N x K
        return np.einsum("nk,ki,kj->nij", absC, D, D)


def _domain(n: int):
    lo = np.array([0.0] * n + [0.0] * n)
    hi = np.array([math.pi / 2] * n + [2 * math.pi] * n)
    return lo, hi


def _grid(n: int, per_dim: int):
    lo, hi = _domain(n)
    axes = [lo[j] + (np.arange(per_dim) + 0.5) * (hi[j] - lo[j]) / per_dim for j in range(2 * n)]
    centres = np.array(list(product(*axes))) if n else np.zeros((1, 0))
    half = (hi - lo) / (2 * per_dim)
    return centres, half


def _box_upper(Fc: np.ndarray, Jc: np.ndarray, half: np.ndarray, Hb: np.ndarray) -> np.ndarray:
    """Taylor upper bound for boxes (rows) given centre value, gradient and half widths."""
    k = half.shape[-1]
    best = np.abs(Fc).copy()
    if k:
        signs = np.array(list(product((-1.0, 1.0), repeat=k)))
        for sg in signs:
            best = np.maximum(best, np.abs(Fc + (Jc * (sg * half)).sum(axis=-1)))
        quad = 0.5 * np.einsum("...i,...ij,...j->...", half, Hb, half)
        best = best + quad
    return best


def grid_screen(exps, coeffs: np.ndarray, bound: float, per_dim: int = 24, chunk: int = 256,
                with_upper: bool = True):
    """Bulk pass over a grid: (certain-in mask, certain-out mask, lower, upper) per form.

    With ``with_upper=False`` only values are computed, so only the
    certain-out mask is informative.
    """
    ev = SupEvaluator(exps)
    n = ev.n
    C = np.asarray(coeffs, dtype=float)
    centres, half = _grid(n, per_dim)
    vals, J = ev.basis(centres[:, :n], centres[:, n:], grad=with_upper)
    G, K = vals.shape
    VR = np.ascontiguousarray(vals.real.T)
    VI = np.ascontiguousarray(vals.imag.T)
    if with_upper and n:
        JK = np.ascontiguousarray(J.transpose(1, 0, 2).reshape(K, G * 2 * n))
        signs = np.array(list(product((-1.0, 1.0), repeat=2 * n))) * half[None, :]
    lower = np.zeros(len(C))
    upper = np.full(len(C), np.inf)
    for s in range(0, len(C), chunk):
        Cs = C[s:s + chunk]
        Fr, Fi = Cs @ VR, Cs @ VI  # N x G
        margin = _FLOAT_REL * np.abs(Cs).sum(axis=1) + 1e-300
        lower[s:s + chunk] = np.sqrt((Fr * Fr + Fi * Fi).max(axis=1)) - margin
        if not with_upper:
            continue
        Fv = Fr + 1j * Fi
        if n:
            Jv = (Cs @ JK).reshape(len(Cs), G, 2 * n)
            best = np.abs(Fv)
            for sg in signs:
                best = np.maximum(best, np.abs(Fv + Jv @ sg))
            Hb = ev.hessian_bound(Cs)
            quad = 0.5 * np.einsum("i,nij,j->n", half, Hb, half)
            upper[s:s + chunk] = best.max(axis=1) + quad + margin
        else:
            upper[s:s + chunk] = np.abs(Fv).max(axis=1) + margin
    return upper <= bound, lower > bound, lower, upper


def _bnb_batch(ev: SupEvaluator, C: np.ndarray, bound: float, max_boxes: int):
    """Branch and bound run jointly for many forms; returns status per form."""
    n = ev.n
    N = len(C)
    Hb = ev.hessian_bound(C)
    margin = _FLOAT_REL * np.abs(C).sum(axis=1) + 1e-300
    g0, half = _grid(n, 4)
    cid = np.repeat(np.arange(N), len(g0))
    centres = np.tile(g0, (N, 1))
    halves = np.tile(half, (len(centres), 1))
    status = np.array([UNDECIDED] * N, dtype=object)
    pending = np.ones(N, dtype=bool)
    used = np.zeros(N, dtype=np.int64)
    signs = np.array(list(product((-1.0, 1.0), repeat=2 * n)))
    diagH = np.sqrt(np.maximum(np.diagonal(Hb, axis1=1, axis2=2), 1e-30))
    while len(cid):
        np.add.at(used, cid, 1)
        vals, J = ev.basis(centres[:, :n], centres[:, n:])
        Cb = C[cid]
        Fc = (Cb * vals).sum(axis=1)
        Jc = np.einsum("gk,gkj->gj", Cb, J)
        absF = np.abs(Fc) - margin[cid]
        out_hit = np.zeros(N, dtype=bool)
        out_hit[cid[absF > bound]] = True
        best = np.abs(Fc)
        for sg in signs:
            best = np.maximum(best, np.abs(Fc + (Jc * (sg[None, :] * halves)).sum(axis=1)))
        quad = 0.5 * np.einsum("gi,gij,gj->g", halves, Hb[cid], halves)
        ub = best + quad + margin[cid]
        open_ = ub > bound
        has_open = np.zeros(N, dtype=bool)
        has_open[cid[open_]] = True
        newly_out = pending & out_hit
        status[newly_out] = OUT
        newly_in = pending & ~out_hit & ~has_open
        status[newly_in] = IN
        over = pending & ~out_hit & has_open & (used > max_boxes)
        pending &= ~(newly_out | newly_in | over)
        keep = open_ & pending[cid]
        cid, centres, halves = cid[keep], centres[keep], halves[keep]
        if not len(cid):
            break
        j = (halves * diagH[cid]).argmax(axis=1)
        rows = np.arange(len(j))
        step = np.zeros_like(halves)
        step[rows, j] = halves[rows, j] / 2
        halves = halves.copy()
        halves[rows, j] /= 2
        centres = np.vstack([centres - step, centres + step])
        halves = np.vstack([halves, halves])
        cid = np.concatenate([cid, cid])
    return status


def _bnb_float(ev: SupEvaluator, c: np.ndarray, bound: float, max_boxes: int):
    n = ev.n
    Hb = ev.hessian_bound(c[None, :])[0]
    margin = _FLOAT_REL * np.abs(c).sum() + 1e-300
    centres, half = _grid(n, 4)
    halves = np.tile(half, (len(centres), 1))
    lower = 0.0
    total = len(centres)
    while True:
        vals, J = ev.basis(centres[:, :n], centres[:, n:])
        Fc = vals @ c
        Jc = np.einsum("k,gkj->gj", c, J)
        lower = max(lower, float(np.abs(Fc).max()) - margin)
        if lower > bound:
            return OUT, lower, math.inf, total
        ub = _box_upper(Fc, Jc, halves, np.broadcast_to(Hb, (len(Fc),) + Hb.shape)) + margin
        open_ = ub > bound
        if not open_.any():
            return IN, lower, float(ub.max()), total
        if total > max_boxes:
            return UNDECIDED, lower, float(ub.max()), total
        centres, halves = centres[open_], halves[open_]
        # split every open box along its widest scaled direction
        scale = halves * np.sqrt(np.maximum(np.diagonal(Hb), 1e-30))[None, :]
        j = scale.argmax(axis=1)
        step = np.zeros_like(halves)
        step[np.arange(len(j)), j] = halves[np.arange(len(j)), j] / 2
        halves = halves.copy()
        halves[np.arange(len(j)), j] /= 2
        centres = np.vstack([centres - step, centres + step])
        halves = np.vstack([halves, halves])
        total += len(centres)


def _bnb_mp(exps, coeffs: Sequence[int], bound: Fraction, bits: int, max_boxes: int):
    """Scalar branch and bound in mpmath arithmetic at ``bits`` of precision."""
    with mpmath.workprec(bits):
        ev = SupEvaluator(exps)
        n = ev.n
        Hb = ev.hessian_bound(np.array([coeffs]))[0]
        H = [[mpmath.mpf(int(round(x))) for x in row] for row in Hb]  # entries are integers
        margin = mpmath.mpf(2) ** (-(bits - 24)) * sum(abs(int(x)) for x in coeffs)
        B = mpmath.mpf(bound.numerator) / bound.denominator
        lo_d, hi_d = _domain(n)
        pi = mpmath.pi
        lo = [mpmath.mpf(0)] * (2 * n)
        hi = [pi / 2] * n + [2 * pi] * n

        def evaluate(x):
            th, ph = x[:n], x[n:]
            F = mpmath.mpc(0)
            J = [mpmath.mpc(0)] * (2 * n)
            for alpha, cf in zip(ev.exps, coeffs):
                if not cf:
                    continue
                facs, dfacs = [], []
                for j in range(n):
                    a = alpha[j]
                    b = sum(alpha[j + 1:])
                    cj, sj = mpmath.cos(th[j]), mpmath.sin(th[j])
                    facs.append(cj ** a * sj ** b)
                    d = 0
                    if a:
                        d -= a * cj ** (a - 1) * sj ** (b + 1)
                    if b:
                        d += b * cj ** (a + 1) * sj ** (b - 1)
                    dfacs.append(d)
                e = mpmath.expj(sum(alpha[i + 1] * ph[i] for i in range(n))) if n else 1
                mod = mpmath.fprod(facs) if facs else mpmath.mpf(1)
                F += cf * mod * e
                for j in range(n):
                    others = mpmath.fprod(facs[k] for k in range(n) if k != j) if n > 1 else 1
                    J[j] += cf * dfacs[j] * others * e
                    J[n + j] += cf * 1j * alpha[j + 1] * mod * e
            return F, J

        def upper(F, J, h):
            best = abs(F)
            for sg in product((-1, 1), repeat=2 * n):
                best = max(best, abs(F + sum(J[j] * sg[j] * h[j] for j in range(2 * n))))
            quad = sum(H[i][j] * h[i] * h[j] for i in range(2 * n) for j in range(2 * n)) / 2
            return best + quad + margin

        heap = []
        lower = mpmath.mpf(0)
        count = 0

        def push(x, h):
            nonlocal lower, count
            F, J = evaluate(x)
            count += 1
            lower = max(lower, abs(F) - margin)
            ub = upper(F, J, h)
            if ub > B:
                heapq.heappush(heap, (-float(ub), count, x, h, ub))

        h0 = [(hi[j] - lo[j]) / 4 for j in range(2 * n)]
        for corner in product((0, 1), repeat=2 * n):
            push([lo[j] + (2 * corner[j] + 1) * h0[j] for j in range(2 * n)], h0)
        while True:
            if lower > B:
                return OUT, float(lower), math.inf, count
            if not heap:
                return IN, float(lower), float(B), count
            if count > max_boxes:
                return UNDECIDED, float(lower), float(heap[0][4]), count
            _, _, x, h, _ = heapq.heappop(heap)
            j = max(range(2 * n), key=lambda k: h[k] * math.sqrt(max(float(H[k][k]), 1e-30)))
            h2 = list(h)
            h2[j] = h[j] / 2
            for s in (-1, 1):
                y = list(x)
                y[j] = x[j] + s * h2[j]
                push(y, h2)


def decide_sup(exps, coeffs: Sequence[int], bound: Fraction, precision_bits: int = 128,
               max_boxes: int = 200_000, mp_max_boxes: int = 4_000) -> Decision:
    """Decide ``sup |sum c_a z^a| <= bound`` on the unit sphere, with certificates."""
    exps = [tuple(e) for e in exps]
    coeffs = [int(x) for x in coeffs]
    bound = Fraction(bound)
    nz = [(e, c) for e, c in zip(exps, coeffs) if c]
    if not nz:
        return Decision(IN, 0.0, 0.0, 0, "exact")
    if len(nz) == 1:
        e, c = nz[0]
        sq = c * c * monomial_sup_sq(e)
        val = math.sqrt(float(sq))
        return Decision(IN if sq <= bound * bound else OUT, val, val, 0, "exact")
    ev = SupEvaluator([e for e, _ in nz])
    c = np.array([x for _, x in nz], dtype=float)
    status, lo, hi, boxes = _bnb_float(ev, c, float(bound), max_boxes)
    if status != UNDECIDED:
        return Decision(status, lo, hi, boxes, "float")
    status, lo, hi, more = _bnb_mp([e for e, _ in nz], [x for _, x in nz], bound, precision_bits, mp_max_boxes)
    return Decision(status, lo, hi, boxes + more, f"mp{precision_bits}")


def sup_enclosure(exps, coeffs: Sequence[int], abs_tol: float = 1e-9, max_boxes: int = 400_000) -> tuple[float, float]:
    """Interval ``[lo, hi]`` containing the sup norm (float arithmetic with rounding margin)."""
    nz = [(tuple(e), int(c)) for e, c in zip(exps, coeffs) if c]
    if not nz:
        return 0.0, 0.0
    if len(nz) == 1:
        v = abs(nz[0][1]) * math.sqrt(float(monomial_sup_sq(nz[0][0])))
        return v, v
    ev = SupEvaluator([e for e, _ in nz])
    c = np.array([x for _, x in nz], dtype=float)
    n = ev.n
    Hb = ev.hessian_bound(c[None, :])[0]
    margin = _FLOAT_REL * np.abs(c).sum() + 1e-300
    centres, half = _grid(n, 4)
    halves = np.tile(half, (len(centres), 1))
    lower, total = 0.0, len(centres)
    while True:
        vals, J = ev.basis(centres[:, :n], centres[:, n:])
        Fc = vals @ c
        Jc = np.einsum("k,gkj->gj", c, J)
        lower = max(lower, float(np.abs(Fc).max()) - margin)
        ub = _box_upper(Fc, Jc, halves, np.broadcast_to(Hb, (len(Fc),) + Hb.shape)) + margin
        hi = float(ub.max())
        open_ = ub > lower + abs_tol
        if not open_.any() or total > max_boxes:
            return lower, max(hi, lower)
        centres, halves = centres[open_], halves[open_]
        scale = halves * np.sqrt(np.maximum(np.diagonal(Hb), 1e-30))[None, :]
        j = scale.argmax(axis=1)
        step = np.zeros_like(halves)
        step[np.arange(len(j)), j] = halves[np.arange(len(j)), j] / 2
        halves = halves.copy()
        halves[np.arange(len(j)), j] /= 2
        centres = np.vstack([centres - step, centres + step])
        halves = np.vstack([halves, halves])
        total += len(centres)


def l2_weight(alpha: Sequence[int]) -> Fraction:
    """``int |z^alpha|^2`` over the unit sphere for the normalised measure."""
    n = len(alpha) - 1
    m = sum(alpha)
    return Fraction(math.prod(math.factorial(a) for a in alpha) * math.factorial(n), math.factorial(m + n))


def ellipsoid_candidates(exps, bound: Fraction, cap: int = 10 ** 7) -> np.ndarray:
    """Integer vectors with ``sum c_a^2 w_a <= bound^2`` (a superset of the sup ball)."""
    w = [l2_weight(e) for e in exps]
    b2 = Fraction(bound) ** 2
    radii = [math.isqrt(math.floor(b2 / wi)) for wi in w]
    total = math.prod(2 * r + 1 for r in radii)
    if total > cap:
        raise CapExceeded("sup-norm candidate box", total, cap)
    # exact test after scaling the weights to a common integer denominator
    den = math.lcm(*(wi.denominator for wi in w), b2.denominator)
    wi_int = np.array([int(wi * den) for wi in w], dtype=np.int64)
    lim = int(b2 * den)
    grids = np.meshgrid(*[np.arange(-r, r + 1, dtype=np.int64) for r in radii], indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1)
    keep = (X * X * wi_int[None, :]).sum(axis=1) <= lim
    X = X[keep]
    order = np.lexsort(X.T[::-1])
    return X[order]


def sup_ball_points(exps, bound: Fraction, precision_bits: int = 128, grid_levels: Sequence[int] = (24,),
                    cap: int = 10 ** 7):
    """Integer coefficient vectors with certified sup norm ``<= bound``.

    Returns ``(inside, undecided, stats)``; undecided vectors are excluded
    from the ball by the caller and reported.
    """
    cand = ellipsoid_candidates(exps, bound, cap)
    if len(cand) == 0:
        return cand, cand, {"candidates": 0, "grid_in": 0, "grid_out": 0, "bnb": 0, "escalated": 0,
                            "undecided": 0}
    nnz = (cand != 0).sum(axis=1)
    inside = np.zeros(len(cand), dtype=bool)
    undecided = np.zeros(len(cand), dtype=bool)
    # at most one nonzero coefficient: exact decision
    simple = nnz <= 1
    b2 = Fraction(bound) ** 2
    for i in np.nonzero(simple)[0]:
        row = cand[i]
        nzj = np.nonzero(row)[0]
        if len(nzj) == 0:
            inside[i] = True
        else:
            j = nzj[0]
            inside[i] = int(row[j]) ** 2 * monomial_sup_sq(exps[j]) <= b2
    rest = np.nonzero(~simple)[0]
    stats = {"candidates": int(len(cand)), "grid_in": 0, "grid_out": 0, "bnb": 0, "escalated": 0,
             "undecided": 0}
    if len(rest):
        todo = rest
        per_out = 16 if len(exps[0]) == 2 else 8
        chunk = max(8, 2 ** 18 // per_out ** (2 * (len(exps[0]) - 1)))
        _, gout, _, _ = grid_screen(exps, cand[todo], float(bound), per_out, chunk, with_upper=False)
        stats["grid_out"] += int(gout.sum())
        todo = todo[~gout]
        for per_dim in grid_levels:
            if len(todo) == 0:
                break
            chunk = max(8, 2 ** 16 // per_dim ** (2 * (len(exps[0]) - 1)))
            gin, gout, _, _ = grid_screen(exps, cand[todo], float(bound), per_dim, chunk)
            inside[todo[gin]] = True
            stats["grid_in"] += int(gin.sum())
            stats["grid_out"] += int(gout.sum())
            todo = todo[~gin & ~gout]
        ev = SupEvaluator(exps)
        for s in range(0, len(todo), 512):
            part = todo[s:s + 512]
            st = _bnb_batch(ev, cand[part].astype(float), float(bound), 20_000)
            stats["bnb"] += len(part)
            inside[part[st == IN]] = True
            for i in part[st == UNDECIDED]:
                d = decide_sup(exps, cand[i].tolist(), bound, precision_bits)
                stats["escalated"] += 1
                if d.status == IN:
                    inside[i] = True
                elif d.status == UNDECIDED:
                    undecided[i] = True
    stats["undecided"] = int(undecided.sum())
    return cand[inside], cand[undecided], stats
