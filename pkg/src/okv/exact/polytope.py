"""Exact rational polytopes in vertex form.

Facets are derived on demand with the double description method run on the
homogenised point cloud, in the coordinates of the affine hull. Volumes come
from a recursive triangulation pulled from the lexicographically first vertex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch
from ..jsonio import encode_rat_vector
from .linalg import RatVector, det, rank_q, rref


def _as_rat(v) -> RatVector:
    return tuple(Fraction(x) for x in v)


def _lcm_denoms(vals) -> int:
    out = 1
    for v in vals:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def extreme_rays(constraints: Sequence[Sequence[int]]) -> list[tuple[tuple[int, ...], frozenset]]:
    """Extreme rays of the pointed cone ``{y : C y >= 0}`` (double description).

    ``constraints`` must span the whole space. Each ray is returned together
    with the set of constraint indices that are tight on it.
    """
    C = [tuple(int(x) for x in row) for row in constraints]
    d = len(C[0])
    # greedy choice of d independent rows for the initial simplicial cone
    chosen: list[int] = []
    for i in range(len(C)):
        if rank_q([C[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
            if len(chosen) == d:
                break
    if len(chosen) < d:
        raise ValueError("constraints do not define a pointed cone")
    B = [[Fraction(x) for x in C[i]] for i in chosen]
    # columns of B^{-1} are the initial rays
    aug = [row + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(B)]
    R, _ = rref(aug)
    inv = [row[d:] for row in R]
    rays = []
    for k in range(d):
        col = [inv[i][k] for i in range(d)]
        den = _lcm_denoms(col)
        r = _primitive([int(x * den) for x in col])
        zeros = frozenset(chosen[j] for j in range(d) if j != k)
        rays.append((r, zeros))
    done = set(chosen)
    for i, row in enumerate(C):
        if i in done:
            continue
        vals = [sum(a * b for a, b in zip(row, r)) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new = []
        if neg:
            for a in pos:
                ra, za = rays[a]
                for b in neg:
                    rb, zb = rays[b]
                    common = za & zb
                    if len(common) < d - 2:
                        continue
                    if any(k not in (a, b) and common <= rays[k][1] for k in range(len(rays))):
                        continue
                    va, vb = vals[a], vals[b]
                    r = _primitive([va * y - vb * x for x, y in zip(ra, rb)])
                    new.append((r, common | {i}))
        rays = ([(rays[k][0], rays[k][1]) for k in pos]
                + [(rays[k][0], rays[k][1] | {i}) for k in zer] + new)
        done.add(i)
    return rays


@dataclass(frozen=True)
class Facet:
    """The inequality ``normal . x <= offset`` (integer data) with its vertices."""

    normal: tuple[int, ...]
    offset: int
    vertices: tuple[RatVector, ...]


@dataclass(frozen=True, eq=False)
class RationalPolytope:
    """Convex hull of finitely many rational points, kept as its vertex list.

    ``vertices`` is irredundant and sorted; build instances with
    :func:`convex_hull` (or the ``cross_polytope``/``box`` helpers) rather
    than directly. An empty vertex list is the empty polytope.
    """

    vertices: tuple[RatVector, ...]
    ambient_dim: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, RationalPolytope) and (
            self.ambient_dim, self.vertices) == (other.ambient_dim, other.vertices)

    def __hash__(self):
        return hash((self.ambient_dim, self.vertices))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def _affine(self):
        return _affine_hull(self.vertices)

    @property
    def dim(self) -> int:
        """Affine dimension (-1 for the empty polytope)."""
        return -1 if self.is_empty else len(self._affine[1])

    @property
    def equalities(self) -> list[tuple[tuple[int, ...], int]]:
        """Integer equations ``a . x == b`` cutting out the affine hull."""
        return [] if self.is_empty else self._affine[2]

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        if self.is_empty or self.dim == 0:
            return ()
        return tuple(_facets(self.vertices, self._affine))

    def contains(self, x: Sequence) -> bool:
        if self.is_empty:
            return False
        if len(x) != self.ambient_dim:
            raise DimensionMismatch(f"point of length {len(x)} in R^{self.ambient_dim}")
        x = _as_rat(x)
        if any(sum(a * xi for a, xi in zip(eq, x)) != b for eq, b in self.equalities):
            return False
        return all(sum(a * xi for a, xi in zip(f.normal, x)) <= f.offset for f in self.facets)

    def __contains__(self, x):
        return self.contains(x)

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        """Vectorised exact membership for an integer array of points (one per row)."""
        X = np.asarray(X, dtype=object if X.dtype == object else np.int64)
        ok = np.ones(len(X), dtype=bool)
        if self.is_empty:
            return ~ok
        rows = [(np.array(a, dtype=object), b, True) for a, b in self.equalities]
        rows += [(np.array(f.normal, dtype=object), f.offset, False) for f in self.facets]
        for a, b, is_eq in rows:
            vals = X.astype(object) @ a if X.dtype == object else _safe_dot(X, a)
            ok &= (vals == b) if is_eq else (vals <= b)
        return ok

    def scale(self, a) -> "RationalPolytope":
        a = Fraction(a)
        if a == 0:
            return convex_hull([[0] * self.ambient_dim]) if not self.is_empty else self
        verts = sorted(tuple(a * x for x in v) for v in self.vertices)
        return RationalPolytope(tuple(verts), self.ambient_dim)

    def is_symmetric(self) -> bool:
        vs = set(self.vertices)
        return all(tuple(-x for x in v) in vs for v in vs)

    def bounding_box(self) -> tuple[RatVector, RatVector]:
        lo = tuple(min(v[j] for v in self.vertices) for j in range(self.ambient_dim))
        hi = tuple(max(v[j] for v in self.vertices) for j in range(self.ambient_dim))
        return lo, hi

    def l1_radius(self) -> Fraction | None:
        """``R`` when this is exactly the cross-polytope ``{|x|_1 <= R}``, else None."""
        if "l1" not in self._cache:
            n = self.ambient_dim
            R = None
            if len(self.vertices) == 2 * n and n > 0:
                R = max(abs(x) for x in self.vertices[0])
                expected = sorted(tuple(s * R * int(i == j) for j in range(n))
                                  for i in range(n) for s in (1, -1))
                if R <= 0 or list(self.vertices) != expected:
                    R = None
            elif n > 0 and self.vertices == (tuple(Fraction(0) for _ in range(n)),):
                R = Fraction(0)
            self._cache["l1"] = R
        return self._cache["l1"]

    def intersect_halfspace(self, normal: Sequence, offset) -> "RationalPolytope":
        """``self`` cut by ``normal . x <= offset``."""
        normal = _as_rat(normal)
        offset = Fraction(offset)

        def val(v):
            return sum(a * x for a, x in zip(normal, v)) - offset

        keep = [v for v in self.vertices if val(v) <= 0]
        out = [v for v in self.vertices if val(v) > 0]
        cut = []
        for u in keep:
            fu = val(u)
            if fu == 0:
                continue
            for w in out:
                fw = val(w)
                t = fu / (fu - fw)
                cut.append(tuple(a + t * (b - a) for a, b in zip(u, w)))
        pts = keep + cut
        return convex_hull(pts) if pts else RationalPolytope((), self.ambient_dim)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "vertices": [encode_rat_vector(v) for v in self.vertices]}


def _safe_dot(X: np.ndarray, a) -> np.ndarray:
    a_int = [int(v) for v in a]
    bound = (int(np.abs(X).max()) if X.size else 0) * sum(abs(v) for v in a_int)
    if bound < 2 ** 62:
        return X @ np.array(a_int, dtype=np.int64)
    return X.astype(object) @ np.array(a_int, dtype=object)


def _affine_hull(points: Sequence[RatVector]):
    """(base point, pivot coordinates, integer equalities) of the affine hull."""
    p0 = points[0]
    n = len(p0)
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in points[1:]]
    R, piv = rref(diffs) if diffs else ([], [])
    eqs = []
    for j in range(n):
        if j in piv:
            continue
        # x_j - p0_j = sum_r R[r][j] * (x_{piv_r} - p0_{piv_r})
        coeffs = [Fraction(0)] * n
        coeffs[j] = Fraction(1)
        for r, c in enumerate(piv):
            coeffs[c] -= R[r][j]
        rhs = sum(a * x for a, x in zip(coeffs, p0))
        den = _lcm_denoms(coeffs + [rhs])
        ints = [int(a * den) for a in coeffs] + [int(rhs * den)]
        g = math.gcd(*ints)
        eqs.append((tuple(x // g for x in ints[:-1]), ints[-1] // g))
    return p0, piv, eqs


def _facets(vertices: Sequence[RatVector], affine) -> list[Facet]:
    _, piv, _ = affine
    k = len(piv)
    proj = [tuple(v[c] for c in piv) for v in vertices]
    den = _lcm_denoms(x for v in proj for x in v)
    # homogenised rows (den, den*v) so that y = (b, -a) encodes a.v <= b/den
    rows = [(den,) + tuple(int(x * den) for x in v) for v in proj]
    out = []
    if k == 1:
        vals = [v[0] for v in proj]
        lo, hi = min(vals), max(vals)
        for sign, bound in ((1, hi), (-1, lo)):
            normal = [0] * len(vertices[0])
            d = bound.denominator
            normal[piv[0]] = sign * d
            vs = tuple(v for v, pv in zip(vertices, proj) if pv[0] == bound)
            out.append(Facet(tuple(normal), int(sign * bound * d), vs))
        return out
    for ray, tight in extreme_rays(rows):
        b, a = ray[0], ray[1:]
        # b*den + a.(den*v) >= 0  <=>  (-a).v <= b
        normal = [0] * len(vertices[0])
        for c, ai in zip(piv, a):
            normal[c] = -ai
        vs = tuple(vertices[i] for i in sorted(tight))
        out.append(Facet(tuple(normal), b, vs))
    return out


def _hull_2d(proj):
    """Andrew's monotone chain on exact points; returns indices of hull vertices."""
    order = sorted(range(len(proj)), key=lambda i: proj[i])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for i in order:
        while len(lower) >= 2 and cross(proj[lower[-2]], proj[lower[-1]], proj[i]) <= 0:
            lower.pop()
        lower.append(i)
    for i in reversed(order):
        while len(upper) >= 2 and cross(proj[upper[-2]], proj[upper[-1]], proj[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def _extreme_candidates(proj, k, rng_seed=0):
    """Indices that are extreme along a fixed set of directions (certain vertices)."""
    dirs = []
    for j in range(k):
        e = [0] * k
        e[j] = 1
        dirs.append(e)
    rng = np.random.default_rng(rng_seed)
    for _ in range(4 * k):
        dirs.append([int(x) for x in rng.integers(-7, 8, size=k)])
    idx = set()
    for d in dirs:
        for s in (1, -1):
            vals = [s * sum(a * x for a, x in zip(d, p)) for p in proj]
            best = max(vals)
            ties = [i for i, v in enumerate(vals) if v == best]
            # a lexicographic tie-break keeps only a genuine vertex
            idx.add(min(ties, key=lambda i: proj[i]))
    return sorted(idx)


def convex_hull(points) -> RationalPolytope:
    """Irredundant vertex description of the convex hull of rational points."""
    if isinstance(points, np.ndarray) and points.dtype.kind in "iu" and points.ndim == 2:
        return _hull_int(points.astype(np.int64))
    pts = sorted({_as_rat(p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatch("points of different lengths")
    if len(pts) > 256 and all(x.denominator == 1 for p in pts for x in p):
        return _hull_int(np.array([[int(x) for x in p] for p in pts], dtype=object))
    if len(pts) == 1:
        return RationalPolytope(tuple(pts), n)
    p0, piv, eqs = _affine_hull(pts)
    k = len(piv)
    if k == 0:
        return RationalPolytope((pts[0],), n)
    proj = [tuple(p[c] for c in piv) for p in pts]
    if k == 1:
        verts = [min(pts, key=lambda p: p[piv[0]]), max(pts, key=lambda p: p[piv[0]])]
    elif k == 2:
        verts = [pts[i] for i in _hull_2d(proj)]
    else:
        verts = _hull_dd(pts, proj, (p0, piv, eqs))
    return RationalPolytope(tuple(sorted(set(verts))), n)


_PRIME = 2147483629


def _independent_rows(D: np.ndarray) -> list[int]:
    """Row indices independent mod a large prime (hence over Q)."""
    M = np.array([[int(x) % _PRIME for x in row] for row in D], dtype=np.int64) if D.dtype == object \
        else D % _PRIME
    chosen = []
    for col in range(M.shape[1]):
        nz = np.flatnonzero(M[:, col])
        if not len(nz):
            continue
        r = int(nz[0])
        chosen.append(r)
        inv = pow(int(M[r, col]), -1, _PRIME)
        prow = (M[r] * inv) % _PRIME
        factors = M[:, col].copy()
        M = (M - (factors[:, None] * prow[None, :]) % _PRIME) % _PRIME
    return chosen


def _affine_hull_int(X: np.ndarray):
    """Exact affine hull of many integer points: candidate rows, then verification."""
    rows = [0] + [i + 1 for i in _independent_rows(X[1:] - X[0])]
    while True:
        sub = [tuple(Fraction(int(x)) for x in X[i]) for i in rows]
        p0, piv, eqs = _affine_hull(sub)
        bad = None
        for a, b in eqs:
            hit = np.flatnonzero(_safe_dot(X, a) != b)
            if len(hit):
                bad = int(hit[0])
                break
        if bad is None:
            return p0, piv, eqs, rows
        rows.append(bad)


def _argmax_first(vals: np.ndarray) -> int:
    # rows are lex-sorted, so the first maximiser is the lex-smallest one: a vertex
    return int(np.flatnonzero(vals == vals.max())[0])


def _hull_int(X: np.ndarray) -> RationalPolytope:
    if X.dtype != object and X.size and np.abs(X).max() >= 2 ** 31:
        X = X.astype(object)
    X = np.array(sorted(set(map(tuple, X.tolist()))), dtype=X.dtype) if X.dtype == object \
        else np.unique(X, axis=0)
    if not len(X):
        raise ValueError("convex hull of an empty point set")
    n = X.shape[1]

    def rat(i):
        return tuple(Fraction(int(x)) for x in X[i])

    if len(X) == 1:
        return RationalPolytope((rat(0),), n)
    p0, piv, eqs, rows = _affine_hull_int(X)
    k = len(piv)
    if k == 0:
        return RationalPolytope((rat(0),), n)
    if k == 1:
        col = X[:, piv[0]]
        return RationalPolytope(tuple(sorted({rat(_argmax_first(-col)), rat(_argmax_first(col))})), n)
    if k == 2:
        proj = [tuple(int(X[i, c]) for c in piv) for i in range(len(X))]
        return RationalPolytope(tuple(sorted(rat(i) for i in _hull_2d(proj))), n)
    seed = set(rows)
    for d in _directions(k, 4):
        full = [0] * n
        for c, a in zip(piv, d):
            full[c] = a
        for s in (1, -1):
            seed.add(_argmax_first(_safe_dot(X, [s * a for a in full])))
    affine = (p0, piv, eqs)
    seed = sorted(seed)
    while True:
        cand = [rat(i) for i in seed]
        facets = _facets(cand, affine)
        new = set()
        for f in facets:
            vals = _safe_dot(X, f.normal)
            if vals.max() > f.offset:
                new.add(_argmax_first(vals))
        if not new:
            break
        seed = sorted(set(seed) | new)
    verts = []
    for p in cand:
        tight = [tuple(f.normal[c] for c in piv) for f in facets if p in f.vertices]
        if rank_q(tight) == k:
            verts.append(p)
    return RationalPolytope(tuple(sorted(verts)), n)


def _directions(k, mult, rng_seed=0):
    dirs = [[int(i == j) for j in range(k)] for i in range(k)]
    rng = np.random.default_rng(rng_seed)
    for _ in range(mult * k):
        dirs.append([int(x) for x in rng.integers(-7, 8, size=k)])
    return dirs


def _raise_rank(pts, seed, k):
    """Extend ``seed`` by points until its affine span has dimension ``k``."""
    seed = list(seed)
    base = pts[seed[0]]

    def r(idx):
        return rank_q([tuple(a - b for a, b in zip(pts[i], base)) for i in idx])

    cur = r(seed)
    for i in range(len(pts)):
        if cur == k:
            break
        if i not in seed and r(seed + [i]) > cur:
            seed.append(i)
            cur += 1
    return sorted(seed)


def _hull_dd(pts, proj, affine):
    k = len(affine[1])
    seed = _extreme_candidates(proj, k)
    seed = _raise_rank(pts, seed, k)
    while True:
        cand = [pts[i] for i in seed]
        facets = _facets(cand, affine)
        outside = []
        for i, p in enumerate(pts):
            if i in seed:
                continue
            if any(sum(a * x for a, x in zip(f.normal, p)) > f.offset for f in facets):
                outside.append(i)
        if not outside:
            break
        seed = sorted(set(seed) | set(outside))
    # vertices are the seed points whose tight facet normals span the affine directions
    verts = []
    piv = affine[1]
    for p in cand:
        tight = [tuple(f.normal[c] for c in piv) for f in facets if p in f.vertices]
        if rank_q(tight) == k:
            verts.append(p)
    return verts


def cross_polytope(dim: int, radius) -> RationalPolytope:
    """The l1 ball ``{x : |x|_1 <= radius}``."""
    R = Fraction(radius)
    if R < 0:
        raise ValueError("negative radius")
    if R == 0:
        return RationalPolytope((tuple(Fraction(0) for _ in range(dim)),), dim)
    verts = sorted(tuple(s * R * int(i == j) for j in range(dim)) for i in range(dim) for s in (1, -1))
    P = RationalPolytope(tuple(verts), dim)
    P._cache["l1"] = R
    return P


def box(lo: Sequence, hi: Sequence) -> RationalPolytope:
    corners = product(*[(Fraction(a), Fraction(b)) if a != b else (Fraction(a),) for a, b in zip(lo, hi)])
    return convex_hull(list(corners))


def triangulate(P: RationalPolytope) -> list[tuple[RatVector, ...]]:
    """Pulling triangulation of ``P`` into simplices of its own affine dimension."""
    k = P.dim
    if k <= 0:
        return [P.vertices] if k == 0 else []
    if len(P.vertices) == k + 1:
        return [P.vertices]
    v0 = P.vertices[0]
    out = []
    for f in P.facets:
        if v0 in f.vertices:
            continue
        for simplex in triangulate(convex_hull(f.vertices)):
            out.append((v0,) + simplex)
    return out


def polytope_volume(P: RationalPolytope) -> Fraction:
    """Exact Lebesgue measure in the ambient space (0 unless full-dimensional)."""
    n = P.ambient_dim
    if P.is_empty or P.dim < n:
        return Fraction(0)
    if P.l1_radius() is not None:
        return Fraction(2 ** n) * P.l1_radius() ** n / math.factorial(n)
    total = Fraction(0)
    for simplex in triangulate(P):
        v0 = simplex[0]
        total += abs(Fraction(det([[a - b for a, b in zip(v, v0)] for v in simplex[1:]])))
    return total / math.factorial(n)


def minkowski_sum(P: RationalPolytope, Q: RationalPolytope) -> RationalPolytope:
    return convex_hull([tuple(a + b for a, b in zip(u, v)) for u in P.vertices for v in Q.vertices])


def simplex_volume(simplex: Sequence[RatVector]) -> Fraction:
    v0 = simplex[0]
    k = len(simplex) - 1
    return abs(Fraction(det([[a - b for a, b in zip(v, v0)] for v in simplex[1:]]))) / math.factorial(k)


__all__ = ["RationalPolytope", "Facet", "convex_hull", "polytope_volume", "cross_polytope", "box",
           "triangulate", "extreme_rays", "minkowski_sum", "simplex_volume"]
