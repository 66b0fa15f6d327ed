"""Exact arithmetic substrate: lattices, linear programming, polytopes, enumeration."""
from .enumerate import (DEFAULT_CAP, count_lattice_points, enumerate_lattice_points, l1_ball_count,
                        l1_ball_points, lattice_points_array)
from .linalg import (IntVector, Lattice, RatVector, det, hnf, intersect, kernel_lattice, lattice_membership,
                     left_kernel, rank_q, rref, solve_q, span_many)
from .lp import LPResult, linprog, linprog_eq, rationalize_combination
from .polytope import (RationalPolytope, box, convex_hull, cross_polytope, minkowski_sum, polytope_volume,
                       simplex_volume, triangulate)

__all__ = [
    "DEFAULT_CAP", "count_lattice_points", "enumerate_lattice_points", "l1_ball_count", "l1_ball_points",
    "lattice_points_array", "IntVector", "Lattice", "RatVector", "det", "hnf", "intersect", "kernel_lattice",
    "lattice_membership", "left_kernel", "rank_q", "rref", "solve_q", "span_many", "LPResult", "linprog", "linprog_eq",
    "rationalize_combination", "RationalPolytope", "box", "convex_hull", "cross_polytope", "minkowski_sum",
    "polytope_volume", "simplex_volume", "triangulate",
]
