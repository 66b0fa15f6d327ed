"""Valuation bodies over different primes.

Normalised valuation vectors of small sections fill a convex body whose
volume, scaled by 2! log p, approximates the growth rate of the counts.
Larger primes give a coarser first coordinate, and the gap between the
valuation count and the log-count is tracked alongside.
"""
from fractions import Fraction

import mpmath

from okv import MetricModel, okounkov_body, valuation_gap, vhat_vol_estimate
from okv.volume import default_flag

model = MetricModel(1, q=Fraction(2))
count_estimate = vhat_vol_estimate(model, [29, 30]).limit
print("count-based estimate at m = 29, 30:", mpmath.nstr(count_estimate, 8))
for p in (2, 5, 11):
    body = okounkov_body(model, default_flag(1, p), 30)
    print(f"p = {p:>2}: body volume {str(body.volume):>5}, vertices {len(body.body.vertices)}, "
          f"body estimate {mpmath.nstr(body.vhat_from_body, 8)}")

print("\nvaluation count vs log-count at p = 5")
for m in (1, 2, 3, 4, 10, 50):
    r = valuation_gap(model, default_flag(1, 5), m)
    print(f"m = {m:>2}: #nu = {r.nu_count:>5}, gap = {mpmath.nstr(r.gap, 8):>10}, bound = {mpmath.nstr(r.rhs, 8)}")
