"""How fast do small sections grow?

On the projective line with the l1 norm twisted by q = 2, the number of
degree-m forms of norm at most 2^m is an exact cross-polytope count. Its
logarithm grows like m^2 and the normalised limit is 2 log 2.
"""
from fractions import Fraction

import mpmath

from okv import MetricModel, SubvarietyY, vhat_closed_form, vhat_vol_estimate

model = MetricModel(1, q=Fraction(2))
seq = vhat_vol_estimate(model, range(1, 201))
print("m    #small sections (digits)   2 log N / m^2")
for m, count, norm in seq.entries[:5] + seq.entries[-3:]:
    print(f"{m:<4} {len(str(count)):>10}                 {mpmath.nstr(norm, 10)}")
print("extrapolated limit:", mpmath.nstr(seq.limit, 12), "+/-", mpmath.nstr(seq.error, 3))
print("closed form 2 log 2:", mpmath.nstr(vhat_closed_form(model)["value"], 12))

# restricted to the point {x0 = 0}: the count is 2 * 2^m + 1 and the growth is linear
line = SubvarietyY(1, (0,))
r = vhat_vol_estimate(model, [4999, 5000, 9999, 10000], line)
print("restricted limit:", mpmath.nstr(r.limit, 12), " log 2 =", mpmath.nstr(mpmath.log(2), 12))
