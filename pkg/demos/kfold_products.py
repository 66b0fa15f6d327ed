"""Products of small sections and their convex lattice hulls.

Multiply k small sections of level n, take the convex lattice hull of the
products, and compare it (exactly) with the small sections of level k n.
"""
from fractions import Fraction

from okv import MetricModel, fujita_kfold

model = MetricModel(1, q=Fraction(2))
for n in (1, 2):
    for row in fujita_kfold(model, n, 3):
        print(f"n={row['n']} k={row['k']}: |V| = {row['V_size']:>6}, |CL(V)| = {row['CL_size']:>13}, "
              f"contained: {row['contain_ok']}, valuations {row['nu_CL']} >= {row['nu_kfold']}")
