"""Free-basis radius versus spanning radius of a normed lattice.

lambda' is the smallest radius whose ball holds a Q-basis, lambda the
smallest holding a Z-basis; lambda' <= lambda <= rank * lambda'.
"""
from okv.exact import Lattice, convex_hull
from okv.runner import random_normed_modules
from okv.volume import NormedModule, lambda_norms

square = convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]])
for basis in ([[1, 0], [0, 1]], [[2, 0], [0, 2]], [[1, 100], [0, 101]]):
    res = lambda_norms(NormedModule(Lattice.span(basis), square))
    print(basis, "lambda' =", res["lambda_prime"], "lambda =", res["lambda"])

mods = random_normed_modules(200, seed=1)
res = [lambda_norms(M) for M in mods]
print(f"{len(res)} random modules: {sum(r['pass'] for r in res)} satisfy the inequality, "
      f"{sum(r['lambda'] > r['lambda_prime'] for r in res)} with lambda > lambda'")
