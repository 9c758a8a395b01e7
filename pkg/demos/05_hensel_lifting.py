"""
Hensel lifting
==============

A nonsingular zero mod p lifts to a zero mod p^k; Newton's method
doubles the precision each step.
"""

from quadsys.corpus_checks import Corpus
from quadsys.hensel import lift_nonsingular, padic_solve

corpus = Corpus()
S = corpus.system("hyperbolic.qfs")

# x1*x2 + 5*x3^2 + 7*x3*x4 + 25*x4^2 at (1, 3, 1, 1) is 15 = 0 mod 5
v = lift_nonsingular(S, (1, 3, 1, 1), 16)
print(f"{v.iterations} Newton steps, columns {[c + 1 for c in v.columns]}")
print("base-5 digits:", v.digits())

# the full pipeline: minimize, search mod p, lift, map back
for name in ("q3-unminimized.qfs", "q3-anisotropic.qfs"):
    res = padic_solve(corpus.system(name), k=10)
    print(name, res.status, res.vector.coords if res.vector else res.reason)
