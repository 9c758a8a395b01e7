"""
Isotropy of one form over Q_p
=============================

Hilbert symbols and the Hasse invariant decide isotropy; a brute-force
search over primitive residues, certified by Hensel's lemma, agrees.
"""

import random

from quadsys.fields import FieldDesc
from quadsys.forms import QuadraticForm
from quadsys.oneform import anisotropic_quaternary, hilbert_symbol, is_isotropic_qp, isotropy_oracle

print("(-1,-1)_2 =", hilbert_symbol(-1, -1, 2), " (3,2)_3 =", hilbert_symbol(3, 2, 3))

for p in (2, 3, 5, 7):
    q = anisotropic_quaternary(p)
    print(p, is_isotropic_qp(q).reason)

rng = random.Random(1)
disagree = 0
for _ in range(100):
    p = rng.choice([2, 3, 5])
    n = rng.randint(2, 4)
    q = QuadraticForm(FieldDesc.padic(p), n, {(i, j): rng.randint(-9, 9) for i in range(n) for j in range(i, n)})
    disagree += is_isotropic_qp(q).isotropic != isotropy_oracle(q).isotropic
print("disagreements with the oracle:", disagree)
