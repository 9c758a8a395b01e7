"""
Bounds for beta(r; Q_p)
=======================

Dynamic programming over the recursive inequalities, with a derivation
tree that can be re-checked independently.
"""

import numpy as np

from quadsys.bounds import bound_table, closed_form, recompute, upper_bound

rows = bound_table(12)
for row in rows:
    print(f"{row.r:3d}  {row.bracket():28s} [{row.rule}]")

print(upper_bound(5).render())
print("recomputed:", recompute(upper_bound(40)))

r = np.arange(6, 10_001)
upper = np.array([row.upper for row in bound_table(10_000)[5:]])
print("closed form holds to 10^4:", all(upper == [closed_form(int(x)) for x in r]))
