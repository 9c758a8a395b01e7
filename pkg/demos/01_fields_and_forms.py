"""
Finite fields and quadratic forms
=================================

Build F_9 from an explicit modulus, write a form in the .qfs language,
and look at its polar matrix, radical and rank.
"""

import random

from quadsys.fields import FieldDesc
from quadsys.formlang import parse_system, serialize_system
from quadsys.forms import form_rank, radical_and_rank, random_invertible, substitute

# F_9 = F_3[t]/(t^2 + 2t + 2); elements are stored as integers 0..8
F9 = FieldDesc.extension(3, [2, 2, 1])
t = F9.from_coeffs([0, 1])
print("t^8 =", F9.pow(t, 8), " (t generates F_9^*)")

doc = parse_system(
    """# a hyperbolic plane plus an anisotropic line, over F_9
field Fq 9 poly=2,2,1
vars 4
form q = x1*x2 + t*x3^2
"""
)
q = doc.forms["q"]
print(serialize_system(doc))

# Gram matrix: diagonal entries are 2 c_ii
print("gram:", q.gram)
rad, rk = radical_and_rank(q)
print("rank", rk, "radical basis", rad.basis)

# rank survives any invertible change of variables
M = random_invertible(F9, 4, random.Random(0))
print("rank after substitution:", form_rank(substitute(q, M)))
