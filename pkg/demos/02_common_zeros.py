"""
Counting common zeros over F_q
==============================

Exhaustive enumeration, the exact count from the classification of a
single form, and the Chevalley-Warning congruence.
"""

from quadsys.corpus_checks import Corpus
from quadsys.fields import FieldDesc
from quadsys.formlang import parse_forms
from quadsys.zeros import (
    chevalley_warning_check,
    classify_form,
    count_zeros_exact,
    enumerate_common_zeros,
    find_nonsingular_zero,
)

corpus = Corpus()

# three forms over F_2 in 13 variables: 8192 points, enumerated with bit-packed numpy
triple = corpus.system("f2-triple.qfs")
en = enumerate_common_zeros(triple)
ranks = {r.jacobian_rank for r in en.reports}
print(f"{en.count} common zeros, Jacobian ranks seen: {sorted(ranks)}")
print("nonsingular zero:", find_nonsingular_zero(triple).found)

# a single form: count from its type, checked against enumeration
F5 = FieldDesc.prime(5)
S = parse_forms(["x1^2 + 2*x2^2 + x3*x4"], F5, 4)
print(classify_form(S.forms[0]).kind, count_zeros_exact(S.forms[0]), enumerate_common_zeros(S).count)

# n > 2r: the number of zeros is divisible by p
cw = chevalley_warning_check(parse_forms(["x1^2 + x2^2 + x3^2", "x1*x2 + x3*x4 + x5^2"], F5, 5))
print("count", cw.count, "divisible by p:", cw.congruent)
