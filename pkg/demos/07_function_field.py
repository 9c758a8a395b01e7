"""
Forms over F_q(T)
=================

Polynomial zeros of degree <= d of a form over F_q[T] are the common
zeros of R = 2d + D + 1 forms in N = n(d + 1) variables over F_q.
"""

from quadsys.corpus_checks import Corpus
from quadsys.formlang import parse_ft_system
from quadsys.ffred import first_degree_exceeding, reduce_ft_form, solution_to_polynomials
from quadsys.zeros import enumerate_common_zeros

corpus = Corpus()
for name in ("ff-square.qfs", "ff-nonsquare.qfs"):
    f = parse_ft_system(corpus.text(name)).forms["f"]
    res = reduce_ft_form(f, 1)
    zeros = enumerate_common_zeros(res.system, projective=True).reports
    print(name, f"N={res.N} R={res.R}", [solution_to_polynomials(res, z.point) for z in zeros])

# smallest d with N > 4R
for n, D in ((9, 1), (9, 2), (12, 3), (8, 1)):
    print(f"n={n} D={D}: d =", first_degree_exceeding(n, D))
