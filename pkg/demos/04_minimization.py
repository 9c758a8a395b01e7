"""
Minimizing a system over Q_3
============================

The reduction mod 3 of x1^2 + x2^2 + x3x4 + 9x5^2 is F_3-minimized, yet
the model is not minimal: x5 -> x5/3 lowers the score n vP + 2r vM.
"""

from quadsys.corpus_checks import Corpus
from quadsys.forms import reduce_mod_p
from quadsys.formlang import serialize_forms
from quadsys.minimize import check_transform, is_Fq_minimized, minimize_heuristic

corpus = Corpus()
S = corpus.system("q3-unminimized.qfs")

print("reduction minimized:", is_Fq_minimized(reduce_mod_p(S)).minimized)

res = minimize_heuristic(S)
for T in res.log:
    chk = check_transform(S, T)
    print("step:", chk.explain(S.n, S.r), chk.classification)
print(serialize_forms(res.model))
print("new reduction minimized:", is_Fq_minimized(reduce_mod_p(res.model)).minimized)
