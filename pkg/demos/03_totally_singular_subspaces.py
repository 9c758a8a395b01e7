"""
Totally singular subspaces
==========================

Backtracking over reduced echelon bases finds a common isotropic
subspace or certifies that none exists.
"""

from quadsys.corpus_checks import Corpus
from quadsys.subspace import find_totally_singular, max_totally_singular_dim

corpus = Corpus()

elliptic = corpus.system("f2-elliptic.qfs")
print("elliptic quaternary: largest totally singular dimension", max_totally_singular_dim(elliptic))

pair = corpus.system("f2-pair.qfs")
for d in (3, 4):
    res = find_totally_singular(pair, d)
    print(f"pair, dim {d}: found={res.found} certified={res.certified} nodes={res.nodes}")
    if res.found:
        for row in res.subspace.basis:
            print("   ", row)
