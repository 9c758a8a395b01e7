"""The ``verify-paper`` corpus: each entry runs one operation on bundled data and checks its outcome."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

from .bounds import bound_table, closed_form, recompute, upper_bound
from .fields import FieldDesc, valuation
from .ffred import first_degree_exceeding, reduce_ft_form, solution_to_polynomials
from .formlang import parse_form, parse_ft_system, parse_system, serialize_system
from .forms import FormSystem, QuadraticForm, TransformPair, evaluate, lift_to_rational, reduce_mod_p
from .hensel import NO_SEED, SOLVED, padic_solve
from .minimize import IMPROVING, check_transform, is_Fq_minimized, minimize_heuristic
from .oneform import anisotropic_quaternary, is_isotropic_qp, primitive_zeros_mod
from .subspace import explore_beta, find_totally_singular
from .zeros import chevalley_warning_check, enumerate_common_zeros, find_nonsingular_zero


@dataclass
class EntryResult:
    id: str
    group: str
    anchor: str
    expected: str
    ok: bool
    actual: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    group: str
    anchor: str  # short description of the claim being replayed
    expected: str
    check: Callable  # (Corpus) -> (ok, actual)


class Corpus:
    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None

    def text(self, name: str) -> str:
        if self.directory is not None:
            return (self.directory / name).read_text()
        return (resources.files("quadsys") / "corpus" / name).read_text()

    def system(self, name: str) -> FormSystem:
        return parse_system(self.text(name)).system()

    def names(self) -> list[str]:
        if self.directory is not None:
            return sorted(p.name for p in self.directory.glob("*.qfs"))
        return sorted(p.name for p in (resources.files("quadsys") / "corpus").iterdir() if p.name.endswith(".qfs"))


# ---------------------------------------------------------------------------


def _bounds_small(c):
    rows = bound_table(7)
    got = [r.upper for r in rows]
    low = [r.lower for r in rows]
    return got == [4, 8, 16, 24, 40, 56, 84] and low == [4 * r for r in range(1, 8)], f"upper {got}, lower {low}"


def _bounds_closed(c):
    rows = bound_table(100)
    bad = [r.r for r in rows[7:] if r.upper != closed_form(r.r)]
    gap = {r.martin - r.upper for r in rows[5:]}
    return not bad and gap == {16}, f"mismatches at {bad[:5]}, gaps {sorted(gap)}"


def _bounds_bracket(c):
    s = bound_table(3)[2].bracket()
    return s == "12 <= beta(3;Qp) <= 16", s


def _bounds_traces(c):
    bad = [r for r in range(1, 101) if recompute(upper_bound(r)) != upper_bound(r).value]
    rules = (upper_bound(3).rule, upper_bound(5).rule, upper_bound(7).rule)
    return not bad and rules == ("chain", "chain", "ind1(1)"), f"bad traces {bad}, rules r=3,5,7: {rules}"


def _triple_singular(c):
    S = c.system("f2-triple.qfs")
    en = enumerate_common_zeros(S)
    nonsing = sum(1 for r in en.reports if not r.singular)
    nontriv = sum(1 for r in en.reports if any(r.point))
    ns = find_nonsingular_zero(S)
    ok = nontriv >= 1 and en.count % 2 == 0 and nonsing == 0 and not ns.found and ns.certified and en.exhaustive
    return ok, f"{en.count} zeros ({nontriv} nontrivial), {nonsing} nonsingular, search certified={ns.certified}"


def _triple_cw(c):
    cw = chevalley_warning_check(c.system("f2-triple.qfs"))
    return cw.congruent and cw.nontrivial, f"count {cw.count}"


def _pair_no_l4(c):
    res = find_totally_singular(c.system("f2-pair.qfs"), 4)
    return (not res.found) and res.certified, f"found={res.found}, certified={res.certified}"


def _elliptic_no_plane(c):
    res = find_totally_singular(c.system("f2-elliptic.qfs"), 2)
    return (not res.found) and res.certified, f"found={res.found}, certified={res.certified}"


def _triple_minimized(c):
    v = is_Fq_minimized(c.system("f2-triple.qfs"))
    targets = [s[2] for s in v.searches]
    ok = v.minimized is True and v.certified and targets == [11] * 7 + [9] * 7 + [7]
    return ok, f"minimized={v.minimized}, certified={v.certified}, {len(targets)} searches"


def _f3_minimized(c):
    v = is_Fq_minimized(c.system("f3-minimized.qfs"))
    return v.minimized is True and v.certified, f"minimized={v.minimized}"


def _q3_M():
    return [[Fraction(int(i == j), 3 if i == 4 else 1) for j in range(5)] for i in range(5)]


def _q3_transform(c):
    S = c.system("q3-unminimized.qfs")
    chk = check_transform(S, TransformPair.make(3, _q3_M(), [[1]]))
    ok = chk.integral and chk.classification == IMPROVING and chk.score == -2
    return ok, f"integral={chk.integral}, {chk.classification}, {chk.explain(5, 1)}"


def _q3_minimize(c):
    S = c.system("q3-unminimized.qfs")
    res = minimize_heuristic(S)
    target = parse_form("x1^2 + x2^2 + x3*x4 + x5^2", S.field, 5)
    red_orig = reduce_mod_p(S)
    ok = (
        res.converged
        and len(res.log) == 1
        and res.model.forms[0] == target
        and is_Fq_minimized(red_orig).minimized is True
        and is_Fq_minimized(reduce_mod_p(res.model)).minimized is True
    )
    return ok, f"{len(res.log)} step(s), converged={res.converged}, model {res.model.forms[0]}"


def _triple_lifted_zero_steps(c):
    res = minimize_heuristic(lift_to_rational(c.system("f2-triple.qfs")))
    return res.converged and not res.log, f"{len(res.log)} step(s), converged={res.converged}"


def _q3_solve(c):
    S = c.system("q3-unminimized.qfs")
    res = padic_solve(S, k=8)
    if res.status != SOLVED:
        return False, res.status
    x = [Fraction(v) for v in res.vector.coords]
    val = valuation(evaluate(S.forms[0], x), 3)
    seed_ok = tuple(v % 3 for v in res.model_vector.coords) == res.model_vector.seed
    return val >= 8 and seed_ok, f"Solved, residual valuation {val}, seed congruence {seed_ok}"


def _aniso_noseed(c):
    res = padic_solve(c.system("q3-anisotropic.qfs"), k=8)
    return res.status == NO_SEED and res.certified, f"{res.status}, certified={res.certified}"


def _triple_noseed(c):
    res = padic_solve(lift_to_rational(c.system("f2-triple.qfs")), k=8)
    return res.status == NO_SEED and res.certified, f"{res.status}, certified={res.certified}"


def _hyperbolic(c):
    res = padic_solve(c.system("hyperbolic.qfs"), k=10)
    return res.status == SOLVED, res.status


def _aniso(p, name, j):
    def check(c):
        q = c.system(name).forms[0]
        dec = is_isotropic_qp(q)
        z = primitive_zeros_mod(q, p, j)
        same = q == anisotropic_quaternary(p)
        return (not dec.isotropic) and z == 0 and same, f"isotropic={dec.isotropic}, primitive zeros mod {p}^{j}: {z}"

    return check


def _blocks(c):
    S = c.system("q3-blocks.qfs")
    parts = []
    for q in S.forms:
        vs = q.variables()
        parts.append(QuadraticForm(S.field, len(vs), {(vs.index(i), vs.index(j)): v for (i, j), v in q.coeffs.items()}))
    disjoint = [set(q.variables()) for q in S.forms] == [{0, 1, 2, 3}, {4, 5, 6, 7}]
    aniso = all(not is_isotropic_qp(q).isotropic and primitive_zeros_mod(q, 3, 2) == 0 for q in parts)
    return disjoint and aniso, f"n={S.n}, r={S.r}, disjoint={disjoint}, blocks anisotropic={aniso}"


def _ff_degree(c):
    # n > 2^(2+k) with k = 1: N > 4R is reachable for n = 9 and never for n = 8
    d9, d8 = first_degree_exceeding(9, 1), first_degree_exceeding(8, 1)
    return d9 is not None and d8 is None, f"n=9: d = {d9}; n=8: {d8}"


def _ff_solutions(c, name):
    f = next(iter(parse_ft_system(c.text(name)).forms.values()))
    res = reduce_ft_form(f, 1)
    en = enumerate_common_zeros(res.system, projective=True)
    return res, [solution_to_polynomials(res, z.point) for z in en.reports], en


def _ff_square(c):
    res, sols, en = _ff_solutions(c, "ff-square.qfs")
    want = ((0, 1), (1,))
    ok = res.N == 4 and res.R == 5 and want in [tuple(map(tuple, s)) for s in sols]
    return ok, f"N={res.N}, R={res.R}, solutions {sols}"


def _ff_nonsquare(c):
    res, sols, en = _ff_solutions(c, "ff-nonsquare.qfs")
    return not sols and en.exhaustive and en.points_visited == (3**4 - 1) // 2, f"{len(sols)} nontrivial solutions"


def _roundtrip(c):
    bad = []
    for name in c.names():
        text = c.text(name)
        parse = parse_ft_system if name.startswith("ff-") else parse_system
        doc = parse(text)
        s = serialize_system(doc)
        if parse(s).forms != doc.forms or serialize_system(parse(s)) != s:
            bad.append(name)
    return not bad, f"{len(c.names())} documents, failures {bad}"


def _explore(c):
    rep = explore_beta(2, FieldDesc.prime(3), 1, 20, 7, seed=c.seed)
    return rep.holds_at_n, f"empirical: {rep.successes}/20"


def _f3_sum_squares(c):
    F = FieldDesc.prime(3)
    S = FormSystem([parse_form("x1^2 + x2^2", F, 2)])
    res = find_totally_singular(S, 1)
    return (not res.found) and res.certified, f"found={res.found}"


ENTRIES = [
    CorpusEntry("bounds-small", "bounds", "upper bounds 4,8,16,24,40,56,84 for r=1..7; lower bound 4r", "exact match", _bounds_small),
    CorpusEntry("bounds-closed-form", "bounds", "2r^2-16 / 2r^2-14 for 8<=r<=100, 16 below the 2r^2(+2) estimate", "exact match", _bounds_closed),
    CorpusEntry("bounds-r3-bracket", "bounds", "bracket for three forms over Q_p", "12 <= beta(3;Qp) <= 16", _bounds_bracket),
    CorpusEntry("bounds-traces", "bounds", "derivation trees re-evaluate; r=3,5 chain, r=7 ind1(1)", "all consistent", _bounds_traces),
    CorpusEntry("zeros-triple-singular", "zeros", "F_2 triple: common zeros exist, all singular", "no nonsingular zero (certified)", _triple_singular),
    CorpusEntry("zeros-triple-cw", "zeros", "F_2 triple: zero count even, nontrivial zero", "count = 0 mod 2", _triple_cw),
    CorpusEntry("subspace-pair-l4", "subspace", "Q1+Q3, Q2+Q3 share no 4-dim totally singular space in F_2^8", "NotFound (certified)", _pair_no_l4),
    CorpusEntry("subspace-elliptic", "subspace", "x1x2+x3^2+x3x4+x4^2 over F_2 has no totally singular plane", "NotFound (certified)", _elliptic_no_plane),
    CorpusEntry("subspace-f3-sum-squares", "subspace", "x1^2+x2^2 over F_3 has only the trivial zero", "NotFound (certified)", _f3_sum_squares),
    CorpusEntry("explore-beta-f3", "subspace", "pairs over F_3 in 7 variables vanish on a line (empirical)", "20/20", _explore),
    CorpusEntry("minimized-triple", "minimize", "F_2 triple is F_2-minimized (7+7+1 searches)", "minimized (certified)", _triple_minimized),
    CorpusEntry("minimized-f3", "minimize", "x1^2+x2^2+x3x4 over F_3 in 5 variables is F_3-minimized", "minimized", _f3_minimized),
    CorpusEntry("minimize-q3-transform", "minimize", "Diag(1,1,1,1,1/3) on x1^2+x2^2+x3x4+9x5^2", "integral, improving, score -2", _q3_transform),
    CorpusEntry("minimize-q3-loop", "minimize", "heuristic minimization of the Q_3 example", "one step to x1^2+x2^2+x3x4+x5^2", _q3_minimize),
    CorpusEntry("minimize-triple-lifted", "minimize", "integer lift of the F_2 triple over Q_2", "zero steps", _triple_lifted_zero_steps),
    CorpusEntry("hensel-q3-solve", "hensel", "nonsingular zero of the Q_3 example lifted to precision 8", "Solved, residual >= 8", _q3_solve),
    CorpusEntry("hensel-anisotropic", "hensel", "anisotropic quaternary at p=3 has no nonsingular seed", "NoNonsingularSeed (certified)", _aniso_noseed),
    CorpusEntry("hensel-triple", "hensel", "lifted F_2 triple: no admissible seed for lifting", "NoNonsingularSeed (certified)", _triple_noseed),
    CorpusEntry("hensel-hyperbolic", "hensel", "unit hyperbolic plane gives a nonsingular zero", "Solved", _hyperbolic),
    CorpusEntry("isotropy-p2", "isotropy", "designated anisotropic quaternary at p=2", "anisotropic, no zero mod 2^4", _aniso(2, "q2-anisotropic.qfs", 4)),
    CorpusEntry("isotropy-p3", "isotropy", "x1^2-kx2^2+p(x3^2-kx4^2) at p=3", "anisotropic, no zero mod 9", _aniso(3, "q3-anisotropic.qfs", 2)),
    CorpusEntry("isotropy-p5", "isotropy", "x1^2-kx2^2+p(x3^2-kx4^2) at p=5", "anisotropic, no zero mod 25", _aniso(5, "q5-anisotropic.qfs", 2)),
    CorpusEntry("isotropy-p7", "isotropy", "x1^2-kx2^2+p(x3^2-kx4^2) at p=7", "anisotropic, no zero mod 49", _aniso(7, "q7-anisotropic.qfs", 2)),
    CorpusEntry("isotropy-blocks", "isotropy", "two disjoint quaternary blocks at p=3 (lower bound 4r)", "each block anisotropic", _blocks),
    CorpusEntry("ffred-degree", "ffred", "D=1: N > 4R reachable iff n > 8", "n=9 reachable, n=8 never", _ff_degree),
    CorpusEntry("ffred-square", "ffred", "x1^2 - T^2 x2^2 over F_3(T) at d=1", "solution (T, 1)", _ff_square),
    CorpusEntry("ffred-nonsquare", "ffred", "x1^2 - T x2^2 over F_3(T) at d=1", "trivial zero only", _ff_nonsquare),
    CorpusEntry("parser-roundtrip", "parser", "serialize(parse(doc)) is stable on the corpus", "identity", _roundtrip),
]


def run_corpus(filter_: str | None = None, seed: int = 0, corpus_dir=None) -> list[EntryResult]:
    corpus = Corpus(corpus_dir)
    corpus.seed = seed
    out = []
    for e in ENTRIES:
        if filter_ and filter_ not in e.id and filter_ != e.group:
            continue
        try:
            ok, actual = e.check(corpus)
        except Exception as exc:  # failures are data here
            ok, actual = False, f"{type(exc).__name__}: {exc}"
        out.append(EntryResult(e.id, e.group, e.anchor, e.expected, bool(ok), actual))
    return out
