"""Integral models, the F_q-minimized test, and improving transform pairs.

A transform pair (M, P) sends a system q to P·(q∘M).  With vM, vP the
p-adic valuations of det M and det P, a pair producing another integral
system removes factors of p when ``n·vP + 2r·vM < 0``; a model admits no
such pair exactly when it is minimized.  All comparisons are exact
integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import DegenerateSystem, FieldMismatch, PreconditionViolated, SingularTransform, WitnessInvalid
from .fields import PADIC, FieldDesc, kernel_basis, valuation
from .forms import (
    FormSystem,
    Subspace,
    TransformPair,
    _gram_rows,
    evaluate,
    is_integral,
    linear_combination,
    reduce_mod_p,
)
from .subspace import DEFAULT_BUDGET, enumerate_echelon_subspaces, find_totally_singular, vanishes_on

IMPROVING, NEUTRAL, COMPLIANT = "improving", "neutral", "compliant"
MAX_SPAN_SUBSPACES = 10**4


def gaussian_binomial(r: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (r - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass
class MinimizeVerdict:
    """Outcome of the F_q-minimized test.

    ``minimized`` is True, False, or None (a search ran out of budget).  When
    False, ``span_basis`` holds k coefficient rows spanning the offending
    forms and ``V`` the (n-2k)-dimensional space on which they vanish.
    """

    minimized: bool | None
    k: int | None = None
    span_basis: tuple = ()
    V: Subspace | None = None
    transform: TransformPair | None = None
    searches: list = field(default_factory=list)  # (k, span rows, target, certified, nodes)

    @property
    def certified(self) -> bool:
        return self.minimized is not None and all(s[3] for s in self.searches)


def combination_forms(S: FormSystem, rows) -> FormSystem:
    return FormSystem(linear_combination(S, a) for a in rows)


def is_Fq_minimized(S: FormSystem, budget: int = DEFAULT_BUDGET, max_r: int = 4) -> MinimizeVerdict:
    """No k forms of the span vanish on an (n-2k)-dimensional subspace, for every k <= r."""
    F = S.field
    if not (F.is_finite and F.is_field):
        raise FieldMismatch("is_Fq_minimized needs a system over a finite field")
    r, n = S.r, S.n
    if r > max_r:
        raise PreconditionViolated(f"r = {r} exceeds the supported {max_r}")
    total = sum(gaussian_binomial(r, k, F.order) for k in range(1, r + 1))
    if total > MAX_SPAN_SUBSPACES:
        raise PreconditionViolated(f"{total} span subspaces exceed the cap {MAX_SPAN_SUBSPACES}")
    verdict = MinimizeVerdict(True)
    for k in range(1, r + 1):
        target = max(0, n - 2 * k)
        for W in enumerate_echelon_subspaces(F, r, k):
            T = combination_forms(S, W.basis)
            res = find_totally_singular(T, target, budget)
            verdict.searches.append((k, W.basis, target, res.certified, res.nodes))
            if res.found:
                return MinimizeVerdict(False, k, W.basis, res.subspace, None, verdict.searches)
            if not res.certified:
                verdict.minimized = None
    return verdict


# ---------------------------------------------------------------------------
# transform pairs over Q_p


def classify(n: int, r: int, vM: int, vP: int) -> tuple[str, int]:
    """Sign of n·vP + 2r·vM: negative improves, zero is neutral, positive complies."""
    s = n * vP + 2 * r * vM
    return (IMPROVING if s < 0 else NEUTRAL if s == 0 else COMPLIANT), s


@dataclass(frozen=True)
class TransformCheck:
    integral: bool
    classification: str
    score: int  # n·vP + 2r·vM
    vM: int
    vP: int
    transformed: FormSystem

    def explain(self, n: int, r: int) -> str:
        rel = "<" if self.score < 0 else "=" if self.score == 0 else ">"
        return f"{n}*{self.vP} + {2 * r}*{self.vM} = {self.score} {rel} 0"


def check_transform(S: FormSystem, T: TransformPair) -> TransformCheck:
    """Apply (M, P) exactly and classify it by the determinant valuations."""
    if S.field.kind != PADIC:
        raise FieldMismatch("check_transform works over Q_p")
    vM, vP = T.recompute_valuations()
    if (vM, vP) != (T.vM, T.vP):
        raise SingularTransform("stored valuations do not match the matrices")
    out = T.apply(S)
    cls, score = classify(S.n, S.r, vM, vP)
    return TransformCheck(is_integral(out, S.field.p), cls, score, vM, vP, out)


def _eye(k: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]


def _completion_columns(n: int, rows) -> list[list[int]]:
    """Unit vectors off the pivots of an echelon basis: together they span Z^n unimodularly."""
    pivots = {next(j for j, v in enumerate(r) if v) for r in rows}
    return [[int(i == j) for i in range(n)] for j in range(n) if j not in pivots]


def witness_to_transform(S: FormSystem, verdict: MinimizeVerdict) -> TransformPair:
    """The pair scaling 2k complementary variables by p and dividing k forms by p."""
    if verdict.minimized is not False:
        raise WitnessInvalid("verdict carries no witness")
    F = S.field
    if F.kind != PADIC:
        raise FieldMismatch("witness transforms act on Q_p systems")
    p, n, r, k = F.p, S.n, S.r, verdict.k
    V, A = verdict.V, verdict.span_basis
    if V is None or V.dim != n - 2 * k:
        raise WitnessInvalid("witness subspace has the wrong dimension")
    red = reduce_mod_p(S)
    if not vanishes_on(combination_forms(red, A), V):
        raise WitnessInvalid("witness forms do not vanish on V mod p")
    lifts = [[int(v) for v in b] for b in V.basis]
    cols = _completion_columns(n, lifts) + lifts  # columns of U
    M = [[Fraction(cols[c][i]) * (p if c < 2 * k else 1) for c in range(n)] for i in range(n)]
    Arows = [[int(a) for a in row] for row in A]
    Prows = Arows + [list(e) for e in _completion_columns(r, Arows)]
    P = [[Fraction(v, p) if i < k else Fraction(v) for v in row] for i, row in enumerate(Prows)]
    T = TransformPair.make(p, M, P)
    chk = check_transform(S, T)
    if not chk.integral:
        raise WitnessInvalid("witness transform does not give an integral system")
    return T


# ---------------------------------------------------------------------------


def _exact_radical_member(S: FormSystem, v) -> bool:
    return all(
        evaluate(q, v) == 0 and all(sum(g * x for g, x in zip(row, v)) == 0 for row in _gram_rows(q)) for q in S.forms
    )


def radical_scaling(S: FormSystem) -> TransformPair | None:
    """A pair M = U·Diag(1,...,1,1/p), P = I producing an integral system, if one exists.

    Needs v with G_i v ≡ 0 (mod p) and q_i(v) ≡ 0 (mod p²) for every form; q_i(v)
    mod p² depends only on v mod p, so residues in [0, p) suffice.  Directions in
    the exact common radical over Q are skipped: scaling along them never ends.
    """
    F = S.field
    p, n = F.p, S.n
    Fp = FieldDesc.prime(p)
    rows = [[Fp.embed(g) for g in row] for q in S.forms for row in _gram_rows(q)]
    K = kernel_basis(Fp, rows, n)
    if not K:
        return None
    for coeffs in _projective_points(p, len(K)):
        v = [0] * n
        for c, b in zip(coeffs, K):
            v = [(x + c * y) % p for x, y in zip(v, b)]
        if _exact_radical_member(S, v):
            continue
        if any(valuation(evaluate(q, v), p) < 2 for q in S.forms):
            continue
        j = next(i for i, x in enumerate(v) if x)
        inv = pow(v[j], -1, p)
        v = [(x * inv) % p for x in v]
        cols = [[int(i == c) for i in range(n)] for c in range(n)]
        cols[j] = v
        cols[j], cols[-1] = cols[-1], cols[j]
        M = [[Fraction(cols[c][i]) / (p if c == n - 1 else 1) for c in range(n)] for i in range(n)]
        return TransformPair.make(p, M, _eye(S.r))
    return None


def _projective_points(p: int, dim: int):
    for lead in range(dim):
        for rest in product(range(p), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + rest


def primitive_model(S: FormSystem) -> tuple[FormSystem, TransformPair]:
    """Scale each form by a power of p so its coefficients are integral with minimum valuation 0."""
    F = S.field
    p = F.p
    scales = []
    for q in S.forms:
        if q.is_zero():
            raise DegenerateSystem("a form is identically zero")
        m = min(valuation(c, p) for c in q.coeffs.values())
        scales.append(Fraction(p) ** (-m))
    P = [[scales[i] if i == j else Fraction(0) for j in range(S.r)] for i in range(S.r)]
    T = TransformPair.make(p, _eye(S.n), P)
    return T.apply(S), T


@dataclass
class MinimizationResult:
    model: FormSystem
    log: list  # improving TransformPairs applied by the loop, in order
    converged: bool
    normalization: TransformPair
    total: TransformPair  # composite of the normalization and every logged step
    reason: str = ""
    verdict: MinimizeVerdict | None = None


def minimize_heuristic(S: FormSystem, p: int | None = None, max_iter: int = 64, budget: int = DEFAULT_BUDGET):
    """Remove excess factors of p with improving transform pairs until none applies.

    Each round reduces mod p.  If the reduction is not F_q-minimized and the
    witness transform improves (n > 4r), it is applied; otherwise a radical
    scaling step is tried.  The loop stops when neither applies
    (converged), when a search runs out of budget, or after ``max_iter`` rounds.
    """
    F = S.field
    if F.kind != PADIC:
        raise FieldMismatch("minimize_heuristic works over Q_p")
    if p is not None and p != F.p:
        raise FieldMismatch(f"system is over Q_{F.p}, not Q_{p}")
    if S.is_zero() or any(q.is_zero() for q in S.forms):
        raise DegenerateSystem("a form is identically zero")
    model, norm = primitive_model(S)
    total = norm
    log: list[TransformPair] = []
    verdict = None
    for _ in range(max_iter):
        verdict = is_Fq_minimized(reduce_mod_p(model), budget)
        if verdict.minimized is None:
            return MinimizationResult(model, log, False, norm, total, "subspace search ran out of budget", verdict)
        T = None
        if verdict.minimized is False and S.n > 4 * S.r:
            T = witness_to_transform(model, verdict)
        if T is None:
            T = radical_scaling(model)
        if T is None:
            return MinimizationResult(model, log, True, norm, total, "no improving transform found", verdict)
        chk = check_transform(model, T)
        assert chk.integral and chk.classification == IMPROVING, chk
        model = chk.transformed
        log.append(T)
        total = total.then(T)
    return MinimizationResult(model, log, False, norm, total, f"stopped after {max_iter} rounds", verdict)
