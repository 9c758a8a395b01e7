"""Totally singular subspaces: linear spaces on which every form vanishes identically.

The search grows a basis one vector at a time.  If the forms vanish on the
span of e_1..e_k, a new vector e keeps that property exactly when
``b_i(e_j, e) = 0`` for all forms i and basis vectors j (linear conditions)
and ``q_i(e) = 0`` (quadratic conditions).  Bases are built as reduced row
echelon forms with increasing pivots, so every subspace is visited at most
once and no seen-set is needed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import BudgetExhausted, DimensionMismatch, FieldMismatch
from .fields import PRIME, FieldDesc, dot, kernel_basis, rref
from .forms import FormSystem, QuadraticForm, Subspace, _combine, evaluate, polar_vector, random_system, restrict

DEFAULT_BUDGET = 5_000_000

__all__ = [
    "Subspace",
    "SearchResult",
    "vanishes_on",
    "extend_basis_step",
    "find_totally_singular",
    "all_totally_singular",
    "max_totally_singular_dim",
    "explore_beta",
    "enumerate_echelon_subspaces",
]


def vanishes_on(S: FormSystem, V: Subspace) -> bool:
    """True iff every form restricted to V is the zero polynomial."""
    if V.n != S.n:
        raise DimensionMismatch(f"subspace lives in dimension {V.n}, system in {S.n}")
    if V.dim == 0:
        return True
    return restrict(S, V).is_zero()


def _reduced_against(F: FieldDesc, V: Subspace) -> list[list]:
    """Rows forcing zeros at V's pivot columns."""
    rows = []
    for c in V.pivots:
        row = [F.zero] * V.n
        row[c] = F.one
        rows.append(row)
    return rows


def extend_basis_step(S: FormSystem, V: Subspace) -> list[tuple]:
    """All normalized e outside V with ``V + span(e)`` totally singular.

    Each returned e has zeros at V's pivot columns and leading coefficient 1,
    so distinct vectors give distinct extensions.
    """
    F = S.field
    if not vanishes_on(S, V):
        raise ValueError("the forms do not vanish on V")
    conds = [polar_vector(q, list(v)) for q in S.forms for v in V.basis]
    conds += _reduced_against(F, V)
    A = kernel_basis(F, conds, S.n) if conds else [[F.one if i == j else F.zero for j in range(S.n)] for i in range(S.n)]
    A, _ = rref(F, A, S.n)
    out = []
    for e in _normalized_vectors(F, A):
        if all(evaluate(q, e) == 0 for q in S.forms):
            out.append(tuple(e))
    return out


def _normalized_vectors(F: FieldDesc, A: list[list]):
    """Vectors of span(A) (A in RREF) with leading coefficient 1, leading column ascending."""
    s = len(A)
    for k in range(s):
        for lam in itertools.product(range(F.order), repeat=s - k - 1):
            e = list(A[k])
            for c, a in zip(lam, A[k + 1 :]):
                if c:
                    e = [F.add(x, F.mul(c, y)) for x, y in zip(e, a)]
            yield e


# ---------------------------------------------------------------------------


@dataclass
class SearchResult:
    subspace: Subspace | None
    certified: bool  # meaningful when subspace is None: the whole tree was exhausted
    nodes: int = 0
    target: int = 0
    active_vars: int = 0

    @property
    def found(self) -> bool:
        return self.subspace is not None


class _Budget:
    __slots__ = ("left", "used")

    def __init__(self, n):
        self.left = n
        self.used = 0

    def tick(self, k=1):
        self.left -= k
        self.used += k
        return self.left >= 0


def _generic_search(S: FormSystem, d: int, budget: _Budget, collect: list | None = None):
    F = S.field
    n = S.n
    forms = S.forms

    def rec(rows, A):
        if len(rows) == d:
            if collect is not None:
                collect.append(rows)
                return None
            return rows
        if len(A) < d - len(rows):
            return None
        s = len(A)
        pivots_A = [next(j for j, v in enumerate(a) if v != 0) for a in A]
        for k in range(s):
            c = pivots_A[k]
            if any(r[c] != 0 for r in rows):
                continue
            if s - k < d - len(rows):
                break
            tail = A[k + 1 :]
            for lam in itertools.product(range(F.order), repeat=s - k - 1):
                if not budget.tick():
                    raise _OutOfBudget
                e = list(A[k])
                for cc, a in zip(lam, tail):
                    if cc:
                        e = [F.add(x, F.mul(cc, y)) for x, y in zip(e, a)]
                if any(evaluate(q, e) != 0 for q in forms):
                    continue
                # admissible space for later rows: span(A[k+1:]) ∩ e^⊥
                pol = [polar_vector(q, e) for q in forms]
                M = [[dot(F, p, a) for a in tail] for p in pol]
                mus = kernel_basis(F, M, len(tail)) if tail else []
                newA = [_combine(F, mu, tail, n) for mu in mus]
                newA, _ = rref(F, newA, n) if newA else ([], [])
                got = rec(rows + [e], newA)
                if got is not None:
                    return got
        return None

    A0 = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    return rec([], A0)


class _OutOfBudget(Exception):
    pass


# -- bit-packed F_2 path ----------------------------------------------------


def _f2_data(S: FormSystem):
    """Per form: (row masks for q, column masks of the polar matrix); bit n-1-j <-> x_{j+1}."""
    n = S.n
    data = []
    for q in S.forms:
        U = [0] * n
        G = [0] * n
        for (i, j), c in q.coeffs.items():
            if not c:
                continue
            U[i] |= 1 << (n - 1 - j)
            if i != j:
                G[i] |= 1 << (n - 1 - j)
                G[j] |= 1 << (n - 1 - i)
        data.append((U, G))
    return data


def _f2_q(U, x, n):
    s = 0
    for i in range(n):
        if (x >> (n - 1 - i)) & 1:
            s ^= (x & U[i]).bit_count() & 1
    return s


def _f2_polar(G, x, n):
    out = 0
    for i in range(n):
        if (x >> (n - 1 - i)) & 1:
            out ^= G[i]
    return out


def _f2_rref(vecs):
    """XOR basis in reduced echelon form, sorted by descending leading bit."""
    basis = []
    for v in vecs:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            # reduce existing rows by v, then insert
            basis = [b ^ v if b ^ v < b else b for b in basis]
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def _f2_search(S: FormSystem, d: int, budget: _Budget, collect: list | None = None):
    n = S.n
    data = _f2_data(S)

    def rec(rows, A):
        if len(rows) == d:
            if collect is not None:
                collect.append(rows)
                return None
            return rows
        if len(A) < d - len(rows):
            return None
        s = len(A)
        for k in range(s):
            if s - k < d - len(rows):
                break
            lead = A[k].bit_length() - 1
            if any((r >> lead) & 1 for r in rows):
                continue
            tail = A[k + 1 :]
            m = len(tail)
            e = A[k]
            # Gray-code walk over e = A[k] + span(tail)
            for t in range(1 << m):
                if t:
                    e ^= tail[(t & -t).bit_length() - 1]
                if not budget.tick():
                    raise _OutOfBudget
                if any(_f2_q(U, e, n) for U, _ in data):
                    continue
                pols = [_f2_polar(G, e, n) for _, G in data]
                # kernel of the map mu -> (parity(pol & tail_l))_pol over span(tail)
                newA = _f2_orth(tail, pols)
                got = rec(rows + [e], newA)
                if got is not None:
                    return got
        return None

    return rec([], [1 << (n - 1 - j) for j in range(n)])


def _f2_orth(tail, pols):
    """Vectors of span(tail) orthogonal (parity) to every mask in pols, as an RREF basis."""
    vecs = list(tail)
    for p in pols:
        odd = [v for v in vecs if (v & p).bit_count() & 1]
        if not odd:
            continue
        pivot = odd[0]
        vecs = [v ^ pivot if (v & p).bit_count() & 1 else v for v in vecs if v is not pivot]
        vecs = [v for v in vecs if v]
    return _f2_rref(vecs)


def _unpack(x: int, n: int) -> list[int]:
    return [(x >> (n - 1 - j)) & 1 for j in range(n)]


# ---------------------------------------------------------------------------


def _active_system(S: FormSystem) -> tuple[FormSystem, list[int]]:
    active = S.variables()
    pos = {v: k for k, v in enumerate(active)}
    forms = [
        QuadraticForm(S.field, len(active), {(pos[i], pos[j]): c for (i, j), c in q.coeffs.items()}) for q in S.forms
    ]
    return FormSystem(forms), active


def find_totally_singular(
    S: FormSystem, d: int, budget: int = DEFAULT_BUDGET, packed: bool | None = None
) -> SearchResult:
    """Find a d-dimensional subspace on which every form of S vanishes.

    Variables absent from every form are factored out first: with n' active
    variables the search runs in F^{n'} for dimension d - (n - n').  A None
    subspace with ``certified=True`` proves that no such subspace exists.
    """
    F = S.field
    if not (F.is_finite and F.is_field):
        raise FieldMismatch("subspace search needs a finite field")
    n = S.n
    if d <= 0:
        return SearchResult(Subspace.zero(F, n), True, 0, d, 0)
    if d > n:
        return SearchResult(None, True, 0, d, 0)
    T, active = _active_system(S)
    inactive = [j for j in range(n) if j not in set(active)]
    free = len(inactive)

    def unit(j):
        return [F.one if i == j else F.zero for i in range(n)]

    if d <= free:
        return SearchResult(Subspace.span(F, n, [unit(j) for j in inactive[:d]]), True, 0, d, len(active))
    d2 = d - free
    if d2 > len(active):
        return SearchResult(None, True, 0, d, len(active))
    use_packed = packed if packed is not None else (F.kind == PRIME and F.p == 2)
    b = _Budget(budget)
    try:
        if use_packed and F.kind == PRIME and F.p == 2:
            rows = _f2_search(T, d2, b)
            rows = None if rows is None else [_unpack(x, T.n) for x in rows]
        else:
            rows = _generic_search(T, d2, b)
    except _OutOfBudget:
        return SearchResult(None, False, b.used, d, len(active))
    if rows is None:
        return SearchResult(None, True, b.used, d, len(active))
    vecs = []
    for r in rows:
        v = [F.zero] * n
        for k, j in enumerate(active):
            v[j] = r[k]
        vecs.append(v)
    vecs += [unit(j) for j in inactive]
    V = Subspace.span(F, n, vecs)
    assert V.dim == d and vanishes_on(S, V)
    return SearchResult(V, True, b.used, d, len(active))


def max_totally_singular_dim(S: FormSystem, budget: int = DEFAULT_BUDGET) -> int:
    """Largest d with a totally singular d-space (raises if a search runs out of budget)."""
    best = 0
    for d in range(1, S.n + 1):
        res = find_totally_singular(S, d, budget)
        if res.found:
            best = d
            continue
        if not res.certified:
            raise BudgetExhausted(f"search for dimension {d} ran out of budget")
        break
    return best


def all_totally_singular(S: FormSystem, d: int, budget: int = DEFAULT_BUDGET, packed: bool | None = None) -> list:
    """Every d-dimensional totally singular subspace, one search-tree leaf each (no factoring)."""
    F = S.field
    if not (F.is_finite and F.is_field):
        raise FieldMismatch("subspace search needs a finite field")
    if d <= 0:
        return [Subspace.zero(F, S.n)]
    use_packed = packed if packed is not None else (F.kind == PRIME and F.p == 2)
    leaves: list = []
    b = _Budget(budget)
    try:
        if use_packed and F.kind == PRIME and F.p == 2:
            _f2_search(S, d, b, leaves)
            leaves = [[_unpack(x, S.n) for x in rows] for rows in leaves]
        else:
            _generic_search(S, d, b, leaves)
    except _OutOfBudget:
        raise BudgetExhausted(f"enumeration exceeded {budget} nodes") from None
    return [Subspace(F, S.n, tuple(tuple(r) for r in rows)) for rows in leaves]


def enumerate_echelon_subspaces(F: FieldDesc, n: int, d: int):
    """Every d-dimensional subspace of F^n, via its reduced echelon basis (brute force)."""
    for pivots in itertools.combinations(range(n), d):
        free_slots = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivots]
        for vals in itertools.product(range(F.order), repeat=len(free_slots)):
            rows = [[F.zero] * n for _ in range(d)]
            for r, p in enumerate(pivots):
                rows[r][p] = F.one
            for (r, c), v in zip(free_slots, vals):
                rows[r][c] = v
            yield Subspace(F, n, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------


@dataclass
class BetaExploration:
    """Empirical record for beta(r; F_q, m) at n and n - 1 variables.

    ``holds_at_n`` only says every sampled system had a totally singular
    (m+1)-space; it is an observation, not a theorem.
    """

    r: int
    field: FieldDesc
    m: int
    n: int
    trials: int
    successes: int
    unknown: int
    failures: list = field(default_factory=list)
    witnesses_below: list = field(default_factory=list)  # certified systems at n - 1
    seed: int = 0

    @property
    def holds_at_n(self) -> bool:
        return self.successes == self.trials


def explore_beta(
    r: int,
    field: FieldDesc,
    m: int,
    trials: int,
    n: int,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    probe_below: bool = False,
) -> BetaExploration:
    """Random r-form systems in n variables: does each vanish on some (m+1)-space?"""
    rng = random.Random(seed)
    rep = BetaExploration(r, field, m, n, trials, 0, 0, seed=seed)
    for _ in range(trials):
        S = random_system(field, n, r, rng)
        res = find_totally_singular(S, m + 1, budget)
        if res.found:
            rep.successes += 1
        elif res.certified:
            rep.failures.append(S)
        else:
            rep.unknown += 1
        if probe_below and n > 1:
            S1 = random_system(field, n - 1, r, rng)
            res1 = find_totally_singular(S1, m + 1, budget)
            if not res1.found and res1.certified:
                rep.witnesses_below.append(S1)
    return rep


def is_beta_witness(S: FormSystem, m: int, budget: int = DEFAULT_BUDGET) -> bool | None:
    """True if S provably has no totally singular space of projective dimension m (None: unknown)."""
    res = find_totally_singular(S, m + 1, budget)
    if res.found:
        return False
    return True if res.certified else None
