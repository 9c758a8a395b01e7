"""Common zeros of form systems over finite fields and Z/p^k.

Exhaustive enumeration is vectorized with numpy: points are generated in
chunks of consecutive lexicographic indices (x1 most significant) and every
form is evaluated on a whole chunk at once.  Over F_2 the points are kept
bit-packed in int64 words and forms are evaluated with popcount parities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FieldMismatch, PreconditionViolated, TooLarge
from .fields import PRIME, FieldDesc, determinant, rank as matrix_rank, rref
from .forms import FormSystem, QuadraticForm, evaluate, polar_vector, radical_and_rank, reduce_effective_variables

EXHAUSTIVE_CAP = 10**8
CHUNK = 1 << 16


@dataclass(frozen=True)
class ZeroReport:
    point: tuple
    jacobian_rank: int
    singular: bool
    values: tuple

    def as_dict(self) -> dict:
        return {
            "point": [int(v) for v in self.point],
            "jacobian_rank": self.jacobian_rank,
            "singular": self.singular,
        }


@dataclass
class Enumeration:
    """Outcome of :func:`enumerate_common_zeros`."""

    count: int
    reports: list = field(default_factory=list)
    exhaustive: bool = True
    projective: bool = False
    points_visited: int = 0
    seed: int | None = None
    truncated: bool = False  # stopped early because of ``limit``


def jacobian_at(S: FormSystem, x) -> list[list]:
    """r×n matrix of formal partial derivatives at x (row i is the gradient of q_i)."""
    if len(x) != S.n:
        raise FieldMismatch(f"point has length {len(x)}, system has {S.n} variables")
    return [polar_vector(q, list(x)) for q in S.forms]


def jacobian_rank(S: FormSystem, x) -> int:
    return matrix_rank(S.field, jacobian_at(S, x), S.n)


def zero_report(S: FormSystem, x) -> ZeroReport:
    x = tuple(int(v) for v in x)
    vals = S.evaluate(x)
    if any(v != 0 for v in vals):
        raise AssertionError(f"{x} is not a common zero")
    rk = jacobian_rank(S, x)
    return ZeroReport(x, rk, rk < S.r, vals)


# ---------------------------------------------------------------------------
# vectorized evaluation


def _digits(F: FieldDesc, n: int, idx: np.ndarray) -> list[np.ndarray]:
    q = F.order
    cols = []
    for j in range(n):
        cols.append((idx // q ** (n - 1 - j)) % q)
    return cols


def _eval_columns(q: QuadraticForm, cols: list[np.ndarray]) -> np.ndarray:
    F = q.field
    out = np.zeros_like(cols[0])
    for (i, j), c in q.coeffs.items():
        prod = F.np_mul(cols[i], cols[j])
        out = F.np_add(out, F.np_mul_const(c, prod))
    return out


def _f2_masks(q: QuadraticForm, n: int) -> list[int]:
    """Row masks U_i with q(x) = sum_i x_i * parity(x & U_i) over F_2 (bit n-1-j <-> x_{j+1})."""
    masks = [0] * n
    for (i, j), c in q.coeffs.items():
        if c:
            masks[i] |= 1 << (n - 1 - j)
    return masks


def eval_f2_packed(q: QuadraticForm, X: np.ndarray) -> np.ndarray:
    """Evaluate an F_2 form on bit-packed points (int64 array)."""
    n = q.n
    out = np.zeros_like(X)
    for i, U in enumerate(_f2_masks(q, n)):
        if U:
            xi = (X >> (n - 1 - i)) & 1
            out ^= xi & (np.bitwise_count(X & U).astype(X.dtype) & 1)
    return out


def unpack_f2(x: int, n: int) -> tuple:
    return tuple((x >> (n - 1 - j)) & 1 for j in range(n))


def pack_f2(v) -> int:
    out = 0
    for b in v:
        out = (out << 1) | (int(b) & 1)
    return out


def _use_packed(F: FieldDesc, n: int) -> bool:
    return F.kind == PRIME and F.p == 2 and n <= 62


def _chunk_values(S: FormSystem, idx: np.ndarray):
    """(list of value arrays, coordinate columns or None) for point indices idx."""
    if _use_packed(S.field, S.n):
        return [eval_f2_packed(q, idx) for q in S.forms], None
    cols = _digits(S.field, S.n, idx)
    return [_eval_columns(q, cols) for q in S.forms], cols


def _projective_blocks(q: int, n: int):
    """(lead position, count of points) for representatives with first nonzero coordinate 1."""
    for lead in range(n):
        yield lead, q ** (n - 1 - lead)


def _index_ranges(F: FieldDesc, n: int, projective: bool):
    """Yield arrays of lexicographic point indices, chunked."""
    q = F.order
    if not projective:
        total = q**n
        for start in range(0, total, CHUNK):
            yield np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        return
    for lead, count in _projective_blocks(q, n):
        base = q ** (n - 1 - lead)  # index of e_lead
        for start in range(0, count, CHUNK):
            yield base + np.arange(start, min(start + CHUNK, count), dtype=np.int64)


def _point_from_index(F: FieldDesc, n: int, i: int) -> tuple:
    q = F.order
    return tuple((i // q ** (n - 1 - j)) % q for j in range(n))


def _check_enumerable(S: FormSystem, cap: int):
    F = S.field
    if not F.is_finite:
        raise FieldMismatch("enumeration needs a finite coefficient ring")
    if not F.supports_numpy():
        raise TooLarge(f"{F} is too large for vectorized enumeration")
    if F.order**S.n > cap:
        raise TooLarge(f"{F.order}^{S.n} points exceed the exhaustive cap {cap}")


def enumerate_common_zeros(
    S: FormSystem,
    count_only: bool = False,
    nonsingular_only: bool = False,
    limit: int | None = None,
    projective: bool = False,
    cap: int = EXHAUSTIVE_CAP,
    samples: int | None = None,
    seed: int = 0,
) -> Enumeration:
    """Enumerate (or count) common zeros of S.

    Exhaustive when ``q^n <= cap``; otherwise, if ``samples`` is given, tests
    that many seeded random points (the result is flagged non-exhaustive).
    In projective mode only representatives with first nonzero coordinate 1
    are visited, so the zero vector is excluded.
    """
    F = S.field
    if samples is not None and F.order**S.n > cap:
        return _sample_zeros(S, samples, seed, nonsingular_only, limit)
    _check_enumerable(S, cap)
    result = Enumeration(0, projective=projective)
    need_reports = not count_only or nonsingular_only
    for idx in _index_ranges(F, S.n, projective):
        vals, _ = _chunk_values(S, idx)
        mask = np.ones(len(idx), dtype=bool)
        for v in vals:
            mask &= v == 0
        result.points_visited += len(idx)
        hits = idx[mask]
        if not need_reports:
            result.count += len(hits)
            continue
        for i in hits.tolist():
            x = unpack_f2(i, S.n) if _use_packed(F, S.n) else _point_from_index(F, S.n, i)
            rep = zero_report(S, x)
            if nonsingular_only and rep.singular:
                continue
            result.count += 1
            if not count_only:
                result.reports.append(rep)
            if limit is not None and result.count >= limit:
                result.truncated = True
                return result
    return result


def _sample_zeros(S, samples, seed, nonsingular_only, limit) -> Enumeration:
    F = S.field
    rng = np.random.default_rng(seed)
    result = Enumeration(0, exhaustive=False, seed=seed)
    pts = rng.integers(0, F.order, size=(samples, S.n), dtype=np.int64)
    cols = [pts[:, j] for j in range(S.n)]
    mask = np.ones(samples, dtype=bool)
    for q in S.forms:
        mask &= _eval_columns(q, cols) == 0
    result.points_visited = samples
    for row in pts[mask]:
        rep = zero_report(S, row.tolist())
        if nonsingular_only and rep.singular:
            continue
        result.count += 1
        result.reports.append(rep)
        if limit is not None and result.count >= limit:
            result.truncated = True
            break
    return result


def count_common_zeros(S: FormSystem, cap: int = EXHAUSTIVE_CAP) -> int:
    return enumerate_common_zeros(S, count_only=True, cap=cap).count


# ---------------------------------------------------------------------------
# nonsingular zeros


@dataclass(frozen=True)
class NonsingularSearch:
    report: ZeroReport | None
    certified: bool  # True when the search was exhaustive
    points_visited: int
    seed: int | None = None

    @property
    def found(self) -> bool:
        return self.report is not None


def find_nonsingular_zero(
    S: FormSystem, cap: int = EXHAUSTIVE_CAP, samples: int = 200_000, seed: int = 0, require_certificate: bool = False
) -> NonsingularSearch:
    """First nonsingular common zero in lexicographic projective order.

    When nothing is found the result is a certificate of absence if the
    search was exhaustive; beyond ``cap`` a seeded sample is used and the
    outcome is flagged uncertified (``require_certificate`` turns that into
    a TooLarge error).
    """
    F = S.field
    if F.order**S.n > cap:
        if require_certificate:
            raise TooLarge(f"{F.order}^{S.n} points exceed the exhaustive cap {cap}")
        res = _sample_zeros(S, samples, seed, True, 1)
        return NonsingularSearch(res.reports[0] if res.reports else None, False, res.points_visited, seed)
    res = enumerate_common_zeros(S, nonsingular_only=True, limit=1, projective=True, cap=cap)
    rep = res.reports[0] if res.reports else None
    return NonsingularSearch(rep, rep is None, res.points_visited)


# ---------------------------------------------------------------------------
# Chevalley-Warning


@dataclass(frozen=True)
class ChevalleyWarning:
    count: int
    congruent: bool
    nontrivial: bool


def chevalley_warning_check(S: FormSystem, cap: int = EXHAUSTIVE_CAP) -> ChevalleyWarning:
    """Total zero count and its divisibility by p (requires n > 2r over F_p)."""
    F = S.field
    if F.kind != PRIME:
        raise FieldMismatch("Chevalley-Warning check is implemented over prime fields")
    if S.n <= 2 * S.r:
        raise PreconditionViolated(f"n = {S.n} <= 2r = {2 * S.r}: check not applicable")
    count = count_common_zeros(S, cap)
    return ChevalleyWarning(count, count % F.p == 0, count > 1)


# ---------------------------------------------------------------------------
# exact counts from the classification of a single form


@dataclass(frozen=True)
class FormClass:
    """Isometry data of a form over F_q determining its zero count."""

    n: int
    rank: int
    radical_dim: int
    kind: str  # "zero", "odd", "hyperbolic" or "elliptic"

    @property
    def sign(self) -> int:
        return {"hyperbolic": 1, "elliptic": -1}.get(self.kind, 0)


def _arf_invariant(q: QuadraticForm):
    """Arf invariant of a nondegenerate even-dimensional form in characteristic 2."""
    F = q.field
    n = q.n
    G = q.gram
    B = lambda u, v: sum_f(F, (F.mul(u[i], F.mul(G[i][j], v[j])) for i in range(n) for j in range(n)))  # noqa: E731
    W = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
    arf = F.zero
    while W:
        e = W[0]
        f = next((w for w in W[1:] if B(e, w) != 0), None)
        if f is None:
            raise ValueError("bilinear form is degenerate")
        s = F.inv(B(e, f))
        f = [F.mul(s, c) for c in f]
        arf = F.add(arf, F.mul(evaluate(q, e), evaluate(q, f)))
        rest = []
        for w in W:
            a, b = B(w, f), B(w, e)
            w2 = [F.add(F.add(wi, F.mul(a, ei)), F.mul(b, fi)) for wi, ei, fi in zip(w, e, f)]
            rest.append(w2)
        red, _ = rref(F, rest, n)
        W = [list(r) for r in red]
    return arf


def sum_f(F: FieldDesc, it):
    s = F.zero
    for v in it:
        s = F.add(s, v)
    return s


def classify_form(q: QuadraticForm) -> FormClass:
    F = q.field
    if not (F.is_finite and F.is_field):
        raise FieldMismatch("classification needs a finite field")
    _, rk = radical_and_rank(q)
    m, _, qstar = reduce_effective_variables(q)
    if m == 0:
        return FormClass(q.n, 0, q.n, "zero")
    if m % 2 == 1:
        return FormClass(q.n, m, q.n - m, "odd")
    if F.characteristic == 2:
        hyper = F.trace(_arf_invariant(qstar)) == 0
    else:
        d = determinant(F, qstar.gram)
        sign = F.embed(-1) if (m // 2) % 2 else F.one
        hyper = F.is_square(F.mul(sign, d))
    return FormClass(q.n, m, q.n - m, "hyperbolic" if hyper else "elliptic")


def count_zeros_exact(q: QuadraticForm) -> int:
    """Affine zero count of a single form over F_q from its classification."""
    c = classify_form(q)
    Fq = q.field.order
    m = c.rank
    if m == 0:
        nz = 1
    elif m % 2 == 1:
        nz = Fq ** (m - 1)
    else:
        nz = Fq ** (m - 1) + c.sign * (Fq - 1) * Fq ** (m // 2 - 1)
    return Fq**c.radical_dim * nz
