"""Quadratic forms and systems of forms over any supported coefficient domain.

A form in n variables is stored as an upper-triangular coefficient table
``{(i, j): c}`` with ``0 <= i <= j < n`` (0-based indices; ``x1`` is index 0),
holding the coefficient of the monomial ``x_i x_j``.  This keeps
characteristic 2 first-class: the polar (Gram) matrix is derived, never
stored, and nothing here divides by 2.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch, FieldMismatch, NonIntegral, SingularTransform, TooLarge
from .fields import (
    EXTENSION,
    MODPK,
    PADIC,
    FieldDesc,
    MatrixF,
    determinant,
    dot,
    kernel_basis,
    mat_mul,
    rank as matrix_rank,
    rref,
    valuation,
)


def _normalize(field: FieldDesc, c):
    if field.kind == PADIC:
        return Fraction(c)
    if field.kind == EXTENSION:
        c = int(c)
        if not 0 <= c < field.order:
            raise FieldMismatch(f"{c} is not an element code of {field}")
        return c
    return int(c) % field.characteristic


class QuadraticForm:
    """Homogeneous quadratic form ``sum_{i<=j} c_ij x_i x_j``."""

    def __init__(self, field: FieldDesc, n: int, coeffs=None):
        self.field = field
        self.n = n
        c: dict[tuple[int, int], object] = {}
        for (i, j), v in dict(coeffs or {}).items():
            if i > j:
                i, j = j, i
            if not (0 <= i and j < n):
                raise DimensionMismatch(f"monomial x{i + 1}x{j + 1} outside {n} variables")
            v = _normalize(field, v)
            if (i, j) in c:
                v = field.add(c[(i, j)], v)
            c[(i, j)] = v
        self._c = {key: v for key, v in sorted(c.items()) if v != 0}

    @classmethod
    def zero(cls, field: FieldDesc, n: int) -> QuadraticForm:
        return cls(field, n)

    @property
    def coeffs(self) -> dict[tuple[int, int], object]:
        return dict(self._c)

    def coeff(self, i: int, j: int):
        if i > j:
            i, j = j, i
        return self._c.get((i, j), self.field.zero)

    def is_zero(self) -> bool:
        return not self._c

    def variables(self) -> list[int]:
        """Indices of the variables that occur with a nonzero coefficient."""
        return sorted({i for key in self._c for i in key})

    def __eq__(self, other):
        return (
            isinstance(other, QuadraticForm)
            and self.field == other.field
            and self.n == other.n
            and self._c == other._c
        )

    def __hash__(self):
        return hash((self.field, self.n, tuple(self._c.items())))

    def __repr__(self):
        return f"QuadraticForm({self.field}, n={self.n}, {self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in self._c.items():
            mono = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
            parts.append(f"{v}*{mono}")
        return " + ".join(parts)

    def __call__(self, x):
        return evaluate(self, x)

    # -- algebra --------------------------------------------------------

    def __add__(self, other: QuadraticForm) -> QuadraticForm:
        _check_compatible(self, other)
        F = self.field
        c = dict(self._c)
        for key, v in other._c.items():
            c[key] = F.add(c.get(key, F.zero), v)
        return QuadraticForm(F, self.n, c)

    def scale(self, a) -> QuadraticForm:
        F = self.field
        return QuadraticForm(F, self.n, {key: F.mul(a, v) for key, v in self._c.items()})

    @cached_property
    def gram(self) -> list[list]:
        """Polar matrix G with x^T G y = q(x+y) - q(x) - q(y)."""
        F = self.field
        G = [[F.zero] * self.n for _ in range(self.n)]
        for (i, j), v in self._c.items():
            if i == j:
                G[i][i] = F.add(v, v)
            else:
                G[i][j] = v
                G[j][i] = v
        return G

    def embed(self, n: int, positions: Sequence[int] | None = None) -> QuadraticForm:
        """Same form viewed in ``n`` variables (old variable i -> positions[i])."""
        pos = list(positions) if positions is not None else list(range(self.n))
        return QuadraticForm(self.field, n, {(pos[i], pos[j]): v for (i, j), v in self._c.items()})


def _check_compatible(a: QuadraticForm, b: QuadraticForm):
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} variables")


class FormSystem:
    """Ordered list of r >= 1 forms sharing one field and one variable count."""

    __slots__ = ("forms", "field", "n")

    def __init__(self, forms: Iterable[QuadraticForm]):
        forms = tuple(forms)
        if not forms:
            raise ValueError("a system needs at least one form")
        for f in forms[1:]:
            _check_compatible(forms[0], f)
        self.forms = forms
        self.field = forms[0].field
        self.n = forms[0].n

    @property
    def r(self) -> int:
        return len(self.forms)

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)

    def __getitem__(self, i):
        return self.forms[i]

    def __eq__(self, other):
        return isinstance(other, FormSystem) and self.forms == other.forms

    def __hash__(self):
        return hash(self.forms)

    def __repr__(self):
        return f"FormSystem({self.field}, n={self.n}, r={self.r})"

    def evaluate(self, x) -> tuple:
        return tuple(evaluate(q, x) for q in self.forms)

    def variables(self) -> list[int]:
        return sorted({i for q in self.forms for i in q.variables()})

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.forms)


# ---------------------------------------------------------------------------


def evaluate(q: QuadraticForm, x):
    """Value of q at x."""
    if len(x) != q.n:
        raise DimensionMismatch(f"point has length {len(x)}, form has {q.n} variables")
    F = q.field
    s = F.zero
    for (i, j), c in q._c.items():
        xi, xj = x[i], x[j]
        if xi and xj:
            s = F.add(s, F.mul(c, F.mul(xi, xj)))
    return s


def bilinear(q: QuadraticForm, x, y):
    """Associated bilinear form q(x+y) - q(x) - q(y)."""
    if len(x) != q.n or len(y) != q.n:
        raise DimensionMismatch("vector length does not match the form")
    F = q.field
    s = F.zero
    for (i, j), c in q._c.items():
        if i == j:
            t = F.add(F.mul(x[i], y[i]), F.mul(x[i], y[i]))
        else:
            t = F.add(F.mul(x[i], y[j]), F.mul(x[j], y[i]))
        if t:
            s = F.add(s, F.mul(c, t))
    return s


def polar_vector(q: QuadraticForm, x) -> list:
    """The linear functional y -> bilinear(q, x, y) as a coefficient vector (= gradient at x)."""
    F = q.field
    return [dot(F, row, x) for row in q.gram]


def _as_rows(M):
    if isinstance(M, MatrixF):
        return [list(r) for r in M.rows]
    return [list(r) for r in M]


def _coerce_matrix(F: FieldDesc, M):
    return [[_normalize(F, v) for v in row] for row in _as_rows(M)]


def _check_invertible(F: FieldDesc, M, size: int, what: str):
    if len(M) != size or any(len(r) != size for r in M):
        raise DimensionMismatch(f"{what} must be {size}x{size}")
    if F.kind == MODPK:
        d = int(determinant(FieldDesc.padic(F.p), [[Fraction(v) for v in r] for r in M])) % F.characteristic
    else:
        d = determinant(F, M)
    if d == 0 or (F.kind == MODPK and d % F.p == 0):
        raise SingularTransform(f"{what} is not invertible over {F}")


def substitute(q: QuadraticForm, M) -> QuadraticForm:
    """q∘M for an n×m matrix M (no invertibility requirement); result has m variables."""
    F = q.field
    rows = _as_rows(M)
    m = len(rows[0]) if rows else 0
    out: dict[tuple[int, int], object] = {}
    for (i, j), c in q._c.items():
        Mi, Mj = rows[i], rows[j]
        for a in range(m):
            if Mi[a] == 0 and Mj[a] == 0:
                continue
            for b in range(a, m):
                if a == b:
                    t = F.mul(Mi[a], Mj[a])
                else:
                    t = F.add(F.mul(Mi[a], Mj[b]), F.mul(Mi[b], Mj[a]))
                if t:
                    out[(a, b)] = F.add(out.get((a, b), F.zero), F.mul(c, t))
    return QuadraticForm(F, m, out)


def apply_variable_change(S: FormSystem, M) -> FormSystem:
    """Forms q -> q∘M, so that the result at x equals S at M x."""
    F = S.field
    M = _coerce_matrix(F, M)
    _check_invertible(F, M, S.n, "M")
    return FormSystem(substitute(q, M) for q in S.forms)


def apply_form_change(S: FormSystem, P) -> FormSystem:
    """Forms q -> P q (new form i is sum_j P_ij q_j)."""
    F = S.field
    P = _coerce_matrix(F, P)
    _check_invertible(F, P, S.r, "P")
    return FormSystem(linear_combination(S, row) for row in P)


def linear_combination(S: FormSystem, a: Sequence) -> QuadraticForm:
    """sum_i a_i q_i."""
    if len(a) != S.r:
        raise DimensionMismatch(f"need {S.r} coefficients, got {len(a)}")
    F = S.field
    out: dict[tuple[int, int], object] = {}
    for ai, q in zip(a, S.forms):
        ai = _normalize(F, ai)
        if not ai:
            continue
        for key, v in q._c.items():
            out[key] = F.add(out.get(key, F.zero), F.mul(ai, v))
    return QuadraticForm(F, S.n, out)


def restrict(S: FormSystem | QuadraticForm, V) -> FormSystem | QuadraticForm:
    """Forms restricted to the span of V's basis, in coordinates along that basis."""
    if isinstance(S, QuadraticForm):
        return restrict(FormSystem([S]), V)[0]
    basis = V.basis if hasattr(V, "basis") else [list(v) for v in V]
    if any(len(v) != S.n for v in basis):
        raise DimensionMismatch("subspace ambient dimension does not match the system")
    d = len(basis)
    out = []
    for q in S.forms:
        c = {}
        for a in range(d):
            c[(a, a)] = evaluate(q, basis[a])
            for b in range(a + 1, d):
                c[(a, b)] = bilinear(q, basis[a], basis[b])
        out.append(QuadraticForm(S.field, d, c))
    return FormSystem(out) if out else S


# ---------------------------------------------------------------------------
# radical, rank, effective variables


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of F^n kept as the rows of its reduced echelon basis."""

    field: FieldDesc
    n: int
    basis: tuple[tuple, ...]

    @classmethod
    def span(cls, field: FieldDesc, n: int, vectors: Iterable[Sequence]) -> Subspace:
        vectors = [list(v) for v in vectors]
        if any(len(v) != n for v in vectors):
            raise DimensionMismatch(f"vectors must have length {n}")
        red, _ = rref(field, vectors, n) if vectors else ([], [])
        return cls(field, n, tuple(tuple(r) for r in red))

    @classmethod
    def full(cls, field: FieldDesc, n: int) -> Subspace:
        return cls(field, n, tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, field: FieldDesc, n: int) -> Subspace:
        return cls(field, n, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, v in enumerate(row) if v != 0) for row in self.basis)

    def __contains__(self, v) -> bool:
        return matrix_rank(self.field, list(self.basis) + [list(v)], self.n) == self.dim

    def join(self, other) -> Subspace:
        extra = other.basis if isinstance(other, Subspace) else [other]
        return Subspace.span(self.field, self.n, list(self.basis) + [list(v) for v in extra])

    def is_echelon(self) -> bool:
        red, _ = rref(self.field, self.basis, self.n)
        return tuple(tuple(r) for r in red) == self.basis


def _combine(F: FieldDesc, coeffs, vectors, n: int) -> list:
    v = [F.zero] * n
    for a, w in zip(coeffs, vectors):
        if a:
            v = [F.add(x, F.mul(a, y)) for x, y in zip(v, w)]
    return v


def _gram_rows(q: QuadraticForm):
    return [list(r) for r in q.gram]


def radical_and_rank(q: QuadraticForm) -> tuple[Subspace, int]:
    """Radical {v : b(v, .) = 0 and q(v) = 0} and rank n - dim(radical)."""
    F = q.field
    if not F.is_field:
        raise FieldMismatch("radical needs a field")
    K = kernel_basis(F, _gram_rows(q), q.n)
    if F.characteristic == 2 and K:
        # q is Frobenius-semilinear on the alternating kernel:
        # q(sum a_i k_i) = (sum a_i sqrt(q(k_i)))^2
        s = [F.sqrt_char2(evaluate(q, k)) for k in K]
        combos = kernel_basis(F, [s], len(K))
        K = [_combine(F, a, K, q.n) for a in combos]
    rad = Subspace.span(F, q.n, K)
    return rad, q.n - rad.dim


def form_rank(q: QuadraticForm) -> int:
    return radical_and_rank(q)[1]


def reduce_effective_variables(q: QuadraticForm) -> tuple[int, list[list], QuadraticForm]:
    """Write q(x) = q*(y_1..y_m) with m = rank(q) minimal.

    Returns (m, B, q*) where x = B y; the first m columns of B are standard
    basis vectors complementing the radical, the last n - m columns span it.
    """
    F = q.field
    rad, m = radical_and_rank(q)
    piv = set(rad.pivots)
    keep = [j for j in range(q.n) if j not in piv]
    cols = []
    for j in keep:
        cols.append([F.one if i == j else F.zero for i in range(q.n)])
    cols.extend(list(v) for v in rad.basis)
    B = [[cols[c][i] for c in range(q.n)] for i in range(q.n)]
    qstar = QuadraticForm(F, m, {(keep.index(i), keep.index(j)): v for (i, j), v in q._c.items() if i in keep and j in keep})
    return m, B, qstar


def rank_distribution(S: FormSystem, max_points: int = 10**6) -> dict[int, int]:
    """Histogram rank -> #{a in F_q^r : rank(sum a_i q_i) = rank}."""
    F = S.field
    if not F.is_finite or not F.is_field:
        raise FieldMismatch("rank_distribution needs a finite field")
    if F.order**S.r > max_points:
        raise TooLarge(f"{F.order}^{S.r} combinations exceed {max_points}")
    hist: Counter = Counter()
    for a in itertools.product(range(F.order), repeat=S.r):
        hist[form_rank(linear_combination(S, a))] += 1
    return dict(sorted(hist.items()))


# ---------------------------------------------------------------------------
# integral models over Z_p


def is_integral(S: FormSystem | QuadraticForm, p: int | None = None) -> bool:
    forms = [S] if isinstance(S, QuadraticForm) else S.forms
    p = p or forms[0].field.p
    return all(valuation(v, p) >= 0 for q in forms for v in q._c.values())


def reduce_mod_p(S: FormSystem | QuadraticForm, target: FieldDesc | None = None):
    """Reduction of a p-integral rational system to F_p (or Z/p^k)."""
    if isinstance(S, QuadraticForm):
        return reduce_mod_p(FormSystem([S]), target)[0]
    F = S.field
    if F.kind != PADIC:
        raise FieldMismatch("reduction mod p applies to rational (Q_p) systems")
    target = target or FieldDesc.prime(F.p)
    out = []
    for q in S.forms:
        c = {}
        for key, v in q._c.items():
            if valuation(v, F.p) < 0:
                raise NonIntegral(f"coefficient {v} of x{key[0] + 1}x{key[1] + 1} is not {F.p}-integral")
            c[key] = target.embed(v)
        out.append(QuadraticForm(target, q.n, c))
    return FormSystem(out)


def lift_to_rational(S: FormSystem, p: int | None = None, prec: int = 20) -> FormSystem:
    """Integer representatives in [0, p) of a prime-field system, as a Q_p system."""
    F = S.field
    Q = FieldDesc.padic(p or F.p, prec)
    return FormSystem(QuadraticForm(Q, q.n, {k: Fraction(int(v)) for k, v in q._c.items()}) for q in S.forms)


# ---------------------------------------------------------------------------
# transform pairs


@dataclass(frozen=True)
class TransformPair:
    """Variable change M (n×n) and form change P (r×r) with exact rational entries."""

    p: int
    M: tuple[tuple[Fraction, ...], ...]
    P: tuple[tuple[Fraction, ...], ...]
    vM: int
    vP: int

    @classmethod
    def make(cls, p: int, M, P) -> TransformPair:
        Q = FieldDesc.padic(p)
        M = tuple(tuple(Fraction(v) for v in r) for r in _as_rows(M))
        P = tuple(tuple(Fraction(v) for v in r) for r in _as_rows(P))
        dM = determinant(Q, M)
        dP = determinant(Q, P)
        if dM == 0 or dP == 0:
            raise SingularTransform("transform pair must have nonzero determinants")
        return cls(p, M, P, valuation(dM, p), valuation(dP, p))

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def r(self) -> int:
        return len(self.P)

    def recompute_valuations(self) -> tuple[int, int]:
        Q = FieldDesc.padic(self.p)
        return valuation(determinant(Q, self.M), self.p), valuation(determinant(Q, self.P), self.p)

    def apply(self, S: FormSystem) -> FormSystem:
        """P·(S∘M)."""
        if S.n != self.n or S.r != self.r:
            raise DimensionMismatch("transform pair does not match system shape")
        return apply_form_change(apply_variable_change(S, self.M), self.P)

    def then(self, other: TransformPair) -> TransformPair:
        """Composite transform: apply self first, then other."""
        Q = FieldDesc.padic(self.p)
        M = mat_mul(Q, self.M, other.M)
        P = mat_mul(Q, other.P, self.P)
        return TransformPair.make(self.p, M, P)

    @classmethod
    def identity(cls, p: int, n: int, r: int) -> TransformPair:
        eye = lambda k: [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]  # noqa: E731
        return cls.make(p, eye(n), eye(r))


def random_form(field: FieldDesc, n: int, rng: random.Random, density: float = 1.0) -> QuadraticForm:
    c = {}
    for i in range(n):
        for j in range(i, n):
            if density >= 1.0 or rng.random() < density:
                c[(i, j)] = field.random_element(rng)
    return QuadraticForm(field, n, c)


def random_system(field: FieldDesc, n: int, r: int, rng: random.Random) -> FormSystem:
    return FormSystem(random_form(field, n, rng) for _ in range(r))


def random_invertible(field: FieldDesc, n: int, rng: random.Random) -> list[list]:
    while True:
        M = [[field.random_element(rng) for _ in range(n)] for _ in range(n)]
        if determinant(field, M) != 0:
            return M
