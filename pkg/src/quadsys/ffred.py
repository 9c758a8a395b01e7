"""Compile zero-finding for a form over K(T) into a system of forms over K.

With the ansatz ``x_i(T) = sum_{e<=d} c_{i,e} T^e`` the polynomial
``f(x(T))`` has degree at most ``2d + D`` in T, where D is the largest
T-degree among the coefficients of f.  Each of its ``R = 2d + D + 1``
coefficients is a quadratic form in the ``N = n(d+1)`` unknowns c_{i,e};
a vector c is a common zero of these forms exactly when f(x_c(T)) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DimensionMismatch, NotAZero
from .fields import FieldDesc
from .forms import FormSystem, QuadraticForm, _normalize


def _trim(F: FieldDesc, a: list) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def poly_add(F: FieldDesc, a: Sequence, b: Sequence) -> tuple:
    out = [F.zero] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = F.add(out[i], x)
    for i, x in enumerate(b):
        out[i] = F.add(out[i], x)
    return _trim(F, out)


def poly_mul(F: FieldDesc, a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(F, out)


class FTForm:
    """Quadratic form in x_1..x_n whose coefficients are polynomials in T.

    ``coeffs`` maps (i, j), i <= j, to a coefficient list in T (constant first).
    """

    def __init__(self, field: FieldDesc, n: int, coeffs=None):
        self.field = field
        self.n = n
        c: dict[tuple[int, int], tuple] = {}
        for (i, j), poly in dict(coeffs or {}).items():
            if i > j:
                i, j = j, i
            if not (0 <= i and j < n):
                raise DimensionMismatch(f"monomial x{i + 1}x{j + 1} outside {n} variables")
            poly = [_normalize(field, v) for v in poly]
            if (i, j) in c:
                poly = poly_add(field, c[(i, j)], poly)
            c[(i, j)] = _trim(field, poly)
        self._c = {k: v for k, v in sorted(c.items()) if v}

    @property
    def coeffs(self) -> dict[tuple[int, int], tuple]:
        return dict(self._c)

    @property
    def D(self) -> int:
        return max((len(v) - 1 for v in self._c.values()), default=0)

    def __eq__(self, other):
        return isinstance(other, FTForm) and (self.field, self.n, self._c) == (other.field, other.n, other._c)

    def __hash__(self):
        return hash((self.field, self.n, tuple(self._c.items())))

    def __repr__(self):
        return f"FTForm({self.field}, n={self.n}, D={self.D}, {self._c})"

    @classmethod
    def from_form(cls, q: QuadraticForm) -> FTForm:
        return cls(q.field, q.n, {k: (v,) for k, v in q.coeffs.items()})

    def evaluate(self, xs: Sequence[Sequence]) -> tuple:
        """f(x_1(T), ..., x_n(T)) as a T-polynomial."""
        if len(xs) != self.n:
            raise DimensionMismatch(f"need {self.n} polynomials")
        F = self.field
        total: tuple = ()
        for (i, j), c in self._c.items():
            total = poly_add(F, total, poly_mul(F, c, poly_mul(F, xs[i], xs[j])))
        return total


@dataclass(frozen=True)
class ReductionResult:
    form: FTForm
    d: int
    N: int
    R: int
    system: FormSystem
    index: dict = field(hash=False)  # (variable i, T-power e) -> unknown position

    def unknown(self, i: int, e: int) -> int:
        return self.index[(i, e)]


def reduce_ft_form(f: FTForm, d: int) -> ReductionResult:
    """Compile f over K(T) with polynomial ansatz of degree <= d into forms over K."""
    if d < 0:
        raise ValueError("ansatz degree d must be >= 0")
    F = f.field
    n, D = f.n, f.D
    N = n * (d + 1)
    R = 2 * d + D + 1
    index = {(i, e): i * (d + 1) + e for i in range(n) for e in range(d + 1)}
    tables: list[dict] = [{} for _ in range(R)]
    for (a, b), poly in f.coeffs.items():
        for t, c in enumerate(poly):
            if c == 0:
                continue
            for e1 in range(d + 1):
                u = index[(a, e1)]
                for e2 in range(d + 1):
                    v = index[(b, e2)]
                    key = (u, v) if u <= v else (v, u)
                    tab = tables[t + e1 + e2]
                    tab[key] = F.add(tab.get(key, F.zero), c)
    system = FormSystem(QuadraticForm(F, N, tab) for tab in tables)
    return ReductionResult(f, d, N, R, system, index)


def solution_to_polynomials(res: ReductionResult, c: Sequence) -> list[tuple]:
    """Map a common zero c of the compiled system back to x_i(T); the identity is replayed."""
    if len(c) != res.N:
        raise DimensionMismatch(f"need {res.N} unknowns")
    F = res.form.field
    xs = [_trim(F, [c[res.index[(i, e)]] for e in range(res.d + 1)]) for i in range(res.form.n)]
    if res.form.evaluate(xs):
        raise NotAZero("f(x(T)) is not the zero polynomial")
    return xs


def polynomials_to_solution(res: ReductionResult, xs: Sequence[Sequence]) -> tuple:
    """Inverse encoding x(T) -> c (polynomials must have degree <= d)."""
    F = res.form.field
    c = [F.zero] * res.N
    for i, poly in enumerate(xs):
        if len(_trim(F, list(poly))) > res.d + 1:
            raise DimensionMismatch(f"x{i + 1}(T) has degree above d = {res.d}")
        for e, v in enumerate(poly):
            c[res.index[(i, e)]] = v
    return tuple(c)


def first_degree_exceeding(n: int, D: int, factor: int = 4, limit: int = 10**6) -> int | None:
    """Smallest d with N = n(d+1) > factor * R = factor(2d + D + 1), or None."""
    for d in range(limit):
        if n * (d + 1) > factor * (2 * d + D + 1):
            return d
        if n <= 2 * factor:
            return None
    return None
