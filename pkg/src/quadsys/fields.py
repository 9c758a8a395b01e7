"""Exact arithmetic over F_p, F_{p^e}, Z/p^k and Q (with a designated prime p).

Elements are stored as plain Python values inside a :class:`FieldDesc`:

* prime field F_p      -- ``int`` in ``[0, p)``
* extension F_{p^e}    -- ``int`` in ``[0, p^e)`` whose base-p digits are the
  coefficients of the residue polynomial in ``t`` (lowest degree first)
* ring Z/p^k           -- ``int`` in ``[0, p^k)``
* p-adic rational      -- :class:`fractions.Fraction` in lowest terms

All descriptor methods (``add``, ``mul``, ...) act on these raw values so that
hot loops never allocate wrapper objects.  :class:`FieldElement` is a thin
operator-overloading wrapper for interactive use.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import BadFieldSpec, DimensionMismatch, FieldMismatch, NonUnit, ZeroInverse

PRIME = "prime-field"
EXTENSION = "extension-field"
MODPK = "mod-pk-ring"
PADIC = "padic-rational"

_TABLE_LIMIT = 1024  # build dense add/mul tables for extension fields up to this order


def is_prime(n: int) -> bool:
    """Trial division primality test (intended for n <= 2**31)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, e)`` with ``q == p**e`` or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            return (p, e) if q == 1 and is_prime(p) else None
    return None


def valuation(x, p: int):
    """p-adic valuation of an integer or rational; ``math.inf`` for zero.

    >>> valuation(Fraction(12, 25), 5)
    -2
    """
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """Return u with x = p^v(x) * u."""
    x = Fraction(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def residue(x, p: int, k: int = 1) -> int:
    """Image of a p-integral rational in Z/p^k."""
    x = Fraction(x)
    m = p**k
    if x.denominator % p == 0:
        raise NonUnit(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, lowest degree first)


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    dm = len(m) - 1
    lead_inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * lead_inv % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _poly_trim(a)
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive divisor search: no monic factor of degree 1..e//2."""
    e = len(modulus) - 1
    if e < 1 or modulus[-1] % p == 0:
        return False
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(list(modulus), list(low) + [1], p):
                return False
    return True


def first_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree e."""
    for low in itertools.product(range(p), repeat=e):
        m = tuple(reversed(low)) + (1,)
        if is_irreducible(m, p):
            return m
    raise BadFieldSpec(f"no irreducible polynomial of degree {e} over F_{p}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldDesc:
    """Coefficient domain descriptor.

    Use the constructors :meth:`prime`, :meth:`extension`, :meth:`mod_pk`
    and :meth:`padic` rather than calling the class directly.
    """

    kind: str
    p: int
    e: int = 1
    modulus: tuple[int, ...] | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind not in (PRIME, EXTENSION, MODPK, PADIC):
            raise BadFieldSpec(f"unknown field kind {self.kind!r}")
        if not (2 <= self.p <= 2**31 and is_prime(self.p)):
            raise BadFieldSpec(f"{self.p} is not a prime <= 2^31")
        if self.kind == EXTENSION:
            m = self.modulus
            if m is None or len(m) - 1 != self.e:
                raise BadFieldSpec("extension modulus must have degree e")
            if self.e > 8 or self.p**self.e > 2**16:
                raise BadFieldSpec("extension fields are limited to e <= 8, q <= 2^16")
            if m[-1] != 1:
                raise BadFieldSpec("extension modulus must be monic")
            if not is_irreducible(m, self.p):
                raise BadFieldSpec(f"modulus {m} is reducible over F_{self.p}")
        if self.kind in (MODPK, PADIC) and (self.k is None or self.k < 1):
            raise BadFieldSpec("precision k must be >= 1")

    # -- constructors -------------------------------------------------------

    @classmethod
    def prime(cls, p: int) -> FieldDesc:
        return cls(PRIME, p)

    @classmethod
    def extension(cls, p: int, modulus: Sequence[int] | None = None, e: int | None = None) -> FieldDesc:
        """F_{p^e} defined by ``modulus`` (coefficients, constant term first)."""
        if modulus is None:
            if e is None:
                raise BadFieldSpec("need a modulus or a degree")
            modulus = first_irreducible(p, e)
        modulus = [int(c) % p for c in modulus]
        _poly_trim(modulus)
        if not modulus or len(modulus) < 2:
            raise BadFieldSpec("modulus must have degree >= 1")
        lead = pow(modulus[-1], -1, p) if modulus[-1] % p else None
        if lead is None:
            raise BadFieldSpec("modulus has zero leading coefficient")
        modulus = tuple(c * lead % p for c in modulus)
        if len(modulus) == 2:
            return cls.prime(p)
        return cls(EXTENSION, p, len(modulus) - 1, modulus)

    @classmethod
    def gf(cls, q: int) -> FieldDesc:
        pe = prime_power(q)
        if pe is None:
            raise BadFieldSpec(f"{q} is not a prime power")
        p, e = pe
        return cls.prime(p) if e == 1 else cls.extension(p, e=e)

    @classmethod
    def mod_pk(cls, p: int, k: int) -> FieldDesc:
        return cls(MODPK, p, 1, None, k)

    @classmethod
    def padic(cls, p: int, prec: int = 20) -> FieldDesc:
        return cls(PADIC, p, 1, None, prec)

    # -- basic properties ---------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind != MODPK or self.k == 1

    @property
    def is_finite(self) -> bool:
        return self.kind != PADIC

    @property
    def order(self) -> int | None:
        if self.kind == MODPK:
            return self.p**self.k
        if self.kind == PADIC:
            return None
        return self.p**self.e

    @property
    def characteristic(self) -> int:
        if self.kind == PADIC:
            return 0
        if self.kind == MODPK:
            return self.p**self.k
        return self.p

    @property
    def zero(self):
        return Fraction(0) if self.kind == PADIC else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == PADIC else 1

    def __str__(self):
        if self.kind == PRIME:
            return f"F_{self.p}"
        if self.kind == EXTENSION:
            return f"F_{self.p}^{self.e}"
        if self.kind == MODPK:
            return f"Z/{self.p}^{self.k}"
        return f"Q_{self.p}"

    # -- coercion -----------------------------------------------------------

    def embed(self, x):
        """Image of an integer (or p-integral rational) under the canonical map."""
        if self.kind == PADIC:
            return Fraction(x)
        m = self.characteristic
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise NonUnit(f"{x} has p in its denominator")
        return x.numerator * pow(x.denominator, -1, m) % m

    def from_coeffs(self, coeffs: Sequence[int]):
        """Extension element from its polynomial coefficients (constant first)."""
        if self.kind != EXTENSION:
            if any(coeffs[1:]):
                raise FieldMismatch("polynomial literal outside an extension field")
            return self.embed(coeffs[0] if coeffs else 0)
        red = _poly_mod(list(coeffs), self.modulus, self.p)
        return sum(c * self.p**i for i, c in enumerate(red))

    def coeffs(self, a) -> list[int]:
        """Polynomial coefficients of an extension element (constant first)."""
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def validate(self, a) -> bool:
        if self.kind == PADIC:
            return isinstance(a, (int, Fraction))
        return isinstance(a, (int, np.integer)) and 0 <= a < self.order

    # -- arithmetic on raw values ------------------------------------------

    def add(self, a, b):
        if self.kind == EXTENSION:
            if self.p == 2:
                return a ^ b
            return self._ext_add(a, b)
        if self.kind == PADIC:
            return a + b
        return (a + b) % self.characteristic

    def neg(self, a):
        if self.kind == EXTENSION:
            if self.p == 2:
                return a
            return self._digits_map(a, lambda c: -c)
        if self.kind == PADIC:
            return -a
        return -a % self.characteristic

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind == EXTENSION:
            tab = self._mul_table
            if tab is not None:
                return tab[a][b]
            return self._ext_mul(a, b)
        if self.kind == PADIC:
            return a * b
        return a * b % self.characteristic

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroInverse("inverse of zero")
        if self.kind == PADIC:
            return 1 / Fraction(a)
        if self.kind == EXTENSION:
            return self.pow(a, self.order - 2)
        if a % self.p == 0:
            raise NonUnit(f"{a} is not a unit in {self}")
        return pow(a, -1, self.characteristic)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def is_zero(self, a) -> bool:
        return a == 0

    def scale_int(self, n: int, a):
        """n * a for an integer n (repeated addition semantics)."""
        return self.mul(self.embed(n), a)

    # -- finite field extras ----------------------------------------------

    def elements(self) -> Iterator:
        if self.kind == PADIC:
            raise TypeError("Q_p is not finite")
        return iter(range(self.order))

    def random_element(self, rng: random.Random):
        if self.kind == PADIC:
            return Fraction(rng.randint(-20, 20))
        return rng.randrange(self.order)

    def is_square(self, a) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.order - 1) // 2) == 1

    def quadratic_character(self, a) -> int:
        """0, +1 or -1 (odd characteristic finite fields)."""
        if a == 0:
            return 0
        return 1 if self.is_square(a) else -1

    def sqrt_char2(self, a):
        """Unique square root in a field of characteristic 2."""
        return self.pow(a, self.order // 2)

    def trace(self, a) -> int:
        """Absolute trace F_q -> F_p, returned as an int in [0, p)."""
        t, x = 0, a
        for _ in range(self.e):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        return t

    # -- extension internals ------------------------------------------------

    def _digits_map(self, a, f):
        out, base = 0, 1
        for _ in range(self.e):
            out += (f(a % self.p) % self.p) * base
            a //= self.p
            base *= self.p
        return out

    def _ext_add(self, a, b):
        out, base, p = 0, 1, self.p
        for _ in range(self.e):
            out += ((a % p + b % p) % p) * base
            a //= p
            b //= p
            base *= p
        return out

    def _ext_mul(self, a, b):
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        return self.from_coeffs(prod)

    @cached_property
    def _mul_table(self):
        if self.kind != EXTENSION or self.order > _TABLE_LIMIT:
            return None
        q = self.order
        return [[self._ext_mul(a, b) for b in range(q)] for a in range(q)]

    @cached_property
    def _np_tables(self):
        q = self.order
        add = np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        mul = np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        return add, mul

    # -- vectorized arithmetic (numpy int64 arrays) -------------------------

    def np_add(self, a, b):
        if self.kind == EXTENSION:
            if self.p == 2:
                return np.bitwise_xor(a, b)
            return self._np_tables[0][a, b]
        return (a + b) % self._np_modulus()

    def np_mul(self, a, b):
        if self.kind == EXTENSION:
            return self._np_tables[1][a, b]
        return (a * b) % self._np_modulus()

    def np_mul_const(self, c, a):
        if self.kind == EXTENSION:
            return self._np_tables[1][c][a]
        return (a * c) % self._np_modulus()

    def _np_modulus(self):
        if self.kind == PADIC:
            raise TypeError("vectorized arithmetic needs a finite ring")
        m = self.characteristic
        if m * m >= 2**62:
            raise TypeError(f"modulus {m} too large for int64 vectorized arithmetic")
        return m

    def supports_numpy(self) -> bool:
        if self.kind == PADIC:
            return False
        if self.kind == EXTENSION:
            return self.order <= _TABLE_LIMIT
        return self.characteristic**2 < 2**62

    # -- element wrapper ----------------------------------------------------

    def __call__(self, value) -> FieldElement:
        if self.kind == EXTENSION and isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_coeffs(value))
        return FieldElement(self, self.embed(value) if self.kind != EXTENSION else int(value) % self.order)


@dataclass(frozen=True)
class FieldElement:
    """An element together with its owning :class:`FieldDesc`."""

    field: FieldDesc
    value: object

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return self.field.embed(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.value, n))

    def inverse(self) -> FieldElement:
        return field_inverse(self)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.embed(other)
        except (NonUnit, TypeError, ValueError):
            return False

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return not self.field.is_zero(self.value)

    def __repr__(self):
        return f"{self.field}({self.value})"


def field_inverse(a: FieldElement) -> FieldElement:
    """Multiplicative inverse; raises ZeroInverse / NonUnit."""
    return FieldElement(a.field, a.field.inv(a.value))


# ---------------------------------------------------------------------------
# linear algebra


@dataclass(frozen=True)
class MatrixF:
    """Dense matrix of raw values over one FieldDesc."""

    field: FieldDesc
    rows: tuple[tuple, ...]
    ncols: int

    @classmethod
    def from_rows(cls, field: FieldDesc, rows, ncols: int | None = None) -> MatrixF:
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged matrix")
        return cls(field, rows, ncols)

    @classmethod
    def identity(cls, field: FieldDesc, n: int) -> MatrixF:
        return cls(field, tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def matvec(self, x):
        if len(x) != self.ncols:
            raise DimensionMismatch("matvec length mismatch")
        return tuple(dot(self.field, r, x) for r in self.rows)

    def transpose(self) -> MatrixF:
        return MatrixF(self.field, tuple(zip(*self.rows)) if self.rows else (), self.nrows)


def dot(F: FieldDesc, u, v):
    s = F.zero
    for a, b in zip(u, v):
        if a and b:
            s = F.add(s, F.mul(a, b))
    return s


def rref(F: FieldDesc, rows, ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of ``rows``; returns (nonzero rows, pivot columns)."""
    if not F.is_field:
        raise NonUnit(f"{F} is not a field")
    A = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def row_reduce(A: MatrixF) -> tuple[MatrixF, int, tuple[int, ...]]:
    """Unique reduced row echelon form, rank and pivot columns.

    Zero rows are kept at the bottom so the shape of ``A`` is preserved.
    """
    red, piv = rref(A.field, A.rows, A.ncols)
    zero_row = [A.field.zero] * A.ncols
    full = red + [zero_row] * (A.nrows - len(red))
    return MatrixF.from_rows(A.field, full, A.ncols), len(piv), tuple(piv)


def rank(F: FieldDesc, rows, ncols: int) -> int:
    return len(rref(F, rows, ncols)[1])


def kernel_basis(F: FieldDesc, rows, ncols: int) -> list[list]:
    """Basis of {x : A x = 0}, one vector per free column (free entry = 1)."""
    red, piv = rref(F, rows, ncols)
    pivset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [F.zero] * ncols
        v[f] = F.one
        for row, c in zip(red, piv):
            if row[f] != 0:
                v[c] = F.neg(row[f])
        basis.append(v)
    return basis


@dataclass(frozen=True)
class AffineSolution:
    particular: tuple
    kernel: tuple[tuple, ...]

    @property
    def dim(self) -> int:
        return len(self.kernel)


def solve_linear(A: MatrixF, b) -> AffineSolution | None:
    """Solve ``A x = b``; returns None when the system is inconsistent."""
    F = A.field
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs has length {len(b)}, matrix has {A.nrows} rows")
    n = A.ncols
    aug = [list(r) + [bi] for r, bi in zip(A.rows, b)]
    red, piv = rref(F, aug, n + 1)
    if n in piv:
        return None
    x = [F.zero] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    kern = kernel_basis(F, A.rows, n)
    return AffineSolution(tuple(x), tuple(tuple(v) for v in kern))


def span_elements(F: FieldDesc, basis, offset=None) -> Iterator[tuple]:
    """All vectors offset + sum c_i basis_i (lexicographic in the c_i)."""
    n = len(offset) if offset is not None else (len(basis[0]) if basis else 0)
    base = tuple(offset) if offset is not None else tuple([F.zero] * n)
    if not basis:
        yield base
        return
    for cs in itertools.product(range(F.order), repeat=len(basis)):
        v = list(base)
        for c, b in zip(cs, basis):
            if c:
                for j, bj in enumerate(b):
                    if bj:
                        v[j] = F.add(v[j], F.mul(c, bj))
        yield tuple(v)


def mat_mul(F: FieldDesc, A, B):
    Bt = list(zip(*B))
    return [[dot(F, r, c) for c in Bt] for r in A]


def determinant(F: FieldDesc, A) -> object:
    """Determinant by elimination (field kinds only)."""
    A = [list(r) for r in A]
    n = len(A)
    det = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return F.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = F.neg(det)
        det = F.mul(det, A[c][c])
        inv = F.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[c])]
    return det


def inverse_matrix(F: FieldDesc, A) -> list[list]:
    n = len(A)
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(A)]
    red, piv = rref(F, aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroInverse("singular matrix")
    return [row[n:] for row in red]
