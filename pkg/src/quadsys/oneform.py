"""Single quadratic forms over Q_p: diagonalization, Hilbert symbols, isotropy.

The isotropy decision uses the classical local criteria for a
nondegenerate form of rank n with discriminant d and Hasse invariant
e = prod_{i<j} (a_i, a_j)_p over a diagonalization <a_1, ..., a_n>:

    n = 1   never isotropic
    n = 2   isotropic iff -d is a square
    n = 3   isotropic iff (-1, -d)_p = e
    n = 4   isotropic iff d is not a square, or e = (-1, -1)_p
    n >= 5  always isotropic

(Serre, *A Course in Arithmetic*, IV.2.2.)  Degenerate forms are isotropic
via any radical vector.

Two independent checks live here as well: a Hensel-certified tree search
over primitive residues, and a plain exhaustive search mod p^j.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import FieldMismatch, ZeroArgument
from .fields import PADIC, FieldDesc, determinant, kernel_basis, residue, unit_part, valuation
from .forms import FormSystem, QuadraticForm, substitute


def _check_padic(q: QuadraticForm):
    if q.field.kind != PADIC:
        raise FieldMismatch("expected a form over Q_p")


def _sym_matrix(q: QuadraticForm) -> list[list[Fraction]]:
    """A with q(x) = x^T A x (off-diagonal entries halved)."""
    n = q.n
    A = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), c in q.coeffs.items():
        c = Fraction(c)
        if i == j:
            A[i][i] += c
        else:
            A[i][j] += c / 2
            A[j][i] += c / 2
    return A


def diagonalize(q: QuadraticForm) -> tuple[list[Fraction], list[list[Fraction]]]:
    """(d, M) with q(Mx) = sum d_i x_i^2, by symmetric Gaussian elimination.

    The identity is replayed exactly before returning.
    """
    _check_padic(q)
    n = q.n
    A = _sym_matrix(q)
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, f):
        # basis vector dst += f * src, applied as a congruence
        for r in range(n):
            M[r][dst] += f * M[r][src]
        for k in range(n):
            A[k][dst] += f * A[k][src]
        for k in range(n):
            A[dst][k] += f * A[src][k]

    def swap(a, b):
        for r in range(n):
            M[r][a], M[r][b] = M[r][b], M[r][a]
        A[a], A[b] = A[b], A[a]
        for row in A:
            row[a], row[b] = row[b], row[a]

    for i in range(n):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if j is not None:
                swap(i, j)
            else:
                j = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if j is None:
                    continue
                add_col(i, j, Fraction(1))  # A[i][i] becomes 2 A[i][j]
        for j in range(i + 1, n):
            if A[i][j] != 0:
                add_col(j, i, -A[i][j] / A[i][i])
    d = [A[i][i] for i in range(n)]
    diag = QuadraticForm(q.field, n, {(i, i): d[i] for i in range(n)})
    if substitute(q, M) != diag:
        raise AssertionError("diagonalization identity failed")
    return d, M


# ---------------------------------------------------------------------------
# square classes and Hilbert symbols


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def least_nonresidue(p: int) -> int:
    return next(k for k in range(2, p) if legendre(k, p) == -1)


def _split(a, p: int) -> tuple[int, int]:
    """(valuation, unit residue) with the unit taken mod p (odd p) or mod 8 (p = 2)."""
    a = Fraction(a)
    if a == 0:
        raise ZeroArgument("zero has no square class")
    v = valuation(a, p)
    u = unit_part(a, p)
    return v, residue(u, p, 3 if p == 2 else 1)


def hilbert_symbol(a, b, p: int) -> int:
    """(a, b)_p: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution in Q_p."""
    alpha, u = _split(a, p)
    beta, w = _split(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2  # noqa: E731
        omega = lambda t: ((t * t - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** (beta % 2) * legendre(w, p) ** (alpha % 2)


def is_square_qp(a, p: int) -> bool:
    v, u = _split(a, p)
    if v % 2:
        return False
    return u % 8 == 1 if p == 2 else legendre(u, p) == 1


def square_class(a, p: int) -> Fraction:
    """Canonical representative: p^(v mod 2) times 1 or the least nonresidue (odd p), or u mod 8 (p = 2)."""
    v, u = _split(a, p)
    if p == 2:
        rep = u
    else:
        rep = 1 if legendre(u, p) == 1 else least_nonresidue(p)
    return Fraction(rep * p ** (v % 2))


@dataclass(frozen=True)
class FormInvariants:
    p: int
    rank: int
    diagonal: tuple[Fraction, ...]  # square-class representatives of the nonzero diagonal entries
    discriminant: Fraction  # square class of the product
    hasse: int

    def recompute_hasse(self) -> int:
        e = 1
        for i, j in itertools.combinations(range(len(self.diagonal)), 2):
            e *= hilbert_symbol(self.diagonal[i], self.diagonal[j], self.p)
        return e


def form_invariants(q: QuadraticForm, p: int | None = None) -> FormInvariants:
    _check_padic(q)
    p = p or q.field.p
    d, _ = diagonalize(q)
    nz = [a for a in d if a != 0]
    diag = tuple(square_class(a, p) for a in nz)
    disc = Fraction(1)
    for a in nz:
        disc *= a
    e = 1
    for i, j in itertools.combinations(range(len(nz)), 2):
        e *= hilbert_symbol(nz[i], nz[j], p)
    return FormInvariants(p, len(nz), diag, square_class(disc, p) if nz else Fraction(1), e)


@dataclass(frozen=True)
class IsotropyDecision:
    isotropic: bool
    reason: str
    invariants: FormInvariants

    def __bool__(self):
        return self.isotropic


def is_isotropic_qp(q: QuadraticForm, p: int | None = None) -> IsotropyDecision:
    """Does q have a nontrivial zero over Q_p?"""
    _check_padic(q)
    p = p or q.field.p
    inv = form_invariants(q, p)
    n, m = q.n, inv.rank
    if m < n:
        return IsotropyDecision(True, f"degenerate: rank {m} < {n}, a radical vector is a zero", inv)
    d, e = inv.discriminant, inv.hasse
    if m == 1:
        return IsotropyDecision(False, "rank 1: a x^2 = 0 forces x = 0", inv)
    if m == 2:
        ok = is_square_qp(-d, p)
        return IsotropyDecision(ok, f"rank 2: -d = {-d} is {'a square' if ok else 'not a square'}", inv)
    if m == 3:
        h = hilbert_symbol(-1, -d, p)
        return IsotropyDecision(h == e, f"rank 3: (-1,-d) = {h}, Hasse invariant = {e}", inv)
    if m == 4:
        if not is_square_qp(d, p):
            return IsotropyDecision(True, "rank 4: discriminant is not a square", inv)
        h = hilbert_symbol(-1, -1, p)
        ok = h == e
        return IsotropyDecision(ok, f"rank 4: square discriminant, (-1,-1) = {h}, Hasse invariant = {e}", inv)
    return IsotropyDecision(True, f"rank {m} >= 5: every such form is isotropic", inv)


# ---------------------------------------------------------------------------
# witness forms


def anisotropic_quaternary(p: int, prec: int = 20) -> QuadraticForm:
    """x1^2 - k x2^2 + p(x3^2 - k x4^2) with k the least nonresidue; x1^2+x2^2+x3^2+x4^2 for p = 2."""
    Q = FieldDesc.padic(p, prec)
    if p == 2:
        return QuadraticForm(Q, 4, {(i, i): 1 for i in range(4)})
    k = least_nonresidue(p)
    return QuadraticForm(Q, 4, {(0, 0): 1, (1, 1): -k, (2, 2): p, (3, 3): -k * p})


def block_witness(r: int, p: int, prec: int = 20) -> FormSystem:
    """r copies of the anisotropic quaternary on disjoint blocks of 4 variables."""
    if r < 1:
        raise ValueError("r must be >= 1")
    base = anisotropic_quaternary(p, prec)
    return FormSystem(base.embed(4 * r, range(4 * b, 4 * b + 4)) for b in range(r))


# ---------------------------------------------------------------------------
# independent checks


def integer_coefficients(q: QuadraticForm) -> dict[tuple[int, int], int]:
    """Coefficients scaled by the lcm of denominators (same zeros)."""
    c = {k: Fraction(v) for k, v in q.coeffs.items()}
    L = lcm(*(v.denominator for v in c.values())) if c else 1
    return {k: int(v * L) for k, v in c.items()}


def _polar_int(c: dict, n: int) -> list[list[int]]:
    G = [[0] * n for _ in range(n)]
    for (i, j), v in c.items():
        if i == j:
            G[i][i] += 2 * v
        else:
            G[i][j] += v
            G[j][i] += v
    return G


@dataclass(frozen=True)
class OracleResult:
    isotropic: bool
    depth: int  # the precision exponent searched to
    witness: tuple | None  # Hensel-certified primitive residue, or an exact radical vector
    nodes: int


def isotropy_oracle(q: QuadraticForm, p: int | None = None, node_cap: int = 2_000_000) -> OracleResult:
    """Brute-force isotropy over Q_p by primitive residues, certified by Hensel's lemma.

    A primitive integer x with v(q(x)) > 2 v(dq/dx_i(x)) for some i lifts to
    a true zero.  Conversely a primitive zero z of a nondegenerate form has
    g = min_i v(dq/dx_i(z)) <= v(det G) (G the polar matrix), and its
    truncation mod p^(2g+1) passes the test; so searching primitive residues
    up to p^D with D = 2 v(det G) + 1 decides isotropy.
    """
    _check_padic(q)
    p = p or q.field.p
    n = q.n
    c = integer_coefficients(q)
    G = _polar_int(c, n)
    det = determinant(FieldDesc.padic(p), [[Fraction(v) for v in row] for row in G]) if n else Fraction(1)
    if n == 0:
        return OracleResult(False, 0, None, 0)
    if det == 0:
        Q = FieldDesc.padic(p)
        ker = kernel_basis(Q, [[Fraction(v) for v in row] for row in G], n)
        v = ker[0]
        L = lcm(*(Fraction(x).denominator for x in v))
        return OracleResult(True, 0, tuple(int(x * L) for x in v), 0)
    D = 2 * valuation(det, p) + 1
    items = list(c.items())

    def qval(x):
        return sum(v * x[i] * x[j] for (i, j), v in items)

    def grad_val(x):
        best = None
        for row in G:
            g = sum(a * b for a, b in zip(row, x))
            if g:
                vg = valuation(g, p)
                best = vg if best is None else min(best, vg)
        return best

    nodes = 0
    stack = []
    for lead in range(n):
        for rest in itertools.product(range(p), repeat=n - lead - 1):
            stack.append((1, (0,) * lead + (1,) + rest, lead))
    stack.reverse()
    while stack:
        j, x, lead = stack.pop()
        nodes += 1
        if nodes > node_cap:
            raise RuntimeError("isotropy oracle exceeded its node cap")
        val = qval(x)
        if val % p**j:
            continue
        g = grad_val(x)
        if val == 0 or (g is not None and valuation(val, p) > 2 * g):
            return OracleResult(True, D, x, nodes)
        if j >= D:
            continue
        step = p**j
        children = []
        for digits in itertools.product(range(p), repeat=n - 1):
            it = iter(digits)
            y = tuple(x[i] if i == lead else x[i] + step * next(it) for i in range(n))
            children.append((j + 1, y, lead))
        stack.extend(reversed(children))
    return OracleResult(False, D, None, nodes)


def primitive_zeros_mod(q: QuadraticForm, p: int, j: int, limit: int | None = None) -> int:
    """Number of primitive x in (Z/p^j)^n with q(x) = 0 mod p^j (exhaustive, numpy)."""
    _check_padic(q)
    n = q.n
    m = p**j
    c = {k: residue(v, p, j) for k, v in q.coeffs.items()}
    if m**n > 10**8:
        raise ValueError(f"{m}^{n} points is beyond the exhaustive range")
    count = 0
    # loop over the first coordinate, vectorize the rest
    rest = n - 1
    grids = np.indices((m,) * rest).reshape(rest, -1).astype(np.int64) if rest else np.zeros((0, 1), np.int64)
    unit_rest = np.zeros(grids.shape[1], dtype=bool)
    for i in range(rest):
        unit_rest |= grids[i] % p != 0
    for x0 in range(m):
        cols = [np.full(grids.shape[1], x0, dtype=np.int64)] + [grids[i] for i in range(rest)]
        val = np.zeros(grids.shape[1], dtype=np.int64)
        for (a, b), v in c.items():
            val = (val + v * (cols[a] * cols[b] % m)) % m
        prim = unit_rest | (x0 % p != 0)
        count += int(np.count_nonzero((val == 0) & prim))
        if limit is not None and count >= limit:
            break
    return count
