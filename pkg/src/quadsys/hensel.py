"""Hensel lifting of nonsingular zeros and the p-adic solving pipeline."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import FieldMismatch, NonIntegral, NotAZero, SingularSeed
from .fields import PADIC, FieldDesc, determinant, residue, valuation
from .forms import FormSystem, evaluate, is_integral, reduce_mod_p
from .minimize import MinimizationResult, minimize_heuristic
from .zeros import EXHAUSTIVE_CAP, find_nonsingular_zero, jacobian_at

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class PadicVector:
    """Coordinates modulo p^k, with the mod-p seed they lift and how they were obtained."""

    p: int
    k: int
    coords: tuple[int, ...]
    seed: tuple[int, ...]
    iterations: int = 0
    columns: tuple[int, ...] = ()

    def __post_init__(self):
        m = self.p**self.k
        if any(not 0 <= c < m for c in self.coords):
            raise ValueError("coordinates must be residues in [0, p^k)")
        if tuple(c % self.p for c in self.coords) != tuple(self.seed):
            raise ValueError("coordinates do not reduce to the seed")
        if all(c % self.p == 0 for c in self.coords):
            raise ValueError("vector is not primitive")

    def digits(self) -> list[str]:
        """Base-p expansion of each coordinate, most significant digit first, k digits."""
        out = []
        for c in self.coords:
            ds = []
            for _ in range(self.k):
                c, d = divmod(c, self.p)
                ds.append(d)
            ds.reverse()
            if self.p <= len(_DIGITS):
                out.append("".join(_DIGITS[d] for d in ds))
            else:
                out.append(".".join(str(d) for d in ds))
        return out

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "precision": self.k,
            "coords": list(self.coords),
            "digits": self.digits(),
            "seed": list(self.seed),
            "iterations": self.iterations,
            "columns": [c + 1 for c in self.columns],
        }


def _int_forms(S: FormSystem, k: int):
    """Coefficients of each form as residues mod p^k."""
    p = S.field.p
    return [{key: residue(c, p, k) for key, c in q.coeffs.items()} for q in S.forms]


def _eval_mod(coeffs: dict, x, m: int) -> int:
    return sum(c * x[i] * x[j] for (i, j), c in coeffs.items()) % m


def _grad_mod(coeffs: dict, x, n: int, m: int) -> list[int]:
    g = [0] * n
    for (i, j), c in coeffs.items():
        if i == j:
            g[i] += 2 * c * x[i]
        else:
            g[i] += c * x[j]
            g[j] += c * x[i]
    return [v % m for v in g]


def _solve_mod(A: list[list[int]], b: list[int], p: int, m: int) -> list[int]:
    """Solve A y = b modulo m = p^K when det A is a unit."""
    r = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for c in range(r):
        piv = next((i for i in range(c, r) if M[i][c] % p), None)
        if piv is None:
            raise SingularSeed("Jacobian submatrix is not invertible mod p")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, m)
        M[c] = [v * inv % m for v in M[c]]
        for i in range(r):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * bb) % m for a, bb in zip(M[i], M[c])]
    return [M[i][r] for i in range(r)]


def _pick_columns(J, r: int, n: int, Fp: FieldDesc):
    for cols in itertools.combinations(range(n), r):
        sub = [[row[c] for c in cols] for row in J]
        if determinant(Fp, sub) != 0:
            return cols
    return None


def lift_nonsingular(S: FormSystem, x0, k: int) -> PadicVector:
    """Refine a nonsingular common zero mod p to a common zero mod p^k.

    Newton's method on r coordinates whose Jacobian minor is a unit; the
    remaining coordinates stay at their representatives in [0, p).  Each
    step doubles the precision of the residual.
    """
    F = S.field
    if F.kind != PADIC:
        raise FieldMismatch("lifting works on Q_p systems")
    if not is_integral(S):
        raise NonIntegral("system has non-integral coefficients")
    if k < 1:
        raise ValueError("precision must be >= 1")
    p, n, r = F.p, S.n, S.r
    red = reduce_mod_p(S)
    seed = tuple(int(v) % p for v in x0)
    if len(seed) != n:
        raise FieldMismatch(f"seed has length {len(seed)}, expected {n}")
    if any(v != 0 for v in red.evaluate(seed)):
        raise NotAZero("seed is not a common zero mod p")
    if all(v == 0 for v in seed):
        raise SingularSeed("the zero vector cannot be lifted to a primitive zero")
    cols = _pick_columns(jacobian_at(red, seed), r, n, red.field)
    if cols is None:
        raise SingularSeed("Jacobian has rank < r at the seed")
    m = p**k
    forms = _int_forms(S, k)
    x = list(seed)

    def resid_val(x):
        vals = [_eval_mod(c, x, m) for c in forms]
        return min((valuation(v, p) if v else k) for v in vals)

    t = 0
    v = resid_val(x)
    while v < k:
        prec = min(2 * v, k)
        mp = p**prec
        Fx = [_eval_mod(c, x, mp) for c in forms]
        grads = [_grad_mod(c, x, n, mp) for c in forms]
        J = [[g[j] for j in cols] for g in grads]
        delta = _solve_mod(J, Fx, p, mp)
        for j, d in zip(cols, delta):
            x[j] = (x[j] - d) % m
        t += 1
        v = resid_val(x)
        assert v >= min(2**t, k), (t, v)
    vec = PadicVector(p, k, tuple(xi % m for xi in x), seed, t, tuple(cols))
    for q in S.forms:  # independent replay over the rationals
        assert valuation(evaluate(q, [Fraction(c) for c in vec.coords]), p) >= k
    return vec


# ---------------------------------------------------------------------------


SOLVED, NO_SEED, UNKNOWN = "Solved", "NoNonsingularSeed", "Unknown"
NO_PROOF = "absence of a nonsingular zero mod p does not prove the system has no nontrivial zero over Q_p"


@dataclass
class SolveResult:
    status: str
    vector: PadicVector | None = None  # zero of the input system, input coordinates
    model_vector: PadicVector | None = None  # lifted zero of the minimized model
    certified: bool = False  # for NoNonsingularSeed: the mod-p search was exhaustive
    reason: str = ""
    minimization: MinimizationResult | None = None

    def as_dict(self) -> dict:
        d = {"status": self.status, "certified": self.certified, "reason": self.reason}
        if self.vector is not None:
            d["vector"] = self.vector.as_dict()
            d["model_vector"] = self.model_vector.as_dict()
        if self.minimization is not None:
            d["minimization_steps"] = len(self.minimization.log)
        return d


def _primitive_integer(x: list[Fraction], p: int) -> list[Fraction]:
    """Scale by a power of p so that min valuation is 0."""
    v = min(valuation(c, p) for c in x if c != 0)
    return [c / Fraction(p) ** v for c in x]


def padic_solve(
    S: FormSystem,
    p: int | None = None,
    k: int = 20,
    cap: int = EXHAUSTIVE_CAP,
    samples: int = 200_000,
    seed: int = 0,
    max_iter: int = 64,
) -> SolveResult:
    """Minimize, reduce mod p, look for a nonsingular zero, and lift it to precision k."""
    F = S.field
    if F.kind != PADIC:
        raise FieldMismatch("padic_solve works on Q_p systems")
    if p is not None and p != F.p:
        raise FieldMismatch(f"system is over Q_{F.p}, not Q_{p}")
    p = F.p
    mres = minimize_heuristic(S, max_iter=max_iter)
    search = find_nonsingular_zero(reduce_mod_p(mres.model), cap=cap, samples=samples, seed=seed)
    if not search.found:
        if not mres.converged:
            return SolveResult(UNKNOWN, reason=f"minimization did not converge ({mres.reason})", minimization=mres)
        how = "exhaustive search" if search.certified else f"{search.points_visited} sampled points"
        return SolveResult(
            NO_SEED, certified=search.certified, reason=f"no nonsingular zero mod {p} ({how}); {NO_PROOF}", minimization=mres
        )
    y0 = search.report.point
    M = mres.total.M
    # lift in model coordinates, then map back; x = M y may pick up powers of p
    extra = 0
    while True:
        K = k + extra
        yv = lift_nonsingular(mres.model, y0, K)
        y = [Fraction(c) for c in yv.coords]
        x = _primitive_integer([sum(M[i][j] * y[j] for j in range(S.n)) for i in range(S.n)], p)
        if all(valuation(evaluate(q, x), p) >= k for q in S.forms):
            break
        extra += max(1, extra)
    coords = tuple(residue(c, p, k) for c in x)
    vec = PadicVector(p, k, coords, tuple(c % p for c in coords), yv.iterations, yv.columns)
    model_vec = PadicVector(p, k, tuple(c % p**k for c in yv.coords), yv.seed, yv.iterations, yv.columns)
    return SolveResult(SOLVED, vec, model_vec, True, f"nonsingular zero mod {p} lifted by Newton iteration", mres)
