"""Upper and lower bounds for beta(r; Q_p) from a closed set of inequalities.

Notation: beta(r) is the largest n admitting r forms over Q_p in n
variables with only the trivial common zero, and beta(r, m) the largest n
admitting r forms with no common linear space of projective dimension m.

Rules (all bounds uniform in p):

    base-1   beta(1) = 4
    base-2   beta(2) = 8
    ind1(k)  beta(r) <= beta(r - k, beta(k))             1 <= k < r
    ind2     beta(r, m) <= (r + 1) m + beta(r)
    d2       beta(2, m) <= 2m + 8
    chain    beta(r) <= 2 beta(r - 2) + 8                (ind1 with k = r - 2, then d2)

``upper_bound`` takes the minimum over every rule combination by dynamic
programming.  Ties go to the derivation with fewer nodes, then to the
earlier rule in ``RULE_ORDER``.  The lower bound 4r comes from r disjoint
anisotropic quaternaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

BASE = {1: 4, 2: 8}
D2_CONST = 8
R_MAX = 10**4
RULE_ORDER = ("base-1", "base-2", "chain", "ind1")


@dataclass(frozen=True)
class BoundDerivation:
    target: str
    value: int
    rule: str
    children: tuple = field(default=())

    def walk(self):
        """Pre-order (depth, node) pairs; iterative, derivations can be thousands deep."""
        stack = [(0, self)]
        while stack:
            depth, d = stack.pop()
            yield depth, d
            stack.extend((depth + 1, c) for c in reversed(d.children))

    def nodes(self) -> int:
        return sum(1 for _ in self.walk())

    def lines(self) -> list[str]:
        return [f"{'  ' * depth}{d.target} <= {d.value}  [{d.rule}]" for depth, d in self.walk()]

    def render(self) -> str:
        return "\n".join(self.lines())

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "value": self.value,
            "rule": self.rule,
            "children": [c.as_dict() for c in self.children],
        }  # recursive: intended for small r


class _Table:
    """Values, node counts and chosen rule for every r up to a limit (numpy DP)."""

    def __init__(self, limit: int):
        self.limit = limit
        U = np.zeros(limit + 1, dtype=np.int64)
        N = np.zeros(limit + 1, dtype=object)  # node counts can be huge
        rule = [""] * (limit + 1)
        kk = np.zeros(limit + 1, dtype=np.int64)
        for r in range(1, limit + 1):
            if r in BASE:
                U[r], N[r], rule[r] = BASE[r], 1, f"base-{r}"
                continue
            # ind1(k) + ind2:  (r - k + 1) * U[k] + U[r - k],  nodes 2 + N[k] + N[r - k]
            k = np.arange(1, r)
            vals = (r - k + 1) * U[k] + U[r - k]
            best = int(vals.min())
            cands = []
            chain = 2 * int(U[r - 2]) + D2_CONST
            if chain <= best:
                best = chain
                cands.append((1 + N[r - 2], RULE_ORDER.index("chain"), 0))
            for kv in k[vals == best]:
                kv = int(kv)
                cands.append((2 + N[kv] + N[r - kv], RULE_ORDER.index("ind1"), kv))
            nodes, order, kbest = min(cands)
            U[r], N[r], kk[r] = best, nodes, kbest
            rule[r] = RULE_ORDER[order] if order != RULE_ORDER.index("ind1") else f"ind1({kbest})"
        self.U, self.N, self.rule, self.k = U, N, rule, kk


@lru_cache(maxsize=4)
def _table(limit: int) -> _Table:
    return _Table(limit)


def _tab(r: int) -> _Table:
    if not 1 <= r <= R_MAX:
        raise ValueError(f"r must lie in 1..{R_MAX}")
    limit = 128
    while limit < r:
        limit *= 2
    return _table(min(limit, R_MAX))


def upper_value(r: int) -> int:
    return int(_tab(r).U[r])


_DERIV: dict[int, BoundDerivation] = {}


def upper_bound(r: int) -> BoundDerivation:
    """Best derivable upper bound for beta(r; Q_p), with its derivation tree."""
    t = _tab(r)
    for s in range(1, r + 1):  # bottom-up so every child is already built
        if s not in _DERIV:
            _DERIV[s] = _build(s, t)
    return _DERIV[r]


def _build(r: int, t: _Table) -> BoundDerivation:
    rule = t.rule[r]
    val = int(t.U[r])
    tgt = f"beta({r})"
    if rule.startswith("base"):
        return BoundDerivation(tgt, val, rule)
    if rule == "chain":
        return BoundDerivation(tgt, val, "chain", (_DERIV[r - 2],))
    k = int(t.k[r])
    inner = _ind2(r - k, _DERIV[k])
    return BoundDerivation(tgt, val, f"ind1({k})", (inner,))


def _ind2(r: int, m_deriv: BoundDerivation) -> BoundDerivation:
    m = m_deriv.value
    base = _DERIV[r]
    return BoundDerivation(f"beta({r}, m={m})", (r + 1) * m + base.value, "ind2", (m_deriv, base))


def upper_bound_subspace(r: int, m: int) -> BoundDerivation:
    """min of (r+1)m + beta(r) and, for r = 2, 2m + 8."""
    if r < 1 or m < 0:
        raise ValueError("need r >= 1 and m >= 0")
    base = upper_bound(r)
    tgt = f"beta({r}, m={m})"
    ind2 = BoundDerivation(tgt, (r + 1) * m + base.value, "ind2", (BoundDerivation("m", m, "given"), base))
    if r == 2 and 2 * m + D2_CONST < ind2.value:
        return BoundDerivation(tgt, 2 * m + D2_CONST, "d2", (BoundDerivation("m", m, "given"),))
    return ind2


def lower_bound(r: int) -> BoundDerivation:
    """4r, certified by r disjoint anisotropic quaternaries (see ``oneform.block_witness``)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return BoundDerivation(f"beta({r})", 4 * r, "lower-block")


# ---------------------------------------------------------------------------
# independent re-evaluation


def recompute(root: BoundDerivation) -> int:
    """Re-derive every value bottom-up from the leaves; raises on any inconsistency."""
    memo: dict[int, int] = {}
    order = [d for _, d in root.walk()]
    for d in reversed(order):
        if id(d) not in memo:
            memo[id(d)] = _check_node(d, [memo[id(c)] for c in d.children])
    return memo[id(root)]


def _check_node(d: BoundDerivation, kids: list[int]) -> int:
    rule = d.rule
    if rule in ("base-1", "base-2"):
        r = int(rule[-1])
        val = BASE[r]
        if d.children or d.target != f"beta({r})":
            raise AssertionError(f"malformed base node {d.target}")
    elif rule == "given":
        val = d.value
    elif rule == "lower-block":
        val = 4 * _r_of(d.target)
    elif rule == "chain":
        (c,) = d.children
        if _r_of(c.target) != _r_of(d.target) - 2:
            raise AssertionError("chain must step down by 2")
        val = 2 * kids[0] + D2_CONST
    elif rule.startswith("ind1("):
        k = int(rule[5:-1])
        (c,) = d.children
        r = _r_of(d.target)
        if _r_of(c.target) != r - k or c.children[0].target != f"beta({k})" or not 1 <= k < r:
            raise AssertionError(f"ind1({k}) child mismatch at {d.target}")
        val = kids[0]
    elif rule == "ind2":
        m_node, base = d.children
        r = _r_of(d.target)
        if _r_of(base.target) != r or _m_of(d.target) != kids[0]:
            raise AssertionError(f"ind2 child mismatch at {d.target}")
        val = (r + 1) * kids[0] + kids[1]
    elif rule == "d2":
        if _r_of(d.target) != 2:
            raise AssertionError("d2 applies to pairs only")
        val = 2 * kids[0] + D2_CONST
    else:
        raise AssertionError(f"unknown rule {rule}")
    if val != d.value:
        raise AssertionError(f"{d.target}: stored {d.value}, recomputed {val}")
    return val


def _r_of(target: str) -> int:
    return int(target[5:].split(",")[0].rstrip(")"))


def _m_of(target: str) -> int | None:
    if "m=" not in target:
        return None
    return int(target.split("m=")[1].rstrip(")"))


# ---------------------------------------------------------------------------


def martin_bound(r: int) -> int:
    """2r^2 (r even), 2r^2 + 2 (r odd): the estimate from ind1(r-2) and ind2 alone."""
    return 2 * r * r + (2 if r % 2 else 0)


def closed_form(r: int) -> int | None:
    """2r^2 - 16 (even r >= 6), 2r^2 - 14 (odd r >= 7)."""
    if r >= 6 and r % 2 == 0:
        return 2 * r * r - 16
    if r >= 7 and r % 2 == 1:
        return 2 * r * r - 14
    return None


@dataclass(frozen=True)
class BoundRow:
    r: int
    lower: int
    upper: int
    rule: str
    martin: int

    def bracket(self) -> str:
        if self.lower == self.upper:
            return f"beta({self.r};Qp) = {self.upper}"
        return f"{self.lower} <= beta({self.r};Qp) <= {self.upper}"

    def as_dict(self) -> dict:
        return {"r": self.r, "lower": self.lower, "upper": self.upper, "rule": self.rule, "martin": self.martin}


def bound_table(r_max: int) -> list[BoundRow]:
    if not 1 <= r_max <= R_MAX:
        raise ValueError(f"r_max must lie in 1..{R_MAX}")
    t = _tab(r_max)
    return [BoundRow(r, 4 * r, int(t.U[r]), t.rule[r], martin_bound(r)) for r in range(1, r_max + 1)]


ANNOTATIONS = (
    "conditional: beta(r;K) = 4r for a finite extension K of Q_p whose residue field has at least (2r)^r elements",
    "conditional: beta(1;Q_p(T_1,...,T_k)) = 2^(2+k)",
)
