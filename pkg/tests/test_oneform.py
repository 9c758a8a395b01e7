import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import FieldMismatch, ZeroArgument
from quadsys.fields import FieldDesc, determinant
from quadsys.formlang import parse_form
from quadsys.forms import QuadraticForm, evaluate, substitute
from quadsys.oneform import (
    anisotropic_quaternary,
    block_witness,
    diagonalize,
    form_invariants,
    hilbert_symbol,
    is_isotropic_qp,
    is_square_qp,
    isotropy_oracle,
    least_nonresidue,
    primitive_zeros_mod,
    square_class,
)

PRIMES = [2, 3, 5, 7]
nonzero = st.integers(-200, 200).filter(bool)


def test_known_symbols():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(3, 2, 3) == -1
    assert hilbert_symbol(2, 5, 5) == -1
    assert hilbert_symbol(Fraction(1, 3), 2, 3) == -1
    with pytest.raises(ZeroArgument):
        hilbert_symbol(0, 1, 3)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), nonzero, nonzero, nonzero)
def test_symbol_symmetry_and_bilinearity(p, a, b, c):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
    assert hilbert_symbol(a, b * c, p) == hilbert_symbol(a, b, p) * hilbert_symbol(a, c, p)
    assert hilbert_symbol(a, -a, p) == 1
    assert hilbert_symbol(a, b * b, p) == 1
    if a != 1:
        assert hilbert_symbol(a, 1 - a, p) == 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(PRIMES), nonzero, nonzero)
def test_symbol_agrees_with_conic_search(p, a, b):
    # (a, b)_p = 1 iff a x^2 + b y^2 - z^2 is isotropic
    q = QuadraticForm(FieldDesc.padic(p), 3, {(0, 0): a, (1, 1): b, (2, 2): -1})
    assert (hilbert_symbol(a, b, p) == 1) == isotropy_oracle(q).isotropic


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), nonzero, nonzero)
def test_square_classes(p, a, b):
    assert is_square_qp(a * a, p)
    assert square_class(a * b * b, p) == square_class(a, p)
    assert is_square_qp(a, p) == (square_class(a, p) == 1)


def test_square_class_representatives():
    assert least_nonresidue(7) == 3
    assert square_class(14, 7) == 7  # 2 = 3^2 mod 7
    assert square_class(21, 7) == 21
    assert square_class(-1, 2) == 7
    assert is_square_qp(17, 2) and not is_square_qp(5, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(0, 2**32))
def test_diagonalization_replays(p, n, seed):
    rng = random.Random(seed)
    Q = FieldDesc.padic(p)
    q = QuadraticForm(Q, n, {(i, j): rng.randint(-6, 6) for i in range(n) for j in range(i, n)})
    d, M = diagonalize(q)
    assert substitute(q, M) == QuadraticForm(Q, n, {(i, i): a for i, a in enumerate(d)})
    inv = form_invariants(q)
    assert inv.hasse == inv.recompute_hasse()


def test_diagonalize_hyperbolic_plane():
    d, M = diagonalize(parse_form("x1*x2 + x3^2", FieldDesc.padic(3), 3))
    assert sorted(d) == [Fraction(-1, 4), 1, 1]


def _random_form(p, n, rng):
    return QuadraticForm(FieldDesc.padic(p), n, {(i, j): rng.randint(-p * p, p * p) for i in range(n) for j in range(i, n)})


def _unimodular(n, p, rng):
    while True:
        M = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        det = determinant(FieldDesc.padic(p), [[Fraction(v) for v in r] for r in M])
        if det != 0 and det.numerator % p != 0:
            return M


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(0, 2**32))
def test_isotropy_invariant_under_equivalence_and_scaling(p, n, seed):
    rng = random.Random(seed)
    q = _random_form(p, n, rng)
    base = is_isotropic_qp(q).isotropic
    assert is_isotropic_qp(substitute(q, _unimodular(n, p, rng))).isotropic == base
    scale = Fraction(rng.choice([1, -1, 3, 5, 7])) * Fraction(p) ** rng.randint(-2, 2)
    assert is_isotropic_qp(q.scale(scale)).isotropic == base


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(0, 2**32))
def test_criteria_match_oracle(p, n, seed):
    q = _random_form(p, n, random.Random(seed))
    res = isotropy_oracle(q)
    assert is_isotropic_qp(q).isotropic == res.isotropic
    if res.witness is not None and res.depth == 0:
        assert evaluate(q, [Fraction(v) for v in res.witness]) == 0


@pytest.mark.parametrize("p", PRIMES)
def test_anisotropic_quaternary(p):
    q = anisotropic_quaternary(p)
    dec = is_isotropic_qp(q)
    assert not dec and "rank 4" in dec.reason
    assert not isotropy_oracle(q).isotropic
    # adding any fifth variable makes it isotropic
    assert is_isotropic_qp(QuadraticForm(q.field, 5, {**q.coeffs, (4, 4): 1}))


def test_degenerate_forms_are_isotropic():
    q = parse_form("x1^2 + x2^2", FieldDesc.padic(3), 3)
    assert is_isotropic_qp(q) and "degenerate" in is_isotropic_qp(q).reason
    res = isotropy_oracle(q)
    assert res.isotropic and evaluate(q, [Fraction(v) for v in res.witness]) == 0


def test_block_witness():
    S = block_witness(3, 5)
    assert S.n == 12 and S.r == 3
    assert all(len(q.variables()) == 4 for q in S.forms)
    assert {tuple(q.variables()) for q in S.forms} == {(0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11)}
    with pytest.raises(ValueError):
        block_witness(0, 5)


def test_primitive_zero_counts():
    # anisotropic: primitive zeros die out once j exceeds the oracle depth bound
    assert [primitive_zeros_mod(anisotropic_quaternary(3), 3, j) for j in (1, 2, 3)] == [8, 0, 0]
    # unit diagonal, odd p: each primitive zero mod p has p^(n-1) lifts
    r = parse_form("x1^2 + x2^2 + 2*x3^2", FieldDesc.padic(5), 3)
    counts = [primitive_zeros_mod(r, 5, j) for j in (1, 2, 3)]
    assert counts[1] == 25 * counts[0] and counts[2] == 25 * counts[1]


def test_requires_padic_form():
    with pytest.raises(FieldMismatch):
        is_isotropic_qp(parse_form("x1*x2", FieldDesc.prime(3), 2))
