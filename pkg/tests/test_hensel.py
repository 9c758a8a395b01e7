import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import FieldMismatch, NonIntegral, NotAZero, SingularSeed
from quadsys.fields import FieldDesc, valuation
from quadsys.formlang import parse_form, parse_forms
from quadsys.forms import FormSystem, QuadraticForm, evaluate
from quadsys.hensel import NO_SEED, SOLVED, PadicVector, lift_nonsingular, padic_solve

Q5 = FieldDesc.padic(5)


def _is_zero_mod(S, coords, p, k):
    x = [Fraction(c) for c in coords]
    return all(evaluate(q, x) == 0 or valuation(evaluate(q, x), p) >= k for q in S.forms)


def test_lift_simple_conic():
    S = parse_forms(["x1^2 + x2^2 + x3^2"], FieldDesc.padic(7), 3)
    vec = lift_nonsingular(S, (1, 2, 3), 10)
    assert _is_zero_mod(S, vec.coords, 7, 10)
    assert vec.seed == (1, 2, 3) and vec.iterations == 4  # 1 -> 2 -> 4 -> 8 -> 10
    exact = parse_forms(["x1^2 + x2^2 - 2*x3^2"], FieldDesc.padic(7), 3)
    assert lift_nonsingular(exact, (1, 1, 1), 10).iterations == 0


def test_lift_square_root_of_two_mod_7():
    # x1^2 - 2 x2^2 with x2 = 1 forces x1 to be a 7-adic sqrt(2)
    S = parse_forms(["x1^2 - 2*x2^2"], FieldDesc.padic(7), 2)
    vec = lift_nonsingular(S, (3, 1), 8)
    assert vec.coords[1] == 1
    assert (vec.coords[0] ** 2 - 2) % 7**8 == 0


def test_lift_is_deterministic():
    S = parse_forms(["x1*x2 + 5*x3^2 + x3*x4", "x1^2 - x2^2 - x3^2 + 5*x4^2"], Q5, 4)
    a = lift_nonsingular(S, (1, 0, 1, 0), 12)
    b = lift_nonsingular(S, (1, 0, 1, 0), 12)
    assert a == b
    assert _is_zero_mod(S, a.coords, 5, 12)


def test_lift_errors():
    S = parse_forms(["x1^2 + x2^2 - 2*x3^2"], FieldDesc.padic(7), 3)
    with pytest.raises(NotAZero):
        lift_nonsingular(S, (1, 0, 0), 5)
    with pytest.raises(SingularSeed):
        lift_nonsingular(S, (0, 0, 0), 5)
    cusp = parse_forms(["x1^2"], FieldDesc.padic(7), 2)
    with pytest.raises(SingularSeed):
        lift_nonsingular(cusp, (0, 1), 5)
    with pytest.raises(NonIntegral):
        lift_nonsingular(parse_forms(["1/7*x1*x2"], FieldDesc.padic(7), 2), (1, 0), 5)
    with pytest.raises(FieldMismatch):
        lift_nonsingular(parse_forms(["x1*x2"], FieldDesc.prime(7), 2), (1, 0), 5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]), st.integers(2, 5), st.integers(1, 30), st.integers(0, 2**32))
def test_lift_reaches_requested_precision(p, n, k, seed):
    rng = random.Random(seed)
    # x1*x2 + p*(rest) always has the nonsingular seed (1, 0, ..., 0)
    c = {(i, j): p * rng.randint(-5, 5) for i in range(n) for j in range(i, n)}
    c[(0, 1)] = 1 + p * rng.randint(-5, 5)
    S = FormSystem([QuadraticForm(FieldDesc.padic(p), n, c)])
    vec = lift_nonsingular(S, (1,) + (0,) * (n - 1), k)
    assert _is_zero_mod(S, vec.coords, p, k)
    assert all(0 <= c < p**k for c in vec.coords)


def test_padic_vector_validation_and_digits():
    v = PadicVector(3, 3, (5, 9 + 1), (2, 1))
    assert v.digits() == ["012", "101"]
    with pytest.raises(ValueError):
        PadicVector(3, 2, (9, 1), (0, 1))
    with pytest.raises(ValueError):
        PadicVector(3, 2, (1, 1), (2, 1))
    with pytest.raises(ValueError):
        PadicVector(3, 2, (3, 6), (0, 0))
    big = PadicVector(37, 2, (38,), (1,))
    assert big.digits() == ["1.1"]
    assert big.as_dict()["precision"] == 2


def test_solve_hyperbolic(corpus):
    S = corpus.system("hyperbolic.qfs")
    res = padic_solve(S, k=15)
    assert res.status == SOLVED and res.certified
    assert _is_zero_mod(S, res.vector.coords, 5, 15)
    assert any(c % 5 for c in res.vector.coords)


def test_solve_through_minimization(corpus):
    S = corpus.system("q3-unminimized.qfs")
    res = padic_solve(S, k=10)
    assert res.status == SOLVED
    assert _is_zero_mod(S, res.vector.coords, 3, 10)
    assert _is_zero_mod(res.minimization.model, res.model_vector.coords, 3, 10)


@pytest.mark.parametrize("name, p", [("q3-anisotropic.qfs", 3), ("q3-blocks.qfs", 3), ("q5-anisotropic.qfs", 5)])
def test_no_seed_for_anisotropic(corpus, name, p):
    res = padic_solve(corpus.system(name))
    assert res.status == NO_SEED and res.certified
    assert "does not prove" in res.reason
    assert res.vector is None and res.as_dict()["status"] == NO_SEED


def test_solve_field_checks():
    with pytest.raises(FieldMismatch):
        padic_solve(parse_forms(["x1*x2"], Q5, 2), p=3)
    with pytest.raises(FieldMismatch):
        padic_solve(FormSystem([parse_form("x1*x2", FieldDesc.prime(5), 2)]))
