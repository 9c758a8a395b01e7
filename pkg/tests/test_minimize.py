import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import DegenerateSystem, FieldMismatch, PreconditionViolated, WitnessInvalid
from quadsys.fields import FieldDesc, determinant
from quadsys.formlang import parse_form, parse_forms
from quadsys.forms import FormSystem, QuadraticForm, TransformPair, is_integral, radical_and_rank, reduce_mod_p
from quadsys.minimize import (
    COMPLIANT,
    IMPROVING,
    NEUTRAL,
    check_transform,
    classify,
    gaussian_binomial,
    is_Fq_minimized,
    minimize_heuristic,
    primitive_model,
    radical_scaling,
    witness_to_transform,
)
from quadsys.subspace import vanishes_on

F3 = FieldDesc.prime(3)
Q3 = FieldDesc.padic(3)


def test_gaussian_binomial_values():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(3, 2, 2) == 7
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(5, 0, 7) == 1


def test_classify():
    assert classify(5, 1, -1, 0) == (IMPROVING, -2)
    assert classify(4, 1, 2, -1) == (NEUTRAL, 0)
    assert classify(9, 1, 2, -1) == (IMPROVING, -5)
    assert classify(3, 1, 2, -1) == (COMPLIANT, 1)


def test_not_minimized_witness():
    S = FormSystem([parse_form("x1^2", F3, 3)])
    v = is_Fq_minimized(S)
    assert v.minimized is False and v.k == 1
    assert v.V.dim == 1 and vanishes_on(S, v.V)


def test_minimized_examples():
    S = FormSystem([parse_form("x1^2 + x2^2 + x3*x4", F3, 5)])
    v = is_Fq_minimized(S)
    assert v.minimized is True and v.certified
    assert [s[2] for s in v.searches] == [3]


def test_minimized_preconditions():
    with pytest.raises(FieldMismatch):
        is_Fq_minimized(parse_forms(["x1*x2"], Q3, 2))
    S = FormSystem([parse_form("x1*x2", F3, 2)] * 5)
    with pytest.raises(PreconditionViolated):
        is_Fq_minimized(S)


def _unimodular(n, rng):
    while True:
        M = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if abs(determinant(Q3, M)) == 1:
            return M


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 2), st.integers(0, 2**32))
def test_unimodular_transforms_are_neutral(n, r, seed):
    rng = random.Random(seed)
    S = FormSystem(QuadraticForm(Q3, n, {(i, j): rng.randint(-9, 9) for i in range(n) for j in range(i, n)}) for _ in range(r))
    M = _unimodular(n, rng)
    P = _unimodular(r, rng)
    chk = check_transform(S, TransformPair.make(3, M, P))
    assert chk.classification == NEUTRAL and chk.score == 0
    assert chk.integral == is_integral(S)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_score_is_additive_under_composition(seed):
    rng = random.Random(seed)
    n = 3
    S = FormSystem([QuadraticForm(Q3, n, {(i, j): rng.randint(-9, 9) for i in range(n) for j in range(i, n)})])

    def rand_pair():
        M = [[Fraction(rng.choice((1, 3, Fraction(1, 3)))) if i == j else Fraction(rng.randint(0, 1) * (i < j)) for j in range(n)] for i in range(n)]
        return TransformPair.make(3, M, [[Fraction(rng.choice((1, 3, 9, Fraction(1, 3))))]])

    A, B = rand_pair(), rand_pair()
    sa = check_transform(S, A).score
    sb = check_transform(A.apply(S), B).score
    assert check_transform(S, A.then(B)).score == sa + sb


def test_check_transform_requires_padic():
    with pytest.raises(FieldMismatch):
        check_transform(FormSystem([parse_form("x1*x2", F3, 2)]), TransformPair.identity(3, 2, 1))


def test_q3_example_transform():
    S = FormSystem([parse_form("x1^2 + x2^2 + x3*x4 + 9*x5^2", Q3, 5)])
    M = [[Fraction(int(i == j), 3 if i == 4 else 1) for j in range(5)] for i in range(5)]
    chk = check_transform(S, TransformPair.make(3, M, [[1]]))
    assert chk.integral and chk.classification == IMPROVING
    assert chk.explain(5, 1) == "5*0 + 2*-1 = -2 < 0"
    assert chk.transformed.forms[0] == parse_form("x1^2 + x2^2 + x3*x4 + x5^2", Q3, 5)


def test_witness_transform_scales_pairs_of_variables():
    Q5 = FieldDesc.padic(5)
    S = FormSystem([parse_form("x1*x2 + 5*x3^2 + 5*x4^2 + 5*x5^2 + 25*x1*x5", Q5, 5)])
    v = is_Fq_minimized(reduce_mod_p(S))
    assert v.minimized is False and v.k == 1
    T = witness_to_transform(S, v)
    chk = check_transform(S, T)
    assert chk.integral and chk.classification == IMPROVING
    assert (T.vM, T.vP) == (2, -1)


def test_witness_requires_negative_verdict():
    S = FormSystem([parse_form("x1^2 + x2^2 + x3*x4", Q3, 5)])
    with pytest.raises(WitnessInvalid):
        witness_to_transform(S, is_Fq_minimized(reduce_mod_p(S)))


def test_radical_scaling():
    S = FormSystem([parse_form("9*x1^2 + x2*x3", Q3, 3)])
    T = radical_scaling(S)
    assert T is not None and T.vM == -1 and T.vP == 0
    out = T.apply(S)
    assert is_integral(out)
    assert radical_and_rank(reduce_mod_p(out).forms[0])[1] == 3
    assert radical_scaling(FormSystem([parse_form("x1^2 + x2*x3", Q3, 3)])) is None


def test_radical_scaling_skips_exact_radical():
    # x3 is absent: scaling it forever would never terminate
    S = FormSystem([parse_form("x1*x2", Q3, 3)])
    assert radical_scaling(S) is None


def test_primitive_model():
    S = parse_forms(["9*x1*x2 + 27*x3^2", "1/3*x1^2"], Q3, 3)
    model, T = primitive_model(S)
    assert model.forms[0] == parse_form("x1*x2 + 3*x3^2", Q3, 3)
    assert model.forms[1] == parse_form("x1^2", Q3, 3)
    assert T.vP == -2 + 1 and T.vM == 0


def test_minimize_q3_example():
    S = FormSystem([parse_form("x1^2 + x2^2 + x3*x4 + 9*x5^2", Q3, 5)])
    res = minimize_heuristic(S)
    assert res.converged and len(res.log) == 1
    assert res.model.forms[0] == parse_form("x1^2 + x2^2 + x3*x4 + x5^2", Q3, 5)
    assert res.total.apply(S) == res.model


def test_minimize_witness_loop():
    Q5 = FieldDesc.padic(5)
    S = FormSystem([parse_form("x1*x2 + 5*x3^2 + 5*x4^2 + 5*x5^2 + 25*x1*x5", Q5, 5)])
    res = minimize_heuristic(S)
    assert res.converged and len(res.log) == 3
    assert all((T.vM, T.vP) == (2, -1) for T in res.log)
    assert res.total.apply(S) == res.model
    assert is_Fq_minimized(reduce_mod_p(res.model)).minimized is True


def test_minimize_normalization_only():
    S = FormSystem([parse_form("25*x1*x2", FieldDesc.padic(5), 2)])
    res = minimize_heuristic(S)
    assert res.converged and not res.log and res.normalization.vP == -2


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32))
def test_minimize_steps_always_improve(p, seed):
    rng = random.Random(seed)
    Q = FieldDesc.padic(p)
    n = rng.randint(3, 6)
    c = {(i, j): rng.choice((0, 1, p, p * p, rng.randint(1, 50))) for i in range(n) for j in range(i, n)}
    c[(0, 0)] = 1
    S = FormSystem([QuadraticForm(Q, n, c)])
    res = minimize_heuristic(S, max_iter=8)
    model = res.normalization.apply(S)
    for T in res.log:
        chk = check_transform(model, T)
        assert chk.integral and chk.classification == IMPROVING
        model = chk.transformed
    assert model == res.model == res.total.apply(S)


def test_minimize_rejects_degenerate_input():
    with pytest.raises(DegenerateSystem):
        minimize_heuristic(parse_forms(["x1*x2", "0"], Q3, 2))
    with pytest.raises(FieldMismatch):
        minimize_heuristic(parse_forms(["x1*x2"], F3, 2))
