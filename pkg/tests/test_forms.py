import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import DimensionMismatch, FieldMismatch, NonIntegral, SingularTransform
from quadsys.fields import FieldDesc, mat_mul
from quadsys.formlang import parse_form, parse_forms
from quadsys.forms import (
    FormSystem,
    QuadraticForm,
    Subspace,
    TransformPair,
    apply_form_change,
    apply_variable_change,
    bilinear,
    evaluate,
    form_rank,
    is_integral,
    lift_to_rational,
    linear_combination,
    radical_and_rank,
    random_form,
    random_invertible,
    random_system,
    rank_distribution,
    reduce_effective_variables,
    reduce_mod_p,
    restrict,
    substitute,
)

SMALL = [FieldDesc.gf(q) for q in (2, 3, 4, 5, 7)]


def _matvec(F, M, x):
    return [sum_f(F, (F.mul(a, b) for a, b in zip(row, x))) for row in M]


def sum_f(F, it):
    s = F.zero
    for v in it:
        s = F.add(s, v)
    return s


def test_storage_merges_and_orders_monomials():
    F = FieldDesc.prime(3)
    q = QuadraticForm(F, 3, {(1, 0): 1, (0, 1): 1, (2, 2): 3})
    assert q.coeffs == {(0, 1): 2}
    assert q.variables() == [0, 1]
    with pytest.raises(DimensionMismatch):
        QuadraticForm(F, 2, {(0, 2): 1})


def test_gram_has_doubled_diagonal():
    F = FieldDesc.prime(5)
    q = parse_form("x1^2 + 3*x1*x2", F, 2)
    assert q.gram == [[2, 3], [3, 0]]
    F2 = FieldDesc.prime(2)
    assert parse_form("x1^2 + x1*x2", F2, 2).gram == [[0, 1], [1, 0]]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 4), st.integers(0, 2**32))
def test_substitute_commutes_with_evaluation(F, n, seed):
    rng = random.Random(seed)
    q = random_form(F, n, rng)
    m = rng.randint(1, 4)
    M = [[F.random_element(rng) for _ in range(m)] for _ in range(n)]
    qm = substitute(q, M)
    for _ in range(5):
        y = [F.random_element(rng) for _ in range(m)]
        assert evaluate(qm, y) == evaluate(q, _matvec(F, M, y))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 4), st.integers(0, 2**32))
def test_bilinear_is_polarization(F, n, seed):
    rng = random.Random(seed)
    q = random_form(F, n, rng)
    x = [F.random_element(rng) for _ in range(n)]
    y = [F.random_element(rng) for _ in range(n)]
    xy = [F.add(a, b) for a, b in zip(x, y)]
    assert bilinear(q, x, y) == F.sub(F.sub(evaluate(q, xy), evaluate(q, x)), evaluate(q, y))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 4), st.integers(0, 2**32))
def test_rank_is_invariant_under_invertible_change(F, n, seed):
    rng = random.Random(seed)
    q = random_form(F, n, rng, density=0.5)
    M = random_invertible(F, n, rng)
    assert form_rank(substitute(q, M)) == form_rank(q)


def _brute_radical(q):
    F = q.field
    out = []
    for v in itertools.product(range(F.order), repeat=q.n):
        if evaluate(q, v) != 0:
            continue
        if all(bilinear(q, v, e) == 0 for e in itertools.product(range(F.order), repeat=q.n)):
            out.append(v)
    return out


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(SMALL[:3]), st.integers(1, 3), st.integers(0, 2**32))
def test_radical_matches_brute_force(F, n, seed):
    rng = random.Random(seed)
    q = random_form(F, n, rng, density=0.5)
    rad, rk = radical_and_rank(q)
    brute = _brute_radical(q)
    assert len(brute) == F.order**rad.dim
    assert all(tuple(v) in {tuple(b) for b in brute} for v in rad.basis)
    assert rk == n - rad.dim


def test_char2_radical_excludes_nonsingular_kernel_vectors():
    F = FieldDesc.prime(2)
    # x1^2 has alternating kernel everything, but q(e1) = 1
    q = parse_form("x1^2 + x2^2", F, 2)
    rad, rk = radical_and_rank(q)
    assert rk == 1 and rad.basis == ((1, 1),)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 4), st.integers(0, 2**32))
def test_effective_variables_factorization(F, n, seed):
    rng = random.Random(seed)
    q = random_form(F, n, rng, density=0.5)
    m, B, qstar = reduce_effective_variables(q)
    assert m == form_rank(q) == qstar.n
    # q(B y) = q*(y_1..y_m)
    qb = substitute(q, B)
    assert qb == qstar.embed(n)


def test_transform_application_order():
    Q = FieldDesc.padic(3)
    S = parse_forms(["x1^2 + 9*x2^2", "x1*x2"], Q, 2)
    M = [[1, 0], [0, Fraction(1, 3)]]
    P = [[1, 0], [1, 3]]
    T = TransformPair.make(3, M, P)
    out = T.apply(S)
    assert out.forms[0] == parse_form("x1^2 + x2^2", Q, 2)
    assert out.forms[1] == parse_form("x1^2 + x2^2 + x1*x2", Q, 2)
    assert (T.vM, T.vP) == (-1, 1)
    assert T.recompute_valuations() == (-1, 1)


def test_transform_composition():
    rng = random.Random(1)
    Q = FieldDesc.padic(5)
    S = FormSystem([QuadraticForm(Q, 3, {(i, j): rng.randint(-9, 9) for i in range(3) for j in range(i, 3)})])
    A = TransformPair.make(5, [[1, 2, 0], [0, 5, 0], [0, 0, 1]], [[5]])
    B = TransformPair.make(5, [[1, 0, 0], [0, 1, 1], [0, 0, Fraction(1, 5)]], [[Fraction(1, 25)]])
    assert A.then(B).apply(S) == B.apply(A.apply(S))
    assert A.then(B).vM == A.vM + B.vM


def test_singular_transform_rejected():
    F = FieldDesc.prime(3)
    S = FormSystem([parse_form("x1*x2", F, 2)])
    with pytest.raises(SingularTransform):
        apply_variable_change(S, [[1, 1], [2, 2]])
    with pytest.raises(SingularTransform):
        apply_form_change(S, [[0]])
    with pytest.raises(SingularTransform):
        TransformPair.make(3, [[1, 0], [0, 0]], [[1]])


def test_linear_combination_and_restrict():
    F = FieldDesc.prime(3)
    S = parse_forms(["x1^2 + x2*x3", "x2^2 - x3^2"], F, 3)
    assert linear_combination(S, [1, 1]) == parse_form("x1^2 + x2^2 + x2*x3 - x3^2", F, 3)
    V = Subspace.span(F, 3, [[0, 1, 1]])
    R = restrict(S, V)
    assert R.n == 1 and [q.coeff(0, 0) for q in R.forms] == [1, 0]
    with pytest.raises(DimensionMismatch):
        linear_combination(S, [1])


def test_subspace_canonical_basis():
    F = FieldDesc.prime(5)
    V = Subspace.span(F, 3, [[1, 2, 0], [0, 0, 1]])
    W = Subspace.span(F, 3, [[1, 2, 3], [2, 4, 4]])
    assert V == W and V.is_echelon() and V.pivots == (0, 2)
    assert [1, 2, 0] in V and [0, 1, 0] not in V


def test_rank_distribution_counts_all_combinations():
    F = FieldDesc.prime(3)
    S = parse_forms(["x1^2 + x2^2", "x1*x2"], F, 2)
    hist = rank_distribution(S)
    assert sum(hist.values()) == 9
    assert hist[0] == 1


def test_integrality_and_reduction():
    Q = FieldDesc.padic(3)
    S = parse_forms(["x1^2 + 9*x2^2", "1/2*x1*x2"], Q, 2)
    assert is_integral(S)
    red = reduce_mod_p(S)
    assert red.forms[0] == parse_form("x1^2", FieldDesc.prime(3), 2)
    assert red.forms[1] == parse_form("2*x1*x2", FieldDesc.prime(3), 2)
    bad = parse_forms(["1/3*x1^2"], Q, 2)
    assert not is_integral(bad)
    with pytest.raises(NonIntegral):
        reduce_mod_p(bad)
    with pytest.raises(FieldMismatch):
        reduce_mod_p(red)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32))
def test_lift_then_reduce_is_identity(p, n, r, seed):
    S = random_system(FieldDesc.prime(p), n, r, random.Random(seed))
    assert reduce_mod_p(lift_to_rational(S)) == S


def test_variable_change_matches_matrix_product():
    rng = random.Random(3)
    F = FieldDesc.gf(9)
    q = random_form(F, 3, rng)
    A = random_invertible(F, 3, rng)
    B = random_invertible(F, 3, rng)
    assert substitute(substitute(q, A), B) == substitute(q, mat_mul(F, A, B))
