import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import DimensionMismatch, NotAZero
from quadsys.fields import FieldDesc
from quadsys.formlang import parse_ft_system
from quadsys.ffred import (
    FTForm,
    first_degree_exceeding,
    polynomials_to_solution,
    reduce_ft_form,
    solution_to_polynomials,
)
from quadsys.zeros import enumerate_common_zeros


def _random_ft(F, n, D, rng):
    return FTForm(F, n, {(i, j): [F.random_element(rng) for _ in range(D + 1)] for i in range(n) for j in range(i, n) if rng.random() < 0.6})


def _pad(poly, length):
    return list(poly) + [0] * (length - len(poly))


@pytest.mark.parametrize("n, D, d", [(2, 0, 0), (3, 1, 2), (5, 2, 3), (9, 1, 4)])
def test_structure(n, D, d):
    F = FieldDesc.prime(3)
    f = FTForm(F, n, {(0, 0): [0] * D + [1], (0, 1): [1]})
    res = reduce_ft_form(f, d)
    assert res.N == n * (d + 1) == res.system.n
    assert res.R == 2 * d + f.D + 1 == res.system.r
    assert res.unknown(n - 1, d) == res.N - 1


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 2), st.integers(0, 3), st.integers(0, 2**32))
def test_compiled_forms_are_the_coefficients(p, n, D, d, seed):
    rng = random.Random(seed)
    F = FieldDesc.prime(p)
    f = _random_ft(F, n, D, rng)
    res = reduce_ft_form(f, d)
    c = [F.random_element(rng) for _ in range(res.N)]
    xs = [[c[res.unknown(i, e)] for e in range(d + 1)] for i in range(n)]
    assert list(res.system.evaluate(c)) == _pad(f.evaluate(xs), res.R)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2), st.integers(0, 1), st.integers(0, 2), st.integers(0, 2**32))
def test_zero_sets_correspond_f2(n, D, d, seed):
    rng = random.Random(seed)
    F = FieldDesc.prime(2)
    f = _random_ft(F, n, D, rng)
    res = reduce_ft_form(f, d)
    compiled = {z.point for z in enumerate_common_zeros(res.system).reports}
    direct = set()
    for coeffs in itertools.product(range(2), repeat=n * (d + 1)):
        xs = [coeffs[i * (d + 1) : (i + 1) * (d + 1)] for i in range(n)]
        if not f.evaluate(xs):
            direct.add(polynomials_to_solution(res, xs))
    assert compiled == direct


def test_solution_roundtrip(corpus):
    doc = parse_ft_system(corpus.text("ff-square.qfs"))
    f = doc.forms["f"]
    res = reduce_ft_form(f, 1)
    # x1 = T, x2 = 1
    c = polynomials_to_solution(res, [(0, 1), (1,)])
    assert solution_to_polynomials(res, c) == [(0, 1), (1,)]
    with pytest.raises(NotAZero):
        solution_to_polynomials(res, polynomials_to_solution(res, [(1,), (0,)]))
    with pytest.raises(DimensionMismatch):
        polynomials_to_solution(res, [(0, 0, 1), (1,)])


def test_nonsquare_has_only_trivial_low_degree_zero(corpus):
    f = parse_ft_system(corpus.text("ff-nonsquare.qfs")).forms["f"]
    res = reduce_ft_form(f, 1)
    en = enumerate_common_zeros(res.system)
    assert en.count == 1 and en.exhaustive


def test_evaluate_matches_manual_product():
    F = FieldDesc.prime(3)
    f = FTForm(F, 2, {(0, 0): [1], (1, 1): [0, 0, 2]})  # x1^2 - T^2 x2^2
    assert f.evaluate([(0, 1), (1,)]) == ()
    assert f.evaluate([(1,), (1,)]) == (1, 0, 2)
    with pytest.raises(DimensionMismatch):
        f.evaluate([(1,)])


def test_first_degree_exceeding():
    assert first_degree_exceeding(9, 1) == 0
    assert first_degree_exceeding(9, 2) == 4  # 9(d+1) > 4(2d+3) first at d = 4
    assert first_degree_exceeding(8, 1) is None
    for n in range(9, 30):
        for D in range(4):
            d = first_degree_exceeding(n, D)
            assert n * (d + 1) > 4 * (2 * d + D + 1)
            assert d == 0 or n * d <= 4 * (2 * d + D - 1)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        reduce_ft_form(FTForm(FieldDesc.prime(3), 1, {(0, 0): [1]}), -1)
