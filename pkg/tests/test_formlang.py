import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quadsys.errors import BadField, FormatError, NonHomogeneous, QFSSyntaxError, UnknownVariable
from quadsys.fields import FieldDesc
from quadsys.formlang import (
    SystemDocument,
    format_basis,
    parse_basis,
    parse_form,
    parse_ft_system,
    parse_system,
    serialize_forms,
    serialize_system,
)
from quadsys.forms import FormSystem, QuadraticForm, random_form

DOC = """# the first form of a counterexample
field Fq 2
vars 4
form q1 = x1*x2 + x3^2 + x3*x4 + x4^2
"""


def test_parse_basic_document():
    doc = parse_system(DOC)
    assert doc.field == FieldDesc.prime(2)
    assert doc.n == 4 and doc.names == ["q1"]
    assert doc.forms["q1"].coeffs == {(0, 1): 1, (2, 2): 1, (2, 3): 1, (3, 3): 1}
    assert doc.comments == ("the first form of a counterexample",)


def test_serialize_is_canonical():
    doc = parse_system(DOC)
    s = serialize_system(doc)
    assert s.splitlines()[1:] == ["field Fq 2", "vars 4", "form q1 = 1*x1*x2 + 1*x3^2 + 1*x3*x4 + 1*x4^2"]
    assert serialize_system(parse_system(s)) == s


@pytest.mark.parametrize(
    "header, field",
    [
        ("field Fq 7", FieldDesc.prime(7)),
        ("field Fq 9 poly=2,2,1", FieldDesc.extension(3, [2, 2, 1])),
        ("field Fq 8", FieldDesc.gf(8)),
        ("field Qp 5 prec=12", FieldDesc.padic(5, 12)),
        ("field Qp 3", FieldDesc.padic(3, 20)),
        ("field Zpk 2 3", FieldDesc.mod_pk(2, 3)),
    ],
)
def test_headers(header, field):
    assert parse_system(f"{header}\nvars 2\nform q = x1*x2\n").field == field


def test_coefficient_arithmetic():
    Q = FieldDesc.padic(3)
    q = parse_form("1/2*x1^2 - 3*x1*x2 + 2*3*x2^2 - x2^2", Q, 2)
    assert q.coeffs == {(0, 0): Fraction(1, 2), (0, 1): -3, (1, 1): 5}
    F9 = FieldDesc.extension(3, [2, 2, 1])
    q9 = parse_form("(t+1)*x1^2 + t^2*x2^2", F9, 2)
    assert q9.coeff(0, 0) == F9.from_coeffs([1, 1])
    assert q9.coeff(1, 1) == F9.from_coeffs([0, 0, 1])
    assert parse_form("0", FieldDesc.prime(3), 3).is_zero()
    assert parse_form("4*x1^2", FieldDesc.prime(3), 1).coeffs == {(0, 0): 1}


def test_rational_coefficient_over_finite_field():
    F = FieldDesc.prime(5)
    assert parse_form("1/2*x1^2", F, 1).coeff(0, 0) == 3


@pytest.mark.parametrize(
    "text, cls, line, col",
    [
        ("field Fq 3\nvars 2\nform q = x1^2 + x3^2\n", UnknownVariable, 3, 17),
        ("field Fq 3\nvars 2\nform q = x1 + x2^2\n", NonHomogeneous, 3, 10),
        ("field Fq 3\nvars 2\nform q = x1^3\n", NonHomogeneous, 3, 10),
        ("field Fq 6\nvars 2\nform q = x1^2\n", BadField, 1, 10),
        ("field Fq 3\nvars 2\nform q = x1^2 +\n", QFSSyntaxError, 3, 16),
        ("vars 2\nform q = x1^2\n", QFSSyntaxError, 1, 1),
        ("field Fq 3\nvars 2\nform q = x1^2\nform q = x2^2\n", QFSSyntaxError, 4, 6),
        ("field Fq 3\nvars 2\nform q = 1/3*x1^2\n", QFSSyntaxError, 3, 10),
        ("field Fq 4 poly=1,0,1\nvars 2\nform q = x1^2\n", BadField, 1, 10),
    ],
)
def test_positioned_errors(text, cls, line, col):
    with pytest.raises(cls) as info:
        parse_system(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_comment_after_header_is_ignored():
    doc = parse_system("field Fq 3\n# note\nvars 2\nform q = x1^2  # trailing\n")
    assert doc.comments == () and doc.forms["q"].coeffs == {(0, 0): 1}


def test_ft_documents():
    doc = parse_ft_system("field Fq 3\nvars 2\nform f = x1^2 - T*x2^2 + (T^2+1)*x1*x2\n")
    f = doc.forms["f"]
    assert f.D == 2
    assert f.coeffs[(1, 1)] == (0, 2)
    assert f.coeffs[(0, 1)] == (1, 0, 1)
    s = serialize_system(doc)
    assert parse_ft_system(s).forms == doc.forms
    with pytest.raises(FormatError):
        parse_system("field Fq 3\nvars 2\nform f = T*x1^2\n")


def test_basis_format_roundtrip():
    vecs = [(1, 0, 2), (0, 1, 1)]
    assert parse_basis(format_basis(vecs)) == vecs


FIELDS = [FieldDesc.prime(2), FieldDesc.prime(5), FieldDesc.gf(4), FieldDesc.gf(27), FieldDesc.mod_pk(3, 2)]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FIELDS), st.integers(1, 7), st.integers(1, 3), st.integers(0, 2**32))
def test_roundtrip_finite(F, n, r, seed):
    rng = random.Random(seed)
    S = FormSystem(random_form(F, n, rng, density=rng.random()) for _ in range(r))
    text = serialize_forms(S)
    doc = parse_system(text)
    assert doc.system() == S
    assert serialize_system(doc) == text


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([2, 3, 7]),
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)),
        st.fractions(max_denominator=50).filter(lambda x: x != 0),
        max_size=8,
    ),
)
def test_roundtrip_rational(p, coeffs):
    Q = FieldDesc.padic(p)
    q = QuadraticForm(Q, 4, coeffs)
    doc = SystemDocument.from_system(FormSystem([q]))
    assert parse_system(serialize_system(doc)).forms == doc.forms


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="fieldFqQpvarsx0123456789=+-*^/() \n#tT,", max_size=80))
def test_garbage_never_crashes(text):
    try:
        parse_system(text)
    except FormatError as exc:
        assert exc.line >= 0 and exc.col >= 0
