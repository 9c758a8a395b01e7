"""The ``.qfs`` text format for systems of quadratic forms.

Example::

    # the first form of the F_2 counterexample
    field Fq 2
    vars 4
    form q1 = x1*x2 + x3^2 + x3*x4 + x4^2

Header variants::

    field Fq <p or q> [poly=c0,c1,...,ce]   # extension modulus, constant term first
    field Qp <p> [prec=<k>]
    field Zpk <p> <k>

Coefficients may be integers, fractions ``a/b`` or parenthesized polynomials.
Extension-field documents write field elements as polynomials in ``t``;
function-field documents (see :func:`parse_ft_system`) additionally allow
polynomials in ``T``.  Every term must have total x-degree exactly 2; the
single token ``0`` denotes the zero form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadField, BadFieldSpec, FormatError, NonHomogeneous, NonUnit, QFSSyntaxError, UnknownVariable
from .fields import EXTENSION, MODPK, PADIC, PRIME, FieldDesc, is_prime, prime_power
from .ffred import FTForm
from .forms import FormSystem, QuadraticForm

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<word>[A-Za-z_][A-Za-z_0-9]*)|(?P<sym>[-+*/^()=,]))")
_MAX_EXP = 1000
_MAX_VARS = 10**6


@dataclass
class SystemDocument:
    """Parsed ``.qfs`` document: header, named forms (in file order), comments."""

    field: FieldDesc
    n: int
    forms: dict = field(default_factory=dict)
    comments: tuple = ()

    def system(self) -> FormSystem:
        return FormSystem(self.forms.values())

    @property
    def names(self) -> list[str]:
        return list(self.forms)

    @classmethod
    def from_system(cls, S: FormSystem, names=None, comments=()) -> SystemDocument:
        names = list(names) if names else [f"q{i + 1}" for i in range(S.r)]
        return cls(S.field, S.n, dict(zip(names, S.forms)), tuple(comments))


# ---------------------------------------------------------------------------
# tokenizer


class _Tok:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind, text, col):
        self.kind, self.text, self.col = kind, text, col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.col}"


def _tokenize(line: str, lineno: int, offset: int = 0) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _TOKEN.match(line, pos)
        if not m:
            col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
            raise QFSSyntaxError(f"unexpected character {line[col - 1]!r}", lineno, col + offset)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind) + 1 + offset))
        pos = m.end()
    return toks


# ---------------------------------------------------------------------------
# polynomial coefficient algebra: dict (T-degree, t-degree) -> Fraction


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (T1, t1), x in a.items():
        for (T2, t2), y in b.items():
            key = (T1 + T2, t1 + t2)
            out[key] = out.get(key, 0) + x * y
    return {k: v for k, v in out.items() if v != 0}


def _padd(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v != 0}


class _ExprParser:
    def __init__(self, toks, lineno, n, allow_t, allow_T):
        self.toks, self.i, self.lineno = toks, 0, lineno
        self.n, self.allow_t, self.allow_T = n, allow_t, allow_T

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self):
        t = self.peek()
        if t is not None:
            return t.col
        return (self.toks[-1].col + len(self.toks[-1].text)) if self.toks else 1

    def error(self, msg, cls=QFSSyntaxError, col=None):
        raise cls(msg, self.lineno, col if col is not None else self.col())

    def take(self, text=None, kind=None):
        t = self.peek()
        if t is None or (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text or kind or "token"
            got = "end of line" if t is None else repr(t.text)
            self.error(f"expected {want}, got {got}")
        self.i += 1
        return t

    def accept(self, text):
        t = self.peek()
        if t is not None and t.text == text:
            self.i += 1
            return t
        return None

    def leading_sign(self):
        if self.accept("-"):
            return -1
        self.accept("+")
        return 1

    # expr := ["+"|"-"] term (("+"|"-") term)*
    def expr(self):
        """List of (coefficient poly, sorted variable tuple, column) terms."""
        terms = []
        sign = self.leading_sign()
        while True:
            col = self.col()
            coeff, vars_ = self.term()
            terms.append(({k: sign * v for k, v in coeff.items()}, vars_, col))
            t = self.peek()
            if t is None:
                break
            if t.text not in "+-" or t.kind != "sym":
                self.error(f"expected '+' or '-', got {t.text!r}")
            self.i += 1
            sign = 1 if t.text == "+" else -1
        return terms

    def term(self):
        coeff = {(0, 0): Fraction(1)}
        vars_ = []
        coeff, vars_ = self.factor(coeff, vars_)
        while self.accept("*"):
            coeff, vars_ = self.factor(coeff, vars_)
        return coeff, tuple(sorted(vars_))

    def exponent(self):
        if self.accept("^"):
            t = self.take(kind="int")
            e = int(t.text)
            if e > _MAX_EXP:
                self.error(f"exponent {e} too large", col=t.col)
            return e
        return 1

    def factor(self, coeff, vars_):
        t = self.peek()
        if t is None:
            self.error("expected a factor, got end of line")
        if t.kind == "int":
            self.i += 1
            val = Fraction(int(t.text))
            if self.accept("/"):
                d = self.take(kind="int")
                if int(d.text) == 0:
                    self.error("division by zero", col=d.col)
                val /= int(d.text)
            return _pmul(coeff, {(0, 0): val}), vars_
        if t.text == "(":
            self.i += 1
            inner = self.poly()
            self.take(")")
            e = self.exponent()
            for _ in range(e):
                coeff = _pmul(coeff, inner)
            return coeff, vars_
        if t.kind == "word":
            self.i += 1
            if t.text == "t" and self.allow_t:
                return _pmul(coeff, {(0, self.exponent()): Fraction(1)}), vars_
            if t.text == "T" and self.allow_T:
                return _pmul(coeff, {(self.exponent(), 0): Fraction(1)}), vars_
            m = re.fullmatch(r"x(\d+)", t.text)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    self.error(f"variable {t.text} outside x1..x{self.n}", UnknownVariable, t.col)
                e = self.exponent()
                if e > 2:
                    self.error(f"{t.text}^{e} has degree {e} > 2", NonHomogeneous, t.col)
                return coeff, vars_ + [idx - 1] * e
            self.error(f"unknown identifier {t.text!r}", col=t.col)
        self.error(f"unexpected {t.text!r}", col=t.col)

    # coefficient polynomial inside parentheses (no x variables)
    def poly(self):
        start = self.col()
        total: dict = {}
        sign = self.leading_sign()
        while True:
            c, v = self.term()
            if v:
                self.error("variables are not allowed inside a coefficient", col=start)
            total = _padd(total, c, sign)
            t = self.peek()
            if t is None or t.text not in ("+", "-"):
                break
            self.i += 1
            sign = 1 if t.text == "+" else -1
        return total


# ---------------------------------------------------------------------------


def _parse_header(toks, lineno) -> FieldDesc:
    if not toks or toks[0].text != "field":
        col = toks[0].col if toks else 1
        raise QFSSyntaxError("expected header 'field ...'", lineno, col)
    if len(toks) < 3:
        raise QFSSyntaxError("incomplete field header", lineno, toks[-1].col)
    kind, num = toks[1], toks[2]
    if num.kind != "int":
        raise QFSSyntaxError("expected an integer", lineno, num.col)
    val = int(num.text)
    rest = toks[3:]

    def option(name):
        if not rest:
            return None
        if rest[0].text != name or len(rest) < 3 or rest[1].text != "=":
            raise QFSSyntaxError(f"expected '{name}=...'", lineno, rest[0].col)
        items = rest[2:]
        nums = []
        for idx, t in enumerate(items):
            if idx % 2 == 0:
                if t.kind != "int":
                    raise QFSSyntaxError("expected an integer", lineno, t.col)
                nums.append(int(t.text))
            elif t.text != ",":
                raise QFSSyntaxError("expected ','", lineno, t.col)
        if len(items) % 2 == 0:
            raise QFSSyntaxError("dangling ','", lineno, items[-1].col)
        return nums

    try:
        if kind.text == "Fq":
            poly = option("poly")
            if poly is None:
                if is_prime(val):
                    return FieldDesc.prime(val)
                pe = prime_power(val)
                if pe is None:
                    raise BadField(f"{val} is not a prime power", lineno, num.col)
                return FieldDesc.gf(val)
            pe = prime_power(val)
            if pe is None:
                raise BadField(f"{val} is not a prime power", lineno, num.col)
            p, e = pe
            F = FieldDesc.extension(p, poly)
            if e > 1 and F.order != val:
                raise BadField(f"modulus degree does not match q = {val}", lineno, num.col)
            return F
        if kind.text == "Qp":
            prec = option("prec")
            if prec is not None and len(prec) != 1:
                raise QFSSyntaxError("prec takes one integer", lineno, rest[0].col)
            if not is_prime(val):
                raise BadField(f"{val} is not prime", lineno, num.col)
            return FieldDesc.padic(val, prec[0] if prec else 20)
        if kind.text == "Zpk":
            if len(rest) != 1 or rest[0].kind != "int":
                raise QFSSyntaxError("expected 'Zpk <p> <k>'", lineno, (rest[0] if rest else num).col)
            if not is_prime(val):
                raise BadField(f"{val} is not prime", lineno, num.col)
            return FieldDesc.mod_pk(val, int(rest[0].text))
    except BadFieldSpec as exc:
        raise BadField(str(exc), lineno, num.col) from None
    raise QFSSyntaxError(f"unknown field kind {kind.text!r}", lineno, kind.col)


def _to_element(F: FieldDesc, coeff: dict, lineno, col):
    """Convert a (t-degree -> Fraction) polynomial to a raw field value."""
    try:
        if F.kind == EXTENSION:
            deg = max(coeff, default=0)
            lst = [0] * (deg + 1)
            for td, v in coeff.items():
                lst[td] = FieldDesc.prime(F.p).embed(v)
            return F.from_coeffs(lst)
        if any(td for td in coeff):
            raise QFSSyntaxError("'t' is only allowed with an extension field header", lineno, col)
        v = coeff.get(0, Fraction(0))
        if F.kind == PADIC:
            return v
        return F.embed(v)
    except NonUnit:
        raise QFSSyntaxError(f"coefficient is undefined modulo {F.p}", lineno, col) from None


def _collect(F, n, terms, lineno, ft):
    """Sum parsed terms into a QuadraticForm (or FTForm)."""
    polys: dict = {}
    for coeff, vars_, col in terms:
        if len(vars_) != 2:
            if not vars_ and not coeff and len(terms) == 1:
                continue  # the zero form "0"
            raise NonHomogeneous(f"term has degree {len(vars_)}, expected 2", lineno, col)
        by_T: dict = {}
        for (Td, td), v in coeff.items():
            by_T.setdefault(Td, {})[td] = v
        acc = polys.setdefault(vars_, {})
        for Td, tpoly in by_T.items():
            val = _to_element(F, tpoly, lineno, col)
            acc[Td] = F.add(acc.get(Td, F.zero), val)
    if ft:
        c = {}
        for key, by_T in polys.items():
            deg = max(by_T, default=0)
            c[key] = [by_T.get(e, F.zero) for e in range(deg + 1)]
        return FTForm(F, n, c)
    return QuadraticForm(F, n, {key: by_T.get(0, F.zero) for key, by_T in polys.items()})


def _parse(text: str, ft: bool) -> SystemDocument:
    F = None
    n = None
    forms: dict = {}
    comments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if F is None:
                comments.append(stripped[1:].strip())
            continue
        line = raw.split("#", 1)[0]
        toks = _tokenize(line, lineno)
        if F is None:
            F = _parse_header(toks, lineno)
            continue
        if n is None:
            if len(toks) != 2 or toks[0].text != "vars" or toks[1].kind != "int":
                raise QFSSyntaxError("expected 'vars <n>'", lineno, toks[0].col)
            n = int(toks[1].text)
            if not 1 <= n <= _MAX_VARS:
                raise QFSSyntaxError(f"variable count {n} out of range", lineno, toks[1].col)
            continue
        if toks[0].text != "form":
            raise QFSSyntaxError("expected 'form <name> = <expr>'", lineno, toks[0].col)
        if len(toks) < 4 or toks[1].kind != "word" or toks[2].text != "=":
            col = toks[1].col if len(toks) > 1 else toks[0].col
            raise QFSSyntaxError("expected 'form <name> = <expr>'", lineno, col)
        name = toks[1].text
        if name in forms:
            raise QFSSyntaxError(f"duplicate form name {name!r}", lineno, toks[1].col)
        parser = _ExprParser(toks[3:], lineno, n, F.kind == EXTENSION, ft)
        terms = parser.expr()
        forms[name] = _collect(F, n, terms, lineno, ft)
    last = len(text.splitlines()) or 1
    if F is None:
        raise QFSSyntaxError("missing 'field' header", last, 1)
    if n is None:
        raise QFSSyntaxError("missing 'vars' line", last, 1)
    if not forms:
        raise QFSSyntaxError("document has no forms", last, 1)
    return SystemDocument(F, n, forms, tuple(comments))


def parse_system(text: str) -> SystemDocument:
    """Parse a ``.qfs`` document; errors carry line and column."""
    try:
        return _parse(text, ft=False)
    except FormatError:
        raise
    except RecursionError:
        raise QFSSyntaxError("expression nested too deeply", 0, 0) from None


def parse_ft_system(text: str) -> SystemDocument:
    """Parse a document whose coefficients may be polynomials in T (forms become FTForm)."""
    try:
        return _parse(text, ft=True)
    except FormatError:
        raise
    except RecursionError:
        raise QFSSyntaxError("expression nested too deeply", 0, 0) from None


def parse_form(expr: str, field: FieldDesc, n: int) -> QuadraticForm:
    """Convenience: parse a single expression over a given field."""
    return parse_system(f"{header_line(field)}\nvars {n}\nform q = {expr}\n").forms["q"]


def parse_forms(exprs, field: FieldDesc, n: int) -> FormSystem:
    return FormSystem(parse_form(e, field, n) for e in exprs)


# ---------------------------------------------------------------------------
# serialization


def header_line(F: FieldDesc) -> str:
    if F.kind == PRIME:
        return f"field Fq {F.p}"
    if F.kind == EXTENSION:
        return f"field Fq {F.order} poly=" + ",".join(str(c) for c in F.modulus)
    if F.kind == PADIC:
        return f"field Qp {F.p} prec={F.k}"
    if F.kind == MODPK:
        return f"field Zpk {F.p} {F.k}"
    raise ValueError(F.kind)


def _poly_str(coeffs, var: str) -> str:
    """Polynomial with int coefficients (constant first), highest degree first."""
    parts = []
    for d in range(len(coeffs) - 1, -1, -1):
        c = coeffs[d]
        if not c:
            continue
        mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return "+".join(parts) if parts else "0"


def _elem_str(F: FieldDesc, v) -> tuple[int, str]:
    """(sign, magnitude string) for a raw field value."""
    if F.kind == PADIC:
        v = Fraction(v)
        sign = -1 if v < 0 else 1
        return sign, str(abs(v))
    if F.kind == EXTENSION:
        cs = F.coeffs(v)
        if not any(cs[1:]):
            return 1, str(cs[0])
        return 1, f"({_poly_str(cs, 't')})"
    return 1, str(v)


def _mono(i: int, j: int) -> str:
    return f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"


def _form_terms(q) -> list[tuple[int, str]]:
    F = q.field
    out = []
    if isinstance(q, FTForm):
        for (i, j), poly in q.coeffs.items():
            if len(poly) == 1:
                sign, mag = _elem_str(F, poly[0])
            else:
                sign, mag = 1, "(" + _ft_poly_str(F, poly) + ")"
            out.append((sign, f"{mag}*{_mono(i, j)}"))
        return out
    for (i, j), v in q.coeffs.items():
        sign, mag = _elem_str(F, v)
        out.append((sign, f"{mag}*{_mono(i, j)}"))
    return out


def _ft_poly_str(F: FieldDesc, poly) -> str:
    parts = []
    for d in range(len(poly) - 1, -1, -1):
        c = poly[d]
        if c == 0:
            continue
        sign, mag = _elem_str(F, c)
        mono = "" if d == 0 else ("T" if d == 1 else f"T^{d}")
        body = mag if not mono else f"{mag}*{mono}"
        parts.append(("-" if sign < 0 else "+", body))
    s = ""
    for k, (sg, body) in enumerate(parts):
        s += (("-" if sg == "-" else "") if k == 0 else sg) + body
    return s


def form_expr(q) -> str:
    terms = _form_terms(q)
    if not terms:
        return "0"
    s = ("-" if terms[0][0] < 0 else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += (" - " if sign < 0 else " + ") + body
    return s


def serialize_system(doc: SystemDocument) -> str:
    """Canonical, byte-deterministic text (LF endings, single spaces)."""
    lines = [f"# {c}" if c else "#" for c in doc.comments]
    lines.append(header_line(doc.field))
    lines.append(f"vars {doc.n}")
    for name, q in doc.forms.items():
        lines.append(f"form {name} = {form_expr(q)}")
    return "\n".join(lines) + "\n"


def serialize_forms(S: FormSystem, names=None, comments=()) -> str:
    return serialize_system(SystemDocument.from_system(S, names, comments))


def format_basis(vectors) -> str:
    """Basis lines: ``basis 1 0 1 ...`` one per vector."""
    return "".join("basis " + " ".join(str(v) for v in vec) + "\n" for vec in vectors)


def parse_basis(text: str) -> list[tuple[int, ...]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "basis":
            raise QFSSyntaxError("expected 'basis'", lineno, 1)
        try:
            out.append(tuple(int(x) for x in parts[1:]))
        except ValueError:
            raise QFSSyntaxError("basis entries must be integers", lineno, 1) from None
    return out
