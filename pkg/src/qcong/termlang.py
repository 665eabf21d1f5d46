"""A small expression language for declaring summands in case files.

    term    := factor { ("*" | "/") factor }
    factor  := signpow | qpow | poch | qint | rational | "(" term ")"
             | "(1+qpow(" form "))"
    signpow := "(-1)^" atom
    qpow    := "qpow(" form ")"
    poch    := "poch(" form ";" form ";" form ")" [ "^" integer ]
    qint    := "[" form "]" [ "_q2" ] [ "^" integer ]

`poch(a; s; L)` denotes (q^a; q^s)_L.  Forms are polynomials in n, d, r, k
and any declared extra symbols; `/` inside a form divides by a monomial, so
exponents like 2*(n-r)*(n+r-d)/d are expressible and are checked to be
integers at evaluation time.  Exponent forms are limited to degree 2 in k
(degree 1 under (-1)^ and inside [.]), the Pochhammer length is usually the
literal k but any k-linear form is accepted (closed-form right sides need
lengths like (n-1)/d).  Whitespace is free; `#` starts a comment to end of
line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .polyring import RatFunc
from .qterms import (CaseParams, QValue, one_plus_qpow, poch_qv, q_pow,
                     qint_qv, sign_pow)


class TermSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnboundSymbol(TermSyntaxError):
    pass


class NonIntegerExponent(ValueError):
    pass


BASE_SYMBOLS = ("n", "d", "r", "k")


# ---------------------------------------------------------------------------
# forms: polynomials with rational coefficients over the bound symbols;
# monomials may carry negative exponents on non-k symbols (from division)

Monomial = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Form:
    terms: tuple[tuple[Monomial, Fraction], ...]  # sorted by monomial

    @staticmethod
    def const(c: Fraction) -> "Form":
        return Form((((), c),) if c else ())

    @staticmethod
    def var(name: str) -> "Form":
        return Form(((((name, 1),), Fraction(1)),))

    def __add__(self, other: "Form") -> "Form":
        acc = dict(self.terms)
        for m, c in other.terms:
            c2 = acc.get(m, Fraction(0)) + c
            if c2:
                acc[m] = c2
            else:
                acc.pop(m, None)
        return Form(tuple(sorted(acc.items())))

    def __neg__(self) -> "Form":
        return Form(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, other: "Form") -> "Form":
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                vars_: dict[str, int] = dict(m1)
                for v, e in m2:
                    vars_[v] = vars_.get(v, 0) + e
                m = tuple(sorted((v, e) for v, e in vars_.items() if e))
                c = acc.get(m, Fraction(0)) + c1 * c2
                if c:
                    acc[m] = c
                else:
                    acc.pop(m, None)
        return Form(tuple(sorted(acc.items())))

    def pow(self, e: int) -> "Form":
        out = Form.const(Fraction(1))
        for _ in range(e):
            out = out * self
        return out

    def degree_in(self, name: str) -> int:
        deg = 0
        for m, _ in self.terms:
            for v, e in m:
                if v == name:
                    deg = max(deg, e)
        return deg

    def is_free_of(self, name: str) -> bool:
        return all(v != name for m, _ in self.terms for v, _e in m)

    def evaluate(self, env: dict[str, int]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms:
            val = c
            for v, e in m:
                val *= Fraction(env[v]) ** e
            total += val
        return total

    def eval_int(self, env: dict[str, int]) -> int:
        v = self.evaluate(env)
        if v.denominator != 1:
            raise NonIntegerExponent(f"form {self} = {v} is not an integer")
        return int(v)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            numbits, denbits = [], []
            for v, e in m:
                (numbits if e > 0 else denbits).append(
                    v if abs(e) == 1 else f"{v}^{abs(e)}")
            cn, cd = abs(c.numerator), c.denominator
            if cn != 1 or not numbits:
                numbits.insert(0, str(cn))
            if cd != 1:
                denbits.insert(0, str(cd))
            s = "*".join(numbits) + "".join("/" + b for b in denbits)
            parts.append(("- " if c < 0 else "+ " if parts else "") + s)
        out = " ".join(parts)
        return out if not out.startswith("- ") else "-" + out[2:]


def _form_div(a: Form, b: Form, line: int, col: int) -> Form:
    if len(b.terms) != 1:
        raise TermSyntaxError("form division only by a monomial", line, col)
    (m, c), = b.terms
    inv = Form(((tuple((v, -e) for v, e in m), 1 / c),))
    out = a * inv
    for mono, _ in out.terms:
        for v, e in mono:
            if v == "k" and e < 0:
                raise TermSyntaxError("negative power of k in a form", line, col)
    return out


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class SignPow:
    exponent: Form

    def __str__(self):
        return f"(-1)^({self.exponent})"


@dataclass(frozen=True)
class QPow:
    exponent: Form

    def __str__(self):
        return f"qpow({self.exponent})"


@dataclass(frozen=True)
class OnePlusQPow:
    exponent: Form
    power: int = 1

    def __str__(self):
        s = f"(1+qpow({self.exponent}))"
        return s if self.power == 1 else f"{s}^{self.power}"


@dataclass(frozen=True)
class Poch:
    base: Form
    step: Form
    length: Form
    power: int = 1

    def __str__(self):
        s = f"poch({self.base}; {self.step}; {self.length})"
        return s if self.power == 1 else f"{s}^{self.power}"


@dataclass(frozen=True)
class QInt:
    arg: Form
    square: bool = False
    power: int = 1

    def __str__(self):
        s = f"[{self.arg}]" + ("_q2" if self.square else "")
        return s if self.power == 1 else f"{s}^{self.power}"


@dataclass(frozen=True)
class RationalConst:
    value: Fraction

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


Factor = SignPow | QPow | OnePlusQPow | Poch | QInt | RationalConst


@dataclass(frozen=True)
class TermAST:
    factors: tuple[Factor, ...]

    def __str__(self):
        return " * ".join(str(f) for f in self.factors) if self.factors else "1"


# ---------------------------------------------------------------------------
# lexer / parser

_TOKEN_RE = re.compile(r"\s*(?:(?P<comment>#[^\n]*)|(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
                       r"|(?P<sym>[()\[\];^*/+,\-]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(src: str) -> list[_Tok]:
    def linecol(at: int) -> tuple[int, int]:
        line = src.count("\n", 0, at) + 1
        return line, at - (src.rfind("\n", 0, at) + 1) + 1

    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m or m.end() == pos:
            rest = src[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            at = pos + len(rest) - len(stripped)
            raise TermSyntaxError(f"unexpected character {stripped[0]!r}",
                                  *linecol(at))
        if m.lastgroup != "comment":
            line, col = linecol(m.start(m.lastgroup))
            toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), line, col))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], symbols: tuple[str, ...]):
        self.toks = toks
        self.i = 0
        self.symbols = symbols

    def _err(self, msg: str):
        if self.i < len(self.toks):
            t = self.toks[self.i]
            raise TermSyntaxError(msg, t.line, t.col)
        last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
        raise TermSyntaxError(msg + " at end of input", last.line, last.col)

    def peek(self, off: int = 0) -> _Tok | None:
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else None

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t and t.kind == "sym" and t.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self._err(f"expected {text!r}")

    # ---- forms
    def form(self) -> Form:
        neg = self.accept("-")
        out = self.fterm()
        if neg:
            out = -out
        while True:
            if self.accept("+"):
                out = out + self.fterm()
            elif self.accept("-"):
                out = out - self.fterm()
            else:
                return out

    def fterm(self) -> Form:
        out = self.fatom()
        while True:
            t = self.peek()
            if t and t.kind == "sym" and t.text == "*":
                self.i += 1
                out = out * self.fatom()
            elif t and t.kind == "sym" and t.text == "/":
                self.i += 1
                out = _form_div(out, self.fatom(), t.line, t.col)
            else:
                return out

    def fatom(self) -> Form:
        t = self.peek()
        if t is None:
            self._err("expected a form")
        if t.kind == "num":
            self.i += 1
            base = Form.const(Fraction(int(t.text)))
        elif t.kind == "id":
            if t.text not in self.symbols:
                raise UnboundSymbol(f"unbound symbol {t.text!r}", t.line, t.col)
            self.i += 1
            base = Form.var(t.text)
        elif t.kind == "sym" and t.text == "(":
            self.i += 1
            base = self.form()
            self.expect(")")
        else:
            self._err(f"unexpected {t.text!r} in form")
        if self.accept("^"):
            e = self.peek()
            if e is None or e.kind != "num":
                self._err("expected integer exponent")
            self.i += 1
            base = base.pow(int(e.text))
        return base

    def signed_int(self) -> int:
        neg = self.accept("-")
        t = self.peek()
        if t is None or t.kind != "num":
            self._err("expected integer")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    def power_suffix(self) -> int:
        if not self.accept("^"):
            return 1
        t = self.peek()
        p = self.signed_int()
        if p == 0:
            raise TermSyntaxError("zero power forbidden", t.line, t.col)
        return p

    def exponent_atom(self) -> Form:
        """The exponent of (-1)^...: a symbol, number, or (form)."""
        t = self.peek()
        if t is None:
            self._err("expected exponent")
        if t.kind in ("num", "id"):
            return self.fatom()
        if t.kind == "sym" and t.text == "(":
            self.i += 1
            f = self.form()
            self.expect(")")
            return f
        self._err("expected exponent")

    # ---- factors
    def factor(self) -> Factor:
        t = self.peek()
        if t is None:
            self._err("expected a factor")
        if t.kind == "num":
            self.i += 1
            return RationalConst(Fraction(int(t.text)))
        if t.kind == "id":
            if t.text == "qpow":
                self.i += 1
                self.expect("(")
                f = self.form()
                self.expect(")")
                self._check_kdeg(f, 2, t)
                return QPow(f)
            if t.text == "poch":
                self.i += 1
                self.expect("(")
                base = self.form()
                self.expect(";")
                step = self.form()
                self.expect(";")
                length = self.form()
                self.expect(")")
                for f, what in ((base, "base"), (step, "step")):
                    if not f.is_free_of("k"):
                        raise TermSyntaxError(f"poch {what} must not involve k",
                                              t.line, t.col)
                self._check_kdeg(length, 1, t)
                return Poch(base, step, length, self.power_suffix())
            self._err(f"unexpected name {t.text!r}")
        if t.text == "[":
            self.i += 1
            arg = self.form()
            self._check_kdeg(arg, 1, t)
            self.expect("]")
            square = False
            nxt = self.peek()
            if nxt and nxt.kind == "id" and nxt.text == "_q2":
                self.i += 1
                square = True
            return QInt(arg, square, self.power_suffix())
        if t.text == "(":
            one = self.peek(1)
            # "(-1)^..." and "(1+qpow(...))" are dedicated factor forms
            if (one and one.kind == "sym" and one.text == "-"
                    and self._looks_like(2, "num", "1") and self._sym_at(3, ")")
                    and self._sym_at(4, "^")):
                self.i += 5
                f = self.exponent_atom()
                self._check_kdeg(f, 1, t)
                return SignPow(f)
            if (one and one.kind == "num" and one.text == "1"
                    and self._sym_at(2, "+") and self._looks_like(3, "id", "qpow")):
                self.i += 4
                self.expect("(")
                f = self.form()
                self.expect(")")
                self.expect(")")
                self._check_kdeg(f, 1, t)
                return OnePlusQPow(f, self.power_suffix())
            self._err("parenthesized subterms are not factors; use explicit"
                      " products of qpow/poch/[.] factors")
        self._err(f"unexpected {t.text!r}")

    def _looks_like(self, off: int, kind: str, text: str) -> bool:
        t = self.peek(off)
        return bool(t and t.kind == kind and t.text == text)

    def _sym_at(self, off: int, text: str) -> bool:
        return self._looks_like(off, "sym", text)

    def _check_kdeg(self, f: Form, limit: int, t: _Tok) -> None:
        if f.degree_in("k") > limit:
            raise TermSyntaxError(f"degree in k exceeds {limit}", t.line, t.col)

    # ---- terms
    def term(self) -> TermAST:
        factors = [self.factor()]
        while True:
            if self.accept("*"):
                factors.append(self.factor())
            elif self.accept("/"):
                factors.append(_invert(self.factor(), self))
            else:
                break
        return TermAST(tuple(factors))


def _invert(f: Factor, p: _Parser) -> Factor:
    if isinstance(f, Poch):
        return Poch(f.base, f.step, f.length, -f.power)
    if isinstance(f, QInt):
        return QInt(f.arg, f.square, -f.power)
    if isinstance(f, OnePlusQPow):
        return OnePlusQPow(f.exponent, -f.power)
    if isinstance(f, QPow):
        return QPow(-f.exponent)
    if isinstance(f, SignPow):
        return f  # (-1)^-e == (-1)^e
    if isinstance(f, RationalConst):
        if f.value == 0:
            p._err("division by zero constant")
        return RationalConst(1 / f.value)
    raise TypeError(f)  # pragma: no cover


def parse_term(src: str, extra_symbols: tuple[str, ...] = ()) -> TermAST:
    """Parse a summand expression; extra_symbols extends {n, d, r, k}."""
    toks = _lex(src)
    if not toks:
        raise TermSyntaxError("empty term", 1, 1)
    p = _Parser(toks, BASE_SYMBOLS + tuple(extra_symbols))
    ast = p.term()
    if p.i != len(toks):
        p._err("trailing input")
    return ast


def print_term(ast: TermAST) -> str:
    return str(ast)


def eval_qvalue(ast: TermAST, params: CaseParams, k: int) -> QValue:
    env = {"n": params.n, "d": params.d, "r": params.r, "k": k}
    env.update(params.extras())
    out = QValue.one()
    for f in ast.factors:
        if isinstance(f, SignPow):
            out = out * sign_pow(f.exponent.eval_int(env))
        elif isinstance(f, QPow):
            out = out * q_pow(f.exponent.eval_int(env))
        elif isinstance(f, OnePlusQPow):
            out = out * one_plus_qpow(f.exponent.eval_int(env)) ** f.power
        elif isinstance(f, Poch):
            length = f.length.eval_int(env)
            if length < 0:
                raise NonIntegerExponent(f"negative Pochhammer length {length}")
            step = f.step.eval_int(env)
            if step < 1:
                raise NonIntegerExponent(f"Pochhammer step {step} must be >= 1")
            out = out * poch_qv(f.base.eval_int(env), step, length, f.power)
        elif isinstance(f, QInt):
            out = out * qint_qv(f.arg.eval_int(env), f.square, f.power)
        elif isinstance(f, RationalConst):
            out = out * QValue.from_fraction(f.value)
        else:  # pragma: no cover
            raise TypeError(f)
    return out


def eval_term(ast: TermAST, params: CaseParams, k: int) -> RatFunc:
    """Exact value of the substituted expression at index k."""
    return eval_qvalue(ast, params, k).to_ratfunc()


def denominator_exponents(ast: TermAST, params: CaseParams,
                          kmax: int) -> set[int]:
    """Absolute q-exponents of all binomials (1 - q^m) that land in the
    denominator of the evaluated term, over k = 0..kmax.  A reported 0 means
    a factor vanishes identically.  Used to screen specialization samples,
    where the built value can collapse to zero and hide its denominator."""
    out: set[int] = set()
    base_env = {"n": params.n, "d": params.d, "r": params.r}
    base_env.update(params.extras())
    for k in range(kmax + 1):
        env = dict(base_env, k=k)
        for f in ast.factors:
            if isinstance(f, Poch):
                if f.power < 0:
                    b = f.base.eval_int(env)
                    s = f.step.eval_int(env)
                    length = f.length.eval_int(env)
                    out.update(abs(b + i * s) for i in range(max(length, 0)))
            elif isinstance(f, QInt):
                s = 2 if f.square else 1
                if f.power < 0:
                    out.add(abs(s * f.arg.eval_int(env)))
                else:
                    out.add(s)
            elif isinstance(f, OnePlusQPow):
                e = f.exponent.eval_int(env)
                if e:
                    out.add(abs(e) if f.power > 0 else abs(2 * e))
    return out


def compiled_term(src: str, params: CaseParams,
                  extra_symbols: tuple[str, ...] = ()):
    """Parse once and return a generator with the registry's interface."""
    ast = parse_term(src, extra_symbols)

    def raw(k: int) -> QValue:
        return eval_qvalue(ast, params, k)

    def gen(k: int) -> RatFunc:
        return raw(k).to_ratfunc()

    gen.qvalue = raw
    gen.source = src
    return gen
