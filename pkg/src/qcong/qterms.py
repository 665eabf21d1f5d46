"""q-integers, q-shifted factorials, and the registry of built-in summands.

Every summand in scope is a product of factors (1 - q^m)^e together with a
sign, a power of q and a rational constant, so values are carried in that
factored shape (QValue) for as long as possible.  Sums of QValues keep the
common binomial part factored and only expand numerators; conversion to a
reduced RatFunc happens once per final quantity, cancelling the numerator
against the known cyclotomic factorization of the denominator instead of
running a generic gcd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .cyclotomic import cyclotomic, divisors
from .polyring import (DivideByZero, IntPoly, PoleAtPoint, RatFunc,
                       mod_image, phi_multiplicity, poly_divrem)


class ConstraintViolation(ValueError):
    """A theorem's parameter constraint failed; the message names it."""


class UnknownTerm(KeyError):
    pass


_ONE = IntPoly.one()


def _mul_binomial(p: IntPoly, m: int) -> IntPoly:
    """p * (1 - q^m) for m >= 1, as a shift-and-subtract."""
    cs = p.coeffs
    out = list(cs) + [0] * m
    for i, c in enumerate(cs):
        out[i + m] -= c
    return IntPoly(out)


class QValue:
    """scalar * q^qpow * prod_m (1 - q^m)^bins[m] * num / oden, exact."""

    __slots__ = ("scalar", "qpow", "bins", "num", "oden")

    def __init__(self, scalar: Fraction = Fraction(1), qpow: int = 0,
                 bins: dict[int, int] | None = None, num: IntPoly = _ONE,
                 oden: IntPoly = _ONE):
        self.scalar = scalar
        self.qpow = qpow
        self.bins = bins or {}
        self.num = num
        self.oden = oden

    @staticmethod
    def zero() -> "QValue":
        return QValue(Fraction(1), 0, None, IntPoly.zero())

    @staticmethod
    def one() -> "QValue":
        return QValue()

    @staticmethod
    def from_fraction(x) -> "QValue":
        x = Fraction(x)
        if x == 0:
            return QValue.zero()
        return QValue(x)

    @staticmethod
    def qpower(e: int) -> "QValue":
        return QValue(Fraction(1), e)

    @staticmethod
    def binomial(m: int, exp: int = 1) -> "QValue":
        """(1 - q^m)^exp; m may be negative, m == 0 gives 0 (or a pole)."""
        if exp == 0 or m is None:
            return QValue.one()
        if m == 0:
            if exp < 0:
                raise DivideByZero("(1 - q^0) in a denominator")
            return QValue.zero()
        if m > 0:
            return QValue(Fraction(1), 0, {m: exp})
        # 1 - q^m = -q^m (1 - q^-m)
        return QValue(Fraction(-1) ** exp, m * exp, {-m: exp})

    @staticmethod
    def from_ratfunc(r: RatFunc) -> "QValue":
        return QValue(r.scalar, 0, None, r.num, r.den)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero or self.scalar == 0

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0 or self.is_zero:
                return QValue.zero()
            return QValue(self.scalar * other, self.qpow, dict(self.bins),
                          self.num, self.oden)
        if self.is_zero or other.is_zero:
            return QValue.zero()
        bins = dict(self.bins)
        for m, e in other.bins.items():
            ne = bins.get(m, 0) + e
            if ne:
                bins[m] = ne
            else:
                bins.pop(m, None)
        num = self.num if other.num == _ONE else (
            other.num if self.num == _ONE else self.num * other.num)
        oden = self.oden if other.oden == _ONE else (
            other.oden if self.oden == _ONE else self.oden * other.oden)
        return QValue(self.scalar * other.scalar, self.qpow + other.qpow,
                      bins, num, oden)

    __rmul__ = __mul__

    def inverse(self) -> "QValue":
        if self.is_zero:
            raise DivideByZero("inverse of zero")
        return QValue(1 / self.scalar, -self.qpow,
                      {m: -e for m, e in self.bins.items()},
                      self.oden, self.num)

    def __truediv__(self, other) -> "QValue":
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, 1) / QValue.from_fraction(other)
        return self * other.inverse()

    def __neg__(self) -> "QValue":
        return self * -1

    def __pow__(self, e: int) -> "QValue":
        if e < 0:
            return self.inverse() ** (-e)
        out = QValue.one()
        for _ in range(e):
            out = out * self
        return out

    def __add__(self, other: "QValue") -> "QValue":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.oden != _ONE or other.oden != _ONE:
            return QValue.from_ratfunc(self.to_ratfunc() + other.to_ratfunc())
        tq = min(self.qpow, other.qpow)
        common: dict[int, int] = {}
        cof_a: list[tuple[int, int]] = []
        cof_b: list[tuple[int, int]] = []
        for m in set(self.bins) | set(other.bins):
            ea = self.bins.get(m, 0)
            eb = other.bins.get(m, 0)
            c = min(ea, eb)
            if c:
                common[m] = c
            if ea - c:
                cof_a.append((m, ea - c))
            if eb - c:
                cof_b.append((m, eb - c))
        pa, qa = self.scalar.numerator, self.scalar.denominator
        pb, qb = other.scalar.numerator, other.scalar.denominator
        g = math.gcd(pa, pb)
        lcm = qa * qb // math.gcd(qa, qb)
        na = self._expand(cof_a, self.qpow - tq) * ((pa // g) * (lcm // qa))
        nb = other._expand(cof_b, other.qpow - tq) * ((pb // g) * (lcm // qb))
        return QValue(Fraction(g, lcm), tq, common, na + nb)

    def __sub__(self, other: "QValue") -> "QValue":
        return self + (-other)

    def _expand(self, cof: list[tuple[int, int]], shift: int) -> IntPoly:
        out = self.num.shift(shift) if shift else self.num
        for m, e in cof:
            for _ in range(e):
                out = _mul_binomial(out, m)
        return out

    def evaluate(self, point) -> Fraction:
        """Exact value at a rational point (away from binomial zeros)."""
        point = Fraction(point)
        v = self.scalar * point ** self.qpow
        for m, e in self.bins.items():
            b = 1 - point ** m
            if b == 0:
                if e < 0:
                    raise PoleAtPoint(f"binomial pole at q = {point}")
                return Fraction(0)
            v *= Fraction(b) ** e
        v *= self.num.evaluate(point)
        if self.oden != _ONE:
            dv = self.oden.evaluate(point)
            if dv == 0:
                raise PoleAtPoint(f"pole at q = {point}")
            v /= dv
        return v

    def to_ratfunc(self) -> RatFunc:
        if self.is_zero:
            return RatFunc.zero()
        scalar = self.scalar
        if sum(self.bins.values()) % 2:
            scalar = -scalar  # each (1 - q^m) is -(q^m - 1) = -prod Phi_d
        phi: dict[int, int] = {}
        for m, e in self.bins.items():
            for dd in divisors(m):
                phi[dd] = phi.get(dd, 0) + e
        num = self.num
        tz = num.trailing_zeros()
        qpow = self.qpow + tz
        if tz:
            num = IntPoly(num.coeffs[tz:])
        den_phi: dict[int, int] = {}
        img = None
        for e in sorted(k for k, v in phi.items() if v < 0):
            beta = -phi[e]
            if num != _ONE:
                if img is None:
                    img = mod_image(num)
                alpha = phi_multiplicity(num, cyclotomic(e), beta, img)
                for _ in range(alpha):
                    num, rem = poly_divrem(num, cyclotomic(e))
                    assert rem.is_zero
                if alpha:
                    img = None
                beta -= alpha
            if beta:
                den_phi[e] = beta
        parts = [num] if num != _ONE else []
        for e, x in sorted((k, v) for k, v in phi.items() if v > 0):
            parts.append(cyclotomic(e) ** x)
        num_total = _product_tree(parts) if parts else _ONE
        den_parts = [cyclotomic(e) ** x for e, x in sorted(den_phi.items())]
        den_total = _product_tree(den_parts) if den_parts else _ONE
        qden = 0
        if qpow >= 0:
            num_total = num_total.shift(qpow)
        else:
            qden = -qpow
            den_total = den_total.shift(qden)
        cn = num_total.content()
        if num_total.leading < 0:
            cn = -cn
        if cn != 1:
            num_total = IntPoly(c // cn for c in num_total.coeffs)
            scalar = scalar * cn
        hint = tuple(sorted(den_phi.items())) + (((0, qden),) if qden else ())
        out = RatFunc(num_total, den_total, scalar, _reduced=True, _den_phi=hint)
        if self.oden != _ONE:
            out = out / RatFunc.from_poly(self.oden)
        return out


def _product_tree(parts: list[IntPoly]) -> IntPoly:
    while len(parts) > 1:
        nxt = [parts[i] * parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


# ---------------------------------------------------------------------------
# elementary q-objects (public operation surface)

def q_integer(m: int, square: bool = False) -> IntPoly:
    """[m]_q, or [m]_{q^2} when square is set."""
    if m < 1:
        raise ValueError("q_integer needs m >= 1")
    if square:
        out = [0] * (2 * m - 1)
        out[::2] = [1] * m
        return IntPoly(out)
    return IntPoly((1,) * m)


def q_pochhammer(a_exp: int, step: int, k: int):
    """(q^a_exp; q^step)_k; an IntPoly, or a RatFunc once negative powers
    of q appear among the factors."""
    if k < 0:
        raise ValueError("q_pochhammer needs k >= 0")
    if step < 1:
        raise ValueError("q_pochhammer needs step >= 1")
    exps = [a_exp + i * step for i in range(k)]
    if all(e >= 0 for e in exps):
        out = _ONE
        for e in exps:
            if e == 0:
                return IntPoly.zero()
            out = _mul_binomial(out, e)
        return out
    return poch_qv(a_exp, step, k).to_ratfunc()


# QValue builders used by both the registry and the term-language evaluator

def sign_pow(e: int) -> QValue:
    return QValue.from_fraction(-1 if e % 2 else 1)


def q_pow(e: int) -> QValue:
    return QValue.qpower(e)


def one_plus_qpow(e: int) -> QValue:
    """1 + q^e as (1 - q^{2e}) / (1 - q^e); e == 0 gives 2."""
    if e == 0:
        return QValue.from_fraction(2)
    return QValue.binomial(2 * e) / QValue.binomial(e)


def poch_qv(a: int, step: int, k: int, power: int = 1) -> QValue:
    out = QValue.one()
    for i in range(k):
        out = out * QValue.binomial(a + i * step, power)
    return out


def qint_qv(m: int, square: bool = False, power: int = 1) -> QValue:
    """[m]^power as ((1 - q^m)/(1 - q))^power, valid for any integer m."""
    s = 2 if square else 1
    if m == 0:
        if power < 0:
            raise DivideByZero("[0] in a denominator")
        return QValue.zero()
    return QValue.binomial(s * m, power) * QValue.binomial(s, -power)


# ---------------------------------------------------------------------------
# case parameters and per-theorem constraints

@dataclass(frozen=True)
class CaseParams:
    n: int
    d: int = 1
    r: int = 1
    extra: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def make(n: int, d: int = 1, r: int = 1,
             extra: Mapping[str, int] | None = None) -> "CaseParams":
        items = tuple(sorted((extra or {}).items()))
        return CaseParams(n, d, r, items)

    def extras(self) -> dict[str, int]:
        return dict(self.extra)

    def get(self, name: str, default: int | None = None) -> int:
        for k, v in self.extra:
            if k == name:
                return v
        if default is None:
            raise ConstraintViolation(f"missing extra parameter {name!r}")
        return default

    def with_extra(self, **kw: int) -> "CaseParams":
        merged = self.extras()
        merged.update(kw)
        return CaseParams.make(self.n, self.d, self.r, merged)


def _odd(p):           return p.n % 2 == 1
def _n_gt1(p):         return p.n > 1
def _n_pos(p):         return p.n >= 1
def _d_pos(p):         return p.d >= 1
def _d_gt1(p):         return p.d > 1
def _d_ge3(p):         return p.d >= 3
def _coprime(p):       return math.gcd(p.n, p.d) == 1
def _n_cong_r(p):      return (p.n - p.r) % p.d == 0
def _n_cong_1(p):      return (p.n - 1) % p.d == 0
def _r_lt_n(p):        return p.r < p.n
def _r_le_n(p):        return p.r <= p.n
def _r_window(p):      return 2 * p.r >= 2 * p.n - (p.n - 1) * p.d
def _d_is_3(p):        return p.d == 3
def _d_is_4(p):        return p.d == 4


CONSTRAINTS: dict[str, tuple[tuple[str, Callable], ...]] = {
    "thm1_1": (("n > 1", _n_gt1), ("n odd", _odd)),
    "thm1_2": (("n > 1", _n_gt1), ("n odd", _odd)),
    "thm1_3": (("n > 1", _n_gt1), ("n odd", _odd), ("d >= 1", _d_pos),
               ("gcd(n, d) = 1", _coprime), ("n == r (mod d)", _n_cong_r),
               ("r <= n", _r_le_n), ("n - (n-1)d/2 <= r", _r_window)),
    "thm1_4": (("n > 1", _n_gt1), ("n odd", _odd), ("d >= 1", _d_pos),
               ("gcd(n, d) = 1", _coprime), ("n == r (mod d)", _n_cong_r),
               ("r <= n", _r_le_n), ("n - (n-1)d/2 <= r", _r_window)),
    "thm6_1": (("n >= 1", _n_pos), ("n odd", _odd), ("d >= 3", _d_ge3),
               ("n == 1 (mod d)", _n_cong_1)),
    "thm6_3": (("n >= 1", _n_pos), ("n odd", _odd), ("d >= 3", _d_ge3),
               ("n == 1 (mod d)", _n_cong_1)),
    "thm6_4": (("n > 1", _n_gt1), ("d >= 3", _d_ge3),
               ("n == 1 (mod d)", _n_cong_1)),
    "cor6_7": (("n > 1", _n_gt1), ("d = 3", _d_is_3),
               ("n == 1 (mod 3)", _n_cong_1)),
    "cor6_8": (("n > 1", _n_gt1), ("d = 4", _d_is_4),
               ("n == 1 (mod 4)", _n_cong_1)),
    "eq1_1": (("n > 1", _n_gt1), ("n odd", _odd)),
    "eq1_2": (("n > 1", _n_gt1), ("n odd", _odd)),
    "eq1_7": (("n >= 1", _n_pos), ("n odd", _odd), ("d > 1", _d_gt1),
              ("gcd(n, d) = 1", _coprime), ("r < n", _r_lt_n),
              ("n == r (mod d)", _n_cong_r)),
    "eq1_8": (("n >= 1", _n_pos), ("n odd", _odd), ("d > 1", _d_gt1),
              ("gcd(n, d) = 1", _coprime), ("r < n", _r_lt_n),
              ("n == r (mod d)", _n_cong_r)),
    "lem2_2": (("n > 1", _n_gt1), ("n odd", _odd), ("d >= 1", _d_pos),
               ("r < n", _r_lt_n), ("n == r (mod d)", _n_cong_r)),
    "lem3_1": (("n > 1", _n_gt1), ("n odd", _odd), ("d >= 1", _d_pos),
               ("r < n", _r_lt_n), ("n == r (mod d)", _n_cong_r)),
    "lem5_1": (("n >= 1", _n_pos), ("d >= 1", _d_pos), ("r < n", _r_lt_n),
               ("n == r (mod d)", _n_cong_r)),
    "lem6_5": (("n > 1", _n_gt1), ("d >= 3", _d_ge3),
               ("n == 1 (mod d)", _n_cong_1)),
    "lem6_6": (("n > 1", _n_gt1), ("d >= 3", _d_ge3),
               ("n == 1 (mod d)", _n_cong_1)),
}


def check_constraints(family: str, params: CaseParams) -> None:
    for name, pred in CONSTRAINTS.get(family, ()):
        if not pred(params):
            raise ConstraintViolation(f"{family}: constraint '{name}' violated "
                                      f"by (n={params.n}, d={params.d}, r={params.r})")


# ---------------------------------------------------------------------------
# the summand registry

@dataclass(frozen=True)
class TermDef:
    term_id: str
    kind: str                      # "summand" or "closed"
    family: str
    builder: Callable
    source: str | None = None      # termlang text equivalent, when expressible
    doc: str = ""


def _thm1_1_lhs(p: CaseParams):
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(4 * k + 1) * poch_qv(2, 4, k, 2)
                * q_pow(2 * k * k + k) / one_plus_qpow(1) / poch_qv(4, 4, k, 2))
    return gen


def _thm1_1_rhs(p: CaseParams):
    def gen(k: int) -> QValue:
        return (poch_qv(2, 4, k) * q_pow(2 * k)
                / qint_qv(4 * k + 1) / poch_qv(4, 4, k))
    return gen


def _thm1_2_lhs(p: CaseParams):
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(4 * k + 1) * poch_qv(2, 4, k, 3)
                * q_pow(2 * k * k + 2 * k) / one_plus_qpow(1) / poch_qv(4, 4, k, 3))
    return gen


def _thm1_2_rhs(p: CaseParams):
    def gen(k: int) -> QValue:
        return (poch_qv(2, 4, k, 3) * q_pow(2 * k)
                / poch_qv(4, 4, k) / poch_qv(3, 4, k) / poch_qv(5, 4, k))
    return gen


def _thm1_3_lhs(p: CaseParams):
    d, r = p.d, p.r
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + r)
                * poch_qv(2 * r, 2 * d, k, 2) * q_pow(d * k * k + k * (d - r))
                / one_plus_qpow(r) / poch_qv(2 * d, 2 * d, k, 2))
    return gen


def _thm1_3_rhs(p: CaseParams):
    d, r = p.d, p.r
    def gen(k: int) -> QValue:
        return (poch_qv(2 * r, 2 * d, k) * poch_qv(r, 2 * d, k)
                * q_pow(2 * k * (d - r))
                / poch_qv(2 * d, 2 * d, k) / poch_qv(2 * d + r, 2 * d, k))
    return gen


def _thm1_4_lhs(p: CaseParams):
    d, r = p.d, p.r
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + r)
                * poch_qv(2 * r, 2 * d, k, 3) * q_pow(d * k * k + 2 * k * (d - r))
                / one_plus_qpow(r) / poch_qv(2 * d, 2 * d, k, 3))
    return gen


def _thm1_4_rhs(p: CaseParams):
    d, r = p.d, p.r
    def gen(k: int) -> QValue:
        return (poch_qv(2 * r, 2 * d, k, 2) * poch_qv(d, 2 * d, k)
                * q_pow(2 * k * (d - r)) / poch_qv(2 * d, 2 * d, k)
                / poch_qv(d + r, 2 * d, k) / poch_qv(2 * d + r, 2 * d, k))
    return gen


def _thm6_1_lhs(p: CaseParams):
    d = p.d
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + 1)
                * poch_qv(2, 2 * d, k, 3) * q_pow(d * k * k + 2 * k * (d - 1))
                / one_plus_qpow(1) / poch_qv(2 * d, 2 * d, k, 3))
    return gen


def _thm6_1_rhs(p: CaseParams):
    d = p.d
    def gen(k: int) -> QValue:
        return (poch_qv(2, 2 * d, k, 2) * poch_qv(d, 2 * d, k)
                * q_pow(2 * (d - 1) * k) / poch_qv(d + 1, 2 * d, k)
                / poch_qv(2 * d, 2 * d, k) / poch_qv(2 * d + 1, 2 * d, k))
    return gen


def _thm6_3_lhs(p: CaseParams):
    d = p.d
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + 1)
                * poch_qv(2, 2 * d, k, 2) * q_pow(d * k * k + (d - 1) * k)
                / one_plus_qpow(1) / poch_qv(2 * d, 2 * d, k, 2))
    return gen


def _thm6_3_rhs(p: CaseParams):
    d = p.d
    def gen(k: int) -> QValue:
        return (poch_qv(2, 2 * d, k) * poch_qv(1, 2 * d, k)
                * q_pow(2 * (d - 1) * k)
                / poch_qv(2 * d, 2 * d, k) / poch_qv(2 * d + 1, 2 * d, k))
    return gen


def _thm6_4_lhs(p: CaseParams):
    d = p.d
    def gen(k: int) -> QValue:
        return (qint_qv(2 * d * k + 1) * poch_qv(1, d, k, 4)
                * q_pow((d - 2) * k) / poch_qv(d, d, k, 4))
    return gen


def _thm6_4_rhs_closed(p: CaseParams) -> QValue:
    n, d = p.n, p.d
    big_n = (n - 1) // d
    return (qint_qv(n, power=3) * q_pow(3 * (1 - n) // d)
            * poch_qv(2, d, big_n, 3) / poch_qv(d, d, big_n, 3))


def _eq1_1_lhs(p: CaseParams):
    def gen(k: int) -> QValue:
        return (sign_pow(k) * q_pow(k * k) * qint_qv(4 * k + 1)
                * poch_qv(1, 2, k, 3) / poch_qv(2, 2, k, 3))
    return gen


def _eq1_1_rhs_closed(p: CaseParams) -> QValue:
    n = p.n
    return sign_pow((n - 1) // 2) * q_pow((n - 1) ** 2 // 4) * qint_qv(n)


def _eq1_2_rhs_closed(p: CaseParams) -> QValue:
    n = p.n
    return q_pow((n + 1) // 2) * qint_qv(n, power=2)


def _lem2_2_lhs(p: CaseParams):
    d, r, ax = p.d, p.r, p.get("ax")
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + r)
                * poch_qv(ax + 2 * r, 2 * d, k) * poch_qv(2 * r - ax, 2 * d, k)
                * q_pow(d * k * k + k * (d - r)) / one_plus_qpow(r)
                / poch_qv(ax + 2 * d, 2 * d, k) / poch_qv(2 * d - ax, 2 * d, k))
    return gen


def _lem2_2_rhs(p: CaseParams):
    d, r, ax = p.d, p.r, p.get("ax")
    def gen(k: int) -> QValue:
        return (poch_qv(ax + 2 * r, 2 * d, k) * poch_qv(2 * r - ax, 2 * d, k)
                * poch_qv(r, 2 * d, k) * q_pow(2 * k * (d - r))
                / poch_qv(2 * d, 2 * d, k) / poch_qv(2 * d + r, 2 * d, k)
                / poch_qv(2 * r, 2 * d, k))
    return gen


def _lem3_1_lhs(p: CaseParams):
    d, r, ax = p.d, p.r, p.get("ax")
    def gen(k: int) -> QValue:
        return (sign_pow(k) * one_plus_qpow(2 * d * k + r)
                * poch_qv(ax + 2 * r, 2 * d, k) * poch_qv(2 * r - ax, 2 * d, k)
                * poch_qv(2 * r, 2 * d, k) * q_pow(d * k * k + 2 * k * (d - r))
                / one_plus_qpow(r) / poch_qv(ax + 2 * d, 2 * d, k)
                / poch_qv(2 * d - ax, 2 * d, k) / poch_qv(2 * d, 2 * d, k))
    return gen


def _lem3_1_rhs(p: CaseParams):
    d, r, ax = p.d, p.r, p.get("ax")
    def gen(k: int) -> QValue:
        return (poch_qv(ax + 2 * r, 2 * d, k) * poch_qv(2 * r - ax, 2 * d, k)
                * poch_qv(d, 2 * d, k) * q_pow(2 * k * (d - r))
                / poch_qv(2 * d, 2 * d, k) / poch_qv(d + r, 2 * d, k)
                / poch_qv(2 * d + r, 2 * d, k))
    return gen


def _lem5_1_lhs(p: CaseParams):
    n, d, r, ax = p.n, p.d, p.r, p.get("ax")
    big_k = (n - r) // d
    def gen(k: int) -> QValue:
        return poch_qv(ax + r, d, big_k - k) / poch_qv(d - ax, d, big_k - k)
    return gen


def _lem5_1_rhs(p: CaseParams):
    n, d, r, ax = p.n, p.d, p.r, p.get("ax")
    big_k = (n - r) // d
    e0 = (n - r) * (n - d + r)
    assert e0 % (2 * d) == 0
    def gen(k: int) -> QValue:
        return (sign_pow(big_k) * q_pow(ax * (big_k - 2 * k))
                * poch_qv(ax + r, d, k) / poch_qv(d - ax, d, k)
                * q_pow(e0 // (2 * d) + k * (d - r)))
    return gen


def _lem6_5_lhs(p: CaseParams):
    d, ax, bx = p.d, p.get("ax"), p.get("bx")
    def gen(k: int) -> QValue:
        return (qint_qv(2 * d * k + 1) * poch_qv(1, d, k)
                * poch_qv(1 + ax, d, k) * poch_qv(1 - ax, d, k)
                * poch_qv(1 - bx, d, k) * q_pow((bx + d - 2) * k)
                / poch_qv(d, d, k) / poch_qv(d + ax, d, k)
                / poch_qv(d - ax, d, k) / poch_qv(d + bx, d, k))
    return gen


def _lem6_5_rhs_closed(p: CaseParams) -> QValue:
    n, d, bx = p.n, p.d, p.get("bx")
    big_n = (n - 1) // d
    return (qint_qv(n, power=3) * q_pow(3 * (bx - 1) * big_n)
            * poch_qv(2 - bx, d, big_n, 3) / poch_qv(d + bx, d, big_n, 3))


def _lem6_6_rhs_closed(p: CaseParams) -> QValue:
    n, d, ax = p.n, p.d, p.get("ax")
    big_n = (n - 1) // d
    return (qint_qv(n, power=3) * poch_qv(1, d, big_n, 3)
            * poch_qv(d - 1, d, big_n, 3)
            / poch_qv(d + ax, d, big_n, 3) / poch_qv(d - ax, d, big_n, 3))


_DEFS = [
    TermDef("thm1_1.lhs", "summand", "thm1_1", _thm1_1_lhs,
            "(-1)^k * (1+qpow(4*k+1)) * poch(2; 4; k)^2 * qpow(2*k^2+k)"
            " / (1+qpow(1)) / poch(4; 4; k)^2",
            "double-sum summand, squared Pochhammers, d=2 r=1 shape"),
    TermDef("thm1_1.rhs", "summand", "thm1_1", _thm1_1_rhs,
            "poch(2; 4; k) * qpow(2*k) / [4*k+1] / poch(4; 4; k)",
            "inner summand of the squared truncated sum"),
    TermDef("thm1_2.lhs", "summand", "thm1_2", _thm1_2_lhs,
            "(-1)^k * (1+qpow(4*k+1)) * poch(2; 4; k)^3 * qpow(2*k^2+2*k)"
            " / (1+qpow(1)) / poch(4; 4; k)^3",
            "double-sum summand, cubed Pochhammers, d=2 r=1 shape"),
    TermDef("thm1_2.rhs", "summand", "thm1_2", _thm1_2_rhs,
            "poch(2; 4; k)^3 * qpow(2*k) / poch(4; 4; k) / poch(3; 4; k)"
            " / poch(5; 4; k)",
            "inner summand of the squared truncated sum"),
    TermDef("thm1_3.lhs", "summand", "thm1_3", _thm1_3_lhs,
            "(-1)^k * qpow(d*k^2 + (d-r)*k) * poch(2*r; 2*d; k)^2"
            " / poch(2*d; 2*d; k)^2 * (1+qpow(2*d*k+r)) / (1+qpow(r))",
            "general (d, r) double-sum summand, squared"),
    TermDef("thm1_3.rhs", "summand", "thm1_3", _thm1_3_rhs,
            "poch(2*r; 2*d; k) * poch(r; 2*d; k) * qpow(2*(d-r)*k)"
            " / poch(2*d; 2*d; k) / poch(2*d+r; 2*d; k)",
            "inner summand of the squared truncated sum"),
    TermDef("thm1_4.lhs", "summand", "thm1_4", _thm1_4_lhs,
            "(-1)^k * qpow(d*k^2 + 2*(d-r)*k) * poch(2*r; 2*d; k)^3"
            " / poch(2*d; 2*d; k)^3 * (1+qpow(2*d*k+r)) / (1+qpow(r))",
            "general (d, r) double-sum summand, cubed"),
    TermDef("thm1_4.rhs", "summand", "thm1_4", _thm1_4_rhs,
            "poch(2*r; 2*d; k)^2 * poch(d; 2*d; k) * qpow(2*(d-r)*k)"
            " / poch(2*d; 2*d; k) / poch(d+r; 2*d; k) / poch(2*d+r; 2*d; k)",
            "inner summand of the squared truncated sum"),
    TermDef("thm6_1.lhs", "summand", "thm6_1", _thm6_1_lhs,
            "(-1)^k * (1+qpow(2*d*k+1)) * poch(2; 2*d; k)^3"
            " * qpow(d*k^2 + 2*(d-1)*k) / (1+qpow(1)) / poch(2*d; 2*d; k)^3",
            "triple-sum summand, cubed"),
    TermDef("thm6_1.rhs", "summand", "thm6_1", _thm6_1_rhs,
            "poch(2; 2*d; k)^2 * poch(d; 2*d; k) * qpow(2*(d-1)*k)"
            " / poch(d+1; 2*d; k) / poch(2*d; 2*d; k) / poch(2*d+1; 2*d; k)",
            "inner summand of the cubed truncated sum"),
    TermDef("thm6_3.lhs", "summand", "thm6_3", _thm6_3_lhs,
            "(-1)^k * (1+qpow(2*d*k+1)) * poch(2; 2*d; k)^2"
            " * qpow(d*k^2 + (d-1)*k) / (1+qpow(1)) / poch(2*d; 2*d; k)^2",
            "triple-sum summand, squared"),
    TermDef("thm6_3.rhs", "summand", "thm6_3", _thm6_3_rhs,
            "poch(2; 2*d; k) * poch(1; 2*d; k) * qpow(2*(d-1)*k)"
            " / poch(2*d; 2*d; k) / poch(2*d+1; 2*d; k)",
            "inner summand of the cubed truncated sum"),
    TermDef("thm6_4.lhs", "summand", "thm6_4", _thm6_4_lhs,
            "[2*d*k+1] * poch(1; d; k)^4 * qpow((d-2)*k) / poch(d; d; k)^4",
            "triple-sum summand verified against the closed product"),
    TermDef("thm6_4.rhs", "closed", "thm6_4", _thm6_4_rhs_closed,
            "[n]^3 * qpow(3*(1-n)/d) * poch(2; d; (n-1)/d)^3"
            " / poch(d; d; (n-1)/d)^3",
            "closed-form right side"),
    TermDef("cor6_7.lhs", "summand", "cor6_7", _thm6_4_lhs,
            "[6*k+1] * poch(1; 3; k)^4 * qpow(k) / poch(3; 3; k)^4",
            "d = 3 corollary summand"),
    TermDef("cor6_7.rhs", "closed", "cor6_7", _thm6_4_rhs_closed,
            "[n]^3 * qpow(1-n) * poch(2; 3; (n-1)/3)^3 / poch(3; 3; (n-1)/3)^3",
            "d = 3 closed-form right side"),
    TermDef("cor6_8.lhs", "summand", "cor6_8", _thm6_4_lhs,
            "[8*k+1] * poch(1; 4; k)^4 * qpow(2*k) / poch(4; 4; k)^4",
            "d = 4 corollary summand"),
    TermDef("cor6_8.rhs", "closed", "cor6_8", _thm6_4_rhs_closed,
            "[n]^3 * qpow(3*(1-n)/4) * poch(2; 4; (n-1)/4)^3"
            " / poch(4; 4; (n-1)/4)^3",
            "d = 4 closed-form right side"),
    TermDef("eq1_1.lhs", "summand", "eq1_1", _eq1_1_lhs,
            "(-1)^k * qpow(k^2) * [4*k+1] * poch(1; 2; k)^3 / poch(2; 2; k)^3",
            "single-sum regression summand"),
    TermDef("eq1_1.rhs", "closed", "eq1_1", _eq1_1_rhs_closed,
            "(-1)^((n-1)/2) * qpow((n-1)^2/4) * [n]",
            "closed-form right side"),
    TermDef("eq1_2.lhs", "summand", "eq1_2", _eq1_1_lhs,
            "(-1)^k * qpow(k^2) * [4*k+1] * poch(1; 2; k)^3 / poch(2; 2; k)^3",
            "double-sum regression summand"),
    TermDef("eq1_2.rhs", "closed", "eq1_2", _eq1_2_rhs_closed,
            "qpow((n+1)/2) * [n]^2",
            "closed-form right side"),
    TermDef("eq1_7.lhs", "summand", "eq1_7", _thm1_3_lhs,
            "(-1)^k * qpow(d*k^2 + (d-r)*k) * poch(2*r; 2*d; k)^2"
            " / poch(2*d; 2*d; k)^2 * (1+qpow(2*d*k+r)) / (1+qpow(r))",
            "single-sum form of the squared-Pochhammer summand"),
    TermDef("eq1_7.rhs", "summand", "eq1_7", _thm1_3_rhs,
            "poch(2*r; 2*d; k) * poch(r; 2*d; k) * qpow(2*(d-r)*k)"
            " / poch(2*d; 2*d; k) / poch(2*d+r; 2*d; k)",
            "inner summand of the single-sum right side"),
    TermDef("eq1_8.lhs", "summand", "eq1_8", _thm1_4_lhs,
            "(-1)^k * qpow(d*k^2 + 2*(d-r)*k) * poch(2*r; 2*d; k)^3"
            " / poch(2*d; 2*d; k)^3 * (1+qpow(2*d*k+r)) / (1+qpow(r))",
            "single-sum form of the cubed-Pochhammer summand"),
    TermDef("eq1_8.rhs", "summand", "eq1_8", _thm1_4_rhs,
            "poch(2*r; 2*d; k)^2 * poch(d; 2*d; k) * qpow(2*(d-r)*k)"
            " / poch(2*d; 2*d; k) / poch(d+r; 2*d; k) / poch(2*d+r; 2*d; k)",
            "inner summand of the single-sum right side"),
    TermDef("lem2_2.lhs", "summand", "lem2_2", _lem2_2_lhs,
            "(-1)^k * (1+qpow(2*d*k+r)) * poch(ax+2*r; 2*d; k)"
            " * poch(2*r-ax; 2*d; k) * qpow(d*k^2 + (d-r)*k) / (1+qpow(r))"
            " / poch(ax+2*d; 2*d; k) / poch(2*d-ax; 2*d; k)",
            "parametric summand, parameter specialized to q^ax"),
    TermDef("lem2_2.rhs", "summand", "lem2_2", _lem2_2_rhs,
            "poch(ax+2*r; 2*d; k) * poch(2*r-ax; 2*d; k) * poch(r; 2*d; k)"
            " * qpow(2*(d-r)*k) / poch(2*d; 2*d; k) / poch(2*d+r; 2*d; k)"
            " / poch(2*r; 2*d; k)",
            "parametric inner summand"),
    TermDef("lem3_1.lhs", "summand", "lem3_1", _lem3_1_lhs,
            "(-1)^k * (1+qpow(2*d*k+r)) * poch(ax+2*r; 2*d; k)"
            " * poch(2*r-ax; 2*d; k) * poch(2*r; 2*d; k)"
            " * qpow(d*k^2 + 2*(d-r)*k) / (1+qpow(r))"
            " / poch(ax+2*d; 2*d; k) / poch(2*d-ax; 2*d; k)"
            " / poch(2*d; 2*d; k)",
            "parametric summand, cubed variant"),
    TermDef("lem3_1.rhs", "summand", "lem3_1", _lem3_1_rhs,
            "poch(ax+2*r; 2*d; k) * poch(2*r-ax; 2*d; k) * poch(d; 2*d; k)"
            " * qpow(2*(d-r)*k) / poch(2*d; 2*d; k) / poch(d+r; 2*d; k)"
            " / poch(2*d+r; 2*d; k)",
            "parametric inner summand"),
    TermDef("lem5_1.lhs", "summand", "lem5_1", _lem5_1_lhs,
            "poch(ax+r; d; (n-r)/d - k) / poch(d-ax; d; (n-r)/d - k)",
            "length-(K-k) Pochhammer ratio at parameter q^ax"),
    TermDef("lem5_1.rhs", "summand", "lem5_1", _lem5_1_rhs,
            "(-1)^((n-r)/d) * qpow(ax*((n-r)/d - 2*k))"
            " * poch(ax+r; d; k) / poch(d-ax; d; k)"
            " * qpow((n-r)*(n-d+r)/(2*d) + (d-r)*k)",
            "reflected length-k Pochhammer ratio"),
    TermDef("lem6_5.lhs", "summand", "lem6_5", _lem6_5_lhs,
            "[2*d*k+1] * poch(1; d; k) * poch(1+ax; d; k) * poch(1-ax; d; k)"
            " * poch(1-bx; d; k) * qpow((bx+d-2)*k) / poch(d; d; k)"
            " / poch(d+ax; d; k) / poch(d-ax; d; k) / poch(d+bx; d; k)",
            "two-parameter triple-sum summand"),
    TermDef("lem6_5.rhs", "closed", "lem6_5", _lem6_5_rhs_closed,
            "[n]^3 * qpow(3*(bx-1)*(n-1)/d) * poch(2-bx; d; (n-1)/d)^3"
            " / poch(d+bx; d; (n-1)/d)^3",
            "closed-form right side in the bx parameter"),
    TermDef("lem6_6.lhs", "summand", "lem6_6", _lem6_5_lhs,
            "[2*d*k+1] * poch(1; d; k) * poch(1+ax; d; k) * poch(1-ax; d; k)"
            " * poch(1-bx; d; k) * qpow((bx+d-2)*k) / poch(d; d; k)"
            " / poch(d+ax; d; k) / poch(d-ax; d; k) / poch(d+bx; d; k)",
            "same two-parameter summand as lem6_5.lhs"),
    TermDef("lem6_6.rhs", "closed", "lem6_6", _lem6_6_rhs_closed,
            "[n]^3 * poch(1; d; (n-1)/d)^3 * poch(d-1; d; (n-1)/d)^3"
            " / poch(d+ax; d; (n-1)/d)^3 / poch(d-ax; d; (n-1)/d)^3",
            "closed-form right side in the ax parameter"),
]

REGISTRY: dict[str, TermDef] = {td.term_id: td for td in _DEFS}


def list_terms() -> list[TermDef]:
    return list(_DEFS)


def builtin_term(term_id: str, params: CaseParams) -> Callable[[int], RatFunc]:
    """Generator for the k-th summand of a registered term, as a RatFunc.

    The returned callable also carries a `.qvalue` attribute producing the
    factored QValue form, which the summation layer prefers.
    """
    td = REGISTRY.get(term_id)
    if td is None or td.kind != "summand":
        raise UnknownTerm(f"no built-in summand {term_id!r}")
    check_constraints(td.family, params)
    raw = td.builder(params)

    def gen(k: int) -> RatFunc:
        return raw(k).to_ratfunc()

    gen.qvalue = raw
    gen.term_id = term_id
    return gen


def builtin_closed(term_id: str, params: CaseParams) -> QValue:
    """A registered closed-form (sum-free) quantity as a QValue."""
    td = REGISTRY.get(term_id)
    if td is None or td.kind != "closed":
        raise UnknownTerm(f"no built-in closed form {term_id!r}")
    check_constraints(td.family, params)
    return td.builder(params)
