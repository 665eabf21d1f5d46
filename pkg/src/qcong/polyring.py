"""Exact arithmetic in Z[q] and its fraction field.

Polynomials are dense integer coefficient vectors (index i = coefficient of
q^i, no trailing zeros).  Everything downstream -- cyclotomic moduli,
q-Pochhammer products, convolution sums -- reduces to the operations here,
so the big multiplications go through Kronecker substitution (pack the
coefficients into one huge int, multiply once in C, unpack) and the gcd of
large operands goes through a certified modular algorithm.  Results are
always exact; the fast paths are algebraically identical to the schoolbook
ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

MINUS_INFINITY = float("-inf")  # degree of the zero polynomial

_KRONECKER_CUTOFF = 4096     # schoolbook below len(a)*len(b) of this
_NEWTON_CUTOFF = 120_000     # schoolbook divrem below (da-dm+1)*dm of this


class NonMonicDivisor(ValueError):
    """poly_divrem requires a monic divisor so division stays in Z[q]."""


class BothZero(ValueError):
    """gcd(0, 0) is undefined."""


class DivideByZero(ZeroDivisionError):
    pass


class PoleAtPoint(ZeroDivisionError):
    """The reduced denominator vanishes at the evaluation point."""


# ---------------------------------------------------------------------------
# raw coefficient-list helpers (private, performance-sensitive)

def _trim(cs: list[int]) -> list[int]:
    n = len(cs)
    while n and cs[n - 1] == 0:
        n -= 1
    del cs[n:]
    return cs


def _add(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _sub(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return _trim(out)


def _neg(a: Sequence[int]) -> list[int]:
    return [-c for c in a]


def _mul_school(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(a):
        if c:
            for j, d in enumerate(b):
                if d:
                    out[i + j] += c * d
    return _trim(out)


def _pack(cs: Sequence[int], width: int) -> int:
    """Pack nonnegative coefficients into slots of `width` bytes."""
    buf = bytearray(len(cs) * width)
    for i, c in enumerate(cs):
        if c:
            nb = (c.bit_length() + 7) // 8
            off = i * width
            buf[off:off + nb] = c.to_bytes(nb, "little")
    return int.from_bytes(buf, "little")


def _unpack(x: int, width: int, count: int) -> list[int]:
    raw = x.to_bytes(count * width + 8, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little")
            for i in range(count)]


def _mul_kron(a: Sequence[int], b: Sequence[int]) -> list[int]:
    # Any coefficient of a*b is bounded by min(len) * max|a| * max|b|, and the
    # sign-split partial products below are each bounded by the same quantity,
    # so one byte of headroom on that bound sizes the slots.
    amax = max(map(abs, a))
    bmax = max(map(abs, b))
    bound = min(len(a), len(b)) * amax * bmax
    width = bound.bit_length() // 8 + 1
    ap = _pack([c if c > 0 else 0 for c in a], width)
    an = _pack([-c if c < 0 else 0 for c in a], width)
    bp = _pack([c if c > 0 else 0 for c in b], width)
    bn = _pack([-c if c < 0 else 0 for c in b], width)
    u = ap * bp
    v = an * bn
    t = (ap + an) * (bp + bn)
    count = len(a) + len(b) - 1
    pos = _unpack(u + v, width, count)
    neg = _unpack(t - u - v, width, count)
    return _trim([x - y for x, y in zip(pos, neg)])


def _mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if len(a) * len(b) <= _KRONECKER_CUTOFF:
        return _mul_school(a, b)
    return _mul_kron(a, b)


def _mul_trunc(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = _mul(a[:n], b[:n])
    return _trim(out[:n])


def _divrem_school(a: Sequence[int], m: Sequence[int]) -> tuple[list[int], list[int]]:
    dm = len(m) - 1
    rem = list(a)
    quot = [0] * (len(a) - dm)
    for i in range(len(a) - 1, dm - 1, -1):
        c = rem[i]
        if c:
            quot[i - dm] = c
            off = i - dm
            for j in range(dm):
                rem[off + j] -= c * m[j]
            rem[i] = 0
    return _trim(quot), _trim(rem[:dm])


def _series_inv(f: Sequence[int], prec: int) -> list[int]:
    """Power-series inverse of f with f[0] == 1, over Z, mod q^prec."""
    g = [1]
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        fg = _mul_trunc(list(f[:k]), g, k)
        t = [-c for c in fg]
        if t:
            t[0] += 2
        else:
            t = [2]
        g = _mul_trunc(g, t, k)
    return g


def _divrem_newton(a: Sequence[int], m: Sequence[int]) -> tuple[list[int], list[int]]:
    # Reverse-and-invert division; exact over Z because m is monic.
    da, dm = len(a) - 1, len(m) - 1
    dq = da - dm
    ra = list(a[::-1])
    rm = list(m[::-1])
    inv = _series_inv(rm, dq + 1)
    rq = _mul_trunc(ra[: dq + 1], inv, dq + 1)
    rq += [0] * (dq + 1 - len(rq))
    quot = _trim(rq[::-1])
    mq = _mul(list(m), quot) if quot else []
    rem = _sub(list(a), mq)
    return quot, _trim(rem[:dm])


def _divrem(a: Sequence[int], m: Sequence[int]) -> tuple[list[int], list[int]]:
    if not m:
        raise DivideByZero("division by the zero polynomial")
    if len(a) < len(m):
        return [], _trim(list(a))
    dm = len(m) - 1
    if dm == 0:  # constant monic divisor == 1
        return _trim(list(a)), []
    work = (len(a) - dm) * dm
    if work <= _NEWTON_CUTOFF or len(a) - len(m) < 64:
        return _divrem_school(a, m)
    return _divrem_newton(a, m)


def _div_exact(a: Sequence[int], g: Sequence[int]) -> list[int] | None:
    """Quotient a/g over Z if it exists (g primitive), else None."""
    if not a:
        return []
    if len(a) < len(g):
        return None
    lg = g[-1]
    dg = len(g) - 1
    rem = list(a)
    quot = [0] * (len(a) - dg)
    for i in range(len(a) - 1, dg - 1, -1):
        c = rem[i]
        if c:
            if c % lg:
                return None
            f = c // lg
            quot[i - dg] = f
            off = i - dg
            for j in range(dg):
                rem[off + j] -= f * g[j]
            rem[i] = 0
    if any(rem[:dg]):
        return None
    return _trim(quot)


def _content(a: Sequence[int]) -> int:
    import math
    c = 0
    for x in a:
        c = math.gcd(c, x)
        if c == 1:
            return 1
    return c


def _primitive(a: Sequence[int]) -> tuple[list[int], int]:
    """(primitive part with positive leading coefficient, signed content)."""
    if not a:
        return [], 0
    c = _content(a)
    if a[-1] < 0:
        c = -c
    return [x // c for x in a], c


# ---------------------------------------------------------------------------
# gcd: primitive PRS for small operands, certified modular for big ones

_P30 = [(1 << 30) - k for k in
        (35, 41, 83, 99, 101, 105, 107, 135, 153, 161, 173, 203, 273, 281,
         293, 299, 311, 317, 335, 341, 371, 387, 399, 431, 443, 455, 461,
         473, 485, 491, 527, 531, 539, 545, 557, 563, 573, 581, 587, 621)]
# all entries are prime (checked in the test suite)


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder: lc(b)^(da-db+1) * a mod b, computed in Z."""
    da, db = len(a) - 1, len(b) - 1
    lb = b[-1]
    rem = list(a)
    for i in range(da, db - 1, -1):
        c = rem[i]
        for j in range(i):
            rem[j] *= lb
        if c:
            off = i - db
            for j in range(db):
                rem[off + j] -= c * b[j]
        rem[i] = 0
    return _trim(rem[:db])


def _gcd_prs(a: list[int], b: list[int]) -> list[int]:
    f, _ = _primitive(a)
    g, _ = _primitive(b)
    if len(f) < len(g):
        f, g = g, f
    while g:
        r = _prem(f, g)
        f, g = g, _primitive(r)[0]
    return f


def _mod_array(a: Sequence[int], p: int) -> np.ndarray:
    return np.array([c % p for c in a], dtype=np.int64)


def _np_trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if len(nz) else a[:0]


def _np_polymod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    db = len(b) - 1
    if len(a) - 1 < db:
        return a.copy()
    inv = pow(int(b[-1]), -1, p)
    r = a.copy()
    for i in range(len(a) - 1, db - 1, -1):
        c = int(r[i])
        if c:
            f = (c * inv) % p
            r[i - db:i] = (r[i - db:i] - f * b[:db]) % p
            r[i] = 0
    return _np_trim(r[:db])


def _gcd_mod_p(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    while len(b):
        a, b = b, _np_polymod(a, b, p)
    if len(a):
        a = (a * pow(int(a[-1]), -1, p)) % p
    return a


def _crt_update(res: list[int], mod: int, new: list[int], p: int) -> tuple[list[int], int]:
    inv = pow(mod % p, -1, p)
    m2 = mod * p
    half = m2 // 2
    out = []
    for i in range(max(len(res), len(new))):
        x = res[i] if i < len(res) else 0
        y = new[i] if i < len(new) else 0
        t = (x + mod * (((y - x) * inv) % p)) % m2
        if t > half:
            t -= m2
        out.append(t)
    return out, m2


def _gcd_modular(a: list[int], b: list[int]) -> list[int]:
    import math
    fa, ca = _primitive(a)
    fb, cb = _primitive(b)
    lc_g = math.gcd(fa[-1], fb[-1])
    best_deg = None
    res: list[int] = []
    mod = 1
    stable = 0
    for p in _P30:
        if fa[-1] % p == 0 or fb[-1] % p == 0:
            continue
        gp = _gcd_mod_p(_mod_array(fa, p), _mod_array(fb, p), p)
        dg = len(gp) - 1
        if dg == 0:
            return [1]
        if best_deg is None or dg < best_deg:
            best_deg = dg
            res, mod, stable = [], 1, 0
        elif dg > best_deg:
            continue  # unlucky prime
        scaled = [(int(c) * lc_g) % p for c in gp]
        if mod == 1:
            half = p // 2
            res = [c - p if c > half else c for c in scaled]
            mod = p
        else:
            prev = list(res)
            res, mod = _crt_update(res, mod, scaled, p)
            stable = stable + 1 if res == prev else 0
        if stable >= 1:
            cand, _ = _primitive(list(res))
            if cand and _div_exact(fa, cand) is not None and _div_exact(fb, cand) is not None:
                # cand divides both and deg(cand) >= deg(gcd), hence cand = gcd
                return cand
    raise ArithmeticError("modular gcd failed to stabilize")  # pragma: no cover


def _gcd(a: list[int], b: list[int]) -> list[int]:
    if not a and not b:
        raise BothZero("gcd(0, 0) is undefined")
    if not a:
        return _primitive(b)[0]
    if not b:
        return _primitive(a)[0]
    if max(len(a), len(b)) <= 24:
        return _gcd_prs(list(a), list(b))
    return _gcd_modular(list(a), list(b))


# ---------------------------------------------------------------------------
# public polynomial type

@dataclass(frozen=True, init=False)
class IntPoly:
    """Dense univariate polynomial over Z; coeffs[i] is the q^i coefficient."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        _trim(cs)
        object.__setattr__(self, "coeffs", tuple(cs))

    # -- constructors
    @staticmethod
    def zero() -> "IntPoly":
        return IntPoly(())

    @staticmethod
    def one() -> "IntPoly":
        return IntPoly((1,))

    @staticmethod
    def monomial(k: int, c: int = 1) -> "IntPoly":
        if c == 0:
            return IntPoly(())
        return IntPoly((0,) * k + (c,))

    # -- queries
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self):
        """Degree, or MINUS_INFINITY for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else MINUS_INFINITY

    @property
    def leading(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def trailing_zeros(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def content(self) -> int:
        return _content(self.coeffs)

    def primitive(self) -> "IntPoly":
        return IntPoly(_primitive(self.coeffs)[0])

    # -- arithmetic
    def __add__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly(_add(self.coeffs, other.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly(_sub(self.coeffs, other.coeffs))

    def __neg__(self) -> "IntPoly":
        return IntPoly(_neg(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly([c * other for c in self.coeffs])
        return IntPoly(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = IntPoly.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def shift(self, k: int) -> "IntPoly":
        """Multiply by q^k (k >= 0)."""
        if self.is_zero:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def evaluate(self, point: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return Fraction(acc)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "IntPoly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            term = "1" if i == 0 else ("q" if i == 1 else f"q^{i}")
            if i > 0 and abs(c) != 1:
                term = f"{abs(c)}*{term}"
            elif i == 0:
                term = str(abs(c))
            parts.append(("- " if c < 0 else "+ " if parts else "") + term)
        s = " ".join(parts)
        return f"IntPoly({s})" if not s.startswith("- ") else f"IntPoly(-{s[2:]})"


def poly_arith(a: IntPoly, b: IntPoly, op: str) -> IntPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_divrem(a: IntPoly, m: IntPoly) -> tuple[IntPoly, IntPoly]:
    if m.is_zero or m.coeffs[-1] != 1:
        raise NonMonicDivisor("divisor must be monic")
    quot, rem = _divrem(a.coeffs, m.coeffs)
    return IntPoly(quot), IntPoly(rem)


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    return IntPoly(_gcd(list(a.coeffs), list(b.coeffs)))


def divides(g: IntPoly, a: IntPoly) -> bool:
    """Exact divisibility over the rationals (g nonzero)."""
    if g.is_zero:
        raise DivideByZero("zero divisor")
    if a.is_zero:
        return True
    gp = _primitive(g.coeffs)[0]
    return _div_exact(a.coeffs, gp) is not None


# ---------------------------------------------------------------------------
# reduced fractions

class RatFunc:
    """Fully reduced fraction scalar * num/den over Z[q].

    num and den are primitive with positive leading coefficient, den nonzero,
    gcd(num, den) constant; the rational content and overall sign live in
    scalar.  Zero is (0, 1, Fraction(1)).
    """

    __slots__ = ("num", "den", "scalar", "_den_phi")

    def __init__(self, num: IntPoly, den: IntPoly = IntPoly((1,)),
                 scalar: Fraction = Fraction(1), _reduced: bool = False,
                 _den_phi: tuple | None = None):
        if den.is_zero:
            raise DivideByZero("zero denominator")
        if not _reduced:
            num, den, scalar = _reduce_fraction(num, den, scalar)
            _den_phi = None
        self.num = num
        self.den = den
        self.scalar = scalar
        # optional factorization hint: ((phi_index, multiplicity), ...) with
        # an extra (0, t) entry carrying a q^t factor; trusted by the checker
        self._den_phi = _den_phi

    # -- constructors
    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc(IntPoly.zero(), IntPoly.one(), Fraction(1), _reduced=True)

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc(IntPoly.one(), IntPoly.one(), Fraction(1), _reduced=True)

    @staticmethod
    def from_fraction(x: Fraction | int) -> "RatFunc":
        x = Fraction(x)
        if x == 0:
            return RatFunc.zero()
        return RatFunc(IntPoly.one(), IntPoly.one(), x, _reduced=True)

    @staticmethod
    def from_poly(p: IntPoly) -> "RatFunc":
        return RatFunc(p, IntPoly.one(), Fraction(1))

    # -- queries
    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self.num, self.den, self.scalar) == (other.num, other.den, other.scalar)

    def __hash__(self):
        return hash((self.num, self.den, self.scalar))

    # -- arithmetic
    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        g = poly_gcd(self.den, other.den)
        da = IntPoly(_div_exact(self.den.coeffs, g.coeffs))
        db = IntPoly(_div_exact(other.den.coeffs, g.coeffs))
        # value = sa*na/(g*da) + sb*nb/(g*db)
        pa, qa = self.scalar.numerator, self.scalar.denominator
        pb, qb = other.scalar.numerator, other.scalar.denominator
        num = (self.num * db) * (pa * qb) + (other.num * da) * (pb * qa)
        den = self.den * db
        return RatFunc(num, den, Fraction(1, qa * qb))

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __neg__(self) -> "RatFunc":
        if self.is_zero:
            return self
        return RatFunc(self.num, self.den, -self.scalar, _reduced=True,
                       _den_phi=self._den_phi)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0 or self.is_zero:
                return RatFunc.zero()
            return RatFunc(self.num, self.den, self.scalar * other,
                           _reduced=True, _den_phi=self._den_phi)
        if self.is_zero or other.is_zero:
            return RatFunc.zero()
        # cross-cancel before multiplying to keep the gcds small
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        n1 = IntPoly(_div_exact(self.num.coeffs, g1.coeffs))
        d2 = IntPoly(_div_exact(other.den.coeffs, g1.coeffs))
        n2 = IntPoly(_div_exact(other.num.coeffs, g2.coeffs))
        d1 = IntPoly(_div_exact(self.den.coeffs, g2.coeffs))
        return RatFunc(n1 * n2, d1 * d2, self.scalar * other.scalar)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero:
            raise DivideByZero("division by zero rational function")
        inv = RatFunc(other.den, other.num, 1 / other.scalar)
        return self * inv

    def evaluate(self, point: Fraction | int) -> Fraction:
        dv = self.den.evaluate(point)
        if dv == 0:
            raise PoleAtPoint(f"pole at q = {point}")
        return self.scalar * self.num.evaluate(point) / dv

    def __repr__(self) -> str:
        s = f"({self.scalar}) * " if self.scalar != 1 else ""
        if self.den == IntPoly.one():
            return f"RatFunc[{s}{self.num!r}]"
        return f"RatFunc[{s}{self.num!r} / {self.den!r}]"


def _reduce_fraction(num: IntPoly, den: IntPoly, scalar: Fraction):
    if num.is_zero or scalar == 0:
        return IntPoly.zero(), IntPoly.one(), Fraction(1)
    pn, cn = _primitive(num.coeffs)
    pd, cd = _primitive(den.coeffs)
    scalar = scalar * Fraction(cn, cd)
    g = _gcd(pn, pd)
    if len(g) > 1:
        pn = _div_exact(pn, g)
        pd = _div_exact(pd, g)
    num = IntPoly(pn)
    den = IntPoly(pd)
    if num.leading < 0:
        num, scalar = -num, -scalar
    return num, den, scalar


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def eval_rational(x: RatFunc, point: Fraction | int) -> Fraction:
    return x.evaluate(Fraction(point))


# shared helpers for the cyclotomic cancellation done in qterms/checker

def phi_multiplicity(num: IntPoly, phi: IntPoly, cap: int, premod=None) -> int:
    """Multiplicity of the monic irreducible `phi` in `num`, at most `cap`.

    `premod` is an optional (array mod p, p) image of num used to skip exact
    divisions that are doomed: a nonzero remainder mod p certifies a nonzero
    remainder over Z.
    """
    if num.is_zero or cap <= 0:
        return cap if num.is_zero else 0
    if premod is not None:
        # multiplicity mod p bounds the multiplicity over Z from above
        arr, p = premod
        phi_p = _mod_array(phi.coeffs, p)
        m = 0
        a = arr
        while m < cap and len(a) >= len(phi_p):
            quot, rem = _np_divmod(a, phi_p, p)
            if len(rem):
                break
            a = quot
            m += 1
        if m == 0:
            return 0
        cap = min(cap, m)
    mult = 0
    cur = num
    while mult < cap:
        quot, rem = poly_divrem(cur, phi)
        if not rem.is_zero:
            break
        cur = quot
        mult += 1
    return mult


def _np_divmod(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    db = len(b) - 1
    inv = pow(int(b[-1]), -1, p)
    r = a.copy()
    quot = np.zeros(max(len(a) - db, 0), dtype=np.int64)
    for i in range(len(a) - 1, db - 1, -1):
        c = int(r[i])
        if c:
            f = (c * inv) % p
            quot[i - db] = f
            r[i - db:i] = (r[i - db:i] - f * b[:db]) % p
            r[i] = 0
    return _np_trim(quot), _np_trim(r[:db])


PHI_FILTER_PRIME = _P30[0]


def mod_image(p: IntPoly, prime: int = PHI_FILTER_PRIME) -> tuple[np.ndarray, int]:
    return _mod_array(p.coeffs, prime), prime
