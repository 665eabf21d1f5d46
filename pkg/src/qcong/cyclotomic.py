"""Cyclotomic polynomials and factored congruence moduli.

Phi_n(q) is computed by exact division of q^n - 1 by the product of the
Phi_d(q) over proper divisors d, and memoized.  A Modulus keeps both the
factored form (needed by the checker, which reasons factor by factor) and
the expanded monic product (the actual divisor for remainder tests).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .polyring import IntPoly, poly_divrem

_lock = threading.Lock()
_cache: dict[int, IntPoly] = {1: IntPoly((-1, 1))}


def divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def cyclotomic(n: int) -> IntPoly:
    """The n-th cyclotomic polynomial Phi_n(q), monic over Z."""
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    got = _cache.get(n)
    if got is not None:
        return got
    num = IntPoly((-1,) + (0,) * (n - 1) + (1,))  # q^n - 1
    for d in divisors(n):
        if d < n:
            num, rem = poly_divrem(num, cyclotomic(d))
            assert rem.is_zero
    with _lock:
        _cache.setdefault(n, num)
    return num


def cyclotomic_neg(n: int) -> IntPoly:
    """Phi_n(-q), scaled by -1 if needed so the leading coefficient is 1."""
    p = cyclotomic(n)
    flipped = IntPoly(c if i % 2 == 0 else -c for i, c in enumerate(p.coeffs))
    if flipped.leading < 0:
        flipped = -flipped
    return flipped


def neg_index(n: int) -> int:
    """Index m with Phi_n(-q) = +-Phi_m(q); classical reindexing."""
    if n == 1:
        return 2
    if n == 2:
        return 1
    if n % 2 == 1:
        return 2 * n
    if n % 4 == 0:
        return n
    return n // 2  # n == 2 mod 4, n > 2


def qint_poly(m: int) -> IntPoly:
    """[m]_q = 1 + q + ... + q^(m-1)."""
    if m < 1:
        raise ValueError("q-integer index must be >= 1")
    return IntPoly((1,) * m)


@dataclass(frozen=True)
class Modulus:
    """Product of Phi_n(+-q) powers, optionally times a q-integer [m]."""

    factors: tuple[tuple[int, str, int], ...]  # (index, '+'|'-', exponent)
    include_qint: int | None
    expanded: IntPoly

    def degree(self) -> int:
        d = self.expanded.degree()
        return int(d) if self.expanded else 0

    def prime_map(self) -> dict[int, int]:
        """Multiplicity of each irreducible Phi_e(q) in the expanded modulus."""
        out: dict[int, int] = {}
        for idx, sign, exp in self.factors:
            e = idx if sign == "+" else neg_index(idx)
            out[e] = out.get(e, 0) + exp
        if self.include_qint:
            for e in divisors(self.include_qint):
                if e > 1:
                    out[e] = out.get(e, 0) + 1
        return out

    def describe(self) -> str:
        parts = []
        if self.include_qint:
            parts.append(f"[{self.include_qint}]")
        for idx, sign, exp in self.factors:
            s = f"phi({idx},{sign})"
            if exp != 1:
                s += f"^{exp}"
            parts.append(s)
        return " * ".join(parts) if parts else "1"


def modulus_build(factors, include_qint: int | None = None) -> Modulus:
    """Assemble a Modulus from (index, sign, exponent) triples."""
    norm = []
    prod = IntPoly.one()
    for idx, sign, exp in factors:
        if idx < 1:
            raise ValueError(f"cyclotomic index {idx} must be >= 1")
        if sign not in "+-":
            raise ValueError(f"factor sign must be '+' or '-', got {sign!r}")
        if exp < 1:
            raise ValueError(f"factor exponent {exp} must be >= 1")
        norm.append((idx, sign, exp))
        base = cyclotomic(idx) if sign == "+" else cyclotomic_neg(idx)
        prod = prod * base ** exp
    if include_qint is not None:
        if include_qint < 1:
            raise ValueError("q-integer factor must be >= 1")
        prod = prod * qint_poly(include_qint)
    assert prod.is_monic
    return Modulus(tuple(norm), include_qint, prod)
