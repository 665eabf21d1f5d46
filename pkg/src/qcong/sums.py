"""Truncated single, double, and triple convolution sums, plus brute-force
oracles for the structural convolution lemmas.

The double and triple sums are evaluated through prefix tables:

    sum_{k<=n-1} sum_{j<=k} c(j) c(k-j)        = sum_i c(i) * S(n-1-i)
    sum_{i+j+s<=n-1} c(i) c(j) c(s)            = sum_i c(i) * D(n-1-i)

with S the prefix sums of c and D the prefix sums of the diagonal
convolution.  This cuts the rational-function products from O(n^2) to O(n)
for the double sum (O(n^2) total for the triple).  The `*_literal` variants
keep the naive nested loops and exist to cross-check the reformulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .polyring import RatFunc
from .qterms import QValue


class SupportViolation(ValueError):
    """The vanishing hypothesis of the square-identity lemma fails."""


class HypothesisViolation(ValueError):
    """A lemma hypothesis (support, multiplicativity, symmetry) fails."""


def _qvalue_gen(gen) -> Callable[[int], QValue]:
    qv = getattr(gen, "qvalue", None)
    if qv is not None:
        return qv

    def wrap(k: int) -> QValue:
        v = gen(k)
        if isinstance(v, QValue):
            return v
        if isinstance(v, RatFunc):
            return QValue.from_ratfunc(v)
        return QValue.from_fraction(v)

    return wrap


def sum_qvalue(gen, upper: int) -> QValue:
    g = _qvalue_gen(gen)
    acc = QValue.zero()
    for k in range(upper + 1):
        acc = acc + g(k)
    return acc


def single_sum(gen, upper: int) -> RatFunc:
    """sum_{k=0}^{upper} gen(k), exact."""
    return sum_qvalue(gen, upper).to_ratfunc()


def double_sum_qvalue(gen, n: int) -> QValue:
    g = _qvalue_gen(gen)
    terms = [g(k) for k in range(n)]
    prefix = []
    acc = QValue.zero()
    for t in terms:
        acc = acc + t
        prefix.append(acc)
    total = QValue.zero()
    for i, t in enumerate(terms):
        total = total + t * prefix[n - 1 - i]
    return total


def double_sum(gen, n: int) -> RatFunc:
    """sum_{k=0}^{n-1} sum_{j=0}^{k} gen(j) gen(k-j), via the prefix table."""
    if n < 1:
        raise ValueError("double_sum needs n >= 1")
    return double_sum_qvalue(gen, n).to_ratfunc()


def triple_sum_qvalue(gen, n: int) -> QValue:
    g = _qvalue_gen(gen)
    terms = [g(k) for k in range(n)]
    # diag[m] = sum_{j=0}^{m} c(j) c(m-j), using symmetry of the pairs
    diag = []
    for m in range(n):
        acc = QValue.zero()
        for j in range(m // 2 + 1):
            p = terms[j] * terms[m - j]
            acc = acc + (p if 2 * j == m else p * 2)
        diag.append(acc)
    dprefix = []
    acc = QValue.zero()
    for t in diag:
        acc = acc + t
        dprefix.append(acc)
    total = QValue.zero()
    for i, t in enumerate(terms):
        total = total + t * dprefix[n - 1 - i]
    return total


def triple_sum(gen, n: int) -> RatFunc:
    """sum over i, j, s >= 0 with i+j+s <= n-1 of gen(i) gen(j) gen(s)."""
    if n < 1:
        raise ValueError("triple_sum needs n >= 1")
    return triple_sum_qvalue(gen, n).to_ratfunc()


def double_sum_literal(gen, n: int) -> RatFunc:
    g = _qvalue_gen(gen)
    terms = [g(k) for k in range(n)]
    acc = QValue.zero()
    for k in range(n):
        for j in range(k + 1):
            acc = acc + terms[j] * terms[k - j]
    return acc.to_ratfunc()


def triple_sum_literal(gen, n: int) -> RatFunc:
    g = _qvalue_gen(gen)
    terms = [g(k) for k in range(n)]
    acc = QValue.zero()
    for i in range(n):
        for j in range(n - i):
            for s in range(n - i - j):
                acc = acc + terms[i] * terms[j] * terms[s]
    return acc.to_ratfunc()


@dataclass(frozen=True)
class PrefixTable:
    """Terms c(0..n-1) and their running sums S_m = sum_{i<=m} c(i)."""

    terms: tuple[RatFunc, ...]
    prefix: tuple[RatFunc, ...]


def prefix_table(gen, n: int) -> PrefixTable:
    g = _qvalue_gen(gen)
    terms = [g(k) for k in range(n)]
    prefix = []
    acc = QValue.zero()
    for t in terms:
        acc = acc + t
        prefix.append(acc)
    return PrefixTable(tuple(t.to_ratfunc() for t in terms),
                       tuple(s.to_ratfunc() for s in prefix))


# ---------------------------------------------------------------------------
# brute-force oracles over exact rationals

def _frac_seq(c: Sequence) -> list[Fraction]:
    return [Fraction(x) for x in c]


def oracle_square_identity(c: Sequence, n: int, d: int, r: int) -> bool:
    """Convolution square identity: with c vanishing on ((n-r)/d, n-1], the
    full double sum collapses to the square of the short partial sum."""
    c = _frac_seq(c)
    if len(c) < n:
        raise SupportViolation("sequence shorter than n")
    if d < 2:
        raise SupportViolation("d >= 2 required")
    if (n - r) % d:
        raise SupportViolation("n == r (mod d) required")
    if 2 * r < 2 * n - (n - 1) * d:
        raise SupportViolation("r below the admissible window")
    if r > n:
        raise SupportViolation("r > n")
    big_k = (n - r) // d
    for i in range(big_k + 1, n):
        if c[i] != 0:
            raise SupportViolation(f"c({i}) != 0 inside the vanishing range")
    lhs = sum(c[j] * c[k - j] for k in range(n) for j in range(k + 1))
    rhs = sum(c[:big_k + 1]) ** 2
    return lhs == rhs


def _check_periodic(c: list[Fraction], n: int, length: int) -> None:
    """Support-within-window and multiplicativity hypotheses shared by the
    shift identities: c on [0, n-1] lives on [0, (n-1)/2] with c(0) = 1, and
    c(l*n + k) = c(l*n) * c(k) throughout the supplied prefix."""
    support = [i for i in range(min(n, len(c))) if c[i] != 0]
    if support:
        if c[0] != 1:
            raise HypothesisViolation("c(0) != 1")
        if 2 * support[-1] > n - 1:
            raise HypothesisViolation("support exceeds half the period")
    for idx in range(n, length):
        ln = (idx // n) * n
        if c[idx] != c[ln] * c[idx - ln]:
            raise HypothesisViolation(f"c({idx}) != c({ln}) * c({idx - ln})")


def oracle_shift_identity(c: Sequence, n: int, l: int, k: int) -> bool:
    """Periodized convolution identity for multiplicative sequences."""
    c = _frac_seq(c)
    if not 0 <= k <= n - 1:
        raise HypothesisViolation("k outside [0, n-1]")
    top = l * n + k
    if len(c) < top + 1:
        raise HypothesisViolation("sequence shorter than l*n + k + 1")
    _check_periodic(c, n, top + 1)
    lhs = sum(c[j] * c[top - j] for j in range(top + 1))
    rhs = (sum(c[t * n] * c[(l - t) * n] for t in range(l + 1))
           * sum(c[j] * c[k - j] for j in range(k + 1)))
    return lhs == rhs


def oracle_triple_identities(c: Sequence, n: int, d: int, r: int,
                             l: int, k: int) -> bool:
    """Both triple-sum analogs: the cube collapse and the shift identity."""
    c = _frac_seq(c)
    if d < 3:
        raise HypothesisViolation("d >= 3 required")
    if (n - r) % d:
        raise HypothesisViolation("n == r (mod d) required")
    if 3 * (n - r) > d * (n - 1):
        raise HypothesisViolation("r below the admissible window")
    if r > n:
        raise HypothesisViolation("r > n")
    if not 0 <= k <= n - 1:
        raise HypothesisViolation("k outside [0, n-1]")
    top = l * n + k
    if len(c) < max(n, top + 1):
        raise HypothesisViolation("sequence too short")
    big_k = (n - r) // d
    for i in range(big_k + 1, n):
        if c[i] != 0:
            raise HypothesisViolation(f"c({i}) != 0 inside the vanishing range")
    if l > 0:
        _check_periodic(c, n, top + 1)

    cube_lhs = sum(c[i] * c[j] * c[s]
                   for i in range(n) for j in range(n - i)
                   for s in range(n - i - j))
    cube_ok = cube_lhs == sum(c[:big_k + 1]) ** 3

    shift_lhs = sum(c[i] * c[j] * c[top - i - j]
                    for i in range(top + 1) for j in range(top + 1 - i))
    shift_rhs = (sum(c[a * n] * sum(c[t * n] * c[(l - a - t) * n]
                                    for t in range(l - a + 1))
                     for a in range(l + 1))
                 * sum(c[i] * sum(c[j] * c[k - i - j] for j in range(k - i + 1))
                       for i in range(k + 1)))
    return cube_ok and shift_lhs == shift_rhs


def oracle_antisymmetry(a: Sequence, n: int) -> bool:
    """Double sum of an antisymmetric sequence vanishes."""
    a = _frac_seq(a)
    if n % 2 == 0:
        raise HypothesisViolation("n must be odd")
    if len(a) != n:
        raise HypothesisViolation("sequence must have length n")
    half = (n - 1) // 2
    for k in range(half + 1):
        if a[k] != -a[half - k]:
            raise HypothesisViolation(f"a({k}) != -a({half - k})")
    for k in range(half + 1, n):
        if a[k] != -a[(3 * n - 1) // 2 - k]:
            raise HypothesisViolation(f"a({k}) != -a({(3 * n - 1) // 2 - k})")
    return sum(a[j] * a[k - j] for k in range(n) for j in range(k + 1)) == 0
