"""Decide L == R (mod M) for rational functions and factored cyclotomic
moduli, and run the specialization checks for the parametric lemmas.

Congruence of rational functions modulo a polynomial M means: writing the
reduced difference L - R = A/B, the numerator A is divisible by M and the
denominator B is coprime to M.  Because every modulus here is a known
product of irreducible cyclotomics Phi_e(q)^c, that is equivalent to

    mult_e(numerator of the cross difference) - mult_e(den_L) - mult_e(den_R) >= c

for every prime factor, where mult_e counts Phi_e multiplicity.  The checker
works with those multiplicities directly (the reduced difference is never
materialized), which also yields the achieved exponent per factor for free;
`probe` just raises the reporting cap.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .cases import CaseSpec, eval_form_text, parse_modulus
from .cyclotomic import Modulus, cyclotomic, modulus_build, neg_index
from .polyring import (DivideByZero, IntPoly, RatFunc, mod_image,
                       phi_multiplicity)
from .qterms import (CaseParams, ConstraintViolation, QValue, builtin_closed,
                     builtin_term, check_constraints, q_pow, qint_qv,
                     sign_pow)
from .sums import double_sum_qvalue, sum_qvalue, triple_sum_qvalue
from .termlang import compiled_term, eval_qvalue, parse_term

PROBE_MARGIN = 2  # report this many exponent levels beyond the stated one


class DegenerateSpecialization(ValueError):
    """A sampled exponent makes a denominator factor vanish or collide with
    the modulus; the sample is skipped and reported."""


@dataclass(frozen=True)
class Witness:
    failed_factor: str | None = None
    remainder_digest: str | None = None
    gcd_obstruction: IntPoly | None = None
    remainder: IntPoly | None = None   # full remainder, on request only
    detail: str = ""


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Witness | None = None
    strength: dict[str, int] | None = None
    skipped: tuple[str, ...] = ()

    def __post_init__(self):
        assert not (self.holds and self.witness is not None)


def _digest(p: IntPoly) -> str:
    return hashlib.sha256(repr(p.coeffs).encode()).hexdigest()[:16]


def _den_multiplicity(rf: RatFunc, e: int) -> int:
    hint = getattr(rf, "_den_phi", None)
    if hint is not None:
        for idx, mult in hint:
            if idx == e:
                return mult
        return 0
    phi = cyclotomic(e)
    deg = int(phi.degree())
    cap = (int(rf.den.degree()) // deg + 1) if rf.den.degree() >= deg else 0
    if cap == 0:
        return 0
    return phi_multiplicity(rf.den, phi, cap, mod_image(rf.den))


def check_congruence(lhs: RatFunc, rhs: RatFunc, m: Modulus,
                     max_exponent: int | None = None,
                     keep_remainder: bool = False) -> Verdict:
    """Verdict for lhs == rhs mod m, plus achieved strength per factor."""
    if m.expanded.degree() < 1:
        raise ValueError("modulus must be nonconstant")
    # cross difference; integer scalars do not affect divisibility by a monic M
    pl, ql = lhs.scalar.numerator, lhs.scalar.denominator
    pr, qr = rhs.scalar.numerator, rhs.scalar.denominator
    dnum = (lhs.num * rhs.den) * (pl * qr) - (rhs.num * lhs.den) * (pr * ql)
    primes = m.prime_map()
    report_cap = max(max(primes.values()) + PROBE_MARGIN, max_exponent or 0)
    img = None if dnum.is_zero else mod_image(dnum)

    avail: dict[int, int] = {}
    for e, c in primes.items():
        beta = _den_multiplicity(lhs, e) + _den_multiplicity(rhs, e)
        if dnum.is_zero:
            avail[e] = report_cap
            continue
        alpha = phi_multiplicity(dnum, cyclotomic(e), report_cap + beta, img)
        avail[e] = min(alpha - beta, report_cap)

    failing = [e for e, c in primes.items() if avail[e] < c]
    strength = _factor_strengths(m, primes, avail, report_cap)
    if not failing:
        return Verdict(True, strength=strength)

    fail_names = _factor_names_for(m, failing)
    obstruction = None
    neg = {e: -avail[e] for e in failing if avail[e] < 0}
    if neg:
        g = IntPoly.one()
        for e, over in neg.items():
            g = g * cyclotomic(e) ** min(over, primes[e])
        obstruction = g
    rem_digest = rem_poly = None
    if not dnum.is_zero:
        from .polyring import poly_divrem
        _, rem = poly_divrem(dnum, m.expanded)
        rem_digest = _digest(rem)
        if keep_remainder:
            rem_poly = rem
    witness = Witness(failed_factor=", ".join(fail_names),
                      remainder_digest=rem_digest,
                      gcd_obstruction=obstruction, remainder=rem_poly,
                      detail="; ".join(
                          f"phi_{e} available {avail[e]}, need {primes[e]}"
                          for e in failing))
    return Verdict(False, witness=witness, strength=strength)


def _factor_names_for(m: Modulus, failing: list[int]) -> list[str]:
    names = []
    for idx, sign, exp in m.factors:
        e = idx if sign == "+" else neg_index(idx)
        if e in failing:
            names.append(f"phi({idx},{sign})^{exp}")
    if m.include_qint:
        from .cyclotomic import divisors
        if any(e in failing for e in divisors(m.include_qint) if e > 1):
            names.append(f"[{m.include_qint}]")
    return names or [f"phi_{e}" for e in failing]


def _factor_strengths(m: Modulus, primes: dict[int, int],
                      avail: dict[int, int], cap: int) -> dict[str, int]:
    """Max exponent each declared factor could take, others held as stated."""
    from .cyclotomic import divisors
    qint_primes = set()
    if m.include_qint:
        qint_primes = {e for e in divisors(m.include_qint) if e > 1}
    out = {}
    for idx, sign, exp in m.factors:
        e = idx if sign == "+" else neg_index(idx)
        others = primes[e] - exp
        out[f"phi({idx},{sign})"] = min(avail[e] - others, cap)
    if m.include_qint:
        vals = [avail[e] - (primes[e] - 1) for e in qint_primes]
        out[f"[{m.include_qint}]"] = min(min(vals), cap) if vals else cap
    return out


def exact_equal(a: QValue, b: QValue) -> bool:
    return (a - b).is_zero


# ---------------------------------------------------------------------------
# case verification

def _summand_gen(case: CaseSpec, side: str, params: CaseParams):
    term = getattr(case, f"{side}_term")
    source = getattr(case, f"{side}_source")
    if term:
        return builtin_term(term, params)
    extras = tuple(params.extras())
    return compiled_term(source, params, extras)


def _assert_k_free(ast) -> None:
    for f in ast.factors:
        for name in ("exponent", "base", "step", "length", "arg"):
            form = getattr(f, name, None)
            if form is not None and not form.is_free_of("k"):
                raise ValueError("prefactor must not involve k")


def _prefactor(case: CaseSpec, params: CaseParams) -> QValue:
    if not case.rhs_prefactor:
        return QValue.one()
    ast = parse_term(case.rhs_prefactor, tuple(params.extras()))
    _assert_k_free(ast)
    return eval_qvalue(ast, params, 0)


def _rhs_qvalue(case: CaseSpec, params: CaseParams) -> QValue:
    pref = _prefactor(case, params)
    term = case.rhs_term
    from .qterms import REGISTRY
    if term and term in REGISTRY and REGISTRY[term].kind == "closed":
        return pref * builtin_closed(term, params)
    if term or case.rhs_source:
        if not case.rhs_upper:
            raise ValueError(f"{case.id}: rhs inner sum needs an upper bound")
        upper = eval_form_text(case.rhs_upper, params)
        inner = sum_qvalue(_summand_gen(case, "rhs", params), upper)
        return pref * inner ** case.rhs_power
    return pref


def verify_case(case: CaseSpec, max_exponent: int | None = None,
                keep_remainder: bool = False) -> Verdict:
    """Build both sides of a declared sum congruence and check it."""
    case.validate()
    params = case.params
    if case.kind == "padic":
        from .padic import check_padic, make_claim
        return check_padic(make_claim(case.claim, params.n))
    if case.kind == "crt":
        return check_crt_identities(params.n, params.get("a_exp"),
                                    params.get("b_exp"))
    if case.kind == "specialization":
        return verify_specialization(case)
    if case.family:
        check_constraints(case.family, params)
    gen = _summand_gen(case, "lhs", params)
    if case.kind == "double_sum":
        lhs = double_sum_qvalue(gen, params.n)
    elif case.kind == "triple_sum":
        lhs = triple_sum_qvalue(gen, params.n)
    else:
        upper = eval_form_text(case.lhs_upper, params)
        lhs = sum_qvalue(gen, upper)
    rhs = _rhs_qvalue(case, params)
    modulus = parse_modulus(case.modulus_text, params)
    return check_congruence(lhs.to_ratfunc(), rhs.to_ratfunc(), modulus,
                            max_exponent=max_exponent,
                            keep_remainder=keep_remainder)


# ---------------------------------------------------------------------------
# specialization checks for the parametric lemmas

DEFAULT_SAMPLE_OFFSETS = (1, 2, 3, "n+1", "n+2")


def _sample_js(n: int, samples: tuple[int, ...] | None) -> list[int]:
    if samples is not None:
        return list(samples)
    return [1, 2, 3, n + 1, n + 2]


def _den_indices(raw, upto: int) -> set[int]:
    """Binomial indices appearing in denominators of raw(k), k <= upto."""
    out: set[int] = set()
    for k in range(upto + 1):
        v = raw(k)
        out.update(m for m, e in v.bins.items() if e < 0)
    return out


def _screen(raw_list, upto: int, phi_index: int | None) -> None:
    """Raise DegenerateSpecialization if a denominator factor vanishes
    identically or shares the modulus cyclotomic."""
    try:
        dens: set[int] = set()
        for raw in raw_list:
            dens |= _den_indices(raw, upto)
    except DivideByZero as exc:
        raise DegenerateSpecialization(f"zero denominator factor: {exc}")
    if phi_index is not None:
        hits = sorted(m for m in dens if m % phi_index == 0)
        if hits:
            raise DegenerateSpecialization(
                f"denominator factor (1-q^{hits[0]}) shares phi_{phi_index}")


def _spec_verdict(label_checks: list[tuple[str, bool]],
                  skipped: list[str]) -> Verdict:
    failed = [name for name, ok in label_checks if not ok]
    if not label_checks:
        return Verdict(False, witness=Witness(
            detail="no non-degenerate checks could be performed"),
            skipped=tuple(skipped))
    if failed:
        return Verdict(False, witness=Witness(
            failed_factor=None, detail="failed: " + ", ".join(failed)),
            skipped=tuple(skipped))
    return Verdict(True, skipped=tuple(skipped))


def _spec_double_lemma(family: str, params: CaseParams,
                       samples: tuple[int, ...] | None) -> Verdict:
    """Lemmas with modulus Phi_n(-q) (1 - a q^{2n}) (a - q^{2n}): exact
    equality at a = q^{+-2n}, congruence mod Phi_n(-q) at sampled a."""
    n, d, r = params.n, params.d, params.r
    big_k = (n - r) // d
    pref = (sign_pow(big_k) * qint_qv(n, square=True) / qint_qv(r, square=True)
            * q_pow((n - r) * (n + r - d) // d))
    checks: list[tuple[str, bool]] = []
    skipped: list[str] = []

    def sides(ax: int) -> tuple[QValue, QValue]:
        p = params.with_extra(ax=ax)
        lhs = sum_qvalue(builtin_term(f"{family}.lhs", p), big_k)
        rhs = pref * sum_qvalue(builtin_term(f"{family}.rhs", p), big_k)
        return lhs, rhs

    for ax in (2 * n, -2 * n):
        lhs, rhs = sides(ax)
        checks.append((f"exact equality at a = q^{ax}", exact_equal(lhs, rhs)))

    phi_idx = neg_index(n)
    modulus = modulus_build([(n, "-", 1)])
    for j in _sample_js(n, samples):
        ax = 2 * j
        p = params.with_extra(ax=ax)
        try:
            _screen([builtin_term(f"{family}.lhs", p).qvalue,
                     builtin_term(f"{family}.rhs", p).qvalue], big_k, phi_idx)
        except DegenerateSpecialization as exc:
            skipped.append(f"a = q^{ax}: {exc}")
            continue
        lhs, rhs = sides(ax)
        v = check_congruence(lhs.to_ratfunc(), rhs.to_ratfunc(), modulus)
        checks.append((f"mod phi({n},-) at a = q^{ax}", v.holds))
    return _spec_verdict(checks, skipped)


def _spec_reflection_lemma(params: CaseParams,
                           samples: tuple[int, ...] | None) -> Verdict:
    """Pochhammer reflection congruence mod Phi_n(q), per index k, at
    sampled a = q^{2j}."""
    n, d, r = params.n, params.d, params.r
    big_k = (n - r) // d
    modulus = modulus_build([(n, "+", 1)])
    checks: list[tuple[str, bool]] = []
    skipped: list[str] = []
    for j in _sample_js(n, samples):
        ax = 2 * j
        p = params.with_extra(ax=ax)
        try:
            lhs_raw = builtin_term("lem5_1.lhs", p).qvalue
            rhs_raw = builtin_term("lem5_1.rhs", p).qvalue
            _screen([lhs_raw, rhs_raw], big_k, n)
        except DegenerateSpecialization as exc:
            skipped.append(f"a = q^{ax}: {exc}")
            continue
        ok = all(check_congruence(lhs_raw(k).to_ratfunc(),
                                  rhs_raw(k).to_ratfunc(), modulus).holds
                 for k in range(big_k + 1))
        checks.append((f"mod phi({n},+) at a = q^{ax}, all k <= {big_k}", ok))
    return _spec_verdict(checks, skipped)


_B_SAMPLES = (2, 3, 4, 5)


def _spec_triple_lemma_a(params: CaseParams,
                         samples: tuple[int, ...] | None) -> Verdict:
    """Two-parameter triple-sum lemma, modulus [n] (1 - a q^n) (a - q^n):
    exact equality at a = q^{+-n}; congruence mod Phi_n(q) at sampled a."""
    n = params.n
    checks: list[tuple[str, bool]] = []
    skipped: list[str] = []
    modulus = modulus_build([(n, "+", 1)])

    def lhs_of(ax: int, bx: int) -> QValue:
        p = params.with_extra(ax=ax, bx=bx)
        return triple_sum_qvalue(builtin_term("lem6_5.lhs", p), n)

    for bx in _B_SAMPLES:
        pb = params.with_extra(ax=n, bx=bx)
        try:
            _screen([builtin_term("lem6_5.lhs", pb).qvalue], n - 1, None)
            rhs = builtin_closed("lem6_5.rhs", pb)
        except (DegenerateSpecialization, DivideByZero) as exc:
            skipped.append(f"b = q^{bx}: {exc}")
            continue
        for ax in (n, -n):
            ok = exact_equal(lhs_of(ax, bx), rhs)
            checks.append((f"exact equality at a = q^{ax}, b = q^{bx}", ok))
        for j in _sample_js(n, samples)[:2]:
            ax = 2 * j
            p = params.with_extra(ax=ax, bx=bx)
            try:
                _screen([builtin_term("lem6_5.lhs", p).qvalue], n - 1, n)
                rhs_s = builtin_closed("lem6_5.rhs", p)
                if any(m % n == 0 for m, e in rhs_s.bins.items() if e < 0):
                    raise DegenerateSpecialization("right side denominator"
                                                   f" shares phi_{n}")
            except (DegenerateSpecialization, DivideByZero) as exc:
                skipped.append(f"a = q^{ax}, b = q^{bx}: {exc}")
                continue
            v = check_congruence(lhs_of(ax, bx).to_ratfunc(),
                                 rhs_s.to_ratfunc(), modulus)
            checks.append((f"mod phi({n},+) at a = q^{ax}, b = q^{bx}", v.holds))
    return _spec_verdict(checks, skipped)


def _spec_triple_lemma_b(params: CaseParams,
                         samples: tuple[int, ...] | None) -> Verdict:
    """Companion lemma, modulus (b - q^n): exact equality at b = q^n for
    sampled a = q^{2j}."""
    n = params.n
    checks: list[tuple[str, bool]] = []
    skipped: list[str] = []
    for j in _sample_js(n, samples):
        ax = 2 * j
        p = params.with_extra(ax=ax, bx=n)
        try:
            _screen([builtin_term("lem6_6.lhs", p).qvalue], n - 1, None)
            rhs = builtin_closed("lem6_6.rhs", p)
        except (DegenerateSpecialization, DivideByZero) as exc:
            skipped.append(f"a = q^{ax}: {exc}")
            continue
        lhs = triple_sum_qvalue(builtin_term("lem6_6.lhs", p), n)
        checks.append((f"exact equality at b = q^{n}, a = q^{ax}",
                       exact_equal(lhs, rhs)))
    return _spec_verdict(checks, skipped)


def verify_specialization(case: CaseSpec) -> Verdict:
    """Dispatch a parametric-lemma case to its specialization protocol."""
    case.validate()
    params = case.params
    check_constraints(case.family, params)
    if case.family in ("lem2_2", "lem3_1"):
        return _spec_double_lemma(case.family, params, case.samples)
    if case.family == "lem5_1":
        return _spec_reflection_lemma(params, case.samples)
    if case.family == "lem6_5":
        return _spec_triple_lemma_a(params, case.samples)
    if case.family == "lem6_6":
        return _spec_triple_lemma_b(params, case.samples)
    raise ConstraintViolation(f"unknown lemma family {case.family!r}")


# ---------------------------------------------------------------------------
# Chinese-remainder unit relations (specialized) and the closing identity

def check_crt_identities(n: int, a_exp: int, b_exp: int) -> Verdict:
    """The two cross-multiplied unit relations and the closing polynomial
    identity, under a = q^{a_exp}, b = q^{b_exp}."""
    checks = []
    qn = q_pow(n)
    one = QValue.one()
    b = q_pow(b_exp)
    for ax in (n, -n):
        a = q_pow(ax)
        lhs = (b - qn) * (a * b - one - a * a + a * qn)
        rhs = (a - b) * (one - a * b)
        checks.append((f"unit relation 1 at a = q^{ax}", exact_equal(lhs, rhs)))
    a = q_pow(a_exp)
    bq = qn
    lhs = (one - a * qn) * (a - qn)
    rhs = (a - bq) * (one - a * bq)
    checks.append(("unit relation 2 at b = q^n", exact_equal(lhs, rhs)))
    lhs = (one - qn) * (one + a * a - a - a * qn)
    rhs = (one - a) * (one - a) + (one - a * qn) * (a - qn)
    checks.append(("closing identity", exact_equal(lhs, rhs)))
    return _spec_verdict(checks, [])
