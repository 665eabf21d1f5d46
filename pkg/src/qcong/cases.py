"""Case specifications, the case-file format, and the shipped suites.

A case file is line-oriented `key = value` under section headers:

    [case]
    id = thm1_4.n7d4
    kind = double_sum          # double_sum | triple_sum | single_sum |
    family = thm1_4            #   specialization | padic | crt
    n = 7
    d = 4
    r = 3

    [lhs]
    term = thm1_4.lhs          # or: source = <termlang expression>

    [rhs]
    prefactor = [n]_q2^2 / [r]_q2^2 * qpow(2*(n-r)*(n+r-d)/d)
    term = thm1_4.rhs
    upper = (n-r)/d
    power = 2

    [modulus]
    factors = phi(n,-)^3 * phi(n,+)^2

Moduli are products of `phi(IDX,+)` / `phi(IDX,-)` factors with optional
`^EXP`, plus at most one `[IDX]` q-integer factor; IDX may be any form in
n, d, r.  Specialization cases carry `lemma`, padic cases `claim` and `p`,
crt cases `a_exp` / `b_exp`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .cyclotomic import Modulus, modulus_build
from .qterms import CaseParams
from .termlang import Form, TermSyntaxError, _lex, _Parser

KINDS = ("double_sum", "triple_sum", "single_sum", "specialization",
         "padic", "crt")


@dataclass(frozen=True)
class CaseSpec:
    id: str
    kind: str
    params: CaseParams
    family: str | None = None
    lhs_term: str | None = None
    lhs_source: str | None = None
    lhs_upper: str | None = None      # form text; single_sum only
    rhs_prefactor: str | None = None
    rhs_term: str | None = None
    rhs_source: str | None = None
    rhs_upper: str | None = None
    rhs_power: int = 1
    modulus_text: str | None = None
    claim: str | None = None          # padic
    samples: tuple[int, ...] | None = None  # specialization sample override
    notes: str = ""

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown case kind {self.kind!r}")
        if self.kind in ("double_sum", "triple_sum", "single_sum"):
            if bool(self.lhs_term) == bool(self.lhs_source):
                raise ValueError(f"{self.id}: exactly one of lhs term/source")
            if self.rhs_term and self.rhs_source:
                raise ValueError(f"{self.id}: at most one of rhs term/source")
            if not self.modulus_text:
                raise ValueError(f"{self.id}: missing modulus")
            if self.kind == "single_sum" and not self.lhs_upper:
                raise ValueError(f"{self.id}: single_sum needs an lhs upper")
        if self.kind == "padic" and not self.claim:
            raise ValueError(f"{self.id}: padic case needs a claim id")
        if self.kind == "specialization" and not self.family:
            raise ValueError(f"{self.id}: specialization case needs a lemma")


def parse_form_text(text: str, extra_symbols: tuple[str, ...] = ()) -> Form:
    toks = _lex(text)
    if not toks:
        raise TermSyntaxError("empty form", 1, 1)
    p = _Parser(toks, ("n", "d", "r", "k") + tuple(extra_symbols))
    f = p.form()
    if p.i != len(toks):
        p._err("trailing input")
    return f


def eval_form_text(text: str, params: CaseParams) -> int:
    env = {"n": params.n, "d": params.d, "r": params.r, "k": 0}
    env.update(params.extras())
    return parse_form_text(text, tuple(params.extras())).eval_int(env)


def parse_modulus(text: str, params: CaseParams) -> Modulus:
    """Parse the factored modulus syntax against concrete parameters."""
    toks = _lex(text)
    p = _Parser(toks, ("n", "d", "r"))
    env = {"n": params.n, "d": params.d, "r": params.r}
    factors = []
    qint = None
    while True:
        t = p.peek()
        if t is None:
            p._err("expected a modulus factor")
        if t.kind == "id" and t.text == "phi":
            p.i += 1
            p.expect("(")
            idx = p.form().eval_int(env)
            p.expect(",")
            if p.accept("+"):
                sign = "+"
            elif p.accept("-"):
                sign = "-"
            else:
                p._err("expected '+' or '-' after the phi index")
            p.expect(")")
            exp = 1
            if p.accept("^"):
                nt = p.peek()
                if nt is None or nt.kind != "num":
                    p._err("expected integer exponent")
                p.i += 1
                exp = int(nt.text)
            factors.append((idx, sign, exp))
        elif t.kind == "sym" and t.text == "[":
            p.i += 1
            idx = p.form().eval_int(env)
            p.expect("]")
            if qint is not None:
                p._err("at most one q-integer factor in a modulus")
            qint = idx
        else:
            p._err(f"unexpected {t.text!r} in modulus")
        if not p.accept("*"):
            break
    if p.i != len(toks):
        p._err("trailing input")
    return modulus_build(factors, qint)


# ---------------------------------------------------------------------------
# case files

_SECTION_RE = re.compile(r"^\[(case|lhs|rhs|modulus)\]\s*$")


def parse_case_file(text: str) -> CaseSpec:
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _SECTION_RE.match(line)
        if m:
            current = sections.setdefault(m.group(1), {})
            continue
        if current is None:
            raise ValueError(f"line {lineno}: content before any section")
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()

    case = sections.get("case")
    if not case or "id" not in case or "kind" not in case:
        raise ValueError("case file needs a [case] section with id and kind")

    def getint(sec: dict[str, str], key: str, default: int | None = None) -> int | None:
        if key not in sec:
            return default
        return int(sec[key])

    extras = {k.split(".", 1)[1]: int(v) for k, v in case.items()
              if k.startswith("extra.")}
    if case["kind"] == "crt":
        extras.setdefault("a_exp", getint(case, "a_exp", 1))
        extras.setdefault("b_exp", getint(case, "b_exp", 1))
    params = CaseParams.make(getint(case, "n", 1), getint(case, "d", 1),
                             getint(case, "r", 1), extras)
    lhs = sections.get("lhs", {})
    rhs = sections.get("rhs", {})
    mod = sections.get("modulus", {})
    family = case.get("family") or case.get("lemma")
    if family is None and "term" in lhs:
        family = lhs["term"].split(".", 1)[0]
    samples = None
    if "samples" in case:
        samples = tuple(int(x) for x in case["samples"].split(",") if x.strip())
    spec = CaseSpec(
        id=case["id"], kind=case["kind"], params=params, family=family,
        lhs_term=lhs.get("term"), lhs_source=lhs.get("source"),
        lhs_upper=lhs.get("upper"),
        rhs_prefactor=rhs.get("prefactor"), rhs_term=rhs.get("term"),
        rhs_source=rhs.get("source"), rhs_upper=rhs.get("upper"),
        rhs_power=getint(rhs, "power", 1),
        modulus_text=mod.get("factors"),
        claim=case.get("claim"), samples=samples,
        notes=case.get("notes", ""))
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# shipped suites (defaults follow the acceptance instance lists)

PREF_1X = "[n]_q2^2 * qpow((n-1)^2)"
PREF_34 = "[n]_q2^2 / [r]_q2^2 * qpow(2*(n-r)*(n+r-d)/d)"
PREF_6X = "(-1)^(3*(n-1)/d) * [n]_q2^3 * qpow(3*(n-1)*(n+1-d)/d)"
PREF_17 = "(-1)^((n-r)/d) * [n]_q2 / [r]_q2 * qpow((n-r)*(n+r-d)/d)"

THM1_N = (3, 5, 7, 9, 11, 13, 15)
THM34_TRIPLES = ((5, 3, 2), (7, 3, 1), (7, 4, 3), (9, 4, 1), (11, 3, 2),
                 (11, 4, 3))
THM6_PAIRS = ((7, 3), (13, 3), (5, 4), (9, 4), (13, 4))
THM64_PAIRS = ((4, 3), (7, 3), (10, 3), (5, 4), (9, 4))
COR67_N = (7, 13)
COR68_N = (5, 13)
EQ1_N = (3, 5, 7)
SPEC_PAIRS = ((4, 3), (7, 3), (5, 4))
CRT_N = (3, 5, 7)
CRT_EXPS = (1, 2, 3)

PADIC_PRIMES = (3, 5, 7, 11, 13)
PADIC_PRIMES_1MOD4 = (5, 13, 17)
PADIC_CLAIM_PRIMES = {
    "cor1_5.a": PADIC_PRIMES, "cor1_5.b": PADIC_PRIMES,
    "cor1_6.e12": PADIC_PRIMES, "cor1_6.e13": PADIC_PRIMES,
    "cor1_7.a": PADIC_PRIMES_1MOD4, "cor1_7.b": PADIC_PRIMES_1MOD4,
    "li.eq1_3": PADIC_PRIMES, "sun.m4": PADIC_PRIMES,
}


def _double(fam: str, n: int, d: int = 1, r: int = 1, *, pref: str,
            upper: str, modulus: str, power: int = 2) -> CaseSpec:
    return CaseSpec(id=f"{fam}.n{n}" + (f"d{d}r{r}" if fam in ("thm1_3", "thm1_4") else ""),
                    kind="double_sum", params=CaseParams.make(n, d, r),
                    family=fam, lhs_term=f"{fam}.lhs",
                    rhs_prefactor=pref, rhs_term=f"{fam}.rhs",
                    rhs_upper=upper, rhs_power=power, modulus_text=modulus)


def suite_thm1_1(ns=THM1_N) -> list[CaseSpec]:
    return [_double("thm1_1", n, pref=PREF_1X, upper="(n-1)/2",
                    modulus="phi(n,-)^3 * phi(n,+)^2") for n in ns]


def suite_thm1_2(ns=THM1_N) -> list[CaseSpec]:
    return [_double("thm1_2", n, pref=PREF_1X, upper="(n-1)/2",
                    modulus="phi(n,-)^4 * phi(n,+)^2") for n in ns]


def suite_thm1_3(triples=THM34_TRIPLES) -> list[CaseSpec]:
    return [_double("thm1_3", n, d, r, pref=PREF_34, upper="(n-r)/d",
                    modulus="phi(n,-)^2 * phi(n,+)^2") for n, d, r in triples]


def suite_thm1_4(triples=THM34_TRIPLES) -> list[CaseSpec]:
    return [_double("thm1_4", n, d, r, pref=PREF_34, upper="(n-r)/d",
                    modulus="phi(n,-)^3 * phi(n,+)^2") for n, d, r in triples]


def suite_thm6_1(pairs=THM6_PAIRS) -> list[CaseSpec]:
    return [CaseSpec(id=f"thm6_1.n{n}d{d}", kind="triple_sum",
                     params=CaseParams.make(n, d), family="thm6_1",
                     lhs_term="thm6_1.lhs", rhs_prefactor=PREF_6X,
                     rhs_term="thm6_1.rhs", rhs_upper="(n-1)/d", rhs_power=3,
                     modulus_text="phi(n,-)^3 * phi(n,+)^2")
            for n, d in pairs]


def suite_thm6_3(pairs=THM6_PAIRS) -> list[CaseSpec]:
    return [CaseSpec(id=f"thm6_3.n{n}d{d}", kind="triple_sum",
                     params=CaseParams.make(n, d), family="thm6_3",
                     lhs_term="thm6_3.lhs", rhs_prefactor=PREF_6X,
                     rhs_term="thm6_3.rhs", rhs_upper="(n-1)/d", rhs_power=3,
                     modulus_text="phi(n,-)^2 * phi(n,+)^2")
            for n, d in pairs]


def suite_thm6_4(pairs=THM64_PAIRS) -> list[CaseSpec]:
    cases = [CaseSpec(id=f"thm6_4.n{n}d{d}", kind="triple_sum",
                      params=CaseParams.make(n, d), family="thm6_4",
                      lhs_term="thm6_4.lhs", rhs_term="thm6_4.rhs",
                      modulus_text="[n] * phi(n,+)^3",
                      notes="composite n with a divisor m != 1 (mod d) is a"
                            " known failure of the [n] part")
             for n, d in pairs]
    cases += [CaseSpec(id=f"cor6_7.n{n}", kind="triple_sum",
                       params=CaseParams.make(n, 3), family="cor6_7",
                       lhs_term="cor6_7.lhs", rhs_term="cor6_7.rhs",
                       modulus_text="[n] * phi(n,+)^3") for n in COR67_N]
    cases += [CaseSpec(id=f"cor6_8.n{n}", kind="triple_sum",
                       params=CaseParams.make(n, 4), family="cor6_8",
                       lhs_term="cor6_8.lhs", rhs_term="cor6_8.rhs",
                       modulus_text="[n] * phi(n,+)^3") for n in COR68_N]
    return cases


def suite_cited(ns=EQ1_N, triples=THM34_TRIPLES) -> list[CaseSpec]:
    cases = [CaseSpec(id=f"eq1_1.n{n}", kind="single_sum",
                      params=CaseParams.make(n), family="eq1_1",
                      lhs_term="eq1_1.lhs", lhs_upper="(n-1)/2",
                      rhs_term="eq1_1.rhs",
                      modulus_text="[n] * phi(n,+)^2") for n in ns]
    cases += [CaseSpec(id=f"eq1_2.n{n}", kind="double_sum",
                       params=CaseParams.make(n), family="eq1_2",
                       lhs_term="eq1_2.lhs", rhs_term="eq1_2.rhs",
                       modulus_text="[n] * phi(n,+)^2") for n in ns]
    for n, d, r in triples:
        cases.append(CaseSpec(id=f"eq1_7.n{n}d{d}r{r}", kind="single_sum",
                              params=CaseParams.make(n, d, r), family="eq1_7",
                              lhs_term="eq1_7.lhs", lhs_upper="(n-r)/d",
                              rhs_prefactor=PREF_17, rhs_term="eq1_7.rhs",
                              rhs_upper="(n-r)/d", rhs_power=1,
                              modulus_text="phi(n,-)^3 * phi(n,+)^2"))
        cases.append(CaseSpec(id=f"eq1_8.n{n}d{d}r{r}", kind="single_sum",
                              params=CaseParams.make(n, d, r), family="eq1_8",
                              lhs_term="eq1_8.lhs", lhs_upper="(n-r)/d",
                              rhs_prefactor=PREF_17, rhs_term="eq1_8.rhs",
                              rhs_upper="(n-r)/d", rhs_power=1,
                              modulus_text="phi(n,-)^3 * phi(n,+)^2"))
    return cases


def suite_padic() -> list[CaseSpec]:
    cases = []
    for claim, primes in PADIC_CLAIM_PRIMES.items():
        for p in primes:
            cases.append(CaseSpec(id=f"{claim}.p{p}", kind="padic",
                                  params=CaseParams.make(p), claim=claim))
    return cases


def suite_lemmas() -> list[CaseSpec]:
    cases = []
    for fam in ("lem2_2", "lem3_1", "lem5_1"):
        for n, d, r in THM34_TRIPLES:
            cases.append(CaseSpec(id=f"{fam}.n{n}d{d}r{r}",
                                  kind="specialization",
                                  params=CaseParams.make(n, d, r), family=fam))
    for fam in ("lem6_5", "lem6_6"):
        for n, d in SPEC_PAIRS:
            cases.append(CaseSpec(id=f"{fam}.n{n}d{d}", kind="specialization",
                                  params=CaseParams.make(n, d), family=fam))
    for n in CRT_N:
        for a in CRT_EXPS:
            for b in CRT_EXPS:
                cases.append(CaseSpec(
                    id=f"crt.n{n}a{a}b{b}", kind="crt",
                    params=CaseParams.make(n, extra={"a_exp": a, "b_exp": b})))
    return cases


SUITES = {
    "thm1_1": suite_thm1_1,
    "thm1_2": suite_thm1_2,
    "thm1_3": suite_thm1_3,
    "thm1_4": suite_thm1_4,
    "thm6_1": suite_thm6_1,
    "thm6_3": suite_thm6_3,
    "thm6_4": suite_thm6_4,
    "cited": suite_cited,
    "padic": suite_padic,
    "lemmas": suite_lemmas,
}


def build_suite(name: str, ns: tuple[int, ...] | None = None,
                overrides: dict[str, int] | None = None) -> list[CaseSpec]:
    """Instantiate a shipped suite, optionally restricted to given n values
    (and d/r overrides where the suite is parameterized by them)."""
    if name == "all":
        out = []
        for nm in SUITES:
            out.extend(build_suite(nm, ns, overrides))
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    if ns is None and not overrides:
        return SUITES[name]()
    overrides = overrides or {}
    if name in ("thm1_3", "thm1_4"):
        if ns is None:
            triples = THM34_TRIPLES
        else:
            triples = tuple((n, overrides.get("d", 3), overrides.get("r", n % overrides.get("d", 3)))
                            for n in ns)
        return SUITES[name](triples)
    if name in ("thm1_1", "thm1_2"):
        return SUITES[name](tuple(ns) if ns else THM1_N)
    if name in ("thm6_1", "thm6_3", "thm6_4"):
        d = overrides.get("d", 3)
        pairs = tuple((n, d) for n in ns) if ns else None
        return SUITES[name](pairs) if pairs else SUITES[name]()
    return SUITES[name]()
