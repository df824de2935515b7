"""Named verification suites. Each returns a VerificationReport; ``SUITES`` is the registry."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import presentations as pres
from . import strata
from .ideal import QuotientRing, buchberger, hilbert_function, ring_map_kernel
from .invariants import VerificationReport, CheckResult, _rank, example36_pipeline, invariant_hilbert, swap_action
from .poly import PolyRing, substitute

F = Fraction


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[..., VerificationReport]
    params: tuple[str, ...]
    defaults: dict
    summary: str


SUITES: dict[str, Suite] = {}


def suite(name, summary, **defaults):
    def wrap(fn):
        SUITES[name] = Suite(name, fn, tuple(defaults), defaults, summary)
        return fn
    return wrap


def _timed(rep, check, fn):
    t0 = time.perf_counter()
    ok, witness = fn()
    rep.add(CheckResult(check, bool(ok), None, None if ok else str(witness), (time.perf_counter() - t0) * 1000))


def lemma_r_in_flag(n: int):
    """R at d=1 pushed into flag_d1(n); returns its normal form."""
    P = pres.flag_d1(n)
    R = pres.lemma31_R(1)
    images = {k: P.derived[k] for k in ("psi", "kH2", "kH3")}
    return P.quotient().normal_form(substitute(R, images, P.ring))


def lemma_r_in_m01(n: int):
    P = pres.m01_pn_d2(n)
    ring, cls = P.ring, P.derived
    images = {"psi": ring.gen("psi"), "D{1}": ring.gen("D1"), "D{2}": ring.gen("D2"),
              "kH2": cls["kH2"], "kH3": cls["kH3"]}
    return P.quotient().normal_form(substitute(pres.lemma31_R(2), images, ring))


@suite("lemma31", "the class R vanishes: d=1 in the flag ring, d=2 in the degree-2 ring", d=1, n=3)
def run_lemma31(d=1, n=3):
    if d not in (1, 2):
        raise ValueError("lemma31 can be checked against a ring for d = 1 or 2 only")
    rep = VerificationReport(f"lemma31(d={d},n={n})")
    nf = lemma_r_in_flag(n) if d == 1 else lemma_r_in_m01(n)
    _timed(rep, f"R(d={d}) = 0 in {'flag_d1' if d == 1 else 'm01_pn_d2'}({n})",
           lambda: (not nf, nf.to_text()))
    return rep


@suite("example36", "the worked degree-2 example end to end", n=2)
def run_example36(n=2):
    return example36_pipeline(n)


def d2_relation_checks(n: int) -> VerificationReport:
    P = pres.m01_pn_d2(n)
    q, ring, cls = P.quotient(), P.ring, P.derived
    I = P.convention.I
    rep = VerificationReport(f"d2relations(n={n})")
    rep.zero("psi-square i=1", q, pres.psi_square_relation(ring, cls, 1))
    rep.zero("psi-square i=2", q, pres.psi_square_relation(ring, cls, 2))
    rep.zero("f-square", q, pres.f_square_printed(ring, cls))
    for label, p in pres.thm33_d2_in_m01(ring, cls, I).items():
        rep.zero(f"thm33 {label}", q, p)
    return rep


@suite("d2relations", "degree-2 universal relations under the pinned convention", n=2)
def run_d2relations(n=2):
    conv, results = pres.pin_convention()
    rep = VerificationReport(f"d2relations(n={n})")
    for label, ok, checks in results:
        rep.flag(f"pinning candidate {label}", True,
                 note=("passes" if ok else "rejected: " + ", ".join(c for c, v in checks if not v)))
    rep.flag(f"pinned convention {conv.label()}", True)
    rep.extend(d2_relation_checks(n))
    bundle = pres.thm33_relation3_d2(n, conv.I)
    P = pres.m01_pn_d2(n)
    q = P.quotient()
    for label, p in pres.relation3_in_m01(bundle, P.ring, P.derived, conv.I):
        rep.zero(f"thm33 {label}", q, p)
    return rep


def coefficient_values():
    """Coefficients of R at d=2 read off the emitted polynomial, next to the formula values."""
    R = pres.lemma31_R(2)
    ring = R.ring
    read = {
        "N_psi(|h|=1)": -R.coefficient(_exp(ring, psi=1, **{"D{1}": 1})),
        "N_nested(1,1)": R.coefficient(_exp(ring, **{"D{1}": 2})),
        "N_disjoint(1,1) (both orders)": R.coefficient(_exp(ring, **{"D{1}": 1, "D{2}": 1})) / 2,
    }
    formula = {"N_psi(|h|=1)": pres.n_psi(2, 1), "N_nested(1,1)": pres.n_nested(2, 1, 1),
               "N_disjoint(1,1) (both orders)": pres.n_disjoint(2, 1, 1)}
    return read, formula


def _exp(ring: PolyRing, **powers):
    e = [0] * len(ring.generators)
    for name, k in powers.items():
        e[ring.index(name)] = k
    return tuple(e)


def permutation_invariant(d: int) -> tuple[bool, str | None]:
    R = pres.lemma31_R(d)
    ring = R.ring
    labels = pres.proper_subsets(d)
    for g in strata.group_elements((d,)):
        images = {pres.d_symbol(h): ring.gen(pres.d_symbol(g(h))) for h in labels}
        image = substitute(R, images, ring)
        if image != R:
            return False, f"{g.perms}: {(image - R).to_text()}"
    return True, None


@suite("coefficients", "coefficient values of R at d=2 and invariance under relabelling", dmax=4)
def run_coefficients(dmax=4):
    rep = VerificationReport("coefficients")
    read, formula = coefficient_values()
    expected = {"N_psi(|h|=1)": F(1), "N_nested(1,1)": F(5, 16), "N_disjoint(1,1) (both orders)": F(-3, 16)}
    for k, v in expected.items():
        rep.flag(f"{k} = {v}", read[k] == v and formula[k] == v, f"read {read[k]}, formula {formula[k]}")
    for d in range(2, dmax + 1):
        _timed(rep, f"R(d={d}) invariant under S_{d}", lambda d=d: permutation_invariant(d))
    return rep


# Groebner engine --------------------------------------------------------------------

def random_homogeneous(ring: PolyRing, degree: int, rng: random.Random, terms: int = 4):
    mons = ring.monomials_of_degree(degree)
    p = ring.zero()
    for e in rng.sample(mons, min(terms, len(mons))):
        p = p + ring.monomial(e, F(rng.randint(-5, 5), rng.randint(1, 3)))
    return p


def brute_force_hilbert(ring: PolyRing, gens, max_degree: int) -> list[int]:
    """dim R_D - rank of the span of all monomial multiples of the generators in degree D."""
    dims = []
    for D in range(max_degree + 1):
        mons = ring.monomials_of_degree(D)
        idx = {m: i for i, m in enumerate(mons)}
        rows = []
        for g in gens:
            dg = g.degree()
            if dg < 0 or dg > D:
                continue
            for m in ring.monomials_of_degree(D - dg):
                p = g * ring.monomial(m)
                row = [F(0)] * len(mons)
                for e, c in p.terms.items():
                    row[idx[e]] = c
                rows.append(row)
        dims.append(len(mons) - (_rank(rows) if rows else 0))
    return dims


def random_ideals(count: int = 20, seed: int = 0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        nv = rng.randint(2, 3)
        ring = PolyRing([(f"x{i}", 1) for i in range(nv)])
        gens = [random_homogeneous(ring, rng.randint(1, 5), rng) for _ in range(rng.randint(1, 4))]
        gens = [g for g in gens if g] or [ring.gen("x0") ** 2]
        out.append((ring, gens))
    return out


@suite("groebner", "basis soundness, Hilbert functions against linear algebra, toy kernels", count=20, seed=0)
def run_groebner(count=20, seed=0):
    rep = VerificationReport("groebner")
    maxdeg = 6
    for i, (ring, gens) in enumerate(random_ideals(count, seed)):
        gb = buchberger(gens, ring=ring)
        _timed(rep, f"random ideal {i}: S-polynomials reduce to 0", lambda gb=gb: (not gb.check(), gb.check()))
        q = QuotientRing(ring, gens)
        hf = hilbert_function(q, maxdeg).to_list()
        bf = brute_force_hilbert(ring, gens, maxdeg)
        rep.flag(f"random ideal {i}: Hilbert function matches linear algebra", hf == bf, f"{hf} vs {bf}")
    for name, make in (("projective_space(3)", lambda: pres.projective_space(3)),
                       ("grassmannian_lines(3)", lambda: pres.grassmannian_lines(3)),
                       ("flag_d1(3)", lambda: pres.flag_d1(3)),
                       ("m01_pn_d2(2)", lambda: pres.m01_pn_d2(2))):
        gb = make().quotient().basis
        rep.flag(f"{name}: basis passes the S-polynomial check", not gb.check(), str(gb.check()))
    for label, expected, kernel in toy_kernels():
        rep.flag(f"kernel {label}", kernel == expected, f"{[k.to_text() for k in kernel]}")
    return rep


def toy_kernels():
    """(label, expected generators, computed kernel) for the standard toy maps."""
    out = []
    t = PolyRing([("t", 1)])
    s = PolyRing([("a", 1), ("b", 1)])
    k = ring_map_kernel(s, QuotientRing(t, []), {"a": t.gen("t"), "b": t.gen("t")})
    out.append(("a,b -> t,t", [s("a - b")], k))
    t = PolyRing([("t", 1)])
    s = PolyRing([("x", 2), ("y", 3)])
    k = ring_map_kernel(s, QuotientRing(t, []), {"x": t.gen("t") ** 2, "y": t.gen("t") ** 3})
    lead = k[0].terms.get(_exp(s, x=3), 0) if k else 0
    out.append(("x,y -> t^2,t^3", [s("x^3 - y^2") * (1 if lead == 1 else -1)], k))
    return out


# Hilbert data and invariants ----------------------------------------------------------

@suite("hilbert", "Hilbert functions of the basic presentations", nmax=5)
def run_hilbert(nmax=5):
    rep = VerificationReport("hilbert")
    for n in range(1, nmax + 1):
        hf = pres.projective_space(n).hilbert_function()
        rep.flag(f"projective_space({n}) all ones", hf == [1] * (n + 1), str(hf.to_list()))
    hf = pres.grassmannian_lines(3).hilbert_function()
    rep.flag("grassmannian_lines(3) = [1,1,2,1,1]", hf == [1, 1, 2, 1, 1], str(hf.to_list()))
    hf = pres.flag_d1(2).hilbert_function()
    rep.flag("flag_d1(2) = [1,2,2,1]", hf == [1, 2, 2, 1], str(hf.to_list()))
    return rep


@suite("invariants", "swap-invariant Hilbert functions of the degree-2 ring", nmax=2)
def run_invariants(nmax=2):
    rep = VerificationReport("invariants")
    for n in range(1, nmax + 1):
        P = pres.m01_pn_d2(n)
        q = P.quotient()
        full = P.hilbert_function()
        inv = invariant_hilbert(q, swap_action(P), 3 * n)
        rep.flag(f"m01_pn_d2({n}) top degree 3n", q.top_degree() == 3 * n, str(q.top_degree()))
        rep.flag(f"m01_pn_d2({n}) swap-invariant {inv.to_list()} palindromic", inv.is_palindromic(),
                 str(inv.to_list()))
        rep.flag(f"m01_pn_d2({n}) invariant dims <= total", all(a <= b for a, b in zip(inv, full)),
                 f"{inv.to_list()} vs {full.to_list()}")
    return rep


# schedules --------------------------------------------------------------------------

@suite("schedules", "blow-up schedules and the symbolic stability rule", dmax=4, mmax=3)
def run_schedules(dmax=4, mmax=3):
    rep = VerificationReport("schedules")
    for d in range(1, 8):
        s = strata.schedule_m0(d)
        ok = len(s.blow_downs) == (d - 1) // 2
        ok = ok and (s.terminal.kind == strata.EVEN_TERMINAL) == (d % 2 == 0)
        rep.flag(f"schedule_m0({d}): {(d - 1) // 2} blow-downs, terminal {s.terminal.kind}", ok,
                 str(s.to_json()))
    for d in range(1, dmax + 1):
        for m in range(1, mmax + 1):
            if d + m < 3:
                continue
            s = strata.schedule_m(d, m)
            first = str(strata.DivisorType((m + 1,), 1, tuple(range(1, m + 1)), d))
            ok = (len(s.blow_downs) == d + m - 2 and s.terminal.kind == strata.PROJECTIVE_BUNDLE
                  and s.stages[0].contracted == (first,))
            rep.flag(f"schedule_m({d},{m}): {d + m - 2} blow-downs + bundle, stage 1 = {first}", ok,
                     str(s.to_json()))
    bad = [key for key, a, b in strata.stability_grid(dmax, mmax) if a != b]
    n = sum(1 for _ in strata.stability_grid(dmax, mmax))
    rep.flag(f"symbolic eps rule = numeric eps on {n} grid cases", not bad, str(bad[:5]))
    return rep


# relations with general d and m ---------------------------------------------------------

@suite("psi-sum", "descended psi-sum relations follow from the pairwise ones", d=2, m=2)
def run_psi_sum(d=2, m=2):
    rep = VerificationReport(f"psi-sum(d={d},m={m})")
    for k in range(0, d + m - 1):
        bundle = pres.psi_sum_relations(d, m, k)
        for label, ok in pres.check_psi_sum(bundle).items():
            rep.flag(f"k={k} {label}", ok)
    return rep


@suite("i-change", "relation (1) changes with I by the node-rule witness", dmax=4)
def run_i_change(dmax=4):
    rep = VerificationReport("i-change")
    for d in range(2, dmax + 1, 2):
        half = [h for h in pres.proper_subsets(d) if 2 * h.size == d]
        I = pres.default_I(d)
        for h in half:
            if h in I:
                ok, rem = pres.i_change_check(d, I, h)
                rep.flag(f"d={d} swap {h}", ok, rem.to_text() if rem else None)
    return rep


@suite("thm-m", "relations for an added marked point are emitted consistently", dmax=3, mmax=2)
def run_thm_m(dmax=3, mmax=2):
    rep = VerificationReport("thm-m")
    for d in range(1, dmax + 1):
        for m in range(1, mmax + 1):
            if d + m < 3:
                continue
            b = pres.thm_m_relations(d, m)
            labels = strata.exceptional_labels(d, m)
            ok = all(p.is_homogeneous() and p.degree() == 2 for p in b.polynomials)
            rep.flag(f"d={d} m={m}: {len(b.relations)} quadratic relations over {len(labels)} exceptional labels",
                     ok and len(b.placeholders) == len(labels))
    return rep


DEFAULT_N = (1, 2, 3)


def run_all() -> VerificationReport:
    """Every suite with its defaults; the n-dependent ones for n = 1..3."""
    rep = VerificationReport("all")
    for n in range(1, 6):
        rep.extend(run_lemma31(1, n), "lemma31: ")
    for n in DEFAULT_N:
        rep.extend(run_lemma31(2, n), "lemma31: ")
        rep.extend(run_d2relations(n), f"d2relations n={n}: ")
        rep.extend(run_example36(n), f"example36 n={n}: ")
    for name in ("coefficients", "groebner", "hilbert", "invariants", "schedules", "psi-sum", "i-change", "thm-m"):
        rep.extend(SUITES[name].run(), f"{name}: ")
    return rep


SUITES["all"] = Suite("all", lambda: run_all(), (), {}, "every suite above with default parameters")
