"""Finite group actions on presented rings, invariant Hilbert functions and the
degree-2 verification pipeline.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .ideal import HilbertFunction, QuotientRing
from .poly import PolyRing, Polynomial, substitute
from . import presentations as pres

F = Fraction


class ActionError(ValueError):
    """The proposed images do not define a group of automorphisms of the quotient."""


@dataclass(frozen=True)
class ActionElement:
    name: str
    images: tuple[tuple[str, Polynomial], ...]

    def image_map(self) -> dict[str, Polynomial]:
        return dict(self.images)


class RingAction:
    """A finite group acting on a quotient ring through generator images.

    Construction checks that every element preserves degrees, sends each
    relation into the ideal, and that the set is closed under composition
    (compared on generators modulo the ideal).
    """

    def __init__(self, q: QuotientRing, elements: Mapping[str, Mapping[str, object]] | Sequence,
                 close: bool = False):
        self.quotient = q
        ring = q.ring
        items = elements.items() if isinstance(elements, Mapping) else elements
        elems = []
        for name, images in items:
            full = {}
            for gen in ring.generators:
                img = images.get(gen.name, ring.gen(gen.name))
                img = ring(img)
                if img and img.degrees() != {gen.degree}:
                    raise ActionError(f"{name}: image of {gen.name} is not homogeneous of degree {gen.degree}")
                full[gen.name] = img
            elems.append(ActionElement(name, tuple(full.items())))
        if not any(_is_identity(e, q) for e in elems):
            elems.insert(0, ActionElement("id", tuple((g, ring.gen(g)) for g in ring.names)))
        for e in elems:
            for r in q.relations:
                if q.normal_form(substitute(r, e.image_map(), ring)):
                    raise ActionError(f"{e.name} does not preserve the relation {r}")
        if close:
            elems = _close(elems, q)
        self.elements = tuple(elems)
        for a in self.elements:
            if _invertible_matrix_rank(a, q) is False:
                raise ActionError(f"{a.name} is not invertible in degree 1")
            for b in self.elements:
                c = compose(a, b, ring)
                if self._find(c) is None:
                    raise ActionError(f"{a.name}*{b.name} is not in the group")

    def _find(self, c: ActionElement):
        q = self.quotient
        for e in self.elements:
            if all(not q.normal_form(x - y) for (_, x), (_, y) in zip(c.images, e.images)):
                return e
        return None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def _is_identity(e: ActionElement, q: QuotientRing) -> bool:
    return all(not q.normal_form(img - q.ring.gen(name)) for name, img in e.images)


def _invertible_matrix_rank(e: ActionElement, q: QuotientRing):
    # degree-1 part must be invertible for an automorphism
    ring = q.ring
    mons = q.standard_monomials(1)
    if not mons:
        return True
    rows = []
    for m in mons:
        img = q.normal_form(substitute(ring.monomial(m), e.image_map(), ring))
        rows.append([img.coefficient(x) for x in mons])
    return _rank(rows) == len(mons)


def _rank(rows) -> int:
    rows = [list(map(Fraction, r)) for r in rows]
    rank, ncol = 0, len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def compose(a: ActionElement, b: ActionElement, ring: PolyRing) -> ActionElement:
    """``a*b`` acting as ``p -> a(b(p))``."""
    amap = a.image_map()
    return ActionElement(f"{a.name}*{b.name}",
                         tuple((n, substitute(img, amap, ring)) for n, img in b.images))


def _close(elems, q: QuotientRing):
    ring = q.ring
    out = list(elems)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(list(out), repeat=2):
            c = compose(a, b, ring)
            if not any(all(not q.normal_form(x - y) for (_, x), (_, y) in zip(c.images, e.images)) for e in out):
                out.append(c)
                changed = True
                if len(out) > 10000:
                    raise ActionError("group closure does not terminate")
    return out


def apply_action(g: ActionElement, p: Polynomial) -> Polynomial:
    return substitute(p, g.image_map(), p.ring)


def trace_in_degree(q: QuotientRing, g: ActionElement, degree: int) -> Fraction:
    """Trace of g on the standard-monomial basis of the given degree."""
    ring = q.ring
    tr = Fraction(0)
    for m in q.standard_monomials(degree):
        img = q.normal_form(substitute(ring.monomial(m), g.image_map(), ring))
        tr += img.coefficient(m)
    return tr


def invariant_hilbert(q: QuotientRing, action: RingAction, max_degree: int | None = None) -> HilbertFunction:
    """Dimensions of the invariant subspaces: average trace over the group, degree by degree."""
    if max_degree is None:
        max_degree = q.top_degree()
    dims = []
    for D in range(max_degree + 1):
        total = sum((trace_in_degree(q, g, D) for g in action.elements), Fraction(0))
        val = total / action.order
        if val.denominator != 1 or val < 0:
            raise ArithmeticError(f"non-integral invariant dimension {val} in degree {D}")
        dims.append(int(val))
    return HilbertFunction(dims)


def reynolds(action: RingAction, p: Polynomial) -> Polynomial:
    q = action.quotient
    total = p.ring.zero()
    for g in action.elements:
        total = total + apply_action(g, p)
    return q.normal_form(total / action.order)


def swap_images(ring: PolyRing, a: str = "D1", b: str = "D2") -> dict[str, Polynomial]:
    return {a: ring.gen(b), b: ring.gen(a)}


def swap_action(presentation, second: Mapping[str, Mapping[str, object]] | None = None) -> RingAction:
    """{id, swap D1 <-> D2} on the degree-2 ring (H, psi fixed; the class f changes sign).

    ``second`` may supply further elements (name -> generator images); the
    group they generate together with the swap is used.
    """
    q = presentation.quotient()
    elems = {"swap": swap_images(q.ring)}
    if second:
        elems.update(second)
    return RingAction(q, elems, close=bool(second))


def inclusion_exclusion_check(P: Callable[[Polynomial], Polynomial] | Polynomial,
                              vars: Sequence[Polynomial], q: QuotientRing,
                              variable: str = "u") -> tuple[bool, Polynomial | None]:
    """Check sum_{S} (-1)^|S| P(sum_{j not in S} a_j) == 0 given prod a_j == 0 in q."""
    vars = [q.ring(v) for v in vars]
    prod = q.ring.one()
    for v in vars:
        prod = prod * v
    if q.normal_form(prod):
        raise ValueError("the product of the variables is not zero in the quotient")
    if isinstance(P, Polynomial):
        poly = P

        def P(x, poly=poly):
            return substitute(poly, {variable: x}, q.ring)
    total = q.ring.zero()
    idx = range(len(vars))
    for r in range(len(vars) + 1):
        for S in itertools.combinations(idx, r):
            s = sum((vars[j] for j in idx if j not in S), q.ring.zero())
            term = P(s)
            total = total + term if r % 2 == 0 else total - term
    nf = q.normal_form(total)
    return (not nf, nf if nf else None)


# reports -------------------------------------------------------------------------

@dataclass
class CheckResult:
    check: str
    passed: bool
    polynomial: str | None = None
    witness: str | None = None
    ms: float = 0.0
    note: str | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self, timings: bool = False) -> dict:
        d = {"check": self.check, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.note:
            d["note"] = self.note
        if timings:
            d["ms"] = round(self.ms, 3)
        return d


@dataclass
class VerificationReport:
    name: str
    results: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        return result

    def zero(self, check: str, q: QuotientRing, p: Polynomial, note: str | None = None) -> CheckResult:
        """Record whether ``p`` reduces to zero in ``q``."""
        t0 = time.perf_counter()
        nf = q.normal_form(p)
        ms = (time.perf_counter() - t0) * 1000
        return self.add(CheckResult(check, not nf, p.to_text(), None if not nf else nf.to_text(), ms, note))

    def identity(self, check: str, p: Polynomial, note: str | None = None) -> CheckResult:
        """Record whether ``p`` is the zero polynomial (no quotient)."""
        return self.add(CheckResult(check, not p, p.to_text(), None if not p else p.to_text(), 0.0, note))

    def flag(self, check: str, ok: bool, witness: str | None = None, note: str | None = None, ms=0.0):
        return self.add(CheckResult(check, bool(ok), None, None if ok else (witness or "false"), ms, note))

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for r in other.results:
            self.results.append(CheckResult(prefix + r.check, r.passed, r.polynomial, r.witness, r.ms, r.note))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, check: str) -> CheckResult:
        for r in self.results:
            if r.check == check:
                return r
        raise KeyError(check)

    def __iter__(self):
        return iter(self.results)

    def __len__(self):
        return len(self.results)

    def to_json(self, timings: bool = False) -> list[dict]:
        return [r.to_json(timings) for r in self.results]

    def rows(self) -> list[tuple[str, str, str]]:
        return [(r.check, r.status.upper(), r.witness or "") for r in self.results]


# the degree-2 pipeline -----------------------------------------------------------

def a_first(cls, ring, l):
    b, psi, D1, D2 = cls["b"], ring.gen("psi"), ring.gen("D1"), ring.gen("D2")
    return (b + psi - D1) ** l + (b + psi - D2) ** l - (b + psi) ** l + (b - psi) ** l


def a_second(cls, ring, l):
    b, psi, D1, D2, D = cls["b"], ring.gen("psi"), ring.gen("D1"), ring.gen("D2"), cls["D"]
    return ((b - D1) ** l + (b - D2) ** l + (b + psi - D) ** l + (b - psi) ** l
            - b ** l - (b - D) ** l)


def S_sum(cls, ring, N):
    b = cls["b"]
    return sum((a_first(cls, ring, l) * b ** (N - l) for l in range(N + 1)), ring.zero())


def k_printed(cls):
    kH2, kH3, D = cls["kH2"], cls["kH3"], cls["D"]
    return F(1, 4) * kH2 ** 2 + F(1, 8) * kH2 * D + F(1, 8) * D ** 2 - F(1, 2) * kH3


def k_corrected(cls):
    kH2, kH3, D = cls["kH2"], cls["kH3"], cls["D"]
    return F(1, 4) * kH2 ** 2 - F(1, 8) * kH2 * D + F(1, 8) * D ** 2 - F(1, 2) * kH3


def Y_vector(cls, ring, l):
    """(b^l (2b - t), S_l - t S_{l-1}, S_{l-1}) for l >= 1."""
    b, t = cls["b"], cls["t"]
    return [b ** l * (2 * b - t), S_sum(cls, ring, l) - t * S_sum(cls, ring, l - 1), S_sum(cls, ring, l - 1)]


def Y_matrix(cls, ring, l, sign=1):
    """M^l applied to the seed (b(2b-t), 2b-t, 2), with M = [[b,0,0],[1,0,sign*k],[0,1,t]]."""
    b, t, k = cls["b"], cls["t"], cls["k"]
    v = [b * (2 * b - t), 2 * b - t, ring.const(2)]
    for _ in range(l):
        v = [b * v[0], v[0] + sign * k * v[2], v[1] + t * v[2]]
    return v


def example36_pipeline(n: int, presentation=None) -> VerificationReport:
    """All identities of the degree-2 worked example, checked in m01_pn_d2(n).

    Printed statements are checked as printed; where a printed form fails, a
    corrected form is checked alongside under a name ending in "(corrected)".
    """
    P = presentation or pres.m01_pn_d2(n)
    q = P.quotient()
    ring = P.ring
    cls = P.derived
    conv = getattr(P, "convention", None)
    I = conv.I if conv else 1
    rep = VerificationReport(f"example36(n={n})")
    b, t, k, D = cls["b"], cls["t"], cls["k"], cls["D"]
    kH2 = cls["kH2"]
    H, psi, D1, D2 = (ring.gen(x) for x in ("H", "psi", "D1", "D2"))

    rep.identity("b = (kH2 + D)/4", b - F(1, 4) * (kH2 + D))
    rep.identity("t = (kH2 - D)/2", t - F(1, 2) * (kH2 - D))
    rep.identity("Q(s) = sum (b+s)^l b^(n-l)",
                 pres.Q_poly(n, psi - D1) - sum(((b + psi - D1) ** l * b ** (n - l) for l in range(n + 1)), ring.zero()))
    rep.zero("D1*D2*psi", q, D1 * D2 * psi)
    rep.zero("psi-square i=1", q, pres.psi_square_relation(ring, cls, 1))
    rep.zero("psi-square i=2", q, pres.psi_square_relation(ring, cls, 2))
    rep.zero("f-square", q, pres.f_square_printed(ring, cls))
    rep.zero("f-square (corrected)", q, pres.f_square_corrected(ring, cls),
             note="f^2 + 1/16 D^4 + 3/16 kH2^2 D^2 - 1/2 kH3 D^2")
    rep.zero("node rule at d=2", q, (cls["F1"] - cls["F2"]) - (D1 - D2) * (2 * psi - D))
    for label, p in pres.thm33_d2_in_m01(ring, cls, I).items():
        rep.zero(f"thm33 {label}", q, p)
    rel3 = pres.thm33_relation3_d2(n, I)
    bad = [l for l, p in pres.relation3_in_m01(rel3, ring, cls, I) if q.normal_form(p)]
    rep.flag(f"thm33 (3) kernel ({len(rel3.relations)} generators)", not bad, ", ".join(bad))
    R = pres.lemma31_R(2)
    imgs = {"psi": psi, "D{1}": D1, "D{2}": D2, "kH2": kH2, "kH3": cls["kH3"]}
    rep.zero("lemma R at d=2", q, substitute(R, imgs, ring))
    rep.zero("k forms agree", q, k - k_printed(cls))
    rep.zero("k forms agree (corrected)", q, k - k_corrected(cls), note="1/4 kH2^2 - 1/8 kH2 D + 1/8 D^2 - 1/2 kH3")
    for l in range(n + 2):
        rep.zero(f"a_l forms agree l={l}", q, a_first(cls, ring, l) - a_second(cls, ring, l))
    ok, wit = inclusion_exclusion_check(lambda u: (b + u) ** (n + 1), [psi, -D1, -D2], q)
    rep.flag("observation (*) with psi, D1, D2", ok, wit and wit.to_text())
    rep.zero("a_{n+1}", q, a_first(cls, ring, n + 1))
    rep.zero("S_n", q, S_sum(cls, ring, n))
    rep.zero("S_{n+1}", q, S_sum(cls, ring, n + 1))
    rep.zero("D*b^{n+1}", q, D * b ** (n + 1))
    rep.identity("D = 2b - t", D - (2 * b - t))
    for l in range(n + 2):
        a = lambda j: a_first(cls, ring, j)
        rep.zero(f"a-recurrence l={l}", q, a(l + 2) - t * a(l + 1) + k * a(l))
    for l in range(n + 2):
        S = lambda j: S_sum(cls, ring, j)
        rep.zero(f"S-recurrence l={l}", q, S(l + 2) - t * S(l + 1) + k * S(l) - b ** l * (2 * b - t))
    for l in range(n + 2):
        S = lambda j: S_sum(cls, ring, j)
        rep.zero(f"S-recurrence l={l} (corrected)", q, S(l + 2) - t * S(l + 1) + k * S(l) - b ** (l + 1) * (2 * b - t),
                 note="right side b^(l+1)(2b - t)")
    seed = Y_vector(cls, ring, 1)
    mat0 = Y_matrix(cls, ring, 0)
    rep.identity("Y_1 equals the seed vector", sum(((x - y) * (x - y) for x, y in zip(seed, mat0)), ring.zero()))
    Y = Y_vector(cls, ring, n + 1)
    for i, comp in enumerate(Y):
        rep.zero(f"Y_{{n+1}}[{i}]", q, comp)
    Ym = Y_matrix(cls, ring, n)
    for i, (x, y) in enumerate(zip(Ym, Y)):
        rep.zero(f"Y_{{n+1}}[{i}] matrix form", q, x - y)
    Ym = Y_matrix(cls, ring, n, sign=-1)
    for i, (x, y) in enumerate(zip(Ym, Y)):
        rep.zero(f"Y_{{n+1}}[{i}] matrix form (corrected)", q, x - y, note="matrix entry -k")
    return rep
