"""Concrete ring presentations and the universal-relation emitters.

Everything here is built from :mod:`mapring.poly` objects; verification happens
by normal forms in a :class:`~mapring.ideal.QuotientRing`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .ideal import QuotientRing, presentation_from_json, presentation_json, ring_map_kernel
from .order import DEFAULT_ORDER, MonomialOrder
from .poly import PolyRing, Polynomial, exact_divide, substitute
from .strata import (
    BoundaryLabel,
    LabelContext,
    all_labels,
    complement,
    exceptional_labels,
    is_compatible,
    is_unstable_component,
    tower_weights,
)

F = Fraction


class ConventionPinningError(RuntimeError):
    """No candidate convention, or several inequivalent ones, passed validation."""

    def __init__(self, message, results=()):
        super().__init__(message)
        self.results = list(results)


@dataclass
class RingPresentation:
    """Graded generators, homogeneous relations and a dictionary of derived classes."""

    name: str
    ring: PolyRing
    relations: tuple[Polynomial, ...]
    derived: dict[str, Polynomial] = field(default_factory=dict)
    provenance: str = ""
    order: MonomialOrder = DEFAULT_ORDER
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.relations = tuple(self.ring(r) for r in self.relations)
        for r in self.relations:
            if not r.is_homogeneous():
                raise ValueError(f"relation {r} is not homogeneous")
        self.derived = {k: self.ring(v) for k, v in self.derived.items()}
        for k, v in self.derived.items():
            if not v.is_homogeneous():
                raise ValueError(f"derived class {k} is not homogeneous")
        self._quotient = None

    @property
    def generators(self):
        return self.ring.generators

    def quotient(self) -> QuotientRing:
        if self._quotient is None:
            self._quotient = QuotientRing(self.ring, self.relations, self.order, presentation=self)
        return self._quotient

    def __getitem__(self, name: str) -> Polynomial:
        """A derived class or a generator by name."""
        if name in self.derived:
            return self.derived[name]
        return self.ring.gen(name)

    def expr(self, text: str) -> Polynomial:
        """Parse ``text`` with derived class names substituted by their definitions."""
        names = sorted(self.derived, key=len, reverse=True)
        extra = [(n, self.derived[n].degree()) for n in names if n not in self.ring]
        big = self.ring.extend(extra)
        p = big.parse(text)
        images = {n: self.derived[n] for n, _ in extra}
        return substitute(p, images, self.ring)

    def hilbert_function(self, max_degree=None):
        return self.quotient().hilbert_function(max_degree)

    def is_zero(self, p):
        return self.quotient().is_zero(p)

    def to_json(self) -> dict:
        data = presentation_json(self.ring, self.relations, self.order)
        data["name"] = self.name
        if self.derived:
            data["derived"] = {k: v.to_text(self.order) for k, v in sorted(self.derived.items())}
        data["provenance"] = self.provenance
        return data

    @classmethod
    def from_json(cls, data: dict) -> "RingPresentation":
        ring, rels, order = presentation_from_json(data)
        derived = {k: ring.parse(v) for k, v in data.get("derived", {}).items()}
        return cls(data.get("name", ""), ring, tuple(rels), derived, data.get("provenance", ""), order)


@dataclass
class RelationBundle:
    """Named relations emitted for a fixed context (d, m, n, choice of I, ...)."""

    name: str
    ring: PolyRing
    relations: list[tuple[str, Polynomial]]
    context: dict
    provenance: str = ""
    placeholders: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        for label, p in self.relations:
            if p.ring != self.ring:
                raise ValueError(f"relation {label} lives in another ring")
            if not p.is_homogeneous():
                raise ValueError(f"relation {label} is not homogeneous")

    @property
    def polynomials(self) -> list[Polynomial]:
        return [p for _, p in self.relations]

    def get(self, label: str) -> Polynomial:
        for l, p in self.relations:
            if l == label:
                return p
        raise KeyError(label)

    def labels(self) -> list[str]:
        return [l for l, _ in self.relations]

    def to_json(self) -> dict:
        data = {
            "name": self.name,
            "generators": [{"name": g.name, "degree": g.degree} for g in self.ring.generators],
            "relations": [{"name": l, "polynomial": p.to_text()} for l, p in self.relations],
            "context": {k: _jsonable(v) for k, v in self.context.items()},
            "provenance": self.provenance,
        }
        if self.placeholders:
            data["placeholders"] = list(self.placeholders)
        if self.notes:
            data["notes"] = list(self.notes)
        return data


def _jsonable(v):
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in v]
        return sorted(items) if isinstance(v, (set, frozenset)) else items
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, BoundaryLabel):
        return str(v)
    return v


# basic presentations ---------------------------------------------------------------

def projective_space(n: int) -> RingPresentation:
    if n < 1:
        raise ValueError("n must be at least 1")
    ring = PolyRing([("H", 1)])
    return RingPresentation(f"P^{n}", ring, (ring.gen("H") ** (n + 1),),
                            provenance="cohomology of projective space: Q[H]/(H^(n+1))")


def _inverse_components(c1: Polynomial, c2: Polynomial, upto: int) -> list[Polynomial]:
    """Homogeneous components 0..upto of 1/(1 + c1 + c2) as a formal series."""
    ring = c1.ring
    s = [ring.one()]
    # s_k = -c1 s_{k-1} - c2 s_{k-2}
    for k in range(1, upto + 1):
        term = -c1 * s[k - 1]
        if k >= 2:
            term = term - c2 * s[k - 2]
        s.append(term)
    return s


def grassmannian_lines(n: int) -> RingPresentation:
    """Lines in P^n: Q[c1, c2] modulo the degree n and n+1 parts of 1/(1 + c1 + c2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    ring = PolyRing([("c1", 1), ("c2", 2)])
    s = _inverse_components(ring.gen("c1"), ring.gen("c2"), n + 1)
    return RingPresentation(f"G(2,{n + 1})", ring, (s[n], s[n + 1]),
                            provenance="tautological presentation of the Grassmannian of lines")


def flag_d1(n: int) -> RingPresentation:
    """Point-on-line flags over the line Grassmannian: the degree-1 one-pointed space."""
    g = grassmannian_lines(n)
    ring = g.ring.extend([("h", 1)])
    c1, c2, h = ring.gen("c1"), ring.gen("c2"), ring.gen("h")
    lift = {x: ring.gen(x) for x in ("c1", "c2")}
    rels = tuple(substitute(r, lift, ring) for r in g.relations) + (h * h - c1 * h + c2,)
    derived = {"H": h, "psi": c1 - 2 * h, "kH2": c1, "kH3": c1 * c1 - c2}
    return RingPresentation(f"flag_d1({n})", ring, rels, derived,
                            provenance="flag space of a point on a line in P^n over the line Grassmannian",
                            metadata={"n": n})


def pushforward_quadratic_bundle(p: Polynomial, base: PolyRing | None = None) -> Polynomial:
    """Fiber integral along the P^1-bundle ``h^2 = c1 h - c2``: f_*(1) = 0, f_*(h) = 1."""
    ring = p.ring
    if base is None:
        base = PolyRing([g for g in ring.generators if g.name != "h"])
    ih = ring.index("h")
    c1, c2 = ring.gen("c1"), ring.gen("c2")
    # reduce to degree <= 1 in h
    h_pows = [ring.one(), ring.gen("h")]
    coeff_h = base.zero()
    for e, c in p.terms.items():
        k = e[ih]
        while len(h_pows) <= k:
            prev = h_pows[-1]
            h_pows.append(_times_h(prev, ring, ih, c1, c2))
        rest = list(e)
        rest[ih] = 0
        mono = ring.monomial(rest, c)
        reduced = mono * h_pows[k]
        for f, v in reduced.terms.items():
            if f[ih] == 1:
                coeff_h = coeff_h + base.monomial([x for i, x in enumerate(f) if i != ih], v)
            elif f[ih] > 1:
                raise AssertionError("h-reduction left a higher power")
    return coeff_h


def _times_h(q, ring, ih, c1, c2):
    """Multiply a polynomial of h-degree <= 1 by h and reduce with h^2 = c1 h - c2."""
    h = ring.gen("h")
    out = ring.zero()
    for e, c in q.terms.items():
        if e[ih] == 0:
            out = out + ring.monomial(e, c) * h
        else:
            f = list(e)
            f[ih] = 0
            out = out + ring.monomial(f, c) * (c1 * h - c2)
    return out


# Lemma-R type emitters -------------------------------------------------------------

def proper_subsets(d: int) -> list[BoundaryLabel]:
    return all_labels(LabelContext((d,), 0))


def d_symbol(h: BoundaryLabel) -> str:
    return h.symbol("D")


def n_psi(d: int, a: int) -> Fraction:
    """Coefficient of psi*D_h for |h| = a."""
    x = F(a, d)
    return x * x * (6 - 4 * x)


def n_nested(d: int, a: int, b: int) -> Fraction:
    """Coefficient N_{hh'} for h inside h', |h| = a, |h'| = b."""
    x, y = F(a, d), F(b, d)
    return x * x * (6 * y - 2 * x - 3 * y * y)


def n_disjoint(d: int, a: int, b: int) -> Fraction:
    return -3 * F(a * a * b * b, d ** 4)


def lemma_r_ring(d: int, labels: Sequence[BoundaryLabel] | None = None) -> PolyRing:
    labels = proper_subsets(d) if labels is None else list(labels)
    return PolyRing([("psi", 1)] + [(d_symbol(h), 1) for h in labels] + [("kH2", 1), ("kH3", 2)])


def lemma31_R(d: int, labels: Sequence[BoundaryLabel] | None = None,
              ring: PolyRing | None = None, nested_pairs: str = "ordered") -> Polynomial:
    """The codimension-two class R for degree d over psi, kH2, kH3 and D_h.

    Disjoint pairs run over ordered pairs (both (h,h') and (h',h)); the
    nested pair (h,h) is counted once and strictly nested pairs in both
    orders (``nested_pairs="ordered"``) or once (``"unordered"``).
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    labels = proper_subsets(d) if labels is None else sorted(labels, key=BoundaryLabel.sort_key)
    for h in labels:
        if h.context.degrees != (d,):
            raise ValueError(f"label {h} is not a degree-{d} label")
    ring = ring or lemma_r_ring(d, labels)
    psi, kH2, kH3 = ring.gen("psi"), ring.gen("kH2"), ring.gen("kH3")
    D = {h: ring.gen(d_symbol(h)) for h in labels}
    R = psi * psi + F(3, d ** 4) * kH2 * kH2 - F(4, d ** 3) * kH3
    for h in labels:
        R = R - n_psi(d, h.size) * psi * D[h]
    for h in labels:
        for hp in labels:
            if h == hp:
                R = R + n_nested(d, h.size, h.size) * D[h] * D[h]
            elif h.is_nested_in(hp):
                mult = 2 if nested_pairs == "ordered" else 1
                R = R + mult * n_nested(d, h.size, hp.size) * D[h] * D[hp]
            elif h.is_disjoint_from(hp):
                R = R + n_disjoint(d, h.size, hp.size) * D[h] * D[hp]
    return R


def kappa_divisor_relation(d: int, labels: Sequence[BoundaryLabel] | None = None,
                           ring: PolyRing | None = None) -> Polynomial:
    """psi + (2/d) H - (1/d^2) kH2 - sum |h|^2/d^2 D_h."""
    if d < 1:
        raise ValueError("d must be at least 1")
    labels = proper_subsets(d) if labels is None else list(labels)
    if ring is None:
        ring = PolyRing([("psi", 1), ("H", 1), ("kH2", 1)] + [(d_symbol(h), 1) for h in labels])
    p = ring.gen("psi") + F(2, d) * ring.gen("H") - F(1, d * d) * ring.gen("kH2")
    for h in labels:
        p = p - F(h.size ** 2, d * d) * ring.gen(d_symbol(h))
    return p


@dataclass(frozen=True)
class NodeRule:
    """Self-intersection of a node divisor in terms of the cotangent lines at the node.

    ``local`` is the restricted form  D|_S = -(psi_h + psi_hbar)  (degree 1 on the
    stratum); ``ambient`` is the pushed-forward form  D_{h hbar}^2 = -(F_h + F_hbar).
    """

    label: BoundaryLabel
    local_lhs: Polynomial
    local_rhs: Polynomial
    ambient_lhs: Polynomial
    ambient_rhs: Polynomial

    def apply(self, p: Polynomial) -> Polynomial:
        """Rewrite every power D^k (k >= 2) of the node divisor via the ambient rule."""
        ring = p.ring
        (e0,) = self.ambient_lhs.terms
        i = next(j for j, x in enumerate(e0) if x)
        out = ring.zero()
        for e, c in p.terms.items():
            k = e[i]
            rest = list(e)
            rest[i] = k % 2
            term = ring.monomial(rest, c)
            out = out + term * self.ambient_rhs ** (k // 2)
        return out


def node_pair_symbol(h: BoundaryLabel) -> str:
    """Name of the node divisor D_{h hbar}; the side holding 1 is written first."""
    hb = complement(h)
    a, b = (h, hb) if 1 in h.parts[0] else (hb, h)
    return "Dp{" + ",".join(map(str, sorted(a.parts[0]))) + "|" + ",".join(map(str, sorted(b.parts[0]))) + "}"


def node_square_rule(h: BoundaryLabel, ring: PolyRing | None = None) -> NodeRule:
    hb = complement(h)
    names = [node_pair_symbol(h), h.symbol("psi"), hb.symbol("psi"), h.symbol("F"), hb.symbol("F")]
    if ring is None:
        ring = PolyRing([(names[0], 1), (names[1], 1), (names[2], 1), (names[3], 2), (names[4], 2)])
    Dp = ring.gen(names[0])
    return NodeRule(h, Dp, -(ring.gen(names[1]) + ring.gen(names[2])),
                    Dp * Dp, -(ring.gen(names[3]) + ring.gen(names[4])))


# universal relations in a formal ring ------------------------------------------------

def default_I(d: int) -> frozenset[BoundaryLabel]:
    """Labels with |h| > d/2, plus for |h| = d/2 the member containing 1."""
    out = set()
    for h in proper_subsets(d):
        if 2 * h.size > d or (2 * h.size == d and 1 in h.parts[0]):
            out.add(h)
    return frozenset(out)


def parse_I(d: int, I) -> frozenset[BoundaryLabel]:
    ctx = LabelContext((d,), 0)
    out = set()
    for x in I:
        if isinstance(x, BoundaryLabel):
            out.add(x)
        elif isinstance(x, str):
            out.add(BoundaryLabel.parse(x if "|" in x else x + "|{}", ctx))
        else:
            out.add(BoundaryLabel((frozenset(x),), frozenset(), ctx))
    return frozenset(out)


def validate_I(d: int, I) -> frozenset[BoundaryLabel]:
    """Check the selection rule: all |h| > d/2, none below, one of each half-size pair."""
    I = parse_I(d, I)
    labels = proper_subsets(d)
    for h in I:
        if h not in labels:
            raise ValueError(f"{h} is not a proper nonempty subset of 1..{d}")
    for h in labels:
        if 2 * h.size > d and h not in I:
            raise ValueError(f"I must contain {h} (|h| > d/2)")
        if 2 * h.size < d and h in I:
            raise ValueError(f"I must not contain {h} (|h| < d/2)")
        if 2 * h.size == d and (h in I) == (complement(h) in I):
            raise ValueError(f"I must contain exactly one of {h}, {complement(h)}")
    return I


def thm33_ring(d: int) -> PolyRing:
    labels = proper_subsets(d)
    pairs = sorted({node_pair_symbol(h) for h in labels})
    gens = [("psi'", 1), ("psi", 1)] + [(d_symbol(h), 1) for h in labels] + [(p, 1) for p in pairs]
    gens += [(h.symbol("F"), 2) for h in labels] + [("kH2", 1), ("kH3", 2)]
    return PolyRing(gens)


def _strictly_inside(I, h):
    return [hp for hp in sorted(I, key=BoundaryLabel.sort_key) if hp != h and hp.is_nested_in(h)]


def thm33_relations(d: int, n: int | None = None, I=None) -> RelationBundle:
    """Relations (1) and (2) for degree d, symbolically, in the formal ring ``thm33_ring(d)``.

    ``psi'`` stands for psi'_I; the bundle also records ``psi'_I = psi - sum_{h in I} D_h``
    as the relation ``psi'-def``. D_I(h) sums over h' in I strictly inside h.
    Disjoint pairs in relation (1) are unordered.
    """
    I = default_I(d) if I is None else validate_I(d, I)
    ring = thm33_ring(d)
    labels = proper_subsets(d)
    g = ring.gen
    psiI = g("psi'")
    kH2, kH3 = g("kH2"), g("kH3")
    Fh = {h: g(h.symbol("F")) for h in labels}
    Dh = {h: g(d_symbol(h)) for h in labels}
    Dp = {h: g(node_pair_symbol(h)) for h in labels}

    r1 = psiI * psiI + F(3, d ** 4) * kH2 * kH2 - F(4, d ** 3) * kH3
    for h in labels:
        if h not in I:
            r1 = r1 - F(1, 2) * n_psi(d, h.size) * (Fh[h] - Fh[complement(h)])
    for h, hp in itertools.combinations(labels, 2):
        if h.is_disjoint_from(hp):
            r1 = r1 + n_disjoint(d, h.size, hp.size) * Dp[h] * Dp[hp]

    rels = [("(1)", r1)]
    for h in sorted(I, key=BoundaryLabel.sort_key):
        inner = _strictly_inside(I, h)
        DIh = sum((Dh[x] for x in inner), ring.zero())
        DIhb = sum((Dh[complement(x)] for x in inner), ring.zero())
        psi_h = psiI + DIh
        r2 = Dh[h] * Dh[h] - Dh[h] * (Dp[h] - psi_h) - F(1, 2) * (Dp[h] * (psi_h - DIhb) + Fh[h])
        rels.append((f"(2) h={_fmt(h)}", r2))
    psi_def = psiI - g("psi") + sum((Dh[h] for h in I), ring.zero())
    rels.append(("psi'-def", psi_def))
    ctx = {"d": d, "I": sorted(_fmt(h) for h in I), "disjoint_pairs": "unordered",
           "D_I": "strict subsets"}
    if n is not None:
        ctx["n"] = n
    return RelationBundle(f"thm33(d={d})", ring, rels, ctx,
                          provenance="forgetful-map relations for one-pointed degree-d maps",
                          placeholders=["(3): D_h * ker(restriction to the node stratum), computed only for d=2"])


def _fmt(h: BoundaryLabel) -> str:
    return "{" + ",".join(map(str, sorted(h.parts[0]))) + "}"


def change_witness(d: int, h: BoundaryLabel, ring: PolyRing | None = None) -> Polynomial:
    """F_h - F_hbar - (D_h - D_hbar)(2 psi' - D_{h hbar}) with psi' = psi - sum_{|g| > d/2} D_g."""
    ring = ring or thm33_ring(d)
    g = ring.gen
    hb = complement(h)
    psi_prime = g("psi") - sum((g(d_symbol(x)) for x in proper_subsets(d) if 2 * x.size > d), ring.zero())
    return g(h.symbol("F")) - g(hb.symbol("F")) - (g(d_symbol(h)) - g(d_symbol(hb))) * (2 * psi_prime - g(node_pair_symbol(h)))


def i_change_check(d: int, I, h) -> tuple[bool, Polynomial]:
    """Relation (1) under I minus under I with h -> hbar, compared with the change witness.

    Both sides are expressed through psi (psi'_I eliminated). The comparison is
    modulo D_h + D_hbar = D_{h hbar} and the products of half-size classes from
    different splittings. Returns (ok, remainder).
    """
    I = validate_I(d, I)
    (h,) = parse_I(d, [h])
    if h not in I or 2 * h.size != d:
        raise ValueError("h must be a half-size member of I")
    J = (I - {h}) | {complement(h)}
    ring = thm33_ring(d)
    g = ring.gen

    def rel1(choice):
        b = thm33_relations(d, None, choice)
        r = b.get("(1)")
        psiI = g("psi") - sum((g(d_symbol(x)) for x in choice), ring.zero())
        return substitute(r, {"psi'": psiI}, ring)

    diff = rel1(I) - rel1(J)
    target = change_witness(d, h, ring)
    half = [x for x in proper_subsets(d) if 2 * x.size == d]
    compat = []
    for x in half:
        compat.append(g(d_symbol(x)) + g(d_symbol(complement(x))) - g(node_pair_symbol(x)))
    for x, y in itertools.combinations(half, 2):
        if y == complement(x):
            continue
        for a in (g(d_symbol(x)), g(node_pair_symbol(x))):
            for b in (g(d_symbol(y)), g(node_pair_symbol(y))):
                compat.append(a * b)
    q = QuotientRing(ring, compat)
    nf = q.normal_form(diff - target)
    return (not nf, nf)


# the degree-2 one-pointed ring ---------------------------------------------------

M01_GENERATORS = [("H", 1), ("psi", 1), ("D1", 1), ("D2", 1)]


def _Q(ring, b, s, n):
    return exact_divide((b + s) ** (n + 1) - b ** (n + 1), s)


def m01_relations(n: int, ring: PolyRing | None = None) -> list[Polynomial]:
    ring = ring or PolyRing(M01_GENERATORS)
    H, psi, D1, D2 = (ring.gen(x) for x in ("H", "psi", "D1", "D2"))
    b = H + psi
    last = (_Q(ring, b, psi - D1, n) - _Q(ring, b, psi, n)
            + _Q(ring, b, psi - D2, n) - _Q(ring, b, psi, n)
            + exact_divide((H + 2 * psi) ** (n + 1) - H ** (n + 1), psi))
    return [H ** (n + 1), D1 * D2 * psi, D1 * b ** (n + 1), D2 * b ** (n + 1),
            D1 * _Q(ring, b, psi - D1, n), D2 * _Q(ring, b, psi - D2, n), last]


@dataclass(frozen=True)
class Convention:
    """A choice of reading for the d=2 derived classes f and kH3."""

    psi_reading: str   # "untwisted": psi' = psi ; "twisted": psi' = psi - sum_{h in I} D_h
    sign: int          # f = sign * (1/2)(D1 - D2)(2 psi' - D)
    I: int             # the singleton in I (1 or 2)

    def label(self) -> str:
        return f"{self.psi_reading},{'+' if self.sign > 0 else '-'}f,I={{{self.I}}}"


CANDIDATES = tuple(Convention(r, s, i) for r in ("twisted", "untwisted") for s in (1, -1) for i in (1, 2))


def _base_classes(ring):
    H, psi, D1, D2 = (ring.gen(x) for x in ("H", "psi", "D1", "D2"))
    D = D1 + D2
    kH2 = 4 * psi + 4 * H - D
    b = H + psi
    t = F(1, 2) * (kH2 - D)
    k = b * b - b * D + D1 * D2 - (psi - D) * psi
    return {"D": D, "kH2": kH2, "b": b, "t": t, "k": k}


def derived_classes(ring: PolyRing, conv: Convention) -> dict[str, Polynomial]:
    H, psi, D1, D2 = (ring.gen(x) for x in ("H", "psi", "D1", "D2"))
    c = _base_classes(ring)
    D, kH2 = c["D"], c["kH2"]
    DI = D1 if conv.I == 1 else D2
    psi_prime = psi if conv.psi_reading == "untwisted" else psi - DI
    f = conv.sign * F(1, 2) * (D1 - D2) * (2 * psi_prime - D)
    # kH3 from (psi - D1)^2 - 3/16 D^2 + 3/16 kH2^2 - 1/2 kH3 + f = 0
    kH3 = 2 * ((psi - D1) ** 2 - F(3, 16) * D * D + F(3, 16) * kH2 * kH2 + f)
    F1 = f - F(1, 2) * D * D
    F2 = -f - F(1, 2) * D * D
    out = dict(c)
    out.update({"f": f, "kH3": kH3, "F1": F1, "F2": F2, "psiI": psi - DI})
    return out


def psi_square_relation(ring, cls, i: int) -> Polynomial:
    psi, Di = ring.gen("psi"), ring.gen(f"D{i}")
    D, kH2, kH3, f = cls["D"], cls["kH2"], cls["kH3"], cls["f"]
    sign = 1 if i == 1 else -1
    return (psi - Di) ** 2 - F(3, 16) * D * D + F(3, 16) * kH2 * kH2 - F(1, 2) * kH3 + sign * f


def f_square_printed(ring, cls) -> Polynomial:
    D, kH2, kH3, f = cls["D"], cls["kH2"], cls["kH3"], cls["f"]
    return f * f + F(1, 2) * D ** 4 + F(3, 4) * kH2 ** 2 * D ** 2 - 2 * kH3 * D ** 2


def f_square_corrected(ring, cls) -> Polynomial:
    D, kH2, kH3, f = cls["D"], cls["kH2"], cls["kH3"], cls["f"]
    return f * f + F(1, 16) * D ** 4 + F(3, 16) * kH2 ** 2 * D ** 2 - F(1, 2) * kH3 * D ** 2


def thm33_d2_images(ring: PolyRing, cls: Mapping[str, Polynomial], I: int) -> dict[str, Polynomial]:
    """Images of the formal degree-2 symbols of ``thm33_ring(2)`` inside the m01 ring."""
    psi, D1, D2 = ring.gen("psi"), ring.gen("D1"), ring.gen("D2")
    return {"psi'": psi - (D1 if I == 1 else D2), "psi": psi, "D{1}": D1, "D{2}": D2,
            "Dp{1|2}": cls["D"], "F{1}": cls["F1"], "F{2}": cls["F2"],
            "kH2": cls["kH2"], "kH3": cls["kH3"]}


def thm33_d2_in_m01(ring: PolyRing, cls, I: int) -> dict[str, Polynomial]:
    """Relations (1) and (2) at d=2 pushed into the m01 ring."""
    bundle = thm33_relations(2, None, [{I}])
    images = thm33_d2_images(ring, cls, I)
    out = {}
    for label, p in bundle.relations:
        if label == "psi'-def":
            continue
        out[label] = substitute(p, images, ring)
    return out


def _pin_checks(q: QuotientRing, conv: Convention) -> dict[str, bool]:
    ring = q.ring
    cls = derived_classes(ring, conv)
    checks = {"psi-square i=2": not q.normal_form(psi_square_relation(ring, cls, 2))}
    for label, p in thm33_d2_in_m01(ring, cls, conv.I).items():
        if label.startswith("(2)"):
            checks[label] = not q.normal_form(p)
    return checks


PIN_N = 3


@lru_cache(maxsize=None)
def _pinning_quotient(n: int) -> QuotientRing:
    ring = PolyRing(M01_GENERATORS)
    return QuotientRing(ring, m01_relations(n, ring))


@lru_cache(maxsize=None)
def pin_convention(n: int = PIN_N, candidates: tuple[Convention, ...] = CANDIDATES) -> tuple[Convention, tuple]:
    """Search the candidate conventions; return the pinned one and the per-candidate results.

    Passing candidates that produce identical derived classes count as one.
    Raises :class:`ConventionPinningError` when none, or several inequivalent, pass.
    """
    q = _pinning_quotient(n)
    results = []
    passing = []
    for conv in candidates:
        checks = _pin_checks(q, conv)
        ok = all(checks.values())
        results.append((conv.label(), ok, tuple(sorted(checks.items()))))
        if ok:
            passing.append(conv)
    if not passing:
        raise ConventionPinningError("no candidate convention passes validation", results)
    ring = q.ring
    classes = {}
    for conv in passing:
        cls = derived_classes(ring, conv)
        classes.setdefault((cls["f"], cls["kH3"]), []).append(conv)
    if len(classes) > 1:
        raise ConventionPinningError(
            f"{len(classes)} inequivalent conventions pass validation: "
            + "; ".join(c.label() for c in passing), results)
    return passing[0], tuple(results)


def m01_pn_d2(n: int, convention: Convention | None = None) -> RingPresentation:
    """The degree-2 one-pointed ring on H, psi, D1, D2 with pinned derived classes."""
    if n < 1:
        raise ValueError("n must be at least 1")
    pin_results = ()
    if convention is None:
        convention, pin_results = pin_convention()
    ring = PolyRing(M01_GENERATORS)
    rels = tuple(m01_relations(n, ring))
    derived = derived_classes(ring, convention)
    pres = RingPresentation(f"m01_pn_d2({n})", ring, rels, derived,
                            provenance="one-pointed degree-2 maps to P^n: divisor presentation on H, psi, D1, D2",
                            metadata={"n": n, "convention": convention.label(),
                                      "pinning": [(l, ok) for l, ok, _ in pin_results]})
    pres.convention = convention
    return pres


def Q_poly(n: int, s: Polynomial) -> Polynomial:
    """Q(s) = ((H + psi + s)^(n+1) - (H + psi)^(n+1)) / s by exact division."""
    ring = s.ring
    return _Q(ring, ring.gen("H") + ring.gen("psi"), s, n)


# relation (3) at d = 2 -----------------------------------------------------------

def fiber_flag_ring(n: int) -> RingPresentation:
    """Two flags over P^n sharing the point: H*(F) (x)_{H*(P^n)} H*(F)."""
    g = grassmannian_lines(n)
    ring = PolyRing([("x", 1), ("c1", 1), ("c2", 2), ("e1", 1), ("e2", 2)])
    x = ring.gen("x")
    rels = []
    for a, b in (("c1", "c2"), ("e1", "e2")):
        lift = {"c1": ring.gen(a), "c2": ring.gen(b)}
        rels += [substitute(r, lift, ring) for r in g.relations]
        rels.append(x * x - ring.gen(a) * x + ring.gen(b))
    derived = {"psi_h": ring.gen("c1") - 2 * x, "psi_hb": ring.gen("e1") - 2 * x}
    return RingPresentation(f"fiber_flag({n})", ring, tuple(rels), derived,
                            provenance="pairs of lines through a common point of P^n")


def thm33_relation3_d2(n: int, I: int = 1) -> RelationBundle:
    """Relation (3) at d=2: D_h times the kernel of the restriction to the node stratum.

    Source symbols: kH2, kH3, the node divisor Dp, F1, F2 and psi'_I. ``D_h``
    itself is the divisor being multiplied, so it is not a source symbol, and
    no other member of I sits strictly inside h at d=2.
    Images on the stratum (flags h and hbar sharing their point):
    psi_h, psi_hb from each flag; Dp -> -(psi_h + psi_hb); F_h -> psi_h * Dp|;
    kappa classes add over the two sides; psi'_I -> psi_h.
    """
    target = fiber_flag_ring(n)
    tr = target.ring
    ph, phb = target.derived["psi_h"], target.derived["psi_hb"]
    c1, c2, e1, e2 = (tr.gen(x) for x in ("c1", "c2", "e1", "e2"))
    Dp = -(ph + phb)
    src = PolyRing([("kH2", 1), ("kH3", 2), ("Dp", 1), ("F1", 2), ("F2", 2), ("psi'", 1)])
    Fh, Fhb = (ph * Dp, phb * Dp) if I == 1 else (phb * Dp, ph * Dp)
    images = {"kH2": c1 + e1, "kH3": c1 * c1 - c2 + e1 * e1 - e2, "Dp": Dp,
              "F1": Fh, "F2": Fhb, "psi'": ph}
    kernel = ring_map_kernel(src, target.quotient(), images)
    ring = src.extend([("Dh", 1)])
    lift = {g.name: ring.gen(g.name) for g in src.generators}
    Dh = ring.gen("Dh")
    rels = [(f"(3)[{i}]", Dh * substitute(g, lift, ring)) for i, g in enumerate(kernel)]
    return RelationBundle(f"thm33-3(d=2,n={n})", ring, rels,
                          {"d": 2, "n": n, "I": [f"{{{I}}}"], "kernel_size": len(kernel)},
                          provenance="restriction kernel to the node stratum at d=2")


def relation3_in_m01(bundle: RelationBundle, ring: PolyRing, cls, I: int) -> list[tuple[str, Polynomial]]:
    psi, D1, D2 = ring.gen("psi"), ring.gen("D1"), ring.gen("D2")
    images = {"kH2": cls["kH2"], "kH3": cls["kH3"], "Dp": cls["D"], "F1": cls["F1"], "F2": cls["F2"],
              "psi'": psi - (D1 if I == 1 else D2), "Dh": D1 if I == 1 else D2}
    return [(l, substitute(p, images, ring)) for l, p in bundle.relations]


# m >= 1 ---------------------------------------------------------------------------

def thm_m_relations(d: int, m: int) -> RelationBundle:
    """Relations for adding point m+1 to m-pointed degree-d maps.

    Generators: D_{1,m+1} ("D1m1"), the pullback of psi_1 ("fpsi1"), D_h for
    every exceptional label h (m+1 in M_h), and the pullbacks of the divisors
    D_{h - {m+1}} ("fD..."). The h'-sum in (2) runs over exceptional labels
    strictly containing h. Kernel parts of (3) are placeholders only.
    """
    if m < 1 or d < 1 or d + m < 3:
        raise ValueError("need m >= 1, d >= 1 and d + m >= 3")
    labels = exceptional_labels(d, m)
    small_ctx = LabelContext((d,), m)

    def drop(h):
        return BoundaryLabel(h.parts, h.marked - {m + 1}, small_ctx)

    gens = [("D1m1", 1), ("fpsi1", 1)] + [(h.symbol("D"), 1) for h in labels]
    gens += [(drop(h).symbol("fD"), 1) for h in labels]
    ring = PolyRing(gens)
    g = ring.gen
    D1m, fpsi = g("D1m1"), g("fpsi1")
    rels = [("(1)", D1m * D1m + fpsi * D1m)]
    for h in labels:
        sup = [hp for hp in labels if hp != h and h.is_nested_in(hp)]
        Dh = g(h.symbol("D"))
        second = Dh + fpsi + D1m - sum((g(hp.symbol("D")) for hp in sup), ring.zero())
        rels.append((f"(2) h={h}", (Dh - g(drop(h).symbol("fD"))) * second))
    for h in labels:
        rels.append((f"(3) h={h} x D1m1", g(h.symbol("D")) * D1m))
    for h, hp in itertools.combinations(labels, 2):
        if not is_compatible([h, hp]):
            rels.append((f"(3) {h} x {hp}", g(h.symbol("D")) * g(hp.symbol("D"))))
    placeholders = [f"(3) {h.symbol('D')} * ker(B*(M_0,{m}) -> B*(M_[{drop(h)}]))" for h in labels]
    return RelationBundle(f"thm_m(d={d},m={m})", ring, rels,
                          {"d": d, "m": m, "labels": [str(h) for h in labels]},
                          provenance="relations for adding a marked point via the blow-up tower",
                          placeholders=placeholders,
                          notes=["side condition: f_{m+1*}(D1m1^2) = -psi_1"])


def psi_sum_relations(d: int, m: int, k: int, weights: Mapping[int, object] | None = None) -> RelationBundle:
    """Pairwise psi_i + psi_j = D(i|j) on the (m+1)-pointed space and their descent to stage k.

    ``psi_j`` descends to ``psiP_j = psi_j - sum_{j in h, h contracted} D_h``
    (``psiP_1 = psi_1``). A label is contracted at stage k when it is exceptional
    (see :func:`exceptional_labels`) and its component is unstable for the
    stage-k weights. The descended relation
    ``psiP_1 + psiP_j = sum_{j in h, not contracted} D_h`` is included and
    follows from the others (see :func:`check_psi_sum`).
    """
    if m < 1 or d < 1:
        raise ValueError("need m >= 1 and d >= 1")
    ctx = LabelContext((d,), m + 1)
    labels = all_labels(ctx)
    w, pw = tower_weights(d, m, k)
    if weights:
        pw = dict(pw)
        pw.update(weights)
    # only exceptional labels (m+1 on a side with moduli) can be contracted; the others are
    # pulled back from the base or, like D_{j,m+1}, are proper transforms of sections
    exceptional = set(exceptional_labels(d, m))
    contracted = [h for h in labels if h in exceptional
                  and is_unstable_component(h.size, [pw[j] for j in sorted(h.marked)], w)]
    points = range(1, m + 2)
    gens = [(f"psi{i}", 1) for i in points] + [(f"psiP{i}", 1) for i in points]
    gens += [(h.symbol("D"), 1) for h in labels]
    ring = PolyRing(gens)
    g = ring.gen
    D = {h: g(h.symbol("D")) for h in labels}
    zero = ring.zero()

    def on(h, i):
        return i in h.marked  # point 1 never lies in a label

    rels = []
    for i, j in itertools.combinations(points, 2):
        sep = sum((D[h] for h in labels if on(h, i) != on(h, j)), zero)
        rels.append((f"LP({i},{j})", g(f"psi{i}") + g(f"psi{j}") - sep))
    rels.append(("def(1)", g("psiP1") - g("psi1")))
    for j in points[1:]:
        con = sum((D[h] for h in contracted if on(h, j)), zero)
        rels.append((f"def({j})", g(f"psiP{j}") - g(f"psi{j}") + con))
    for j in points[1:]:
        kept = sum((D[h] for h in labels if on(h, j) and h not in contracted), zero)
        rels.append((f"descended(1,{j})", g("psiP1") + g(f"psiP{j}") - kept))
    return RelationBundle(f"psi_sum(d={d},m={m},k={k})", ring, rels,
                          {"d": d, "m": m, "k": k, "contracted": [str(h) for h in contracted]},
                          provenance="pairwise psi-sum relations and their descent to weighted spaces")


def check_psi_sum(bundle: RelationBundle) -> dict[str, bool]:
    """Every descended relation lies in the ideal of the pairwise and definition relations."""
    base = [p for l, p in bundle.relations if not l.startswith("descended")]
    q = QuotientRing(bundle.ring, base)
    return {l: not q.normal_form(p) for l, p in bundle.relations if l.startswith("descended")}
