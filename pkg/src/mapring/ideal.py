"""Gröbner bases, normal forms, Hilbert functions and kernels of ring maps.

Plain Buchberger with the coprime and chain criteria; pairs are processed by
increasing weighted degree of their lcm, which for homogeneous input makes a
degree-truncated run correct through the truncation degree.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .order import DEFAULT_ORDER, ELIMINATION, MonomialOrder
from .poly import Generator, PolyRing, Polynomial, RingMismatchError, divides, substitute


class KernelDegreeBoundError(RuntimeError):
    """The elimination run stopped at the degree bound with pairs still pending."""

    def __init__(self, bound: int, partial: list, next_degree: int):
        self.bound = bound
        self.partial = partial
        self.next_degree = next_degree
        super().__init__(
            f"kernel not saturated at degree bound {bound}: S-pairs of degree {next_degree} pending"
        )


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


class _Reducer:
    """Reduction of term dicts against a list of monic (lead, tail) pairs."""

    def __init__(self, key):
        self.key = key
        self.leads: list[tuple] = []
        self.tails: list[dict] = []

    def add(self, lead, tail):
        self.leads.append(lead)
        self.tails.append(tail)

    def find_divisor(self, e, skip=None):
        for i, lm in enumerate(self.leads):
            if i != skip and divides(lm, e):
                return i
        return None

    def reduce(self, terms: dict, skip=None, full=True) -> dict:
        """Return the remainder of ``terms``; with ``full=False`` stop at the first irreducible lead."""
        key = self.key
        rest = dict(terms)
        heap = [(_neg(key(e)), e) for e in rest]
        heapq.heapify(heap)
        rem = {}
        while heap:
            _, e = heapq.heappop(heap)
            c = rest.pop(e, None)
            if c is None:
                continue
            i = self.find_divisor(e, skip)
            if i is None:
                rem[e] = c
                if not full:
                    rem.update(rest)
                    return rem
                continue
            q = tuple(x - y for x, y in zip(e, self.leads[i]))
            for f, v in self.tails[i].items():
                m = tuple(x + y for x, y in zip(f, q))
                old = rest.get(m)
                new = (old or 0) - c * v
                if new:
                    if old is None:
                        heapq.heappush(heap, (_neg(key(m)), m))
                    rest[m] = new
                elif old is not None:
                    del rest[m]
        return rem


def _neg(k):
    return tuple(-x for x in k)


def _monic(terms: dict, key):
    lead = max(terms, key=key)
    inv = 1 / terms[lead]
    tail = {e: c * inv for e, c in terms.items() if e != lead}
    return lead, tail


class GroebnerBasis:
    """A reduced, monic Gröbner basis; elements sorted by increasing leading monomial."""

    def __init__(self, ring: PolyRing, order: MonomialOrder, elements: Sequence[Polynomial],
                 complete: bool = True, pending_degree: int | None = None):
        self.ring = ring
        self.order = order
        self.elements = tuple(elements)
        # False when produced by a degree-truncated run that left pairs unprocessed
        self.complete = complete
        self.pending_degree = pending_degree
        self._key = order.key(ring.degrees)
        self._reducer = _Reducer(self._key)
        for g in self.elements:
            lead, tail = _monic(dict(g.terms), self._key)
            self._reducer.add(lead, tail)

    @property
    def leading_monomials(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self._reducer.leads)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def normal_form(self, p: Polynomial) -> Polynomial:
        if p.ring != self.ring:
            raise RingMismatchError("polynomial and basis live in different rings")
        return Polynomial._raw(self.ring, self._reducer.reduce(dict(p.terms)))

    def contains(self, p: Polynomial) -> bool:
        return not self.normal_form(p)

    def s_polynomial(self, i: int, j: int) -> Polynomial:
        return Polynomial._raw(self.ring, _spoly(self._reducer, i, j))

    def check(self) -> list[str]:
        """Problems found with the Gröbner and reducedness properties (empty when sound)."""
        problems = []
        red = self._reducer
        n = len(red.leads)
        for i in range(n):
            for j in range(i + 1, n):
                r = red.reduce(_spoly(red, i, j))
                if r:
                    problems.append(f"S({i},{j}) has nonzero remainder")
        for i in range(n):
            for j in range(n):
                if i != j and divides(red.leads[j], red.leads[i]):
                    problems.append(f"lead {i} divisible by lead {j}")
            for e in red.tails[i]:
                if red.find_divisor(e) is not None:
                    problems.append(f"tail of element {i} is reducible")
                    break
        return problems

    def to_json(self) -> dict:
        data = presentation_json(self.ring, self.elements, self.order)
        data["reduced"] = True
        return data

    @classmethod
    def from_json(cls, data: dict) -> "GroebnerBasis":
        ring, rels, order = presentation_from_json(data)
        return cls(ring, order, rels)

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.elements]})"


def _spoly(red: _Reducer, i: int, j: int) -> dict:
    li, lj = red.leads[i], red.leads[j]
    lcm = _lcm(li, lj)
    qi = tuple(x - y for x, y in zip(lcm, li))
    qj = tuple(x - y for x, y in zip(lcm, lj))
    out: dict = {}
    for f, v in red.tails[i].items():
        m = tuple(x + y for x, y in zip(f, qi))
        out[m] = out.get(m, 0) + v
    for f, v in red.tails[j].items():
        m = tuple(x + y for x, y in zip(f, qj))
        out[m] = out.get(m, 0) - v
    return {e: c for e, c in out.items() if c}


def buchberger(generators: Iterable[Polynomial], order: MonomialOrder = DEFAULT_ORDER,
               degree_bound: int | None = None, ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal spanned by ``generators``.

    With ``degree_bound`` set, S-pairs whose lcm has weighted degree above the
    bound are left unprocessed and the result is flagged ``complete=False``
    (for homogeneous input it is still a Gröbner basis through that degree).
    """
    gens = list(generators)
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError("generators live in different rings")
    key = order.key(ring.degrees)
    wdeg = ring.weighted_degree
    red = _Reducer(key)

    pending: set[tuple[int, int]] = set()
    heap: list = []

    def push_pairs(new):
        lm = red.leads[new]
        for i in range(new):
            if red.leads[i] is None:
                continue
            lcm = _lcm(red.leads[i], lm)
            pending.add((i, new))
            heapq.heappush(heap, (wdeg(lcm), key(lcm), i, new))

    # input: drop zeros, make monic, reduce each against what is already there
    for g in sorted((g for g in gens if g), key=lambda p: key(p.leading_term(order)[0])):
        terms = red.reduce(dict(g.terms))
        if terms:
            red.add(*_monic(terms, key))
            push_pairs(len(red.leads) - 1)

    truncated_at = None
    while heap:
        deg, _, i, j = heapq.heappop(heap)
        if (i, j) not in pending:
            continue
        if degree_bound is not None and deg > degree_bound:
            truncated_at = deg
            break
        pending.discard((i, j))
        li, lj = red.leads[i], red.leads[j]
        if _coprime(li, lj):
            continue
        lcm = _lcm(li, lj)
        chain = False
        for k, lk in enumerate(red.leads):
            if k in (i, j) or not divides(lk, lcm):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                chain = True
                break
        if chain:
            continue
        r = red.reduce(_spoly(red, i, j))
        if r:
            red.add(*_monic(r, key))
            push_pairs(len(red.leads) - 1)

    return GroebnerBasis(ring, order, _interreduce(ring, red, key),
                         complete=truncated_at is None, pending_degree=truncated_at)


def _interreduce(ring, red: _Reducer, key) -> list[Polynomial]:
    n = len(red.leads)
    order_idx = sorted(range(n), key=lambda i: key(red.leads[i]))
    keep = []
    for i in order_idx:
        if any(divides(red.leads[j], red.leads[i]) for j in keep):
            continue
        keep.append(i)
    final = _Reducer(key)
    for i in keep:
        final.add(red.leads[i], red.tails[i])
    out = []
    for pos, i in enumerate(keep):
        tail = final.reduce(red.tails[i], skip=pos)
        lead = red.leads[i]
        terms = dict(tail)
        terms[lead] = Fraction(1)
        out.append(Polynomial._raw(ring, terms))
    return out


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return gb.normal_form(p)


@dataclass(frozen=True)
class HilbertFunction:
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    def __getitem__(self, i):
        return self.dims[i]

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __eq__(self, other):
        if isinstance(other, HilbertFunction):
            return self.dims == other.dims
        if isinstance(other, (list, tuple)):
            return list(self.dims) == list(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.dims)

    @property
    def total(self) -> int:
        return sum(self.dims)

    def trimmed(self) -> "HilbertFunction":
        dims = list(self.dims)
        while len(dims) > 1 and dims[-1] == 0:
            dims.pop()
        return HilbertFunction(dims)

    def is_palindromic(self) -> bool:
        d = self.trimmed().dims
        return d == d[::-1]

    def to_list(self) -> list[int]:
        return list(self.dims)


def standard_monomials(gb: GroebnerBasis, degree: int) -> list[tuple[int, ...]]:
    """Monomials of the given weighted degree not divisible by any leading monomial."""
    leads = gb.leading_monomials
    ring = gb.ring
    mons = [e for e in ring.monomials_of_degree(degree) if not any(divides(l, e) for l in leads)]
    mons.sort(key=gb._key, reverse=True)
    return mons


class QuotientRing:
    """A graded quotient ``ring / (relations)`` with a cached Gröbner basis."""

    def __init__(self, ring: PolyRing, relations: Iterable[Polynomial] = (),
                 order: MonomialOrder = DEFAULT_ORDER, presentation=None,
                 basis: GroebnerBasis | None = None):
        self.ring = ring
        self.relations = tuple(ring(r) for r in relations)
        self.order = order
        self.presentation = presentation
        if basis is None:
            basis = buchberger(self.relations, order, ring=ring)
        elif basis.ring != ring:
            raise RingMismatchError("basis ring differs from quotient ring")
        self.basis = basis
        self._top = None

    @classmethod
    def of(cls, presentation, order: MonomialOrder | None = None) -> "QuotientRing":
        return cls(presentation.ring, presentation.relations,
                   order or getattr(presentation, "order", DEFAULT_ORDER), presentation)

    def __call__(self, value) -> Polynomial:
        return self.ring(value)

    def normal_form(self, p) -> Polynomial:
        return self.basis.normal_form(self.ring(p))

    def is_zero(self, p) -> tuple[bool, Polynomial | None]:
        nf = self.normal_form(p)
        return (not nf, nf if nf else None)

    def standard_monomials(self, degree: int) -> list[tuple[int, ...]]:
        return standard_monomials(self.basis, degree)

    def is_finite(self) -> bool:
        """True when the quotient is finite-dimensional (a pure power of every generator is a lead)."""
        leads = self.basis.leading_monomials
        for i in range(self.ring.nvars):
            if not any(l[i] and sum(l) == l[i] for l in leads):
                return False
        return True

    def top_degree(self) -> int:
        if self._top is None:
            if not self.is_finite():
                raise ValueError("quotient is infinite-dimensional")
            step = max(self.ring.degrees, default=1)
            top, zeros, D = 0, 0, 0
            # standard monomials form an order ideal, so a run of `step` empty degrees ends it
            while zeros < step:
                if self.standard_monomials(D):
                    top, zeros = D, 0
                else:
                    zeros += 1
                D += 1
            self._top = top
        return self._top

    def hilbert_function(self, max_degree: int | None = None) -> HilbertFunction:
        return hilbert_function(self, max_degree)

    def to_json(self) -> dict:
        return presentation_json(self.ring, self.relations, self.order)


def hilbert_function(q: QuotientRing, max_degree: int | None = None) -> HilbertFunction:
    """dims[D] = number of standard monomials of weighted degree D, for D = 0..max_degree.

    Without ``max_degree`` the quotient must be finite and runs to its top degree.
    """
    if max_degree is None:
        max_degree = q.top_degree()
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    return HilbertFunction([len(q.standard_monomials(D)) for D in range(max_degree + 1)])


def is_zero_in_quotient(p: Polynomial, q: QuotientRing) -> tuple[bool, Polynomial | None]:
    return q.is_zero(p)


def _fresh_names(taken: set[str], names: Sequence[str], prefix: str) -> list[str]:
    out = []
    for n in names:
        cand = n
        while cand in taken:
            cand = prefix + cand
        taken.add(cand)
        out.append(cand)
    return out


def ring_map_kernel(source, target: QuotientRing, images: Mapping,
                    degree_bound: int | None = None, strict: bool = True) -> list[Polynomial]:
    """Generators of the kernel of ``source -> target`` given by generator images.

    ``source`` is a :class:`PolyRing` or anything with ``ring``/``relations``
    attributes (its relations are added to the graph ideal). The kernel is the
    source part of an elimination basis of the graph ideal. When the target is
    finite-dimensional with top degree T, the default bound is T + e with e the
    largest source generator degree (T+1 for standard grading). That is
    enough: every monomial of degree > T maps to zero and is divisible by one
    of degree in (T, T+e]. If pairs above the bound are left
    and completeness cannot be argued, :class:`KernelDegreeBoundError` is
    raised (with the partial generators) unless ``strict=False``.
    """
    if isinstance(source, PolyRing):
        src_ring, src_rels = source, ()
    else:
        src_ring, src_rels = source.ring, tuple(source.relations)
    tgt_ring = target.ring
    top = target.top_degree() if target.is_finite() else None
    step = max(src_ring.degrees, default=1)
    if degree_bound is None and top is not None:
        degree_bound = top + step

    taken = set(src_ring.names)
    tnames = _fresh_names(taken, tgt_ring.names, "_")
    big = PolyRing([(n, g.degree) for n, g in zip(tnames, tgt_ring.generators)]
                   + list(src_ring.generators))
    nt = tgt_ring.nvars
    lift_t = {g.name: big.gen(n) for g, n in zip(tgt_ring.generators, tnames)}
    lift_s = {g.name: big.gen(g.name) for g in src_ring.generators}

    graph = []
    for g in src_ring.generators:
        img = images.get(g.name, images.get(g, None))
        if img is None:
            raise KeyError(f"no image given for {g.name}")
        img = tgt_ring(img)
        if img and img.degrees() != {g.degree}:
            raise ValueError(f"image of {g.name} is not homogeneous of degree {g.degree}")
        graph.append(big.gen(g.name) - substitute(img, lift_t, big))
    graph += [substitute(r, lift_t, big) for r in target.relations]
    graph += [substitute(r, lift_s, big) for r in src_rels]

    order = MonomialOrder(ELIMINATION, tuple(range(big.nvars)), nt)
    gb = buchberger(graph, order, degree_bound=degree_bound, ring=big)
    kernel = []
    for g in gb.elements:
        if any(any(e[:nt]) for e in g.terms):
            continue
        kernel.append(Polynomial._raw(src_ring, {e[nt:]: c for e, c in g.terms.items()}))
    kernel.sort(key=lambda p: (p.degree(), p.to_text()))
    if not gb.complete:
        saturated = top is not None and degree_bound is not None and degree_bound >= top + step
        if not saturated and strict:
            raise KernelDegreeBoundError(degree_bound, kernel, gb.pending_degree)
    return kernel


# JSON ------------------------------------------------------------------------

def presentation_json(ring: PolyRing, relations: Iterable[Polynomial],
                      order: MonomialOrder = DEFAULT_ORDER) -> dict:
    return {
        "generators": [{"name": g.name, "degree": g.degree} for g in ring.generators],
        "relations": [r.to_text(order) for r in relations],
        "order": order.to_json(ring.names),
    }


def presentation_from_json(data: dict) -> tuple[PolyRing, list[Polynomial], MonomialOrder]:
    ring = PolyRing(Generator(g["name"], int(g["degree"])) for g in data["generators"])
    rels = [ring.parse(t) for t in data.get("relations", [])]
    order = MonomialOrder.from_json(data.get("order", {}), ring.names)
    return ring, rels, order
