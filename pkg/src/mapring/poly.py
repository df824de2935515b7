"""Sparse multivariate polynomials over the rationals, graded by generator degree.

A :class:`PolyRing` is an ordered tuple of named generators with degrees; a
:class:`Polynomial` maps exponent tuples to :class:`fractions.Fraction`
coefficients. Values are immutable once built.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .order import DEFAULT_ORDER, MonomialOrder

Exponents = tuple[int, ...]


class RingMismatchError(ValueError):
    """Operands live over different generator sets."""


class DegreeMismatchError(ValueError):
    """A substitution image does not have the degree of its generator."""


class InexactDivisionError(ArithmeticError):
    def __init__(self, remainder: "Polynomial", quotient: "Polynomial"):
        self.remainder = remainder
        self.quotient = quotient
        super().__init__(f"division is not exact; remainder {remainder}")


class Generator(NamedTuple):
    name: str
    degree: int


_NAME_RE = r"[A-Za-z_](?:[A-Za-z0-9_']|\{[0-9,|]*\}|\|(?=\{))*"
_NAME_FULL = re.compile(_NAME_RE + r"\Z")


class PolyRing:
    """Free graded commutative Q-algebra on named generators."""

    __slots__ = ("generators", "_index", "_hash")

    def __init__(self, generators: Iterable[Generator | tuple[str, int]]):
        gens = tuple(Generator(str(n), int(d)) for n, d in generators)
        index = {}
        for i, g in enumerate(gens):
            if not _NAME_FULL.match(g.name):
                raise ValueError(f"invalid generator name {g.name!r}")
            if g.degree < 0:
                raise ValueError(f"generator {g.name} has negative degree")
            if g.name in index:
                raise ValueError(f"duplicate generator name {g.name!r}")
            index[g.name] = i
        self.generators = gens
        self._index = index
        self._hash = hash(gens)

    @classmethod
    def from_names(cls, names: str | Sequence[str], degree: int = 1) -> "PolyRing":
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return cls((n, degree) for n in names)

    @property
    def nvars(self) -> int:
        return len(self.generators)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no generator named {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and self.generators == other.generators

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"PolyRing({inner})"

    def extend(self, generators: Iterable[Generator | tuple[str, int]]) -> "PolyRing":
        return PolyRing(self.generators + tuple(Generator(*g) for g in generators))

    # constructors -----------------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = _as_fraction(c)
        return Polynomial._raw(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial._raw(self, {tuple(e): Fraction(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exponents: Sequence[int], coeff=1) -> "Polynomial":
        e = tuple(int(x) for x in exponents)
        if len(e) != self.nvars or min(e, default=0) < 0:
            raise ValueError(f"bad exponent vector {e}")
        return Polynomial(self, {e: coeff})

    def parse(self, text: str) -> "Polynomial":
        return _Parser(self, text).parse()

    def __call__(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise RingMismatchError("polynomial belongs to another ring")
            return value
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def weighted_degree(self, e: Exponents) -> int:
        return sum(g.degree * x for g, x in zip(self.generators, e))

    def monomials_of_degree(self, degree: int) -> list[Exponents]:
        """All exponent vectors of the given weighted degree (declaration-lex order)."""
        degs = self.degrees
        n = len(degs)
        out: list[Exponents] = []

        def rec(i, left, acc):
            if i == n:
                if left == 0:
                    out.append(tuple(acc))
                return
            d = degs[i]
            if d == 0:
                raise ValueError("degree-0 generators give infinitely many monomials per degree")
            for x in range(left // d, -1, -1):
                acc.append(x)
                rec(i + 1, left - x * d, acc)
                acc.pop()

        if degree >= 0:
            rec(0, degree, [])
        return out


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)) and not isinstance(c, bool):
        return Fraction(c)
    if isinstance(c, bool):
        return Fraction(int(c))
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class Polynomial:
    """An element of a :class:`PolyRing`; hashable and immutable."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Exponents, object] | None = None):
        clean = {}
        n = ring.nvars
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e} for {ring!r}")
            c = _as_fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: PolyRing, terms: dict) -> "Polynomial":
        # terms must already be normalized (Fraction values, no zeros)
        p = object.__new__(cls)
        p.ring = ring
        p._terms = terms
        p._hash = None
        return p

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Exponents, Fraction]]:
        return iter(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ring.nvars, Fraction(0))

    def coefficient(self, monomial: Exponents | str) -> Fraction:
        if isinstance(monomial, str):
            m = self.ring.parse(monomial)
            if len(m) != 1:
                raise ValueError("expected a single monomial")
            (monomial,) = m._terms
        return self._terms.get(tuple(monomial), Fraction(0))

    def variables(self) -> tuple[str, ...]:
        used = set()
        for e in self._terms:
            used.update(i for i, x in enumerate(e) if x)
        return tuple(self.ring.names[i] for i in sorted(used))

    def degree(self) -> int:
        """Largest weighted degree of a term; -1 for the zero polynomial."""
        wd = self.ring.weighted_degree
        return max((wd(e) for e in self._terms), default=-1)

    def degrees(self) -> set[int]:
        wd = self.ring.weighted_degree
        return {wd(e) for e in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_component(self, degree: int) -> "Polynomial":
        wd = self.ring.weighted_degree
        return Polynomial._raw(self.ring, {e: c for e, c in self._terms.items() if wd(e) == degree})

    def components(self) -> dict[int, "Polynomial"]:
        return {d: self.homogeneous_component(d) for d in sorted(self.degrees())}

    def leading_term(self, order: MonomialOrder = DEFAULT_ORDER) -> tuple[Exponents, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = order.key(self.ring.degrees)
        e = max(self._terms, key=key)
        return e, self._terms[e]

    def sorted_terms(self, order: MonomialOrder = DEFAULT_ORDER) -> list[tuple[Exponents, Fraction]]:
        key = order.key(self.ring.degrees) if self.ring.nvars and all(self.ring.degrees) else None
        items = list(self._terms.items())
        if key is None:
            items.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        else:
            items.sort(key=lambda t: key(t[0]), reverse=True)
        return items

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = get(e, 0) + ca * cb
        return Polynomial._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return exact_divide(self, other)
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return Polynomial._raw(self.ring, {e: v / c for e, v in self._terms.items()})

    def scale(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {e: v * c for e, v in self._terms.items()})

    def mul_term(self, e: Exponents, c: Fraction) -> "Polynomial":
        return Polynomial._raw(
            self.ring, {tuple(x + y for x, y in zip(k, e)): v * c for k, v in self._terms.items()}
        )

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == self.ring.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def substitute(self, images: Mapping, target: PolyRing | None = None) -> "Polynomial":
        return substitute(self, images, target)

    # text form --------------------------------------------------------
    def to_text(self, order: MonomialOrder = DEFAULT_ORDER) -> str:
        if not self._terms:
            return "0"
        names = self.ring.names
        pieces = []
        for e, c in self.sorted_terms(order):
            mono = "*".join(n if x == 1 else f"{n}^{x}" for n, x in zip(names, e) if x)
            mag = abs(c)
            if not mono:
                body = _fmt(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r})"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# module-level operations ---------------------------------------------------

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def homogeneous_component(p: Polynomial, degree: int) -> Polynomial:
    return p.homogeneous_component(degree)


def divides(a: Exponents, b: Exponents) -> bool:
    return all(x <= y for x, y in zip(a, b))


def exact_divide(p: Polynomial, q: Polynomial, order: MonomialOrder = DEFAULT_ORDER) -> Polynomial:
    """Return ``p / q``; raise :class:`InexactDivisionError` when ``q`` does not divide ``p``."""
    if p.ring != q.ring:
        raise RingMismatchError(f"{p.ring!r} vs {q.ring!r}")
    if not q:
        raise ZeroDivisionError("division by the zero polynomial")
    ring = p.ring
    key = order.key(ring.degrees)
    lq, cq = q.leading_term(order)
    rest = dict(p._terms)
    quot: dict = {}
    rem: dict = {}
    while rest:
        e = max(rest, key=key)
        c = rest[e]
        if divides(lq, e):
            qe = tuple(x - y for x, y in zip(e, lq))
            qc = c / cq
            quot[qe] = quot.get(qe, 0) + qc
            for f, v in q._terms.items():
                m = tuple(x + y for x, y in zip(f, qe))
                s = rest.get(m, 0) - v * qc
                if s:
                    rest[m] = s
                else:
                    rest.pop(m, None)
        else:
            rem[e] = c
            del rest[e]
    quotient = Polynomial._raw(ring, {e: c for e, c in quot.items() if c})
    if rem:
        raise InexactDivisionError(Polynomial._raw(ring, rem), quotient)
    return quotient


def substitute(p: Polynomial, images: Mapping, target: PolyRing | None = None) -> Polynomial:
    """Evaluate the ring homomorphism sending each generator to its image.

    ``images`` is keyed by generator name (or :class:`Generator`). Generators
    without an explicit image go to the generator of the same name in
    ``target`` (default: the image ring, or ``p.ring``).
    """
    src = p.ring
    named = {}
    for k, v in images.items():
        name = k.name if isinstance(k, Generator) else str(k)
        if name not in src:
            raise KeyError(f"{name!r} is not a generator of {src!r}")
        named[name] = v
    if target is None:
        polys = [v for v in named.values() if isinstance(v, Polynomial)]
        target = polys[0].ring if polys else src
    imgs: list[Polynomial] = []
    used = set()
    for e in p._terms:
        used.update(i for i, x in enumerate(e) if x)
    for i, g in enumerate(src.generators):
        if g.name in named:
            img = target(named[g.name])
        elif g.name in target:
            img = target.gen(g.name)
            if target.generators[target.index(g.name)].degree != g.degree:
                raise DegreeMismatchError(f"{g.name} changes degree between rings")
        else:
            if i in used:
                raise KeyError(f"no image for generator {g.name!r}")
            img = None
        if img is not None and img and img.degrees() != {g.degree}:
            raise DegreeMismatchError(
                f"image of {g.name} (degree {g.degree}) has degrees {sorted(img.degrees())}"
            )
        imgs.append(img)
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = imgs[i] ** k
        return powers[(i, k)]

    acc: dict = {}
    for e, c in p._terms.items():
        term = target.const(c)
        for i, x in enumerate(e):
            if x:
                term = term * power(i, x)
                if not term:
                    break
        for m, v in term._terms.items():
            s = acc.get(m, 0) + v
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
    return Polynomial._raw(target, acc)


# parsing ---------------------------------------------------------------------

_TOKEN = re.compile(rf"\s*(?:(?P<num>\d+)|(?P<name>{_NAME_RE})|(?P<op>[-+*/^()]))")


class _Parser:
    """Recursive-descent parser for ``+ - * / ^ ( )`` over integers and generator names."""

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse {text!r} at position {pos}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ValueError(f"unexpected {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ValueError("empty polynomial text")
        p = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"trailing input in {self.text!r}")
        return p

    def expr(self):
        if self.peek()[1] in ("+", "-"):
            sign = self.take()[1]
            p = self.term()
            if sign == "-":
                p = -p
        else:
            p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            q = self.factor()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant():
                    p = exact_divide(p, q)
                else:
                    p = p / q.constant_term()
        return p

    def factor(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError(f"exponent must be an integer in {self.text!r}")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(int(val))
        if kind == "name":
            return self.ring.gen(val)
        if val == "(":
            p = self.expr()
            self.take(")")
            return p
        raise ValueError(f"unexpected {val!r} in {self.text!r}")
