"""Shared strategies and the sympy bridge used as an independent oracle."""
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from mapring import PolyRing, Polynomial


def sym_gens(ring: PolyRing):
    return sympy.symbols([f"g{i}" for i in range(ring.nvars)])


def to_sympy(p: Polynomial, gens=None):
    gens = gens or sym_gens(p.ring)
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for g, k in zip(gens, e):
            term *= g ** k
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, ring: PolyRing, gens=None) -> Polynomial:
    gens = gens or sym_gens(ring)
    poly = sympy.Poly(sympy.expand(expr), *gens)
    terms = {}
    for mon, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(mon)] = Fraction(int(c.p), int(c.q))
    return Polynomial(ring, terms)


def polys(ring: PolyRing, max_terms=3, max_exp=2, coeffs=range(-2, 3)):
    exps = st.tuples(*[st.integers(0, max_exp)] * ring.nvars)
    term = st.tuples(exps, st.sampled_from(list(coeffs)))
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((ring.monomial(e, c) for e, c in ts), ring.zero()))


def homogeneous_polys(ring: PolyRing, degree: int, max_terms=4):
    mons = ring.monomials_of_degree(degree)
    term = st.tuples(st.sampled_from(mons), st.fractions(-3, 3, max_denominator=3))
    return st.lists(term, min_size=1, max_size=max_terms).map(
        lambda ts: sum((ring.monomial(e, c) for e, c in ts), ring.zero()))
