import json
from fractions import Fraction

import pytest
import sympy

from mapring import PolyRing, substitute
from mapring import presentations as pres
from mapring.strata import all_labels, context, exceptional_labels, group_elements
from conftest import from_sympy, sym_gens, to_sympy

F = Fraction


# basic presentations -----------------------------------------------------------

@pytest.mark.parametrize("n,hf", [(1, [1, 1]), (2, [1, 1, 1]), (4, [1] * 5)])
def test_projective_space(n, hf):
    P = pres.projective_space(n)
    assert P.relations == (P.ring.gen("H") ** (n + 1),)
    assert P.hilbert_function() == hf


@pytest.mark.parametrize("n,hf", [(1, [1]), (2, [1, 1, 1]), (3, [1, 1, 2, 1, 1]), (4, [1, 1, 2, 2, 2, 1, 1])])
def test_grassmannian_lines(n, hf):
    assert pres.grassmannian_lines(n).hilbert_function() == hf


def test_flag_d1():
    P = pres.flag_d1(2)
    assert P.hilbert_function() == [1, 2, 2, 1]
    d = P.derived
    assert P.is_zero(d["psi"] + 2 * d["H"] - d["kH2"])[0]
    assert d["kH3"].to_text() == pres.pushforward_quadratic_bundle(P.ring.gen("h") ** 3).to_text()


def test_pushforward_examples():
    P = pres.flag_d1(3)
    r = P.ring
    base = PolyRing([("c1", 1), ("c2", 2)])
    assert pres.pushforward_quadratic_bundle(r("h^2"), base) == base("c1")
    assert pres.pushforward_quadratic_bundle(r("h^3"), base) == base("c1^2 - c2")
    assert pres.pushforward_quadratic_bundle(r("c2"), base) == 0
    assert pres.pushforward_quadratic_bundle(r("c2*h"), base) == base("c2")


def _sympy_flag_ideal(n):
    c1, c2, h = sympy.symbols("c1 c2 h")
    s = [sympy.Integer(1)]
    for k in range(1, n + 2):
        s.append(sympy.expand(-c1 * s[k - 1] - (c2 * s[k - 2] if k >= 2 else 0)))
    return (c1, c2, h), [s[n], s[n + 1], h ** 2 - c1 * h + c2]


@pytest.mark.parametrize("n", range(1, 6))
def test_lemma_r_d1_vanishes_in_flag_ring(n):
    # engine check
    P = pres.flag_d1(n)
    R = substitute(pres.lemma31_R(1), {k: P.derived[k] for k in ("psi", "kH2", "kH3")}, P.ring)
    assert P.quotient().normal_form(R) == 0
    # independent oracle: sympy Groebner basis, weights ignored (lex on plain symbols)
    (c1, c2, h), ideal = _sympy_flag_ideal(n)
    psi, kH2, kH3 = c1 - 2 * h, c1, c1 ** 2 - c2
    G = sympy.groebner(ideal, h, c1, c2, order="lex")
    assert G.contains(sympy.expand(psi ** 2 + 3 * kH2 ** 2 - 4 * kH3))


def test_lemma_r_d1_form():
    R = pres.lemma31_R(1)
    assert R == R.ring("psi^2 + 3*kH2^2 - 4*kH3")
    assert R.scale(F(1, 4)) == R.ring("1/4*psi^2 + 3/4*kH2^2 - kH3")


# coefficients ---------------------------------------------------------------------

def _formula(d, a, b=None, kind="psi"):
    d, a = sympy.Integer(d), sympy.Integer(a)
    if kind == "psi":
        return a ** 2 / d ** 2 * (6 - 4 * a / d)
    b = sympy.Integer(b)
    if kind == "nested":
        return a ** 2 / d ** 2 * (6 * b / d - 2 * a / d - 3 * b ** 2 / d ** 2)
    return -3 * a ** 2 * b ** 2 / d ** 4


def _frac(x):
    x = sympy.Rational(x)
    return F(int(x.p), int(x.q))


@pytest.mark.parametrize("d", range(1, 6))
def test_coefficient_functions_match_formulas(d):
    for a in range(1, d):
        assert pres.n_psi(d, a) == _frac(_formula(d, a))
        for b in range(a, d):
            assert pres.n_nested(d, a, b) == _frac(_formula(d, a, b, "nested"))
        for b in range(1, d - a + 1):
            assert pres.n_disjoint(d, a, b) == _frac(_formula(d, a, b, "disjoint"))


def test_lemma_r_d2_coefficients():
    R = pres.lemma31_R(2)
    r = R.ring
    assert R.coefficient("psi*D{1}") == -1
    assert R.coefficient("D{1}^2") == F(5, 16)
    assert R.coefficient("D{1}*D{2}") == 2 * F(-3, 16)
    assert R.coefficient("kH2^2") == F(3, 16) and R.coefficient("kH3") == F(-1, 2)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_lemma_r_relabelling_invariant(d):
    R = pres.lemma31_R(d)
    labels = pres.proper_subsets(d)
    for g in group_elements((d,)):
        images = {pres.d_symbol(h): R.ring.gen(pres.d_symbol(g(h))) for h in labels}
        assert substitute(R, images, R.ring) == R


def test_lemma_r_d2_vanishes_in_degree_two_ring():
    for n in (1, 2, 3):
        P = pres.m01_pn_d2(n)
        r = P.ring
        images = {"psi": r.gen("psi"), "D{1}": r.gen("D1"), "D{2}": r.gen("D2"),
                  "kH2": P.derived["kH2"], "kH3": P.derived["kH3"]}
        assert P.quotient().normal_form(substitute(pres.lemma31_R(2), images, r)) == 0


def test_kappa_divisor_relation():
    assert pres.kappa_divisor_relation(1) == pres.kappa_divisor_relation(1).ring("psi + 2*H - kH2")
    k2 = pres.kappa_divisor_relation(2)
    assert k2 == k2.ring("psi + H - 1/4*kH2 - 1/4*D{1} - 1/4*D{2}")
    k3 = pres.kappa_divisor_relation(3)
    assert k3.coefficient("D{1,2}") == F(-4, 9) and k3.coefficient("D{3}") == F(-1, 9)
    for d in (3, 4, 5):
        k = pres.kappa_divisor_relation(d)
        for h in pres.proper_subsets(d):
            assert k.coefficient(pres.d_symbol(h)) == -F(h.size ** 2, d ** 2)


# the degree-2 ring -------------------------------------------------------------------

def _sympy_m01(n):
    H, psi, D1, D2 = sympy.symbols("g0 g1 g2 g3")
    b = H + psi

    def Q(t):
        return sympy.expand(sympy.cancel(((b + t) ** (n + 1) - b ** (n + 1)) / t))

    def Qsym(t):
        tt = sympy.Symbol("tt")
        return Q(tt).subs(tt, t)

    last = (Qsym(psi - D1) - Qsym(psi)) + (Qsym(psi - D2) - Qsym(psi)) \
        + sympy.cancel(((H + 2 * psi) ** (n + 1) - H ** (n + 1)) / psi)
    rels = [H ** (n + 1), D1 * D2 * psi, D1 * b ** (n + 1), D2 * b ** (n + 1),
            D1 * Qsym(psi - D1), D2 * Qsym(psi - D2), last]
    return (H, psi, D1, D2), [sympy.expand(r) for r in rels]


def test_Q_poly():
    r = PolyRing(pres.M01_GENERATORS)
    assert pres.Q_poly(1, r.gen("D1")) == r("2*H + 2*psi + D1")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_m01_matches_independent_construction(n):
    P = pres.m01_pn_d2(n)
    gens, rels = _sympy_m01(n)
    ours = [to_sympy(r) for r in P.relations]
    G1 = sympy.groebner(ours, *gens, order="grevlex")
    G2 = sympy.groebner(rels, *gens, order="grevlex")
    assert set(G1.exprs) == set(G2.exprs)
    assert all(r.is_homogeneous() for r in P.relations)


@pytest.mark.parametrize("n,hf", [(1, [1, 3, 3, 1]), (2, [1, 4, 9, 12, 10, 5, 1]),
                                  (3, [1, 4, 10, 18, 24, 25, 20, 12, 5, 1])])
def test_m01_hilbert(n, hf):
    assert pres.m01_pn_d2(n).hilbert_function() == hf


@pytest.mark.parametrize("n", [1, 2, 3])
def test_m01_ideal_swap_invariant(n):
    P = pres.m01_pn_d2(n)
    q = P.quotient()
    swap = {"D1": P.ring.gen("D2"), "D2": P.ring.gen("D1")}
    for r in P.relations:
        assert q.normal_form(substitute(r, swap, P.ring)) == 0


def test_m01_derived_identities():
    P = pres.m01_pn_d2(2)
    c = P.derived
    assert c["b"] - F(1, 4) * (c["kH2"] + c["D"]) == 0
    assert c["t"] - F(1, 2) * (c["kH2"] - c["D"]) == 0
    assert all(v.is_homogeneous() for v in c.values())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_39_and_corrected_310_with_sympy_oracle(n):
    P = pres.m01_pn_d2(n)
    gens, rels = _sympy_m01(n)
    G = sympy.groebner(rels, *gens, order="grevlex", domain="QQ")
    cls = P.derived
    for p in (pres.psi_square_relation(P.ring, cls, 1), pres.psi_square_relation(P.ring, cls, 2), pres.f_square_corrected(P.ring, cls)):
        assert G.contains(to_sympy(p))
    printed = G.contains(to_sympy(pres.f_square_printed(P.ring, cls)))
    assert printed == (n == 1)


# convention pinning -------------------------------------------------------------------

def test_pinning_result():
    conv, results = pres.pin_convention()
    assert conv.psi_reading == "untwisted" and conv.sign == 1
    passing = [l for l, ok, _ in results if ok]
    assert passing == ["untwisted,+f,I={1}", "untwisted,+f,I={2}"]
    P = pres.m01_pn_d2(1)
    assert P.metadata["convention"] == conv.label()


def test_pinning_fails_loudly():
    failing = tuple(c for c in pres.CANDIDATES if c.psi_reading == "twisted")
    with pytest.raises(pres.ConventionPinningError) as err:
        pres.pin_convention(pres.PIN_N, failing)
    assert len(err.value.results) == 4


def test_equivalent_passing_conventions_agree():
    ring = PolyRing(pres.M01_GENERATORS)
    a = pres.derived_classes(ring, pres.Convention("untwisted", 1, 1))
    b = pres.derived_classes(ring, pres.Convention("untwisted", 1, 2))
    assert a["f"] == b["f"] and a["kH3"] == b["kH3"]


# universal relations ---------------------------------------------------------------

def test_thm33_d2_relation_1():
    b = pres.thm33_relations(2, None, [{1}])
    r = b.ring
    assert b.get("(1)") == r("psi'^2 - 3/16*Dp{1|2}^2 + 1/2*F{1} - 1/2*F{2} + 3/16*kH2^2 - 1/2*kH3")
    assert b.context["I"] == ["{1}"]


def test_thm33_invalid_I():
    with pytest.raises(ValueError):
        pres.thm33_relations(3, None, [{1}])  # |h| must exceed d/2
    with pytest.raises(ValueError):
        pres.thm33_relations(2, None, [{1}, {2}])  # one of each complementary pair


@pytest.mark.parametrize("d", [3, 4, 5])
def test_thm33_general_d_homogeneous(d):
    b = pres.thm33_relations(d)
    for label, p in b.relations:
        assert p.is_homogeneous()
    assert b.get("(1)").degree() == 2


@pytest.mark.parametrize("d", [2, 4])
def test_i_change_consistency(d):
    I = pres.default_I(d)
    for h in I:
        if 2 * h.size == d:
            ok, rem = pres.i_change_check(d, I, h)
            assert ok, rem


def test_change_witness_d2():
    h = pres.parse_I(2, [{1}])
    (h,) = h
    w = pres.change_witness(2, h)
    r = w.ring
    # at d=2 no label has |g| > 1, so psi' in the witness is psi itself
    assert w == r("F{1} - F{2} - (D{1} - D{2})*(2*psi - Dp{1|2})")


def test_node_square_rule():
    (h,) = pres.parse_I(2, [{1}])
    rule = pres.node_square_rule(h)
    assert rule.local_rhs == rule.local_rhs.ring("-psi{1} - psi{2}")
    (hb,) = pres.parse_I(2, [{2}])
    other = pres.node_square_rule(hb)
    assert str(other.ambient_lhs) == str(rule.ambient_lhs)
    for r in (rule, other):
        assert set(r.ambient_rhs.variables()) == {"F{1}", "F{2}"}
        assert set(r.ambient_rhs.terms.values()) == {-1}


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("I", [1, 2])
def test_relation3_d2(n, I):
    b = pres.thm33_relation3_d2(n, I)
    P = pres.m01_pn_d2(n)
    q = P.quotient()
    for label, p in pres.relation3_in_m01(b, P.ring, P.derived, I):
        assert q.normal_form(p) == 0, label
    # the kernel part maps to zero on the node stratum
    assert b.context["kernel_size"] == len(b.relations)


def test_thm_m_relations():
    b = pres.thm_m_relations(1, 2)
    r = b.ring
    assert b.get("(1)") == r("D1m1^2 + fpsi1*D1m1")
    # h = {1}|{3}: nothing strictly contains it, so the h'-sum is empty
    assert b.get("(2) h={1}|{3}") == r("(D{1}|{3} - fD{1}|{})*(D{1}|{3} + fpsi1 + D1m1)")
    assert any("-psi_1" in n for n in b.notes)
    assert len(b.placeholders) == len(exceptional_labels(1, 2))


def test_psi_sum_relations():
    b = pres.psi_sum_relations(2, 2, 0)
    assert b.context["contracted"] == []
    r = b.ring
    lp = b.get("LP(1,2)")
    assert lp.coefficient("psi1") == 1 and lp.coefficient("psi2") == 1
    full = b.get("descended(1,2)")
    assert full - r("psiP1 + psiP2") == lp - r("psi1 + psi2")
    b1 = pres.psi_sum_relations(2, 2, 1)
    assert b1.context["contracted"] == ["{1}|{3}", "{2}|{3}"]
    assert all(pres.check_psi_sum(b1).values())


# serialization -------------------------------------------------------------------

def test_json_exports_carry_provenance():
    data = json.loads(json.dumps(pres.m01_pn_d2(2).to_json()))
    assert data["provenance"] and set(data["derived"]) >= {"f", "kH2", "kH3"}
    back = pres.RingPresentation.from_json(data)
    assert back.relations == pres.m01_pn_d2(2).relations
    data = json.loads(json.dumps(pres.thm33_relations(2).to_json()))
    assert data["provenance"] and data["context"]["d"] == 2
