import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercoh import emspaces as E


def test_adem_examples():
    assert E.admissible_form((1, 1)) == frozenset()
    assert E.admissible_form((1, 2)) == frozenset([(3,)])
    assert E.admissible_form((2, 2)) == frozenset([(3, 1)])
    assert E.admissible_form((3, 2)) == frozenset()


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=4))
def test_admissible_form_is_admissible(word):
    for w in E.admissible_form(tuple(word)):
        assert E.is_admissible(w)
        assert sum(w) == sum(word)


def test_admissible_monomial_invariants():
    m = E.AdmissibleMonomial((2, 1), 3, "t3")
    assert m.degree == 6 and m.excess == 1 and str(m) == "Sq2Sq1t3"
    with pytest.raises(ValueError):
        E.AdmissibleMonomial((1, 1), 3)
    with pytest.raises(ValueError):
        E.AdmissibleMonomial((2,), 2)


def test_em_basis_k3():
    b = E.em_mod2_basis(3, 6)
    assert [len(b[d]) for d in range(3, 7)] == [1, 1, 1, 2]
    assert b[3] == ["i3"] and b[4] == ["Sq1i3"] and b[5] == ["Sq2i3"]
    assert sorted(b[6]) == sorted(["i3^2", "Sq2Sq1i3"])


def test_em_basis_k2():
    b = E.em_mod2_basis(2, 6)
    assert b[4] == ["i2^2"]
    assert sorted(b[5]) == sorted(["i2Sq1i2", "Sq2Sq1i2"])


def test_em_basis_errors():
    with pytest.raises(E.DegreeOutOfRange):
        E.em_mod2_basis(2, 7)
    with pytest.raises(E.DegreeOutOfRange):
        E.em_mod2_basis(4, 5)
    assert E.em_mod2_basis(3, 2) == {}


def test_top_square_and_unstable():
    c2 = E.parse("c2", exponential=False).terms
    assert E.sq_poly(2, c2) == E.parse("c2^2", exponential=False).terms
    assert E.sq_poly(3, c2) == frozenset()
    a = E.sq_poly(1, c2)
    assert E.sq_poly(1, a) == frozenset()


def test_sq1_is_derivation_and_cartan():
    base = [E.parse(s, exponential=False).terms for s in ("c2", "m2", "Sq1c2", "t3")]
    for x, y in itertools.product(base, repeat=2):
        xy = E.poly_mul(x, y)
        for k in (1, 2):
            lhs = E.sq_poly(k, xy)
            rhs = set()
            for i in range(k + 1):
                rhs ^= set(E.poly_mul(E.sq_poly(i, x), E.sq_poly(k - i, y)))
            assert lhs == frozenset(rhs)


def test_fiber_rows_certified():
    assert E.kx_orders(E.FIBER, 3) == [2]
    assert E.kx_orders(E.FIBER, 5) == [2]
    assert E.kx_orders(E.FIBER, 4) == []
    assert E.kx_orders(E.BASE, 4) is None


def test_serre_table_entries():
    page = E.serre_e2_lemma45()
    assert page.entries[(2, 3)].orders == [2, 2]
    assert (1, 0) not in page.entries
    assert sorted(page.entries[(4, 0)].orders) == [2, 2, 4]
    assert page.entries[(4, 0)].fixture == "em-serre-entry-4-0"
    text = page.to_text()
    assert "Z/4+Z/2^2" in text


def test_transgression_examples():
    assert E.transgressive_d3(E.parse("t3c2")).terms == E.parse("c2^3 + c2^2m2").terms
    assert not E.transgressive_d3(E.parse("t3m2"))
    assert not E.transgressive_d3(E.SymbolicClass.zero(5))
    with pytest.raises(ValueError):
        E.transgressive_d3(E.parse("Sq2t3"))


def test_transgression_additive_and_leibniz():
    a, b = E.parse("t3c2"), E.parse("t3m2")
    lhs = E.transgressive_d3(a + b)
    rhs = E.transgressive_d3(a) + E.transgressive_d3(b)
    assert E.equal(lhs, rhs, E.BASE)
    # d(t3 c2 m2) = k c2 m2
    d = E.transgressive_d3(E.parse("t3c2m2"))
    assert E.equal(d, E.parse("c2^3m2 + c2^2m2^2"), E.BASE)


def test_generators_and_relations():
    gens = E.h5Y_generators()
    assert len(gens) == 5
    names = {g.expr() for g in gens}
    assert names == {"Sq2t3", "t3m2", "Sq2Sq1c2", "c2Sq1m2", "Sq2Sq1m2"}
    assert E.equal(E.parse("c2Sq1m2"), E.parse("m2Sq1c2"))
    assert not E.normal_form(E.parse("Sq1(t3)".replace("(", "").replace(")", "")), E.TOTAL)
    killed = dict((str(s), str(t)) for s, t in E.h5Y().killed)
    assert "(-1)^(t3c2)" in killed


def test_every_relation_tagged():
    assert all(r.tag in (E.DERIVED, E.LITERATURE) and r.source for r in E.RELATIONS)


def test_autoequivalence():
    x = E.parse("Sq2t3 + t3m2")
    y = E.substitute_autoequivalence(x)
    assert y.terms == E.parse("Sq2t3 + t3m2 + Sq2Sq1c2 + c2Sq1m2").terms
    assert E.substitute_autoequivalence(y) == x
    assert E.substitute_autoequivalence(x, {"t3": "t3"}) == x


@pytest.mark.parametrize("constraints, count", [(("f", "g"), 2), (("f",), 4), ((), 32)])
def test_sigma_counts(constraints, count):
    r = E.resolve_sigma(constraints)
    assert len(r.candidates) == count


def test_sigma_orbit():
    r = E.resolve_sigma()
    assert len(r.orbits) == 1
    assert "(-1)^(Sq2t3 + t3m2)" in [str(c) for c in r.orbits[0]]
    assert r.to_dict()["constraints"] == ["f", "g"]


def test_pullback_certificates():
    checks = {str(c.relation): c for c in E.certify_relations()}
    bad = checks["(-1)^(c2^2m2) = (-1)^(c2m2^2)"]
    assert bad.status == "refuted" and bad.witness
    assert checks["(-1)^(c2Sq1m2) = (-1)^(m2Sq1c2)"].status == "consistent"
    assert checks["(-1)^(c2Sq1c2) = (-1)^(Sq2Sq1c2)"].status == "consistent"


def test_strict_database():
    rels = E.verified_relations()
    assert len(rels) == len(E.RELATIONS) - 1
    gens = E.h5Y_generators(rels)
    assert "t3m2" not in {g.expr() for g in gens}
    with pytest.raises(ArithmeticError):
        E.resolve_sigma(relations=rels)
