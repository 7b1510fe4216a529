import itertools

import pytest

from supercoh import classify as C
from supercoh import fixtures
from supercoh.groups import FiniteAbelianGroup as G
from supercoh.groups import GroupError
from supercoh.grpcoh import mod2_ring


@pytest.mark.parametrize("facs", [[2], [4], [2, 2], [4, 2], [4, 4], [2, 2, 2], [8, 2], [6]])
def test_cocycle_round_trip(facs):
    g = G(facs)
    ring = mod2_ring(g)
    for v in itertools.product([0, 1], repeat=ring.dim(2)):
        cls = ring.from_vector(2, v)
        ext = C.invertible_group(cls)
        assert C.classify_cocycle(g, ext.cocycle) == cls


@pytest.mark.parametrize("facs", [[2], [4], [2, 2], [4, 2]])
def test_cocycle_condition(facs):
    ring = mod2_ring(G(facs))
    for v in itertools.product([0, 1], repeat=ring.dim(2)):
        assert C.invertible_group(ring.from_vector(2, v)).check_cocycle()


def test_abelian_criterion():
    g = G([4, 2])
    ring = mod2_ring(g)
    for v in itertools.product([0, 1], repeat=ring.dim(2)):
        cls = ring.from_vector(2, v)
        ext = C.invertible_group(cls)
        antisym = any(k.count(1) == 2 for k in cls.support)
        assert ext.is_abelian() == (not antisym)
        assert ext.order == 16


def test_extension_examples():
    assert C.invertible_group(mod2_ring(G([2])).parse("x1^2")).abelian_invariants() == [4]
    assert C.invertible_group(mod2_ring(G([4])).parse("x2")).abelian_invariants() == [8]
    e = C.invertible_group(mod2_ring(G([4, 4])).parse("x1y1"))
    assert e.summary()["description"] == "nonabelian of order 32"
    assert len(e.multiplication_table()) == 32


def test_central_element():
    e = C.invertible_group(mod2_ring(G([4, 4])).parse("x1y1"))
    z = e.central
    assert all(e.mul(z, a) == e.mul(a, z) for a in e.elements)
    assert e.element_order(z) == 2


def test_odd_order_counts():
    for facs in ([3], [5], [3, 3]):
        cl = C.enumerate_classifications(G(facs))
        from supercoh.grpcoh import kx_cohomology
        assert len(cl) == kx_cohomology(G(facs), 4).order
        assert all(not c.pi_alpha and not c.pi_beta for c in cl)


def test_cyclic_counts_and_figure_one():
    by = C.enumerate_all_twists(G([2]), "allow")
    assert sum(len(v) for v in by.values()) == 3
    exotic = [c for c in by["x1^2"] if c.pi_alpha]
    assert len(exotic) == 1
    assert C.invertible_group(exotic[0]).abelian_invariants() == [4]


def test_bounded_enumeration_has_gap_note():
    with fixtures.isolated():
        cl = C.enumerate_classifications(G([4]), "x2", "allow")
    assert cl and all(any(n.startswith("gap") for n in c.notes) for c in cl)


def test_count_law_when_exact():
    from supercoh import ahss

    g = G([4, 4])
    cl = C.enumerate_classifications(g)
    r = ahss.compute_sh(ahss.SuperCohQuery(g, None, 4, C.default_homs(g)))
    assert r.status == "exact" and len(cl) == r.order


def test_undetermined_alpha_refused():
    c = C.FermionicClassification(G([2]), mod2_ring(G([2])).zero(2), None, None, None)
    with pytest.raises(ValueError):
        C.invertible_group(c)


def test_hom_grid_figure_one():
    h = C.hom_grid(G([4]), 2, {0: "SVect", 2: "Vect"})
    assert len(h.objects) == 4 and len(h.pi0) == 2 and h.pi0_invariants == [2]
    for g, k, x in itertools.product(h.objects, repeat=3):
        gk, xk = G([4]).add(g, k), G([4]).add(x, k)
        assert h.label(gk, xk) == h.label(g, x)
    assert "digraph" in h.to_dot()


def test_hom_grid_degenerate_supports():
    assert C.hom_grid(G([4]), 2, {i: "S" for i in range(4)}).pi0_invariants == []
    assert C.hom_grid(G([4]), 2, {0: "SVect"}).pi0_invariants == [4]


def test_hom_grid_errors():
    with pytest.raises(GroupError):
        C.hom_grid(G([4]), 1, {0: "SVect"})
    with pytest.raises(GroupError):
        C.hom_grid(G([4]), 2, {0: "SVect", 1: "Vect"})
    with pytest.raises(GroupError):
        C.hom_grid(G([4]), 2, {2: "Vect"})


def test_hom_grid_over_extension():
    e = C.invertible_group(mod2_ring(G([2])).parse("x1^2"))
    h = C.hom_grid(e, e.central, {e.identity: "SVect", e.central: "Vect"})
    assert len(h.pi0) == 2


def test_brpic():
    assert C.brpic_table("2Vect").groups == ("1", "0", "0", "k^x")
    assert C.brpic_table("2SVect").groups == ("1", "Z/2+Z/2", "Z/2", "k^x")
    assert "Pic(E)" in C.brpic_table("Mod(E)").groups[1]
    with pytest.raises(ValueError):
        C.brpic_table("3Vect")
