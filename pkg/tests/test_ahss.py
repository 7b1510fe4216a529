import numpy as np
import pytest

from supercoh import ahss, fixtures
from supercoh.groups import FiniteAbelianGroup as G
from supercoh.groups import GroupError
from supercoh.grpcoh import mod2_ring
from supercoh.specseq import check_composition


def _sh(facs, twist=None, homs=None, policy="forbid", names=None):
    g = G(facs, names)
    w = mod2_ring(g).parse(twist, degree=2) if twist else None
    hs = tuple(ahss.mod2_reductions(g)) if homs is None else tuple(homs)
    return ahss.compute_sh(ahss.SuperCohQuery(g, w, 4, hs, policy))


def test_query_validation():
    with pytest.raises(ValueError):
        ahss.SuperCohQuery(G([2]), degree=7)
    with pytest.raises(ValueError):
        ahss.SuperCohQuery(G([2]), fixture_policy="maybe")
    w = mod2_ring(G([4])).parse("x2")
    with pytest.raises(GroupError):
        ahss.SuperCohQuery(G([2]), twist=w)


def test_e2_rows_for_z4_squared():
    page = ahss.build_super_e2(G([4, 4]), 4)
    assert page.entries[(0, 0)].divisible
    assert [page.entries[(i, 0)].orders for i in (1, 2, 3)] == [[4, 4], [4], [4, 4, 4]]
    assert [len(page.entries[(i, 1)].orders) for i in range(5)] == [1, 2, 3, 4, 5]


def test_column_zero_undetermined():
    g = G([4, 4])
    page = ahss.install_d2_untwisted(ahss.build_super_e2(g, 4), g)
    assert page.differential((0, 2)).status == "undetermined"
    assert not check_composition(page)


def test_twisted_requires_nonzero_twist():
    page = ahss.build_super_e2(G([4]), 4)
    with pytest.raises(ValueError):
        ahss.install_d2_twisted(page, mod2_ring(G([4])).zero(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cyclic_two_groups_vanish(n):
    r = _sh([2**n])
    assert r.status == "exact" and r.order == 1


def test_z4_squared_needs_both_reductions():
    g = G([4, 4])
    both = _sh([4, 4])
    assert both.status == "exact" and both.order == 32
    assert [str(c) for c in both.alpha_layer] == ["x1y1"]
    for h in ahss.mod2_reductions(g):
        one = _sh([4, 4], homs=[h])
        assert one.status == "bounded"
        assert one.bounds == (4, 32)
    assert _sh([4, 4], homs=[]).status == "bounded"


def test_naturality_solution_resubstitutes():
    g = G([4, 4])
    page3 = ahss.e3_page(g, 4)
    sols = ahss.solve_d3_by_naturality(page3, g, [(2, 2)], ahss.mod2_reductions(g), 4)
    sol = sols[(2, 2)]
    assert sol.matrix is not None and not np.any(sol.matrix)
    assert sol.check()
    single = ahss.solve_d3_by_naturality(page3, g, [(2, 2)], ahss.mod2_reductions(g)[:1], 4)[(2, 2)]
    assert single.matrix is None and len(single.residual) == 1


def test_klein_four_exact_order():
    r = _sh([2, 2], homs=ahss.coordinate_projections(G([2, 2], ["c", "d"])), names=["c", "d"])
    assert r.status == "exact" and r.order == 4
    assert r.gamma_layer["orders"] == [2, 2]


def test_klein_four_twisted_is_bounded():
    r = _sh([2, 2], twist="x1^2", homs=[])
    assert r.status == "bounded"
    lo, hi = r.bounds
    assert lo <= hi


def test_fixture_policies():
    assert _sh([4], twist="x2", homs=[]).status == "bounded"
    r = _sh([4], twist="x2", homs=[], policy="allow")
    assert r.status == "fixture" and r.order == 2 and r.fixtures_used
    with fixtures.isolated():
        with pytest.raises(ahss.FixtureRequired):
            _sh([4], twist="x2", homs=[], policy="require")
    exact = _sh([2], policy="require")
    assert exact.status == "exact" and not exact.fixtures_used


@pytest.mark.parametrize("facs", [[3], [5], [3, 3]])
def test_odd_order_collapse(facs):
    from supercoh.grpcoh import kx_cohomology

    r = _sh(facs, homs=[])
    assert r.status == "exact"
    assert r.gamma_layer["orders"] == list(kx_cohomology(G(facs), 4).orders)
    assert r.alpha_layer == []


def test_result_json_shape():
    d = _sh([4, 4]).to_dict()
    assert d["status"] == "exact" and d["order"] == 32
    assert set(d) >= {"filtration", "alpha_layer", "beta_layer", "gamma_layer", "d3", "fixtures"}
