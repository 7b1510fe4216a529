import pytest

from supercoh.groups import FiniteAbelianGroup as G
from supercoh.grpcoh import mod2_ring
from supercoh.specseq import (KNOWN, UNDETERMINED, Entry, SpectralPage, UndeterminedDifferential,
                              assemble, check_composition, format_group, turn_page)
from supercoh.steenrod import bockstein_image, sq, sq_kernel


def test_sq_examples():
    g = G([4])
    ring = mod2_ring(g)
    assert str(sq(g, 1, ring.parse("x1"))) == "0"
    assert str(sq(g, 2, ring.parse("x2"))) == "x2^2"
    g2 = G([2])
    r2 = mod2_ring(g2)
    assert str(sq(g2, 1, r2.parse("x1"))) == "x1^2"
    with pytest.raises(ValueError):
        sq(g, 3, ring.parse("x2"))


def test_sq_kernel_and_bockstein_image():
    assert [str(c) for c in sq_kernel(G([4, 4]), 2, 2)] == ["x1y1"]
    img = bockstein_image(G([2, 2]), 1)
    assert len(img) == 2


def test_format_group():
    assert format_group([4, 4, 2]) == "Z/4^2+Z/2"
    assert format_group([2, 4, 4]) == "Z/4^2+Z/2"
    assert format_group([]) == "0"
    assert format_group([0], divisible=True) == "k^x"


def _toy_page():
    # Z/4 at (0,1) mapping onto the 2-torsion of Z/4 at (2,0)
    entries = {(0, 1): Entry.from_e2([4]), (2, 0): Entry.from_e2([4])}
    page = SpectralPage(2, entries, {}, 3, 1)
    page.set_differential((0, 1), [[2]], KNOWN)
    return page


def test_turn_page_orders():
    e3 = turn_page(_toy_page())
    assert e3.entries[(0, 1)].orders == [2]
    assert e3.entries[(2, 0)].orders == [2]
    assert e3.r == 3


def test_turn_page_refuses_undetermined():
    page = _toy_page()
    page.set_differential((0, 1), None, UNDETERMINED)
    with pytest.raises(UndeterminedDifferential):
        turn_page(page)
    assert turn_page(page, assume_zero=True).entries[(0, 1)].orders == [4]


def test_set_differential_shape():
    page = _toy_page()
    with pytest.raises(ValueError):
        page.set_differential((0, 1), [[1, 1]], KNOWN)


def test_check_composition_flags_nonzero():
    entries = {(0, 2): Entry.from_e2([2]), (2, 1): Entry.from_e2([2]), (4, 0): Entry.from_e2([2])}
    page = SpectralPage(2, entries, {}, 5, 2)
    page.set_differential((0, 2), [[1]], KNOWN)
    page.set_differential((2, 1), [[1]], KNOWN)
    assert check_composition(page) == [(0, 2)]


def test_assemble_bounds():
    page = _toy_page()
    page.set_differential((0, 1), None, UNDETERMINED)
    e3 = turn_page(page, assume_zero=True)
    res = assemble([page, e3], 1)
    assert res.upper == 4 and res.lower <= res.upper
