import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercoh import _pykernels, kernels
from supercoh.linalg import gf2_nullspace, gf2_rank, gf2_solve

ck = pytest.importorskip("supercoh._ckernels")

matrices = st.integers(1, 20).flatmap(
    lambda m: st.integers(1, 90).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_gf2_rref_backends_agree(rows):
    dense = np.array(rows, dtype=np.uint8)
    a, b = kernels.pack_bits(dense), kernels.pack_bits(dense)
    ra = ck.gf2_rref(a, dense.shape[1])
    rb = _pykernels.gf2_rref(b, dense.shape[1])
    assert ra[0] == rb[0] and list(ra[1]) == list(rb[1])
    assert (a == b).all()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 63), min_size=6, max_size=6), min_size=1, max_size=6))
def test_local_smith_backends_agree(rows):
    m = np.array(rows, dtype=np.int64)
    assert sorted(ck.local_smith(m.copy(), 2, 64)) == sorted(_pykernels.local_smith(m.copy(), 2, 64))


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_pack_roundtrip(rows):
    dense = np.array(rows, dtype=np.uint8)
    assert (kernels.unpack_bits(kernels.pack_bits(dense), dense.shape[1]) == dense).all()


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_nullspace_and_solve(rows):
    a = np.array(rows, dtype=np.uint8)
    null = gf2_nullspace(a)
    assert len(null) == a.shape[1] - gf2_rank(a)
    for v in null:
        assert not ((a.astype(int) @ v) % 2).any()
    x = np.zeros(a.shape[1], dtype=np.uint8)
    x[::2] = 1
    b = (a.astype(int) @ x % 2).astype(np.uint8)
    sol = gf2_solve(a, b)
    assert sol is not None and ((a.astype(int) @ sol) % 2 == b).all()


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_modulus_guard():
    with pytest.raises(ValueError):
        kernels.local_smith([[1]], 2, 2**40)
