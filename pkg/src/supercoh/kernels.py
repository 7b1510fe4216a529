"""Selects the compiled elimination kernels, falling back to numpy.

Set ``SUPERCOH_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if not os.environ.get("SUPERCOH_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels

# int64 products in the kernels stay exact below this bound
MAX_MODULUS = 2**31


def gf2_rref(rows: np.ndarray, ncols: int) -> tuple[int, list[int]]:
    """In-place GF(2) RREF of bit-packed uint64 rows; returns (rank, pivots)."""
    if rows.dtype != np.uint64 or not rows.flags.c_contiguous:
        raise TypeError("rows must be a C-contiguous uint64 array")
    if rows.shape[0] == 0 or ncols == 0:
        return 0, []
    return _impl.gf2_rref(rows, ncols)


def local_smith(mat, p: int, modulus: int) -> list[int]:
    """Valuations at ``p`` of the nonzero elementary divisors of ``mat`` mod ``modulus``."""
    if modulus >= MAX_MODULUS:
        raise ValueError("modulus too large for the int64 kernels")
    arr = np.asarray(mat, dtype=np.int64)
    if arr.size == 0:
        return []
    return list(_impl.local_smith(arr, p, modulus))


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix (m, n) into uint64 words (m, ceil(n/64))."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    m, n = dense.shape
    w = max(1, (n + 63) // 64)
    padded = np.zeros((m, w * 64), dtype=np.uint8)
    padded[:, :n] = dense
    packed = np.packbits(padded.reshape(m, w * 8, 8), axis=2, bitorder="little")
    return np.ascontiguousarray(packed.reshape(m, w * 8)).view("<u8").astype(np.uint64).reshape(m, w)


def unpack_bits(rows: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`."""
    m, w = rows.shape
    as_bytes = np.ascontiguousarray(rows, dtype="<u8").view(np.uint8).reshape(m, w * 8, 1)
    bits = np.unpackbits(as_bytes, axis=2, bitorder="little")
    return bits.reshape(m, w * 64)[:, :ncols].astype(np.uint8)


def sparse_unit_eliminate(indptr, indices, data, ncols: int, p: int, modulus: int):
    """Unit-pivot sparse elimination over ``Z/modulus``; see ``_pykernels``."""
    if modulus >= MAX_MODULUS:
        raise ValueError("modulus too large for the int64 kernels")
    return _impl.sparse_unit_eliminate(
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(data, dtype=np.int64),
        int(ncols), int(p), int(modulus),
    )


def sparse_local_smith(indptr, indices, data, ncols: int, p: int, modulus: int) -> list[int]:
    """``local_smith`` for a sparse CSR matrix: unit pivots first, dense residual after."""
    npiv, residual = sparse_unit_eliminate(indptr, indices, data, ncols, p, modulus)
    vals = [0] * npiv
    if residual:
        used = np.unique(np.concatenate([c for c, _ in residual]))
        pos = {int(c): k for k, c in enumerate(used)}
        dense = np.zeros((len(residual), len(used)), dtype=np.int64)
        for r, (cs, vs) in enumerate(residual):
            for c, v in zip(cs.tolist(), vs.tolist()):
                dense[r, pos[c]] = v
        vals.extend(local_smith(dense, p, modulus))
    return vals
