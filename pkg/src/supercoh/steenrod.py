"""Steenrod squares on ``H^*(BG; Z/2)`` for finite abelian ``G``.

Squares are computed from per-generator rules and the Cartan formula:

* a factor with 2-part 2 has ``t`` of degree 1 with ``Sq(t) = t + t^2``;
* a factor with 2-part at least 4 has ``x1`` (degree 1, exterior) and
  ``x2`` (degree 2) with ``Sq(x1) = x1`` and ``Sq(x2) = x2 + x2^2``.

The rule table is certified against the cup-i oracle (``sq_oracle``) in the
test suite.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .bar import CapExceeded, SIZE_CAP, bar_square, express_in_basis, mod2_bar_cocycle
from .groups import FiniteAbelianGroup, GroupError
from .grpcoh import EXTERIOR, POLYNOMIAL, Mod2Class, mod2_ring
from .linalg import gf2_nullspace, gf2_row_basis

RULES = {
    POLYNOMIAL: {"t": {0: "t", 1: "t^2", 2: "0"}},
    EXTERIOR: {"x1": {0: "x1", 1: "0", 2: "0"}, "x2": {0: "x2", 1: "0", 2: "x2^2"}},
}


def _factor_square(kind: str, k: int, j: int) -> int | None:
    """``Sq^j`` of the factor monomial of multidegree ``k``; new multidegree or None."""
    if j == 0:
        return k
    if kind == POLYNOMIAL:
        return k + j if comb(k, j) % 2 else None
    if kind == EXTERIOR:
        if j % 2:
            return None
        m = k // 2
        return k + j if comb(m, j // 2) % 2 else None
    return None


def _square_monomial(kinds, k: tuple[int, ...], i: int) -> set[tuple[int, ...]]:
    out: set[tuple[int, ...]] = set()

    def rec(pos: int, left: int, acc: tuple[int, ...]) -> None:
        if pos == len(kinds):
            if left == 0:
                out.symmetric_difference_update({acc})
            return
        if kinds[pos] is None:
            rec(pos + 1, left, acc + (k[pos],))
            return
        for j in range(left + 1):
            kk = _factor_square(kinds[pos], k[pos], j)
            if kk is not None:
                rec(pos + 1, left - j, acc + (kk,))

    rec(0, i, ())
    return out


def _sq_any(i: int, cls: Mod2Class) -> Mod2Class:
    ring = cls.ring
    if i == 0:
        return cls
    if i > cls.degree:
        return ring.zero(cls.degree + i)
    out: set[tuple[int, ...]] = set()
    for k in cls.support:
        out ^= _square_monomial(ring.kinds, k, i)
    return Mod2Class(ring, cls.degree + i, frozenset(out))


def sq(group: FiniteAbelianGroup, i: int, cls: Mod2Class) -> Mod2Class:
    """``Sq^i`` for ``i`` in ``{0, 1, 2}``."""
    if i not in (0, 1, 2):
        raise ValueError(f"only Sq^0, Sq^1 and Sq^2 are supported, got Sq^{i}")
    if cls.ring.group != group:
        raise GroupError("class lives over a different group")
    return _sq_any(i, cls)


def sq_matrix(group: FiniteAbelianGroup, i: int, degree: int) -> np.ndarray:
    """F2 matrix of ``Sq^i: H^degree -> H^{degree+i}`` (columns are images)."""
    ring = mod2_ring(group)
    cols = [sq(group, i, ring.monomial(k)).vector() for k in ring.basis(degree)]
    if not cols:
        return np.zeros((ring.dim(degree + i), 0), dtype=np.uint8)
    return np.array(cols, dtype=np.uint8).T.reshape(ring.dim(degree + i), len(cols))


def sq_kernel(group: FiniteAbelianGroup, i: int, degree: int) -> list[Mod2Class]:
    """A basis of ``ker(Sq^i)`` on ``H^degree``."""
    ring = mod2_ring(group)
    mat = sq_matrix(group, i, degree)
    if mat.shape[1] == 0:
        return []
    if mat.shape[0] == 0:
        null = np.eye(mat.shape[1], dtype=np.uint8)
    else:
        null = gf2_nullspace(mat)
    return [ring.from_vector(degree, row) for row in null]


def bockstein_image(group: FiniteAbelianGroup, degree: int) -> list[Mod2Class]:
    """Basis of ``Sq^1(H^degree)`` inside ``H^{degree+1}``, in echelon form."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    ring = mod2_ring(group)
    mat = sq_matrix(group, 1, degree)
    if mat.size == 0:
        return []
    rows = gf2_row_basis(mat.T)
    return [ring.from_vector(degree + 1, r) for r in rows]


def sq_oracle(group: FiniteAbelianGroup, i: int, cls: Mod2Class) -> Mod2Class:
    """``Sq^i`` via Steenrod's cup-i products on bar cochains."""
    if cls.ring.group != group:
        raise GroupError("class lives over a different group")
    if i < 0:
        raise ValueError("negative square")
    if cls.degree > 5:
        raise CapExceeded("sq_oracle supports classes of degree at most 5")
    if group.order ** (cls.degree + i) > SIZE_CAP:
        raise CapExceeded(f"|G|^{cls.degree + i} exceeds {SIZE_CAP}")
    ring = cls.ring
    if i > cls.degree or not cls.support:
        return ring.zero(cls.degree + i)
    u = mod2_bar_cocycle(cls)
    w = bar_square(group, i, u, cls.degree)
    return express_in_basis(ring, cls.degree + i, w)
