"""Tensor products of periodic resolutions for finite abelian groups.

For ``Z/n`` the periodic resolution has one free generator ``e_k`` per degree
with ``d e_k = (g - 1) e_{k-1}`` for odd ``k`` and ``d e_k = N e_{k-1}`` for
even ``k >= 2``, where ``N`` is the norm element. For a product of cyclic
groups we tensor these (Koszul signs), so degree-``d`` generators are tuples
``k`` with ``sum(k) == d``.

Chains of the resolution are dicts ``{(g, k): coeff}`` where ``g`` is a group
element (tuple of residues) and ``k`` a generator tuple. Cochains with
trivial coefficients are functions on generator tuples only.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from functools import lru_cache
from typing import Iterable, Sequence

from .groups import FiniteAbelianGroup, GroupHom
from .linalg import Matrix

Chain = dict


def compositions(d: int, r: int) -> list[tuple[int, ...]]:
    """All ``r``-tuples of non-negative ints summing to ``d``, descending lex."""
    if r == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in compositions(d - first, r - 1):
            out.append((first,) + rest)
    return out


def _add(chain: Chain, key, c: int) -> None:
    v = chain.get(key, 0) + c
    if v:
        chain[key] = v
    else:
        chain.pop(key, None)


class TensorResolution:
    """The tensor product of periodic resolutions of the cyclic factors."""

    def __init__(self, group: FiniteAbelianGroup):
        self.group = group
        self.orders = group.factors
        self.r = len(self.orders)
        self._basis: dict[int, list[tuple[int, ...]]] = {}
        self._index: dict[int, dict[tuple[int, ...], int]] = {}

    # --- cochain side ------------------------------------------------------

    def basis(self, d: int) -> list[tuple[int, ...]]:
        if d not in self._basis:
            self._basis[d] = compositions(d, self.r) if d >= 0 else []
            self._index[d] = {k: i for i, k in enumerate(self._basis[d])}
        return self._basis[d]

    def index(self, d: int) -> dict[tuple[int, ...], int]:
        self.basis(d)
        return self._index[d]

    def rank(self, d: int) -> int:
        return len(self.basis(d))

    def coboundary(self, d: int) -> Matrix:
        """Matrix of ``delta: C^d -> C^{d+1}`` with trivial integer coefficients."""
        src, tgt = self.basis(d), self.index(d + 1)
        mat = [[0] * len(src) for _ in range(len(tgt))]
        for col, k in enumerate(src):
            sign = 1
            for i, n in enumerate(self.orders):
                if k[i] % 2 == 1:
                    kk = k[:i] + (k[i] + 1,) + k[i + 1 :]
                    mat[tgt[kk]][col] += sign * n
                if k[i] % 2:
                    sign = -sign
        return mat

    # --- chain side ---------------------------------------------------------

    def _factor_boundary(self, i: int, a: int, k: int) -> list[tuple[int, int, int]]:
        n = self.orders[i]
        if k == 0:
            return []
        if k % 2 == 1:
            return [((a + 1) % n, k - 1, 1), (a, k - 1, -1)]
        return [((a + b) % n, k - 1, 1) for b in range(n)]

    def boundary(self, chain: Chain) -> Chain:
        out: Chain = {}
        for (g, k), c in chain.items():
            sign = 1
            for i in range(self.r):
                for a, kk, s in self._factor_boundary(i, g[i], k[i]):
                    _add(out, (g[:i] + (a,) + g[i + 1 :], k[:i] + (kk,) + k[i + 1 :]), sign * s * c)
                if k[i] % 2:
                    sign = -sign
        return out

    def _factor_homotopy(self, i: int, a: int, k: int) -> list[tuple[int, int]]:
        n = self.orders[i]
        if k % 2 == 0:
            return [(b, k + 1) for b in range(a)]
        return [(0, k + 1)] if a == n - 1 else []

    def _homotopy_basis(self, g: tuple[int, ...], k: tuple[int, ...], start: int) -> list:
        """Homotopy applied to ``g e_k`` acting on factors ``start..r-1``.

        Factors before ``start`` already sit at ``e_0`` with trivial group part.
        """
        if start == self.r:
            return []
        out = [
            (g[:start] + (a,) + g[start + 1 :], k[:start] + (kk,) + k[start + 1 :])
            for a, kk in self._factor_homotopy(start, g[start], k[start])
        ]
        if k[start] == 0:
            g0 = g[:start] + (0,) + g[start + 1 :]
            out.extend(self._homotopy_basis(g0, k, start + 1))
        return out

    def homotopy(self, chain: Chain) -> Chain:
        """Contracting homotopy ``h`` with ``dh + hd = 1 - eta*eps`` (Z-linear)."""
        out: Chain = {}
        for (g, k), c in chain.items():
            for key in self._homotopy_basis(g, k, 0):
                _add(out, key, c)
        return out

    def augmentation(self, chain: Chain) -> int:
        return sum(c for (g, k), c in chain.items() if not any(k))

    def zero_gen(self, d: int = 0) -> tuple:
        return ((0,) * self.r, (0,) * self.r)


def translate(chain: Chain, shift: Sequence[int], orders: Sequence[int]) -> Chain:
    out: Chain = {}
    for (g, k), c in chain.items():
        _add(out, (tuple((x + s) % n for x, s, n in zip(g, shift, orders)), k), c)
    return out


class ChainMap:
    """Lift of a homomorphism ``f: G -> H`` to the tensor resolutions.

    ``image(k)`` is the chain in the resolution of ``H`` assigned to the
    generator ``e_k`` of the resolution of ``G``; the map is ``f``-equivariant.
    """

    def __init__(self, hom: GroupHom):
        self.hom = hom
        self.src = resolution(hom.source)
        self.tgt = resolution(hom.target)
        self._images: dict[tuple[int, ...], Chain] = {}

    def apply(self, chain: Chain) -> Chain:
        out: Chain = {}
        orders = self.tgt.orders
        for (g, k), c in chain.items():
            img = translate(self.image(k), self.hom(g), orders)
            for key, v in img.items():
                _add(out, key, c * v)
        return out

    def image(self, k: tuple[int, ...]) -> Chain:
        if k in self._images:
            return self._images[k]
        if not any(k):
            img = {((0,) * self.tgt.r, (0,) * self.tgt.r): 1}
        else:
            db = self.src.boundary({((0,) * self.src.r, k): 1})
            img = self.tgt.homotopy(self.apply(db))
        self._images[k] = img
        return img

    def cochain_matrix(self, d: int) -> Matrix:
        """``P`` with ``(f^* u)[row] = sum_col P[row][col] u[col]`` in degree ``d``."""
        tidx = self.tgt.index(d)
        rows = []
        for k in self.src.basis(d):
            row = [0] * len(tidx)
            for (g, kk), c in self.image(k).items():
                row[tidx[kk]] += c
            rows.append(row)
        return rows


@lru_cache(maxsize=None)
def resolution(group: FiniteAbelianGroup) -> TensorResolution:
    return TensorResolution(group)


@lru_cache(maxsize=None)
def chain_map(hom: GroupHom) -> ChainMap:
    return ChainMap(hom)


def check_homotopy(res: TensorResolution, d: int, gens: Iterable | None = None) -> bool:
    """Verify ``dh + hd = 1 - eta*eps`` on all ``g e_k`` of degree ``d``."""
    elems = list(res.group.elements()) or [()]
    for k in res.basis(d):
        for g in elems:
            x = {(g, k): 1}
            lhs = res.boundary(res.homotopy(x))
            for key, c in res.homotopy(res.boundary(x)).items():
                _add(lhs, key, c)
            rhs = dict(x)
            if d == 0:
                _add(rhs, res.zero_gen(), -1)
            if lhs != rhs:
                return False
    return True
