"""Brute-force computations on the inhomogeneous bar complex.

Used as independent oracles: cohomology by direct elimination, Steenrod
squares via cup-i products, and transport of tensor-resolution cocycles to
bar cocycles. Bar cochains of degree ``d`` are arrays indexed by
``index(g_1, ..., g_d)`` in mixed radix over ``group.index``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import prod

import numpy as np

from . import kernels
from .groups import FiniteAbelianGroup
from .linalg import Presentation, gf2_rank, gf2_solve
from .resolution import _add, resolution, translate

SIZE_CAP = 10**7
# largest dense elimination attempted (entries); beyond this the oracle refuses
DENSE_CAP = 6 * 10**7


class CapExceeded(RuntimeError):
    """Input is beyond the brute-force size limits."""


def _check_cap(group: FiniteAbelianGroup, degree: int) -> None:
    if group.order**degree > SIZE_CAP:
        raise CapExceeded(f"|G|^{degree} = {group.order**degree} exceeds {SIZE_CAP}")


class BarComplex:
    """Multiplication tables and coboundaries for the bar complex of ``G``."""

    def __init__(self, group: FiniteAbelianGroup):
        self.group = group
        self.n = group.order
        elems = group.element_list() or [()]
        self.elems = elems
        self.mul = np.array(
            [[group.index(group.add(a, b)) for b in elems] for a in elems], dtype=np.int64
        ).reshape(self.n, self.n)

    def tuples(self, d: int):
        return itertools.product(range(self.n), repeat=d)

    def coboundary_entries(self, d: int, normalized: bool = True):
        """Sparse ``delta: C^d -> C^{d+1}`` as (row, col, value) arrays.

        With ``normalized`` only tuples without identity entries index rows
        and columns (identity has index 0), numbered in mixed radix ``n - 1``.
        """
        n = self.n
        base = n - 1 if normalized else n
        off = 1 if normalized else 0
        grids = np.indices((base,) * (d + 1)).reshape(d + 1, -1) + off if d + 1 else None
        rows = np.arange(base ** (d + 1), dtype=np.int64)
        out_r, out_c, out_v = [], [], []

        def col_index(parts):
            # parts: list of d arrays of element indices; returns column ids or -1
            idx = np.zeros(rows.shape, dtype=np.int64)
            ok = np.ones(rows.shape, dtype=bool)
            for p in parts:
                if normalized:
                    ok &= p != 0
                idx = idx * base + (p - off)
            return np.where(ok, idx, -1)

        g = [grids[i] for i in range(d + 1)]
        terms = [(g[1:], 1)]
        for i in range(d):
            merged = g[:i] + [self.mul[g[i], g[i + 1]]] + g[i + 2 :]
            terms.append((merged, -1 if (i + 1) % 2 else 1))
        terms.append((g[:d], -1 if (d + 1) % 2 else 1))
        for parts, sign in terms:
            cols = col_index(parts) if d else np.zeros(rows.shape, dtype=np.int64)
            keep = cols >= 0
            out_r.append(rows[keep])
            out_c.append(cols[keep])
            out_v.append(np.full(int(keep.sum()), sign, dtype=np.int64))
        return (
            np.concatenate(out_r),
            np.concatenate(out_c),
            np.concatenate(out_v),
            base ** (d + 1),
            base**d,
        )

    def coboundary_dense(self, d: int, normalized: bool = True) -> np.ndarray:
        r, c, v, m, k = self.coboundary_entries(d, normalized)
        if m * k > DENSE_CAP:
            raise CapExceeded(
                f"dense coboundary {m}x{k} in degree {d} exceeds the elimination budget"
            )
        mat = np.zeros((m, k), dtype=np.int64)
        np.add.at(mat, (r, c), v)
        return mat

    def coboundary_gf2(self, d: int, normalized: bool = True) -> np.ndarray:
        r, c, v, m, k = self.coboundary_entries(d, normalized)
        if m * k > 64 * DENSE_CAP:
            raise CapExceeded(
                f"dense F2 coboundary {m}x{k} in degree {d} exceeds the elimination budget"
            )
        mat = np.zeros((m, k), dtype=np.int64)
        np.add.at(mat, (r, c), v)
        return (mat & 1).astype(np.uint8)


@lru_cache(maxsize=None)
def bar_complex(group: FiniteAbelianGroup) -> BarComplex:
    return BarComplex(group)


def coboundary_csr(bar: BarComplex, d: int):
    """``delta^d`` in CSR form with duplicate entries merged.

    Rows are indexed by normalized ``(d+1)``-cochains and hold at most
    ``d + 2`` entries, so unit pivots on short rows keep fill-in low.
    """
    r, c, v, m, k = bar.coboundary_entries(d)
    key = r * k + c
    uniq, inv = np.unique(key, return_inverse=True)
    vals = np.bincount(inv, weights=v).astype(np.int64)
    keep = vals != 0
    uniq, vals = uniq[keep], vals[keep]
    rows, cols = np.divmod(uniq, k)
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=m), out=indptr[1:])
    return indptr, cols, vals, k


def _prime_exponents(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _torsion_from_coboundary(bar: BarComplex, d: int) -> list[int]:
    """Non-unit elementary divisors of ``delta^{d-1}``, as invariant factors.

    Every torsion divisor divides ``|G|``, so working modulo ``p^(e+1)`` with
    ``p^e`` the exact power of ``p`` in ``|G|`` separates them from zero.
    """
    from .groups import invariant_factors

    indptr, cols, vals, m = coboundary_csr(bar, d - 1)
    orders = []
    for p, e in _prime_exponents(bar.n).items():
        K = e + 1
        while p**K >= kernels.MAX_MODULUS:
            K -= 1
        levels = kernels.sparse_local_smith(indptr, cols, vals, m, p, p**K)
        orders.extend(p**v for v in levels if v >= 1)
    return invariant_factors(orders)


def _gf2_rank(bar: BarComplex, d: int) -> int:
    indptr, cols, vals, m = coboundary_csr(bar, d)
    return len(kernels.sparse_local_smith(indptr, cols, vals, m, 2, 2))


def _morse_torsion(group: FiniteAbelianGroup, d: int) -> list[int]:
    from .groups import invariant_factors
    from .linalg import smith
    from .morse import bar_morse

    mat = bar_morse(group).differential(d)
    if not mat or not mat[0]:
        return []
    diag = smith(mat, len(mat), len(mat[0])).diagonal
    return invariant_factors([abs(x) for x in diag if abs(x) > 1])


def _morse_gf2_rank(group: FiniteAbelianGroup, d: int) -> int:
    from .morse import bar_morse

    mat = bar_morse(group).differential(d)
    if not mat or not mat[0]:
        return 0
    return gf2_rank(np.array(mat, dtype=np.int64) & 1)


def bar_oracle(
    group: FiniteAbelianGroup, degree: int, coefficients: str = "Z/2", method: str = "morse"
) -> Presentation:
    """Cohomology of ``BG`` from the normalized bar complex.

    ``method="morse"`` reduces the bar complex along its rewriting collapsing
    scheme (see :mod:`supercoh.morse`); ``method="eliminate"`` runs sparse
    elimination on the full coboundaries and is only practical for small
    ``|G|^degree``. Only the isomorphism class is meaningful: the returned
    presentation carries invariant factors and no cocycle lifts.
    """
    from .grpcoh import coefficient

    coeffs = coefficient(coefficients)
    if degree < 0 or degree > 5:
        raise ValueError("bar oracle supports degrees 0..5")
    if method not in ("morse", "eliminate"):
        raise ValueError(f"unknown method {method!r}")
    _check_cap(group, degree)
    if coeffs == "Q/Z" and degree == 0:
        return Presentation([0], [], [], 0, 0, ["k^x"])
    if degree == 0:
        return Presentation([2] if coeffs == "Z/2" else [0], [], [], 0, 0)
    eff = degree + 1 if coeffs == "Q/Z" else degree
    if method == "morse":
        if coeffs == "Z/2":
            from .morse import bar_morse

            dim = len(bar_morse(group).critical(degree))
            h = dim - _morse_gf2_rank(group, degree) - _morse_gf2_rank(group, degree + 1)
            return Presentation([2] * h, [], [], 0, degree)
        return Presentation(_morse_torsion(group, eff), [], [], 0, degree)
    # full elimination needs cochains one degree up for Z/2 and k^x
    _check_cap(group, degree + 1 if coeffs == "Z/2" else eff)
    bar = bar_complex(group)
    if coeffs == "Z/2":
        dim = (bar.n - 1) ** degree
        r_out = _gf2_rank(bar, degree) if dim else 0
        r_in = _gf2_rank(bar, degree - 1) if dim else 0
        return Presentation([2] * (dim - r_out - r_in), [], [], 0, degree)
    if bar.n == 1:
        return Presentation([], [], [], 0, degree)
    return Presentation(_torsion_from_coboundary(bar, eff), [], [], 0, degree)


# --- transport from the tensor resolution -------------------------------------------


class BarTransport:
    """Chain map from the bar resolution to the tensor resolution of ``G``.

    ``image(gs)`` is the chain assigned to ``[g_1 | ... | g_d]`` where the
    ``g_i`` are element indices; it is built by the contracting homotopy, so
    it is automatically a chain map.
    """

    def __init__(self, group: FiniteAbelianGroup):
        self.group = group
        self.res = resolution(group)
        self.bar = bar_complex(group)
        self._img: dict[tuple[int, ...], dict] = {}

    def image(self, gs: tuple[int, ...]) -> dict:
        hit = self._img.get(gs)
        if hit is not None:
            return hit
        r = self.res.r
        if not gs:
            img = {((0,) * r, (0,) * r): 1}
        else:
            G = self.group
            d = len(gs)
            bnd: dict = {}
            first = translate(self.image(gs[1:]), self.bar.elems[gs[0]], G.factors)
            for key, c in first.items():
                _add(bnd, key, c)
            for i in range(d - 1):
                merged = gs[:i] + (int(self.bar.mul[gs[i], gs[i + 1]]),) + gs[i + 2 :]
                s = -1 if (i + 1) % 2 else 1
                for key, c in self.image(merged).items():
                    _add(bnd, key, s * c)
            s = -1 if d % 2 else 1
            for key, c in self.image(gs[:-1]).items():
                _add(bnd, key, s * c)
            img = self.res.homotopy(bnd)
        self._img[gs] = img
        return img

    def cochain(self, degree: int, values: dict[tuple[int, ...], int]) -> np.ndarray:
        """Bar cochain ``u o psi`` for a tensor cochain given as ``{k: value}``."""
        n = self.bar.n
        out = np.zeros(n**degree, dtype=np.int64)
        for flat, gs in enumerate(self.bar.tuples(degree)):
            tot = 0
            for (g, k), c in self.image(gs).items():
                v = values.get(k)
                if v:
                    tot += c * v
            out[flat] = tot
        return out


@lru_cache(maxsize=None)
def bar_transport(group: FiniteAbelianGroup) -> BarTransport:
    return BarTransport(group)


def mod2_bar_cocycle(cls) -> np.ndarray:
    """The class as a 0/1 bar cocycle of its degree."""
    values = {k: 1 for k in cls.support}
    tr = bar_transport(cls.ring.group)
    return (tr.cochain(cls.degree, values) & 1).astype(np.uint8)


def unnormalized_coboundary_gf2(group: FiniteAbelianGroup, d: int) -> np.ndarray:
    return bar_complex(group).coboundary_gf2(d, normalized=False)


# --- cup-i products -----------------------------------------------------------------


def _cup_i_splits(p: int, q: int, i: int):
    """Vertex sets (u_set, v_set) of the cup-i formula on an ``N``-simplex."""
    N = p + q - i
    out = []
    for cuts in itertools.combinations(range(N + 1), i + 1):
        bounds = (0,) + cuts + (N,)
        u_set: set[int] = set()
        v_set: set[int] = set()
        for j in range(i + 2):
            seg = range(bounds[j], bounds[j + 1] + 1)
            (u_set if j % 2 == 0 else v_set).update(seg)
        if len(u_set) == p + 1 and len(v_set) == q + 1:
            out.append((tuple(sorted(u_set)), tuple(sorted(v_set))))
    return out


def cup_i(group: FiniteAbelianGroup, u: np.ndarray, p: int, v: np.ndarray, q: int, i: int) -> np.ndarray:
    """Mod-2 cup-i product of bar cochains of degrees ``p`` and ``q``."""
    N = p + q - i
    if N < 0:
        raise ValueError("negative degree")
    _check_cap(group, N)
    bar = bar_complex(group)
    n = bar.n
    G = group
    splits = _cup_i_splits(p, q, i)
    out = np.zeros(n**N, dtype=np.uint8)
    elems = bar.elems
    for flat, gs in enumerate(bar.tuples(N)):
        xs = [G.identity()]
        for g in gs:
            xs.append(G.add(xs[-1], elems[g]))
        xi = [G.index(x) for x in xs]
        tot = 0
        for us, vs in splits:
            a = _face_index(G, xs, us, n)
            if not u[a]:
                continue
            b = _face_index(G, xs, vs, n)
            tot ^= int(v[b]) & 1
        out[flat] = tot
    return out


def _face_index(G: FiniteAbelianGroup, xs, verts, n: int) -> int:
    idx = 0
    for a, b in zip(verts, verts[1:]):
        diff = tuple((y - x) % m for x, y, m in zip(xs[a], xs[b], G.factors))
        idx = idx * n + G.index(diff)
    return idx


def bar_square(group: FiniteAbelianGroup, i: int, u: np.ndarray, degree: int) -> np.ndarray:
    """``Sq^i u = u cup_{degree - i} u`` on a mod-2 bar cocycle."""
    if i > degree:
        return np.zeros(bar_complex(group).n ** (degree + i), dtype=np.uint8)
    return cup_i(group, u, degree, u, degree, degree - i)


def express_in_basis(cls_ring, degree: int, w: np.ndarray):
    """Mod-2 class of a bar cocycle ``w`` in the ring's monomial basis."""
    group = cls_ring.group
    basis = cls_ring.basis(degree)
    tr = bar_transport(group)
    cols = [(tr.cochain(degree, {k: 1}) & 1).astype(np.uint8) for k in basis]
    n = bar_complex(group).n
    mats = [np.array(cols, dtype=np.uint8).reshape(len(cols), n**degree).T] if cols else []
    if degree > 0:
        mats.append(unnormalized_coboundary_gf2(group, degree - 1))
    a = np.hstack(mats) if mats else np.zeros((n**degree, 0), dtype=np.uint8)
    x = gf2_solve(a, w.astype(np.uint8) & 1)
    if x is None:
        raise ValueError("bar cochain is not a cocycle in the span of the basis")
    return cls_ring.from_vector(degree, x[: len(basis)])
