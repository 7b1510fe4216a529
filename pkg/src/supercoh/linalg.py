"""Exact linear algebra over Z and GF(2).

Integer matrices here are small (cochain complexes of tensored periodic
resolutions, spectral-sequence entries), so Smith normal form runs on Python
ints with full transform tracking. GF(2) work goes through the bit-packed
kernels in :mod:`supercoh.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels

Matrix = list[list[int]]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    n = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] if bt else [0] * n for row in a]


def matvec(a: Matrix, v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(r) for r in zip(*a)]


def columns(a: Matrix, idx: Sequence[int]) -> Matrix:
    return [[row[j] for j in idx] for row in a]


@dataclass
class Smith:
    """``U @ A @ V == diag(diagonal)`` with ``U``, ``V`` unimodular."""

    diagonal: list[int]
    U: Matrix
    Uinv: Matrix
    V: Matrix
    Vinv: Matrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith(a: Matrix, m: int | None = None, n: int | None = None) -> Smith:
    """Smith normal form with transforms.

    Pivot rows are reduced by Euclidean steps against the running pivot, which
    keeps entries near the size of the current divisor.
    """
    m = len(a) if m is None else m
    n = (len(a[0]) if a else 0) if n is None else n
    A = [list(map(int, row)) for row in a] if m else []
    U, Uinv, V, Vinv = identity(m), identity(m), identity(n), identity(n)

    def row_add(i: int, j: int, c: int) -> None:  # row_i += c * row_j
        A[i] = [x + c * y for x, y in zip(A[i], A[j])]
        U[i] = [x + c * y for x, y in zip(U[i], U[j])]
        for row in Uinv:
            row[j] -= c * row[i]

    def row_swap(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def row_neg(i: int) -> None:
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for row in Uinv:
            row[i] = -row[i]

    def col_add(i: int, j: int, c: int) -> None:  # col_i += c * col_j
        for row in A:
            row[i] += c * row[j]
        for row in V:
            row[i] += c * row[j]
        Vinv[j] = [x - c * y for x, y in zip(Vinv[j], Vinv[i])]

    def col_swap(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    diag: list[int] = []
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if i != t:
                row_swap(i, t)
            if j != t:
                col_swap(j, t)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    row_add(i, t, -q)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    col_add(j, t, -q)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is not None:
                row_add(t, bad, 1)
                continue
            break
        if A[t][t] < 0:
            row_neg(t)
        diag.append(A[t][t])
        if all(A[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            diag.extend([0] * (min(m, n) - t - 1))
            break
    return Smith(diag + [0] * (min(m, n) - len(diag)), U, Uinv, V, Vinv)


@dataclass
class Presentation:
    """A finitely generated abelian group ``ker / im`` with cocycle lifts.

    ``orders`` are the invariant factors (``0`` marks an infinite cyclic
    summand). ``lifts[k]`` is a representative vector of generator ``k`` in
    the ambient lattice; ``coords`` maps any ambient vector lying in the
    kernel lattice to its coordinates.
    """

    orders: list[int]
    lifts: list[list[int]]
    coord_matrix: Matrix
    ambient_dim: int
    degree: int | None = None
    labels: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        """Group order; ``0`` if infinite."""
        out = 1
        for o in self.orders:
            if o == 0:
                return 0
            out *= o
        return out

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def coords(self, vec: Sequence[int]) -> list[int]:
        raw = matvec(self.coord_matrix, vec)
        return [c % o if o else c for c, o in zip(raw, self.orders)]

    def normalize(self, coords: Sequence[int]) -> list[int]:
        return [c % o if o else c for c, o in zip(coords, self.orders)]

    def lift(self, coords: Sequence[int]) -> list[int]:
        out = [0] * self.ambient_dim
        for c, vec in zip(coords, self.lifts):
            if c:
                for i, x in enumerate(vec):
                    out[i] += c * x
        return out

    def is_zero(self, coords: Sequence[int]) -> bool:
        return not any(self.normalize(coords))

    def element_order(self, coords: Sequence[int]) -> int:
        from math import gcd, lcm

        out = 1
        for c, o in zip(self.normalize(coords), self.orders):
            if o == 0:
                if c:
                    return 0
                continue
            out = lcm(out, o // gcd(c, o))
        return out

    def two_torsion_basis(self) -> list[list[int]]:
        """Coordinates of an F2 basis of the 2-torsion subgroup."""
        basis = []
        for k, o in enumerate(self.orders):
            if o and o % 2 == 0:
                v = [0] * self.ngens
                v[k] = o // 2
                basis.append(v)
        return basis


def homology(d_in: Matrix, d_out: Matrix, n: int, degree: int | None = None) -> Presentation:
    """``ker(d_out) / im(d_in)`` for integer maps ``Z^s -> Z^n -> Z^m``.

    ``d_in`` is ``n x s`` and ``d_out`` is ``m x n``; either may be empty.
    """
    m = len(d_out)
    if m:
        so = smith(d_out, m, n)
        r = so.rank
        vinv = so.Vinv
        kbasis = [[so.V[i][j] for j in range(r, n)] for i in range(n)]
    else:
        r = 0
        vinv = identity(n)
        kbasis = identity(n)
    k = n - r
    s = len(d_in[0]) if d_in and d_in[0] else 0
    kcoord = vinv[r:]  # k x n
    if s:
        b = matmul(kcoord, d_in)  # k x s
        sb = smith(b, k, s)
        P, Pinv, diag = sb.U, sb.Uinv, sb.diagonal + [0] * (k - min(k, s))
    else:
        P, Pinv, diag = identity(k), identity(k), [0] * k
    keep = [i for i in range(k) if diag[i] != 1]
    orders = [abs(diag[i]) for i in keep]
    # generator i of the quotient lifts to K @ Pinv[:, i]
    lift_cols = matmul(kbasis, Pinv) if k else [[] for _ in range(n)]
    lifts = [[lift_cols[row][i] for row in range(n)] for i in keep]
    cm = matmul(P, kcoord) if k else []
    coord_matrix = [cm[i] for i in keep]
    return Presentation(orders, lifts, coord_matrix, n, degree)


def solve_int(a: Matrix, b: Sequence[int], n: int | None = None) -> list[int] | None:
    """An integer solution of ``a x = b`` or ``None``."""
    m = len(a)
    n = (len(a[0]) if a else 0) if n is None else n
    if m == 0:
        return [0] * n
    s = smith(a, m, n)
    ub = matvec(s.U, b)
    y = [0] * n
    for i in range(m):
        d = s.diagonal[i] if i < len(s.diagonal) else 0
        if d == 0:
            if ub[i]:
                return None
        else:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
    return matvec(s.V, y)


def lattice_kernel(a: Matrix, n: int) -> Matrix:
    """Columns (as a list of vectors) spanning ``{x in Z^n : a x = 0}``."""
    if not a:
        return identity(n)
    s = smith(a, len(a), n)
    r = s.rank
    return [[s.V[i][j] for i in range(n)] for j in range(r, n)]


# --- GF(2) -----------------------------------------------------------------


def gf2_rref_dense(mat: np.ndarray, ncols: int | None = None) -> tuple[np.ndarray, int, list[int]]:
    """RREF of a dense 0/1 matrix; pivots are searched in the first ``ncols`` columns."""
    mat = np.asarray(mat, dtype=np.uint8) & 1
    total = mat.shape[1]
    packed = kernels.pack_bits(mat)
    rank, piv = kernels.gf2_rref(packed, total if ncols is None else ncols)
    return kernels.unpack_bits(packed, total), rank, piv


def gf2_rank(mat: np.ndarray) -> int:
    mat = np.asarray(mat, dtype=np.uint8)
    if mat.size == 0:
        return 0
    return gf2_rref_dense(mat)[1]


def gf2_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve ``a x = b`` over GF(2); ``b`` may be a vector or a matrix of columns."""
    a = np.asarray(a, dtype=np.uint8) & 1
    b = np.asarray(b, dtype=np.uint8) & 1
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    m, n = a.shape
    if m == 0:
        return np.zeros(n if vec else (n, b.shape[1]), dtype=np.uint8)
    red, rank, piv = gf2_rref_dense(np.hstack([a, b]), n)
    if red[rank:, n:].any():
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.uint8)
    for row, col in enumerate(piv):
        x[col] = red[row, n:]
    return x[:, 0] if vec else x


def gf2_nullspace(a: np.ndarray) -> np.ndarray:
    """Rows form a basis of ``{x : a x = 0}`` over GF(2)."""
    a = np.asarray(a, dtype=np.uint8) & 1
    m, n = a.shape
    if m == 0:
        return np.eye(n, dtype=np.uint8)
    red, rank, piv = gf2_rref_dense(a)
    free = [j for j in range(n) if j not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, col in enumerate(piv):
            basis[k, col] = red[row, f]
    return basis


def gf2_row_basis(a: np.ndarray) -> np.ndarray:
    """Reduced row-echelon basis of the row space."""
    a = np.asarray(a, dtype=np.uint8) & 1
    if a.size == 0:
        return a.reshape(0, a.shape[1] if a.ndim == 2 else 0)
    red, rank, _ = gf2_rref_dense(a)
    return red[:rank]


# --- finite abelian subquotients --------------------------------------------------


def lattice_basis(spanning: Matrix, n: int) -> Matrix:
    """Basis (as columns, ``n x s``) of the lattice spanned by the columns of ``spanning``."""
    s = len(spanning[0]) if spanning and spanning[0] else 0
    if s == 0:
        return [[] for _ in range(n)]
    sm = smith(spanning, n, s)
    r = sm.rank
    return [[sm.Uinv[i][j] * sm.diagonal[j] for j in range(r)] for i in range(n)]


def kernel_mod(mat: Matrix, orders_y: Sequence[int], n: int) -> Matrix:
    """Columns spanning ``{x in Z^n : mat x = 0 in prod Z/orders_y}``."""
    m = len(orders_y)
    if m == 0:
        return identity(n)
    aug = [list(mat[i]) + [orders_y[i] if k == i else 0 for k in range(m)] for i in range(m)]
    ker = lattice_kernel(aug, n + m)
    return [[v[i] for v in ker] for i in range(n)]


@dataclass
class Subquotient:
    """``ker(d_out) / im(d_in)`` inside ``X = prod Z/orders_x``.

    ``gens`` are new generators as vectors of ``X``; ``coords(x)`` takes an
    ``X``-vector lying in the kernel to new coordinates.
    """

    orders: list[int]
    gens: list[list[int]]
    coord_num: Matrix
    coord_den: int

    def coords(self, x: Sequence[int]) -> list[int]:
        raw = matvec(self.coord_num, x)
        out = []
        for v, o in zip(raw, self.orders):
            if v % self.coord_den:
                raise ValueError("vector is not in the kernel lattice")
            v //= self.coord_den
            out.append(v % o if o else v)
        return out


def subquotient(
    orders_x: Sequence[int],
    d_out: Matrix | None,
    orders_y: Sequence[int],
    d_in: Matrix | None,
    in_dim: int = 0,
) -> Subquotient:
    """Homology at ``X`` of ``W --d_in--> X --d_out--> Y`` of finite abelian groups.

    Matrices act on generator coordinates and need only be defined modulo the
    relevant orders. ``None`` stands for the zero map.
    """
    from math import lcm

    n = len(orders_x)
    if n == 0:
        return Subquotient([], [], [], 1)
    if d_out is not None and len(orders_y) and any(any(row) for row in d_out):
        span = kernel_mod(d_out, orders_y, n)
        span = [row + [orders_x[i] if k == i else 0 for k in range(n)] for i, row in enumerate(span)]
        bk = lattice_basis(span, n)
    else:
        bk = identity(n)
    if len(bk[0]) != n:
        raise ValueError("kernel lattice is not of full rank; infinite orders are unsupported")
    # B_K^{-1} = V diag(1/d) U
    sk = smith(bk, n, n)
    L = 1
    for d in sk.diagonal:
        L = lcm(L, d)
    scaled = [[sk.U[i][j] * (L // sk.diagonal[i]) for j in range(n)] for i in range(n)]
    binv_num = matmul(sk.V, scaled)
    rel_cols = [[orders_x[i] if k == i else 0 for i in range(n)] for k in range(n)]
    if d_in is not None and in_dim:
        rel_cols += [[d_in[i][k] for i in range(n)] for k in range(in_dim)]
    rel = transpose(rel_cols)
    rel_k = [[v // L for v in row] for row in matmul(binv_num, rel)]
    sr = smith(rel_k, n, len(rel_cols))
    keep = [i for i in range(n) if sr.diagonal[i] != 1]
    orders = [abs(sr.diagonal[i]) for i in keep]
    gens_k = [[sr.Uinv[r][i] for r in range(n)] for i in keep]
    gens = [[v % o if o else v for v, o in zip(matvec(bk, g), orders_x)] for g in gens_k]
    num_all = matmul(sr.U, binv_num)
    coord_num = [num_all[i] for i in keep]
    return Subquotient(orders, gens, coord_num, L)


def hom_image_order(orders_x: Sequence[int], mat: Matrix | None, orders_y: Sequence[int]) -> int:
    """Order of the image of a homomorphism between finite abelian groups."""
    n = len(orders_x)
    total = 1
    for o in orders_x:
        total *= o
    if mat is None or n == 0 or not orders_y:
        return 1
    sq = subquotient(orders_x, mat, orders_y, None)
    ker = 1
    for o in sq.orders:
        ker *= o
    return total // ker
