"""Pure-numpy implementations of the elimination kernels.

These mirror ``_ckernels.pyx`` exactly and are used when the compiled
extension is unavailable or ``SUPERCOH_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import numpy as np


def gf2_rref(rows: np.ndarray, ncols: int) -> tuple[int, list[int]]:
    """Reduce bit-packed rows over GF(2) to reduced row echelon form in place.

    ``rows`` has dtype uint64 and shape ``(m, ceil(ncols / 64))``; column ``c``
    lives in word ``c // 64`` at bit ``c % 64``. Returns the rank and the pivot
    column of each of the first ``rank`` rows.
    """
    m = rows.shape[0]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == m:
            break
        word, bit = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(bit)
        hits = np.nonzero(rows[r:, word] & mask)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            rows[[r, p]] = rows[[p, r]]
        others = np.nonzero(rows[:, word] & mask)[0]
        others = others[others != r]
        if others.size:
            rows[others] ^= rows[r]
        pivots.append(col)
        r += 1
    return r, pivots


def local_smith(mat: np.ndarray, p: int, modulus: int) -> list[int]:
    """Valuations of the elementary divisors of an integer matrix at ``p``.

    Works modulo ``modulus`` (a power of ``p``); divisors whose valuation
    reaches ``log_p(modulus)`` are indistinguishable from zero and are not
    reported. ``mat`` is not modified.
    """
    a = np.array(mat, dtype=np.int64) % modulus
    m, n = a.shape
    rows = np.ones(m, dtype=bool)
    cols = np.ones(n, dtype=bool)
    vals: list[int] = []
    pv = 1
    v = 0
    while pv < modulus:
        nxt = pv * p
        while True:
            sub = a[np.ix_(rows, cols)]
            if sub.size == 0:
                return vals
            hit = np.argwhere(sub % nxt != 0)
            if hit.shape[0] == 0:
                break
            ri, ci = hit[0]
            r = int(np.nonzero(rows)[0][ri])
            c = int(np.nonzero(cols)[0][ci])
            unit = int(a[r, c]) // pv
            uinv = pow(unit, -1, modulus)
            col = a[:, c].copy()
            col[~rows] = 0
            col[r] = 0
            targets = np.nonzero(col)[0]
            if targets.size:
                factors = ((col[targets] // pv) * uinv) % modulus
                a[targets] = (a[targets] - factors[:, None] * a[r][None, :]) % modulus
            rows[r] = False
            cols[c] = False
            vals.append(v)
        pv = nxt
        v += 1
    return vals


def sparse_unit_eliminate(indptr, indices, data, ncols: int, p: int, modulus: int):
    """Streaming sparse echelon over ``Z/modulus`` with pivots coprime to ``p``.

    Rows (CSR) are reduced one at a time by the stored pivots, always at
    their largest column; on bar coboundaries this ordering produces almost
    no fill-in. A row whose leading entry is a unit becomes a new pivot and
    one with a non-unit lead is set aside. Set-aside rows are reduced again
    by the final pivot set and returned as ``(cols, vals)`` arrays along with
    the pivot count.
    """
    import heapq

    pivots: dict[int, dict[int, int]] = {}

    def reduce(row: dict[int, int], keep_going: bool):
        heap = [-j for j in row]
        heapq.heapify(heap)
        out: dict[int, int] = {}
        while heap:
            j = -heapq.heappop(heap)
            x = row.pop(j, 0)
            if not x:
                continue
            piv = pivots.get(j)
            if piv is not None:
                for jj, y in piv.items():
                    z = (row.get(jj, 0) - x * y) % modulus
                    if jj not in row:
                        heapq.heappush(heap, -jj)
                    if z:
                        row[jj] = z
                    else:
                        row.pop(jj, None)
                continue
            if not keep_going:
                if x % p:
                    inv = pow(x, -1, modulus)
                    pivots[j] = {jj: y * inv % modulus for jj, y in row.items()}
                    return None
                row[j] = x
                return row
            out[j] = x
        return out

    set_aside = []
    for i in range(len(indptr) - 1):
        row: dict[int, int] = {}
        for k in range(indptr[i], indptr[i + 1]):
            j = int(indices[k])
            x = (row.get(j, 0) + int(data[k])) % modulus
            if x:
                row[j] = x
            else:
                row.pop(j, None)
        rest = reduce(row, False)
        if rest:
            set_aside.append(rest)
    residual = []
    for row in set_aside:
        out = reduce(row, True)
        if out:
            cols = sorted(out, reverse=True)
            residual.append(
                (np.array(cols, dtype=np.int64), np.array([out[j] for j in cols], dtype=np.int64))
            )
    return len(pivots), residual

