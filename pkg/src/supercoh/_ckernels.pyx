# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled elimination kernels (GF(2) bit rows, p-local Smith valuations)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.utility cimport pair

cnp.import_array()


def gf2_rref(uint64_t[:, ::1] a, Py_ssize_t ncols):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    cdef Py_ssize_t r = 0, col, word, i, k, p
    cdef uint64_t mask, tmp
    pivots = []
    for col in range(ncols):
        if r == m:
            break
        word = col >> 6
        mask = (<uint64_t>1) << (col & 63)
        p = -1
        for i in range(r, m):
            if a[i, word] & mask:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(w):
                tmp = a[r, k]
                a[r, k] = a[p, k]
                a[p, k] = tmp
        for i in range(m):
            if i != r and (a[i, word] & mask):
                for k in range(w):
                    a[i, k] ^= a[r, k]
        pivots.append(col)
        r += 1
    return r, pivots


cdef inline int64_t _mulmod(int64_t x, int64_t y, int64_t mod) nogil:
    # callers keep mod < 2**31, so the product fits in int64
    return (x * y) % mod


def local_smith(mat, int64_t p, int64_t modulus):
    cdef cnp.ndarray[int64_t, ndim=2] arr = np.array(mat, dtype=np.int64) % modulus
    cdef int64_t[:, ::1] a = np.ascontiguousarray(arr)
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] rows_alive = np.ones(m, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] cols_alive = np.ones(n, dtype=np.uint8)
    cdef Py_ssize_t i, j, r, c
    cdef int64_t pv = 1, nxt, unit, uinv, f, x
    cdef int v = 0
    cdef bint found
    vals = []
    while pv < modulus:
        nxt = pv * p
        while True:
            found = False
            for i in range(m):
                if not rows_alive[i]:
                    continue
                for j in range(n):
                    if cols_alive[j] and a[i, j] % nxt != 0:
                        r = i
                        c = j
                        found = True
                        break
                if found:
                    break
            if not found:
                break
            unit = a[r, c] // pv
            uinv = pow(int(unit), -1, int(modulus))
            for i in range(m):
                if i == r or not rows_alive[i] or a[i, c] == 0:
                    continue
                f = _mulmod(a[i, c] // pv, uinv, modulus)
                for j in range(n):
                    if cols_alive[j] and a[r, j] != 0:
                        x = a[i, j] - _mulmod(f, a[r, j], modulus)
                        if x < 0:
                            x += modulus
                        a[i, j] = x
            rows_alive[r] = 0
            cols_alive[c] = 0
            vals.append(v)
        pv = nxt
        v += 1
    return vals


# --- streaming sparse echelon over Z/p^K with unit pivots ------------------------

cdef inline int64_t _inv_mod(int64_t a, int64_t m):
    cdef int64_t t = 0, nt = 1, r = m, nr = a % m, q, tmp
    if nr < 0:
        nr += m
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += m
    return t


cdef class _Echelon:
    cdef int64_t modulus, p
    cdef vector[vector[int64_t]] pc
    cdef vector[vector[int64_t]] pv
    cdef vector[char] has
    cdef vector[int64_t] acc
    cdef vector[char] inheap
    cdef priority_queue[int64_t] heap
    cdef vector[int64_t] oc
    cdef vector[int64_t] ov
    cdef Py_ssize_t npiv

    def __cinit__(self, Py_ssize_t ncols, int64_t p, int64_t modulus):
        self.modulus = modulus
        self.p = p
        self.pc.resize(ncols)
        self.pv.resize(ncols)
        self.has.resize(ncols, 0)
        self.acc.resize(ncols, 0)
        self.inheap.resize(ncols, 0)
        self.npiv = 0

    cdef inline void _touch(self, int64_t j, int64_t x):
        cdef int64_t y = (self.acc[j] + x) % self.modulus
        if y < 0:
            y += self.modulus
        self.acc[j] = y
        if y != 0 and not self.inheap[j]:
            self.inheap[j] = 1
            self.heap.push(j)

    cdef int _reduce(self, bint keep_going):
        """Reduce the accumulator; 1 if a pivot was stored, 0 if the rest went to oc/ov."""
        cdef int64_t j, x, f, inv
        cdef Py_ssize_t b
        self.oc.clear()
        self.ov.clear()
        while not self.heap.empty():
            j = self.heap.top()
            self.heap.pop()
            self.inheap[j] = 0
            x = self.acc[j]
            if x == 0:
                continue
            self.acc[j] = 0
            if self.has[j]:
                f = self.modulus - x
                for b in range(<Py_ssize_t>self.pc[j].size()):
                    self._touch(self.pc[j][b], _mulmod(f, self.pv[j][b], self.modulus))
                continue
            if not keep_going and x % self.p != 0 and self.oc.size() == 0:
                inv = _inv_mod(x, self.modulus)
                self.has[j] = 1
                while not self.heap.empty():
                    b = self.heap.top()
                    self.heap.pop()
                    self.inheap[b] = 0
                    if self.acc[b] != 0:
                        self.pc[j].push_back(b)
                        self.pv[j].push_back(_mulmod(self.acc[b], inv, self.modulus))
                        self.acc[b] = 0
                self.npiv += 1
                return 1
            self.oc.push_back(j)
            self.ov.push_back(x)
            if not keep_going:
                while not self.heap.empty():
                    b = self.heap.top()
                    self.heap.pop()
                    self.inheap[b] = 0
                    if self.acc[b] != 0:
                        self.oc.push_back(b)
                        self.ov.push_back(self.acc[b])
                        self.acc[b] = 0
                return 0
        return 0


def sparse_unit_eliminate(indptr, indices, data, Py_ssize_t ncols, int64_t p, int64_t modulus):
    """Streaming echelon with unit pivots; return (pivot count, residual rows)."""
    cdef Py_ssize_t nrows = len(indptr) - 1
    cdef int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef int64_t[::1] dv = np.ascontiguousarray(data, dtype=np.int64)
    cdef Py_ssize_t i, k, a
    cdef _Echelon ech = _Echelon(ncols, p, modulus)
    cdef vector[vector[int64_t]] rc
    cdef vector[vector[int64_t]] rv
    for i in range(nrows):
        for k in range(ip[i], ip[i + 1]):
            ech._touch(ix[k], dv[k])
        if not ech._reduce(False) and ech.oc.size() > 0:
            rc.push_back(ech.oc)
            rv.push_back(ech.ov)
    # pivots found later may still reduce the set-aside rows
    residual = []
    for a in range(<Py_ssize_t>rc.size()):
        for k in range(<Py_ssize_t>rc[a].size()):
            ech._touch(rc[a][k], rv[a][k])
        ech._reduce(True)
        if ech.oc.size() > 0:
            residual.append((
                np.array([ech.oc[k] for k in range(<Py_ssize_t>ech.oc.size())], dtype=np.int64),
                np.array([ech.ov[k] for k in range(<Py_ssize_t>ech.ov.size())], dtype=np.int64),
            ))
    return ech.npiv, residual
