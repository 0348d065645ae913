# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for Louvain local moving and the assignment solver.

Operation order mirrors ``_pykernels.py`` exactly; results are identical.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND = "cython"


def louvain_local_move(const cnp.int64_t[::1] indptr,
                       const cnp.int64_t[::1] indices,
                       const double[::1] weights,
                       const double[::1] k,
                       const cnp.int64_t[::1] order,
                       double resolution,
                       double m2,
                       Py_ssize_t max_passes):
    cdef Py_ssize_t n = k.shape[0]
    comm_arr = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] comm = comm_arr
    cdef double[::1] tot = np.array(k, dtype=np.float64)
    cdef double[::1] neigh_w = np.zeros(n, dtype=np.float64)
    cdef unsigned char[::1] seen = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] touched = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t ntouched, t, p, idx, passes
    cdef cnp.int64_t i, j, c, ci, best
    cdef double ki, own_w, best_gain, gain
    cdef long moved = 0, pass_moves

    with nogil:
        for passes in range(max_passes):
            pass_moves = 0
            for idx in range(order.shape[0]):
                i = order[idx]
                ci = comm[i]
                ki = k[i]
                ntouched = 0
                for p in range(indptr[i], indptr[i + 1]):
                    j = indices[p]
                    if j == i:
                        continue
                    c = comm[j]
                    if not seen[c]:
                        seen[c] = 1
                        neigh_w[c] = 0.0
                        touched[ntouched] = c
                        ntouched += 1
                    neigh_w[c] += weights[p]
                tot[ci] -= ki
                if seen[ci]:
                    own_w = neigh_w[ci]
                else:
                    own_w = 0.0
                best = ci
                best_gain = own_w - resolution * tot[ci] * ki / m2
                for t in range(ntouched):
                    c = touched[t]
                    gain = neigh_w[c] - resolution * tot[c] * ki / m2
                    if gain > best_gain:
                        best_gain = gain
                        best = c
                tot[best] += ki
                for t in range(ntouched):
                    seen[touched[t]] = 0
                if best != ci:
                    comm[i] = best
                    pass_moves += 1
            moved += pass_moves
            if pass_moves == 0:
                break
    return comm_arr, moved


cdef inline bint _less(double a0, double a1, double b0, double b1) noexcept nogil:
    return a0 < b0 or (a0 == b0 and a1 < b1)


def lap_max_lex(w, card):
    cdef Py_ssize_t n = w.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 2)), np.zeros((0, 2))
    cdef double[:, ::1] c0 = np.ascontiguousarray(-np.asarray(w, dtype=np.float64))
    cdef double[:, ::1] c1 = np.ascontiguousarray(-np.asarray(card, dtype=np.float64))
    cdef double[::1] u0 = np.zeros(n + 1)
    cdef double[::1] u1 = np.zeros(n + 1)
    cdef double[::1] v0 = np.zeros(n + 1)
    cdef double[::1] v1 = np.zeros(n + 1)
    cdef double[::1] min0 = np.empty(n + 1)
    cdef double[::1] min1 = np.empty(n + 1)
    cdef cnp.int64_t[::1] p = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] way = np.zeros(n + 1, dtype=np.int64)
    cdef unsigned char[::1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double d0, d1, r0, r1

    with nogil:
        for i in range(1, n + 1):
            p[0] = i
            j0 = 0
            for j in range(n + 1):
                min0[j] = INFINITY
                min1[j] = INFINITY
                used[j] = 0
            while True:
                used[j0] = 1
                i0 = p[j0]
                d0 = INFINITY
                d1 = INFINITY
                j1 = 0
                for j in range(1, n + 1):
                    if not used[j]:
                        r0 = c0[i0 - 1, j - 1] - u0[i0] - v0[j]
                        r1 = c1[i0 - 1, j - 1] - u1[i0] - v1[j]
                        if _less(r0, r1, min0[j], min1[j]):
                            min0[j] = r0
                            min1[j] = r1
                            way[j] = j0
                        if _less(min0[j], min1[j], d0, d1):
                            d0 = min0[j]
                            d1 = min1[j]
                            j1 = j
                for j in range(n + 1):
                    if used[j]:
                        u0[p[j]] += d0
                        u1[p[j]] += d1
                        v0[j] -= d0
                        v1[j] -= d1
                    else:
                        min0[j] -= d0
                        min1[j] -= d1
                j0 = j1
                if p[j0] == 0:
                    break
            while True:
                j1 = way[j0]
                p[j0] = p[j1]
                j0 = j1
                if j0 == 0:
                    break

    row_to_col = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    u = np.column_stack([np.asarray(u0)[1:], np.asarray(u1)[1:]])
    v = np.column_stack([np.asarray(v0)[1:], np.asarray(v1)[1:]])
    return row_to_col, u, v
