# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled DP kernels: NW score-grid fill and cyclic correspondence scan.

Must stay result-identical to ``_pure``; the float scan in
``cyclic_best_offset`` mirrors the numpy prefix-min formulation so both
backends agree bitwise.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def nw_fill(const cnp.uint8_t[::1] s1, const cnp.uint8_t[::1] s2,
            const cnp.int64_t[:, ::1] sub, cnp.int64_t gap):
    cdef Py_ssize_t n = s2.shape[0]
    cdef Py_ssize_t m = s1.shape[0]
    out = np.zeros((n + 1, m + 1), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] F = out
    cdef Py_ssize_t i, j
    cdef cnp.int64_t d, u, l, best
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d = F[i - 1, j - 1] + sub[s2[i - 1], s1[j - 1]]
            u = F[i - 1, j] + gap
            l = F[i, j - 1] + gap
            best = d
            if u > best:
                best = u
            if l > best:
                best = l
            F[i, j] = best
    return out


def nw_score(const cnp.uint8_t[::1] s1, const cnp.uint8_t[::1] s2,
             const cnp.int64_t[:, ::1] sub, cnp.int64_t gap):
    cdef Py_ssize_t n = s2.shape[0]
    cdef Py_ssize_t m = s1.shape[0]
    if n == 0 or m == 0:
        return 0
    row_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] row = row_arr
    cdef Py_ssize_t i, j
    cdef cnp.int64_t diag, d, u, l, best
    for i in range(1, n + 1):
        diag = row[0]
        row[0] = 0
        for j in range(1, m + 1):
            d = diag + sub[s2[i - 1], s1[j - 1]]
            u = row[j] + gap
            l = row[j - 1] + gap
            best = d
            if u > best:
                best = u
            if l > best:
                best = l
            diag = row[j]
            row[j] = best
    return int(row[m])


def cyclic_best_offset(const double[:, ::1] cost, double skip):
    cdef Py_ssize_t n = cost.shape[0]
    cdef Py_ssize_t m = cost.shape[1]
    row_arr = np.empty(m + 1, dtype=np.float64)
    q_arr = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] row = row_arr
    cdef double[::1] q = q_arr
    cdef Py_ssize_t offset, i, j, jr
    cdef Py_ssize_t best_offset = 0
    cdef double best_total = np.inf
    cdef double a, b, running, t, total
    for offset in range(m):
        for j in range(m + 1):
            row[j] = j * skip
        for i in range(1, n + 1):
            q[0] = i * skip
            for j in range(1, m + 1):
                jr = (j - 1 + offset) % m
                a = row[j - 1] + cost[i - 1, jr]
                b = row[j] + skip
                q[j] = a if a < b else b
            # prefix-min scan over q[j] - j*skip, same order as numpy
            running = q[0] - 0.0
            row[0] = running + 0.0
            for j in range(1, m + 1):
                t = q[j] - j * skip
                if t < running:
                    running = t
                row[j] = running + j * skip
        total = row[m]
        if total < best_total:
            best_total = total
            best_offset = offset
    return best_offset, best_total
