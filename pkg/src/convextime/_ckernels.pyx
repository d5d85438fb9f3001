# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

import numpy as np

from libc.math cimport fabs, NAN

cdef int OPTIMAL = 0
cdef int UNBOUNDED = 1
cdef int ITERATION_LIMIT = 2
cdef double RATIO_TIE = 1e-12
cdef double GROWTH_CAP = 2.0 ** 60


def simplex_iterate(double[:, ::1] T, long[::1] basis, Py_ssize_t ncols,
                    long max_iter, double tol):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t width = T.shape[1]
    cdef Py_ssize_t i, j, k, r
    cdef long it = 0
    cdef double best, ratio, piv, f, slack
    while True:
        j = -1
        for k in range(ncols):
            if T[m, k] < -tol:
                j = k
                break
        if j < 0:
            return OPTIMAL, it, -1
        if it >= max_iter:
            return ITERATION_LIMIT, it, -1
        r = -1
        best = 0.0
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, rhs] / T[i, j]
                if r < 0 or ratio < best:
                    best = ratio
                    r = i
        if r < 0:
            return UNBOUNDED, it, j
        slack = RATIO_TIE * (fabs(best) if fabs(best) > 1.0 else 1.0)
        for i in range(m):
            if T[i, j] > tol:
                ratio = T[i, rhs] / T[i, j]
                if ratio <= best + slack and basis[i] < basis[r]:
                    r = i
        piv = T[r, j]
        for k in range(width):
            T[r, k] /= piv
        for i in range(m + 1):
            if i == r:
                continue
            f = T[i, j]
            if f != 0.0:
                for k in range(width):
                    T[i, k] -= f * T[r, k]
            T[i, j] = 0.0
        T[r, j] = 1.0
        basis[r] = j
        it += 1


cdef inline bint _member(const double[:, ::1] A, const double[::1] b, const double[:, ::1] AX,
                         Py_ssize_t p, double t):
    cdef Py_ssize_t i
    for i in range(A.shape[0]):
        if AX[p, i] > t * b[i]:
            return False
    return True


def bisect_hgauge(A, b, X, double tol):
    cdef const double[:, ::1] Am = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] bm = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[:, ::1] AX = np.ascontiguousarray(
        np.asarray(X, dtype=np.float64) @ np.asarray(Am).T)
    cdef Py_ssize_t npts = AX.shape[0]
    out_arr = np.zeros(npts)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t p
    cdef double lo, hi, mid
    for p in range(npts):
        if _member(Am, bm, AX, p, tol):
            out[p] = 0.0
            continue
        hi = 1.0
        lo = tol
        while not _member(Am, bm, AX, p, hi):
            lo = hi
            hi *= 2.0
            if hi > GROWTH_CAP:
                break
        if hi > GROWTH_CAP:
            out[p] = NAN
            continue
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _member(Am, bm, AX, p, mid):
                hi = mid
            else:
                lo = mid
        out[p] = 0.5 * (lo + hi)
    return out_arr
