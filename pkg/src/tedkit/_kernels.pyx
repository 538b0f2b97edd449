# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Arrays are int64 with NEG encoding minus infinity."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

cdef int64_t NEG = -(1 << 62)


def maxplus(const int64_t[:, :] A, const int64_t[:, :] B):
    """``C[i, j] = max_k A[i, k] + B[k, j]`` with NEG absorbing."""
    cdef Py_ssize_t r = A.shape[0], inner = A.shape[1], c = B.shape[1]
    cdef Py_ssize_t i, k, j
    cdef int64_t a, b, s
    out = np.full((r, c), NEG, dtype=np.int64)
    cdef int64_t[:, :] C = out
    for i in range(r):
        for k in range(inner):
            a = A[i, k]
            if a == NEG:
                continue
            for j in range(c):
                b = B[k, j]
                if b != NEG:
                    s = a + b
                    if s > C[i, j]:
                        C[i, j] = s
    return out


cdef void _sweep(const int64_t[:] piF, const int64_t[:] piG, const int64_t[:, :] W,
                 int64_t[:, :] D, Py_ssize_t n, Py_ssize_t m, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t u, v, pu, pv
    cdef int64_t d, w, s
    for u in range(a, n + 2):
        for v in range(b, m + 2):
            D[u, v] = NEG
    D[a, b] = 0
    for u in range(a, n + 2):
        for v in range(b, m + 2):
            d = D[u, v]
            if d == NEG:
                continue
            if u <= n:
                if d > D[u + 1, v]:
                    D[u + 1, v] = d
                if v <= m:
                    w = W[u, v]
                    if w != NEG:
                        s = d + w
                        pu = piF[u]
                        pv = piG[v]
                        if s > D[pu, pv]:
                            D[pu, pv] = s
            if v <= m and d > D[u, v + 1]:
                D[u, v + 1] = d


def grid_from(const int64_t[:] piF, const int64_t[:] piG, const int64_t[:, :] W,
              Py_ssize_t n, Py_ssize_t m, Py_ssize_t a, Py_ssize_t b):
    """Longest distances from ``(a, b)`` to every grid point, shape ``(n+2, m+2)``."""
    out = np.full((n + 2, m + 2), NEG, dtype=np.int64)
    cdef int64_t[:, :] D = out
    with nogil:
        _sweep(piF, piG, W, D, n, m, a, b)
    return out


def grid_border(const int64_t[:] piF, const int64_t[:] piG, const int64_t[:, :] W,
                Py_ssize_t n, Py_ssize_t m, const int64_t[:] src_u, const int64_t[:] src_v,
                const int64_t[:] tgt_u, const int64_t[:] tgt_v):
    """Distances from each listed source to each listed target."""
    cdef Py_ssize_t S = src_u.shape[0], T = tgt_u.shape[0], s, t
    out = np.empty((S, T), dtype=np.int64)
    cdef int64_t[:, :] R = out
    buf = np.empty((n + 2, m + 2), dtype=np.int64)
    cdef int64_t[:, :] D = buf
    with nogil:
        for s in range(S):
            _sweep(piF, piG, W, D, n, m, src_u[s], src_v[s])
            for t in range(T):
                if tgt_u[t] < src_u[s] or tgt_v[t] < src_v[s]:
                    R[s, t] = NEG
                else:
                    R[s, t] = D[tgt_u[t], tgt_v[t]]
    return out


def oracle_fill(int64_t[:, :] T, const int64_t[:, :] eta,
                const int64_t[:] rootF, const int64_t[:] delF, const int64_t[:] subF, const int64_t[:] chF,
                const int64_t[:] rootG, const int64_t[:] delG, const int64_t[:] subG, const int64_t[:] chG,
                const int64_t[:] rows):
    """Fill rows of the canonical-set table in the given order (all columns)."""
    cdef Py_ssize_t NY = T.shape[1], idx, X, Y
    cdef int64_t best, c, e
    with nogil:
        for idx in range(rows.shape[0]):
            X = rows[idx]
            T[X, 0] = 0
            for Y in range(1, NY):
                best = T[delF[X], Y]
                c = T[X, delG[Y]]
                if c > best:
                    best = c
                e = eta[rootF[X], rootG[Y]]
                if e != NEG:
                    c = e + T[chF[X], chG[Y]] + T[subF[X], subG[Y]]
                    if c > best:
                        best = c
                T[X, Y] = best
