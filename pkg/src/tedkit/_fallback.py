"""Numpy implementations of the compiled kernels, used when the extension is absent."""

from __future__ import annotations

import numpy as np

NEG = -(1 << 62)
LOW = -(1 << 61)


def _clamp(x: np.ndarray) -> np.ndarray:
    x[x < LOW] = NEG
    return x


def maxplus(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    r, inner = A.shape
    c = B.shape[1]
    out = np.full((r, c), NEG, dtype=np.int64)
    if inner == 0 or r == 0 or c == 0:
        return out
    step = max(1, (1 << 22) // max(1, inner * c))
    for i0 in range(0, r, step):
        blk = A[i0 : i0 + step, :, None] + B[None, :, :]
        out[i0 : i0 + step] = _clamp(blk.max(axis=1))
    return out


def _sweep_batch(piF, piG, W, n, m, src_u, src_v):
    k = len(src_u)
    D = np.full((k, n + 2, m + 2), NEG, dtype=np.int64)
    arrivals: list[list[int]] = [[] for _ in range(n + 2)]
    for u0 in range(1, n + 1):
        arrivals[int(piF[u0])].append(u0)
    cols = np.asarray(piG[1 : m + 1], dtype=np.int64)
    wrows = W[:, 1 : m + 1]
    ks = np.arange(k)
    for u in range(1, n + 2):
        row = D[:, u, :]
        if u > 1:
            np.maximum(row, D[:, u - 1, :], out=row)
        for u0 in arrivals[u]:
            w = wrows[u0]
            vals = _clamp(D[:, u0, 1 : m + 1] + w[None, :])
            vals[:, w == NEG] = NEG
            np.maximum.at(row, (slice(None), cols), vals)
        hit = src_u == u
        if hit.any():
            row[ks[hit], src_v[hit]] = np.maximum(row[ks[hit], src_v[hit]], 0)
        np.maximum.accumulate(row, axis=1, out=row)
        # points left of a source column stay unreachable for that source
        mask = np.arange(m + 2)[None, :] < src_v[:, None]
        row[mask] = NEG
        before = (src_u > u)[:, None]
        row[np.broadcast_to(before, row.shape)] = NEG
    return D


def grid_from(piF, piG, W, n, m, a, b):
    D = _sweep_batch(piF, piG, W, n, m, np.array([a]), np.array([b]))
    return D[0]


def grid_border(piF, piG, W, n, m, src_u, src_v, tgt_u, tgt_v):
    S = len(src_u)
    out = np.empty((S, len(tgt_u)), dtype=np.int64)
    step = max(1, (1 << 23) // max(1, (n + 2) * (m + 2)))
    tu = np.asarray(tgt_u)
    tv = np.asarray(tgt_v)
    for s0 in range(0, S, step):
        su = np.asarray(src_u[s0 : s0 + step])
        sv = np.asarray(src_v[s0 : s0 + step])
        D = _sweep_batch(piF, piG, W, n, m, su, sv)
        blk = D[:, tu, tv]
        bad = (tu[None, :] < su[:, None]) | (tv[None, :] < sv[:, None])
        blk[bad] = NEG
        out[s0 : s0 + step] = blk
    return out


def oracle_fill(T, eta, rootF, delF, subF, chF, rootG, delG, subG, chG, rows):
    NY = T.shape[1]
    for X in rows:
        X = int(X)
        T[X, 0] = 0
        rX, dX, sX, cX = int(rootF[X]), int(delF[X]), int(subF[X]), int(chF[X])
        erow = eta[rX]
        for Y in range(1, NY):
            best = T[dX, Y]
            c = T[X, delG[Y]]
            if c > best:
                best = c
            e = erow[rootG[Y]]
            if e != NEG:
                c = e + T[cX, chG[Y]] + T[sX, subG[Y]]
                if c > best:
                    best = c
            T[X, Y] = best
