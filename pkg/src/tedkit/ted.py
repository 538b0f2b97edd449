"""Tree edit distance through spine edit distance.

:func:`all_subtrees_ted` fills ``sim(sub(v), sub(v'))`` for every node pair.
It splits both forests at their heavy spines, recurses on the four pairs of
side forests, completes the spine rows and columns with :func:`sased`, and
finishes the spine pairs with one spine solve.  :func:`ted` attaches virtual
roots so that the whole-forest similarity is a subtree-pair entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bbd import BBDConfig
from .costs import NEG, CostModel, eta_matrix, sim_to_ed
from .fed import augment
from .forest_core import Forest, Spine, heavy_spine, spine_left_right, with_virtual_root
from .minplus import INSTR, backend_module
from .sed import augmented_block, solve_sed, solve_udised

UNBALANCED_RATIO = 4
"""Spine solves go through the unbalanced variant when one side is this many times larger."""

DIRECT_LIMIT = 6
"""Pairs with a side of at most this many nodes are filled by the direct row recurrence."""


@dataclass
class AllSubtreesResult:
    """``table[v, v'] = sim(sub(v), sub(v'))`` by pre-order rank; row and column 0 are unused."""

    table: np.ndarray

    def sim(self, v: int, v2: int) -> int:
        return int(self.table[v, v2])


def _pad(a: np.ndarray) -> np.ndarray:
    out = np.full((a.shape[0] + 1, a.shape[1] + 1), NEG, dtype=np.int64)
    out[1:, 1:] = a
    return out


def direct_subtree_sims(F: Forest, G: Forest, E: np.ndarray) -> np.ndarray:
    """All subtree-pair similarities by the row recurrence over every node of ``F``.

    For each ``v`` (children first) one border sweep over ``ch(v)`` against
    ``G`` gives ``sim(ch v, sub v')`` and ``sim(ch v, ch v')`` for all ``v'``.
    Quadratic sweeps per row, so only used on small inputs.
    """
    n, m = F.n, G.n
    T = np.full((n + 1, m + 1), NEG, dtype=np.int64)
    if n == 0 or m == 0:
        return T
    AF, AG = augment(F), augment(G)
    W = np.full((2 * n + 1, 2 * m + 1), NEG, dtype=np.int64)
    lF, rF, lG, rG = F.lpos, F.rpos, G.lpos, G.rpos
    L = lG[1 : m + 1].astype(np.int64)
    R = rG[1 : m + 1].astype(np.int64)
    kids = G.children
    for v in range(n, 0, -1):
        lo, hi = int(lF[v]) + 1, int(rF[v]) - 1
        rows = hi - lo
        piF, piG, Wb = augmented_block(AF, AG, W, lo, hi, 1, 2 * m + 1)
        su = np.ones(2 * m, dtype=np.int64)
        sv = np.concatenate([L, L + 1])
        tu = np.full(2 * m, rows + 1, dtype=np.int64)
        tv = np.concatenate([R, R - 1])
        tab = backend_module().grid_border(piF, piG, Wb, rows, 2 * m, su, sv, tu, tv)
        INSTR.record_dp(2 * m * (rows + 1) * (2 * m + 1))
        idx = np.arange(m)
        whole, inner = tab[idx, idx], tab[m + idx, m + idx]
        for v2 in range(m, 0, -1):
            best = max(int(whole[v2 - 1]), int(inner[v2 - 1]))
            e = int(E[v, v2])
            if e != NEG:
                best = max(best, e + int(inner[v2 - 1]))
            for c in kids[v2]:
                best = max(best, int(T[v, c]))
            T[v, v2] = best
            W[int(lF[v]), int(lG[v2])] = best
    return T


def _spine_solve(F: Forest, G: Forest, S: Spine, S2: Spine, P: np.ndarray, E: np.ndarray,
                 cfg: BBDConfig) -> np.ndarray:
    """Fill ``S x S'`` in ``P``, dispatching unbalanced shapes to the unbalanced solver."""
    if max(F.n, G.n) >= UNBALANCED_RATIO * min(F.n, G.n):
        if F.n >= G.n:
            return solve_udised(F, G, S, S2, P, cfg, eta=E).sims
        return solve_udised(G, F, S2, S, P.T.copy(), cfg, eta=E.T.copy()).sims.T.copy()
    return solve_sed(F, G, S, S2, P, cfg, eta=E).sims


def _side(G: Forest, ranks: list[int]) -> tuple[np.ndarray, Forest]:
    idx = np.asarray(ranks, dtype=np.int64)
    return idx, G.induced(idx)


def sased(F: Forest, G: Forest, S: Spine, sims: np.ndarray, cfg: BBDConfig = BBDConfig(), *,
          eta: np.ndarray) -> AllSubtreesResult:
    """Complete ``sim(sub(v), sub(v'))`` for ``v`` on ``S`` given all pairs off ``S``.

    ``G`` is split at its heavy spine; the spine rows against the two side
    forests come from recursive calls, then one spine solve fills the rest.
    """
    P = np.array(sims, dtype=np.int64)
    E = np.asarray(eta, dtype=np.int64)
    if G.n == 0 or F.n == 0:
        return AllSubtreesResult(P)
    if min(F.n, G.n) <= DIRECT_LIMIT:
        return AllSubtreesResult(direct_subtree_sims(F, G, E))
    S2 = heavy_spine(G)
    for ranks in spine_left_right(G, S2):
        if not ranks:
            continue
        idx, H = _side(G, ranks)
        cols = np.concatenate([[0], idx])
        sub = sased(F, H, S, P[:, cols], cfg, eta=E[:, cols]).table
        P[:, idx] = sub[:, 1:]
    return AllSubtreesResult(_spine_solve(F, G, S, S2, P, E, cfg))


def _all_subtrees(F: Forest, G: Forest, E: np.ndarray, cfg: BBDConfig) -> np.ndarray:
    if F.n == 0 or G.n == 0:
        return np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    if min(F.n, G.n) <= DIRECT_LIMIT:
        return direct_subtree_sims(F, G, E)
    S, S2 = heavy_spine(F), heavy_spine(G)
    sides = [r for r in spine_left_right(F, S) if r]
    sides2 = [r for r in spine_left_right(G, S2) if r]
    P = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    for a in sides:
        ia, A = _side(F, a)
        for b in sides2:
            ib, B = _side(G, b)
            sub = _all_subtrees(A, B, _pad(E[np.ix_(ia, ib)]), cfg)
            P[np.ix_(ia, ib)] = sub[1:, 1:]
    rows_all = np.arange(F.n + 1)
    for b in sides2:
        ib, B = _side(G, b)
        cols = np.concatenate([[0], ib])
        sub = sased(F, B, S, P[np.ix_(rows_all, cols)], cfg, eta=E[:, cols]).table
        P[:, ib] = sub[:, 1:]
    cols_all = np.arange(G.n + 1)
    for a in sides:
        ia, A = _side(F, a)
        rows = np.concatenate([[0], ia])
        sub = sased(G, A, S2, P[np.ix_(rows, cols_all)].T.copy(), cfg, eta=E[rows, :].T.copy()).table
        P[ia, :] = sub.T[1:, :]
    return _spine_solve(F, G, S, S2, P, E, cfg)


def all_subtrees_ted(F: Forest, G: Forest, m: CostModel, cfg: BBDConfig = BBDConfig()) -> AllSubtreesResult:
    """``sim(sub(v), sub(v'))`` for every ``(v, v')`` in ``F x G``."""
    return AllSubtreesResult(_all_subtrees(F, G, eta_matrix(m, F, G), cfg))


def rooted_eta(m: CostModel, F: Forest, G: Forest) -> tuple[Forest, Forest, np.ndarray]:
    """Both forests under virtual roots, with the roots matchable only to each other at weight 0."""
    T, T2 = with_virtual_root(F), with_virtual_root(G)
    E = np.full((T.n + 1, T2.n + 1), NEG, dtype=np.int64)
    E[2:, 2:] = eta_matrix(m, F, G)[1:, 1:]
    E[1, 1] = 0
    return T, T2, E


def ted_sim(F: Forest, G: Forest, m: CostModel, cfg: BBDConfig = BBDConfig()) -> int:
    """``sim(F, G)``, read as the virtual-root pair entry."""
    if F.n == 0 or G.n == 0:
        return 0
    T, T2, E = rooted_eta(m, F, G)
    return int(_all_subtrees(T, T2, E, cfg)[1, 1])


def ted(F: Forest, G: Forest, m: CostModel, cfg: BBDConfig = BBDConfig()) -> int:
    """Tree edit distance between two forests."""
    return sim_to_ed(m, F, G, ted_sim(F, G, m, cfg))


__all__ = [
    "AllSubtreesResult",
    "DIRECT_LIMIT",
    "UNBALANCED_RATIO",
    "all_subtrees_ted",
    "direct_subtree_sims",
    "rooted_eta",
    "sased",
    "ted",
    "ted_sim",
]
