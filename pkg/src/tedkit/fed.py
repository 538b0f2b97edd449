"""Forest edit distance families from subtree similarities.

Every interval ``F[x..y)`` must map to a pair of grid columns.  A forest's own
alignment graph only offers one column per node, which is enough for
intervals ending at an opening position but not for those ending at a
closing one.  The solvers therefore run on marker-augmented forests: each
node gets an extra leaf as its last child, with weight ``NEG_INF`` against
everything.  In the augmented forest, pre-order rank equals bi-order
position of the original, so interval endpoints map to columns one to one.
Markers can never be matched, so similarities are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .alignment_graph import AlignGraph, src_index, tgt_index
from .bbd import BBDConfig, SolveStats, solve_bbd, solve_lrbbd
from .costs import NEG, ExtValue, from_ext
from .forest_core import Forest, reverse, reverse_ranks

SubtreeSims = Union[np.ndarray, Callable[[int, int], ExtValue]]


def augment(F: Forest) -> Forest:
    """``F`` with a marker leaf appended under every node; rank ``p`` is bi-order position ``p``."""
    labels: list[str] = []
    parents: list[int] = []
    for p in range(1, 2 * F.n + 1):
        v = int(F.biorder[p])
        labels.append(F.label(v))
        if F.opens[p]:
            u = int(F.parent[v])
            parents.append(int(F.lpos[u]) if u else 0)
        else:
            parents.append(int(F.lpos[v]))
    return Forest(labels, parents)


def _sims_array(s: SubtreeSims, F: Forest, G: Forest) -> np.ndarray:
    if isinstance(s, np.ndarray):
        if s.shape != (F.n + 1, G.n + 1):
            raise ValueError(f"subtree similarities must have shape {(F.n + 1, G.n + 1)}")
        return np.asarray(s, dtype=np.int64)
    out = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    for i in range(1, F.n + 1):
        for j in range(1, G.n + 1):
            out[i, j] = from_ext(s(i, j))
    return out


def augmented_graph(F: Forest, G: Forest, sims: SubtreeSims) -> AlignGraph:
    """Alignment graph of the augmented forests with ``w`` from ``sims`` on real nodes."""
    S = _sims_array(sims, F, G)
    W = np.full((2 * F.n + 1, 2 * G.n + 1), NEG, dtype=np.int64)
    if F.n and G.n:
        W[np.ix_(F.lpos[1 : F.n + 1], G.lpos[1 : G.n + 1])] = S[1:, 1:]
    return AlignGraph(augment(F), augment(G), W)


def _unweighted_cfg(cfg: BBDConfig, F: Forest, G: Forest, unweighted: bool) -> BBDConfig:
    if not unweighted or cfg.unweighted_diameter is not None:
        return cfg
    return BBDConfig(cfg.alpha, cfg.base_limit, cfg.kernel, 2 * min(F.n, G.n), cfg.tile)


@dataclass
class FedOutput:
    """The four similarity families, as encoded arrays indexed by bi-order positions.

    ``whole_vs_infix_F[x, y] = sim(F[x..y), G)``;
    ``suffix_vs_prefix[x, y2] = sim(F[x..2n+1), G[1..y2))``;
    ``whole_vs_infix_G[x2, y2] = sim(F, G[x2..y2))``;
    ``prefix_vs_suffix[y, x2] = sim(F[1..y), G[x2..2n'+1))``.
    Index 0 and reversed intervals hold ``NEG``.
    """

    whole_vs_infix_F: np.ndarray
    suffix_vs_prefix: np.ndarray
    whole_vs_infix_G: np.ndarray
    prefix_vs_suffix: np.ndarray


@dataclass
class UfedOutput:
    """The three unbalanced families; the quadratic ``whole_vs_infix_F`` is absent by design."""

    whole_vs_infix_G: np.ndarray
    prefix_vs_suffix: np.ndarray
    suffix_vs_prefix: np.ndarray


def _upper(a: np.ndarray) -> np.ndarray:
    """Blank out row/column 0 and the entries with ``x > y``."""
    a[0, :] = NEG
    a[:, 0] = NEG
    a[np.tril_indices(a.shape[0], -1)] = NEG
    return a


def _families(table: np.ndarray, N: int, M: int, left_only: bool):
    """Read the families off a border table on the ``N x M`` augmented grid."""
    pos = np.arange(1, N + 2)
    pos2 = np.arange(1, M + 2)
    out = {}
    left = src_index(N, M, np.ones_like(pos2), pos2)
    right = tgt_index(N, M, np.full_like(pos2, N + 1), pos2)
    top = tgt_index(N, M, pos, np.full_like(pos, M + 1))
    g = np.full((M + 2, M + 2), NEG, dtype=np.int64)
    g[1:, 1:] = table[np.ix_(left, right)]
    out["whole_vs_infix_G"] = _upper(g)
    p = np.full((N + 2, M + 2), NEG, dtype=np.int64)
    p[1:, 1:] = table[np.ix_(left, top)].T
    out["prefix_vs_suffix"] = p
    if not left_only:
        bottom = src_index(N, M, pos, np.ones_like(pos))
        f = np.full((N + 2, N + 2), NEG, dtype=np.int64)
        f[1:, 1:] = table[np.ix_(bottom, top)]
        out["whole_vs_infix_F"] = _upper(f)
        s = np.full((N + 2, M + 2), NEG, dtype=np.int64)
        s[1:, 1:] = table[np.ix_(bottom, right)]
        out["suffix_vs_prefix"] = s
    return out


def solve_fed(F: Forest, G: Forest, subtree_sims: SubtreeSims, cfg: BBDConfig = BBDConfig(),
              unweighted: bool = False, stats: SolveStats | None = None) -> FedOutput:
    """All four families with one border-to-border solve on the augmented graph.

    Parameters
    ----------
    subtree_sims
        ``sim(sub(v), sub(v'))`` for every node pair, as an ``(n+1) x (n'+1)``
        encoded array or a callable on ranks.
    unweighted
        Bound the monotone kernel's entries by ``2 min(n, n')``.
    """
    g = augmented_graph(F, G, subtree_sims)
    res = solve_bbd(g, cfg=_unweighted_cfg(cfg, F, G, unweighted), stats=stats)
    fam = _families(res.table, g.n, g.m, left_only=False)
    return FedOutput(fam["whole_vs_infix_F"], fam["suffix_vs_prefix"], fam["whole_vs_infix_G"], fam["prefix_vs_suffix"])


def solve_ufed(F: Forest, G: Forest, subtree_sims: SubtreeSims, cfg: BBDConfig = BBDConfig(),
               unweighted: bool = False, stats: SolveStats | None = None) -> UfedOutput:
    """Three families from left-border solves; the third via the reversed forests."""
    S = _sims_array(subtree_sims, F, G)
    cfg = _unweighted_cfg(cfg, F, G, unweighted)
    g = augmented_graph(F, G, S)
    fam = _families(solve_lrbbd(g, cfg=cfg, stats=stats).table, g.n, g.m, left_only=True)
    rf, rg = reverse_ranks(F), reverse_ranks(G)
    RS = np.full_like(S, NEG)
    RS[np.ix_(rf, rg)] = S
    RS[0, :] = NEG
    RS[:, 0] = NEG
    F2, G2 = reverse(F), reverse(G)
    g2 = augmented_graph(F2, G2, RS)
    fam2 = _families(solve_lrbbd(g2, cfg=cfg, stats=stats).table, g2.n, g2.m, left_only=True)
    # sim(F[x..), G[..y')) = sim(rev F[..2n+2-x), rev G[2n'+2-y'..))
    n2, m2 = 2 * F.n + 2, 2 * G.n + 2
    rev = fam2["prefix_vs_suffix"]
    suf = np.full((n2, m2), NEG, dtype=np.int64)
    x = np.arange(1, n2)
    y = np.arange(1, m2)
    suf[1:, 1:] = rev[np.ix_(n2 - x, m2 - y)]
    return UfedOutput(fam["whole_vs_infix_G"], fam["prefix_vs_suffix"], suf)


__all__ = [
    "FedOutput",
    "UfedOutput",
    "augment",
    "augmented_graph",
    "solve_fed",
    "solve_ufed",
]
