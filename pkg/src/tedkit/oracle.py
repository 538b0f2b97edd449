"""Reference similarities: an all-subforest-pairs DP and brute-force mapping enumeration.

The DP works on canonical subforests.  Every bi-order interval ``F[x..y)``
is identified with the node set it denotes, keyed by ``(min lpos, max rpos)``.
For a non-empty set ``X`` with leftmost root ``v``::

    T[X][Y] = max(T[X - v][Y], T[X][Y - v'],
                  eta(v, v') + T[ch v][ch v'] + T[X - sub v][Y - sub v'])

Sets are numbered by size so every right-hand side is filled first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .costs import NEG, CostModel, ExtValue, eta_matrix, sim_to_ed, to_ext
from .forest_core import Forest
from .minplus import INSTR, backend_module

DEFAULT_CELL_LIMIT = 400_000_000
"""Largest table (cells) the dense mode will allocate."""


class OracleLimitError(ValueError):
    """Raised when an input exceeds the oracle's size limit."""


class CanonicalSets:
    """Distinct node sets of all bi-order intervals of one forest.

    Attributes
    ----------
    canon
        ``canon[x, y]`` is the id of ``F[x..y)``; id 0 is the empty set.
    root, dele, sub, ch
        Per id: leftmost root, and the ids of ``X - v``, ``X - sub(v)`` and
        ``sub(v) - v``.  Entries for id 0 are 0.
    size
        Node count per id; ids are ordered by size.
    node
        ``node[v]`` is the id of ``sub(v)``.
    """

    def __init__(self, F: Forest):
        n = F.n
        L, R, seq, opens = F.lpos, F.rpos, F.biorder, F.opens
        top = 2 * n + 1
        raw = np.zeros((top + 1, top + 1), dtype=np.int64)
        keys: dict[tuple[int, int], int] = {}
        counts: list[int] = [0]
        key_list: list[tuple[int, int]] = [(0, 0)]
        for x in range(1, top + 1):
            ml = 0
            mr = 0
            cnt = 0
            for y in range(x + 1, top + 1):
                p = y - 1
                if not opens[p]:
                    v = int(seq[p])
                    if L[v] >= x:
                        cnt += 1
                        if ml == 0 or L[v] < ml:
                            ml = int(L[v])
                        mr = int(R[v])
                if cnt:
                    k = keys.get((ml, mr))
                    if k is None:
                        k = len(key_list)
                        keys[(ml, mr)] = k
                        key_list.append((ml, mr))
                        counts.append(cnt)
                    raw[x, y] = k
        order = np.argsort(np.asarray(counts), kind="stable")
        relabel = np.empty(len(order), dtype=np.int64)
        relabel[order] = np.arange(len(order))
        self.canon = relabel[raw]
        self.count = len(key_list)
        self.size = np.asarray(counts, dtype=np.int64)[order]
        self.keys = [key_list[i] for i in order]
        self.root = np.zeros(self.count, dtype=np.int64)
        self.dele = np.zeros(self.count, dtype=np.int64)
        self.sub = np.zeros(self.count, dtype=np.int64)
        self.ch = np.zeros(self.count, dtype=np.int64)
        for i in range(1, self.count):
            lo, hi = self.keys[i]
            v = int(seq[lo])
            self.root[i] = v
            self.dele[i] = self.canon[lo + 1, hi]
            self.sub[i] = self.canon[R[v], hi]
            self.ch[i] = self.canon[lo + 1, R[v] - 1]
        self.node = np.zeros(n + 1, dtype=np.int64)
        for v in range(1, n + 1):
            self.node[v] = self.canon[L[v], R[v]]

    def closure(self, ids: np.ndarray) -> np.ndarray:
        """All ids reachable from ``ids`` through ``dele``, ``sub`` and ``ch``, sorted."""
        seen = np.zeros(self.count, dtype=bool)
        stack = [int(i) for i in np.unique(ids)]
        while stack:
            i = stack.pop()
            if seen[i]:
                continue
            seen[i] = True
            if i:
                stack.extend((int(self.dele[i]), int(self.sub[i]), int(self.ch[i])))
        return np.nonzero(seen)[0]


@dataclass
class SimTable:
    """Similarities of subforest pairs of ``F`` and ``G``.

    In dense mode every row is filled at construction.  In sparse mode a row
    (a canonical subforest of ``F``) is filled on first use together with the
    rows it depends on.
    """

    F: Forest
    G: Forest
    table: np.ndarray
    cf: CanonicalSets
    cg: CanonicalSets
    eta: np.ndarray
    filled: np.ndarray

    def _ensure(self, rows: np.ndarray) -> None:
        rows = np.asarray(rows, dtype=np.int64).ravel()
        missing = rows[~self.filled[rows]]
        if not len(missing):
            return
        need = self.cf.closure(missing)
        need = need[~self.filled[need]]
        _fill(self, need)

    def sim(self, x: int, y: int, x2: int, y2: int) -> ExtValue:
        """``sim(F[x..y), G[x2..y2))``."""
        r = int(self.cf.canon[x, y])
        self._ensure(np.array([r]))
        return to_ext(self.table[r, self.cg.canon[x2, y2]])

    def sims(self, x, y, x2, y2) -> np.ndarray:
        """Vectorised encoded lookup; arguments broadcast."""
        r = self.cf.canon[x, y]
        self._ensure(np.asarray(r))
        return self.table[r, self.cg.canon[x2, y2]]

    def node(self, v: int, v2: int) -> ExtValue:
        """``sim(sub(v), sub(v2))``."""
        return self.sim(int(self.F.lpos[v]), int(self.F.rpos[v]), int(self.G.lpos[v2]), int(self.G.rpos[v2]))

    def node_table(self) -> np.ndarray:
        """Encoded ``(n+1) x (n'+1)`` array of subtree-pair similarities; row/column 0 hold 0."""
        self._ensure(self.cf.node)
        out = self.table[np.ix_(self.cf.node, self.cg.node)].copy()
        return out

    def full(self) -> ExtValue:
        return self.sim(1, 2 * self.F.n + 1, 1, 2 * self.G.n + 1)

    @cached_property
    def cells(self) -> int:
        return self.table.size


def _fill(t: SimTable, rows: np.ndarray) -> None:
    rows = np.sort(rows[rows > 0])
    cf, cg = t.cf, t.cg
    _k = backend_module()
    _k.oracle_fill(t.table, t.eta, cf.root, cf.dele, cf.sub, cf.ch, cg.root, cg.dele, cg.sub, cg.ch, rows)
    INSTR.record_dp(len(rows) * max(0, cg.count - 1))
    t.filled[rows] = True


def all_pairs_sim(F: Forest, G: Forest, m: CostModel, *, sparse: bool = False,
                  cell_limit: int = DEFAULT_CELL_LIMIT) -> SimTable:
    """Similarity of every subforest pair.

    Parameters
    ----------
    sparse
        Fill rows lazily, only for the subforests of ``F`` actually queried.
    cell_limit
        Maximum table size; larger inputs raise :class:`OracleLimitError`.
    """
    cf = CanonicalSets(F)
    cg = CanonicalSets(G)
    if cf.count * cg.count > cell_limit:
        raise OracleLimitError(f"table of {cf.count} x {cg.count} cells exceeds limit {cell_limit}")
    table = np.zeros((cf.count, cg.count), dtype=np.int64)
    filled = np.zeros(cf.count, dtype=bool)
    filled[0] = True
    t = SimTable(F, G, table, cf, cg, eta_matrix(m, F, G), filled)
    if not sparse:
        _fill(t, np.arange(cf.count))
    return t


def ted_reference(F: Forest, G: Forest, m: CostModel) -> int:
    """Edit distance from the full-range entry of :func:`all_pairs_sim`."""
    return sim_to_ed(m, F, G, all_pairs_sim(F, G, m).full())


# -- brute force -------------------------------------------------------------

ENUM_LIMIT = 12


def enum_mappings_sim(F: Forest, G: Forest, m: CostModel) -> ExtValue:
    """Best total match weight over all valid mappings, by exhaustive search.

    A mapping is a partial injection that preserves ancestry in both
    directions and the left-to-right order of incomparable nodes.
    """
    if F.n + G.n > ENUM_LIMIT:
        raise OracleLimitError(f"enumeration limited to {ENUM_LIMIT} nodes in total")
    anc_f = _ancestry(F)
    anc_g = _ancestry(G)
    w = eta_matrix(m, F, G)
    best = 0

    def consistent(pairs, v, v2) -> bool:
        for a, a2 in pairs:
            if anc_f[a][v] != anc_g[a2][v2] or anc_f[v][a] != anc_g[v2][a2]:
                return False
            # pre-order comparison; ranks are pre-order
            if (a < v) != (a2 < v2):
                return False
        return True

    def search(v: int, pairs: list[tuple[int, int]], used: set[int], total: int) -> None:
        nonlocal best
        if v > F.n:
            best = max(best, total)
            return
        search(v + 1, pairs, used, total)
        for v2 in range(1, G.n + 1):
            if v2 in used or w[v, v2] == NEG or not consistent(pairs, v, v2):
                continue
            pairs.append((v, v2))
            used.add(v2)
            search(v + 1, pairs, used, total + int(w[v, v2]))
            used.discard(v2)
            pairs.pop()

    search(1, [], set(), 0)
    return best


def _ancestry(F: Forest) -> list[list[bool]]:
    """``anc[a][b]`` is true when ``a`` is a proper ancestor of ``b``."""
    anc = [[False] * (F.n + 1) for _ in range(F.n + 1)]
    for b in range(1, F.n + 1):
        for a in F.ancestors(b):
            anc[a][b] = True
    return anc


def superadditive_split(t: SimTable, x: int, y: int, x2: int, y2: int, z: int, z2: int) -> bool:
    """Check ``sim[x..y) >= sim[x..z) + sim[z..y)`` on both sides."""
    whole = t.sims(x, y, x2, y2)
    left = t.sims(x, z, x2, z2)
    right = t.sims(z, y, z2, y2)
    return bool(whole >= left + right)


__all__ = [
    "CanonicalSets",
    "OracleLimitError",
    "SimTable",
    "all_pairs_sim",
    "enum_mappings_sim",
    "superadditive_split",
    "ted_reference",
]
