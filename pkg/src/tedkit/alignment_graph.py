"""Forest alignment graphs and their border-to-border longest distances.

The grid has a point ``(u, u')`` for ``u`` in ``1..n+1`` (first forest,
horizontal axis) and ``u'`` in ``1..n'+1`` (second forest, vertical axis).
Edges go right and up with weight 0, and diagonally from ``(u, u')`` to
``(pi(u), pi'(u'))`` with weight ``w(u, u')``.

Border enumerations
-------------------
Sources ``B_bot``: the left column bottom-to-top, ``(1,1) .. (1,n'+1)``,
then the bottom row ``(2,1) .. (n+1,1)``.  Targets ``B_top``: the top row
``(1,n'+1) .. (n+1,n'+1)``, then the right column top-to-bottom,
``(n+1,n') .. (n+1,1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .costs import NEG, ExtValue, from_ext, to_ext
from .forest_core import Forest
from .minplus import INSTR, backend_module

WeightFn = Union[np.ndarray, Callable[[int, int], ExtValue]]


@dataclass(frozen=True)
class AlignGraph:
    """Alignment graph of ``(w, F, G)``; ``W[u, u']`` holds ``w`` encoded (row/column 0 unused)."""

    F: Forest
    G: Forest
    W: np.ndarray

    @property
    def n(self) -> int:
        return self.F.n

    @property
    def m(self) -> int:
        return self.G.n

    @property
    def piF(self) -> np.ndarray:
        return self.F.pi

    @property
    def piG(self) -> np.ndarray:
        return self.G.pi

    def restrict(self, ranks: np.ndarray, ranks_g: np.ndarray | None = None) -> "AlignGraph":
        """Graph of the induced forests on ``ranks`` (and ``ranks_g``) with ``w`` carried over."""
        ranks = np.asarray(ranks, dtype=np.int64)
        if ranks_g is None:
            ranks_g = np.arange(1, self.m + 1, dtype=np.int64)
        ranks_g = np.asarray(ranks_g, dtype=np.int64)
        W = np.full((len(ranks) + 1, len(ranks_g) + 1), NEG, dtype=np.int64)
        W[1:, 1:] = self.W[np.ix_(ranks, ranks_g)]
        return AlignGraph(self.F.induced(ranks), self.G.induced(ranks_g), W)

    def transpose(self) -> "AlignGraph":
        return AlignGraph(self.G, self.F, np.ascontiguousarray(self.W.T))


def build(w: WeightFn, F: Forest, G: Forest) -> AlignGraph:
    """Alignment graph with diagonal weights ``w(i, i')`` on pre-order ranks."""
    if isinstance(w, np.ndarray):
        if w.shape != (F.n + 1, G.n + 1):
            raise ValueError(f"weight array must have shape {(F.n + 1, G.n + 1)}")
        W = np.ascontiguousarray(w, dtype=np.int64)
    else:
        W = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
        for i in range(1, F.n + 1):
            for j in range(1, G.n + 1):
                W[i, j] = from_ext(w(i, j))
    return AlignGraph(F, G, W)


def longest_dist(g: AlignGraph, p: tuple[int, int], q: tuple[int, int]) -> ExtValue:
    """Maximum path weight from grid point ``p`` to ``q``; ``NEG_INF`` if unreachable."""
    (a, b), (c, d) = p, q
    for u, v in (p, q):
        if not (1 <= u <= g.n + 1 and 1 <= v <= g.m + 1):
            raise IndexError(f"grid point {(u, v)} outside the grid")
    if c < a or d < b:
        return to_ext(NEG)
    grid = backend_module().grid_from(g.piF, g.piG, g.W, g.n, g.m, a, b)
    INSTR.record_dp((g.n + 2 - a) * (g.m + 2 - b))
    return to_ext(grid[c, d])


# -- border distances --------------------------------------------------------


def src_points(n: int, m: int, left_only: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``B_bot`` in canonical order (left column only if asked)."""
    su = np.ones(m + 1, dtype=np.int64)
    sv = np.arange(1, m + 2, dtype=np.int64)
    if left_only:
        return su, sv
    return (np.concatenate([su, np.arange(2, n + 2, dtype=np.int64)]),
            np.concatenate([sv, np.ones(n, dtype=np.int64)]))


def tgt_points(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``B_top`` in canonical order."""
    tu = np.concatenate([np.arange(1, n + 2, dtype=np.int64), np.full(m, n + 1, dtype=np.int64)])
    tv = np.concatenate([np.full(n + 1, m + 1, dtype=np.int64), np.arange(m, 0, -1, dtype=np.int64)])
    return tu, tv


def src_index(n: int, m: int, u, v):
    """Position of source ``(u, v)`` in ``B_bot``; vectorises over arrays."""
    u = np.asarray(u)
    v = np.asarray(v)
    return np.where(u == 1, v - 1, m + u - 1)


def tgt_index(n: int, m: int, u, v):
    """Position of target ``(u, v)`` in ``B_top``; vectorises over arrays."""
    u = np.asarray(u)
    v = np.asarray(v)
    return np.where(v == m + 1, u - 1, n + (m + 1 - v))


@dataclass
class BorderDistances:
    """Longest distances from ``B_bot`` (rows) to ``B_top`` (columns).

    With ``left_only`` the rows cover just the left column ``(1, 1..m+1)``.
    """

    n: int
    m: int
    table: np.ndarray
    left_only: bool = False

    def __post_init__(self) -> None:
        rows = self.m + 1 if self.left_only else self.n + self.m + 1
        if self.table.shape != (rows, self.n + self.m + 1):
            raise ValueError(f"table shape {self.table.shape} does not fit grid {self.n}x{self.m}")

    def src(self, u, v):
        return src_index(self.n, self.m, u, v)

    def tgt(self, u, v):
        return tgt_index(self.n, self.m, u, v)

    def get(self, p: tuple[int, int], q: tuple[int, int]) -> ExtValue:
        """Distance from source point ``p`` to target point ``q``."""
        return to_ext(self.table[int(self.src(*p)), int(self.tgt(*q))])

    def left_rows(self) -> "BorderDistances":
        return BorderDistances(self.n, self.m, self.table[: self.m + 1].copy(), True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BorderDistances):
            return NotImplemented
        return (self.n, self.m, self.left_only) == (other.n, other.m, other.left_only) and bool(
            np.array_equal(self.table, other.table)
        )


def border_distances_dp(g: AlignGraph, left_only: bool = False) -> BorderDistances:
    """Border table by one longest-path sweep per source."""
    su, sv = src_points(g.n, g.m, left_only)
    tu, tv = tgt_points(g.n, g.m)
    table = backend_module().grid_border(g.piF, g.piG, g.W, g.n, g.m, su, sv, tu, tv)
    INSTR.record_dp(len(su) * (g.n + 1) * (g.m + 1))
    return BorderDistances(g.n, g.m, table, left_only)


# -- export ------------------------------------------------------------------


def to_dot(g: AlignGraph) -> str:
    """DOT text: one node per grid point, the two zero edges and finite diagonals."""
    lines = ["digraph alignment {", "  rankdir=LR;"]
    for u in range(1, g.n + 2):
        for v in range(1, g.m + 2):
            lines.append(f'  "{u},{v}" [label="({u},{v})"];')
    for u in range(1, g.n + 2):
        for v in range(1, g.m + 2):
            if u <= g.n:
                lines.append(f'  "{u},{v}" -> "{u + 1},{v}" [label="0"];')
            if v <= g.m:
                lines.append(f'  "{u},{v}" -> "{u},{v + 1}" [label="0"];')
    for u in range(1, g.n + 1):
        for v in range(1, g.m + 1):
            w = g.W[u, v]
            if w != NEG:
                pu, pv = int(g.piF[u]), int(g.piG[v])
                lines.append(f'  "{u},{v}" -> "{pu},{pv}" [label="{int(w)}", style=bold];')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "AlignGraph",
    "BorderDistances",
    "border_distances_dp",
    "build",
    "longest_dist",
    "src_index",
    "src_points",
    "tgt_index",
    "tgt_points",
    "to_dot",
]
