"""Recursive border-to-border distance solvers.

``solve_bbd`` splits the larger forest with the two decomposition transitions
(two synchronous forests side by side; a synchronous forest inside a larger
one) and merges sub-tables with max-plus products.  ``solve_lrbbd`` only needs
sources on the left column and only ever splits the first forest.

All sub-instances are alignment graphs of induced subforests; a synchronous
subforest of ``F`` is always a contiguous range of pre-order ranks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .alignment_graph import (
    AlignGraph,
    BorderDistances,
    WeightFn,
    border_distances_dp,
    build,
    src_index,
    src_points,
    tgt_index,
    tgt_points,
)
from .costs import NEG
from .forest_core import Forest
from .minplus import MonotoneTag, Orientation, mp


@dataclass(frozen=True)
class BBDConfig:
    """Solver parameters.

    Parameters
    ----------
    alpha
        Split factor: an instance of size ``m`` is cut into pieces of size
        at most ``m / alpha``.
    base_limit
        Instances with both sides at most this size go to the grid DP.
    kernel
        ``"naive"`` or ``"monotone"``.
    unweighted_diameter
        Upper bound on finite distances, used as the monotone tag's bound.
    tile
        Largest kernel dimension; ``None`` picks the instance size plus one
        (the small side plus one for left-border instances).
    """

    alpha: int = 2
    base_limit: int = 64
    kernel: str = "naive"
    unweighted_diameter: int | None = None
    tile: int | None = None

    def __post_init__(self) -> None:
        if self.alpha < 2:
            raise ValueError("alpha must be at least 2")
        if self.base_limit < 4:
            raise ValueError("base_limit must be at least 4")
        if self.kernel not in ("naive", "monotone"):
            raise ValueError(f"unknown kernel {self.kernel!r}")

    @property
    def tag(self) -> MonotoneTag | None:
        if self.kernel != "monotone":
            return None
        return MonotoneTag(Orientation.COLUMN, self.unweighted_diameter)


# -- decomposition plans -----------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    lo: int
    hi: int


@dataclass(frozen=True)
class TypeI:
    """``H = L + (H - L)`` with ``L`` the leftmost tree."""

    lo: int
    hi: int
    left: "Plan"
    right: "Plan"


@dataclass(frozen=True)
class TypeII:
    """``H`` from the synchronous ``H_s = inner`` with ``|H - H_s| <= delta``."""

    lo: int
    hi: int
    inner: "Plan"


Plan = Union[Leaf, TypeI, TypeII]


def decompose(F: Forest, delta: int, lo: int = 1, hi: int | None = None) -> Plan:
    """Decomposition plan of the synchronous rank range ``[lo, hi)`` of ``F``.

    Leaves have at most ``delta`` nodes.  When ``delta`` is below 2 the
    removal loop takes its first step unconditionally so that the inner
    forest is always smaller than ``H``.
    """
    if delta < 1:
        raise ValueError("delta must be positive")
    if hi is None:
        hi = F.n + 1
    if hi <= lo:
        return Leaf(lo, hi)
    p = int(F.parent[lo])
    sibs = F.children[p]
    a = sibs.index(lo)
    b = a
    while b < len(sibs) and sibs[b] < hi:
        b += 1
    if sibs[b - 1] + int(F.size[sibs[b - 1]]) != hi:
        raise ValueError(f"ranks [{lo}, {hi}) do not form a synchronous subforest")
    return _plan(F, delta, p, a, b)


def _span(F: Forest, p: int, a: int, b: int) -> tuple[int, int]:
    if b <= a:
        return 0, 0
    tops = F.children[p]
    last = tops[b - 1]
    return tops[a], last + int(F.size[last])


def _plan(F: Forest, delta: int, p: int, a: int, b: int) -> Plan:
    lo, hi = _span(F, p, a, b)
    size = hi - lo
    if size <= delta:
        return Leaf(lo, hi)
    tops = F.children[p]
    sz = F.size
    if b - a > 1 and 3 * sz[tops[a]] >= delta and 3 * sz[tops[b - 1]] >= delta:
        return TypeI(lo, hi, _plan(F, delta, p, a, a + 1), _plan(F, delta, p, a + 1, b))
    cur = (p, a, b)
    first = True
    while True:
        cp, ca, cb = cur
        ctops = F.children[cp]
        if cb - ca == 1:
            r = ctops[ca]
            nxt = (r, 0, len(F.children[r]))
        elif sz[ctops[ca]] < sz[ctops[cb - 1]]:
            nxt = (cp, ca + 1, cb)
        else:
            nxt = (cp, ca, cb - 1)
        nlo, nhi = _span(F, *nxt)
        if 3 * (size - (nhi - nlo)) > 2 * delta and not first:
            break
        first = False
        cur = nxt
        if nhi == nlo:
            break
    return TypeII(lo, hi, _plan(F, delta, *cur))


def plan_stats(plan: Plan) -> dict[str, int]:
    """Transition counts and the number of directly solved pieces."""
    out = {"type_i": 0, "type_ii": 0, "leaves": 0}
    stack = [plan]
    while stack:
        q = stack.pop()
        if isinstance(q, Leaf):
            out["leaves"] += 1
        elif isinstance(q, TypeI):
            out["type_i"] += 1
            stack.extend((q.left, q.right))
        else:
            out["type_ii"] += 1
            out["leaves"] += 3
            stack.append(q.inner)
    return out


def replay(F: Forest, plan: Plan) -> list[int]:
    """Ranks covered by ``plan``, rebuilt from its pieces; equals ``range(lo, hi)``."""
    if isinstance(plan, Leaf):
        return list(range(plan.lo, plan.hi))
    if isinstance(plan, TypeI):
        left = replay(F, plan.left)
        right = replay(F, plan.right)
        if not left or left[-1] + 1 != (right[0] if right else plan.hi):
            raise AssertionError("type I pieces are not adjacent")
        return left + right
    inner = replay(F, plan.inner)
    outside = [v for v in range(plan.lo, plan.hi) if v not in set(inner)]
    return sorted(inner + outside)


def _leaf_pieces(F: Forest, plan: Plan) -> list[tuple[int, int]]:
    """Sizes of every directly solved piece (leaf, and the three type-II pieces)."""
    out: list[tuple[int, int]] = []
    stack = [plan]
    while stack:
        q = stack.pop()
        if isinstance(q, Leaf):
            out.append((q.lo, q.hi))
        elif isinstance(q, TypeI):
            stack.extend((q.left, q.right))
        else:
            out.append((q.lo, q.hi))
            stack.append(q.inner)
    return out


def decomposition_count_ok(n: int, m: int, delta: int, k: int) -> bool:
    """Empirical check ``k <= 9 (size/delta + 1)^2`` on the number of pieces."""
    size = max(n, m)
    return k <= 9 * (size / delta + 1) ** 2


# -- patching ----------------------------------------------------------------


def _prod(A: np.ndarray, B: np.ndarray, cfg: BBDConfig, block: int | None) -> np.ndarray:
    return mp(A, B, block=block, kernel=cfg.kernel, tag=cfg.tag)


def _src_coords(n: int, m: int, left_only: bool):
    return src_points(n, m, left_only)


def patch_two(out1: BorderDistances, out2: BorderDistances, cfg: BBDConfig = BBDConfig(),
              block: int | None = None) -> BorderDistances:
    """Combine the tables of ``F1`` and ``F2`` into the table of ``F1 + F2``."""
    m = out1.m
    if out2.m != m:
        raise ValueError("sub-instances disagree on the second forest")
    n1, n2 = out1.n, out2.n
    left_only = out1.left_only
    if n2 == 0:
        return out1
    if n1 == 0:
        return out2.left_rows() if left_only else out2
    n = n1 + n2
    c = n1 + 1
    su, sv = _src_coords(n, m, left_only)
    tu, tv = tgt_points(n, m)
    out = np.full((len(su), len(tu)), NEG, dtype=np.int64)
    s1 = np.nonzero(su < c)[0]
    s2 = np.nonzero(su >= c)[0]
    t1 = np.nonzero((tv == m + 1) & (tu < c))[0]
    t2 = np.nonzero(~((tv == m + 1) & (tu < c)))[0]
    r1 = src_index(n1, m, su[s1], sv[s1])
    out[np.ix_(s1, t1)] = out1.table[np.ix_(r1, tgt_index(n1, m, tu[t1], tv[t1]))]
    c2 = tgt_index(n2, m, tu[t2] - n1, tv[t2])
    A = out1.table[r1, n1 : n1 + m + 1]
    B = out2.table[m::-1][:, c2]
    out[np.ix_(s1, t2)] = _prod(A, B, cfg, block)
    if len(s2):
        r2 = src_index(n2, m, su[s2] - n1, sv[s2])
        out[np.ix_(s2, t2)] = out2.table[np.ix_(r2, c2)]
    return BorderDistances(n, m, out, left_only)


@dataclass(frozen=True)
class ThreeWayShape:
    """Geometry of ``F`` around a synchronous ``F_s``.

    ``i_s`` is the local rank of the first node of ``F_s`` and ``n_s`` its size;
    ``lmap[u]`` (``u`` in ``1..i_s``) is the column of the ``F_l`` grid that
    column ``u`` of ``F`` collapses to once the ancestors of ``F_s`` are gone.
    """

    n: int
    m: int
    i_s: int
    n_s: int
    lmap: np.ndarray

    @property
    def i_r(self) -> int:
        return self.i_s + self.n_s

    @property
    def n_l(self) -> int:
        return int(self.lmap[self.i_s]) - 1

    @property
    def n_r(self) -> int:
        return self.n + 1 - self.i_r


def three_way_shape(F: Forest, m: int, i_s: int, n_s: int) -> ThreeWayShape:
    """Shape for ``F_s`` = ranks ``[i_s, i_s + n_s)`` of ``F``."""
    anc = set(F.ancestors(i_s)) if n_s else set()
    lmap = np.zeros(i_s + 1, dtype=np.int64)
    col = 1
    for u in range(1, i_s + 1):
        lmap[u] = col
        if u < i_s and u not in anc:
            col += 1
    return ThreeWayShape(F.n, m, i_s, n_s, lmap)


def three_way_parts(F: Forest, i_s: int, n_s: int) -> tuple[list[int], list[int], list[int], list[int]]:
    """Ranks of ``F_l``, ``F_s``, ``F_r`` and ``F - F_s``."""
    anc = set(F.ancestors(i_s)) if n_s else set()
    i_r = i_s + n_s
    left = [u for u in range(1, i_s) if u not in anc]
    mid = list(range(i_s, i_r))
    right = list(range(i_r, F.n + 1))
    minus = list(range(1, i_s)) + right
    return left, mid, right, minus


def patch_three(out_l: BorderDistances, out_s: BorderDistances, out_r: BorderDistances,
                out_minus: BorderDistances, shape: ThreeWayShape, cfg: BBDConfig = BBDConfig(),
                block: int | None = None) -> BorderDistances:
    """Combine the tables of ``F_l``, ``F_s``, ``F_r`` and ``F - F_s`` into that of ``F``.

    Paths from the ``l`` region to the ``r`` region either pass through the
    band of ``F_s`` (crossing both of its border columns) or jump over it on
    the diagonal of an ancestor; the latter are the paths of ``F - F_s``.
    """
    n, m = shape.n, shape.m
    i_s, i_r, n_s, n_l, n_r = shape.i_s, shape.i_r, shape.n_s, shape.n_l, shape.n_r
    if (out_l.n, out_s.n, out_r.n, out_minus.n) != (n_l, n_s, n_r, n - n_s):
        raise ValueError("sub-table sizes do not match the shape")
    if len({out_l.m, out_s.m, out_r.m, out_minus.m, m}) != 1:
        raise ValueError("sub-instances disagree on the second forest")
    left_only = out_l.left_only
    su, sv = _src_coords(n, m, left_only)
    tu, tv = tgt_points(n, m)
    out = np.full((len(su), len(tu)), NEG, dtype=np.int64)
    # region of each source and target: 0 = l, 1 = s, 2 = r
    sreg = np.where(su < i_s, 0, np.where(su < i_r, 1, 2))
    top = tv == m + 1
    treg = np.where(top & (tu < i_s), 0, np.where(top & (tu < i_r), 1, 2))
    S = [np.nonzero(sreg == k)[0] for k in range(3)]
    T = [np.nonzero(treg == k)[0] for k in range(3)]
    lm = shape.lmap
    # local indices in each sub-table
    rl = src_index(n_l, m, lm[su[S[0]]], sv[S[0]])
    rs = src_index(n_s, m, su[S[1]] - i_s + 1, sv[S[1]])
    rr = src_index(n_r, m, su[S[2]] - i_r + 1, sv[S[2]])
    cl = tgt_index(n_l, m, lm[tu[T[0]]], tv[T[0]])
    cs = tgt_index(n_s, m, tu[T[1]] - i_s + 1, tv[T[1]])
    cr = tgt_index(n_r, m, tu[T[2]] - i_r + 1, tv[T[2]])
    # border columns listed top-down, so right operands are column-monotone
    l_cut = slice(n_l, n_l + m + 1)
    s_cut = slice(n_s, n_s + m + 1)
    s_in = out_s.table[m::-1]
    r_in = out_r.table[m::-1]

    out[np.ix_(S[0], T[0])] = out_l.table[np.ix_(rl, cl)]
    if len(S[0]):
        A = out_l.table[rl, l_cut]
        out[np.ix_(S[0], T[1])] = _prod(A, s_in[:, cs], cfg, block)
        through = _prod(_prod(A, s_in[:, s_cut], cfg, block), r_in[:, cr], cfg, block)
        mu = np.where(tu[T[2]] >= i_r, tu[T[2]] - n_s, tu[T[2]])
        cm = tgt_index(n - n_s, m, mu, tv[T[2]])
        rm = src_index(n - n_s, m, su[S[0]], sv[S[0]])
        out[np.ix_(S[0], T[2])] = np.maximum(through, out_minus.table[np.ix_(rm, cm)])
    if len(S[1]):
        out[np.ix_(S[1], T[1])] = out_s.table[np.ix_(rs, cs)]
        out[np.ix_(S[1], T[2])] = _prod(out_s.table[rs, s_cut], r_in[:, cr], cfg, block)
    if len(S[2]):
        out[np.ix_(S[2], T[2])] = out_r.table[np.ix_(rr, cr)]
    # collapsed ancestor columns lose the order between their points
    out[(tu[None, :] < su[:, None]) | (tv[None, :] < sv[:, None])] = NEG
    return BorderDistances(n, m, out, left_only)


# -- solvers -----------------------------------------------------------------


@dataclass
class SolveStats:
    """Counts gathered during one solve."""

    dp_instances: int = 0
    plans: int = 0
    bound_violations: list[tuple[int, int, int, int]] = field(default_factory=list)


def _transpose_table(res: BorderDistances, n: int, m: int) -> BorderDistances:
    """Table of ``g`` from the table of its transpose (grid ``m x n``)."""
    su, sv = src_points(n, m)
    tu, tv = tgt_points(n, m)
    rows = src_index(m, n, sv, su)
    cols = tgt_index(m, n, tv, tu)
    return BorderDistances(n, m, res.table[np.ix_(rows, cols)])


class _Solver:
    def __init__(self, cfg: BBDConfig, block: int | None):
        self.cfg = cfg
        self.block = block
        self.stats = SolveStats()

    def full(self, g: AlignGraph) -> BorderDistances:
        n, m = g.n, g.m
        if max(n, m) <= self.cfg.base_limit:
            self.stats.dp_instances += 1
            return border_distances_dp(g)
        if n < m:
            return _transpose_table(self.full(g.transpose()), n, m)
        delta = max(1, n // self.cfg.alpha)
        plan = decompose(g.F, delta)
        self._check(g, plan, delta)
        return self.run(g, plan, left_only=False)

    def left(self, g: AlignGraph) -> BorderDistances:
        if g.n <= self.cfg.base_limit:
            self.stats.dp_instances += 1
            return border_distances_dp(g, left_only=True)
        delta = max(1, g.n // self.cfg.alpha)
        plan = decompose(g.F, delta)
        self.stats.plans += 1
        return self.run(g, plan, left_only=True)

    def _check(self, g: AlignGraph, plan: Plan, delta: int) -> None:
        self.stats.plans += 1
        k = len(_leaf_pieces(g.F, plan))
        if not decomposition_count_ok(g.n, g.m, delta, k * k):
            self.stats.bound_violations.append((g.n, g.m, delta, k))
            warnings.warn(f"decomposition produced {k} pieces for size {g.n} and delta {delta}")

    def solve_piece(self, g: AlignGraph, left_only: bool) -> BorderDistances:
        return self.left(g) if left_only else self.full(g)

    def run(self, g: AlignGraph, plan: Plan, left_only: bool) -> BorderDistances:
        """Table of the sub-instance on ranks ``[plan.lo, plan.hi)`` of ``g.F``."""
        if isinstance(plan, Leaf):
            return self.solve_piece(g.restrict(np.arange(plan.lo, plan.hi)), left_only)
        if isinstance(plan, TypeI):
            out1 = self.run(g, plan.left, left_only)
            out2 = self.run(g, plan.right, left_only)
            return patch_two(out1, out2, self.cfg, self.block)
        H = g.restrict(np.arange(plan.lo, plan.hi))
        i_s = plan.inner.lo - plan.lo + 1
        n_s = plan.inner.hi - plan.inner.lo
        out_s = self.run(g, plan.inner, left_only)
        left, _, right, minus = three_way_parts(H.F, i_s, n_s)
        out_l = self.solve_piece(H.restrict(np.asarray(left, dtype=np.int64)), left_only)
        out_r = self.solve_piece(H.restrict(np.asarray(right, dtype=np.int64)), left_only)
        out_minus = self.solve_piece(H.restrict(np.asarray(minus, dtype=np.int64)), left_only)
        shape = three_way_shape(H.F, g.m, i_s, n_s)
        return patch_three(out_l, out_s, out_r, out_minus, shape, self.cfg, self.block)


def _graph(w: WeightFn | AlignGraph, F: Forest | None, G: Forest | None) -> AlignGraph:
    if isinstance(w, AlignGraph):
        return w
    if F is None or G is None:
        raise ValueError("forests are required with a weight function")
    return build(w, F, G)


def solve_bbd(w: WeightFn | AlignGraph, F: Forest | None = None, G: Forest | None = None,
              cfg: BBDConfig = BBDConfig(), stats: SolveStats | None = None) -> BorderDistances:
    """All longest distances from ``B_bot`` to ``B_top`` of the alignment graph.

    Equal to :func:`border_distances_dp` entry by entry.
    """
    g = _graph(w, F, G)
    block = cfg.tile if cfg.tile is not None else max(g.n, g.m) + 1
    solver = _Solver(cfg, block)
    res = solver.full(g)
    if stats is not None:
        stats.dp_instances += solver.stats.dp_instances
        stats.plans += solver.stats.plans
        stats.bound_violations.extend(solver.stats.bound_violations)
    return res


def solve_lrbbd(w: WeightFn | AlignGraph, F: Forest | None = None, G: Forest | None = None,
                cfg: BBDConfig = BBDConfig(), stats: SolveStats | None = None) -> BorderDistances:
    """Longest distances from the left column ``(1, 1..n'+1)`` to ``B_top``.

    Only the first forest is decomposed, with threshold ``n / alpha``; kernel
    calls are tiled to at most ``n' + 1`` per dimension unless ``cfg.tile`` is set.
    """
    g = _graph(w, F, G)
    block = cfg.tile if cfg.tile is not None else max(2, g.m + 1)
    solver = _Solver(cfg, block)
    res = solver.left(g)
    if stats is not None:
        stats.dp_instances += solver.stats.dp_instances
        stats.plans += solver.stats.plans
    return res


__all__ = [
    "BBDConfig",
    "Leaf",
    "Plan",
    "SolveStats",
    "ThreeWayShape",
    "TypeI",
    "TypeII",
    "decompose",
    "decomposition_count_ok",
    "patch_three",
    "patch_two",
    "plan_stats",
    "replay",
    "solve_bbd",
    "solve_lrbbd",
    "three_way_parts",
    "three_way_shape",
]
