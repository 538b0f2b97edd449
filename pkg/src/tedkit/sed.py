"""Spine edit distance: subtree similarities for every pair of spine nodes.

Given ``sim(sub(v), sub(v'))`` for all pairs outside ``S x S'``, the solver
fills the pairs on the two spines.  The work is organised as a
divide-et-impera over spine segments ``s < q`` of ``S`` (with ``s' < q'`` on
``S'``), the DISED instances.

Rows
----
The unit of work is a *row*: for one spine node ``v`` of ``S`` whose spine
child ``c`` is solved, compute ``sim(sub(v), sub(t'))`` for every ``t'`` in
the ``S'`` segment.  With ``ch(v) = sub(v) - v``::

    sim(sub v, sub t') = max(sim(ch v, sub t'),
                             sim(ch v, ch t'),
                             max over children c' of t' of sim(sub v, sub c'),
                             eta(v, t') + sim(ch v, ch t'))

The middle terms cover ``t'`` deleted: if ``v`` is matched to a node inside
``sub(c')`` every matched descendant of ``v`` lands in ``sub(c')``.  Both
``ch v`` terms are longest paths in the augmented alignment graph of
``ch(v)`` against ``sub(s')``, whose diagonals only involve pairs below ``v``
on ``S``.  One border sweep (or left-border solve) per row yields them all.

Divide step
-----------
:func:`partition` cuts ``s..q`` into segments.  :func:`dised_patch` solves the
inner instance ``(r, s', q, q')`` before the outer one ``(s, s', r, q')``:
the outer instance's inputs on ``l(r) x [l(s')..l(q')]`` and
``r(r) x [r(q')..r(s')]`` are the inner instance's spine row.
:func:`dised_base` handles ``s`` immediately preceding ``q`` with one row.

Border output
-------------
Once every spine pair of the segment is known, the DISED output
``sim(F[x..y), F'[x'..y'))`` for ``(x, x')`` in ``B_bot_l`` and ``(y, y')`` in
``B_bot_r`` is one border computation on the augmented alignment graph of
``sub(s)`` against ``sub(s')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

import numpy as np

from .alignment_graph import AlignGraph, BorderDistances
from .bbd import BBDConfig, solve_bbd, solve_lrbbd
from .costs import NEG, ExtValue, from_ext
from .fed import augment, solve_fed
from .forest_core import Forest, Spine, subforest
from .minplus import INSTR, backend_module

PartialSims = Union[np.ndarray, Callable[[int, int], ExtValue]]

BASE_CUTOFF = 48
"""Segments with at most this many off-spine nodes on ``S`` are solved row by row."""

Point = tuple[int, int]


# -- border index sets -------------------------------------------------------


def border_bot(a: int, b: int, c: int, d: int) -> list[Point]:
    """Lower-left border ``(a, b..d)`` then ``(a+1..c, b)`` of the rectangle ``[a..c] x [b..d]``."""
    return [(a, y) for y in range(b, d + 1)] + [(x, b) for x in range(a + 1, c + 1)]


def border_top(a: int, b: int, c: int, d: int) -> list[Point]:
    """Upper-right border ``(a..c, d)`` then ``(c, d-1..b)`` of the rectangle ``[a..c] x [b..d]``."""
    return [(x, d) for x in range(a, c + 1)] + [(c, y) for y in range(d - 1, b - 1, -1)]


Quad = tuple[int, int, int, int]


def _quads(xs: list[Point], ys: list[Point]) -> set[Quad]:
    return {(x, x2, y, y2) for x, x2 in xs for y, y2 in ys}


@dataclass(frozen=True)
class BorderIndexSets:
    """Index sets of the ``(s, s', q, q')`` instance, as bi-order grid points.

    ``bot_l`` and ``top_l`` are the lower-left and upper-right borders of
    ``[l(s)..l(q)] x [l(s')..l(q')]``.  On the right the roles swap:
    ``bot_r`` is the upper-right border of ``[r(q)..r(s)] x [r(q')..r(s')]``
    and ``top_r`` its lower-left border.
    """

    F: Forest
    G: Forest
    s: int
    s2: int
    q: int
    q2: int

    def _l(self, v: int) -> int:
        return int(self.F.lpos[v])

    def _r(self, v: int) -> int:
        return int(self.F.rpos[v])

    def _l2(self, v: int) -> int:
        return int(self.G.lpos[v])

    def _r2(self, v: int) -> int:
        return int(self.G.rpos[v])

    def bot_l(self) -> list[Point]:
        return border_bot(self._l(self.s), self._l2(self.s2), self._l(self.q), self._l2(self.q2))

    def top_l(self) -> list[Point]:
        return border_top(self._l(self.s), self._l2(self.s2), self._l(self.q), self._l2(self.q2))

    def bot_r(self) -> list[Point]:
        return border_top(self._r(self.q), self._r2(self.q2), self._r(self.s), self._r2(self.s2))

    def top_r(self) -> list[Point]:
        return border_bot(self._r(self.q), self._r2(self.q2), self._r(self.s), self._r2(self.s2))

    def input_quads(self) -> set[Quad]:
        """Index set of input family (i)."""
        return _quads(self.top_l(), self.top_r())

    def output_quads(self) -> set[Quad]:
        return _quads(self.bot_l(), self.bot_r())

    # Inputs of the outer instance (s, s', r, q') after a split at r.

    def input_set_5(self, r: int) -> set[Quad]:
        """``[l(s)..l(r)] x l(q')`` against ``[r(r)..r(s)] x r(q')``: part of this instance's input."""
        lo = [(x, self._l2(self.q2)) for x in range(self._l(self.s), self._l(r) + 1)]
        hi = [(y, self._r2(self.q2)) for y in range(self._r(r), self._r(self.s) + 1)]
        return _quads(lo, hi)

    def input_set_6(self, r: int) -> set[Quad]:
        """``[l(s)..l(r)] x l(q')`` against ``r(r) x [r(q')..r(s')]``."""
        lo = [(x, self._l2(self.q2)) for x in range(self._l(self.s), self._l(r) + 1)]
        hi = [(self._r(r), y2) for y2 in range(self._r2(self.q2), self._r2(self.s2) + 1)]
        return _quads(lo, hi)

    def input_set_7(self, r: int) -> set[Quad]:
        """``l(r) x [l(s')..l(q')]`` against ``[r(r)..r(s)] x r(q')``: set 6 mirrored."""
        lo = [(self._l(r), x2) for x2 in range(self._l2(self.s2), self._l2(self.q2) + 1)]
        hi = [(y, self._r2(self.q2)) for y in range(self._r(r), self._r(self.s) + 1)]
        return _quads(lo, hi)

    def input_set_8(self, r: int) -> set[Quad]:
        """``l(r) x [l(s')..l(q')]`` against ``r(r) x [r(q')..r(s')]``: part of the inner output."""
        lo = [(self._l(r), x2) for x2 in range(self._l2(self.s2), self._l2(self.q2) + 1)]
        hi = [(self._r(r), y2) for y2 in range(self._r2(self.q2), self._r2(self.s2) + 1)]
        return _quads(lo, hi)

    # Outputs of this instance after a split at r.

    def _outer(self, r: int) -> "BorderIndexSets":
        return BorderIndexSets(self.F, self.G, self.s, self.s2, r, self.q2)

    def output_set_9(self, r: int) -> set[Quad]:
        """The outer instance's output."""
        o = self._outer(r)
        return _quads(o.bot_l(), o.bot_r())

    def output_set_10(self, r: int) -> set[Quad]:
        """Outer ``B_bot_l`` against ``[r(q)..r(r)] x r(s')``."""
        hi = [(y, self._r2(self.s2)) for y in range(self._r(self.q), self._r(r) + 1)]
        return _quads(self._outer(r).bot_l(), hi)

    def output_set_11(self, r: int) -> set[Quad]:
        """``[l(r)..l(q)] x l(s')`` against the outer ``B_bot_r``."""
        lo = [(x, self._l2(self.s2)) for x in range(self._l(r), self._l(self.q) + 1)]
        return _quads(lo, self._outer(r).bot_r())

    def output_set_12(self, r: int) -> set[Quad]:
        """``[l(r)..l(q)] x l(s')`` against ``[r(q)..r(r)] x r(s')``: part of the inner output."""
        lo = [(x, self._l2(self.s2)) for x in range(self._l(r), self._l(self.q) + 1)]
        hi = [(y, self._r2(self.s2)) for y in range(self._r(self.q), self._r(r) + 1)]
        return _quads(lo, hi)


# -- partition ---------------------------------------------------------------


def segment_size(F: Forest, s: int, q: int) -> int:
    """``|sub(s) - sub(q)|``."""
    return int(F.size[s]) - int(F.size[q])


def partition(F: Forest, spine: Spine, s: int, q: int, delta: int) -> list[int]:
    """Spine nodes ``s = r_1 < ... < r_d = q`` with short or single-step gaps.

    Each step jumps to the farthest ``r`` with ``|sub(r_i) - sub(r)| <= delta``,
    or to the next spine node when no such ``r`` exists.
    """
    nodes = list(spine.nodes)
    i, j = nodes.index(s), nodes.index(q)
    if i >= j:
        raise ValueError("partition needs s strictly above q on the spine")
    out = [s]
    k = i
    while k != j:
        nxt = k + 1
        for t in range(k + 1, j + 1):
            if segment_size(F, nodes[k], nodes[t]) <= delta:
                nxt = t
            else:
                break
        out.append(nodes[nxt])
        k = nxt
    return out


# -- instances ---------------------------------------------------------------


def _sims_table(p: PartialSims, F: Forest, G: Forest) -> np.ndarray:
    if isinstance(p, np.ndarray):
        if p.shape != (F.n + 1, G.n + 1):
            raise ValueError(f"partial similarities must have shape {(F.n + 1, G.n + 1)}")
        return np.array(p, dtype=np.int64)
    out = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    for i in range(1, F.n + 1):
        for j in range(1, G.n + 1):
            out[i, j] = from_ext(p(i, j))
    return out


@dataclass
class SedState:
    """Shared state of one spine solve.

    ``sims`` holds ``sim(sub(v), sub(v'))`` by pre-order rank; spine pairs are
    filled as rows complete.  ``W`` mirrors ``sims`` on the augmented alignment
    graph, indexed by bi-order positions.
    """

    F: Forest
    G: Forest
    S: Spine
    S2: Spine
    eta: np.ndarray
    sims: np.ndarray
    cfg: BBDConfig
    left_solver: bool = False
    trace: list[tuple[str, int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.AF = augment(self.F)
        self.AG = augment(self.G)
        self.W = np.full((2 * self.F.n + 1, 2 * self.G.n + 1), NEG, dtype=np.int64)
        if self.F.n and self.G.n:
            self.W[np.ix_(self.F.lpos[1 : self.F.n + 1], self.G.lpos[1 : self.G.n + 1])] = self.sims[1:, 1:]

    def set(self, v: int, v2: int, val: int) -> None:
        self.sims[v, v2] = val
        self.W[int(self.F.lpos[v]), int(self.G.lpos[v2])] = val

    def block(self, lo: int, hi: int, lo2: int, hi2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return augmented_block(self.AF, self.AG, self.W, lo, hi, lo2, hi2)


def augmented_block(AF: Forest, AG: Forest, W: np.ndarray, lo: int, hi: int, lo2: int,
                    hi2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``pi`` arrays and weights of the augmented grid on positions ``[lo, hi) x [lo2, hi2)``.

    Both ranges must be unions of whole subtrees.
    """
    piF = np.zeros(hi - lo + 2, dtype=np.int64)
    piG = np.zeros(hi2 - lo2 + 2, dtype=np.int64)
    piF[1:-1] = AF.pi[lo:hi] - (lo - 1)
    piG[1:-1] = AG.pi[lo2:hi2] - (lo2 - 1)
    out = np.full((hi - lo + 1, hi2 - lo2 + 1), NEG, dtype=np.int64)
    out[1:, 1:] = W[lo:hi, lo2:hi2]
    return piF, piG, out


@dataclass
class DisedInstance:
    """The ``(s, s', q, q')`` instance over a shared :class:`SedState`.

    Pairs ``(t, t')`` with ``s <= t < q`` on ``S`` and ``s' <= t' < q'`` on
    ``S'`` are the unknowns; every other pair inside ``sub(s) x sub(s')`` is
    read from the state.  In particular the spine row of ``q`` and the spine
    column of ``q'`` play the part of input family (i).
    """

    state: SedState
    s: int
    q: int
    s2: int
    q2: int

    @property
    def F(self) -> Forest:
        return self.state.F

    @property
    def G(self) -> Forest:
        return self.state.G

    @property
    def S(self) -> Spine:
        return self.state.S

    @property
    def S2(self) -> Spine:
        return self.state.S2

    def __post_init__(self) -> None:
        S, S2 = self.state.S.nodes, self.state.S2.nodes
        if self.s not in S or self.q not in S or S.index(self.s) >= S.index(self.q):
            raise ValueError("need s strictly above q on S")
        if self.s2 not in S2 or self.q2 not in S2 or S2.index(self.s2) >= S2.index(self.q2):
            raise ValueError("need s' strictly above q' on S'")

    @property
    def sets(self) -> BorderIndexSets:
        return BorderIndexSets(self.F, self.G, self.s, self.s2, self.q, self.q2)

    @property
    def size(self) -> int:
        return max(segment_size(self.F, self.s, self.q), segment_size(self.G, self.s2, self.q2))

    def spine_segment(self) -> list[int]:
        S = self.S.nodes
        return list(S[S.index(self.s) : S.index(self.q)])

    def spine_segment2(self) -> list[int]:
        S2 = self.S2.nodes
        return list(S2[S2.index(self.s2) : S2.index(self.q2)])

    def sub(self, s: int, q: int) -> "DisedInstance":
        return DisedInstance(self.state, s, q, self.s2, self.q2)


# -- rows --------------------------------------------------------------------


def _row_paths(st: SedState, v: int, s2: int, targets: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """``sim(ch v, sub t')`` and ``sim(ch v, ch t')`` for each ``t'`` in ``targets``."""
    F, G = st.F, st.G
    lo, hi = int(F.lpos[v]) + 1, int(F.rpos[v]) - 1
    lo2, hi2 = int(G.lpos[s2]), int(G.rpos[s2])
    n, m = hi - lo, hi2 - lo2
    L = np.array([int(G.lpos[t]) for t in targets], dtype=np.int64) - lo2 + 1
    R = np.array([int(G.rpos[t]) for t in targets], dtype=np.int64) - lo2 + 1
    k = len(targets)
    # A left-border solve costs about one kernel pass over an (n x m) grid
    # with tiles of size m; the sweeps cost one grid pass per source.
    use_left = 2 * k > (m + 1) if not st.left_solver else 2 * k > (m + 1) // 2
    if use_left and n > st.cfg.base_limit:
        rows = np.arange(lo, hi, dtype=np.int64)
        cols = np.arange(lo2, hi2, dtype=np.int64)
        W = np.full((n + 1, m + 1), NEG, dtype=np.int64)
        W[1:, 1:] = st.W[lo:hi, lo2:hi2]
        g = AlignGraph(st.AF.induced(rows), st.AG.induced(cols), W)
        res = solve_lrbbd(g, cfg=st.cfg)
        whole = res.table[L - 1, res.tgt(np.full(k, n + 1), R)]
        inner = res.table[L, res.tgt(np.full(k, n + 1), R - 1)]
        return whole, inner
    piF, piG, W = st.block(lo, hi, lo2, hi2)
    su = np.ones(2 * k, dtype=np.int64)
    sv = np.concatenate([L, L + 1])
    tu = np.full(2 * k, n + 1, dtype=np.int64)
    tv = np.concatenate([R, R - 1])
    table = backend_module().grid_border(piF, piG, W, n, m, su, sv, tu, tv)
    INSTR.record_dp(2 * k * (n + 1) * (m + 1))
    idx = np.arange(k)
    return table[idx, idx], table[k + idx, k + idx]


def solve_row(st: SedState, v: int, s2: int, q2: int) -> None:
    """Fill ``sim(sub v, sub t')`` for ``t'`` from the parent of ``q'`` up to ``s'``.

    The spine child of ``v`` must be solved against ``[s'..q']`` and the
    ``v`` row must hold ``sim(sub v, sub q')``.
    """
    S2 = st.S2.nodes
    seg = list(S2[S2.index(s2) : S2.index(q2)])
    if not seg:
        return
    whole, inner = _row_paths(st, v, s2, seg)
    for j in range(len(seg) - 1, -1, -1):
        t2 = seg[j]
        best = max(int(whole[j]), int(inner[j]))
        e = int(st.eta[v, t2])
        if e != NEG:
            best = max(best, e + int(inner[j]))
        for c2 in st.G.children[t2]:
            best = max(best, int(st.sims[v, c2]))
        st.set(v, t2, best)
    st.trace.append(("row", v, s2))


# -- divide-et-impera --------------------------------------------------------


def _immediate(F: Forest, s: int, q: int) -> bool:
    return int(F.parent[q]) == s


def dised_base(inst: DisedInstance) -> None:
    """Solve an instance where ``s`` is the parent of ``q``: a single row."""
    if not _immediate(inst.F, inst.s, inst.q):
        raise ValueError("base case needs s to immediately precede q")
    solve_row(inst.state, inst.s, inst.s2, inst.q2)


def dised_patch(inst: DisedInstance, r: int,
                solve_inner: Callable[[DisedInstance], None] | None = None,
                solve_outer: Callable[[DisedInstance], None] | None = None) -> None:
    """Split at ``s < r < q``: the inner ``(r, s', q, q')`` instance, then the outer ``(s, s', r, q')``.

    The inner instance leaves the spine row of ``r`` filled, which is exactly
    the part of the outer instance's input family (i) on
    ``l(r) x [l(s')..l(q')]`` against ``r(r) x [r(q')..r(s')]``.
    """
    S = inst.S.nodes
    if not S.index(inst.s) < S.index(r) < S.index(inst.q):
        raise ValueError("split node must lie strictly between s and q")
    (solve_inner or _solve)(inst.sub(r, inst.q))
    (solve_outer or _solve)(inst.sub(inst.s, r))
    inst.state.trace.append(("patch", r, inst.s2))


def _solve(inst: DisedInstance, cutoff: int | None = None) -> None:
    """Fill every unknown spine pair of ``inst``."""
    cutoff = BASE_CUTOFF if cutoff is None else cutoff
    F = inst.F
    if _immediate(F, inst.s, inst.q):
        dised_base(inst)
        return
    m = segment_size(F, inst.s, inst.q)
    if m <= cutoff:
        seg = inst.spine_segment() + [inst.q]
        for a, b in zip(reversed(seg[:-1]), reversed(seg[1:])):
            dised_base(inst.sub(a, b))
        return
    delta = max(1, m // 2)
    rs = partition(F, inst.S, inst.s, inst.q, delta)

    def span(i: int, j: int) -> None:
        sub = inst.sub(rs[i], rs[j])
        if j == i + 1:
            _solve(sub, cutoff)
            return
        k = (i + j) // 2
        dised_patch(sub, rs[k], lambda _: span(k, j), lambda _: span(i, k))

    span(0, len(rs) - 1)


@dataclass
class DisedOutput:
    """``sim(F[x..y), F'[x'..y'))`` for ``(x, x')`` in ``B_bot_l`` and ``(y, y')`` in ``B_bot_r``."""

    sources: list[Point]
    targets: list[Point]
    table: np.ndarray

    def get(self, x: int, x2: int, y: int, y2: int) -> int:
        return int(self.table[self.sources.index((x, x2)), self.targets.index((y, y2))])

    def items(self) -> Iterator[tuple[Quad, int]]:
        for i, (x, x2) in enumerate(self.sources):
            for j, (y, y2) in enumerate(self.targets):
                yield (x, x2, y, y2), int(self.table[i, j])


def dised(inst: DisedInstance, cutoff: int | None = None) -> DisedOutput:
    """Solve ``inst`` and read its output family off the alignment graph of ``sub(s) x sub(s')``."""
    _solve(inst, cutoff)
    st, F, G = inst.state, inst.F, inst.G
    lo, hi = int(F.lpos[inst.s]), int(F.rpos[inst.s])
    lo2, hi2 = int(G.lpos[inst.s2]), int(G.rpos[inst.s2])
    sets = inst.sets
    src, tgt = sets.bot_l(), sets.bot_r()
    piF, piG, W = st.block(lo, hi, lo2, hi2)
    n, m = hi - lo, hi2 - lo2
    su = np.array([x - lo + 1 for x, _ in src], dtype=np.int64)
    sv = np.array([x2 - lo2 + 1 for _, x2 in src], dtype=np.int64)
    tu = np.array([y - lo + 1 for y, _ in tgt], dtype=np.int64)
    tv = np.array([y2 - lo2 + 1 for _, y2 in tgt], dtype=np.int64)
    table = backend_module().grid_border(piF, piG, W, n, m, su, sv, tu, tv)
    INSTR.record_dp(len(src) * (n + 1) * (m + 1))
    return DisedOutput(src, tgt, table)


# -- spine edit distance -----------------------------------------------------


@dataclass
class SedResult:
    """Subtree similarities with every spine pair filled; ``sims[v, v']`` by pre-order rank."""

    sims: np.ndarray
    S: Spine
    S2: Spine
    trace: list[tuple[str, int, int]]

    def pairs(self) -> dict[tuple[int, int], int]:
        return {(v, v2): int(self.sims[v, v2]) for v in self.S.nodes for v2 in self.S2.nodes}


def _leaf_lines(st: SedState) -> None:
    """``sim(sub t, q')`` down ``S`` and ``sim(q, sub t')`` down ``S'`` for the spine leaves ``q``, ``q'``.

    Against a single node the similarity is the best single match, or 0.
    """
    F, G, E = st.F, st.G, st.eta
    q, q2 = st.S.nodes[-1], st.S2.nodes[-1]
    for t in st.S.nodes:
        col = E[t : t + int(F.size[t]), q2]
        st.set(t, q2, max(0, int(col.max())))
    for t2 in st.S2.nodes:
        row = E[q, t2 : t2 + int(G.size[t2])]
        st.set(q, t2, max(0, int(row.max())))


def _check_spine(F: Forest, S: Spine, name: str) -> None:
    if S.forest is not F and S.forest != F:
        raise ValueError(f"{name} is not a spine of the given forest")


def _run(F: Forest, G: Forest, S: Spine, S2: Spine, partial_sims: PartialSims, eta: np.ndarray,
         cfg: BBDConfig, cutoff: int | None, left_solver: bool) -> SedResult:
    _check_spine(F, S, "S")
    _check_spine(G, S2, "S'")
    eta = np.asarray(eta, dtype=np.int64)
    if eta.shape != (F.n + 1, G.n + 1):
        raise ValueError(f"eta must have shape {(F.n + 1, G.n + 1)}")
    st = SedState(F, G, S, S2, eta, _sims_table(partial_sims, F, G), cfg, left_solver)
    _leaf_lines(st)
    s, q, s2, q2 = S.nodes[0], S.nodes[-1], S2.nodes[0], S2.nodes[-1]
    if s != q and s2 != q2:
        _solve(DisedInstance(st, s, q, s2, q2), cutoff)
    return SedResult(st.sims, S, S2, st.trace)


def solve_sed(F: Forest, G: Forest, S: Spine, S2: Spine, partial_sims: PartialSims,
              cfg: BBDConfig = BBDConfig(), *, eta: np.ndarray, cutoff: int | None = None) -> SedResult:
    """``sim(sub(v), sub(v'))`` for all ``(v, v')`` in ``S x S'``.

    Parameters
    ----------
    partial_sims
        Subtree similarities for every pair not in ``S x S'``, as an encoded
        ``(n+1) x (n'+1)`` array or a callable on ranks.
    eta
        Encoded match weights by pre-order rank, from :func:`costs.eta_matrix`.
    cutoff
        Segments of ``S`` with at most this many off-spine nodes are solved
        row by row without further division.
    """
    return _run(F, G, S, S2, partial_sims, eta, cfg, cutoff, left_solver=False)


def solve_udised(F: Forest, G: Forest, S: Spine, S2: Spine, partial_sims: PartialSims,
                 cfg: BBDConfig = BBDConfig(), *, eta: np.ndarray, cutoff: int | None = None) -> SedResult:
    """:func:`solve_sed` for ``|F| >= |F'|``: only ``F`` is divided.

    Rows use left-border solves whose decomposition cuts ``F`` alone, so
    every kernel dimension stays within the augmented size of ``F'``.
    """
    return _run(F, G, S, S2, partial_sims, eta, cfg, cutoff, left_solver=True)


solve_sed_unbalanced = solve_udised


# -- cut similarities --------------------------------------------------------


def sim_w_cut(F: Forest, G: Forest, q: int, sims: PartialSims, cfg: BBDConfig = BBDConfig()) -> BorderDistances:
    """Border table of the alignment graph with the rows of ``sub(q)`` cut out.

    Runs on the augmented graph, so border points are bi-order positions.
    Diagonals leaving rows ``[l(q), r(q))`` are removed; a path can still
    cross those rows with zero edges, which deletes ``sub(q)``, or jump over
    them with the diagonal of an ancestor of ``q``.  The value is therefore at
    most ``sim`` and equals it whenever some ancestor of ``q`` is aligned.
    Pairs inside ``sub(q)`` are never read.
    """
    S = _sims_table(sims, F, G)
    S[q : q + int(F.size[q]), :] = NEG
    W = np.full((2 * F.n + 1, 2 * G.n + 1), NEG, dtype=np.int64)
    if F.n and G.n:
        W[np.ix_(F.lpos[1 : F.n + 1], G.lpos[1 : G.n + 1])] = S[1:, 1:]
    return solve_bbd(AlignGraph(augment(F), augment(G), W), cfg=cfg)


# -- top-level inputs --------------------------------------------------------


def single_node_sims(F: Forest, w: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """``max(0, max w(v) over v in F[x..y))`` for ``lo <= x <= y <= hi``, as ``out[x - lo, y - lo]``.

    ``w`` holds one encoded weight per rank: the match weights against a
    single node.  Filled by one left-to-right pass per ``x``.
    """
    k = hi - lo + 1
    out = np.zeros((k, k), dtype=np.int64)
    closing = [0] * (hi + 1)
    for p in range(lo, hi):
        if not F.opens[p]:
            closing[p] = int(F.biorder[p])
    for x in range(lo, hi + 1):
        best = 0
        for y in range(x + 1, hi + 1):
            v = closing[y - 1]
            if v and F.lpos[v] >= x and w[v] > best:
                best = int(w[v])
            out[x - lo, y - lo] = best
    INSTR.record_dp(k * k)
    return out


def local_positions(F: Forest, a: int, b: int) -> np.ndarray:
    """Bi-order position of ``x`` in the materialised ``F[a..b)``, for ``x`` in ``[a..b]`` (index ``x - a``)."""
    out = np.empty(b - a + 1, dtype=np.int64)
    c = 1
    for x in range(a, b + 1):
        out[x - a] = c
        if x < b:
            v = int(F.biorder[x])
            if F.lpos[v] >= a and F.rpos[v] <= b:
                c += 1
    return out


def _nodes(F: Forest, a: int, b: int) -> np.ndarray:
    return np.asarray(subforest(F, a, b).nodes(), dtype=np.int64)


def top_level_inputs(F: Forest, G: Forest, S: Spine, S2: Spine, sims: PartialSims, eta: np.ndarray,
                     cfg: BBDConfig = BBDConfig()) -> dict[str, dict[Quad, int]]:
    """Input families (i) to (v) of the whole-spine instance, keyed by ``(x, x', y, y')``.

    With ``q`` and ``q'`` the spine leaves, every family either involves a
    single node on one side (the interval pass of :func:`single_node_sims`)
    or two spine-free intervals (one :func:`solve_fed` call each way).
    """
    T = _sims_table(sims, F, G)
    E = np.asarray(eta, dtype=np.int64)
    s, q, s2, q2 = S.nodes[0], S.nodes[-1], S2.nodes[0], S2.nodes[-1]
    T[q, q2] = max(0, int(E[q, q2]))
    lF, rF, lG, rG = F.lpos, F.rpos, G.lpos, G.rpos
    ls, lq, rq, rs = int(lF[s]), int(lF[q]), int(rF[q]), int(rF[s])
    ls2, lq2, rq2, rs2 = int(lG[s2]), int(lG[q2]), int(rG[q2]), int(rG[s2])
    out: dict[str, dict[Quad, int]] = {k: {} for k in ("i", "ii", "iii", "iv", "v")}

    colF = single_node_sims(F, E[:, q2], ls, rs)
    rowG = single_node_sims(G, E[q, :], ls2, rs2)
    for x in range(ls, lq + 1):
        for y in range(rq, rs + 1):
            out["i"][(x, lq2, y, rq2)] = int(colF[x - ls, y - ls])
    for x2 in range(ls2, lq2 + 1):
        for y2 in range(rq2, rs2 + 1):
            out["i"][(lq, x2, rq, y2)] = int(rowG[x2 - ls2, y2 - ls2])
    for lo, hi, key in ((ls, lq, "ii"), (rq, rs, "iii")):
        for x in range(lo, hi + 1):
            for y in range(x, hi + 1):
                out[key][(x, lq2, y, rq2)] = int(colF[x - ls, y - ls])
    for lo, hi, key in ((ls2, lq2, "iv"), (rq2, rs2, "v")):
        for x2 in range(lo, hi + 1):
            for y2 in range(x2, hi + 1):
                out[key][(lq, x2, rq, y2)] = int(rowG[x2 - ls2, y2 - ls2])

    # F[x..r(q)) against F'[l(q')..y'): suffix against prefix.
    A, B = _nodes(F, ls, rq), _nodes(G, lq2, rs2)
    fed = solve_fed(F.induced(A), G.induced(B), _pad(T[np.ix_(A, B)]), cfg)
    la, lb = local_positions(F, ls, rq), local_positions(G, lq2, rs2)
    for x in range(ls, lq + 1):
        for y2 in range(rq2, rs2 + 1):
            out["i"][(x, lq2, rq, y2)] = int(fed.suffix_vs_prefix[la[x - ls], lb[y2 - lq2]])
    # F[l(q)..y) against F'[x'..r(q')): prefix against suffix.
    A, B = _nodes(F, lq, rs), _nodes(G, ls2, rq2)
    fed = solve_fed(F.induced(A), G.induced(B), _pad(T[np.ix_(A, B)]), cfg)
    la, lb = local_positions(F, lq, rs), local_positions(G, ls2, rq2)
    for y in range(rq, rs + 1):
        for x2 in range(ls2, lq2 + 1):
            out["i"][(lq, x2, y, rq2)] = int(fed.prefix_vs_suffix[la[y - lq], lb[x2 - ls2]])
    return out


def _pad(a: np.ndarray) -> np.ndarray:
    out = np.full((a.shape[0] + 1, a.shape[1] + 1), NEG, dtype=np.int64)
    out[1:, 1:] = a
    return out


__all__ = [
    "BASE_CUTOFF",
    "BorderIndexSets",
    "DisedInstance",
    "DisedOutput",
    "SedResult",
    "SedState",
    "augmented_block",
    "border_bot",
    "border_top",
    "dised",
    "dised_base",
    "dised_patch",
    "local_positions",
    "partition",
    "segment_size",
    "sim_w_cut",
    "single_node_sims",
    "solve_row",
    "solve_sed",
    "solve_sed_unbalanced",
    "solve_udised",
    "top_level_inputs",
]
