"""Ordered labeled forests with pre-order, bi-order and pi indices.

Nodes are addressed by their 1-based pre-order rank.  Bi-order positions
are 1-based as well: ``lpos(v)`` is the first occurrence of ``v`` and
``rpos(v)`` is one plus the second occurrence, so that ``sub(v)`` is the
subforest ``F[lpos(v)..rpos(v))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

VIRTUAL_ROOT = "^"
"""Reserved label of an attached virtual root; not producible by the parser."""

_LABEL = re.compile(r"[A-Za-z0-9_]+")


class ForestSyntaxError(ValueError):
    """Raised when bracket notation cannot be parsed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class Forest:
    """Immutable ordered forest.

    Parameters
    ----------
    labels
        Node labels in pre-order.
    parents
        Pre-order rank of each node's parent, ``0`` for roots.  The sequence
        must describe a valid pre-order: every parent lies on the path from
        the previous node to its root.
    """

    __slots__ = ("labels", "parent", "__dict__")

    def __init__(self, labels: Sequence[str], parents: Sequence[int]):
        if len(labels) != len(parents):
            raise ValueError("labels and parents differ in length")
        n = len(labels)
        stack: list[int] = []
        for v in range(1, n + 1):
            p = int(parents[v - 1])
            while stack and stack[-1] != p:
                stack.pop()
            if p != 0 and not stack:
                raise ValueError(f"parent sequence is not a pre-order at node {v}")
            stack.append(v)
        self.labels: tuple[str, ...] = tuple(labels)
        self.parent = np.zeros(n + 1, dtype=np.int64)
        self.parent[1:] = np.asarray(parents, dtype=np.int64)
        self.parent.setflags(write=False)

    # -- basic shape -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def label(self, v: int) -> str:
        return self.labels[v - 1]

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """``children[v]`` for ``v`` in ``0..n``; index 0 lists the roots."""
        kids: list[list[int]] = [[] for _ in range(self.n + 1)]
        for v in range(1, self.n + 1):
            kids[int(self.parent[v])].append(v)
        return tuple(tuple(k) for k in kids)

    @property
    def roots(self) -> tuple[int, ...]:
        return self.children[0]

    @cached_property
    def size(self) -> np.ndarray:
        """Subtree sizes, index 0 holds ``n``."""
        s = np.ones(self.n + 1, dtype=np.int64)
        for v in range(self.n, 0, -1):
            s[int(self.parent[v])] += s[v]
        s[0] = self.n
        s.setflags(write=False)
        return s

    @cached_property
    def depth(self) -> np.ndarray:
        """Number of proper ancestors of each node."""
        d = np.zeros(self.n + 1, dtype=np.int64)
        for v in range(1, self.n + 1):
            p = int(self.parent[v])
            d[v] = d[p] + 1 if p else 0
        d.setflags(write=False)
        return d

    @cached_property
    def pi(self) -> np.ndarray:
        """``pi[i]`` for ``i`` in ``1..n``; ``pi[0]`` is unused."""
        p = np.arange(self.n + 1, dtype=np.int64) + self.size
        p[0] = 0
        p.setflags(write=False)
        return p

    @cached_property
    def lpos(self) -> np.ndarray:
        """First bi-order occurrence; ``lpos[n+1] = 2n+1`` is a sentinel."""
        self._bi_order()
        return self.__dict__["lpos"]

    @cached_property
    def rpos(self) -> np.ndarray:
        """One plus the second bi-order occurrence."""
        self._bi_order()
        return self.__dict__["rpos"]

    @cached_property
    def biorder(self) -> np.ndarray:
        """Node at each bi-order position ``1..2n`` (index 0 unused)."""
        self._bi_order()
        return self.__dict__["biorder"]

    @cached_property
    def opens(self) -> np.ndarray:
        """``opens[p]`` is true when position ``p`` is a first occurrence."""
        self._bi_order()
        return self.__dict__["opens"]

    def _bi_order(self) -> None:
        if "biorder" in self.__dict__:
            return
        n = self.n
        lpos = np.zeros(n + 2, dtype=np.int64)
        rpos = np.zeros(n + 2, dtype=np.int64)
        seq = np.zeros(2 * n + 1, dtype=np.int64)
        opens = np.zeros(2 * n + 2, dtype=bool)
        pos = 1
        stack: list[int] = []
        for v in range(1, n + 1):
            p = int(self.parent[v])
            while stack and stack[-1] != p:
                u = stack.pop()
                seq[pos] = u
                rpos[u] = pos + 1
                pos += 1
            seq[pos] = v
            opens[pos] = True
            lpos[v] = pos
            pos += 1
            stack.append(v)
        while stack:
            u = stack.pop()
            seq[pos] = u
            rpos[u] = pos + 1
            pos += 1
        lpos[n + 1] = 2 * n + 1
        rpos[n + 1] = 2 * n + 2
        for a in (lpos, rpos, seq, opens):
            a.setflags(write=False)
        self.__dict__.update(lpos=lpos, rpos=rpos, biorder=seq, opens=opens)

    # -- text --------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical bracket notation without whitespace."""
        out: list[str] = []
        after_sibling = False
        for p in range(1, 2 * self.n + 1):
            v = int(self.biorder[p])
            if self.opens[p]:
                if after_sibling:
                    out.append(",")
                out.append(self.label(v))
                if self.children[v]:
                    out.append("(")
                    after_sibling = False
                else:
                    after_sibling = True
            else:
                if self.children[v]:
                    out.append(")")
                after_sibling = True
        return "".join(out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Forest({self.to_text()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Forest):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.parent, other.parent)

    def __hash__(self) -> int:
        return hash((self.labels, self.parent.tobytes()))

    # -- derived forests ---------------------------------------------------

    def induced(self, ranks: Sequence[int]) -> "Forest":
        """Forest induced on ``ranks`` (ascending); parents become nearest kept ancestors."""
        keep = {int(v): i + 1 for i, v in enumerate(ranks)}
        labels = []
        parents = []
        for v in ranks:
            v = int(v)
            p = int(self.parent[v])
            while p and p not in keep:
                p = int(self.parent[p])
            labels.append(self.label(v))
            parents.append(keep.get(p, 0))
        return Forest(labels, parents)

    def left_count(self, v: int) -> int:
        """``|F[1..lpos(v))|``: nodes entirely before ``v``."""
        return v - 1 - int(self.depth[v])

    def right_count(self, v: int) -> int:
        """``|F[rpos(v)..2n+1)|``: nodes entirely after ``v``."""
        return self.n - (v + int(self.size[v]) - 1)

    def ancestors(self, v: int) -> list[int]:
        """Proper ancestors of ``v`` from the parent upwards."""
        out = []
        p = int(self.parent[v])
        while p:
            out.append(p)
            p = int(self.parent[p])
        return out


@dataclass(frozen=True)
class SubforestRef:
    """View of ``F[x..y)``: nodes with ``x <= lpos(v)`` and ``rpos(v) <= y``."""

    forest: Forest
    x: int
    y: int

    def nodes(self) -> list[int]:
        F = self.forest
        return [v for v in range(1, F.n + 1) if self.x <= F.lpos[v] and F.rpos[v] <= self.y]

    def materialize(self) -> Forest:
        return self.forest.induced(self.nodes())

    def __len__(self) -> int:
        return len(self.nodes())


@dataclass(frozen=True)
class Spine:
    """Root-to-leaf path, listed from the root downwards."""

    forest: Forest
    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        F = self.forest
        if not self.nodes:
            raise ValueError("empty spine")
        if int(F.parent[self.nodes[0]]) != 0:
            raise ValueError("spine must start at a root")
        for a, b in zip(self.nodes, self.nodes[1:]):
            if int(F.parent[b]) != a:
                raise ValueError("spine nodes must form a parent-child chain")
        if F.children[self.nodes[-1]]:
            raise ValueError("spine must end at a leaf")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


def parse_forest(text: str) -> Forest:
    """Parse bracket notation ``FOREST := TREE ("," TREE)*``.

    Whitespace between tokens is ignored.  Empty input yields the empty forest.
    Syntax errors report the byte offset of the offending character.
    """
    labels: list[str] = []
    parents: list[int] = []
    size = len(text)

    def fail(message: str, i: int) -> ForestSyntaxError:
        return ForestSyntaxError(message, len(text[:i].encode("utf-8")))

    def skip(i: int) -> int:
        while i < size and text[i] in " \t\r\n":
            i += 1
        return i

    i = skip(0)
    if i == size:
        return Forest([], [])
    stack = [0]
    expect_tree = True
    while True:
        i = skip(i)
        if expect_tree:
            m = _LABEL.match(text, i)
            if m is None:
                raise fail("expected label", i)
            labels.append(m.group(0))
            parents.append(stack[-1])
            i = skip(m.end())
            expect_tree = False
            if i < size and text[i] == "(":
                stack.append(len(labels))
                i += 1
                expect_tree = True
            continue
        if i == size:
            if len(stack) > 1:
                raise fail("unclosed '('", i)
            break
        c = text[i]
        if c == ",":
            expect_tree = True
        elif c == ")":
            if len(stack) == 1:
                raise fail("unbalanced ')'", i)
            stack.pop()
        else:
            raise fail(f"unexpected {c!r}", i)
        i += 1
    return Forest(labels, parents)


def pi_map(F: Forest) -> list[int]:
    """``pi(i) = i + |sub(v_i)|`` for ``i = 1..n``."""
    return [int(x) for x in F.pi[1:]]


def subforest(F: Forest, x: int, y: int) -> SubforestRef:
    if not (1 <= x <= y <= 2 * F.n + 1):
        raise IndexError(f"invalid subforest range [{x}..{y}) for n={F.n}")
    return SubforestRef(F, x, y)


def reverse_ranks(F: Forest) -> np.ndarray:
    """Map from ranks of ``F`` to ranks of ``reverse(F)``."""
    order: list[int] = []
    stack = list(F.roots)
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(F.children[v])
    rank = np.zeros(F.n + 1, dtype=np.int64)
    for i, v in enumerate(order):
        rank[v] = i + 1
    return rank


def reverse(F: Forest) -> Forest:
    """Mirror image: children order reversed at every node."""
    rank = reverse_ranks(F)
    labels = [""] * F.n
    parents = [0] * F.n
    for v in range(1, F.n + 1):
        labels[rank[v] - 1] = F.label(v)
        p = int(F.parent[v])
        parents[rank[v] - 1] = int(rank[p]) if p else 0
    return Forest(labels, parents)


def with_virtual_root(F: Forest) -> Forest:
    """Attach a virtual root above all roots; old rank ``v`` becomes ``v + 1``."""
    labels = [VIRTUAL_ROOT, *F.labels]
    parents = [0] + [int(p) + 1 for p in F.parent[1:]]
    return Forest(labels, parents)


def heavy_spine(F: Forest) -> Spine:
    """Spine whose leaf ``v`` has at most ``|F|/2`` nodes on each side.

    Walks down from an implicit virtual root, always taking the rightmost
    child ``w`` with ``|F[1..lpos(w))| <= |F|/2``.
    """
    if F.n == 0:
        raise ValueError("heavy_spine of an empty forest")
    half2 = F.n  # compare 2*count <= n to stay in integers
    path: list[int] = []
    kids = F.roots
    while kids:
        w = kids[0]
        for c in kids:
            if 2 * F.left_count(c) <= half2:
                w = c
        path.append(w)
        kids = F.children[w]
    return Spine(F, tuple(path))


def is_synchronous(F: Forest, x: int, y: int) -> bool:
    """True iff ``F[x..y)`` is the union of subtrees of consecutive siblings."""
    nodes = subforest(F, x, y).nodes()
    if not nodes:
        return False
    tops = [v for v in nodes if int(F.parent[v]) == 0 or not _inside(F, int(F.parent[v]), x, y)]
    p = int(F.parent[tops[0]])
    if any(int(F.parent[t]) != p for t in tops):
        return False
    sibs = F.children[p]
    idx = [sibs.index(t) for t in tops]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        return False
    return sum(int(F.size[t]) for t in tops) == len(nodes)


def _inside(F: Forest, v: int, x: int, y: int) -> bool:
    return x <= F.lpos[v] and F.rpos[v] <= y


def spine_left_right(F: Forest, spine: Spine) -> tuple[list[int], list[int]]:
    """Ranks strictly left and strictly right of a spine, in pre-order."""
    leaf = spine.nodes[-1]
    on = set(spine.nodes)
    left = [v for v in range(1, leaf) if v not in on]
    right = list(range(leaf + 1, F.n + 1))
    return left, right
