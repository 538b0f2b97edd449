"""Reproducible random forests.

Nodes are inserted one at a time.  Each new node picks its parent uniformly
among the existing nodes and the virtual root (node 0), then takes a uniform
position among that parent's children.  With ``bias > 0`` the parent is, with
that probability, the most recently inserted node instead, which produces
deeper trees.  Labels are drawn uniformly from the first ``alphabet`` letters
of ``abcdefghijklmnopqrstuvwxyz``.
"""

from __future__ import annotations

import random
import string

from .costs import CostModel
from .forest_core import Forest

LETTERS = string.ascii_lowercase


def random_forest(n: int, rng: random.Random, alphabet: int = 4, bias: float = 0.0) -> Forest:
    """Random forest with ``n`` nodes drawn from ``rng``."""
    kids: list[list[int]] = [[]]
    labels = [""]
    for v in range(1, n + 1):
        if bias > 0 and v > 1 and rng.random() < bias:
            p = v - 1
        else:
            p = rng.randrange(v)
        kids.append([])
        labels.append(LETTERS[rng.randrange(alphabet)])
        sib = kids[p]
        sib.insert(rng.randrange(len(sib) + 1), v)
    out_labels: list[str] = []
    parents: list[int] = []
    stack = [(c, 0) for c in reversed(kids[0])]
    while stack:
        v, p = stack.pop()
        out_labels.append(labels[v])
        parents.append(p)
        me = len(out_labels)
        stack.extend((c, me) for c in reversed(kids[v]))
    return Forest(out_labels, parents)


def random_tree(n: int, rng: random.Random, alphabet: int = 4, bias: float = 0.0) -> Forest:
    """Random tree: a random forest of ``n - 1`` nodes under one root."""
    if n <= 0:
        return Forest([], [])
    f = random_forest(n - 1, rng, alphabet, bias)
    return Forest([LETTERS[rng.randrange(alphabet)], *f.labels], [0] + [int(p) + 1 for p in f.parent[1:]])


def random_costs(rng: random.Random, alphabet: int = 4, high: int = 10) -> CostModel:
    """Integer costs in ``[0, high]`` with ``sub(a, a) = 0``."""
    letters = LETTERS[:alphabet]
    dele = {a: rng.randint(0, high) for a in letters}
    ins = {a: rng.randint(0, high) for a in letters}
    sub = {(a, b): (0 if a == b else rng.randint(0, high)) for a in letters for b in letters}
    return CostModel(dele, ins, sub, default=(1, 1, 1))
