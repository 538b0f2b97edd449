"""Max-plus matrix products over the extended integers.

The compiled backend (``tedkit._kernels``) is used when importable; otherwise
the numpy fallback in ``tedkit._fallback`` is selected.  Setting the
environment variable ``TEDKIT_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from . import _fallback
from .costs import LOW, NEG, NEG_INF, ExtValue, from_ext, to_ext

try:
    if os.environ.get("TEDKIT_PURE") == "1":
        raise ImportError("fallback forced")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build
    _impl = _fallback
    BACKEND = "python"

DEBUG = os.environ.get("TEDKIT_DEBUG", "0") == "1"
"""When true, structured products validate their monotone tags."""


def backend_module(name: str | None = None):
    """Kernel module by name (``compiled`` or ``python``); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


# -- instrumentation ---------------------------------------------------------


@dataclass
class Instrumentation:
    """Counters for kernel calls and dynamic-programming relaxations."""

    calls: int = 0
    madds: int = 0
    dp_cells: int = 0
    max_dim: int = 0
    shapes: dict[str, int] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record_product(self, r: int, k: int, c: int) -> None:
        with self._lock:
            self.calls += 1
            self.madds += r * k * c
            self.max_dim = max(self.max_dim, r, k, c)

    def record_dp(self, cells: int) -> None:
        with self._lock:
            self.dp_cells += cells

    def reset(self) -> None:
        with self._lock:
            self.calls = self.madds = self.dp_cells = self.max_dim = 0

    @property
    def work(self) -> int:
        """Multiply-adds plus DP relaxations: the pipeline's arithmetic volume."""
        return self.madds + self.dp_cells

    def report(self) -> dict[str, int]:
        return {
            "kernel_calls": self.calls,
            "multiply_adds": self.madds,
            "dp_cells": self.dp_cells,
            "work": self.work,
            "max_dim": self.max_dim,
        }

    def to_json(self) -> str:
        return json.dumps(self.report(), sort_keys=True)


INSTR = Instrumentation()


@contextmanager
def instrumented() -> Iterator[Instrumentation]:
    """Reset the global counters and yield them."""
    INSTR.reset()
    yield INSTR


# -- matrices ----------------------------------------------------------------


@dataclass(frozen=True)
class ExtMatrix:
    """Row-major matrix over the extended integers."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.dtype != np.int64:
            raise ValueError("ExtMatrix needs a 2-d int64 array")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ExtValue]], cols: int | None = None) -> "ExtMatrix":
        if not rows:
            return cls(np.zeros((0, cols or 0), dtype=np.int64))
        return cls(np.array([[from_ext(x) for x in r] for r in rows], dtype=np.int64).reshape(len(rows), -1))

    @classmethod
    def identity(cls, n: int) -> "ExtMatrix":
        d = np.full((n, n), NEG, dtype=np.int64)
        np.fill_diagonal(d, 0)
        return cls(d)

    @classmethod
    def neg(cls, r: int, c: int) -> "ExtMatrix":
        return cls(np.full((r, c), NEG, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, ij: tuple[int, int]) -> ExtValue:
        return to_ext(self.data[ij])

    def to_rows(self) -> list[list[ExtValue]]:
        return [[to_ext(x) for x in r] for r in self.data]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExtMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))


class Orientation(str, Enum):
    ROW = "row-monotone"
    COLUMN = "column-monotone"
    NONE = "none"


@dataclass(frozen=True)
class MonotoneTag:
    """Declared structure of the right operand.

    ``ROW``: every row is non-decreasing from left to right.  ``COLUMN``: every
    column is non-decreasing from top to bottom.  Order is the extended order,
    so ``NEG_INF`` entries may only form a prefix.  ``bound`` caps finite entries
    to ``[0, bound]``.
    """

    orientation: Orientation = Orientation.NONE
    bound: int | None = None


class MonotoneTagError(ValueError):
    pass


def check_tag(B: np.ndarray, tag: MonotoneTag) -> None:
    """Raise naming the first entry that violates ``tag``."""
    if tag.bound is not None:
        bad = np.argwhere((B != NEG) & ((B < 0) | (B > tag.bound)))
        if len(bad):
            i, j = bad[0]
            raise MonotoneTagError(f"entry ({i},{j})={B[i, j]} outside [0,{tag.bound}]")
    if tag.orientation == Orientation.ROW and B.shape[1] > 1:
        bad = np.argwhere(B[:, 1:] < B[:, :-1])
        if len(bad):
            i, j = bad[0]
            raise MonotoneTagError(f"row {i} decreases at column {j + 1}")
    if tag.orientation == Orientation.COLUMN and B.shape[0] > 1:
        bad = np.argwhere(B[1:, :] < B[:-1, :])
        if len(bad):
            i, j = bad[0]
            raise MonotoneTagError(f"column {j} decreases at row {i + 1}")


# -- raw-array products ------------------------------------------------------


def mp(A: np.ndarray, B: np.ndarray, block: int | None = None, kernel: str = "naive",
       tag: MonotoneTag | None = None) -> np.ndarray:
    """Max-plus product of encoded arrays with instrumentation.

    ``block`` tiles every dimension into chunks of at most ``block``; the
    result is unchanged but no single kernel call exceeds that size.
    """
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch {A.shape} x {B.shape}")
    r, k = A.shape
    c = B.shape[1]
    if r == 0 or c == 0 or k == 0:
        return np.full((r, c), NEG, dtype=np.int64)
    if block is None or (r <= block and k <= block and c <= block):
        return _mp_call(A, B, kernel, tag)
    out = np.full((r, c), NEG, dtype=np.int64)
    for i0 in range(0, r, block):
        for j0 in range(0, c, block):
            acc = out[i0 : i0 + block, j0 : j0 + block]
            for k0 in range(0, k, block):
                part = _mp_call(
                    A[i0 : i0 + block, k0 : k0 + block],
                    B[k0 : k0 + block, j0 : j0 + block],
                    kernel,
                    tag,
                )
                np.maximum(acc, part, out=acc)
    return out


def _mp_call(A: np.ndarray, B: np.ndarray, kernel: str, tag: MonotoneTag | None) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    INSTR.record_product(A.shape[0], A.shape[1], B.shape[1])
    if tag is not None and DEBUG:
        check_tag(B, tag)
    if kernel == "monotone" and tag is not None and tag.orientation != Orientation.NONE:
        if tag.orientation == Orientation.ROW:
            return _row_monotone(A, B)
        return _column_monotone(A, B)
    return _impl.maxplus(A, B)


def _row_monotone(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Rows of ``B`` non-decreasing: each row contributes at its step points only."""
    r, k = A.shape
    c = B.shape[1]
    good = np.ones(k, dtype=bool)
    if c > 1:
        good = ~(B[:, 1:] < B[:, :-1]).any(axis=1)
    out = np.full((r, c), NEG, dtype=np.int64)
    if good.any():
        Bg = B[good]
        prev = np.concatenate([np.full((Bg.shape[0], 1), NEG, dtype=np.int64), Bg[:, :-1]], axis=1)
        ek, ej = np.nonzero((Bg != prev) & (Bg != NEG))
        if len(ek):
            rows = np.nonzero(good)[0][ek]
            vals = A[:, rows] + Bg[ek, ej][None, :]
            vals[(A[:, rows] == NEG)] = NEG
            order = np.argsort(ej, kind="stable")
            ej, vals = ej[order], vals[:, order]
            starts = np.concatenate([[0], np.nonzero(np.diff(ej))[0] + 1])
            red = np.maximum.reduceat(vals, starts, axis=1)
            out[:, ej[starts]] = red
            np.maximum.accumulate(out, axis=1, out=out)
    if (~good).any():
        bad = np.nonzero(~good)[0]
        np.maximum(out, _impl.maxplus(np.ascontiguousarray(A[:, bad]), np.ascontiguousarray(B[bad])), out=out)
    out[out < LOW] = NEG
    return out


def _column_monotone(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Columns of ``B`` non-decreasing: constant runs meet range maxima of ``A``."""
    r, k = A.shape
    c = B.shape[1]
    good = np.ones(c, dtype=bool)
    if k > 1:
        good = ~(B[1:, :] < B[:-1, :]).any(axis=0)
    out = np.full((r, c), NEG, dtype=np.int64)
    table = [A]
    span = 1
    while 2 * span <= k:
        prev = table[-1]
        table.append(np.maximum(prev[:, : k - 2 * span + 1], prev[:, span : k - span + 1]))
        span *= 2
    for j in np.nonzero(good)[0]:
        col = B[:, j]
        cuts = np.concatenate([[0], np.nonzero(np.diff(col))[0] + 1, [k]])
        best = out[:, j]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            b = col[lo]
            if b == NEG:
                continue
            lvl = int(hi - lo).bit_length() - 1
            seg = np.maximum(table[lvl][:, lo], table[lvl][:, hi - (1 << lvl)])
            cand = seg + b
            cand[seg == NEG] = NEG
            np.maximum(best, cand, out=best)
    if (~good).any():
        bad = np.nonzero(~good)[0]
        out[:, bad] = _impl.maxplus(A, np.ascontiguousarray(B[:, bad]))
    return out


# -- public API on ExtMatrix --------------------------------------------------


def maxplus(A: ExtMatrix, B: ExtMatrix) -> ExtMatrix:
    """``C[i][j] = max_k A[i][k] + B[k][j]``; an empty inner dimension gives all NEG_INF."""
    return ExtMatrix(mp(A.data, B.data))


def maxplus_structured(A: ExtMatrix, B: ExtMatrix, tag: MonotoneTag, kernel: str = "monotone",
                       debug: bool = True) -> ExtMatrix:
    """Same result as :func:`maxplus`; may exploit the declared structure of ``B``."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch {A.data.shape} x {B.data.shape}")
    if debug:
        check_tag(B.data, tag)
    return ExtMatrix(mp(A.data, B.data, kernel=kernel, tag=tag))


def maxplus3(A: ExtMatrix, B: ExtMatrix, C: ExtMatrix) -> ExtMatrix:
    """``(A * B) * C``."""
    return maxplus(maxplus(A, B), C)


__all__ = [
    "BACKEND",
    "ExtMatrix",
    "INSTR",
    "Instrumentation",
    "MonotoneTag",
    "MonotoneTagError",
    "NEG_INF",
    "Orientation",
    "instrumented",
    "maxplus",
    "maxplus3",
    "maxplus_structured",
    "mp",
]
