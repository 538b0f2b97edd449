"""Edit costs, match weights and the similarity/distance conversion.

Scalars live in the extended integers: a finite ``int`` or ``NEG_INF``.
Arrays use ``int64`` storage where the reserved value ``NEG`` encodes
``NEG_INF``; every arithmetic helper treats it as absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from .forest_core import VIRTUAL_ROOT, Forest

NEG = -(1 << 62)
"""Storage encoding of NEG_INF inside int64 arrays."""

LOW = -(1 << 61)
"""Any array entry below LOW after an addition stands for NEG_INF."""

COST_CAP = 1 << 31


class _NegInf:
    """The absorbing element of the extended integers."""

    _instance: "_NegInf | None" = None

    def __new__(cls) -> "_NegInf":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NEG_INF"

    def __add__(self, other: object) -> "_NegInf":
        if isinstance(other, (int, _NegInf)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __lt__(self, other: object) -> bool:
        if isinstance(other, int):
            return True
        if isinstance(other, _NegInf):
            return False
        return NotImplemented

    def __le__(self, other: object) -> bool:
        return isinstance(other, (int, _NegInf))

    def __gt__(self, other: object) -> bool:
        return False

    def __ge__(self, other: object) -> bool:
        return isinstance(other, _NegInf)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _NegInf)

    def __hash__(self) -> int:
        return hash("NEG_INF")

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()
ExtValue = Union[int, _NegInf]


def is_neg_inf(x: object) -> bool:
    return isinstance(x, _NegInf)


def ext_add(a: ExtValue, b: ExtValue) -> ExtValue:
    if isinstance(a, _NegInf) or isinstance(b, _NegInf):
        return NEG_INF
    return a + b


def ext_max(*xs: ExtValue) -> ExtValue:
    best: ExtValue = NEG_INF
    for x in xs:
        if not isinstance(x, _NegInf) and (isinstance(best, _NegInf) or x > best):
            best = x
    return best


def to_ext(x: int) -> ExtValue:
    """Decode one array entry."""
    x = int(x)
    return NEG_INF if x <= LOW else x


def from_ext(x: ExtValue) -> int:
    """Encode one scalar for array storage."""
    return NEG if isinstance(x, _NegInf) else int(x)


def add_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise extended addition of encoded arrays (broadcasting)."""
    s = np.add(a, b, dtype=np.int64)
    s[s < LOW] = NEG
    return s


class CostKind(str, Enum):
    WEIGHTED = "weighted"
    UNWEIGHTED = "unweighted"


class CostFileError(ValueError):
    """Raised for malformed cost files."""


@dataclass(frozen=True)
class CostModel:
    """Integer edit costs ``delta``.

    Unknown labels fall back to ``default = (del, ins, sub)``; ``sub`` of two
    equal unknown labels is 0.  The virtual root costs nothing to delete or
    insert and can only be matched to another virtual root.
    """

    delete: Mapping[str, int] = field(default_factory=dict)
    insert: Mapping[str, int] = field(default_factory=dict)
    substitute: Mapping[tuple[str, str], int] = field(default_factory=dict)
    default: tuple[int, int, int] = (1, 1, 1)
    kind: CostKind = CostKind.WEIGHTED

    def __post_init__(self) -> None:
        values = [*self.delete.values(), *self.insert.values(), *self.substitute.values(), *self.default]
        for c in values:
            if not isinstance(c, (int, np.integer)) or c < 0 or c > COST_CAP:
                raise ValueError(f"cost {c!r} outside [0, 2^31]")
        if self.kind == CostKind.UNWEIGHTED and (
            self.delete or self.insert or self.substitute or tuple(self.default) != (1, 1, 1)
        ):
            raise ValueError("unweighted models carry no explicit costs")

    @classmethod
    def unweighted(cls) -> "CostModel":
        return cls(kind=CostKind.UNWEIGHTED)

    @property
    def is_unweighted(self) -> bool:
        return self.kind == CostKind.UNWEIGHTED

    def del_cost(self, a: str) -> int:
        if a == VIRTUAL_ROOT:
            return 0
        return int(self.delete.get(a, self.default[0]))

    def ins_cost(self, b: str) -> int:
        if b == VIRTUAL_ROOT:
            return 0
        return int(self.insert.get(b, self.default[1]))

    def sub_cost(self, a: str, b: str) -> int:
        got = self.substitute.get((a, b))
        if got is not None:
            return int(got)
        return 0 if a == b else int(self.default[2])


def eta(m: CostModel, a: str, b: str) -> ExtValue:
    """Match weight ``delta(a, eps) + delta(eps, b) - delta(a, b)``."""
    ra, rb = a == VIRTUAL_ROOT, b == VIRTUAL_ROOT
    if ra or rb:
        return 0 if ra and rb else NEG_INF
    return m.del_cost(a) + m.ins_cost(b) - m.sub_cost(a, b)


def eta_matrix(m: CostModel, F: Forest, G: Forest) -> np.ndarray:
    """Encoded ``(n+1) x (n'+1)`` table of ``eta(v, v')`` by pre-order rank.

    Row and column 0 are unused and hold NEG.
    """
    la = sorted(set(F.labels))
    lb = sorted(set(G.labels))
    small = np.empty((len(la), len(lb)), dtype=np.int64)
    for i, a in enumerate(la):
        for j, b in enumerate(lb):
            small[i, j] = from_ext(eta(m, a, b))
    ia = {a: i for i, a in enumerate(la)}
    ib = {b: j for j, b in enumerate(lb)}
    out = np.full((F.n + 1, G.n + 1), NEG, dtype=np.int64)
    if F.n and G.n:
        rows = np.array([ia[a] for a in F.labels])
        cols = np.array([ib[b] for b in G.labels])
        out[1:, 1:] = small[np.ix_(rows, cols)]
    return out


def total_delete(m: CostModel, F: Forest) -> int:
    return sum(m.del_cost(a) for a in F.labels)


def total_insert(m: CostModel, G: Forest) -> int:
    return sum(m.ins_cost(b) for b in G.labels)


def sim_to_ed(m: CostModel, F: Forest, G: Forest, s: ExtValue) -> int:
    """``sum delta(v, eps) + sum delta(eps, v') - sim``."""
    if isinstance(s, _NegInf):
        raise ValueError("similarity is NEG_INF; a virtual root was matched to a real node")
    return total_delete(m, F) + total_insert(m, G) - int(s)


def load_cost_file(path: str | Path) -> CostModel:
    """Read ``DEL``/``INS``/``SUB``/``DEFAULT`` lines (tab or space separated)."""
    dele: dict[str, int] = {}
    ins: dict[str, int] = {}
    sub: dict[tuple[str, str], int] = {}
    default = (1, 1, 1)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CostFileError(str(exc)) from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            head = parts[0]
            if head == "DEL" and len(parts) == 3:
                dele[parts[1]] = int(parts[2])
            elif head == "INS" and len(parts) == 3:
                ins[parts[1]] = int(parts[2])
            elif head == "SUB" and len(parts) == 4:
                sub[(parts[1], parts[2])] = int(parts[3])
            elif head == "DEFAULT" and len(parts) == 4:
                default = (int(parts[1]), int(parts[2]), int(parts[3]))
            else:
                raise CostFileError(f"line {lineno}: cannot parse {raw!r}")
        except CostFileError:
            raise
        except ValueError as exc:
            raise CostFileError(f"line {lineno}: {exc}") from exc
    try:
        return CostModel(dele, ins, sub, default)
    except ValueError as exc:
        raise CostFileError(str(exc)) from exc
