"""Finite binary systems stored as Cayley tables.

Elements are the integers ``0..n-1``. ``table[a, x]`` is the product ``a*x``.
Division tables are filled eagerly whenever the matching axiom holds:

* ``ldiv[a, b] = a \\ b``, the unique ``x`` with ``a*x = b``
* ``rdiv[a, b] = b / a``, the unique ``y`` with ``y*a = b``

so both division tables are indexed by the *divisor* first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import AxiomError, ConstructionError

INDEX_DTYPE = np.int64


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=INDEX_DTYPE)
    arr.setflags(write=False)
    return arr


def _inverse_rows(table: np.ndarray) -> Optional[np.ndarray]:
    """Row-wise inverse permutations, or None if some row is not a permutation."""
    n = table.shape[0]
    ident = np.arange(n)
    if not np.all(np.sort(table, axis=1) == ident):
        return None
    inv = np.empty_like(table)
    rows = np.repeat(ident, n)
    inv[rows, table.ravel()] = np.tile(ident, n)
    return inv


@dataclass(frozen=True, eq=False)
class FiniteMagma:
    """An order-``n`` magma with optional division tables and unit."""

    order: int
    table: np.ndarray
    ldiv: Optional[np.ndarray] = None
    rdiv: Optional[np.ndarray] = None
    unit: Optional[int] = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMagma):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.order, self.table.tobytes()))

    def __repr__(self) -> str:
        flags = []
        if self.ldiv is not None:
            flags.append("left")
        if self.rdiv is not None:
            flags.append("right")
        if self.unit is not None:
            flags.append(f"unit={self.unit}")
        return f"FiniteMagma(order={self.order}, {', '.join(flags) or 'plain'})"

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @property
    def is_quasigroup(self) -> bool:
        return self.ldiv is not None and self.rdiv is not None

    @property
    def is_loop(self) -> bool:
        return self.is_quasigroup and self.unit is not None

    def is_associative(self) -> bool:
        t = self.table
        return bool(np.array_equal(t[t], t[np.arange(self.order)[:, None, None], t[None, :, :]]))

    def rows(self) -> list[list[int]]:
        return self.table.tolist()


def magma_from_table(order: int, table) -> FiniteMagma:
    """Validate ``table`` and build a magma with every derivable field filled in."""
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise ConstructionError(f"order must be a positive integer, got {order!r}")
    order = int(order)
    rows = list(table)
    if len(rows) != order:
        raise ConstructionError(f"table has {len(rows)} rows, expected {order}")
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != order:
            raise ConstructionError(f"row {i} has {len(row)} entries, expected {order}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < order:
                raise ConstructionError(
                    f"cell ({i}, {j}) holds {v!r}, expected an integer in 0..{order - 1}"
                )
    arr = np.array([list(r) for r in rows], dtype=INDEX_DTYPE).reshape(order, order)
    return _build(arr)


def _build(arr: np.ndarray) -> FiniteMagma:
    ldiv = _inverse_rows(arr)
    rdiv = _inverse_rows(arr.T)
    return FiniteMagma(
        order=arr.shape[0],
        table=_frozen(arr),
        ldiv=None if ldiv is None else _frozen(ldiv),
        rdiv=None if rdiv is None else _frozen(rdiv),
        unit=_find_unit(arr),
    )


def magma_from_array(arr: np.ndarray) -> FiniteMagma:
    """Fast path for tables produced internally; still range-checks entries."""
    arr = np.asarray(arr, dtype=INDEX_DTYPE)
    n = arr.shape[0]
    if arr.ndim != 2 or arr.shape != (n, n) or n < 1:
        raise ConstructionError(f"expected a square table, got shape {arr.shape}")
    bad = np.argwhere((arr < 0) | (arr >= n))
    if len(bad):
        i, j = bad[0]
        raise ConstructionError(f"cell ({i}, {j}) holds {arr[i, j]}, expected 0..{n - 1}")
    return _build(arr.copy())


def _find_unit(arr: np.ndarray) -> Optional[int]:
    n = arr.shape[0]
    ident = np.arange(n)
    for e in range(n):
        if np.array_equal(arr[e], ident) and np.array_equal(arr[:, e], ident):
            return e
    return None


def is_left_quasigroup(m: FiniteMagma) -> bool:
    """Every left translation ``x -> a*x`` is a bijection."""
    return m.ldiv is not None


def is_right_quasigroup(m: FiniteMagma) -> bool:
    """Every right translation ``y -> y*a`` is a bijection."""
    return m.rdiv is not None


def div_l(m: FiniteMagma, a: int, b: int) -> int:
    """``a \\ b``: the unique ``x`` with ``a*x = b``."""
    if m.ldiv is None:
        raise AxiomError("left division needs every row to be a permutation")
    return int(m.ldiv[a, b])


def div_r(m: FiniteMagma, a: int, b: int) -> int:
    """``b / a``: the unique ``y`` with ``y*a = b``."""
    if m.rdiv is None:
        raise AxiomError("right division needs every column to be a permutation")
    return int(m.rdiv[a, b])


def find_unit(m: FiniteMagma) -> Optional[int]:
    return m.unit


def one_sided_units(m: FiniteMagma) -> tuple[list[int], list[int]]:
    """Return (left units, right units): ``e*g = g`` resp. ``g*e = g`` for all g."""
    ident = np.arange(m.order)
    left = [e for e in m.elements if np.array_equal(m.table[e], ident)]
    right = [e for e in m.elements if np.array_equal(m.table[:, e], ident)]
    return left, right


@dataclass(frozen=True)
class ElementSubset:
    """A subset of the elements of an order-``parent_order`` magma."""

    parent_order: int
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        members = frozenset(int(x) for x in self.members)
        bad = [x for x in members if not 0 <= x < self.parent_order]
        if bad:
            raise ValueError(f"elements {sorted(bad)} outside 0..{self.parent_order - 1}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, parent_order: int, members: Iterable[int]) -> "ElementSubset":
        return cls(parent_order, frozenset(members))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "ElementSubset":
        return cls(len(mask), frozenset(np.flatnonzero(mask).tolist()))

    def __contains__(self, x: object) -> bool:
        return x in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __and__(self, other: "ElementSubset") -> "ElementSubset":
        return ElementSubset(self.parent_order, self.members & other.members)

    def __le__(self, other: "ElementSubset") -> bool:
        return self.members <= other.members

    def mask(self) -> np.ndarray:
        out = np.zeros(self.parent_order, dtype=bool)
        out[list(self.members)] = True
        return out

    def array(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=INDEX_DTYPE)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def is_full(self) -> bool:
        return len(self.members) == self.parent_order
