"""Invertible maps between a linear index s and multi-indices (j, k, ...).

All indices in the public interface are 1-based. ``s`` runs over
``1..N`` and the p-th component of a multi-index runs over ``1..n_p``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Iterable, Sequence

import numpy as np

from qhc.errors import DimensionError, IndexRangeError, ValidationError


class Convention(str, enum.Enum):
    ROW_MAJOR = "row-major"  # last index varies fastest
    COL_MAJOR = "col-major"  # first index varies fastest
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class DimensionFactorization:
    """An ordered factorization N = n_1 * ... * n_l."""

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        factors = tuple(int(n) for n in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise ValidationError("factor-count", 0, "a factorization needs at least one factor")
        bad = [n for n in factors if n < 2]
        if bad:
            raise ValidationError("factor-size", min(bad), f"every factor must be >= 2, got {factors}")

    @property
    def total(self) -> int:
        return math.prod(self.factors)

    @property
    def parts(self) -> int:
        return len(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def label(self) -> str:
        return "x".join(str(n) for n in self.factors)


def _rowmajor_multi(factors: Sequence[int]) -> list[tuple[int, ...]]:
    return [tuple(i + 1 for i in t) for t in product(*(range(n) for n in factors))]


@dataclass(frozen=True)
class IndexMap:
    """Bijection s <-> (j_1, ..., j_l) for a given factorization.

    ``table`` is only used with ``Convention.EXPLICIT``; entry ``s - 1`` is
    the multi-index assigned to ``s``.
    """

    factorization: DimensionFactorization
    convention: Convention = Convention.ROW_MAJOR
    table: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.factorization, DimensionFactorization):
            object.__setattr__(self, "factorization", DimensionFactorization(tuple(self.factorization)))
        object.__setattr__(self, "convention", Convention(self.convention))
        if self.convention is Convention.EXPLICIT:
            if self.table is None:
                raise ValidationError("table", 0, "explicit convention requires a table")
            table = tuple(tuple(int(c) for c in row) for row in self.table)
            object.__setattr__(self, "table", table)
            self._check_table(table)
        elif self.table is not None:
            raise ValidationError("table", 0, "a table is only allowed with the explicit convention")

    def _check_table(self, table: tuple[tuple[int, ...], ...]) -> None:
        factors = self.factors
        if len(table) != self.total:
            raise ValidationError("table-size", abs(len(table) - self.total),
                                  f"table has {len(table)} rows, expected {self.total}")
        seen = set()
        for s, idx in enumerate(table, start=1):
            if len(idx) != len(factors) or any(not 1 <= c <= n for c, n in zip(idx, factors)):
                raise ValidationError("table-entry", s, f"row {s} holds out-of-box multi-index {idx}")
            if idx in seen:
                raise ValidationError("table-bijection", s, f"multi-index {idx} appears more than once")
            seen.add(idx)

    @classmethod
    def row_major(cls, *factors: int) -> "IndexMap":
        return cls(DimensionFactorization(factors), Convention.ROW_MAJOR)

    @classmethod
    def col_major(cls, *factors: int) -> "IndexMap":
        return cls(DimensionFactorization(factors), Convention.COL_MAJOR)

    @classmethod
    def explicit(cls, factors: Sequence[int], table: Iterable[Sequence[int]]) -> "IndexMap":
        return cls(DimensionFactorization(tuple(factors)), Convention.EXPLICIT, tuple(tuple(r) for r in table))

    @property
    def factors(self) -> tuple[int, ...]:
        return self.factorization.factors

    @property
    def total(self) -> int:
        return self.factorization.total

    @property
    def parts(self) -> int:
        return self.factorization.parts

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        factors = self.factors
        if self.convention is Convention.ROW_MAJOR:
            strides, acc = [], 1
            for n in reversed(factors):
                strides.append(acc)
                acc *= n
            return tuple(reversed(strides))
        strides, acc = [], 1
        for n in factors:
            strides.append(acc)
            acc *= n
        return tuple(strides)

    @cached_property
    def _lookup(self) -> dict[tuple[int, ...], int]:
        return {idx: s for s, idx in enumerate(self.table, start=1)}

    def decode(self, s: int) -> tuple[int, ...]:
        s = int(s)
        if not 1 <= s <= self.total:
            raise IndexRangeError(f"s={s} outside 1..{self.total}")
        if self.convention is Convention.EXPLICIT:
            return self.table[s - 1]
        rem = s - 1
        out = []
        for n, stride in zip(self.factors, self._strides):
            out.append((rem // stride) % n + 1)
        return tuple(out)

    def encode(self, idx: Sequence[int]) -> int:
        idx = tuple(int(c) for c in idx)
        if len(idx) != self.parts:
            raise DimensionError(f"expected {self.parts} components, got {len(idx)}")
        for p, (c, n) in enumerate(zip(idx, self.factors), start=1):
            if not 1 <= c <= n:
                raise IndexRangeError(f"component {p} = {c} outside 1..{n}")
        if self.convention is Convention.EXPLICIT:
            return self._lookup[idx]
        return 1 + sum((c - 1) * stride for c, stride in zip(idx, self._strides))

    @cached_property
    def multi_indices(self) -> tuple[tuple[int, ...], ...]:
        """decode(s) for s = 1..N, in order."""
        return tuple(self.decode(s) for s in range(1, self.total + 1))

    @cached_property
    def coordinates(self) -> np.ndarray:
        """0-based (N, l) array; row s-1 is decode(s) - 1."""
        arr = np.array(self.multi_indices, dtype=np.intp).reshape(self.total, self.parts) - 1
        arr.setflags(write=False)
        return arr

    @cached_property
    def rowmajor_order(self) -> np.ndarray:
        """0-based linear indices of this map listed in row-major multi-index order.

        ``v[rowmajor_order].reshape(factors)`` is the joint tensor of ``v``
        addressed as ``t[j-1, k-1, ...]``.
        """
        order = np.empty(self.total, dtype=np.intp)
        for r, idx in enumerate(_rowmajor_multi(self.factors)):
            order[r] = self.encode(idx) - 1
        order.setflags(write=False)
        return order

    @property
    def is_row_major(self) -> bool:
        if self.convention is Convention.ROW_MAJOR:
            return True
        return bool(np.array_equal(self.rowmajor_order, np.arange(self.total)))

    def to_tensor(self, vec: np.ndarray) -> np.ndarray:
        """Arrange a length-N vector as an array of shape ``factors``.

        Row-major maps return a view of ``vec``; other conventions gather.
        """
        vec = np.asarray(vec)
        if vec.shape[0] != self.total:
            raise DimensionError(f"vector of length {vec.shape[0]} does not match N={self.total}")
        if self.convention is Convention.ROW_MAJOR:
            return vec.reshape(self.factors + vec.shape[1:])
        return vec[self.rowmajor_order].reshape(self.factors + vec.shape[1:])

    def from_tensor(self, tensor: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_tensor`."""
        tensor = np.asarray(tensor)
        flat = tensor.reshape((self.total,) + tensor.shape[self.parts:])
        if self.convention is Convention.ROW_MAJOR:
            return flat
        out = np.empty_like(flat)
        out[self.rowmajor_order] = flat
        return out

    def to_json(self) -> dict[str, Any]:
        conv: Any = self.convention.value
        if self.convention is Convention.EXPLICIT:
            conv = {"table": [list(r) for r in self.table]}
        return {"factors": list(self.factors), "convention": conv}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "IndexMap":
        factors = DimensionFactorization(tuple(obj["factors"]))
        conv = obj.get("convention", Convention.ROW_MAJOR.value)
        if isinstance(conv, dict):
            return cls(factors, Convention.EXPLICIT, tuple(tuple(r) for r in conv["table"]))
        return cls(factors, Convention(conv))


def decode(index_map: IndexMap, s: int) -> tuple[int, ...]:
    return index_map.decode(s)


def encode(index_map: IndexMap, idx: Sequence[int]) -> int:
    return index_map.encode(idx)


def parse_map_spec(spec: str, convention: str | Convention = Convention.ROW_MAJOR) -> IndexMap:
    """Parse ``"2x2x2"`` style factor strings."""
    try:
        factors = tuple(int(t) for t in spec.lower().split("x"))
    except ValueError:
        raise ValidationError("map-spec", 0, f"cannot parse map spec {spec!r}") from None
    return IndexMap(DimensionFactorization(factors), Convention(convention))


def enumerate_factorizations(N: int, parts: int) -> list[DimensionFactorization]:
    """All ordered factorizations of N into ``parts`` factors, each >= 2.

    Results come in lexicographic order. A prime N yields an empty list
    for ``parts >= 2``.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")

    def rec(n: int, k: int) -> list[tuple[int, ...]]:
        if k == 1:
            return [(n,)] if n >= 2 else []
        out = []
        for d in range(2, n // 2 + 1):
            if n % d == 0:
                out.extend((d,) + rest for rest in rec(n // d, k - 1))
        return out

    return [DimensionFactorization(f) for f in rec(int(N), int(parts))]
