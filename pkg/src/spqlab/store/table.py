"""Binding tables and deadline plumbing shared by the store modules."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional


class QueryTimeout(TimeoutError):
    """Raised when evaluation passes its deadline; partial results are dropped."""


class Deadline:
    """Cheap periodic deadline check.  ``None`` seconds means no limit."""

    __slots__ = ("at", "_tick")

    def __init__(self, seconds: Optional[float] = None):
        self.at = None if seconds is None else time.monotonic() + seconds
        self._tick = 0

    def check(self, every: int = 1024):
        if self.at is None:
            return
        self._tick += 1
        if self._tick % every == 0 and time.monotonic() > self.at:
            raise QueryTimeout("query deadline exceeded")

    def check_now(self):
        if self.at is not None and time.monotonic() > self.at:
            raise QueryTimeout("query deadline exceeded")


NO_DEADLINE = Deadline(None)


@dataclass
class BindingTable:
    """Multiset of rows over an ordered variable schema; ``None`` marks unbound.

    ``sorted_on`` lists variables the rows are known to be sorted on, major
    key first.  Those columns never hold ``None``.
    """

    schema: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    sorted_on: tuple[str, ...] = ()

    def __post_init__(self):
        self.schema = tuple(self.schema)
        width = len(self.schema)
        for r in self.rows:
            if len(r) != width:
                raise ValueError(f"row {r!r} does not match schema {self.schema}")

    @classmethod
    def unit(cls) -> "BindingTable":
        """The join identity: no columns, one empty row."""
        return cls((), [()])

    @classmethod
    def empty(cls, schema=()) -> "BindingTable":
        return cls(tuple(schema), [])

    def __len__(self):
        return len(self.rows)

    def index(self, var: str) -> int:
        return self.schema.index(var)

    def column(self, var: str) -> list:
        i = self.schema.index(var)
        return [r[i] for r in self.rows]

    def project(self, variables) -> "BindingTable":
        idx = [self.schema.index(v) if v in self.schema else None for v in variables]
        rows = [tuple(r[i] if i is not None else None for i in idx) for r in self.rows]
        keep = []
        for v in self.sorted_on:
            if v not in variables:
                break
            keep.append(v)
        return BindingTable(tuple(variables), rows, tuple(keep))

    def as_dicts(self) -> list[dict]:
        return [{v: x for v, x in zip(self.schema, r) if x is not None} for r in self.rows]

    def multiset(self) -> dict:
        """Row multiset keyed by frozenset of bound (var, value) pairs."""
        out: dict = {}
        for r in self.rows:
            key = frozenset((v, x) for v, x in zip(self.schema, r) if x is not None)
            out[key] = out.get(key, 0) + 1
        return out
