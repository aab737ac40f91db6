"""One-dimensional regions: finite unions of intervals, or label subsets.

Numeric relations keep the operator as written, so ``< 2`` yields an interval
open at 2. Grid coverage is measure based: a non-degenerate interval covers
a cell when their interiors overlap; a single point covers the half-open cell
``[a, b)`` containing it (the last cell is closed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Constraint, DimensionDecl, Relation, Value, format_number

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi and not self.is_empty

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: Interval) -> Interval:
        if self.lo > other.lo:
            lo, lc = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lc = other.lo, other.lo_closed
        else:
            lo, lc = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hc = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hc = other.hi, other.hi_closed
        else:
            hi, hc = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lc, hc)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_number(self.lo)}, {format_number(self.hi)}{right}"


def _touch_or_overlap(a: Interval, b: Interval) -> bool:
    # a.lo <= b.lo assumed
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


def _normalize(parts) -> tuple[Interval, ...]:
    items = sorted((p for p in parts if not p.is_empty), key=lambda i: (i.lo, not i.lo_closed))
    out: list[Interval] = []
    for iv in items:
        if out and _touch_or_overlap(out[-1], iv):
            last = out[-1]
            if iv.hi > last.hi:
                hi, hc = iv.hi, iv.hi_closed
            elif iv.hi < last.hi:
                hi, hc = last.hi, last.hi_closed
            else:
                hi, hc = last.hi, last.hi_closed or iv.hi_closed
            lc = last.lo_closed or (iv.lo == last.lo and iv.lo_closed)
            out[-1] = Interval(last.lo, hi, lc, hc)
        else:
            out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class Region1D:
    """Region of one dimension. ``labels`` is set for enumerated dimensions."""

    dimension: str
    parts: tuple[Interval, ...] = ()
    labels: frozenset[str] | None = None

    @classmethod
    def numeric(cls, dimension: str, parts) -> Region1D:
        return cls(dimension, _normalize(parts))

    @classmethod
    def of_labels(cls, dimension: str, labels) -> Region1D:
        return cls(dimension, (), frozenset(labels))

    @classmethod
    def full(cls, dim: DimensionDecl) -> Region1D:
        if dim.is_categorical:
            return cls.of_labels(dim.name, dim.labels)
        lo = -INF if dim.lo is None else dim.lo
        hi = INF if dim.hi is None else dim.hi
        return cls.numeric(dim.name, [Interval(lo, hi, not math.isinf(lo), not math.isinf(hi))])

    @classmethod
    def of_constraint(cls, c: Constraint) -> Region1D:
        if c.relation is Relation.ONEOF:
            return cls.of_labels(c.dimension, c.labels or ())
        v = c.value
        iv = {
            Relation.LE: Interval(-INF, v, False, True),
            Relation.LT: Interval(-INF, v, False, False),
            Relation.GE: Interval(v, INF, True, False),
            Relation.GT: Interval(v, INF, False, False),
            Relation.EQ: Interval(v, v),
            Relation.IN: Interval(v, c.hi if c.hi is not None else v),
        }[c.relation]
        return cls.numeric(c.dimension, [iv])

    @classmethod
    def of_value(cls, dimension: str, value: Value) -> Region1D:
        if isinstance(value, str):
            return cls.of_labels(dimension, [value])
        return cls.numeric(dimension, [Interval(value.value, value.value)])

    @property
    def is_categorical(self) -> bool:
        return self.labels is not None

    @property
    def is_empty(self) -> bool:
        return not self.labels if self.is_categorical else not self.parts

    def intersect(self, other: Region1D) -> Region1D:
        if self.is_categorical or other.is_categorical:
            a = self.labels if self.labels is not None else frozenset()
            b = other.labels if other.labels is not None else frozenset()
            return Region1D(self.dimension, (), a & b)
        out = [p.intersect(q) for p in self.parts for q in other.parts]
        return Region1D.numeric(self.dimension, out)

    def union(self, other: Region1D) -> Region1D:
        if self.is_categorical or other.is_categorical:
            return Region1D(self.dimension, (), (self.labels or frozenset()) | (other.labels or frozenset()))
        return Region1D.numeric(self.dimension, self.parts + other.parts)

    def contains_value(self, value: Value) -> bool:
        if self.is_categorical:
            return isinstance(value, str) and value in self.labels
        if isinstance(value, str):
            return False
        return any(p.contains(value.value) for p in self.parts)

    def issubset(self, other: Region1D) -> bool:
        if self.is_categorical:
            return self.labels <= (other.labels or frozenset())
        return self.intersect(other) == self

    def nearest(self, x: float) -> float | None:
        """Closest member of the region to ``x``; lower candidate on ties."""
        best = None
        for p in self.parts:
            if p.contains(x):
                return x
            for end, closed, toward in ((p.lo, p.lo_closed, INF), (p.hi, p.hi_closed, -INF)):
                if math.isinf(end):
                    continue
                cand = end if closed else math.nextafter(end, toward)
                if not p.contains(cand):
                    continue
                if best is None or abs(cand - x) < abs(best - x) or (abs(cand - x) == abs(best - x) and cand < best):
                    best = cand
        return best

    def min_point(self) -> float | None:
        if not self.parts:
            return None
        p = self.parts[0]
        if math.isinf(p.lo):
            return None if math.isinf(p.hi) else p.hi
        return p.lo if p.lo_closed else math.nextafter(p.lo, INF)

    def __str__(self) -> str:
        if self.is_categorical:
            return "{" + ", ".join(sorted(self.labels)) + "}"
        if not self.parts:
            return "∅"
        return " ∪ ".join(str(p) for p in self.parts)


def cell_edges(lo: float, hi: float, cells: int) -> np.ndarray:
    return lo + (hi - lo) * np.arange(cells + 1) / cells


def cell_count(dim: DimensionDecl, grid: int) -> int:
    if dim.is_categorical:
        return len(dim.labels)
    return grid if dim.hi > dim.lo else 1


def covered_cells(region: Region1D, dim: DimensionDecl, grid: int) -> np.ndarray:
    """Boolean mask over the dimension's grid cells touched by ``region``."""
    if dim.is_categorical:
        labels = region.labels or frozenset()
        return np.array([lab in labels for lab in dim.labels], dtype=bool)
    n = cell_count(dim, grid)
    edges = cell_edges(dim.lo, dim.hi, n)
    a, b = edges[:-1], edges[1:]
    mask = np.zeros(n, dtype=bool)
    for p in region.parts:
        if p.lo < p.hi:
            mask |= (p.lo < b) & (p.hi > a)
        elif dim.lo == dim.hi:
            mask |= p.lo == dim.lo
        else:
            hit = (a <= p.lo) & (p.lo < b)
            hit[-1] |= p.lo == b[-1]
            mask |= hit
    return mask


def region_label(region: Region1D, unit: str = "") -> str:
    s = str(region)
    return f"{s} {unit}" if unit and not region.is_categorical else s
