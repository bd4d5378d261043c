"""Elementary sets (finite unions of axis-aligned rational boxes) and exact
1-d interval bookkeeping.

Boxes carry `Fraction` corners so volumes, intersections and neighborhood
inflations are exact; nothing here touches floating point.  Dimension one
gets the full toolkit (merge, union measure, complement within a window)
because the construction engine does its verification there; higher
dimensions only need disjoint-cell unions, which the covering module builds
directly from integer cell sets.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def merge_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Sorted disjoint closure of a list of closed intervals; empty ones drop."""
    ivs = sorted((frac(a), frac(b)) for a, b in intervals if b > a)
    out: list[tuple[Fraction, Fraction]] = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def intervals_measure(intervals: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    return sum((b - a for a, b in intervals), Fraction(0))


def intervals_intersect(
    xs: Sequence[tuple[Fraction, Fraction]], lo: Fraction, hi: Fraction
) -> list[tuple[Fraction, Fraction]]:
    out = []
    for a, b in xs:
        a2, b2 = max(a, lo), min(b, hi)
        if b2 > a2:
            out.append((a2, b2))
    return out


def intervals_subtract(
    base: Sequence[tuple[Fraction, Fraction]], holes: Sequence[tuple[Fraction, Fraction]]
) -> list[tuple[Fraction, Fraction]]:
    """base minus holes, both sorted disjoint; result sorted disjoint."""
    out = []
    holes = list(holes)
    hi_idx = 0
    for a, b in base:
        cur = a
        while hi_idx < len(holes) and holes[hi_idx][1] <= cur:
            hi_idx += 1
        j = hi_idx
        while j < len(holes) and holes[j][0] < b:
            ha, hb = holes[j]
            if ha > cur:
                out.append((cur, min(ha, b)))
            cur = max(cur, hb)
            if cur >= b:
                break
            j += 1
        if cur < b:
            out.append((cur, b))
    return out


class IntervalAccumulator:
    """Growing union of closed intervals with cheap incremental insertion."""

    def __init__(self):
        self.starts: list[Fraction] = []
        self.ends: list[Fraction] = []

    def add(self, a: Fraction, b: Fraction):
        if b <= a:
            return
        i = bisect_left(self.starts, a)
        # merge with predecessor if it reaches a
        if i > 0 and self.ends[i - 1] >= a:
            i -= 1
            a = self.starts[i]
            b = max(b, self.ends[i])
            del self.starts[i], self.ends[i]
        j = i
        while j < len(self.starts) and self.starts[j] <= b:
            b = max(b, self.ends[j])
            j += 1
        del self.starts[i:j], self.ends[i:j]
        self.starts.insert(i, a)
        self.ends.insert(i, b)

    def covers(self, a: Fraction, b: Fraction) -> bool:
        i = bisect_right(self.starts, a) - 1
        return i >= 0 and self.ends[i] >= b

    def first_gap(self, a: Fraction, b: Fraction):
        """Leftmost point of [a, b] not covered, or None if fully covered."""
        cur = a
        i = bisect_right(self.starts, cur) - 1
        if i >= 0 and self.ends[i] > cur:
            cur = self.ends[i]
        if cur >= b:
            return None
        i += 1
        while i < len(self.starts) and self.starts[i] <= cur:
            cur = max(cur, self.ends[i])
            if cur >= b:
                return None
            i += 1
        return cur

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.starts, self.ends))

    def measure(self) -> Fraction:
        return sum((e - s for s, e in zip(self.starts, self.ends)), Fraction(0))

    def covered_measure(self, a, b):
        """Measure of [a, b] already covered."""
        if b <= a:
            return 0
        i = max(bisect_right(self.starts, a) - 1, 0)
        total = 0
        while i < len(self.starts) and self.starts[i] < b:
            lo = self.starts[i] if self.starts[i] > a else a
            hi = self.ends[i] if self.ends[i] < b else b
            if hi > lo:
                total += hi - lo
            i += 1
        return total


@dataclass
class ElementarySet:
    """Finite union of axis-aligned boxes with rational corners.

    Boxes are stored non-overlapping (constructors and `normalize` enforce it
    in dimension one; cell-based constructors give disjointness for free), so
    the volume is the plain sum.
    """

    d: int
    boxes: list[tuple[tuple[Fraction, Fraction], ...]] = field(default_factory=list)
    cell_exponent: int | None = None  # set when built from dyadic cells

    @classmethod
    def from_intervals(cls, intervals, cell_exponent=None) -> "ElementarySet":
        merged = merge_intervals(intervals)
        return cls(d=1, boxes=[((a, b),) for a, b in merged], cell_exponent=cell_exponent)

    @classmethod
    def from_cells(cls, d: int, cells, exponent: int) -> "ElementarySet":
        """Cells are integer d-tuples; cell c covers prod [c_i, c_i+1] * 2^-exponent."""
        w = Fraction(1, 1 << exponent)
        seen = sorted(set(tuple(int(x) for x in c) for c in cells))
        boxes = [tuple((ci * w, (ci + 1) * w) for ci in c) for c in seen]
        es = cls(d=d, boxes=boxes, cell_exponent=exponent)
        if d == 1:
            return cls.from_intervals([b[0] for b in boxes], cell_exponent=exponent)
        return es

    @property
    def volume(self) -> Fraction:
        v = Fraction(0)
        for box in self.boxes:
            piece = Fraction(1)
            for lo, hi in box:
                piece *= hi - lo
            v += piece
        return v

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        if self.d != 1:
            raise ValueError("intervals() requires d = 1")
        return [box[0] for box in self.boxes]

    def inflate(self, delta: Fraction) -> "ElementarySet":
        """Closed delta-neighborhood in the sup norm (exact union in d = 1)."""
        delta = frac(delta)
        if self.d == 1:
            return ElementarySet.from_intervals([(a - delta, b + delta) for a, b in self.intervals()])
        return ElementarySet(
            d=self.d,
            boxes=[tuple((lo - delta, hi + delta) for lo, hi in box) for box in self.boxes],
        )

    def contains_set(self, other: "ElementarySet") -> bool:
        if self.d != 1 or other.d != 1:
            raise ValueError("containment check implemented for d = 1")
        mine = self.intervals()
        return all(
            any(a >= ma and b <= mb for ma, mb in mine) for a, b in other.intervals()
        )

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "cell_exponent": self.cell_exponent,
            "boxes": [[[str(lo), str(hi)] for lo, hi in box] for box in self.boxes],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ElementarySet":
        boxes = [
            tuple((Fraction(lo), Fraction(hi)) for lo, hi in box) for box in data["boxes"]
        ]
        return cls(d=int(data["d"]), boxes=boxes, cell_exponent=data.get("cell_exponent"))
