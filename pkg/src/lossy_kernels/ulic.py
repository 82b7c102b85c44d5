"""Universal independent-set covering for labelled interval graphs.

Given closed integer intervals carrying labels, ``build_ulic`` returns a
subset X of the intervals such that any label set realised by pairwise
disjoint intervals of the whole instance can be (1 - eps)-approximately
realised using only intervals of X.

The construction refines labels by a proper colouring (so every refined
label class is an independent set), then runs a bounded-depth recursion
that marks a greedy realisation of the frequent ("rich") labels, every
interval of an infrequent ("poor") label, and recurses into the gaps
between poor intervals.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

Interval = tuple[int, int, int]


class RealizationError(ValueError):
    """A label required by the greedy realisation ran out of candidates."""

    def __init__(self, label: Hashable):
        super().__init__(f"label {label!r} could not be realised")
        self.label = label


@dataclass(frozen=True)
class LabelledIntervalInstance:
    intervals: tuple[Interval, ...]
    q: int

    def __post_init__(self) -> None:
        for left, right, _ in self.intervals:
            if left > right:
                raise ValueError(f"interval [{left}, {right}] has left > right")
        if len({lab for _, _, lab in self.intervals}) > self.q:
            raise ValueError("more distinct labels than q")

    @classmethod
    def of(cls, intervals: Iterable[Sequence[int]], q: int | None = None) -> LabelledIntervalInstance:
        ivs = tuple((int(l), int(r), int(lab)) for l, r, lab in intervals)
        if q is None:
            q = len({lab for _, _, lab in ivs})
        return cls(ivs, q)

    def __len__(self) -> int:
        return len(self.intervals)


@dataclass(frozen=True)
class RichPoorSplit:
    rich: frozenset
    poor: frozenset


@dataclass(frozen=True)
class UlicResult:
    marked: frozenset[int]
    threshold: int
    depth: int
    colors: int
    refined: tuple[tuple[int, int], ...]

    def size_bound(self) -> int:
        return mark_size_bound(self.threshold, self.depth)


def normalize(intervals: Sequence[Interval]) -> list[tuple[int, int]]:
    """Rank-compress endpoints to 1..2n, preserving order and ties."""
    values = sorted({x for l, r, _ in intervals for x in (l, r)})
    rank = {x: i + 1 for i, x in enumerate(values)}
    return [(rank[l], rank[r]) for l, r, _ in intervals]


def intersects(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def interval_min_coloring(inst: LabelledIntervalInstance | Sequence[Interval]) -> list[int]:
    """Optimal proper colouring: sweep by left endpoint, reuse freed colours."""
    ivs = inst.intervals if isinstance(inst, LabelledIntervalInstance) else inst
    order = sorted(range(len(ivs)), key=lambda i: (ivs[i][0], ivs[i][1], i))
    active: list[tuple[int, int]] = []
    free: list[int] = []
    colors = [0] * len(ivs)
    used = 0
    for i in order:
        left, right = ivs[i][0], ivs[i][1]
        while active and active[0][0] < left:
            heapq.heappush(free, heapq.heappop(active)[1])
        if free:
            c = heapq.heappop(free)
        else:
            c, used = used, used + 1
        colors[i] = c
        heapq.heappush(active, (right, c))
    return colors


def split_labels(ids: Iterable[int], labels: Sequence[Hashable], threshold: int) -> RichPoorSplit:
    counts: dict[Hashable, int] = {}
    for i in ids:
        counts[labels[i]] = counts.get(labels[i], 0) + 1
    rich = frozenset(lab for lab, c in counts.items() if c >= threshold)
    return RichPoorSplit(rich, frozenset(counts) - rich)


def greedy_rich_realization(
    ids: Iterable[int],
    coords: Sequence[tuple[int, int]],
    labels: Sequence[Hashable],
    rich: Iterable[Hashable],
) -> list[int]:
    """Pairwise disjoint intervals, one per label in ``rich``.

    Repeatedly takes the remaining interval with a wanted label and the
    smallest right endpoint, then discards everything it touches.
    """
    remaining = set(ids)
    wanted = set(rich)
    chosen: list[int] = []
    while wanted:
        cands = [i for i in remaining if labels[i] in wanted]
        if not cands:
            raise RealizationError(min(wanted, key=repr))
        u = min(cands, key=lambda i: (coords[i][1], coords[i][0], i))
        chosen.append(u)
        wanted.discard(labels[u])
        remaining = {i for i in remaining if not intersects(coords[i], coords[u])}
    return chosen


def mark_size_bound(threshold: int, depth: int) -> int:
    """Closed form of T(1) = 0, T(d) = (k^2 + k) + C(2k^2 + 2, 2) T(d - 1)."""
    k = threshold
    total = 0
    for _ in range(depth - 1):
        total = (k * k + k) + math.comb(2 * k * k + 2, 2) * total
    return total


class _Marker:
    """Memoised marking recursion over one normalised instance.

    The marked set only depends on the current interval set and depth, and
    the recursion revisits the same sets many times (the outermost gap
    always reproduces its parent), so results are cached.
    """

    def __init__(self, coords, labels, threshold):
        self.coords = coords
        self.labels = labels
        self.threshold = threshold
        self.outer = 2 * len(coords) + 1
        self.cache: dict[tuple[frozenset[int], int], frozenset[int]] = {}

    def mark(self, ids: frozenset[int], depth: int) -> frozenset[int]:
        if depth <= 1 or not ids:
            return frozenset()
        key = (ids, depth)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        split = split_labels(ids, self.labels, self.threshold)
        poor = {i for i in ids if self.labels[i] in split.poor}
        marked = set(greedy_rich_realization(ids, self.coords, self.labels, split.rich))
        marked |= poor
        if len(marked) < len(ids):
            points = sorted({x for i in poor for x in self.coords[i]} | {0, self.outer})
            visited: set[frozenset[int]] = set()
            for a, p in enumerate(points):
                # the gap (p, q) only gains intervals as q moves right
                after = sorted((i for i in ids if self.coords[i][0] > p), key=lambda i: self.coords[i][1])
                ptr, grown = 0, False
                for q in points[a + 1 :]:
                    while ptr < len(after) and self.coords[after[ptr]][1] < q:
                        ptr, grown = ptr + 1, True
                    if not grown:
                        continue
                    grown = False
                    inside = frozenset(after[:ptr])
                    if inside not in visited:
                        visited.add(inside)
                        marked |= self.mark(inside, depth - 1)
        out = frozenset(marked)
        self.cache[key] = out
        return out


def mark_interval(
    inst: LabelledIntervalInstance,
    ids: Iterable[int] | None,
    depth: int,
    labels: Sequence[Hashable] | None = None,
    threshold: int | None = None,
) -> frozenset[int]:
    """One call of the marking recursion on the sub-instance ``ids``.

    ``labels`` defaults to the instance labels and ``threshold`` to the
    number of distinct labels among them.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    coords = normalize(inst.intervals)
    if labels is None:
        labels = [lab for _, _, lab in inst.intervals]
    if threshold is None:
        threshold = len(set(labels))
    ids = frozenset(range(len(coords)) if ids is None else ids)
    return _Marker(coords, labels, threshold).mark(ids, depth)


def depth_for(eps: float | Fraction) -> int:
    """Recursion depth for accuracy eps (base-2 logarithm).

    Starts from ceil((1/e) log2(1/e)) with e = eps/2 and increases it until
    1 - e - (1 - e)^d >= 1 - 2e, i.e. (1 - e)^d <= e.
    """
    e = Fraction(repr(eps)) / 2 if isinstance(eps, float) else Fraction(eps) / 2
    d = max(2, math.ceil(float(1 / e) * math.log2(float(1 / e)) - 1e-12))
    while (1 - e) ** d > e:
        d += 1
    return d


def build_ulic(inst: LabelledIntervalInstance, eps: float | Fraction, depth: int | None = None) -> UlicResult:
    eps_q = Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps)
    if not 0 < eps_q < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    d = depth_for(eps_q) if depth is None else depth
    n = len(inst.intervals)
    colors = interval_min_coloring(inst)
    chi = max(colors, default=-1) + 1
    refined = tuple((lab, c) for (_, _, lab), c in zip(inst.intervals, colors))
    threshold = inst.q * chi
    if n == 0:
        return UlicResult(frozenset(), threshold, d, chi, refined)
    coords = normalize(inst.intervals)
    marked = _Marker(coords, refined, threshold).mark(frozenset(range(n)), d)
    return UlicResult(marked, threshold, d, chi, refined)
