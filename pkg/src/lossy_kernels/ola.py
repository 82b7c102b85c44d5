"""Approximate kernel for Optimal Linear Arrangement parameterized by vertex cover.

Vertices outside the cover C are grouped by their neighbourhood (a subset of
C).  Each class is trimmed to a multiple of the group size x, chunked into
groups of x vertices, and every group is represented by one vertex.  A layout
of the small graph expands back by laying each group out consecutively, and
the trimmed vertices go at the end.

Layouts are lists of vertices in position order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .framework import INF, KernelOutput, ParameterizedInstance, alpha_from_accuracy, exact
from .graph import MultiGraph, TranscriptRecorder


@dataclass(frozen=True)
class OlaInstance:
    graph: MultiGraph
    cover: frozenset[int]


def positions(g: MultiGraph, layout: Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    """Map each vertex to its 1-based position; raises on a non-bijection."""
    if isinstance(layout, Mapping):
        pos = dict(layout)
        if set(pos.values()) != set(range(1, len(g) + 1)):
            raise ValueError("layout positions must be exactly 1..n")
    else:
        pos = {v: i for i, v in enumerate(layout, 1)}
        if len(pos) != len(layout):
            raise ValueError("layout repeats a vertex")
    if set(pos) != g.vertices:
        raise ValueError("layout must cover exactly the vertices of the graph")
    return pos


def ola_val(g: MultiGraph, layout: Sequence[int] | Mapping[int, int]) -> int:
    pos = positions(g, layout)
    return sum(m * abs(pos[u] - pos[v]) for (u, v), m in g.edge_multiset.items())


def ola_value(inst: OlaInstance, k: int, layout: Sequence[int]) -> float | int:
    try:
        return ola_val(inst.graph, layout)
    except ValueError:
        return INF


def group_size(n: int, k: int, eps: float | Fraction) -> int:
    if k == 0:
        return 1
    denom = 4 * k**2 * k**2 * 2 ** (k + 4)
    return max(1, math.floor(exact(eps) * n / denom))


def twin_classes(g: MultiGraph, cover: Iterable[int]) -> dict[frozenset[int], list[int]]:
    cover = frozenset(cover)
    classes: dict[frozenset[int], list[int]] = {}
    for v in sorted(g.vertices - cover):
        classes.setdefault(g.neighbors(v), []).append(v)
    return classes


@dataclass
class Grouping:
    x: int
    cover: frozenset[int]
    g1: MultiGraph
    g2: MultiGraph
    trimmed: list[int]
    groups: dict[int, list[int]]  # representative -> members in id order

    def expand(self, layout2: Sequence[int]) -> list[int]:
        """Layout of G1: each representative becomes its whole group."""
        out: list[int] = []
        for v in layout2:
            out.extend(self.groups.get(v, [v]))
        return out

    def lift(self, layout2: Sequence[int]) -> list[int]:
        return self.expand(layout2) + sorted(self.trimmed)


def group(g: MultiGraph, cover: Iterable[int], x: int) -> Grouping:
    cover = frozenset(cover)
    if x < 1:
        raise ValueError("group size must be positive")
    trimmed: list[int] = []
    groups: dict[int, list[int]] = {}
    for members in twin_classes(g, cover).values():
        extra = len(members) % x
        if extra:
            trimmed.extend(members[len(members) - extra :])
            members = members[: len(members) - extra]
        for i in range(0, len(members), x):
            chunk = members[i : i + x]
            groups[chunk[0]] = chunk
    g1 = g.without(trimmed)
    g2 = g1.induced(cover | set(groups))
    return Grouping(x, cover, g1, g2, sorted(trimmed), groups)


def ola_kernelize(
    g: MultiGraph, cover: Iterable[int], k: int, eps: float, force_x: int | None = None
) -> KernelOutput:
    cover = frozenset(cover)
    if not cover <= g.vertices or any(u not in cover and v not in cover for u, v in g.edges()):
        raise ValueError("C is not a vertex cover of the graph")
    if len(cover) > k:
        raise ValueError(f"cover has {len(cover)} vertices, more than k = {k}")
    alpha = alpha_from_accuracy("min", "eps", eps)
    x = force_x if force_x is not None else group_size(len(g), k, eps)
    grp = group(g, cover, x)
    rec = TranscriptRecorder(g)
    for v in grp.trimmed:
        rec.delete_vertex(v)
    rec.keep_only(grp.g2.vertices)

    def lifter(layout2: Sequence[int]) -> list[int]:
        layout2 = list(layout2)
        try:
            positions(grp.g2, layout2)
        except ValueError:
            layout2 = sorted(grp.g2.vertices)
        return grp.lift(layout2)

    return KernelOutput(
        reduced=ParameterizedInstance(OlaInstance(grp.g2, cover), k),
        lifter=lifter,
        alpha=alpha,
        strict=False,
        size_bound=None,
        transcript=rec.transcript(),
        info={"x": x, "grouping": grp},
    )


def lower_bound(m: int, k: int) -> Fraction:
    """Any layout of a graph with m edges and a k-vertex cover costs at least m^2 / 4k^2."""
    return Fraction(m * m, 4 * k * k)
