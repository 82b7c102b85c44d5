"""Approximate kernel for Partial Vertex Cover (maximize edges covered by k vertices).

If the top-degree vertex alone is large compared with beta * C(k, 2), the
k highest degree vertices are already an alpha-approximation because they
share few edges among themselves.  Otherwise every vertex outside the top
k * ceil(beta * C(k, 2)) + 1 can be swapped out of an optimum, so the
closed neighbourhood of that prefix keeps the optimum intact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .framework import INF, KernelOutput, ParameterizedInstance, exact
from .graph import MultiGraph, TranscriptRecorder


def pvc_value(g: MultiGraph, k: int, s: Iterable[int]) -> float | int:
    s = set(s)
    if len(s) > k or not s <= g.vertices:
        return -INF
    return sum(m for (u, v), m in g.edge_multiset.items() if u in s or v in s)


def degree_order(g: MultiGraph) -> list[int]:
    return sorted(g.vertices, key=lambda v: (-g.degree(v), v))


def beta_for(alpha: float | Fraction) -> Fraction:
    a = exact(alpha)
    if a <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    return a / (a - 1)


def prefix_size(k: int, beta: Fraction) -> int:
    return k * math.ceil(beta * math.comb(k, 2)) + 1


@dataclass
class PvcPlan:
    case: int
    beta: Fraction
    threshold: Fraction
    order: list[int]
    prefix: list[int]
    kept: frozenset[int]


def plan(g: MultiGraph, k: int, alpha: float | Fraction) -> PvcPlan:
    beta = beta_for(alpha)
    threshold = beta * math.comb(k, 2)
    order = degree_order(g)
    if order and g.degree(order[0]) >= threshold:
        return PvcPlan(1, beta, threshold, order, [], frozenset())
    prefix = order[: prefix_size(k, beta)]
    kept = frozenset().union(*(g.closed_neighborhood(v) for v in prefix)) if prefix else frozenset()
    return PvcPlan(2, beta, threshold, order, prefix, kept)


def pvc_kernelize(g: MultiGraph, k: int, alpha: float | Fraction) -> KernelOutput:
    if k < 1:
        raise ValueError("k must be at least 1")
    p = plan(g, k, alpha)
    top = frozenset(p.order[:k])
    rec = TranscriptRecorder(g)
    if p.case == 1:
        rec.keep_only(frozenset())
        k_red = 0
    else:
        rec.keep_only(p.kept)
        k_red = k
    reduced = rec.graph

    def lifter(s: Iterable[int]) -> frozenset[int]:
        s = frozenset(s)
        if p.case == 1 or len(s) > k or not s <= reduced.vertices:
            return top
        return s

    return KernelOutput(
        reduced=ParameterizedInstance(reduced, k_red),
        lifter=lifter,
        alpha=exact(alpha),
        strict=True,
        size_bound=None,
        transcript=rec.transcript(),
        info={"case": p.case, "beta": p.beta, "prefix": p.prefix, "threshold": p.threshold},
    )
