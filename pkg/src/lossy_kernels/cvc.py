"""Approximate kernel for Connected Vertex Cover.

Two reduction rules are applied until neither fires:

* twins: a vertex with at least k+1 false twins is deleted (exact);
* degree: a vertex v whose neighbours all have degree > k and whose own
  degree D is at least d = ceil(alpha / (alpha - 1)) is replaced, together
  with its neighbourhood, by one vertex w carrying k pendant leaves; the
  budget drops by D - 1.  The degree rule is implemented as a sequence of
  contractions of N[v] into w followed by pendant insertions, so the
  transcript stays replayable.

If the irreducible graph is still too large the budget is provably
exceeded, and the instance collapses to a single edge with budget 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .framework import INF, KernelOutput, ParameterizedInstance, exact
from .graph import MinorOp, MinorTranscript, MultiGraph, TranscriptRecorder


def d_for_alpha(alpha: float | Fraction) -> int:
    a = exact(alpha)
    if a <= 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    return math.ceil(a / (a - 1))


def is_vertex_cover(g: MultiGraph, s: Iterable[int]) -> bool:
    s = set(s)
    return all(u in s or v in s for u, v in g.edges())


def is_cvc(g: MultiGraph, s: Iterable[int]) -> bool:
    s = set(s)
    return s <= g.vertices and is_vertex_cover(g, s) and g.is_connected(s)


def cvc_value(g: MultiGraph, k: int, s: Iterable[int]) -> int | float:
    s = set(s)
    if not is_cvc(g, s):
        return INF
    return min(len(s), k + 1)


def nominal_size_bound(k: int, d: int) -> int:
    """k + C(k, d-1)(k+1) + 2k^2."""
    return k + math.comb(k, d - 1) * (k + 1) + 2 * k * k


def size_bound(k: int, d: int) -> int:
    """Vertex bound used to detect budget overflow.

    Counts every possible neighbourhood of size 1..d-1 inside the high
    degree set, so it is never smaller than ``nominal_size_bound``.
    """
    classes = sum(math.comb(k, j) for j in range(1, d))
    return max(nominal_size_bound(k, d), k + classes * (k + 1) + 2 * k * k)


@dataclass(frozen=True)
class CvcContext:
    d: int
    high: frozenset[int]
    inner: frozenset[int]


def cvc_context(g: MultiGraph, k: int, d: int) -> CvcContext:
    high = frozenset(v for v in g.vertices if len(g.adj[v]) >= k + 1)
    inner = frozenset(v for v in g.vertices if v not in high and g.neighbors(v) <= high)
    return CvcContext(d, high, inner)


def any_cvc(g: MultiGraph) -> frozenset[int]:
    """Internal vertices of a DFS tree of the edge-carrying component.

    A classic 2-approximation; always connected and a vertex cover.
    """
    touched = [v for v in sorted(g.vertices) if g.adj[v]]
    if not touched:
        return frozenset()
    root = touched[0]
    internal: set[int] = set()
    seen = {root}
    stack = [(root, iter(sorted(g.adj[root])))]
    while stack:
        v, it = stack[-1]
        for u in it:
            if u not in seen:
                seen.add(u)
                internal.add(v)
                stack.append((u, iter(sorted(g.adj[u]))))
                break
        else:
            stack.pop()
    return frozenset(internal)


@dataclass
class RuleStep:
    """One rule application with everything needed to lift through it."""

    rule: str
    before: MultiGraph
    k_before: int
    after: MultiGraph
    k_after: int
    ops: list[MinorOp] = field(default_factory=list)
    center: int | None = None
    closed_nbhd: frozenset[int] = frozenset()
    merged: int | None = None
    pendants: tuple[int, ...] = ()

    def lift(self, s: Iterable[int]) -> frozenset[int]:
        s = frozenset(s)
        if self.rule == "isolated":
            return s
        if self.rule == "twins":
            # a solution within budget keeps a surviving twin out, so it
            # already covers the deleted one; anything else is over budget
            return s if is_cvc(self.before, s) else any_cvc(self.before)
        if self.rule == "degree":
            return lift_rule_degree(self, s)
        if self.rule == "collapse":
            return any_cvc(self.before)
        if self.rule == "infeasible":
            return self.before.vertices
        raise ValueError(self.rule)


def apply_rule_twins(g: MultiGraph, k: int) -> RuleStep | None:
    classes: dict[frozenset[int], list[int]] = {}
    for v in sorted(g.vertices):
        classes.setdefault(g.neighbors(v), []).append(v)
    targets = [members[0] for members in classes.values() if len(members) >= k + 2]
    if not targets:
        return None
    v = min(targets)
    rec = TranscriptRecorder(g)
    rec.delete_vertex(v)
    return RuleStep("twins", g, k, rec.graph, k, rec.ops, center=v)


def apply_rule_degree(g: MultiGraph, k: int, ctx: CvcContext | None = None, d: int | None = None) -> RuleStep | None:
    if ctx is None:
        if d is None:
            raise ValueError("need a context or d")
        ctx = cvc_context(g, k, d)
    cands = [v for v in sorted(ctx.inner) if ctx.d <= len(g.adj[v]) <= k + 1]
    if not cands:
        return None
    v = cands[0]
    nbrs = sorted(g.adj[v])
    rec = TranscriptRecorder(g)
    w = v
    for u in nbrs:
        w = rec.contract(w, u)
    for y, m in sorted(rec.graph.adj[w].items()):
        if m > 1:
            rec.delete_edge(w, y, m - 1)
    pendants = tuple(rec.add_vertex([w]) for _ in range(k))
    return RuleStep(
        "degree",
        g,
        k,
        rec.graph,
        k - (len(nbrs) - 1),
        rec.ops,
        center=v,
        closed_nbhd=g.closed_neighborhood(v),
        merged=w,
        pendants=pendants,
    )


def lift_rule_degree(step: RuleStep, s: Iterable[int]) -> frozenset[int]:
    s = frozenset(s)
    if not (is_cvc(step.after, s) and len(s) <= step.k_after):
        return step.before.vertices
    return (s - {step.merged} - set(step.pendants)) | step.closed_nbhd


def _collapse(g: MultiGraph, k: int, rule: str) -> RuleStep:
    """Shrink to a constant instance: one edge (budget overflow) or two
    disjoint edges (no connected cover exists)."""
    rec = TranscriptRecorder(g)
    if rule == "collapse":
        u, v = g.edges()[0]
        keep = {u, v}
    else:
        comps = [c for c in g.components() if len(c) > 1]
        keep = set()
        for comp in comps[:2]:
            u = min(comp)
            keep |= {u, min(g.adj[u])}
    rec.keep_only(keep)
    return RuleStep(rule, g, k, rec.graph, 0, rec.ops)


def reduce_exhaustively(g: MultiGraph, k: int, alpha: float | Fraction) -> list[RuleStep]:
    """Isolated-vertex removal, then the twin and degree rules to a fixpoint.

    Stops early once more than k vertices have degree above k, since then
    the budget is already exceeded.
    """
    d = d_for_alpha(alpha)
    steps: list[RuleStep] = []
    isolated = [v for v in sorted(g.vertices) if not g.adj[v]]
    cur, kc = g, k
    if isolated and g.num_edges:
        rec = TranscriptRecorder(g)
        for v in isolated:
            rec.delete_vertex(v)
        steps.append(RuleStep("isolated", g, k, rec.graph, k, rec.ops))
        cur = rec.graph
    while True:
        ctx = cvc_context(cur, kc, d)
        if len(ctx.high) > kc:
            break
        step = apply_rule_twins(cur, kc) or apply_rule_degree(cur, kc, ctx)
        if step is None:
            break
        steps.append(step)
        cur, kc = step.after, step.k_after
    return steps


def cvc_kernelize(g: MultiGraph, k: int, alpha: float | Fraction) -> KernelOutput:
    d = d_for_alpha(alpha)
    a = exact(alpha)
    edge_comps = [c for c in g.components() if len(c) > 1]
    if len(edge_comps) >= 2:
        steps = [_collapse(g, k, "infeasible")]
    else:
        steps = reduce_exhaustively(g, k, alpha)
        cur = steps[-1].after if steps else g
        kc = steps[-1].k_after if steps else k
        if cur.num_edges:
            ctx = cvc_context(cur, kc, d)
            if len(ctx.high) > kc or len(cur) > size_bound(kc, d):
                steps.append(_collapse(cur, kc, "collapse"))
    reduced = steps[-1].after if steps else g
    k_red = steps[-1].k_after if steps else k
    ops = [op for st in steps for op in st.ops]
    transcript = MinorTranscript(g, tuple(ops))

    def lifter(s: Iterable[int]) -> frozenset[int]:
        out = frozenset(s)
        for st in reversed(steps):
            out = st.lift(out)
        return out if is_cvc(g, out) else g.vertices

    return KernelOutput(
        reduced=ParameterizedInstance(reduced, k_red),
        lifter=lifter,
        alpha=a,
        strict=True,
        size_bound=size_bound(k, d),
        transcript=transcript,
        info={"d": d, "steps": [st.rule for st in steps]},
    )
