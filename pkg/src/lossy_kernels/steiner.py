"""Approximate kernel for Steiner Tree parameterized by the number of terminals.

The kernel works on the metric closure.  It drops vertices that are too far
from every terminal to matter, keeps the vertices of optimal trees for every
small terminal subset, and rounds weights to O(log |R| + log 1/eps) bits.
Rounding needs a lower bound on the optimum; half the weight of the
terminal spanning tree serves, since that tree is a 2-approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .framework import INF, KernelOutput, ParameterizedInstance, alpha_from_accuracy, exact
from .graph import MinorTranscript, MultiGraph, TranscriptRecorder

Pair = tuple[int, int]
DEFAULT_DW_CAP = 12


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SteinerInstance:
    graph: MultiGraph
    terminals: frozenset[int]

    def __post_init__(self) -> None:
        if not self.terminals:
            raise ValueError("terminal set must be nonempty")
        if not self.terminals <= self.graph.vertices:
            raise ValueError("terminals must be vertices of the graph")


def _pair(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


@dataclass
class Closure:
    """All-pairs shortest path distances with next hops for path recovery."""

    dist: dict[int, dict[int, float]]
    hop: dict[int, dict[int, int]]

    def path(self, u: int, v: int) -> list[int]:
        out = [u]
        while out[-1] != v:
            out.append(self.hop[out[-1]][v])
        return out


def metric_closure(g: MultiGraph) -> Closure:
    verts = sorted(g.vertices)
    dist = {u: {v: (0 if u == v else INF) for v in verts} for u in verts}
    hop = {u: {u: u} for u in verts}
    for u, v in g.edges():
        w = g.weight(u, v)
        if w < dist[u][v]:
            dist[u][v] = dist[v][u] = w
            hop[u][v], hop[v][u] = v, u
    for m in verts:
        dm = dist[m]
        for u in verts:
            du = dist[u]
            via = du[m]
            if via == INF:
                continue
            for v in verts:
                cand = via + dm[v]
                if cand < du[v]:
                    du[v] = cand
                    hop[u][v] = hop[u][m]
    return Closure(dist, hop)


def closure_graph(g: MultiGraph, closure: Closure | None = None) -> MultiGraph:
    closure = closure or metric_closure(g)
    verts = sorted(g.vertices)
    edges = [
        (u, v, closure.dist[u][v])
        for u, v in combinations(verts, 2)
        if closure.dist[u][v] != INF
    ]
    return MultiGraph.from_edges(verts, edges, weighted=True, next_id=g.next_id)


def spanning_tree(vertices: Sequence[int], weight) -> tuple[float, list[Pair]]:
    """Prim's algorithm on the complete graph given by ``weight(u, v)``."""
    verts = list(vertices)
    if not verts:
        return 0, []
    inside = {verts[0]}
    best = {v: (weight(verts[0], v), verts[0]) for v in verts[1:]}
    total, edges = 0, []
    while best:
        v = min(best, key=lambda x: (best[x][0], x))
        w, u = best.pop(v)
        if w == INF:
            raise ValueError("graph is disconnected")
        inside.add(v)
        total += w
        edges.append(_pair(u, v))
        for x in best:
            wx = weight(v, x)
            if wx < best[x][0]:
                best[x] = (wx, v)
    return total, edges


def _subset_table(closure: Closure, verts: Sequence[int], terms: Sequence[int]):
    """Subset dynamic program over terminals (Dreyfus-Wagner).

    ``cost[mask][v]`` is the cheapest tree spanning the terminals in
    ``mask`` plus ``v``.  Edges are metric-closure edges.
    """
    t = len(terms)
    d = closure.dist
    cost = [dict.fromkeys(verts, INF) for _ in range(1 << t)]
    back: list[dict] = [dict() for _ in range(1 << t)]
    for i, r in enumerate(terms):
        for v in verts:
            cost[1 << i][v] = d[r][v]
            back[1 << i][v] = ("leaf", r)
    for mask in range(1, 1 << t):
        if mask & (mask - 1) == 0:
            continue
        merge = dict.fromkeys(verts, INF)
        merge_at: dict[int, int] = {}
        low = mask & -mask
        for u in verts:
            sub = (mask - 1) & mask
            while sub:
                if sub & low:
                    c = cost[sub][u] + cost[mask ^ sub][u]
                    if c < merge[u]:
                        merge[u], merge_at[u] = c, sub
                sub = (sub - 1) & mask
        row, brow = cost[mask], back[mask]
        for v in verts:
            for u in verts:
                c = merge[u] + d[u][v]
                if c < row[v]:
                    row[v] = c
                    brow[v] = ("join", u, merge_at[u])
    return cost, back


def _tree_edges(back, mask: int, v: int, out: set[Pair]) -> None:
    entry = back[mask][v]
    if entry[0] == "leaf":
        if entry[1] != v:
            out.add(_pair(entry[1], v))
        return
    _, u, sub = entry
    if u != v:
        out.add(_pair(u, v))
    _tree_edges(back, sub, u, out)
    _tree_edges(back, mask ^ sub, u, out)


def expand_to_tree(g: MultiGraph, closure: Closure, pairs: Iterable[Pair], terminals: Iterable[int]) -> list[Pair]:
    """Turn closure edges into a Steiner tree made of edges of ``g``.

    Each closure edge becomes a shortest path; the union is reduced to a
    minimum spanning forest and non-terminal leaves are pruned.
    """
    terms = set(terminals)
    edges: set[Pair] = set()
    for u, v in pairs:
        p = closure.path(u, v)
        edges.update(_pair(a, b) for a, b in zip(p, p[1:]))
    parent = {x: x for e in edges for x in e}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree: list[Pair] = []
    for u, v in sorted(edges, key=lambda e: (g.weight(*e), e)):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append((u, v))
    changed = True
    while changed:
        changed = False
        deg: dict[int, int] = {}
        for u, v in tree:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        leaves = {x for x, c in deg.items() if c == 1 and x not in terms}
        if leaves:
            tree = [e for e in tree if e[0] not in leaves and e[1] not in leaves]
            changed = True
    return sorted(tree)


def dreyfus_wagner(g: MultiGraph, terminals: Iterable[int], cap: int = DEFAULT_DW_CAP) -> tuple[float, list[Pair]]:
    """Optimal Steiner tree of ``g`` for ``terminals``: (cost, edges of g)."""
    terms = sorted(set(terminals))
    if not terms:
        raise ValueError("terminal set must be nonempty")
    if len(terms) > cap:
        raise CapExceeded(f"{len(terms)} terminals exceed the cap of {cap}")
    closure = metric_closure(g)
    if any(closure.dist[terms[0]][r] == INF for r in terms):
        raise ValueError("terminals are not connected")
    verts = sorted(g.vertices)
    if len(terms) == 1:
        return 0, []
    cost, back = _subset_table(closure, verts, terms[1:])
    full = (1 << (len(terms) - 1)) - 1
    pairs: set[Pair] = set()
    _tree_edges(back, full, terms[0], pairs)
    tree = expand_to_tree(g, closure, pairs, terms)
    return sum(g.weight(u, v) for u, v in tree), tree


def steiner_tree_cost(g: MultiGraph, terminals: Iterable[int], edges: Iterable[Pair]) -> float:
    """Cost of ``edges`` if they form a tree of ``g`` spanning the terminals, else inf."""
    terms = set(terminals)
    edges = [_pair(u, v) for u, v in edges]
    if len(set(edges)) != len(edges) or any(not g.has_edge(u, v) for u, v in edges):
        return INF
    if not edges:
        return 0 if len(terms) == 1 else INF
    verts = {x for e in edges for x in e}
    if not terms <= verts or len(edges) != len(verts) - 1:
        return INF
    parent = {x: x for x in verts}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return INF
        parent[ru] = rv
    return sum(g.weight(u, v) for u, v in edges)


def st_value(inst: SteinerInstance, k: int, edges: Iterable[Pair]) -> float:
    return steiner_tree_cost(inst.graph, inst.terminals, edges)


def subset_size_for(eps: float | Fraction) -> int:
    """Smallest k with 1 / floor(log2 k) <= eps / 2, i.e. 2^ceil(2 / eps)."""
    e = exact(eps)
    return 2 ** math.ceil(2 / e)


def weight_budget(terminals: int, eps: float | Fraction) -> Fraction:
    """Upper bound on rounded weights: every kept edge is shorter than
    three times the terminal tree, i.e. six times the lower bound."""
    return 24 * terminals / exact(eps)


@dataclass
class SteinerKernel:
    reduced: SteinerInstance
    kept: frozenset[int]
    far: frozenset[int]
    lower_bound: Fraction
    tree2: list[Pair]
    closure: Closure
    scale: Fraction | None
    transcript: MinorTranscript


def reduce_steiner(inst: SteinerInstance, eps: float | Fraction, cap: int = DEFAULT_DW_CAP) -> SteinerKernel:
    e = exact(eps)
    if not 0 < e <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    g, terms = inst.graph, sorted(inst.terminals)
    closure = metric_closure(g)
    d = closure.dist
    if any(d[terms[0]][r] == INF for r in terms):
        raise ValueError("terminals are not connected")
    w2, tree2 = spanning_tree(terms, lambda u, v: d[u][v])
    far = frozenset(v for v in g.vertices if v not in inst.terminals and min(d[v][x] for x in terms) >= w2)
    near = sorted(g.vertices - far)
    size = subset_size_for(e)
    marked: set[int] = set(terms)
    if len(terms) > 1:
        if len(terms) > cap:
            raise CapExceeded(f"{len(terms)} terminals exceed the cap of {cap}")
        rest = terms[1:]
        cost, back = _subset_table(closure, near, rest)
        for r in range(2, min(size, len(terms)) + 1):
            for subset in combinations(terms, r):
                # subset[1:] never contains the root, so it is a mask over `rest`
                mask = sum(1 << rest.index(t) for t in subset[1:])
                pairs: set[Pair] = set()
                _tree_edges(back, mask, subset[0], pairs)
                marked |= {x for p in pairs for x in p}
    kept = frozenset(marked)
    lower = Fraction(w2) / 2
    scale = 4 * len(terms) / (e * lower) if lower > 0 else None
    # rounding is applied to the whole closure first, so that the reduced
    # graph is reached from it by vertex deletions alone
    rounded = rounded_closure(g, closure, scale)
    rec = TranscriptRecorder(rounded)
    rec.keep_only(kept)
    reduced = SteinerInstance(rec.graph, inst.terminals)
    return SteinerKernel(reduced, kept, far, lower, tree2, closure, scale, rec.transcript())


def rounded_closure(g: MultiGraph, closure: Closure, scale: Fraction | None) -> MultiGraph:
    """Metric closure with weights floor(w * scale); ``None`` means the
    terminal tree is free, so only zero versus positive distance matters."""
    verts = sorted(g.vertices)
    edges = []
    for u, v in combinations(verts, 2):
        w = closure.dist[u][v]
        if w == INF:
            continue
        if scale is None:
            edges.append((u, v, 0 if w == 0 else 1))
        else:
            edges.append((u, v, math.floor(Fraction(w) * scale)))
    return MultiGraph.from_edges(verts, edges, weighted=True, next_id=g.next_id)


def steiner_kernelize(inst: SteinerInstance, k: int | None, eps: float, cap: int = DEFAULT_DW_CAP) -> KernelOutput:
    alpha = alpha_from_accuracy("min", "eps", eps)
    ker = reduce_steiner(inst, eps, cap)

    def lifter(edges: Iterable[Pair]) -> list[Pair]:
        edges = [_pair(u, v) for u, v in edges]
        if steiner_tree_cost(ker.reduced.graph, inst.terminals, edges) == INF:
            edges = ker.tree2
        return expand_to_tree(inst.graph, ker.closure, edges, inst.terminals)

    return KernelOutput(
        reduced=ParameterizedInstance(ker.reduced, len(inst.terminals)),
        lifter=lifter,
        alpha=alpha,
        strict=False,
        size_bound=len(inst.terminals) * 2 ** len(inst.terminals),
        transcript=ker.transcript,
        info={"kernel": ker, "far": len(ker.far)},
    )
