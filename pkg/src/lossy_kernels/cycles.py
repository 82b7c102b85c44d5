"""Approximate kernel for vertex-disjoint Cycle Packing.

Pipeline:

1. split: find many disjoint cycles, or a small feedback vertex set F;
2. shrink the forest G - F with the leaf rule and cap parallel edges at 2;
3. pick F' within F and hitting vertices S in the forest (``mark_in_tree``);
4. cut the graph into a small set R, the set Z = F', and long paths that
   only touch R at their ends;
5. on every path, build interval instances describing which subpaths can
   carry a cycle through Z, keep the endpoints of the intervals a covering
   family marks, and contract the rest of the path.

All changes are recorded as minor operations; lifting replays them
backwards, re-expanding contracted vertices inside cycles.

A cycle is a tuple of distinct vertices in cyclic order; a 2-tuple is a
digon and needs two parallel edges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .framework import INF, KernelOutput, ParameterizedInstance, alpha_from_accuracy, exact
from .graph import (
    AddVertex,
    ContractEdge,
    MinorOp,
    MinorTranscript,
    MultiGraph,
    TranscriptRecorder,
    apply_op,
    contract_edge,
    delete_edge,
    delete_vertex,
)
from .ulic import LabelledIntervalInstance, build_ulic

Cycle = tuple[int, ...]
DEFAULT_C = 4.0


# -- cycles and packings ------------------------------------------------


def is_cycle(g: MultiGraph, cyc: Sequence[int]) -> bool:
    if len(cyc) < 2 or len(set(cyc)) != len(cyc) or any(v not in g for v in cyc):
        return False
    if len(cyc) == 2:
        return g.multiplicity(cyc[0], cyc[1]) >= 2
    return all(g.has_edge(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))


def is_packing(g: MultiGraph, cycles: Iterable[Sequence[int]]) -> bool:
    seen: set[int] = set()
    for cyc in cycles:
        if not is_cycle(g, cyc) or seen & set(cyc):
            return False
        seen |= set(cyc)
    return True


def cp_value(g: MultiGraph, k: int, cycles: Iterable[Sequence[int]]) -> int | float:
    cycles = list(cycles)
    if not is_packing(g, cycles):
        return -INF
    return min(len(cycles), k + 1)


def is_forest(g: MultiGraph, removed: Iterable[int] = ()) -> bool:
    removed = set(removed)
    parent = {v: v for v in g.vertices if v not in removed}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v), m in g.edge_multiset.items():
        if u in removed or v in removed:
            continue
        if m > 1:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def shortest_cycle(g: MultiGraph) -> Cycle | None:
    """A shortest cycle (digons first), ties broken towards low ids."""
    for (u, v), m in sorted(g.edge_multiset.items()):
        if m >= 2:
            return (u, v)
    best: Cycle | None = None
    for s in sorted(g.vertices):
        parent = {s: None}
        dist = {s: 0}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if best is not None and 2 * dist[x] + 1 >= len(best):
                break
            for y in sorted(g.adj[x]):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif y != parent[x]:
                    left, right = [x], [y]
                    while left[-1] != s:
                        left.append(parent[left[-1]])
                    while right[-1] != s:
                        right.append(parent[right[-1]])
                    cyc = tuple(left[::-1]) + tuple(right[:-1])
                    if len(set(cyc)) == len(cyc) and (best is None or len(cyc) < len(best)):
                        best = cyc
    return best


def greedy_cycle_extraction(g: MultiGraph, limit: int) -> list[Cycle]:
    out: list[Cycle] = []
    cur = g
    while len(out) < limit:
        cyc = shortest_cycle(cur)
        if cyc is None:
            break
        out.append(cyc)
        cur = cur.without(cyc)
    return out


def _semidisjoint_cycle(adj: dict[int, dict[int, int]]) -> set[int] | None:
    deg = {v: sum(n.values()) for v, n in adj.items()}
    two = {v for v, d in deg.items() if d == 2}
    seen: set[int] = set()
    for s in sorted(two):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in two and y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        outside = {y for x in comp for y in adj[x] if y not in comp}
        if not outside:
            return comp
        if len(outside) == 1:
            return comp | outside
    return None


def fvs_local_ratio(g: MultiGraph) -> frozenset[int]:
    """Feedback vertex set within twice the optimum (local ratio method).

    Weights start at 1.  Each round either charges a cycle whose vertices
    all have degree 2 except possibly one, or charges every vertex in
    proportion to degree - 1.  Vertices whose weight hits zero join the
    solution; a final reverse pass drops redundant ones.
    """
    adj = {v: dict(n) for v, n in g.adj.items()}
    weight = {v: Fraction(1) for v in adj}
    chosen: list[int] = []

    def remove(v: int) -> None:
        for u in adj.pop(v):
            del adj[u][v]

    def cleanup() -> None:
        todo = [v for v in adj if sum(adj[v].values()) <= 1]
        while todo:
            v = todo.pop()
            if v not in adj or sum(adj[v].values()) > 1:
                continue
            nbrs = list(adj[v])
            remove(v)
            todo.extend(u for u in nbrs if sum(adj[u].values()) <= 1)

    cleanup()
    while adj:
        cyc = _semidisjoint_cycle(adj)
        if cyc is not None:
            gamma = min(weight[v] for v in cyc)
            for v in cyc:
                weight[v] -= gamma
        else:
            deg = {v: sum(n.values()) for v, n in adj.items()}
            gamma = min(weight[v] / (deg[v] - 1) for v in adj)
            for v in adj:
                weight[v] -= gamma * (deg[v] - 1)
        for v in sorted(v for v in adj if weight[v] == 0):
            chosen.append(v)
            remove(v)
        cleanup()
    result = list(chosen)
    for v in reversed(chosen):
        trial = [x for x in result if x != v]
        if is_forest(g, trial):
            result = trial
    return frozenset(result)


@dataclass(frozen=True)
class Cycles:
    cycles: tuple[Cycle, ...]


@dataclass(frozen=True)
class Fvs:
    vertices: frozenset[int]


EpSplit = Union[Cycles, Fvs]


def fvs_budget(k: int, c: float = DEFAULT_C) -> float:
    return c * k * math.log(k) if k > 1 else 0.0


def erdos_posa_split(g: MultiGraph, k: int, c: float = DEFAULT_C) -> EpSplit:
    """k disjoint cycles, or a feedback vertex set.

    Greedy shortest-cycle extraction is tried first; if it stops short of k
    cycles the 2-approximate feedback vertex set is returned, whatever its
    size relative to c k ln k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    found = greedy_cycle_extraction(g, k)
    if len(found) >= k:
        return Cycles(tuple(found[:k]))
    return Fvs(fvs_local_ratio(g))


# -- reduction rules ------------------------------------------------------


def multiedge_ops(g: MultiGraph, only: Iterable[int] | None = None) -> list[MinorOp]:
    ops: list[MinorOp] = []
    pairs = g.edge_multiset.items()
    if only is not None:
        only = set(only)
        pairs = [(e, m) for e, m in pairs if e[0] in only or e[1] in only]
    for (u, v), m in sorted(pairs):
        if m > 2:
            ops.append(delete_edge(g, u, v, m - 2)[1])
    return ops


def reduce_multiedge(g: MultiGraph) -> MultiGraph:
    for op in multiedge_ops(g):
        g = apply_op(g, op)
    return g


def _forest_degree(g: MultiGraph, v: int, fvs: set[int]) -> int:
    return sum(m for u, m in g.adj[v].items() if u not in fvs)


def reduce_leaf(g: MultiGraph, k: int, fvs: Iterable[int]) -> tuple[MultiGraph, list[MinorOp]] | None:
    """Delete or contract one low-degree forest vertex, if enough exist."""
    fvs = set(fvs)
    if not is_forest(g, fvs):
        raise ValueError("F is not a feedback vertex set")
    size = len(fvs)
    low = sorted(v for v in g.vertices if v not in fvs and _forest_degree(g, v, fvs) <= 1)
    if len(low) <= size * size * (2 * size + 1):
        return None
    quota = 2 * size + 1
    marked: set[int] = set()
    order = sorted(fvs)
    for i, u in enumerate(order):
        for v in order[i:]:
            if u == v:
                pool = [x for x in low if g.multiplicity(x, u) >= 2]
            else:
                pool = [x for x in low if g.has_edge(x, u) and g.has_edge(x, v)]
            marked.update(pool[:quota])
    w = next(x for x in low if x not in marked)
    forest_nbrs = [u for u in g.adj[w] if u not in fvs]
    if not forest_nbrs:
        g2, op = delete_vertex(g, w)
    else:
        g2, op = contract_edge(g, w, forest_nbrs[0])
    return g2, [op]


@dataclass(frozen=True)
class TreeMarks:
    chosen_fvs: tuple[int, ...]
    hitting: tuple[int, ...]
    cycles: tuple[Cycle, ...]


def _rooted_forest(g: MultiGraph, fvs: set[int]):
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    children: dict[int, list[int]] = {}
    for root in sorted(v for v in g.vertices if v not in fvs):
        if root in parent:
            continue
        parent[root], depth[root] = None, 1
        children[root] = []
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(g.adj[x]):
                if y in fvs or y in parent:
                    continue
                parent[y], depth[y] = x, depth[x] + 1
                children[y] = []
                children[x].append(y)
                queue.append(y)
    return parent, depth, children


def _tree_path(parent: dict[int, int | None], a: int, b: int) -> list[int]:
    up_a = [a]
    while parent[up_a[-1]] is not None:
        up_a.append(parent[up_a[-1]])
    index = {v: i for i, v in enumerate(up_a)}
    up_b = [b]
    while up_b[-1] not in index:
        up_b.append(parent[up_b[-1]])
    meet = index[up_b[-1]]
    return up_a[: meet + 1] + up_b[-2::-1]


def mark_in_tree(g: MultiGraph, k: int, fvs: Iterable[int]) -> Cycles | TreeMarks:
    """Greedily pick deepest forest subtrees closing a cycle with F.

    Every tree of G - F hangs below a shared dummy root.  While some
    remaining subtree together with one unused w in F contains a cycle,
    the deepest such subtree (lowest id on ties) is cut off, w joins F'
    and the subtree root joins S.  Reaching k picks yields k disjoint
    cycles.
    """
    fvs = set(fvs)
    if not is_forest(g, fvs):
        raise ValueError("F is not a feedback vertex set")
    parent, depth, children = _rooted_forest(g, fvs)
    alive = set(parent)
    unused = sorted(fvs)
    picks_f: list[int] = []
    picks_s: list[int] = []
    cycles: list[Cycle] = []

    def subtree(u: int) -> list[int]:
        out, stack = [], [u]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(c for c in children[x] if c in alive)
        return out

    while len(picks_f) < k:
        hit = None
        for u in sorted(alive, key=lambda v: (-depth[v], v)):
            sub = subtree(u)
            for w in unused:
                if sum(g.multiplicity(w, x) for x in sub) >= 2:
                    hit = (u, w, sub)
                    break
            if hit:
                break
        if hit is None:
            break
        u, w, sub = hit
        touch = sorted(x for x in sub if g.has_edge(w, x))
        double = [x for x in touch if g.multiplicity(w, x) >= 2]
        if double:
            cycles.append((w, double[0]))
        else:
            cycles.append((w,) + tuple(_tree_path(parent, touch[0], touch[1])))
        unused.remove(w)
        alive -= set(sub)
        picks_f.append(w)
        picks_s.append(u)
    if len(picks_f) >= k:
        return Cycles(tuple(cycles))
    return TreeMarks(tuple(picks_f), tuple(picks_s), tuple(cycles))


# -- decomposition ----------------------------------------------------------


@dataclass
class Decomposition:
    graph: MultiGraph
    transcript: MinorTranscript
    fvs: frozenset[int]
    Z: frozenset[int]
    R: frozenset[int]
    Q: frozenset[int]
    O: frozenset[int]
    S: frozenset[int]
    W: frozenset[int]
    paths: tuple[tuple[int, ...], ...]


def _order_path(g: MultiGraph, comp: frozenset[int]) -> tuple[int, ...]:
    ends = [v for v in comp if sum(1 for u in g.adj[v] if u in comp) <= 1]
    start = min(ends)
    path = [start]
    prev = None
    while True:
        nxt = [u for u in g.adj[path[-1]] if u in comp and u != prev]
        if not nxt:
            break
        prev = path[-1]
        path.append(nxt[0])
    return tuple(path)


def decompose(g: MultiGraph, k: int, c: float = DEFAULT_C) -> Cycles | Decomposition:
    """k disjoint cycles of ``g``, or a minor of ``g`` cut into Z, R and paths."""
    rec = TranscriptRecorder(g)
    rec.extend(multiedge_ops(rec.graph))
    split = erdos_posa_split(rec.graph, k, c)
    if isinstance(split, Cycles):
        return Cycles(tuple(lift_packing(rec.transcript(), split.cycles)))
    fvs = set(split.vertices)
    while True:
        step = reduce_leaf(rec.graph, k, fvs)
        if step is None:
            break
        _, ops = step
        rec.extend(ops)
        fresh = [op.w for op in ops if isinstance(op, ContractEdge)]
        if fresh:
            rec.extend(multiedge_ops(rec.graph, fresh))
    gp = rec.graph
    marks = mark_in_tree(gp, k, fvs)
    transcript = rec.transcript()
    if isinstance(marks, Cycles):
        return Cycles(tuple(lift_packing(transcript, marks.cycles)))
    z = frozenset(marks.chosen_fvs)
    s = frozenset(marks.hitting)
    forest = gp.vertices - fvs
    q = frozenset(v for v in forest if _forest_degree(gp, v, fvs) >= 3)
    o = frozenset(u for w in fvs - z for u in gp.adj[w] if u in forest)
    rest = forest - q - o - s
    w_iso = frozenset(v for v in rest if not any(u in rest for u in gp.adj[v]))
    r = q | o | s | w_iso | (fvs - z)
    path_vertices = rest - w_iso
    comps = gp.induced(path_vertices).components()
    paths = tuple(sorted((_order_path(gp, comp) for comp in comps), key=min))
    return Decomposition(gp, transcript, frozenset(fvs), z, r, q, o, s, w_iso, paths)


# -- path interval graphs ------------------------------------------------------

CLUB = None  # stands for "from the very end of the path"


@dataclass
class PathIntervalGraph:
    path: tuple[int, ...]
    x: int | None
    y: int | None
    window: tuple[int, int]
    instance: LabelledIntervalInstance
    label_pairs: tuple[tuple[int, int], ...]


def _potential(gp: MultiGraph, path: Sequence[int], a: int, b: int, i: int, j: int) -> bool:
    """Whether a - v_i..v_j - b is an induced path (a != b) or induced cycle.

    Positions are 1-based.  The edge between a and b, if any, is ignored:
    a chordless cycle may use it to close.
    """
    seg = path[i - 1 : j]
    mult_a = [gp.multiplicity(a, v) for v in seg]
    if a == b:
        if i == j:
            return mult_a[0] >= 2
        return mult_a[0] == 1 and mult_a[-1] == 1 and not any(mult_a[1:-1])
    mult_b = [gp.multiplicity(b, v) for v in seg]
    return mult_a[0] == 1 and mult_b[-1] == 1 and not any(mult_a[1:]) and not any(mult_b[:-1])


def build_path_graphs(dec: Decomposition, path: Sequence[int]) -> list[PathIntervalGraph]:
    gp = dec.graph
    zs = sorted(dec.Z)
    pairs = tuple((a, b) for a in zs for b in zs)
    label = {p: i for i, p in enumerate(pairs)}
    length = len(path)
    out = []
    for x in [CLUB] + zs:
        if x is CLUB:
            lo = 1
        else:
            hits = [i for i, v in enumerate(path, 1) if gp.has_edge(x, v)]
            if not hits:
                continue
            lo = hits[0] + 1
        for y in [CLUB] + zs:
            if y is CLUB:
                hi = length
            else:
                hits = [i for i, v in enumerate(path, 1) if gp.has_edge(y, v)]
                if not hits:
                    continue
                hi = hits[-1] - 1
            intervals = []
            for a, b in pairs:
                for i in range(lo, hi + 1):
                    for j in range(i, hi + 1):
                        if _potential(gp, path, a, b, i, j) or _potential(gp, path, b, a, i, j):
                            intervals.append((i, j, label[(a, b)]))
            inst = LabelledIntervalInstance(tuple(intervals), max(1, len(pairs)))
            out.append(PathIntervalGraph(tuple(path), x, y, (lo, hi), inst, pairs))
    return out


def max_label_density(inst: LabelledIntervalInstance) -> int:
    """Largest number of same-label intervals sharing a point."""
    best = 0
    points = {x for l, r, _ in inst.intervals for x in (l, r)}
    for p in points:
        counts: dict[int, int] = {}
        for l, r, lab in inst.intervals:
            if l <= p <= r:
                counts[lab] = counts.get(lab, 0) + 1
        best = max(best, max(counts.values(), default=0))
    return best


def path_keep_set(dec: Decomposition, path: Sequence[int], eps: float | Fraction) -> set[int]:
    """Path ends, first/last neighbours of each z, and marked interval ends."""
    gp = dec.graph
    keep = {path[0], path[-1]}
    for z in dec.Z:
        hits = [v for v in path if gp.has_edge(z, v)]
        if hits:
            keep |= {hits[0], hits[-1]}
    half = exact(eps) / 2
    for pg in build_path_graphs(dec, path):
        if not pg.instance.intervals:
            continue
        marked = build_ulic(pg.instance, half).marked
        for idx in marked:
            i, j, _ = pg.instance.intervals[idx]
            keep |= {path[i - 1], path[j - 1]}
    return keep


# -- lifting -------------------------------------------------------------------


def _expand(before: MultiGraph, op: ContractEdge, cyc: Cycle) -> Cycle:
    at = cyc.index(op.w)
    rest = cyc[at + 1 :] + cyc[:at]
    for head in ((op.u,), (op.v,), (op.u, op.v), (op.v, op.u)):
        cand = head + rest
        if is_cycle(before, cand):
            return cand
    raise AssertionError(f"cannot re-expand contracted vertex {op.w} in cycle {cyc}")


def lift_packing(t: MinorTranscript, cycles: Iterable[Sequence[int]]) -> list[Cycle]:
    """Map a packing of the replayed graph back to the original graph.

    Invalid packings lift to the empty packing.
    """
    graphs = t.graphs()
    cycles = [tuple(c) for c in cycles]
    if not is_packing(graphs[-1], cycles):
        return []
    for op, before in zip(reversed(t.ops), reversed(graphs[:-1])):
        if isinstance(op, ContractEdge):
            cycles = [_expand(before, op, c) if op.w in c else c for c in cycles]
        elif isinstance(op, AddVertex) and any(op.v in c for c in cycles):
            raise ValueError("cycle runs through a vertex with no preimage")
    return cycles


# -- kernel --------------------------------------------------------------------


def _digon_instance(g: MultiGraph, cycles: Sequence[Cycle]) -> TranscriptRecorder:
    """Shrink ``g`` to one digon per given cycle."""
    rec = TranscriptRecorder(g)
    rec.keep_only({v for c in cycles for v in c})
    want: dict[tuple[int, int], int] = {}
    for c in cycles:
        if len(c) == 2:
            want[(min(c), max(c))] = 2
        else:
            for a, b in zip(c, c[1:] + c[:1]):
                want[(min(a, b), max(a, b))] = 1
    for (u, v), m in sorted(rec.graph.edge_multiset.items()):
        if m > want.get((u, v), 0):
            rec.delete_edge(u, v, m - want.get((u, v), 0))
    for c in cycles:
        cur = list(c)
        while len(cur) > 2:
            cur = [rec.contract(cur[0], cur[1])] + cur[2:]
    return rec


def cp_kernelize(g: MultiGraph, k: int, eps: float, c: float = DEFAULT_C) -> KernelOutput:
    """(1 - eps)-approximate kernel.

    The early exit looks for k + 1 cycles (the capped optimum) rather than
    k, so that an early exit is exact rather than merely close.
    """
    alpha = alpha_from_accuracy("max", "eps", eps)
    target = k + 1
    dec = decompose(g, target, c)
    info: dict = {}
    if isinstance(dec, Cycles):
        rec = _digon_instance(g, dec.cycles)
        info["early_exit"] = True
    else:
        rec = TranscriptRecorder(g, list(dec.transcript.ops))
        info.update(early_exit=False, Z=len(dec.Z), R=len(dec.R), paths=len(dec.paths))
        info["decomposition"] = dec
        zs = sorted(dec.Z)
        for path in dec.paths:
            keep = path_keep_set(dec, path, eps)
            drop = [v for v in path if v not in keep]
            for v in drop:
                for z in zs:
                    m = rec.graph.multiplicity(v, z)
                    if m:
                        rec.delete_edge(v, z, m)
            cur = path[0]
            for v in path[1:]:
                cur = rec.contract(cur, v) if v not in keep else v
    transcript = rec.transcript()

    def lifter(cycles: Iterable[Sequence[int]]) -> list[Cycle]:
        return lift_packing(transcript, cycles)

    return KernelOutput(
        reduced=ParameterizedInstance(rec.graph, k),
        lifter=lifter,
        alpha=alpha,
        strict=False,
        size_bound=None,
        transcript=transcript,
        info=info,
    )
