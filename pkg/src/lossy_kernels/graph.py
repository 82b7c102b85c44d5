"""Immutable undirected multigraphs with recorded minor operations.

Every kernel that shrinks a graph records what it did as a list of
``MinorOp`` values.  Replaying the list on the original graph reproduces the
reduced graph exactly, and the recorded ancestry lets lifters translate
reduced-graph vertex ids back to original ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected multigraph keyed by integer vertex ids.

    ``adj[u][v]`` is the number of parallel edges between ``u`` and ``v``.
    ``weights`` (optional) maps an ordered pair ``(min, max)`` to a
    nonnegative integer weight shared by all parallel copies.
    ``next_id`` is the id the next contraction will allocate.
    """

    adj: Mapping[int, Mapping[int, int]]
    weights: Mapping[Edge, int] | None = None
    next_id: int = 0

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int] | tuple[int, int, int]] = (),
        weighted: bool = False,
        next_id: int | None = None,
    ) -> MultiGraph:
        adj: dict[int, dict[int, int]] = {v: {} for v in vertices}
        weights: dict[Edge, int] | None = {} if weighted else None
        for e in edges:
            u, v = e[0], e[1]
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            adj[u][v] = adj[u].get(v, 0) + 1
            adj[v][u] = adj[v].get(u, 0) + 1
            if weights is not None:
                w = int(e[2]) if len(e) > 2 else 1
                if w < 0:
                    raise ValueError("edge weights must be nonnegative")
                key = edge_key(u, v)
                weights[key] = min(w, weights.get(key, w))
        top = max(adj, default=-1) + 1
        return cls(adj, weights, top if next_id is None else max(next_id, top))

    @classmethod
    def empty(cls, n: int = 0) -> MultiGraph:
        return cls.from_edges(range(n))

    # -- basic queries -------------------------------------------------

    @cached_property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def __contains__(self, v: object) -> bool:
        return v in self.adj

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.adj))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return (
            self.adj == other.adj
            and (self.weights or None) == (other.weights or None)
            and self.next_id == other.next_id
        )

    __hash__ = None  # type: ignore[assignment]

    def multiplicity(self, u: int, v: int) -> int:
        return self.adj.get(u, {}).get(v, 0)

    def has_edge(self, u: int, v: int) -> bool:
        return self.multiplicity(u, v) > 0

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(self.adj[v])

    def degree(self, v: int) -> int:
        """Degree counting parallel edges."""
        return sum(self.adj[v].values())

    def weight(self, u: int, v: int) -> int:
        if self.weights is None:
            return 1
        return self.weights[edge_key(u, v)]

    @cached_property
    def edge_multiset(self) -> dict[Edge, int]:
        return {
            (u, v): m for u, nbrs in self.adj.items() for v, m in nbrs.items() if u < v
        }

    def edges(self) -> list[Edge]:
        """Distinct vertex pairs joined by at least one edge, sorted."""
        return sorted(self.edge_multiset)

    @property
    def num_edges(self) -> int:
        return sum(self.edge_multiset.values())

    def neighborhood(self, vs: Iterable[int]) -> frozenset[int]:
        vs = set(vs)
        return frozenset(u for v in vs for u in self.adj[v]) - vs

    def closed_neighborhood(self, v: int) -> frozenset[int]:
        return frozenset(self.adj[v]) | {v}

    # -- derived graphs ------------------------------------------------

    def induced(self, keep: Iterable[int]) -> MultiGraph:
        keep = set(keep)
        adj = {
            v: {u: m for u, m in self.adj[v].items() if u in keep}
            for v in self.adj
            if v in keep
        }
        weights = None
        if self.weights is not None:
            weights = {e: w for e, w in self.weights.items() if e[0] in keep and e[1] in keep}
        return MultiGraph(adj, weights, self.next_id)

    def without(self, drop: Iterable[int]) -> MultiGraph:
        drop = set(drop)
        return self.induced(v for v in self.adj if v not in drop)

    def components(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        comps = []
        for s in sorted(self.adj):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def is_connected(self, within: Iterable[int] | None = None) -> bool:
        """Whether ``within`` (default: all vertices) induces a connected graph.

        The empty set counts as connected.
        """
        target = set(self.adj) if within is None else set(within)
        if not target:
            return True
        start = min(target)
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y in target and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == target

    def canonical(self) -> str:
        """Byte-stable text form keeping the internal ids and weights."""
        lines = [f"v {' '.join(map(str, sorted(self.adj)))}", f"next {self.next_id}"]
        for (u, v), m in sorted(self.edge_multiset.items()):
            w = f" w{self.weights[(u, v)]}" if self.weights is not None else ""
            lines.append(f"e {u} {v} x{m}{w}")
        return "\n".join(lines) + "\n"


# -- minor operations --------------------------------------------------


@dataclass(frozen=True)
class DeleteVertex:
    v: int


@dataclass(frozen=True)
class DeleteEdge:
    u: int
    v: int
    count: int = 1


@dataclass(frozen=True)
class ContractEdge:
    u: int
    v: int
    w: int


@dataclass(frozen=True)
class AddVertex:
    """Insert a fresh vertex ``v`` joined once to each of ``neighbors``.

    Not a minor operation; used only by the connected vertex cover gadget,
    whose pendant vertices have no preimage in the original graph.
    """

    v: int
    neighbors: tuple[int, ...]


MinorOp = Union[DeleteVertex, DeleteEdge, ContractEdge, AddVertex]


def _copy_adj(g: MultiGraph) -> dict[int, dict[int, int]]:
    return {v: dict(nbrs) for v, nbrs in g.adj.items()}


def delete_vertex(g: MultiGraph, v: int) -> tuple[MultiGraph, DeleteVertex]:
    if v not in g.adj:
        raise KeyError(f"unknown vertex {v}")
    adj = _copy_adj(g)
    for u in adj.pop(v):
        del adj[u][v]
    weights = None
    if g.weights is not None:
        weights = {e: w for e, w in g.weights.items() if v not in e}
    return MultiGraph(adj, weights, g.next_id), DeleteVertex(v)


def delete_edge(g: MultiGraph, u: int, v: int, count: int = 1) -> tuple[MultiGraph, DeleteEdge]:
    have = g.multiplicity(u, v)
    if count < 1 or have < count:
        raise ValueError(f"cannot delete {count} copies of edge ({u}, {v}); {have} present")
    adj = _copy_adj(g)
    weights = dict(g.weights) if g.weights is not None else None
    if have == count:
        del adj[u][v]
        del adj[v][u]
        if weights is not None:
            weights.pop(edge_key(u, v), None)
    else:
        adj[u][v] -= count
        adj[v][u] -= count
    return MultiGraph(adj, weights, g.next_id), DeleteEdge(u, v, count)


def contract_edge(g: MultiGraph, u: int, v: int) -> tuple[MultiGraph, ContractEdge]:
    """Merge the endpoints of edge ``uv`` into the fresh vertex ``g.next_id``.

    Parallel edges to common neighbours are kept; edges between ``u`` and
    ``v`` would become loops and are discarded.
    """
    if not g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge")
    w = g.next_id
    adj = _copy_adj(g)
    merged: dict[int, int] = {}
    for x in (u, v):
        for y, m in adj.pop(x).items():
            del adj[y][x]
            if y not in (u, v):
                merged[y] = merged.get(y, 0) + m
    adj[w] = merged
    for y, m in merged.items():
        adj[y][w] = m
    weights = None
    if g.weights is not None:
        weights = {e: wt for e, wt in g.weights.items() if u not in e and v not in e}
        for y in merged:
            cands = [g.weights[edge_key(x, y)] for x in (u, v) if g.has_edge(x, y)]
            weights[edge_key(w, y)] = min(cands)
    return MultiGraph(adj, weights, w + 1), ContractEdge(u, v, w)


def add_vertex(g: MultiGraph, neighbors: Iterable[int]) -> tuple[MultiGraph, AddVertex]:
    nbrs = tuple(sorted(set(neighbors)))
    for y in nbrs:
        if y not in g.adj:
            raise KeyError(f"unknown vertex {y}")
    if g.weights is not None:
        raise ValueError("adding vertices to weighted graphs is unsupported")
    v = g.next_id
    adj = _copy_adj(g)
    adj[v] = {y: 1 for y in nbrs}
    for y in nbrs:
        adj[y][v] = 1
    return MultiGraph(adj, None, v + 1), AddVertex(v, nbrs)


def apply_op(g: MultiGraph, op: MinorOp) -> MultiGraph:
    if isinstance(op, DeleteVertex):
        return delete_vertex(g, op.v)[0]
    if isinstance(op, DeleteEdge):
        return delete_edge(g, op.u, op.v, op.count)[0]
    if isinstance(op, ContractEdge):
        if op.w != g.next_id:
            raise ValueError(f"contraction expected fresh id {g.next_id}, transcript says {op.w}")
        return contract_edge(g, op.u, op.v)[0]
    if isinstance(op, AddVertex):
        if op.v != g.next_id:
            raise ValueError(f"insertion expected fresh id {g.next_id}, transcript says {op.v}")
        return add_vertex(g, op.neighbors)[0]
    raise TypeError(f"not a minor operation: {op!r}")


# -- transcripts -------------------------------------------------------


@dataclass(frozen=True)
class MinorTranscript:
    original: MultiGraph
    ops: tuple[MinorOp, ...] = ()

    def graphs(self) -> list[MultiGraph]:
        """Every intermediate graph, starting with the original."""
        out = [self.original]
        for op in self.ops:
            out.append(apply_op(out[-1], op))
        return out

    def replay(self) -> MultiGraph:
        g = self.original
        for op in self.ops:
            g = apply_op(g, op)
        return g

    @cached_property
    def ancestry(self) -> dict[int, frozenset[int]]:
        """Map each surviving vertex id to the original vertices it stands for."""
        anc = {v: frozenset([v]) for v in self.original.adj}
        for op in self.ops:
            if isinstance(op, DeleteVertex):
                del anc[op.v]
            elif isinstance(op, ContractEdge):
                anc[op.w] = anc.pop(op.u) | anc.pop(op.v)
            elif isinstance(op, AddVertex):
                anc[op.v] = frozenset()
        return anc

    @cached_property
    def deleted(self) -> frozenset[int]:
        kept = frozenset().union(*self.ancestry.values()) if self.ancestry else frozenset()
        return self.original.vertices - kept

    def ancestry_is_partition(self) -> bool:
        seen: set[int] = set()
        for anc in self.ancestry.values():
            if seen & anc:
                return False
            seen |= anc
        return seen | self.deleted == set(self.original.vertices) and not (seen & self.deleted)

    def to_json_lines(self) -> str:
        import json

        rows = []
        for op in self.ops:
            row = {"op": type(op).__name__}
            row.update(op.__dict__)
            if isinstance(op, AddVertex):
                row["neighbors"] = list(op.neighbors)
            rows.append(json.dumps(row, sort_keys=True))
        return "".join(r + "\n" for r in rows)

    @staticmethod
    def ops_from_json_lines(text: str) -> tuple[MinorOp, ...]:
        import json

        kinds = {c.__name__: c for c in (DeleteVertex, DeleteEdge, ContractEdge, AddVertex)}
        ops = []
        for line in text.splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            cls = kinds[row.pop("op")]
            if cls is AddVertex:
                row["neighbors"] = tuple(row["neighbors"])
            ops.append(cls(**row))
        return tuple(ops)


def replay_inverse(t: MinorTranscript, reduced_ids: Iterable[int]) -> frozenset[int]:
    """Union of the ancestries of ``reduced_ids``.

    Raises ``KeyError`` for ids that do not survive in the reduced graph.
    """
    anc = t.ancestry
    out: set[int] = set()
    for v in reduced_ids:
        if v not in anc:
            raise KeyError(f"vertex {v} is not in the reduced graph")
        out |= anc[v]
    return frozenset(out)


@dataclass
class TranscriptRecorder:
    """Mutable helper that applies operations and logs them."""

    original: MultiGraph
    graph: MultiGraph = field(init=False)
    ops: list[MinorOp] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.graph = self.original
        for op in self.ops:
            self.graph = apply_op(self.graph, op)

    def delete_vertex(self, v: int) -> None:
        self.graph, op = delete_vertex(self.graph, v)
        self.ops.append(op)

    def delete_edge(self, u: int, v: int, count: int = 1) -> None:
        self.graph, op = delete_edge(self.graph, u, v, count)
        self.ops.append(op)

    def contract(self, u: int, v: int) -> int:
        self.graph, op = contract_edge(self.graph, u, v)
        self.ops.append(op)
        return op.w

    def add_vertex(self, neighbors: Iterable[int]) -> int:
        self.graph, op = add_vertex(self.graph, neighbors)
        self.ops.append(op)
        return op.v

    def extend(self, ops: Iterable[MinorOp]) -> None:
        for op in ops:
            self.graph = apply_op(self.graph, op)
            self.ops.append(op)

    def keep_only(self, keep: Iterable[int]) -> None:
        keep = set(keep)
        for v in sorted(self.graph.vertices - keep):
            self.delete_vertex(v)

    def transcript(self) -> MinorTranscript:
        return MinorTranscript(self.original, tuple(self.ops))
