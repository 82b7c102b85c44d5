"""Seeded instance generators.

All randomness in the package lives here.  Every generator takes a
``random.Random`` (Mersenne Twister, MT19937) so that the same seed gives
the same instance on any Python 3 installation.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

from .graph import MultiGraph
from .ola import OlaInstance
from .steiner import SteinerInstance

PRNG_NAME = "random.Random MT19937"


def gnp(n: int, p: float, rng: random.Random) -> MultiGraph:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return MultiGraph.from_edges(range(n), [e for e in combinations(range(n), 2) if rng.random() < p])


def random_tree_edges(vertices: list[int], rng: random.Random) -> list[tuple[int, int]]:
    """Random recursive tree: each vertex hooks onto an earlier one."""
    order = list(vertices)
    rng.shuffle(order)
    return [(order[i], order[rng.randrange(i)]) for i in range(1, len(order))]


def connected_gnp(n: int, p: float, rng: random.Random) -> MultiGraph:
    edges = set(map(lambda e: (min(e), max(e)), random_tree_edges(list(range(n)), rng)))
    edges |= {e for e in combinations(range(n), 2) if rng.random() < p}
    return MultiGraph.from_edges(range(n), sorted(edges))


def planted_cvc(n: int, k: int, rng: random.Random, p: float = 0.3) -> tuple[MultiGraph, frozenset[int]]:
    """Graph with a connected vertex cover of size at most k.

    The first k vertices (after shuffling) form the cover: a random tree
    plus random extra cover edges.  Every other vertex is attached to a
    nonempty random subset of the cover.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    verts = list(range(n))
    rng.shuffle(verts)
    cover, rest = verts[:k], verts[k:]
    edges = set((min(e), max(e)) for e in random_tree_edges(cover, rng))
    edges |= {(min(a, b), max(a, b)) for a, b in combinations(cover, 2) if rng.random() < p}
    for v in rest:
        nbrs = [c for c in cover if rng.random() < p] or [rng.choice(cover)]
        edges |= {(min(v, c), max(v, c)) for c in nbrs}
    return MultiGraph.from_edges(range(n), sorted(edges)), frozenset(cover)


def planted_cycles(n: int, k: int, rng: random.Random, extra: int = 0, digons: bool = True) -> MultiGraph:
    """k vertex-disjoint cycles (digons allowed) plus ``extra`` random edges."""
    lengths = []
    low = 2 if digons else 3
    budget = n
    for i in range(k):
        remaining = k - i - 1
        hi = max(low, min(6, budget - low * remaining))
        length = rng.randint(low, hi)
        lengths.append(length)
        budget -= length
    if budget < 0:
        raise ValueError("not enough vertices for the planted cycles")
    verts = list(range(n))
    rng.shuffle(verts)
    edges: list[tuple[int, int]] = []
    pos = 0
    for length in lengths:
        cyc = verts[pos : pos + length]
        pos += length
        if length == 2:
            edges += [(cyc[0], cyc[1])] * 2
        else:
            edges += list(zip(cyc, cyc[1:] + cyc[:1]))
    for _ in range(extra):
        u, v = rng.sample(range(n), 2)
        edges.append((u, v))
    return MultiGraph.from_edges(range(n), edges)


def random_multigraph(n: int, m: int, rng: random.Random, parallel: float = 0.15) -> MultiGraph:
    """m random edges; each is doubled with probability ``parallel``."""
    edges: list[tuple[int, int]] = []
    if n >= 2:
        for _ in range(m):
            u, v = rng.sample(range(n), 2)
            edges.append((u, v))
            if rng.random() < parallel:
                edges.append((u, v))
    return MultiGraph.from_edges(range(n), edges)


def subdivided_multigraph(core: int, n: int, rng: random.Random, edges: int | None = None) -> MultiGraph:
    """A small random multigraph on ``core`` hubs whose edges are subdivided
    into long paths until the graph has ``n`` vertices.  Long induced paths
    between high degree vertices are what path shortening acts on."""
    if core < 1 or n < core:
        raise ValueError("need 1 <= core <= n")
    m = edges if edges is not None else core + rng.randint(0, core)
    links = [tuple(rng.sample(range(core), 2)) if core > 1 else (0, 0) for _ in range(m)]
    links = [e for e in links if e[0] != e[1]]
    spare = n - core
    cuts = sorted(rng.randint(0, spare) for _ in range(len(links) - 1)) if links else []
    lengths = [b - a for a, b in zip([0] + cuts, cuts + [spare])]
    out: list[tuple[int, int]] = []
    nxt = core
    for (u, v), extra in zip(links, lengths):
        chain = [u] + list(range(nxt, nxt + extra)) + [v]
        nxt += extra
        out += list(zip(chain, chain[1:]))
    return MultiGraph.from_edges(range(nxt), out)


def random_string(length: int, sigma: int, rng: random.Random) -> str:
    if not 1 <= sigma <= 26:
        raise ValueError("alphabet size must be between 1 and 26")
    letters = string.ascii_lowercase[:sigma]
    return "".join(rng.choice(letters) for _ in range(length))


def steiner_grid(rows: int, cols: int, terminals: int, rng: random.Random, max_weight: int = 9) -> SteinerInstance:
    def vid(r: int, c: int) -> int:
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1), rng.randint(1, max_weight)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c), rng.randint(1, max_weight)))
    n = rows * cols
    g = MultiGraph.from_edges(range(n), edges, weighted=True)
    return SteinerInstance(g, frozenset(rng.sample(range(n), min(terminals, n))))


def weighted_connected(n: int, p: float, terminals: int, rng: random.Random, max_weight: int = 9) -> SteinerInstance:
    base = connected_gnp(n, p, rng)
    g = MultiGraph.from_edges(range(n), [(u, v, rng.randint(1, max_weight)) for u, v in base.edges()], weighted=True)
    return SteinerInstance(g, frozenset(rng.sample(range(n), min(terminals, n))))


def vc_bounded(k: int, outside: int, rng: random.Random, p: float = 0.5) -> OlaInstance:
    """Graph with vertex cover {0..k-1}; outside vertices see random cover subsets."""
    cover = list(range(k))
    edges = [e for e in combinations(cover, 2) if rng.random() < p]
    for v in range(k, k + outside):
        edges += [(c, v) for c in cover if rng.random() < p]
    g = MultiGraph.from_edges(range(k + outside), edges)
    return OlaInstance(g, frozenset(cover))


def grouped_instance(k: int, x: int, rng: random.Random, max_groups: int = 3, p: float = 0.5) -> OlaInstance:
    """Vertex-cover instance whose twin classes hold a few groups of x
    vertices plus a random remainder, for exercising the grouping step."""
    cover = list(range(k))
    edges = [e for e in combinations(cover, 2) if rng.random() < p]
    nxt = k
    seen: set[frozenset[int]] = set()
    for _ in range(rng.randint(1, 2 ** k)):
        nbhd = frozenset(c for c in cover if rng.random() < p)
        if nbhd in seen:
            continue
        seen.add(nbhd)
        size = x * rng.randint(1, max_groups) + rng.randrange(x)
        for v in range(nxt, nxt + size):
            edges += [(c, v) for c in sorted(nbhd)]
        nxt += size
    return OlaInstance(MultiGraph.from_edges(range(nxt), edges), frozenset(cover))


def random_intervals(count: int, labels: int, rng: random.Random, span: int | None = None) -> list[tuple[int, int, int]]:
    span = max(1, span or 2 * count)
    out = []
    for _ in range(count):
        a = rng.randint(1, span)
        b = rng.randint(a, span)
        out.append((a, b, rng.randrange(labels)))
    return out


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0


FAMILIES = ("gnp", "planted-cvc", "planted-cycles", "random-string", "steiner-grid", "vc-bounded")


def generate(spec: GeneratorSpec) -> Any:
    """Build the instance described by ``spec``; same spec, same instance."""
    rng = random.Random(spec.seed)
    p = dict(spec.params)
    try:
        if spec.family == "gnp":
            return gnp(int(p["n"]), float(p.get("p", 0.3)), rng)
        if spec.family == "planted-cvc":
            return planted_cvc(int(p["n"]), int(p["k"]), rng, float(p.get("p", 0.3)))
        if spec.family == "planted-cycles":
            return planted_cycles(int(p["n"]), int(p["k"]), rng, int(p.get("extra", 0)))
        if spec.family == "random-string":
            return random_string(int(p["length"]), int(p["sigma"]), rng)
        if spec.family == "steiner-grid":
            return steiner_grid(int(p["rows"]), int(p["cols"]), int(p["terminals"]), rng, int(p.get("max_weight", 9)))
        if spec.family == "vc-bounded":
            return vc_bounded(int(p["k"]), int(p["n"]), rng, float(p.get("p", 0.5)))
    except KeyError as exc:
        raise ValueError(f"{spec.family} needs parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")
