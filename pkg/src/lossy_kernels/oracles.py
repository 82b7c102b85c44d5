"""Exact solvers used as ground truth.

These read the raw adjacency of a ``MultiGraph`` (``g.adj``, ``g.weights``)
and nothing else from the rest of the package, so a bug in a kernel's graph
handling cannot hide itself by also corrupting the reference answer.

Each solver refuses (``OracleRefusal``) rather than approximating when an
instance exceeds its budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator

from .graph import MultiGraph

INF = math.inf


class OracleRefusal(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    cvc_vertices: int = 20
    cp_vertices: int = 18
    df_alphabet: int = 16
    pvc_subsets: int = 2_000_000
    ola_vertices: int = 16
    steiner_free_vertices: int = 18


DEFAULT_BUDGET = OracleBudget()


def _adjacency(g: MultiGraph) -> dict[int, dict[int, int]]:
    return {v: dict(nbrs) for v, nbrs in g.adj.items()}


def _connected(adj: dict[int, dict[int, int]], within: set[int]) -> bool:
    if not within:
        return True
    start = next(iter(within))
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in adj[x]:
            if y in within and y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(within)


# -- connected vertex cover ---------------------------------------------


def exact_cvc(g: MultiGraph, k: int, budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum connected vertex cover size capped at k+1, with a witness.

    Returns ``(inf, None)`` when the edges span several components, since
    then no connected vertex cover exists.
    """
    if len(g.adj) > budget.cvc_vertices:
        raise OracleRefusal(f"cvc oracle limited to {budget.cvc_vertices} vertices")
    adj = _adjacency(g)
    edges = [(u, v) for u in adj for v in adj[u] if u < v]
    if not edges:
        return 0, frozenset()
    touched = sorted({x for e in edges for x in e})
    if not _connected(adj, set(touched)):
        return INF, None
    for size in range(1, k + 1):
        for cand in combinations(touched, size):
            s = set(cand)
            if all(u in s or v in s for u, v in edges) and _connected(adj, s):
                return size, frozenset(s)
    return k + 1, frozenset(touched)


def enumerate_cvcs(g: MultiGraph, limit: int = 20) -> Iterator[frozenset[int]]:
    """Every connected vertex cover of ``g`` (all subsets checked)."""
    verts = sorted(g.adj)
    if len(verts) > limit:
        raise OracleRefusal(f"cvc enumeration limited to {limit} vertices")
    pos = {v: i for i, v in enumerate(verts)}
    nbr = [0] * len(verts)
    edge_masks = []
    for u in verts:
        for v in g.adj[u]:
            nbr[pos[u]] |= 1 << pos[v]
            if u < v:
                edge_masks.append((1 << pos[u]) | (1 << pos[v]))
    for mask in range(1 << len(verts)):
        if any(not (mask & e) for e in edge_masks):
            continue
        if mask:
            low = mask & -mask
            reach = low
            frontier = low
            while frontier:
                step = 0
                f = frontier
                while f:
                    b = f & -f
                    step |= nbr[b.bit_length() - 1]
                    f ^= b
                frontier = step & mask & ~reach
                reach |= frontier
            if reach != mask:
                continue
        yield frozenset(verts[i] for i in range(len(verts)) if mask >> i & 1)


# -- cycle packing --------------------------------------------------------


def exact_cp(g: MultiGraph, k: int, budget: OracleBudget = DEFAULT_BUDGET):
    """Maximum number of vertex-disjoint cycles, capped at k+1.

    Branches on the lowest remaining vertex: either it is unused, or it lies
    on one of the chordless cycles through it.  Restricting to chordless
    cycles (and digons) is safe because every cycle contains one on a subset
    of its vertices.
    """
    verts = sorted(g.adj)
    n = len(verts)
    if n > budget.cp_vertices:
        raise OracleRefusal(f"cycle packing oracle limited to {budget.cp_vertices} vertices")
    pos = {v: i for i, v in enumerate(verts)}
    mult = [[0] * n for _ in range(n)]
    for u in verts:
        for v, m in g.adj[u].items():
            mult[pos[u]][pos[v]] = m
    nbrs = [[j for j in range(n) if mult[i][j]] for i in range(n)]
    cap = k + 1

    def prune(mask: int) -> int:
        changed = True
        while changed:
            changed = False
            for i in range(n):
                if mask >> i & 1:
                    deg = sum(mult[i][j] for j in nbrs[i] if mask >> j & 1)
                    if deg <= 1:
                        mask &= ~(1 << i)
                        changed = True
        return mask

    def cycles_through(v: int, mask: int) -> Iterator[tuple[int, ...]]:
        for u in nbrs[v]:
            if mask >> u & 1 and mult[v][u] >= 2:
                yield (v, u)
        yield from _extend_paths([v], v, mask, nbrs, mult)

    @lru_cache(maxsize=None)
    def solve(mask: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
        mask = prune(mask)
        if not mask:
            return 0, ()
        v = (mask & -mask).bit_length() - 1
        best = solve(mask & ~(1 << v))
        if best[0] >= cap:
            return best
        for cyc in cycles_through(v, mask):
            rest = mask
            for x in cyc:
                rest &= ~(1 << x)
            sub = solve(rest)
            if sub[0] + 1 > best[0]:
                best = (sub[0] + 1, (cyc,) + sub[1])
                if best[0] >= cap:
                    break
        return best

    value, cycles = solve((1 << n) - 1)
    solve.cache_clear()
    witness = [tuple(verts[i] for i in cyc) for cyc in cycles]
    return min(value, cap), witness[:cap]


def _extend_paths(path, start, mask, nbrs, mult):
    """Chordless cycles through ``start`` extending ``path`` (length >= 3)."""
    last = path[-1]
    for y in nbrs[last]:
        if not (mask >> y & 1) or y in path or mult[last][y] != 1:
            continue
        if len(path) == 1:
            path.append(y)
            yield from _extend_paths(path, start, mask, nbrs, mult)
            path.pop()
            continue
        if any(mult[y][p] for p in path[1:-1]):
            continue
        if mult[y][start]:
            if mult[y][start] == 1:
                yield tuple(path + [y])
            continue
        path.append(y)
        yield from _extend_paths(path, start, mask, nbrs, mult)
        path.pop()


# -- disjoint factors -----------------------------------------------------


def exact_df(text: str, budget: OracleBudget = DEFAULT_BUDGET):
    """Maximum number of disjoint factors with distinct letters.

    Dynamic program over (position, set of letters already used).  A factor
    starting at position i is only ever closed at the next occurrence of the
    same letter: any longer factor with that start could be shortened
    without hurting the rest of the solution.
    """
    letters = sorted(set(text))
    if len(letters) > budget.df_alphabet:
        raise OracleRefusal(f"factor oracle limited to {budget.df_alphabet} letters")
    bit = {c: 1 << i for i, c in enumerate(letters)}
    n = len(text)
    nxt = [None] * n
    last: dict[str, int] = {}
    for i in range(n - 1, -1, -1):
        nxt[i] = last.get(text[i])
        last[text[i]] = i

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i >= n - 1:
            return 0
        out = best(i + 1, used)
        j = nxt[i]
        if j is not None and not used & bit[text[i]]:
            out = max(out, 1 + best(j + 1, used | bit[text[i]]))
        return out

    value = best(0, 0)
    factors = []
    i, used = 0, 0
    while i < n - 1 and best(i, used) > 0:
        j = nxt[i]
        if j is not None and not used & bit[text[i]] and best(i, used) == 1 + best(j + 1, used | bit[text[i]]):
            factors.append((i + 1, j + 1))
            used |= bit[text[i]]
            i = j + 1
        else:
            i += 1
    best.cache_clear()
    return value, factors


# -- partial vertex cover -------------------------------------------------


def exact_pvc(g: MultiGraph, k: int, budget: OracleBudget = DEFAULT_BUDGET):
    """Most edges incident on a set of at most k vertices."""
    verts = sorted(g.adj)
    size = min(k, len(verts))
    if math.comb(len(verts), size) > budget.pvc_subsets:
        raise OracleRefusal("too many candidate sets for the partial cover oracle")
    edges = [(u, v, m) for u in verts for v, m in g.adj[u].items() if u < v]
    best, witness = -1, frozenset()
    for cand in combinations(verts, size):
        s = set(cand)
        covered = sum(m for u, v, m in edges if u in s or v in s)
        if covered > best:
            best, witness = covered, frozenset(s)
    return best, witness


# -- optimal linear arrangement ---------------------------------------------


def exact_ola(g: MultiGraph, budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum linear arrangement value with an optimal layout.

    Uses the cut form of the objective: for a layout, the value equals the
    sum over the n-1 prefix cuts of the number of edges crossing the cut, so
    the optimum is a shortest chain of subsets from the empty set to V.
    The layout is returned as a list of vertices in position order.
    """
    verts = sorted(g.adj)
    n = len(verts)
    if n > budget.ola_vertices:
        raise OracleRefusal(f"arrangement oracle limited to {budget.ola_vertices} vertices")
    if n == 0:
        return 0, []
    pos = {v: i for i, v in enumerate(verts)}
    wt = [[0] * n for _ in range(n)]
    for u in verts:
        for v, m in g.adj[u].items():
            wt[pos[u]][pos[v]] = m
    deg = [sum(row) for row in wt]
    simple = all(m <= 1 for row in wt for m in row)
    nbr_mask = [sum(1 << j for j in range(n) if wt[i][j]) for i in range(n)]
    full = (1 << n) - 1
    cut = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << low)
        if simple:
            inner = bin(nbr_mask[low] & rest).count("1")
        else:
            inner = sum(wt[low][j] for j in range(n) if rest >> j & 1)
        cut[mask] = cut[rest] + deg[low] - 2 * inner
    bits = [1 << i for i in range(n)]
    best = [0] * (1 << n)
    choice = [-1] * (1 << n)
    for mask in range(1, 1 << n):
        # cheapest way to place the vertex set `mask` in the first |mask| slots
        here = cut[mask] if mask != full else 0
        val, arg = math.inf, -1
        for i in range(n):
            if mask & bits[i]:
                c = best[mask ^ bits[i]]
                if c < val:
                    val, arg = c, i
        best[mask], choice[mask] = val + here, arg
    order = []
    mask = full
    while mask:
        i = choice[mask]
        order.append(verts[i])
        mask &= ~(1 << i)
    order.reverse()
    return int(best[full]), order


# -- Steiner tree -----------------------------------------------------------


def exact_steiner(g: MultiGraph, terminals, budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum Steiner tree by enumerating which non-terminals to use.

    For each candidate vertex set containing all terminals, a minimum
    spanning tree of the induced subgraph (if connected) is a candidate.
    Returns ``(cost, edge list)``.
    """
    terms = set(terminals)
    if not terms:
        raise ValueError("terminal set must be nonempty")
    free = sorted(set(g.adj) - terms)
    if len(free) > budget.steiner_free_vertices:
        raise OracleRefusal("too many non-terminals for the Steiner oracle")

    def weight(u: int, v: int) -> int:
        return 1 if g.weights is None else g.weights[(min(u, v), max(u, v))]

    edges = sorted((weight(u, v), u, v) for u in g.adj for v in g.adj[u] if u < v)
    best: tuple[float, list] = (math.inf, [])
    for r in range(len(free) + 1):
        for extra in combinations(free, r):
            chosen = terms | set(extra)
            parent = {v: v for v in chosen}

            def find(x: int) -> int:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            total, used = 0, []
            for w, u, v in edges:
                if u in chosen and v in chosen:
                    ru, rv = find(u), find(v)
                    if ru != rv:
                        parent[ru] = rv
                        total += w
                        used.append((u, v))
            if len(used) == len(chosen) - 1 and total < best[0]:
                best = (total, used)
    if best[0] == math.inf:
        raise ValueError("terminals are not connected")
    return best


def __getattr__(name: str):
    # the subset dynamic program lives with the Steiner kernel
    if name == "dreyfus_wagner":
        from .steiner import dreyfus_wagner

        return dreyfus_wagner
    raise AttributeError(name)
