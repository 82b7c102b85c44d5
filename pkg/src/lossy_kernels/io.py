"""Text formats: extended DIMACS graphs, interval files, string files.

Graph files use 1-based ids; in memory vertices are 0-based.  Besides the
standard ``p edge n m`` header and ``e u v [w]`` edge lines we accept
``t v`` (terminal) and ``vc v`` (vertex cover member) lines.  Repeated edge
lines encode parallel edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .graph import MultiGraph


@dataclass
class GraphFile:
    graph: MultiGraph
    terminals: list[int] = field(default_factory=list)
    cover: list[int] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def parse_dimacs(text: str) -> GraphFile:
    n = None
    edges: list[tuple[int, ...]] = []
    terminals: list[int] = []
    cover: list[int] = []
    comments: list[str] = []
    weighted = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        try:
            if tag == "c":
                comments.append(raw[1:].strip())
            elif tag == "p":
                if len(parts) < 4 or parts[1] not in ("edge", "col"):
                    raise ValueError("expected 'p edge <n> <m>'")
                n = int(parts[2])
            elif tag == "e":
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
                if len(parts) > 3:
                    weighted = True
                    edges.append((u, v, int(parts[3])))
                else:
                    edges.append((u, v))
            elif tag == "t":
                terminals.append(int(parts[1]) - 1)
            elif tag == "vc":
                cover.append(int(parts[1]) - 1)
            else:
                raise ValueError(f"unknown line type {tag!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("missing 'p edge' header")
    if weighted:
        edges = [e if len(e) == 3 else (e[0], e[1], 1) for e in edges]
    g = MultiGraph.from_edges(range(n), edges, weighted=weighted)
    return GraphFile(g, terminals, cover, comments)


def format_dimacs(
    g: MultiGraph,
    terminals: Iterable[int] = (),
    cover: Iterable[int] = (),
    comments: Iterable[str] = (),
) -> tuple[str, list[int]]:
    """Serialize ``g`` with ids relabelled densely.

    Returns the text and the list mapping file id - 1 to the internal id.
    """
    order = sorted(g.vertices)
    index = {v: i + 1 for i, v in enumerate(order)}
    lines = [f"c {c}" for c in comments]
    lines.append(f"p edge {len(order)} {g.num_edges}")
    for (u, v), m in sorted(g.edge_multiset.items()):
        suffix = f" {g.weights[(u, v)]}" if g.weights is not None else ""
        lines.extend([f"e {index[u]} {index[v]}{suffix}"] * m)
    lines.extend(f"t {index[t]}" for t in sorted(terminals))
    lines.extend(f"vc {index[c]}" for c in sorted(cover))
    return "\n".join(lines) + "\n", order


def read_graph(path: str | Path) -> GraphFile:
    return parse_dimacs(Path(path).read_text())


def write_graph(path: str | Path, g: MultiGraph, **extra) -> list[int]:
    text, order = format_dimacs(g, **extra)
    Path(path).write_text(text)
    return order


def parse_intervals(text: str) -> list[tuple[int, int, int]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] != "i" or len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'i <left> <right> <label>'")
        left, right, label = map(int, parts[1:])
        out.append((left, right, label))
    return out


def format_intervals(intervals: Iterable[tuple[int, int, int]]) -> str:
    return "".join(f"i {l} {r} {lab}\n" for l, r, lab in intervals)


def read_strings(path: str | Path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def write_position_maps(path: str | Path, maps: Iterable[Iterable[int]]) -> None:
    Path(path).write_text("".join(json.dumps(list(m)) + "\n" for m in maps))


def read_position_maps(path: str | Path) -> list[list[int]]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def parse_vertex_list(text: str) -> list[int]:
    """Whitespace separated 1-based vertex ids, returned 0-based."""
    return [int(tok) - 1 for tok in text.split()]
