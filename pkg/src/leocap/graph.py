"""Directed capacity graphs and the plain-text edge-list format.

Undirected ISLs are stored as two directed arcs of equal capacity; each
direction is an independent full-duplex channel for flow purposes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Hashable, Iterable, Iterator, TextIO

Node = Hashable

INF = math.inf


@dataclass(frozen=True)
class Arc:
    src: Node
    dst: Node
    capacity: float
    length_km: float = 0.0


class CapacityGraph:
    """Weighted directed graph with per-arc capacity (Gbps) and length (km)."""

    def __init__(self) -> None:
        self._nodes: dict[Node, None] = {}
        self._arcs: dict[tuple[Node, Node], Arc] = {}
        self._succ: dict[Node, list[Node]] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node: object) -> bool:
        return node in self._nodes

    def __repr__(self) -> str:
        return f"CapacityGraph(nodes={len(self._nodes)}, arcs={len(self._arcs)})"

    @property
    def nodes(self) -> list[Node]:
        return list(self._nodes)

    @property
    def n_arcs(self) -> int:
        return len(self._arcs)

    def add_node(self, node: Node) -> None:
        if node not in self._nodes:
            self._nodes[node] = None
            self._succ[node] = []

    def add_arc(self, src: Node, dst: Node, capacity: float, length_km: float = 0.0) -> None:
        if src == dst:
            raise ValueError(f"self-loop on {src!r}")
        if not capacity >= 0:
            raise ValueError(f"capacity must be non-negative, got {capacity}")
        if length_km < 0:
            raise ValueError(f"length must be non-negative, got {length_km}")
        self.add_node(src)
        self.add_node(dst)
        if (src, dst) not in self._arcs:
            self._succ[src].append(dst)
        self._arcs[(src, dst)] = Arc(src, dst, float(capacity), float(length_km))

    def add_edge(self, u: Node, v: Node, capacity: float, length_km: float = 0.0) -> None:
        """Add an undirected link as a pair of equal-capacity arcs."""
        self.add_arc(u, v, capacity, length_km)
        self.add_arc(v, u, capacity, length_km)

    def has_arc(self, src: Node, dst: Node) -> bool:
        return (src, dst) in self._arcs

    def arc(self, src: Node, dst: Node) -> Arc:
        try:
            return self._arcs[(src, dst)]
        except KeyError:
            raise KeyError(f"no arc {src!r} -> {dst!r}") from None

    def capacity(self, src: Node, dst: Node) -> float:
        return self.arc(src, dst).capacity

    def length(self, src: Node, dst: Node) -> float:
        return self.arc(src, dst).length_km

    def successors(self, node: Node) -> list[Node]:
        return self._succ[node]

    def degree(self, node: Node) -> int:
        return len(self._succ[node])

    def arcs(self) -> Iterator[Arc]:
        return iter(self._arcs.values())

    def edges(self) -> list[tuple[Node, Node]]:
        """Unordered links, each once, in first-seen arc order.

        A pair of opposite arcs forms one link; a lone arc is a one-way link.
        """
        seen: set[frozenset] = set()
        out = []
        for (u, v) in self._arcs:
            key = frozenset((u, v))
            if key not in seen:
                seen.add(key)
                out.append((u, v))
        return out

    def total_finite_capacity(self) -> float:
        return sum(a.capacity for a in self._arcs.values() if math.isfinite(a.capacity))

    def copy(self) -> CapacityGraph:
        g = CapacityGraph()
        for n in self._nodes:
            g.add_node(n)
        for a in self._arcs.values():
            g.add_arc(a.src, a.dst, a.capacity, a.length_km)
        return g

    def without_edges(self, edges: Iterable[tuple[Node, Node]]) -> CapacityGraph:
        """Copy with both directions of every listed link removed. Nodes are kept."""
        drop = {frozenset(e) for e in edges}
        g = CapacityGraph()
        for n in self._nodes:
            g.add_node(n)
        for a in self._arcs.values():
            if frozenset((a.src, a.dst)) not in drop:
                g.add_arc(a.src, a.dst, a.capacity, a.length_km)
        return g

    def filter_edges(self, keep: Callable[[Node, Node], bool]) -> CapacityGraph:
        return self.without_edges(e for e in self.edges() if not keep(*e))


def _parse_node(token: str) -> Node:
    try:
        return int(token)
    except ValueError:
        return token


def _parse_capacity(token: str) -> float:
    if token.lower() in ("inf", "infinity"):
        return INF
    return float(token)


def read_edge_list(source: str | Path | TextIO) -> CapacityGraph:
    """Parse ``src dst capacity_gbps [length_km]`` lines; ``#`` starts a comment."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return read_edge_list(fh)
    g = CapacityGraph()
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ValueError(f"line {lineno}: expected 3 or 4 fields, got {len(parts)}")
        try:
            cap = _parse_capacity(parts[2])
            length = float(parts[3]) if len(parts) == 4 else 0.0
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        g.add_arc(_parse_node(parts[0]), _parse_node(parts[1]), cap, length)
    return g


def write_edge_list(g: CapacityGraph, dest: str | Path | TextIO, header: str | None = None) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w") as fh:
            write_edge_list(g, fh, header)
        return
    if header:
        for line in header.splitlines():
            dest.write(f"# {line}\n")
    for a in g.arcs():
        cap = "inf" if math.isinf(a.capacity) else repr(a.capacity)
        dest.write(f"{a.src} {a.dst} {cap} {a.length_km!r}\n")
