"""Max-flow machinery: Dinic, super source/sink attachment, sequential multi-commodity allocation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import zip_longest
from typing import Hashable, Iterable, Sequence

from .graph import INF, CapacityGraph, Node

SUPER_SOURCE = "V_src"
SUPER_SINK = "V_tgt"

EPS = 1e-12


@dataclass
class FlowResult:
    value: float
    flows: dict[tuple[Node, Node], float] = field(default_factory=dict)
    # stand-in used for infinite capacities; value >= sentinel means the flow is unbounded
    sentinel: float = INF

    @property
    def unbounded(self) -> bool:
        return self.value >= self.sentinel

    def flow(self, u: Node, v: Node) -> float:
        return self.flows.get((u, v), 0.0)


def infinity_sentinel(g: CapacityGraph) -> float:
    """Finite stand-in for infinite capacity: strictly above every finite arc sum."""
    return g.total_finite_capacity() + 1.0


class _Residual:
    """Array-backed residual network; arc ``i ^ 1`` is the reverse of arc ``i``."""

    def __init__(self, g: CapacityGraph, sentinel: float) -> None:
        self.index = {n: i for i, n in enumerate(g.nodes)}
        self.adj: list[list[int]] = [[] for _ in self.index]
        self.to: list[int] = []
        self.cap: list[float] = []
        self.orig: list[float] = []
        self.keys: list[tuple[Node, Node]] = []
        for a in g.arcs():
            c = sentinel if math.isinf(a.capacity) else a.capacity
            u, v = self.index[a.src], self.index[a.dst]
            self.adj[u].append(len(self.to))
            self.to.append(v)
            self.cap.append(c)
            self.orig.append(c)
            self.keys.append((a.src, a.dst))
            self.adj[v].append(len(self.to))
            self.to.append(u)
            self.cap.append(0.0)
            self.orig.append(0.0)
            self.keys.append((a.dst, a.src))

    def levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * len(self.adj)
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.adj[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > EPS:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def blocking_flow(self, s: int, t: int, level: list[int]) -> float:
        adj, to, cap = self.adj, self.to, self.cap
        it = [0] * len(adj)
        total = 0.0
        while True:
            path: list[int] = []
            u = s
            while u != t:
                edges = adj[u]
                i = it[u]
                while i < len(edges):
                    e = edges[i]
                    v = to[e]
                    if cap[e] > EPS and level[v] == level[u] + 1:
                        break
                    i += 1
                it[u] = i
                if i < len(edges):
                    path.append(edges[i])
                    u = to[edges[i]]
                    continue
                if u == s:
                    return total
                # dead end: prune u and step back
                level[u] = -1
                e = path.pop()
                u = to[e ^ 1]
                it[u] += 1
            push = min(cap[e] for e in path)
            for e in path:
                cap[e] -= push
                cap[e ^ 1] += push
            total += push

    def arc_flows(self) -> dict[tuple[Node, Node], float]:
        out: dict[tuple[Node, Node], float] = {}
        for e in range(0, len(self.cap), 2):
            f = self.orig[e] - self.cap[e]
            if f > EPS:
                key = self.keys[e]
                out[key] = out.get(key, 0.0) + f
        return out


def dinic_max_flow(g: CapacityGraph, source: Node, sink: Node) -> FlowResult:
    """Exact maximum ``source``-``sink`` flow via level graphs and blocking flows.

    Infinite capacities are replaced by :func:`infinity_sentinel`. A source
    that cannot reach the sink yields a zero flow.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    for n in (source, sink):
        if n not in g:
            raise KeyError(f"node {n!r} not in graph")
    sentinel = infinity_sentinel(g)
    res = _Residual(g, sentinel)
    s, t = res.index[source], res.index[sink]
    value = 0.0
    while (level := res.levels(s, t)) is not None:
        pushed = res.blocking_flow(s, t, level)
        if pushed <= EPS:
            break
        value += pushed
    return FlowResult(value, res.arc_flows(), sentinel)


def attach_super_terminals(
    g: CapacityGraph,
    sources: Sequence[Node],
    sinks: Sequence[Node],
    prune_shortcuts: bool = False,
) -> tuple[CapacityGraph, str, str]:
    """Copy of ``g`` with a super source feeding ``sources`` and a super sink draining ``sinks``.

    Attachments happen in the order ``sources[0], sinks[0], sources[1], ...``,
    so session-aligned endpoint lists are attached in session order. With
    ``prune_shortcuts`` a node keeps only its first attachment, which stops
    flow from short-circuiting straight from the super source to the super sink.
    """
    if not sources or not sinks:
        raise ValueError("sources and sinks must be non-empty")
    for n in (SUPER_SOURCE, SUPER_SINK):
        if n in g:
            raise ValueError(f"graph already contains reserved node {n!r}")
    out = g.copy()
    roles: dict[Node, str] = {}
    for src, dst in zip_longest(sources, sinks):
        for node, role in ((src, "src"), (dst, "dst")):
            if node is None:
                continue
            if node not in g:
                raise KeyError(f"terminal {node!r} not in graph")
            first = roles.setdefault(node, role)
            if prune_shortcuts and first != role:
                continue
            if role == "src":
                out.add_arc(SUPER_SOURCE, node, INF)
            else:
                out.add_arc(node, SUPER_SINK, INF)
    return out, SUPER_SOURCE, SUPER_SINK


def sequential_multicommodity(
    g: CapacityGraph, commodities: Iterable[tuple[Node, Node, float]]
) -> list[FlowResult]:
    """Greedy decomposition: max-flow per commodity, in order, on what earlier ones left.

    Each commodity is capped at its demand by a single super-source arc. Flow
    committed by one commodity is never rerouted by a later one, so the total
    is an order-dependent lower bound on the multi-commodity optimum.
    """
    commodities = list(commodities)
    if not commodities:
        raise ValueError("at least one commodity is required")
    residual = {(a.src, a.dst): a.capacity for a in g.arcs()}
    results = []
    for src, dst, demand in commodities:
        if demand < 0:
            raise ValueError(f"negative demand {demand}")
        work = CapacityGraph()
        for n in g.nodes:
            work.add_node(n)
        for a in g.arcs():
            r = residual[(a.src, a.dst)]
            if r > EPS:
                work.add_arc(a.src, a.dst, r, a.length_km)
        work.add_arc(SUPER_SOURCE, src, demand)
        fr = dinic_max_flow(work, SUPER_SOURCE, dst)
        net: dict[tuple[Node, Node], float] = {}
        for (u, v), f in fr.flows.items():
            if u == SUPER_SOURCE:
                continue
            back = fr.flows.get((v, u), 0.0)
            if f - back > EPS:
                net[(u, v)] = f - back
        for key, f in net.items():
            residual[key] = max(residual[key] - f, 0.0)
        results.append(FlowResult(fr.value, net, fr.sentinel))
    return results


def check_flow(
    g: CapacityGraph, flows: dict[tuple[Node, Node], float], terminals: Iterable[Hashable], tol: float = 1e-9
) -> None:
    """Raise AssertionError if ``flows`` violates capacity or conservation on ``g``."""
    sentinel = infinity_sentinel(g)
    for (u, v), f in flows.items():
        cap = g.capacity(u, v)
        cap = sentinel if math.isinf(cap) else cap
        if f < -tol or f > cap + tol:
            raise AssertionError(f"arc ({u!r}, {v!r}) carries {f} outside [0, {cap}]")
    balance: dict[Node, float] = {}
    for (u, v), f in flows.items():
        balance[u] = balance.get(u, 0.0) - f
        balance[v] = balance.get(v, 0.0) + f
    skip = set(terminals)
    for n, b in balance.items():
        if n not in skip and abs(b) > tol:
            raise AssertionError(f"conservation violated at {n!r}: imbalance {b}")
