"""Aggregate throughput of known traffic sessions by constrained path expansion (CPE).

Max-flow over super terminals lets flow wander off the actual traffic paths
and, when a satellite is both a source and a sink, short-circuit through it.
CPE instead walks the sessions in order, gives each one its own head and
tail expansion node hanging off the super source / super sink, and lets it
take only what is left along its own route.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .flow import SUPER_SINK, SUPER_SOURCE, FlowResult, attach_super_terminals, dinic_max_flow
from .graph import INF, CapacityGraph, Node
from .metrics import network_capacity as _network_capacity

ELASTIC = math.inf


class Method(str, Enum):
    CPE = "CPE"
    SUPER_DINIC = "SUPER_DINIC"
    SUPER_DINIC_SP = "SUPER_DINIC_SP"


@dataclass(frozen=True)
class TrafficSession:
    path: tuple[Node, ...]
    demand: float = ELASTIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", tuple(self.path))
        if len(self.path) < 2:
            raise ValueError("a session path needs at least two satellites")
        if len(set(self.path)) != len(self.path):
            raise ValueError(f"session path repeats a node: {self.path}")
        if not self.demand > 0:
            raise ValueError(f"demand must be positive or ELASTIC, got {self.demand}")

    @property
    def source(self) -> Node:
        return self.path[0]

    @property
    def sink(self) -> Node:
        return self.path[-1]

    @property
    def elastic(self) -> bool:
        return math.isinf(self.demand)

    def hops(self) -> list[tuple[Node, Node]]:
        return list(zip(self.path, self.path[1:]))

    def validate(self, g: CapacityGraph) -> None:
        for u, v in self.hops():
            if not g.has_arc(u, v):
                raise ValueError(f"session hop {u!r} -> {v!r} is not a link in the graph")


@dataclass
class GslBudget:
    """Ground-link budget: how many expansion nodes each satellite may serve and how it splits its GSL capacity."""

    capacity_gbps: float = 100.0
    n_max: int = 10
    per_satellite: dict[Node, float] = field(default_factory=dict)
    counts: dict[Node, int] = field(default_factory=dict)

    def total(self, sat: Node) -> float:
        return self.per_satellite.get(sat, self.capacity_gbps)

    def count(self, sat: Node) -> int:
        return self.counts.get(sat, 0)

    def can_attach(self, sat: Node) -> bool:
        return self.count(sat) < self.n_max

    def attach(self, sat: Node) -> None:
        if not self.can_attach(sat):
            raise ValueError(f"satellite {sat!r} already serves {self.n_max} expansion nodes")
        self.counts[sat] = self.count(sat) + 1

    def share(self, sat: Node) -> float:
        n = self.count(sat)
        return self.total(sat) / n if n else 0.0


@dataclass
class TrafficGraph:
    """State of a CPE run: allocations on ISL arcs plus the head/tail expansions."""

    budget: GslBudget
    flow: dict[tuple[Node, Node], float] = field(default_factory=dict)
    residual: dict[tuple[Node, Node], float] = field(default_factory=dict)
    heads: dict[int, Node] = field(default_factory=dict)
    tails: dict[int, Node] = field(default_factory=dict)
    source_terminals: set[Node] = field(default_factory=set)
    sink_terminals: set[Node] = field(default_factory=set)
    allocations: list[float] = field(default_factory=list)

    @staticmethod
    def head_node(i: int) -> tuple[str, int]:
        return ("head", i)

    @staticmethod
    def tail_node(i: int) -> tuple[str, int]:
        return ("tail", i)

    def arc_flows(self) -> dict[tuple[Node, Node], float]:
        """Flow on every arc of the traffic graph, expansion and super arcs included."""
        out = {k: v for k, v in self.flow.items() if v > 0}
        for i, sat in self.heads.items():
            a = self.allocations[i]
            if a > 0:
                h = self.head_node(i)
                out[(SUPER_SOURCE, h)] = a
                out[(h, sat)] = a
        for i, sat in self.tails.items():
            a = self.allocations[i]
            if a > 0:
                t = self.tail_node(i)
                out[(sat, t)] = a
                out[(t, SUPER_SINK)] = a
        return out

    def to_capacity_graph(self) -> CapacityGraph:
        """The traffic graph with allocated ISL capacities and even GSL shares."""
        g = CapacityGraph()
        for i, sat in self.heads.items():
            h = self.head_node(i)
            g.add_arc(SUPER_SOURCE, h, INF)
            g.add_arc(h, sat, self.budget.share(sat))
        for (u, v), f in self.flow.items():
            g.add_arc(u, v, f)
        for i, sat in self.tails.items():
            t = self.tail_node(i)
            g.add_arc(sat, t, self.budget.share(sat))
            g.add_arc(t, SUPER_SINK, INF)
        return g


@dataclass
class ThroughputReport:
    method: Method
    aggregate_throughput: float
    path_capacities: list[float]
    network_capacity: float
    allocations: list[float] | None = None
    n_blocked: int = 0
    traffic_graph: TrafficGraph | None = None
    flow_result: FlowResult | None = None

    @property
    def n_sessions(self) -> int:
        return len(self.path_capacities)

    @property
    def mean_path_capacity(self) -> float:
        return sum(self.path_capacities) / len(self.path_capacities) if self.path_capacities else 0.0

    @property
    def mean_path_utilization(self) -> float:
        return mean_path_utilization(self)

    @property
    def network_utilization(self) -> float:
        if self.network_capacity <= 0:
            return 0.0
        return self.aggregate_throughput / self.network_capacity


def path_capacity(session: TrafficSession, g: CapacityGraph) -> float:
    """Bottleneck link capacity along the session path."""
    return min(g.capacity(u, v) for u, v in session.hops())


def mean_path_utilization(report: ThroughputReport) -> float:
    """Aggregate throughput over (session count x mean path capacity)."""
    if report.n_sessions == 0:
        raise ValueError("mean path utilization is undefined for an empty session set")
    denom = sum(report.path_capacities)
    if denom <= 0:
        return 0.0
    return report.aggregate_throughput / denom


def cpe_throughput(
    sessions: Sequence[TrafficSession],
    g: CapacityGraph,
    budget: GslBudget | None = None,
    network_capacity: float | None = None,
) -> ThroughputReport:
    """Allocate residual path capacity to each session in order.

    A session gets a head expansion on its first satellite unless that
    satellite is out of GSL slots or already terminates an earlier session,
    and symmetrically a tail expansion on its last satellite. Only sessions
    with both expansions carry traffic; they take the minimum of the
    residual bottleneck along their own path, the GSL share at both ends and
    their demand. Earlier allocations are never revised.

    ``budget`` is copied, not mutated. ``network_capacity`` defaults to the
    link-capacity sum of ``g``.
    """
    budget = copy.deepcopy(budget) if budget is not None else GslBudget()
    if budget.n_max <= 0:
        raise ValueError("n_max must be at least 1: no session could attach")
    for s in sessions:
        s.validate(g)

    tg = TrafficGraph(budget=budget)
    caps: list[float] = []
    total = 0.0
    blocked = 0
    for i, sess in enumerate(sessions):
        head, tail = sess.source, sess.sink
        if budget.can_attach(head) and head not in tg.sink_terminals:
            budget.attach(head)
            tg.heads[i] = head
            tg.source_terminals.add(head)
        if budget.can_attach(tail) and tail not in tg.source_terminals:
            budget.attach(tail)
            tg.tails[i] = tail
            tg.sink_terminals.add(tail)

        hops = sess.hops()
        caps.append(min(g.capacity(u, v) for u, v in hops))
        if i in tg.heads and i in tg.tails:
            bottleneck = min(tg.residual.get(h, g.capacity(*h)) for h in hops)
            alloc = min(bottleneck, budget.share(head), budget.share(tail), sess.demand)
            alloc = max(alloc, 0.0)
        else:
            alloc = 0.0
        if alloc > 0:
            for h in hops:
                tg.residual[h] = tg.residual.get(h, g.capacity(*h)) - alloc
                tg.flow[h] = tg.flow.get(h, 0.0) + alloc
        else:
            blocked += 1
        tg.allocations.append(alloc)
        total += alloc

    cap = _network_capacity(g) if network_capacity is None else network_capacity
    return ThroughputReport(
        method=Method.CPE,
        aggregate_throughput=total,
        path_capacities=caps,
        network_capacity=cap,
        allocations=list(tg.allocations),
        n_blocked=blocked,
        traffic_graph=tg,
    )


def traffic_load_graph(sessions: Sequence[TrafficSession], g: CapacityGraph) -> CapacityGraph:
    """Subgraph of ``g`` made of the arcs the sessions traverse, in their direction of travel."""
    out = CapacityGraph()
    for s in sessions:
        for u, v in s.hops():
            if not out.has_arc(u, v):
                a = g.arc(u, v)
                out.add_arc(u, v, a.capacity, a.length_km)
    return out


def baseline_throughput(
    sessions: Sequence[TrafficSession],
    g: CapacityGraph,
    method: Method | str,
    network_capacity: float | None = None,
) -> ThroughputReport:
    """Multi-source multi-sink max-flow between session endpoints.

    Flow is confined to the traffic-load graph (the arcs some session uses)
    but may mix segments of different sessions, so it can exceed what the
    sessions could carry along their own paths.
    """
    method = Method(method)
    if method is Method.CPE:
        raise ValueError("use cpe_throughput for the CPE method")
    if not sessions:
        raise ValueError("at least one session is required")
    for s in sessions:
        s.validate(g)
    sources = [s.source for s in sessions]
    sinks = [s.sink for s in sessions]
    gp = traffic_load_graph(sessions, g)
    gx, vs, vt = attach_super_terminals(gp, sources, sinks, method is Method.SUPER_DINIC_SP)
    fr = dinic_max_flow(gx, vs, vt)
    cap = _network_capacity(g) if network_capacity is None else network_capacity
    return ThroughputReport(
        method=method,
        aggregate_throughput=fr.value,
        path_capacities=[path_capacity(s, g) for s in sessions],
        network_capacity=cap,
        flow_result=fr,
    )


def compute_throughput(
    sessions: Sequence[TrafficSession],
    g: CapacityGraph,
    method: Method | str,
    budget: GslBudget | None = None,
    network_capacity: float | None = None,
) -> ThroughputReport:
    method = Method(method)
    if method is Method.CPE:
        return cpe_throughput(sessions, g, budget, network_capacity)
    return baseline_throughput(sessions, g, method, network_capacity)
