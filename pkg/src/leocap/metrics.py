"""Capacity and utilization figures over a capacity graph."""

from __future__ import annotations

from typing import Callable, Mapping

from .graph import CapacityGraph, Node


def network_capacity(g: CapacityGraph) -> float:
    """Sum of link capacities, each undirected link counted once."""
    return sum(g.capacity(u, v) for u, v in g.edges())


def node_bounded_capacity(
    g: CapacityGraph,
    node_capacity: Callable[[Node], float] | Mapping[Node, float],
    gsl_capacity: Callable[[Node], float] | Mapping[Node, float],
) -> float:
    """Per-satellite bound: sum over nodes of min(processing, adjacent ISL total, GSL).

    Each link contributes to both of its endpoints' ISL totals, so with
    unconstrained processing and GSL capacity this equals the total
    directed-arc capacity, i.e. twice :func:`network_capacity`.
    """
    node_cap = node_capacity if callable(node_capacity) else node_capacity.__getitem__
    gsl_cap = gsl_capacity if callable(gsl_capacity) else gsl_capacity.__getitem__
    total = 0.0
    for s in g.nodes:
        isl = sum(g.capacity(s, v) for v in g.successors(s))
        total += min(node_cap(s), isl, gsl_cap(s))
    return total


def utilization(throughput: float, capacity: float) -> float:
    if capacity <= 0:
        return 0.0
    return throughput / capacity
