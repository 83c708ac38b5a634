"""Small graphs shared by unit and acceptance tests."""

from leocap.graph import CapacityGraph
from leocap.throughput import TrafficSession


def shared_edge_graph(c: float = 10.0) -> CapacityGraph:
    """Two 3-hop routes A-X-Y-B and B-X-Y-C through one link X-Y of capacity ``c``.

    B ends the first route and starts the second. Every other link has capacity 2c.
    """
    g = CapacityGraph()
    for u, v in [("A", "X"), ("Y", "B"), ("B", "X"), ("Y", "C")]:
        g.add_edge(u, v, 2 * c)
    g.add_edge("X", "Y", c)
    return g


def shared_edge_sessions() -> list[TrafficSession]:
    return [TrafficSession(("A", "X", "Y", "B")), TrafficSession(("B", "X", "Y", "C"))]


def diamond() -> CapacityGraph:
    g = CapacityGraph()
    for u, v, c in [("s", "a", 10), ("s", "b", 10), ("a", "t", 10), ("b", "t", 10), ("a", "b", 5)]:
        g.add_arc(u, v, c)
    return g
