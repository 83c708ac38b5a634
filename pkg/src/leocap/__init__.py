"""Capacity and throughput quantification for LEO mega-constellation networks."""

from .constellation import PRESETS, ConstellationSpec, SatelliteNode, build_topology, get_preset, phase_offset, propagate
from .flow import FlowResult, attach_super_terminals, dinic_max_flow, sequential_multicommodity
from .graph import INF, CapacityGraph, read_edge_list, write_edge_list
from .metrics import network_capacity
from .reliability import (
    AvailabilityTimeline,
    IslReliabilityProcess,
    availability,
    expected_capacity,
    network_capacity_at,
    sample_timeline,
)
from .throughput import (
    ELASTIC,
    GslBudget,
    Method,
    ThroughputReport,
    TrafficSession,
    baseline_throughput,
    cpe_throughput,
    mean_path_utilization,
    path_capacity,
)
from .traffic import (
    DemandMatrix,
    PopulationGrid,
    TrafficModel,
    generate_demands,
    map_cell_to_satellite,
    route_demands,
    shortest_distance_path,
)

__version__ = "0.1.0"
