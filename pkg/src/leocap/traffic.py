"""Traffic demand generation and shortest-distance-path (SDP) routing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .constellation import R_EARTH_KM, ConstellationSpec, positions
from .graph import CapacityGraph, Node
from .throughput import ELASTIC, TrafficSession


class TrafficModel(str, Enum):
    POPULATION = "POPULATION"
    RANDOM = "RANDOM"


class UnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class PopulationCell:
    lat_deg: float
    lon_deg: float
    weight: float


class PopulationGrid:
    """Weighted ground cells; weights are normalized to sum to one."""

    def __init__(self, cells: Iterable[PopulationCell]) -> None:
        cells = list(cells)
        if not cells:
            raise ValueError("population grid is empty")
        w = np.array([c.weight for c in cells], dtype=float)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("population weights must be finite and non-negative")
        total = w.sum()
        if total <= 0:
            raise ValueError("degenerate population grid: all weights are zero")
        self.cells = [PopulationCell(c.lat_deg, c.lon_deg, float(x)) for c, x in zip(cells, w / total)]

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.cells])

    @classmethod
    def from_csv(cls, source: str | Path | TextIO) -> PopulationGrid:
        if isinstance(source, (str, Path)):
            with open(source, newline="") as fh:
                return cls.from_csv(fh)
        reader = csv.DictReader(source)
        missing = {"lat_deg", "lon_deg", "weight"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"population grid CSV lacks columns {sorted(missing)}")
        return cls(
            PopulationCell(float(r["lat_deg"]), float(r["lon_deg"]), float(r["weight"])) for r in reader
        )

    def to_csv(self, dest: str | Path | TextIO) -> None:
        if isinstance(dest, (str, Path)):
            with open(dest, "w", newline="") as fh:
                self.to_csv(fh)
                return
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(["lat_deg", "lon_deg", "weight"])
        for c in self.cells:
            w.writerow([repr(c.lat_deg), repr(c.lon_deg), repr(c.weight)])

    @classmethod
    def synthetic(cls, step_deg: float = 15.0) -> PopulationGrid:
        """Coarse stand-in for a world population raster.

        Each cell sums Gaussian kernels (8 deg wide, cut off at 20 deg) placed
        on major population regions, weighted by rough population in units of
        1e8. Open ocean and polar cells get zero weight. The default step gives
        12 x 24 = 288 cells.
        """
        cells = []
        for lat in np.arange(-90 + step_deg / 2, 90, step_deg):
            for lon in np.arange(-180 + step_deg / 2, 180, step_deg):
                w = 0.0
                for clat, clon, pop in _POPULATION_CENTRES:
                    ang = _angular_distance_deg(lat, lon, clat, clon)
                    if ang <= 20.0:
                        w += pop * math.exp(-0.5 * (ang / 8.0) ** 2)
                cells.append(PopulationCell(float(lat), float(lon), w))
        return cls(cells)


# (lat, lon, population / 1e8), rounded
_POPULATION_CENTRES = (
    (32, 115, 7.0), (38, 115, 3.0), (26, 80, 6.0), (15, 78, 3.5), (24, 90, 1.7),
    (30, 70, 2.3), (36, 138, 1.25), (37, 127, 0.75), (-7, 110, 2.7), (13, 122, 1.1),
    (15, 102, 1.7), (49, 8, 3.5), (54, 35, 2.0), (35, 45, 2.5), (28, 31, 1.0),
    (9, 5, 3.5), (2, 36, 3.0), (-15, 28, 1.5), (38, -82, 1.8), (36, -118, 0.8),
    (35, -97, 0.7), (20, -100, 1.3), (5, -74, 1.0), (-20, -45, 1.5), (-34, -60, 0.5),
    (-32, 150, 0.25),
)


def _angular_distance_deg(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dl = math.radians(lon1 - lon2)
    c = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(dl)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def ground_point_ecef(lat_deg: float, lon_deg: float) -> np.ndarray:
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    return R_EARTH_KM * np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def map_cell_to_satellite(cell: PopulationCell | tuple[float, float], sat_positions: np.ndarray) -> int:
    """Index of the satellite with the smallest slant range to the cell centre (lowest id on ties)."""
    lat, lon = (cell.lat_deg, cell.lon_deg) if isinstance(cell, PopulationCell) else cell
    d = np.linalg.norm(sat_positions - ground_point_ecef(lat, lon), axis=1)
    return int(np.argmin(d))


def map_cells(grid: PopulationGrid, sat_positions: np.ndarray) -> np.ndarray:
    return np.array([map_cell_to_satellite(c, sat_positions) for c in grid.cells], dtype=int)


@dataclass
class DemandMatrix:
    """Aggregated demands keyed by (source, sink), in order of first draw."""

    demands: dict[tuple[int, int], float]
    seed: int
    generator: TrafficModel
    loads: list[tuple[int, int]] = field(default_factory=list)
    load_demand_gbps: float = ELASTIC

    def __len__(self) -> int:
        return len(self.demands)

    def pairs(self) -> list[tuple[int, int]]:
        return list(self.demands)

    def prefix(self, n_loads: int) -> DemandMatrix:
        """Matrix built from only the first ``n_loads`` draws."""
        return DemandMatrix(
            _aggregate(self.loads[:n_loads], self.load_demand_gbps),
            self.seed,
            self.generator,
            self.loads[:n_loads],
            self.load_demand_gbps,
        )

    def to_csv(self, dest: str | Path | TextIO) -> None:
        if isinstance(dest, (str, Path)):
            with open(dest, "w", newline="") as fh:
                self.to_csv(fh)
                return
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(["src", "dst", "demand_gbps"])
        for (s, t), d in self.demands.items():
            w.writerow([s, t, format_demand(d)])


def format_demand(d: float) -> str:
    return "ELASTIC" if math.isinf(d) else repr(float(d))


def parse_demand(token: str) -> float:
    if token.upper() == "ELASTIC":
        return ELASTIC
    return float(token)


def _aggregate(loads: Sequence[tuple[int, int]], per_load: float) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for pair in loads:
        out[pair] = out.get(pair, 0.0) + per_load
    return out


def _draw_pairs(n: int, draw_endpoint, max_rounds: int = 10_000) -> list[tuple[int, int]]:
    """Draw sources, then sinks; only sinks that coincide with their source are redrawn."""
    src = draw_endpoint(n)
    dst = draw_endpoint(n)
    for _ in range(max_rounds):
        bad = np.flatnonzero(src == dst)
        if bad.size == 0:
            break
        dst[bad] = draw_endpoint(bad.size)
    else:
        raise RuntimeError("could not draw distinct endpoint pairs")
    return list(zip(src.tolist(), dst.tolist()))


def generate_demands(
    spec: ConstellationSpec,
    t: float,
    n_loads: int,
    seed: int,
    model: TrafficModel | str = TrafficModel.POPULATION,
    grid: PopulationGrid | None = None,
    demand_gbps: float = ELASTIC,
) -> DemandMatrix:
    """Draw ``n_loads`` end-to-end loads between satellites at ``t`` seconds.

    POPULATION draws source and sink cells by weight and maps each to its
    nearest satellite; RANDOM draws satellites uniformly. A sink landing on
    its own source is redrawn, so the source marginal follows the weights
    exactly. Repeated pairs are merged by summing.
    """
    if n_loads < 1:
        raise ValueError("n_loads must be at least 1")
    model = TrafficModel(model)
    rng = np.random.default_rng(np.random.SeedSequence([seed, int(round(t))]))
    if model is TrafficModel.RANDOM:
        n = spec.n_sats
        if n < 2:
            raise ValueError("need at least two satellites")
        loads = _draw_pairs(n_loads, lambda k: rng.integers(0, n, size=k))
    else:
        grid = grid if grid is not None else PopulationGrid.synthetic()
        cell_sat = map_cells(grid, positions(spec, t))
        w = grid.weights
        if len(np.unique(cell_sat[w > 0])) < 2:
            raise ValueError("degenerate grid: all weighted cells map to one satellite")
        loads = _draw_pairs(n_loads, lambda k: cell_sat[rng.choice(len(w), size=k, p=w)])
    return DemandMatrix(_aggregate(loads, demand_gbps), seed, model, loads, demand_gbps)


def node_sort_key(n: Node) -> tuple:
    """Integers by value first, then anything else by its string form."""
    return (0, n, "") if isinstance(n, int) else (1, 0, str(n))


class Router:
    """Shortest-distance paths over a fixed graph.

    Ties between equal-length paths go to the lexicographically smallest node
    sequence. Graphs with any zero-length arc are routed by hop count instead.
    """

    def __init__(self, g: CapacityGraph) -> None:
        self.graph = g
        self.nodes = g.nodes
        self.index = {n: i for i, n in enumerate(self.nodes)}
        arcs = list(g.arcs())
        by_hops = any(a.length_km <= 0 for a in arcs)
        self._weight = {(a.src, a.dst): (1.0 if by_hops else a.length_km) for a in arcs}
        n = len(self.nodes)
        rows = [self.index[a.dst] for a in arcs]
        cols = [self.index[a.src] for a in arcs]
        vals = [self._weight[(a.src, a.dst)] for a in arcs]
        # reversed arcs, so a search from the sink gives distance-to-sink
        self._reverse = csr_matrix((vals, (rows, cols)), shape=(n, n))
        self._succ = {u: sorted(g.successors(u), key=node_sort_key) for u in self.nodes}
        self._cache: dict[Node, np.ndarray] = {}

    def distances_to(self, dst: Node) -> np.ndarray:
        d = self._cache.get(dst)
        if d is None:
            d = dijkstra(self._reverse, directed=True, indices=self.index[dst])
            self._cache[dst] = d
        return d

    def prepare(self, sinks: Iterable[Node]) -> None:
        todo = sorted({s for s in sinks if s not in self._cache}, key=self.index.__getitem__)
        if not todo:
            return
        rows = dijkstra(self._reverse, directed=True, indices=[self.index[s] for s in todo])
        for s, row in zip(todo, rows):
            self._cache[s] = row

    def path(self, src: Node, dst: Node) -> tuple[Node, ...]:
        if src == dst:
            raise ValueError("source and sink must differ")
        if src not in self.index or dst not in self.index:
            raise KeyError("endpoint not in graph")
        dist = self.distances_to(dst)
        idx = self.index
        if not math.isfinite(dist[idx[src]]):
            raise UnreachableError(f"{dst!r} is unreachable from {src!r}")
        tol = 1e-9 * max(1.0, float(dist[idx[src]]))
        path = [src]
        u = src
        while u != dst:
            du = dist[idx[u]]
            for v in self._succ[u]:
                if abs(self._weight[(u, v)] + dist[idx[v]] - du) <= tol and dist[idx[v]] < du:
                    path.append(v)
                    u = v
                    break
            else:  # pragma: no cover - distances are consistent by construction
                raise RuntimeError(f"lost the shortest path at {u!r}")
        return tuple(path)

    def path_length(self, path: Sequence[Node]) -> float:
        return sum(self._weight[(u, v)] for u, v in zip(path, path[1:]))


def shortest_distance_path(g: CapacityGraph, src: Node, dst: Node) -> tuple[Node, ...]:
    return Router(g).path(src, dst)


def route_demands(
    g: CapacityGraph, demands: DemandMatrix | dict[tuple[int, int], float]
) -> tuple[list[TrafficSession], list[tuple[int, int]]]:
    """Route every demand pair by SDP. Returns sessions plus the unreachable pairs that were skipped."""
    items = demands.demands if isinstance(demands, DemandMatrix) else demands
    router = Router(g)
    router.prepare(dst for (_, dst) in items)
    sessions, skipped = [], []
    for (src, dst), d in items.items():
        try:
            sessions.append(TrafficSession(router.path(src, dst), d))
        except UnreachableError:
            skipped.append((src, dst))
    return sessions, skipped


def write_sessions(sessions: Iterable[TrafficSession], dest: str | Path | TextIO) -> None:
    """``src dst demand|ELASTIC hop1,hop2,...`` per line."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w") as fh:
            write_sessions(sessions, fh)
            return
    for s in sessions:
        hops = ",".join(str(n) for n in s.path)
        dest.write(f"{s.source} {s.sink} {format_demand(s.demand)} {hops}\n")


def read_sessions(source: str | Path | TextIO) -> list[TrafficSession]:
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return read_sessions(fh)
    out = []
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        src, dst, demand, hops = parts
        path = tuple(_node(h) for h in hops.split(","))
        if path[0] != _node(src) or path[-1] != _node(dst):
            raise ValueError(f"line {lineno}: hop list must run from {src} to {dst}")
        out.append(TrafficSession(path, parse_demand(demand)))
    return out


def _node(token: str) -> Node:
    try:
        return int(token)
    except ValueError:
        return token
