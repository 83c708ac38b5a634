"""Experiment drivers: capacity sweeps, load-throughput curves and method comparison.

Every driver returns rows as lists of already-formatted strings so that
CSV bytes depend only on the configuration.
"""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

from ..constellation import ConstellationSpec, build_topology
from ..graph import CapacityGraph
from ..metrics import network_capacity
from ..reliability import (
    available_graph,
    expected_capacity,
    network_capacity_at,
    sample_edge_timelines,
    time_averaged_capacity,
)
from ..throughput import GslBudget, Method, ThroughputReport, TrafficSession, compute_throughput
from ..traffic import DemandMatrix, PopulationGrid, Router, generate_demands
from .config import ScenarioConfig

log = logging.getLogger(__name__)

CAPACITY_COLUMNS = ["constellation", "lambda", "sigma_min", "t_min", "capacity_gbps", "expected_capacity_gbps"]
CAPACITY_SUMMARY_COLUMNS = [
    "constellation",
    "lambda",
    "sigma_min",
    "orbital_period_min",
    "n_isl",
    "simulated_capacity_gbps",
    "expected_capacity_gbps",
    "ratio",
]
REPORT_COLUMNS = [
    "scenario",
    "timestamp",
    "method",
    "n_sessions",
    "throughput_gbps",
    "mean_path_utilization",
    "network_utilization",
    "n_loads",
    "n_skipped",
    "lambda",
    "sigma_min",
    "capacity_gbps",
]
COMPARISON_COLUMNS = REPORT_COLUMNS + ["path_utilization_gt_1"]


class InfeasibleScenario(RuntimeError):
    pass


def fmt(x: float) -> str:
    return f"{x:.6f}"


@dataclass
class RunRecord:
    scenario: str
    timestamp_min: float
    lambda_per_period: float
    sigma_min: float
    capacity_gbps: float
    reports: dict[tuple[int, Method], ThroughputReport] = field(default_factory=dict)
    skipped: dict[int, int] = field(default_factory=dict)
    wall_clock_s: float = 0.0


def _run_jobs(fn: Callable, jobs: Sequence, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# -- capacity ---------------------------------------------------------------


def _capacity_job(args: tuple[ScenarioConfig, ConstellationSpec, float, float]):
    cfg, spec, lam, sigma = args
    g = build_topology(spec, 0.0, cfg.isl_capacity_gbps, cfg.cross_seam, cfg.classical_phasing)
    period = spec.orbital_period_min
    timelines = sample_edge_timelines(g, lam, sigma, period, cfg.seed, cfg.horizon_min)
    n_isl = len(g.edges())
    expected = expected_capacity(n_isl, cfg.isl_capacity_gbps, period, lam, sigma)
    series = [
        [spec.name, fmt(lam), fmt(sigma), fmt(t), fmt(network_capacity_at(g, timelines, t)), fmt(expected)]
        for t in cfg.timestamps_min()
    ]
    simulated = time_averaged_capacity(g, timelines)
    summary = [
        spec.name,
        fmt(lam),
        fmt(sigma),
        fmt(period),
        str(n_isl),
        fmt(simulated),
        fmt(expected),
        fmt(simulated / expected),
    ]
    return series, summary


def run_capacity_sweep(cfg: ScenarioConfig) -> tuple[list[list[str]], list[list[str]]]:
    """Instantaneous capacity per snapshot plus the time average against the closed form.

    Returns ``(timeseries_rows, summary_rows)``.
    """
    jobs = [(cfg, spec, lam, sigma) for spec in cfg.specs() for lam in cfg.lambdas for sigma in cfg.sigmas_min]
    results = _run_jobs(_capacity_job, jobs, cfg.workers)
    series = [row for s, _ in results for row in s]
    summary = [r for _, r in results]
    return series, summary


# -- throughput -------------------------------------------------------------


def _grid(cfg: ScenarioConfig) -> PopulationGrid | None:
    if cfg.population_grid is None:
        return None
    return PopulationGrid.from_csv(cfg.population_grid)


def prefix_sessions(
    demands: DemandMatrix, n_loads: int, routes: dict[tuple[int, int], tuple]
) -> tuple[list[TrafficSession], int]:
    """Sessions for the first ``n_loads`` draws; unroutable pairs are skipped and counted."""
    sessions, skipped = [], 0
    for pair, d in demands.prefix(n_loads).demands.items():
        path = routes.get(pair)
        if path is None:
            skipped += 1
        else:
            sessions.append(TrafficSession(path, d))
    return sessions, skipped


def snapshot_graph(
    cfg: ScenarioConfig, spec: ConstellationSpec, lam: float, t_min: float
) -> tuple[CapacityGraph, float]:
    """Availability-filtered topology at ``t_min`` and its instantaneous capacity."""
    g = build_topology(spec, t_min * 60.0, cfg.isl_capacity_gbps, cfg.cross_seam, cfg.classical_phasing)
    if lam == 0:
        return g, network_capacity(g)
    timelines = sample_edge_timelines(
        g, lam, cfg.throughput_sigma_min, spec.orbital_period_min, cfg.seed, cfg.horizon_min
    )
    return available_graph(g, timelines, t_min), network_capacity_at(g, timelines, t_min)


def route_all(g: CapacityGraph, demands: DemandMatrix) -> dict[tuple[int, int], tuple]:
    router = Router(g)
    router.prepare(dst for _, dst in demands.demands)
    routes = {}
    for src, dst in demands.demands:
        try:
            routes[(src, dst)] = router.path(src, dst)
        except ValueError:
            pass
    return routes


def _throughput_job(args: tuple[ScenarioConfig, ConstellationSpec, float, float, tuple[Method, ...]]) -> RunRecord:
    cfg, spec, lam, t_min, methods = args
    start = time.perf_counter()
    g, cap = snapshot_graph(cfg, spec, lam, t_min)
    demands = generate_demands(
        spec, t_min * 60.0, cfg.n_loads, cfg.seed, cfg.model(), _grid(cfg), cfg.demand_gbps
    )
    routes = route_all(g, demands)
    budget = GslBudget(cfg.gsl_capacity_gbps, cfg.n_gsl_max)
    rec = RunRecord(spec.name, t_min, lam, cfg.throughput_sigma_min, cap)
    for n in cfg.loads():
        sessions, skipped = prefix_sessions(demands, n, routes)
        rec.skipped[n] = skipped
        if not sessions:
            continue
        for m in methods:
            rec.reports[(n, m)] = compute_throughput(sessions, g, m, budget, cap)
    rec.wall_clock_s = time.perf_counter() - start
    log.info("%s lambda=%g t=%g min done in %.2fs", spec.name, lam, t_min, rec.wall_clock_s)
    return rec


def throughput_records(
    cfg: ScenarioConfig,
    specs: Sequence[ConstellationSpec] | None = None,
    lambdas: Sequence[float] | None = None,
    methods: Sequence[Method] | None = None,
) -> list[RunRecord]:
    specs = cfg.specs() if specs is None else specs
    lambdas = cfg.lambdas if lambdas is None else lambdas
    methods = tuple(cfg.method_list() if methods is None else methods)
    if cfg.n_gsl_max < 1 and Method.CPE in methods:
        raise InfeasibleScenario("n_gsl_max = 0: no session can attach to the ground")
    jobs = [(cfg, spec, lam, t, methods) for spec in specs for lam in lambdas for t in cfg.timestamps_min()]
    try:
        return _run_jobs(_throughput_job, jobs, cfg.workers)
    except ValueError as exc:
        raise InfeasibleScenario(str(exc)) from exc


def report_rows(records: Iterable[RunRecord], methods: Sequence[Method]) -> list[list[str]]:
    rows = []
    for rec in records:
        for (n, m), rep in sorted(rec.reports.items(), key=lambda kv: (kv[0][0], methods.index(kv[0][1]))):
            rows.append(
                [
                    rec.scenario,
                    fmt(rec.timestamp_min),
                    m.value,
                    str(rep.n_sessions),
                    fmt(rep.aggregate_throughput),
                    fmt(rep.mean_path_utilization),
                    fmt(rep.network_utilization),
                    str(n),
                    str(rec.skipped.get(n, 0)),
                    fmt(rec.lambda_per_period),
                    fmt(rec.sigma_min),
                    fmt(rec.capacity_gbps),
                ]
            )
    return rows


def run_load_throughput(cfg: ScenarioConfig) -> list[list[str]]:
    """Throughput and utilizations for each load count on the grid, per method."""
    methods = cfg.method_list()
    return report_rows(throughput_records(cfg, methods=methods), methods)


def run_method_comparison(cfg: ScenarioConfig) -> list[list[str]]:
    """All three methods on the first configured constellation at the first lambda.

    Flags rows whose mean path utilization exceeds one; CPE must never do so.
    """
    methods = list(Method)
    recs = throughput_records(cfg, specs=cfg.specs()[:1], lambdas=cfg.lambdas[:1], methods=methods)
    return flag_rows(report_rows(recs, methods))


def flag_rows(rows: list[list[str]]) -> list[list[str]]:
    util = REPORT_COLUMNS.index("mean_path_utilization")
    method = REPORT_COLUMNS.index("method")
    out = []
    for r in rows:
        over = float(r[util]) > 1.0
        if over and r[method] == Method.CPE.value:
            raise InfeasibleScenario(f"CPE mean path utilization above 1: {r}")
        out.append(r + ["1" if over else "0"])
    return out


def compare_on_graph(
    g: CapacityGraph, sessions: Sequence[TrafficSession], cfg: ScenarioConfig, scenario: str = "graph"
) -> list[list[str]]:
    """Method comparison on a user-supplied graph and session list (one row per method)."""
    if not sessions:
        raise InfeasibleScenario("session file is empty")
    cap = network_capacity(g)
    budget = GslBudget(cfg.gsl_capacity_gbps, cfg.n_gsl_max)
    rec = RunRecord(scenario, 0.0, 0.0, 0.0, cap)
    try:
        for m in Method:
            rec.reports[(len(sessions), m)] = compute_throughput(sessions, g, m, budget, cap)
    except ValueError as exc:
        raise InfeasibleScenario(str(exc)) from exc
    return flag_rows(report_rows([rec], list(Method)))


def write_csv(columns: Sequence[str], rows: Iterable[Sequence[str]], dest: str | Path | TextIO) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_csv(columns, rows, fh)
            return
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
