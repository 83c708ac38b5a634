"""Unreliable-ISL model: renewal on/off availability and the resulting network capacity.

Each ISL stays up for an exponential time with mean ``T / lambda`` (``T`` the
orbital period, ``lambda`` failures per period), then is down for exactly
``sigma`` minutes, and repeats.  Intervals are left-closed: at a transition
instant the link is in the state being entered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import CapacityGraph, Node


@dataclass(frozen=True)
class IslReliabilityProcess:
    lambda_per_period: float
    sigma_min: float
    orbital_period_min: float
    seed: int = 0
    stream: int = 0

    def __post_init__(self) -> None:
        if self.lambda_per_period < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lambda_per_period}")
        if self.sigma_min < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma_min}")
        if not self.orbital_period_min > 0:
            raise ValueError(f"orbital period must be positive, got {self.orbital_period_min}")

    @property
    def mean_up_min(self) -> float:
        if self.lambda_per_period == 0:
            return math.inf
        return self.orbital_period_min / self.lambda_per_period

    @property
    def stationary_availability(self) -> float:
        return availability_fraction(self.orbital_period_min, self.lambda_per_period, self.sigma_min)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, self.stream]))


@dataclass(frozen=True, eq=False)
class AvailabilityTimeline:
    """Up intervals ``[up_starts[j], up_ends[j])``; each is followed by a down interval of length sigma."""

    up_starts: np.ndarray
    up_ends: np.ndarray
    sigma_min: float
    horizon_min: float

    def intervals(self) -> list[tuple[float, float, int]]:
        """Alternating ``(start, end, state)`` triples, state 1 = up."""
        out = []
        for s, e in zip(self.up_starts.tolist(), self.up_ends.tolist()):
            if not math.isfinite(e):
                out.append((s, self.horizon_min, 1))
                break
            out.append((s, e, 1))
            if self.sigma_min > 0:
                out.append((e, e + self.sigma_min, 0))
        return out

    @property
    def n_failures(self) -> int:
        return int(np.count_nonzero(self.up_ends < self.horizon_min))

    def up_time(self, until: float | None = None) -> float:
        """Total up time within ``[0, until]`` (defaults to the horizon)."""
        until = self.horizon_min if until is None else until
        overlap = np.minimum(self.up_ends, until) - np.minimum(self.up_starts, until)
        return float(overlap.sum())

    def mean_availability(self) -> float:
        return self.up_time() / self.horizon_min


def sample_timeline(proc: IslReliabilityProcess, horizon_min: float) -> AvailabilityTimeline:
    if not horizon_min > 0:
        raise ValueError(f"horizon must be positive, got {horizon_min}")
    if proc.lambda_per_period == 0:
        # never fails: a single unbounded up interval
        return AvailabilityTimeline(np.array([0.0]), np.array([math.inf]), proc.sigma_min, horizon_min)
    rng = proc.rng()
    mean_up = proc.mean_up_min
    sigma = proc.sigma_min
    expected_cycles = horizon_min / (mean_up + sigma)
    chunk = int(expected_cycles * 1.2) + 16
    ups: list[np.ndarray] = []
    elapsed = 0.0
    while elapsed < horizon_min:
        x = rng.standard_exponential(chunk) * mean_up
        ups.append(x)
        elapsed += float(x.sum()) + sigma * chunk
    up = np.concatenate(ups)
    cycle_end = np.cumsum(up + sigma)
    starts = np.concatenate(([0.0], cycle_end[:-1]))
    # keep cycles through the one containing the horizon
    n = int(np.searchsorted(starts, horizon_min, side="right"))
    starts = starts[:n]
    return AvailabilityTimeline(starts, starts + up[:n], sigma, horizon_min)


def availability(timeline: AvailabilityTimeline, t: float) -> int:
    if not 0 <= t <= timeline.horizon_min:
        raise ValueError(f"t={t} outside [0, {timeline.horizon_min}]")
    idx = int(np.searchsorted(timeline.up_starts, t, side="right")) - 1
    return int(t < timeline.up_ends[idx])


def edge_processes(
    graph: CapacityGraph,
    lambda_per_period: float,
    sigma_min: float,
    orbital_period_min: float,
    seed: int,
) -> dict[tuple[Node, Node], IslReliabilityProcess]:
    """One independent process per link, stream id = link index in ``graph.edges()``."""
    return {
        e: IslReliabilityProcess(lambda_per_period, sigma_min, orbital_period_min, seed, i)
        for i, e in enumerate(graph.edges())
    }


def sample_edge_timelines(
    graph: CapacityGraph,
    lambda_per_period: float,
    sigma_min: float,
    orbital_period_min: float,
    seed: int,
    horizon_min: float,
) -> dict[tuple[Node, Node], AvailabilityTimeline]:
    procs = edge_processes(graph, lambda_per_period, sigma_min, orbital_period_min, seed)
    return {e: sample_timeline(p, horizon_min) for e, p in procs.items()}


def _lookup(timelines: Mapping, u: Node, v: Node) -> AvailabilityTimeline:
    tl = timelines.get((u, v))
    if tl is None:
        tl = timelines.get((v, u))
    if tl is None:
        raise KeyError(f"no availability timeline for link ({u!r}, {v!r})")
    return tl


def network_capacity_at(
    graph: CapacityGraph, timelines: Mapping[tuple[Node, Node], AvailabilityTimeline], t: float
) -> float:
    """Sum of capacities of links that are up at ``t`` (minutes); each link counted once."""
    total = 0.0
    for u, v in graph.edges():
        if availability(_lookup(timelines, u, v), t):
            total += graph.capacity(u, v)
    return total


def available_graph(
    graph: CapacityGraph, timelines: Mapping[tuple[Node, Node], AvailabilityTimeline], t: float
) -> CapacityGraph:
    """Copy of ``graph`` without the links that are down at ``t``."""
    return graph.filter_edges(lambda u, v: availability(_lookup(timelines, u, v), t) == 1)


def time_averaged_capacity(
    graph: CapacityGraph, timelines: Mapping[tuple[Node, Node], AvailabilityTimeline]
) -> float:
    """Exact time average of the instantaneous capacity over each timeline's horizon."""
    total = 0.0
    for u, v in graph.edges():
        total += graph.capacity(u, v) * _lookup(timelines, u, v).mean_availability()
    return total


def availability_fraction(period_min: float, lambda_per_period: float, sigma_min: float) -> float:
    if not period_min > 0:
        raise ValueError(f"orbital period must be positive, got {period_min}")
    return period_min / (period_min + sigma_min * lambda_per_period)


def expected_capacity(
    n_edges: int, c_e: float, period_min: float, lambda_per_period: float, sigma_min: float
) -> float:
    """Closed-form stationary capacity ``|E| * C_e * T / (T + sigma * lambda)``."""
    return n_edges * c_e * availability_fraction(period_min, lambda_per_period, sigma_min)


def capacity_drop(period_min: float, lambda_per_period: float, sigma_min: float) -> float:
    """Fraction of the reliable capacity lost in expectation."""
    return 1.0 - availability_fraction(period_min, lambda_per_period, sigma_min)


def sigma_for_drop(period_min: float, lambda_per_period: float, drop: float) -> float:
    """Repair time that yields the given expected capacity drop."""
    if lambda_per_period <= 0:
        raise ValueError("a positive failure rate is needed to produce any drop")
    if not 0 <= drop < 1:
        raise ValueError(f"drop must lie in [0, 1), got {drop}")
    return drop * period_min / (lambda_per_period * (1.0 - drop))
