"""Scenario configuration: a flat ``key = value`` file plus command-line overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..constellation import PRESETS, ConstellationSpec, get_preset
from ..throughput import ELASTIC, Method
from ..traffic import TrafficModel, parse_demand


class ConfigError(ValueError):
    pass


DEFAULT_LOAD_GRID = (1, 10, 50, 100, 500, 1000, 2000, 3000, 4000, 5000)


@dataclass
class ScenarioConfig:
    constellations: tuple[str, ...] = ("starlink",)
    # inline constellation; used instead of the presets when n_planes is set
    custom_name: str = "custom"
    n_planes: int | None = None
    sats_per_plane: int | None = None
    phase_factor: int = 0
    inclination_deg: float | None = None
    altitude_km: float | None = None
    cross_seam: bool = True
    classical_phasing: bool = False

    isl_capacity_gbps: float = 10.0
    gsl_capacity_gbps: float = 100.0
    n_gsl_max: int = 10
    lambdas: tuple[float, ...] = (0.0, 10.0, 20.0, 40.0)
    sigmas_min: tuple[float, ...] = (0.0, 1.0, 2.0, 5.0, 10.0, 20.0)
    throughput_sigma_min: float = 1.0
    timestamp_step_min: float = 60.0
    horizon_min: float = 1440.0
    snapshot_times_min: tuple[float, ...] | None = None

    n_loads: int = 5000
    load_grid: tuple[int, ...] = DEFAULT_LOAD_GRID
    traffic_model: str = TrafficModel.POPULATION.value
    population_grid: str | None = None
    demand_gbps: float = ELASTIC
    methods: tuple[str, ...] = tuple(m.value for m in Method)

    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise ConfigError(msg)

        if self.n_planes is None:
            need(len(self.constellations) > 0, "no constellation given")
            for name in self.constellations:
                need(name.lower() in PRESETS, f"unknown constellation {name!r}; known: {sorted(PRESETS)}")
        else:
            try:
                self.custom_spec()
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"invalid inline constellation: {exc}") from None
        need(self.isl_capacity_gbps > 0, "isl_capacity_gbps must be positive")
        need(self.gsl_capacity_gbps > 0, "gsl_capacity_gbps must be positive")
        need(self.n_gsl_max >= 0, "n_gsl_max must be non-negative")
        need(all(x >= 0 for x in self.lambdas), "lambdas must be non-negative")
        need(all(x >= 0 for x in self.sigmas_min), "sigmas_min must be non-negative")
        need(self.throughput_sigma_min >= 0, "throughput_sigma_min must be non-negative")
        need(self.timestamp_step_min > 0, "timestamp_step_min must be positive")
        need(self.horizon_min > 0, "horizon_min must be positive")
        need(self.n_loads >= 1, "n_loads must be at least 1")
        need(all(n >= 1 for n in self.load_grid), "load_grid entries must be at least 1")
        need(self.workers >= 1, "workers must be at least 1")
        need(self.demand_gbps > 0, "demand_gbps must be positive or ELASTIC")
        try:
            TrafficModel(self.traffic_model.upper())
        except ValueError:
            raise ConfigError(f"unknown traffic_model {self.traffic_model!r}") from None
        for m in self.methods:
            try:
                Method(m.upper())
            except ValueError:
                raise ConfigError(f"unknown method {m!r}") from None
        if self.snapshot_times_min is not None:
            need(
                all(0 <= t <= self.horizon_min for t in self.snapshot_times_min),
                "snapshot times must lie within the horizon",
            )

    def custom_spec(self) -> ConstellationSpec:
        return ConstellationSpec(
            self.custom_name,
            int(self.n_planes),
            int(self.sats_per_plane),
            int(self.phase_factor),
            float(self.inclination_deg),
            float(self.altitude_km),
        )

    def specs(self) -> list[ConstellationSpec]:
        if self.n_planes is not None:
            return [self.custom_spec()]
        return [get_preset(n) for n in self.constellations]

    def method_list(self) -> list[Method]:
        return [Method(m.upper()) for m in self.methods]

    def model(self) -> TrafficModel:
        return TrafficModel(self.traffic_model.upper())

    def timestamps_min(self) -> list[float]:
        """Snapshot times in minutes: the explicit list, else every step within the horizon."""
        if self.snapshot_times_min is not None:
            return list(self.snapshot_times_min)
        n = int(math.floor(self.horizon_min / self.timestamp_step_min + 1e-9))
        return [i * self.timestamp_step_min for i in range(n + 1)]

    def loads(self) -> list[int]:
        return sorted({n for n in self.load_grid if n <= self.n_loads} | {self.n_loads})

    def replace(self, **changes: Any) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        return tuple(item(x.strip()) for x in s.split(",") if x.strip())

    return parse


def _optional(item: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(s: str) -> Any:
        return None if s.strip().lower() in ("", "none") else item(s)

    return parse


def _constellations(s: str) -> tuple[str, ...]:
    if s.strip().lower() == "all":
        return tuple(PRESETS)
    return tuple(x.strip().lower() for x in s.split(",") if x.strip())


PARSERS: dict[str, Callable[[str], Any]] = {
    "constellations": _constellations,
    "custom_name": str,
    "n_planes": _optional(int),
    "sats_per_plane": _optional(int),
    "phase_factor": int,
    "inclination_deg": _optional(float),
    "altitude_km": _optional(float),
    "cross_seam": _bool,
    "classical_phasing": _bool,
    "isl_capacity_gbps": float,
    "gsl_capacity_gbps": float,
    "n_gsl_max": int,
    "lambdas": _list(float),
    "sigmas_min": _list(float),
    "throughput_sigma_min": float,
    "timestamp_step_min": float,
    "horizon_min": float,
    "snapshot_times_min": _optional(_list(float)),
    "n_loads": int,
    "load_grid": _list(int),
    "traffic_model": lambda s: s.strip().upper(),
    "population_grid": _optional(str),
    "demand_gbps": parse_demand,
    "methods": _list(lambda s: s.upper()),
    "seed": int,
    "workers": int,
}

assert set(PARSERS) == {f.name for f in dataclasses.fields(ScenarioConfig)}


def parse_overrides(pairs: dict[str, str]) -> dict[str, Any]:
    out = {}
    for key, raw in pairs.items():
        key = key.strip().replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = PARSERS[key](raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


def read_config_file(path: str | Path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    raw = read_config_file(path) if path is not None else {}
    raw.update(overrides or {})
    return ScenarioConfig(**parse_overrides(raw))
