"""Walker-delta constellations: geometry, circular-orbit propagation and +Grid ISL topology."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import CapacityGraph

R_EARTH_KM = 6371.0
MU_EARTH_KM3_S2 = 398600.4418
EARTH_ROTATION_RAD_S = 7.2921159e-5

DEFAULT_ISL_CAPACITY_GBPS = 10.0


@dataclass(frozen=True)
class ConstellationSpec:
    name: str
    n_planes: int
    sats_per_plane: int
    phase_factor: int
    inclination_deg: float
    altitude_km: float

    def __post_init__(self) -> None:
        if self.n_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("n_planes and sats_per_plane must be positive")
        if not 0 <= self.phase_factor <= self.n_planes - 1:
            raise ValueError(
                f"phase_factor must lie in [0, {self.n_planes - 1}], got {self.phase_factor}"
            )
        if not 0.0 < self.inclination_deg < 180.0:
            raise ValueError(f"inclination must lie in (0, 180) deg, got {self.inclination_deg}")
        if not self.altitude_km > 0:
            raise ValueError(f"altitude must be positive, got {self.altitude_km}")

    @property
    def n_sats(self) -> int:
        return self.n_planes * self.sats_per_plane

    @property
    def radius_km(self) -> float:
        return R_EARTH_KM + self.altitude_km

    @property
    def orbital_period_s(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.radius_km**3 / MU_EARTH_KM3_S2)

    @property
    def orbital_period_min(self) -> float:
        return self.orbital_period_s / 60.0

    def satellites(self) -> list[SatelliteNode]:
        return [SatelliteNode.from_id(self, i) for i in range(self.n_sats)]


# Phase factors are not listed for the reference systems; F = 0 keeps planes in lockstep.
PRESETS: dict[str, ConstellationSpec] = {
    "kuiper": ConstellationSpec("kuiper", 17, 34, 0, 51.9, 630.0),
    "oneweb": ConstellationSpec("oneweb", 12, 49, 0, 87.9, 1200.0),
    "telesat": ConstellationSpec("telesat", 40, 33, 0, 50.9, 1325.0),
    "starlink": ConstellationSpec("starlink", 22, 72, 0, 53.0, 550.0),
}


def get_preset(name: str) -> ConstellationSpec:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown constellation preset {name!r}; known: {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class SatelliteNode:
    sat_id: int
    plane_idx: int
    slot_idx: int

    @classmethod
    def from_id(cls, spec: ConstellationSpec, sat_id: int) -> SatelliteNode:
        if not 0 <= sat_id < spec.n_sats:
            raise ValueError(f"sat_id {sat_id} outside [0, {spec.n_sats})")
        plane, slot = divmod(sat_id, spec.sats_per_plane)
        return cls(sat_id, plane, slot)

    @classmethod
    def from_plane_slot(cls, spec: ConstellationSpec, plane_idx: int, slot_idx: int) -> SatelliteNode:
        return cls(plane_idx * spec.sats_per_plane + slot_idx, plane_idx, slot_idx)


@dataclass(frozen=True)
class OrbitalState:
    position: tuple[float, float, float]  # ECEF, km
    position_eci: tuple[float, float, float]
    orbital_period_min: float


def phase_offset(spec: ConstellationSpec, classical: bool = False) -> float:
    """Along-track phase shift (rad) between satellites of adjacent planes.

    The default uses the denominator ``M_P * (N_P - 1)``; ``classical=True``
    switches to standard Walker phasing ``2*pi*F / (N_P * M_P)``.
    """
    if spec.phase_factor == 0:
        return 0.0
    if classical:
        return 2.0 * math.pi * spec.phase_factor / (spec.n_planes * spec.sats_per_plane)
    if spec.n_planes == 1:
        return 0.0
    return 2.0 * math.pi * spec.phase_factor / (spec.sats_per_plane * (spec.n_planes - 1))


def phase_deviation(spec: ConstellationSpec) -> float:
    """Distance of the inter-plane phase shift from the nearest in-plane slot.

    Zero when F = 0 or F = N_P - 1 (the shift equals a whole slot spacing);
    largest near F = N_P / 2.
    """
    spacing = 2.0 * math.pi / spec.sats_per_plane
    rem = math.fmod(phase_offset(spec), spacing)
    return min(rem, spacing - rem)


def _anomalies(spec: ConstellationSpec, t: float, classical: bool) -> tuple[np.ndarray, np.ndarray]:
    ids = np.arange(spec.n_sats)
    plane, slot = np.divmod(ids, spec.sats_per_plane)
    raan = 2.0 * np.pi * plane / spec.n_planes
    arg_lat = (
        2.0 * np.pi * slot / spec.sats_per_plane
        + plane * phase_offset(spec, classical)
        + 2.0 * np.pi * t / spec.orbital_period_s
    )
    return raan, arg_lat


def _circular_eci(radius: float, inc: float, raan: np.ndarray, arg_lat: np.ndarray) -> np.ndarray:
    cu, su = np.cos(arg_lat), np.sin(arg_lat)
    co, so = np.cos(raan), np.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    return radius * np.stack([co * cu - so * su * ci, so * cu + co * su * ci, su * si], axis=-1)


def eci_to_ecef(pos: np.ndarray, t: float) -> np.ndarray:
    theta = EARTH_ROTATION_RAD_S * t
    c, s = math.cos(theta), math.sin(theta)
    x, y, z = pos[..., 0], pos[..., 1], pos[..., 2]
    return np.stack([c * x + s * y, -s * x + c * y, z], axis=-1)


def positions(
    spec: ConstellationSpec, t: float, frame: str = "ecef", classical: bool = False
) -> np.ndarray:
    """(n_sats, 3) positions in km at ``t`` seconds after epoch, indexed by sat_id."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    raan, arg_lat = _anomalies(spec, t, classical)
    eci = _circular_eci(spec.radius_km, math.radians(spec.inclination_deg), raan, arg_lat)
    if frame == "eci":
        return eci
    if frame == "ecef":
        return eci_to_ecef(eci, t)
    raise ValueError(f"unknown frame {frame!r}")


def propagate(
    spec: ConstellationSpec, sat: SatelliteNode, t: float, classical: bool = False
) -> OrbitalState:
    if not (0 <= sat.plane_idx < spec.n_planes and 0 <= sat.slot_idx < spec.sats_per_plane):
        raise ValueError(f"{sat} does not belong to {spec.name}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    raan = np.array([2.0 * np.pi * sat.plane_idx / spec.n_planes])
    arg_lat = np.array(
        [
            2.0 * np.pi * sat.slot_idx / spec.sats_per_plane
            + sat.plane_idx * phase_offset(spec, classical)
            + 2.0 * np.pi * t / spec.orbital_period_s
        ]
    )
    eci = _circular_eci(spec.radius_km, math.radians(spec.inclination_deg), raan, arg_lat)[0]
    ecef = eci_to_ecef(eci, t)
    return OrbitalState(
        position=tuple(float(x) for x in ecef),
        position_eci=tuple(float(x) for x in eci),
        orbital_period_min=spec.orbital_period_min,
    )


def grid_links(spec: ConstellationSpec, cross_seam: bool = True) -> list[tuple[int, int]]:
    """+Grid link list: intra-plane ring plus same-slot links to the next plane."""
    n, m = spec.n_planes, spec.sats_per_plane
    seen: set[frozenset] = set()
    links = []

    def add(a: int, b: int) -> None:
        key = frozenset((a, b))
        if a != b and key not in seen:
            seen.add(key)
            links.append((a, b))

    for p in range(n):
        for s in range(m):
            sat = p * m + s
            add(sat, p * m + (s + 1) % m)
            if p + 1 < n:
                add(sat, (p + 1) * m + s)
            elif cross_seam:
                add(sat, s)
    return links


def build_topology(
    spec: ConstellationSpec,
    t: float = 0.0,
    isl_capacity_gbps: float = DEFAULT_ISL_CAPACITY_GBPS,
    cross_seam: bool = True,
    classical: bool = False,
) -> CapacityGraph:
    """ISL graph at ``t`` seconds; every link carries its length and ``isl_capacity_gbps``."""
    pos = positions(spec, t, "ecef", classical)
    g = CapacityGraph()
    for i in range(spec.n_sats):
        g.add_node(i)
    for a, b in grid_links(spec, cross_seam):
        length = float(np.linalg.norm(pos[a] - pos[b]))
        g.add_edge(a, b, isl_capacity_gbps, length)
    return g
