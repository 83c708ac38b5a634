import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocap.constellation import (
    MU_EARTH_KM3_S2,
    PRESETS,
    R_EARTH_KM,
    ConstellationSpec,
    SatelliteNode,
    build_topology,
    get_preset,
    grid_links,
    phase_deviation,
    phase_offset,
    positions,
    propagate,
)


def spec(n=4, m=6, f=0, inc=53.0, alt=550.0):
    return ConstellationSpec("t", n, m, f, inc, alt)


class TestSpec:
    def test_presets_match_reference_table(self):
        rows = {
            "kuiper": (17, 34, 630.0, 51.9),
            "oneweb": (12, 49, 1200.0, 87.9),
            "telesat": (40, 33, 1325.0, 50.9),
            "starlink": (22, 72, 550.0, 53.0),
        }
        for name, (n, m, alt, inc) in rows.items():
            s = PRESETS[name]
            assert (s.n_planes, s.sats_per_plane, s.altitude_km, s.inclination_deg) == (n, m, alt, inc)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(f=4, n=4), dict(f=-1), dict(inc=0.0), dict(inc=180.0), dict(alt=0.0), dict(n=0)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            spec(**kwargs)

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset("iridium")

    def test_total_and_numbering(self):
        s = spec(5, 7)
        assert s.n_sats == 35
        sats = s.satellites()
        assert [x.sat_id for x in sats] == list(range(35))
        for x in sats:
            assert x.sat_id == x.plane_idx * 7 + x.slot_idx
            assert SatelliteNode.from_plane_slot(s, x.plane_idx, x.slot_idx) == x

    def test_period_is_kepler(self):
        s = get_preset("starlink")
        a = R_EARTH_KM + 550.0
        assert s.orbital_period_min == pytest.approx(2 * math.pi * math.sqrt(a**3 / MU_EARTH_KM3_S2) / 60)
        assert 95.0 < s.orbital_period_min < 96.0


class TestPhaseOffset:
    def test_zero_phase_factor(self):
        assert phase_offset(spec(22, 72, 0)) == 0.0

    def test_starlink_like(self):
        assert phase_offset(spec(22, 72, 11)) == pytest.approx(0.045712, abs=1e-6)

    def test_oneweb_like(self):
        assert phase_offset(spec(12, 49, 6)) == pytest.approx(0.069942, abs=1e-6)

    def test_single_plane(self):
        assert phase_offset(ConstellationSpec("x", 1, 10, 0, 50.0, 500.0)) == 0.0

    def test_classical_switch(self):
        s = spec(22, 72, 11)
        assert phase_offset(s, classical=True) == pytest.approx(2 * math.pi * 11 / (22 * 72))

    def test_end_factors_are_equivalent(self):
        # F = N_P - 1 shifts by exactly one slot spacing
        s = spec(12, 49, 11)
        assert phase_offset(s) == pytest.approx(2 * math.pi / 49)
        assert phase_deviation(s) == pytest.approx(0.0, abs=1e-12)

    @given(n=st.integers(2, 40), m=st.integers(1, 100))
    def test_deviation_peaks_at_half_planes(self, n, m):
        devs = [phase_deviation(spec(n, m, f)) for f in range(n)]
        peak = max(devs)
        assert devs[n // 2] == pytest.approx(peak, rel=1e-9)
        assert peak <= math.pi / m + 1e-12


class TestPropagate:
    def test_epoch_convention(self):
        s = spec()
        st0 = propagate(s, SatelliteNode(0, 0, 0), 0.0)
        assert st0.position == pytest.approx((s.radius_km, 0.0, 0.0), abs=1e-9)

    def test_circular_radius(self):
        s = spec(3, 5, 1)
        for sat in s.satellites():
            p = propagate(s, sat, 1234.5)
            assert np.linalg.norm(p.position) == pytest.approx(s.radius_km, abs=1e-6)
            assert p.orbital_period_min == s.orbital_period_min

    def test_periodic_in_inertial_frame(self):
        s = spec(3, 5, 1)
        for sat in s.satellites():
            a = propagate(s, sat, 0.0).position_eci
            b = propagate(s, sat, s.orbital_period_s).position_eci
            assert np.allclose(a, b, atol=1e-6)

    def test_uniform_in_plane_spacing(self):
        s = spec(3, 8)
        for j in range(8):
            a = np.array(propagate(s, SatelliteNode.from_plane_slot(s, 1, j), 300.0).position_eci)
            b = np.array(propagate(s, SatelliteNode.from_plane_slot(s, 1, (j + 1) % 8), 300.0).position_eci)
            ang = math.acos(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
            assert ang == pytest.approx(2 * math.pi / 8, abs=1e-9)

    def test_vectorised_matches_single(self):
        s = spec(4, 5, 2)
        pos = positions(s, 777.0)
        for sat in s.satellites():
            assert np.allclose(pos[sat.sat_id], propagate(s, sat, 777.0).position, atol=1e-9)

    def test_foreign_satellite(self):
        with pytest.raises(ValueError):
            propagate(spec(2, 3), SatelliteNode(9, 3, 0), 0.0)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            positions(spec(), -1.0)


def _connected(g):
    start = g.nodes[0]
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for v in g.successors(u):
            if v not in seen:
                seen.add(v)
                q.append(v)
    return len(seen) == len(g)


class TestTopology:
    def test_starlink_counts(self):
        g = build_topology(get_preset("starlink"))
        assert len(g) == 1584
        assert len(g.edges()) == 3168
        assert g.n_arcs == 2 * 3168

    def test_degree_four(self):
        g = build_topology(get_preset("kuiper"))
        assert {g.degree(n) for n in g.nodes} == {4}

    def test_symmetric_lengths_and_capacity(self):
        g = build_topology(spec(5, 9, 2), 600.0, isl_capacity_gbps=7.0)
        for u, v in g.edges():
            assert g.length(u, v) == g.length(v, u) > 0
            assert g.capacity(u, v) == g.capacity(v, u) == 7.0

    def test_without_cross_seam(self):
        s = spec(5, 9)
        assert len(grid_links(s, cross_seam=False)) == 2 * 45 - 9

    def test_two_planes_not_doubled(self):
        g = build_topology(spec(2, 6))
        # 12 intra-plane links; the wrap-around inter-plane link coincides with the direct one
        assert len(g.edges()) == 12 + 6
        assert {g.degree(n) for n in g.nodes} == {3}

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(2, 8), m=st.integers(3, 10))
    def test_connected(self, n, m):
        assert _connected(build_topology(spec(n, m)))

    def test_deterministic(self):
        s = get_preset("telesat")
        a = [(x.src, x.dst, x.capacity, x.length_km) for x in build_topology(s, 3600.0).arcs()]
        b = [(x.src, x.dst, x.capacity, x.length_km) for x in build_topology(s, 3600.0).arcs()]
        assert a == b

    def test_intra_plane_length_is_chord(self):
        s = spec(4, 12)
        g = build_topology(s, 0.0)
        chord = 2 * s.radius_km * math.sin(math.pi / 12)
        assert g.length(0, 1) == pytest.approx(chord, rel=1e-12)
