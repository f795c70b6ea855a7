import math

import numpy as np
import pytest

from skypath.coverage import (
    MARCH_STEP,
    RADIUS_SAFETY,
    LinkState,
    azimuth_coverage_radius,
    build_all_coverage,
    build_coverage_map,
    classify_los,
    common_border_points,
    coverage_disk_radius_sq,
    network_covered,
    points_in_coverage,
    snr,
    snr_per_station,
)
from skypath.geometry import Building, Point3
from skypath.scenario import BaseStation, CityMap, default_radio_params

from conftest import (
    direct_snr_max,
    march_coverage_radius,
    open_field_scenario,
    small_city_scenario,
)

# Frozen by independent substitution into the pathloss model with defaults
# P/sigma^2 = 1e12, threshold = 1e2, beta = 1e-4, h - h_g = 60:
#   LoS:  (1e6)**(2/2.2) - 3600
#   NLoS: (1e6)**(2/2.8) - 3600
D_LOS_SQ = 281203.58684358007
D_NLOS_SQ = 15706.977288832506
R_LOS = math.sqrt(D_LOS_SQ)  # ~530.286
R_NLOS = math.sqrt(D_NLOS_SQ)  # ~125.327


@pytest.fixture(scope="module")
def params():
    return default_radio_params()


@pytest.fixture(scope="module")
def empty_city():
    return CityMap(width=2000.0, depth=2000.0, buildings=())


@pytest.fixture(scope="module")
def bs(params):
    return BaseStation(id=1, position=Point3(1000.0, 1000.0, params.bs_height))


class TestClassifyLos:
    def test_empty_city_everywhere_los(self, params, empty_city, bs):
        p = Point3(1400.0, 900.0, params.uav_altitude)
        assert classify_los(p, bs, empty_city) is LinkState.LOS

    def test_directly_above_bs(self, params, bs):
        city = CityMap(2000, 2000, (Building(900, 980, 900, 980, 70.0),))
        p = Point3(bs.position.x, bs.position.y, params.uav_altitude)
        assert classify_los(p, bs, city) is LinkState.LOS

    def test_blocked_case_matches_geometry(self, params, bs):
        # wall between the UAV and the BS, taller than the crossing altitude
        city = CityMap(2000, 2000, (Building(1040, 1060, 900, 1100, 60.0),))
        p = Point3(1100.0, 1000.0, params.uav_altitude)
        assert classify_los(p, bs, city) is LinkState.NLOS


class TestSnr:
    def test_los_value_by_substitution(self, params, empty_city, bs):
        p = Point3(1100.0, 1000.0, params.uav_altitude)  # 100 m offset, dz 60
        expected = 1e12 * 1e-4 * math.hypot(100.0, 60.0) ** -2.2
        assert snr(p, bs, params, empty_city) == pytest.approx(expected, rel=1e-12)
        assert snr(p, bs, params, empty_city) == pytest.approx(2838.6196238508096, rel=1e-9)

    def test_nlos_value_by_substitution(self, params, bs):
        city = CityMap(2000, 2000, (Building(1040, 1060, 900, 1100, 79.0),))
        p = Point3(1100.0, 1000.0, params.uav_altitude)
        expected = 1e12 * 1e-4 * math.hypot(100.0, 60.0) ** -2.8
        assert snr(p, bs, params, city) == pytest.approx(expected, rel=1e-12)
        assert snr(p, bs, params, city) == pytest.approx(163.32231541829287, rel=1e-9)

    def test_doubling_power_doubles_snr(self, params, empty_city, bs):
        doubled = default_radio_params(p_over_sigma2_db=120.0 + 10 * math.log10(2.0))
        p = Point3(1234.0, 876.0, params.uav_altitude)
        assert snr(p, bs, doubled, empty_city) == pytest.approx(
            2.0 * snr(p, bs, params, empty_city), rel=1e-9
        )

    def test_near_field_clamp(self, params, empty_city):
        low = default_radio_params(uav_altitude=80.0, bs_height=79.9999999)
        bs0 = BaseStation(id=1, position=Point3(1000.0, 1000.0, low.bs_height))
        p = Point3(1000.0, 1000.0, low.uav_altitude)
        # distance ~1e-7 clamps to 1 m
        assert snr(p, bs0, low, empty_city) == pytest.approx(
            low.tx_power_over_noise * low.beta_los, rel=1e-9
        )

    def test_batch_matches_scalar(self, params, bs):
        city = small_city_scenario(seed=4, k=1).city
        rng = np.random.default_rng(0)
        pts = rng.uniform(100, 700, size=(40, 2))
        batch = snr_per_station(pts, bs, params, city)
        for xy, v in zip(pts, batch):
            assert snr(Point3(xy[0], xy[1], params.uav_altitude), bs, params, city) == pytest.approx(v, rel=1e-12)


class TestCoverageDiskRadius:
    def test_los_value(self, params):
        assert coverage_disk_radius_sq(params, LinkState.LOS) == pytest.approx(
            D_LOS_SQ, rel=1e-12
        )

    def test_nlos_value(self, params):
        assert coverage_disk_radius_sq(params, LinkState.NLOS) == pytest.approx(
            D_NLOS_SQ, rel=1e-12
        )

    def test_zero_when_threshold_unreachable(self):
        # threshold so high the first term falls below the altitude gap
        harsh = default_radio_params(snr_threshold_db=80.0)
        assert coverage_disk_radius_sq(harsh, LinkState.NLOS) == 0.0


class TestAzimuthCoverageRadius:
    def test_open_field_equals_los_radius(self, params, empty_city, bs):
        for theta in (0.0, 1.0, 4.5):
            assert azimuth_coverage_radius(bs, theta, empty_city, params) == pytest.approx(
                R_LOS, rel=1e-12
            )

    def test_periodicity(self, params, bs):
        city = small_city_scenario(seed=7, k=1).city
        bs_c = BaseStation(id=1, position=Point3(400.0, 400.0, params.bs_height))
        for theta in (0.3, 2.0):
            a = azimuth_coverage_radius(bs_c, theta, city, params)
            b = azimuth_coverage_radius(bs_c, theta + 2 * math.pi, city, params)
            assert a == pytest.approx(b, abs=1e-9)

    def test_ringed_station_falls_back_to_nlos_radius(self, params):
        # over-height ring 10 m out: LoS dies immediately, NLoS disk remains
        walls = (
            Building(1010, 1020, 900, 1100, 70.0),
            Building(980, 990, 900, 1100, 70.0),
            Building(990, 1010, 1010, 1020, 70.0),
            Building(990, 1010, 980, 990, 70.0),
        )
        city = CityMap(2000, 2000, walls)
        bs_c = BaseStation(id=1, position=Point3(1000.0, 1000.0, params.bs_height))
        for theta in np.linspace(0, 2 * math.pi, 17):
            r = azimuth_coverage_radius(bs_c, theta, city, params)
            assert r <= R_NLOS + 1e-9

    def test_matches_march_oracle(self, params):
        scn = small_city_scenario(seed=11, k=3)
        bs_c = scn.base_stations[0]
        rng = np.random.default_rng(2)
        for theta in rng.uniform(0, 2 * math.pi, 12):
            exact = azimuth_coverage_radius(bs_c, theta, scn.city, params)
            marched = march_coverage_radius(bs_c, theta, scn, dr=MARCH_STEP)
            assert marched <= exact + 1e-9
            assert exact - marched <= MARCH_STEP + 1e-9


class TestBuildCoverageMap:
    def test_open_field_full_disk(self, params, empty_city, bs):
        cov = build_coverage_map(bs, empty_city, params)
        assert len(cov.sectors) >= 2  # the <= pi rule forces a split
        spans = sum(s.span for s in cov.sectors)
        assert spans == pytest.approx(2 * math.pi, abs=1e-9)
        for s in cov.sectors:
            assert s.radius == pytest.approx(R_LOS - RADIUS_SAFETY, abs=1e-9)
            assert s.span <= math.pi + 1e-12

    def test_sector_invariants_on_real_city(self, params):
        scn = small_city_scenario(seed=11, k=4)
        for bs_c in scn.base_stations:
            cov = build_coverage_map(bs_c, scn.city, params)
            ordered = sorted(cov.sectors, key=lambda s: s.theta_start)
            for a, b in zip(ordered, ordered[1:]):
                assert a.theta_end <= b.theta_start + 1e-12  # non-overlapping
            for s in cov.sectors:
                assert 0 < s.span <= math.pi + 1e-12

    def test_ringed_station_radii_bounded(self, params):
        walls = (
            Building(1010, 1020, 900, 1100, 70.0),
            Building(980, 990, 900, 1100, 70.0),
            Building(990, 1010, 1010, 1020, 70.0),
            Building(990, 1010, 980, 990, 70.0),
        )
        city = CityMap(2000, 2000, walls)
        bs_c = BaseStation(id=1, position=Point3(1000.0, 1000.0, params.bs_height))
        cov = build_coverage_map(bs_c, city, params)
        assert 0 < cov.max_radius <= R_NLOS + 1e-9

    def test_claimed_points_truly_covered(self, params):
        # conservativeness: every claimed point meets the threshold with margin
        scn = small_city_scenario(seed=13, k=3)
        rng = np.random.default_rng(1)
        pts = rng.uniform(0, 800, size=(4000, 2))
        for bs_c in scn.base_stations:
            cov = build_coverage_map(bs_c, scn.city, params)
            claimed = points_in_coverage(pts, cov)
            if claimed.any():
                vals = snr_per_station(pts[claimed], bs_c, params, scn.city)
                assert (vals >= params.snr_threshold).all()

    def test_corner_grazing_dip_never_overclaims(self, params):
        # A tall building far out subtends well under one angular cell, so
        # point-sampled azimuths would miss the blocking dip entirely; the
        # certified cells must still keep every claimed point truly covered.
        bs_c = BaseStation(id=1, position=Point3(1000.0, 1000.0, params.bs_height))
        rng = np.random.default_rng(17)
        for trial in range(8):
            ang = rng.uniform(0, 2 * math.pi)
            dist = rng.uniform(150.0, 350.0)
            cx = 1000.0 + dist * math.cos(ang)
            cy = 1000.0 + dist * math.sin(ang)
            side = rng.uniform(0.4, 1.5)  # subtends ~0.1-0.6 deg at 150-350 m
            city = CityMap(2000, 2000, (
                Building(cx - side, cx + side, cy - side, cy + side, 69.0),
            ))
            cov = build_coverage_map(bs_c, city, params)
            # probe the dip wedge densely, well beyond cell resolution
            probe_ang = ang + np.linspace(-0.02, 0.02, 400)
            probe_rad = rng.uniform(10.0, R_LOS, 400)
            pts = np.column_stack([
                1000.0 + probe_rad * np.cos(probe_ang),
                1000.0 + probe_rad * np.sin(probe_ang),
            ])
            claimed = points_in_coverage(pts, cov)
            if claimed.any():
                vals = snr_per_station(pts[claimed], bs_c, params, city)
                assert (vals >= params.snr_threshold).all()

    def test_membership_agreement_rate(self, params):
        scn = small_city_scenario(seed=17, k=4)
        rng = np.random.default_rng(3)
        pts = rng.uniform(0, 800, size=(3000, 2))
        maps, _ = build_all_coverage(scn)
        claimed = np.zeros(len(pts), dtype=bool)
        for cov in maps.values():
            claimed |= points_in_coverage(pts, cov)
        true_cov = direct_snr_max(pts, scn) >= params.snr_threshold
        assert (claimed == true_cov).mean() >= 0.98

    def test_sector_convexity_by_interior_chords(self, params):
        scn = small_city_scenario(seed=17, k=2)
        rng = np.random.default_rng(9)
        cov = build_coverage_map(scn.base_stations[0], scn.city, params)
        sectors = [s for s in cov.sectors if s.radius > 20.0][:12]
        for sector in sectors:
            for _ in range(20):
                ang = sector.theta_start + rng.uniform(0, 1, 2) * sector.span
                rad = rng.uniform(0, sector.radius, 2)
                p = np.array([sector.center[0] + rad * np.cos(ang),
                              sector.center[1] + rad * np.sin(ang)]).T
                length = np.hypot(*(p[1] - p[0]))
                lam = np.linspace(0, 1, max(3, int(length) + 1))
                seg = np.outer(1 - lam, p[0]) + np.outer(lam, p[1])
                from skypath.geometry import points_in_sectors

                starts = np.array([sector.theta_start])
                spans = np.array([sector.span])
                radii = np.array([sector.radius])
                assert points_in_sectors(seg, sector.center, starts, spans, radii).all()

    def test_star_shape_border_segments_covered(self, params):
        scn = small_city_scenario(seed=19, k=2)
        for bs_c in scn.base_stations:
            cov = build_coverage_map(bs_c, scn.city, params)
            for bp in cov.border_points[::8]:
                r = math.hypot(bp[0] - cov.center[0], bp[1] - cov.center[1])
                n = max(3, int(r))
                lam = np.linspace(0.0, 1.0, n)
                seg = np.outer(1 - lam, cov.center) + np.outer(lam, bp)
                vals = snr_per_station(seg, bs_c, params, scn.city)
                assert (vals >= params.snr_threshold).all()


class TestDiscretizeBorder:
    def test_full_disk_four_points(self, params, empty_city, bs):
        cov = build_coverage_map(bs, empty_city, params, border_samples=4)
        assert cov.border_count == 4
        r = cov.max_radius
        expect = [
            (bs.position.x + r, bs.position.y),
            (bs.position.x, bs.position.y + r),
            (bs.position.x - r, bs.position.y),
            (bs.position.x, bs.position.y - r),
        ]
        np.testing.assert_allclose(cov.border_points, expect, atol=1e-6)

    def test_uniform_spacing_along_perimeter(self, params):
        scn = small_city_scenario(seed=23, k=1)
        cov = build_coverage_map(scn.base_stations[0], scn.city, params, border_samples=64)
        from skypath.coverage import _boundary_items

        items = _boundary_items(cov.sectors)
        total = sum(
            it[3] * it[2] if it[0] == "arc" else abs(it[3] - it[2]) for it in items
        )
        # walking distance between consecutive points equals total/Q; chord
        # distance can only be shorter
        chords = np.hypot(*(np.diff(np.vstack([cov.border_points,
                                               cov.border_points[:1]]), axis=0).T))
        assert (chords <= total / 64 + 1e-6).all()

    def test_border_points_meet_threshold(self, params):
        scn = small_city_scenario(seed=29, k=3)
        for bs_c in scn.base_stations:
            cov = build_coverage_map(bs_c, scn.city, params)
            if cov.border_count == 0:
                continue
            vals = snr_per_station(cov.border_points, bs_c, params, scn.city)
            assert (vals >= params.snr_threshold * (1 - 1e-3)).all()

    def test_empty_coverage_empty_border(self, params):
        harsh = default_radio_params(snr_threshold_db=80.0)
        bs_c = BaseStation(id=1, position=Point3(100.0, 100.0, harsh.bs_height))
        city = CityMap(200, 200, ())
        cov = build_coverage_map(bs_c, city, harsh)
        assert cov.is_empty and cov.border_count == 0


class TestCommonBorders:
    def test_identical_maps_share_all_points(self, params, empty_city):
        a = build_coverage_map(BaseStation(1, Point3(1000, 1000, 20.0)), empty_city, params)
        b = build_coverage_map(BaseStation(2, Point3(1000, 1000, 20.0)), empty_city, params)
        cb = common_border_points(a, b)
        assert cb.points.shape[0] == a.border_count + b.border_count

    def test_distant_disks_share_nothing(self, params, empty_city):
        a = build_coverage_map(BaseStation(1, Point3(200, 200, 20.0)), empty_city, params)
        b = build_coverage_map(BaseStation(2, Point3(1800, 1800, 20.0)), empty_city, params)
        assert common_border_points(a, b).points.shape[0] == 0

    def test_lens_point_count_matches_circle_geometry(self, params, empty_city):
        gap = 800.0
        a = build_coverage_map(BaseStation(1, Point3(600, 1000, 20.0)), empty_city, params,
                               border_samples=256)
        b = build_coverage_map(BaseStation(2, Point3(1400, 1000, 20.0)), empty_city, params,
                               border_samples=256)
        cb = common_border_points(a, b)
        r = R_LOS - RADIUS_SAFETY
        # arc fraction of one circle inside the other: half-angle of the lens
        half_angle = math.acos(gap / (2 * r))
        expect = 2 * 256 * (half_angle / math.pi)
        assert cb.points.shape[0] == pytest.approx(expect, abs=6)

    def test_all_points_pass_both_coverage_tests(self, params):
        scn = small_city_scenario(seed=31, k=4)
        maps, commons = build_all_coverage(scn)
        for (k, j), cb in commons.items():
            assert points_in_coverage(cb.points, maps[k]).all()
            assert points_in_coverage(cb.points, maps[j]).all()


class TestNetworkCovered:
    def test_fan_blocking_matches_generic_path_across_wrap(self, params):
        # building due east of the station: its subtended span straddles
        # azimuth zero, exercising the wrapped range split
        from skypath.coverage import fan_blocked
        from skypath.geometry import segments_clear_buildings

        city = CityMap(2000, 2000, (Building(1100.0, 1160.0, 960.0, 1040.0, 55.0),))
        bs_c = BaseStation(id=1, position=Point3(1000.0, 1000.0, params.bs_height))
        rng = np.random.default_rng(21)
        pts = rng.uniform(0, 2000, size=(3000, 2))
        fan = fan_blocked(bs_c.xy, pts, city, params)
        p0 = np.column_stack([pts, np.full(len(pts), params.uav_altitude)])
        p1 = np.array([1000.0, 1000.0, params.bs_height])
        generic = ~segments_clear_buildings(p0, p1, city)
        np.testing.assert_array_equal(fan, generic)

    def test_matches_explicit_max_snr(self, params):
        scn = small_city_scenario(seed=37, k=5)
        rng = np.random.default_rng(4)
        pts = rng.uniform(0, 800, size=(2500, 2))
        fast = network_covered(pts, scn)
        slow = direct_snr_max(pts, scn) >= params.snr_threshold
        np.testing.assert_array_equal(fast, slow)

    def test_no_stations_means_uncovered(self):
        scn = open_field_scenario([(1000, 1000)])
        scn2 = scn.with_base_stations(())
        pts = np.array([[1000.0, 1000.0]])
        assert network_covered(pts, scn2)[0] == False  # noqa: E712
