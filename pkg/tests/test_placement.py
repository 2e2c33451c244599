import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from airs.beamform import design_phases, optimal_phases_single, snr_reduced
from airs.placement import (
    cubic_stationary_points,
    loss_ratio,
    loss_ratio_d1,
    loss_ratio_d2,
    placement_line_search,
    single_location_placement,
    single_location_ratio,
    single_location_snr,
    solve_depressed_cubic,
    worst_case_snr,
)
from airs.scenario import AreaGrid, ConfigError, GroundPoint, Placement, ScenarioConfig, make_grid


def brute_minimisers(rho, step=1e-4):
    xi = np.arange(-0.5, 1.5 + step / 2, step)
    f = (xi**2 + rho**2) * ((xi - 1) ** 2 + rho**2)
    return xi, f


class TestDepressedCubic:
    @pytest.mark.parametrize("a, b", [(1.0, 2.0), (-3.0, 1.0), (-3.0, 2.0), (0.0, 0.0), (-0.24, 0.0), (2.5, -7.0)])
    def test_against_companion_matrix(self, a, b):
        roots, _ = solve_depressed_cubic(a, b)
        ref = np.roots([1.0, 0.0, a, b])
        real = sorted({round(r.real, 6) for r in ref if abs(r.imag) < 1e-6})
        np.testing.assert_allclose(roots, real, atol=1e-6)
        for z in roots:
            assert z**3 + a * z + b == pytest.approx(0.0, abs=1e-9)

    def test_cases(self):
        assert solve_depressed_cubic(1.0, 0.0)[1] == "one_real"
        assert solve_depressed_cubic(0.0, 0.0)[1] == "repeated"
        assert solve_depressed_cubic(-1.0, 0.0)[1] == "three_real"


class TestCubicStationaryPoints:
    def test_high_ratio_single_minimum(self):
        assert cubic_stationary_points(1.0) == [(0.5, "min")]

    def test_critical_triple_root(self):
        pts = cubic_stationary_points(0.5)
        assert len(pts) == 1
        assert pts[0].xi == 0.5 and pts[0].kind == "min"

    def test_low_ratio_three_points(self):
        pts = cubic_stationary_points(0.1)
        r = math.sqrt(0.24)
        np.testing.assert_allclose([p.xi for p in pts], [0.5 - r, 0.5, 0.5 + r], atol=1e-14)
        assert [p.kind for p in pts] == ["min", "max", "min"]
        # independent check: objective values and derivative sign changes
        f = [loss_ratio(p.xi, 0.1) for p in pts]
        assert f[0] < f[1] and f[2] < f[1]
        h = 1e-4
        assert loss_ratio_d1(pts[0].xi - h, 0.1) < 0 < loss_ratio_d1(pts[0].xi + h, 0.1)
        assert loss_ratio_d1(pts[1].xi - h, 0.1) > 0 > loss_ratio_d1(pts[1].xi + h, 0.1)

    @given(st.floats(min_value=1e-3, max_value=3.0))
    def test_roots_are_stationary(self, rho):
        for p in cubic_stationary_points(rho):
            assert abs(loss_ratio_d1(p.xi, rho)) <= 1e-10

    @given(st.floats(min_value=1e-3, max_value=3.0))
    def test_minima_agree_with_closed_form(self, rho):
        minima = [p.xi for p in cubic_stationary_points(rho) if p.kind == "min"]
        np.testing.assert_allclose(minima, single_location_ratio(rho).roots, atol=2e-3)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            cubic_stationary_points(0.0)


class TestSingleLocationRatio:
    def test_high(self):
        sol = single_location_ratio(0.6)
        assert sol.roots == (0.5,) and sol.regime == "high"

    def test_critical(self):
        assert single_location_ratio(0.5).regime == "critical"

    def test_low(self):
        sol = single_location_ratio(0.1)
        assert sol.regime == "low"
        np.testing.assert_allclose(sol.roots, [0.010102051443364402, 0.9898979485566356], rtol=1e-13)
        xi, f = brute_minimisers(0.1)
        left = xi < 0.5
        assert xi[left][np.argmin(f[left])] == pytest.approx(sol.roots[0], abs=1e-4)
        assert xi[~left][np.argmin(f[~left])] == pytest.approx(sol.roots[1], abs=1e-4)

    def test_limit_small_rho(self):
        np.testing.assert_allclose(single_location_ratio(1e-6).roots, [0.0, 1.0], atol=1e-11)

    @given(st.floats(min_value=1e-4, max_value=2.0))
    def test_second_order_conditions(self, rho):
        for xi in single_location_ratio(rho).roots:
            assert loss_ratio_d2(xi, rho) >= -1e-12
            assert abs(loss_ratio_d1(xi, rho)) <= 1e-10

    @given(st.floats(min_value=-2, max_value=3), st.floats(min_value=1e-3, max_value=2))
    def test_objective_symmetry(self, xi, rho):
        assert loss_ratio(xi, rho) == pytest.approx(loss_ratio(1 - xi, rho), rel=1e-12)

    def test_off_axis_never_helps(self):
        rng = np.random.default_rng(3)
        H, target = 100.0, np.array([800.0, 300.0])
        u = target / np.linalg.norm(target)
        perp = np.array([-u[1], u[0]])

        def f2(q):
            return (H**2 + np.sum((q - target) ** 2)) * (H**2 + np.sum(q**2))

        for _ in range(200):
            on_line = rng.uniform(-0.5, 1.5) * target
            off = on_line + rng.uniform(-500, 500) * perp
            assert f2(off) >= f2(on_line)


class TestSingleLocationPlacement:
    def test_default_scenario(self, cfg):
        target = GroundPoint(1000, 0)
        cfg140 = cfg.replace(irs_elements=140)
        q, snr_db = single_location_placement(cfg140, target)
        assert q[0] == pytest.approx(10.102051443364402, rel=1e-12) and q[1] == 0
        assert snr_db == pytest.approx(4.963760540124008, abs=1e-9)
        q_far, snr_far = single_location_placement(cfg140, target, branch="far")
        assert q_far[0] == pytest.approx(989.8979485566356, rel=1e-12)
        assert snr_far == pytest.approx(snr_db, abs=1e-9)
        # concatenated loss equals H^2 D^2 at either optimum
        H2 = cfg.altitude_m**2
        f2 = (H2 + (q[0] - 1000) ** 2) * (H2 + q[0] ** 2)
        assert f2 == pytest.approx(1e10, rel=1e-12)

    def test_midpoint_needs_about_366_elements(self, cfg):
        mid = Placement(500, 0)
        target = GroundPoint(1000, 0)
        snr = lambda n: 10 * math.log10(single_location_snr(cfg.replace(irs_elements=n), mid, target))
        assert snr(365) < 5 <= snr(366)

    def test_high_ratio_midpoint(self):
        cfg = ScenarioConfig(altitude_m=600)
        q, _ = single_location_placement(cfg, GroundPoint(1000, 0))
        assert q == (500.0, 0.0)

    def test_off_axis_target(self, cfg):
        target = GroundPoint(600, 800)
        q, snr_db = single_location_placement(cfg, target)
        xi = single_location_ratio(0.1).roots[0]
        assert q[0] == pytest.approx(600 * xi) and q[1] == pytest.approx(800 * xi)

    def test_closed_form_matches_phase_design(self, cfg):
        target = GroundPoint(1000, 0)
        q, snr_db = single_location_placement(cfg, target)
        via_phases = snr_reduced(cfg, q, optimal_phases_single(cfg, q, target), target)
        assert 10 * math.log10(via_phases) == pytest.approx(snr_db, abs=1e-9)

    def test_rejects_source_location(self, cfg):
        with pytest.raises(ConfigError):
            single_location_placement(cfg, GroundPoint(0, 0))


class TestWorstCase:
    def test_singleton_grid(self, cfg):
        q, w = Placement(100, 0), GroundPoint(1200, 50)
        phases = optimal_phases_single(cfg, q, cfg.area_center)
        snr_db, at = worst_case_snr(cfg, q, phases, AreaGrid.from_points([w]))
        assert at == w
        assert snr_db == pytest.approx(10 * math.log10(snr_reduced(cfg, q, phases, w)), abs=1e-12)

    def test_adding_points_never_raises_min(self, cfg, grid):
        q = Placement(400, 0)
        phases = design_phases(cfg, q, grid)
        full, _ = worst_case_snr(cfg, q, phases, grid)
        rng = np.random.default_rng(11)
        for _ in range(5):
            idx = np.sort(rng.choice(len(grid), 200, replace=False))
            sub = AreaGrid(grid.x[idx].copy(), grid.y[idx].copy())
            assert worst_case_snr(cfg, q, phases, sub)[0] >= full

    def test_refined_grid_not_larger(self, cfg):
        q = Placement(0, 0)
        coarse = make_grid(cfg, 11, 7)
        fine = make_grid(cfg, 21, 13)  # contains every coarse lattice point
        for p in coarse:
            assert p in fine
        phases = design_phases(cfg, q, coarse)
        assert worst_case_snr(cfg, q, phases, fine)[0] <= worst_case_snr(cfg, q, phases, coarse)[0]


class TestLineSearch:
    def test_point_area_matches_closed_form(self):
        cfg = ScenarioConfig(area_length_m=0, area_width_m=0)
        grid = make_grid(cfg)
        res = placement_line_search(cfg, grid, (0, 1000), 10.0)
        xi = single_location_ratio(cfg.altitude_m / 1000).roots[0]
        assert abs(res.placement[0] - xi * 1000) <= 10.0
        _, snr_db = single_location_placement(cfg, cfg.area_center)
        assert res.worst_snr_db <= snr_db + 1e-9
        assert res.worst_snr_db == pytest.approx(snr_db, abs=0.01)

    def test_result_consistency(self, solved):
        assert solved.worst_snr_db == pytest.approx(solved.snr_map.min())
        i = solved.grid.index_of(solved.worst_point)
        assert solved.snr_map[i] == solved.worst_snr_db
        assert solved.search_worst_db.max() == solved.worst_snr_db
        assert np.linalg.norm(solved.tx_beam) == pytest.approx(1.0)

    def test_halving_step_never_worse(self, cfg, grid):
        coarse = placement_line_search(cfg, grid, (0, 200), 20.0)
        fine = placement_line_search(cfg, grid, (0, 200), 10.0)
        assert fine.worst_snr_db >= coarse.worst_snr_db - 1e-12

    def test_tie_breaks_to_smaller_x(self):
        cfg = ScenarioConfig(area_length_m=0, area_width_m=0)
        res = placement_line_search(cfg, make_grid(cfg), (500 - 40, 500 + 40), 40.0)
        # 460 and 540 mirror each other about the midpoint of the source-target segment
        assert res.placement[0] == 460.0

    def test_rejects_bad_range(self, cfg, grid):
        with pytest.raises(ValueError):
            placement_line_search(cfg, grid, (100, 0), 10.0)
        with pytest.raises(ValueError):
            placement_line_search(cfg, grid, (0, 100), 0.0)

    @pytest.mark.parametrize("field, delta", [("irs_elements", 100), ("tx_power_dbm", 5.0)])
    def test_monotone_in_resources(self, cfg, field, delta):
        small = cfg.replace(area_length_m=200, area_width_m=100, grid_nx=9, grid_ny=5)
        bigger = small.replace(**{field: getattr(small, field) + delta})
        a = placement_line_search(small, make_grid(small), (0, 500), 25.0)
        b = placement_line_search(bigger, make_grid(bigger), (0, 500), 25.0)
        assert b.worst_snr_db >= a.worst_snr_db
        if field == "tx_power_dbm":
            assert b.worst_snr_db - a.worst_snr_db == pytest.approx(delta, abs=1e-9)

    def test_monotone_in_elements_full_array(self):
        # a point area keeps the full array at every N, where the gain grows as N^2
        cfg = ScenarioConfig(area_length_m=0, area_width_m=0)
        grid = make_grid(cfg)
        values = [
            placement_line_search(cfg.replace(irs_elements=n), grid, (0, 1000), 50.0).worst_snr_db
            for n in (20, 50, 100, 200, 400)
        ]
        assert values == sorted(values)

    @pytest.mark.xfail(
        strict=True,
        reason="sub-array heuristic: more elements narrow the beam and force more sub-arrays; "
        "defaults give -8.03 dB at N=100 but -10.89 dB at N=200",
    )
    def test_monotone_in_elements_default_area(self, cfg, grid):
        a = placement_line_search(cfg.replace(irs_elements=100), grid)
        b = placement_line_search(cfg.replace(irs_elements=200), grid)
        assert b.worst_snr_db >= a.worst_snr_db
