"""Tests for branch-set scanning, box dimension, and measure at scale."""

import numpy as np
import pytest

from qvlab.branch import (
    UndefinedDimensionError,
    box_counts,
    box_dimension,
    dimension_report,
    measure_at_scale,
    scan,
)
from qvlab.constructions import (
    CantorConstruction,
    cantor_level,
    cantor_limit,
    fat_residual_length,
    make_double_line,
    sin_sampled,
)
from qvlab.func1d import PiecewiseAffineQ


class TestScan:
    def test_double_line_has_no_flags(self):
        sc = scan(make_double_line(0.0, 1.0), 101)
        assert np.all(sc.sigma == 1)
        assert not sc.flags.any()

    def test_sin_flags_hug_the_origin(self):
        u = sin_sampled(4097)
        for grid in (401, 1601):
            sc = scan(u, grid)
            flagged = sc.flagged_points()
            assert flagged.size > 0
            assert np.abs(flagged).max() < 0.02

    def test_sin_flag_zone_shrinks_with_grid(self):
        u = sin_sampled(4097)
        spans = []
        for grid in (201, 801, 3201):
            flagged = scan(u, grid).flagged_points()
            spans.append(np.abs(flagged).max())
        assert spans[2] <= spans[0] + 1e-12

    def test_collision_set_matches_construction(self):
        level = 6
        spec = CantorConstruction(level, "diamond")
        u = cantor_level(spec)
        sc = scan(u, 3**level + 1)
        cell = 3.0**-level
        kept = spec.kept_intervals()
        collapsed = sc.collapsed_mask()
        for x, hit in zip(sc.grid, collapsed):
            dist = min(max(a - x, 0.0, x - b) for a, b in kept)
            if hit:
                assert dist <= cell + 1e-12
            else:
                assert dist > 0

    def test_limit_flags_near_kept_set(self):
        approx, _ = cantor_limit("diamond", 7)
        spec = CantorConstruction(7, "diamond")
        sc = scan(approx, 3**7 + 1)
        cell = 3.0**-7
        kept = spec.kept_intervals()
        for x in sc.flagged_points():
            dist = min(max(a - x, 0.0, x - b) for a, b in kept)
            assert dist <= cell + 1e-12
        # every interior kept grid point is flagged: removed material sits
        # within one cell.  The domain endpoints see none inside their window.
        collapsed = sc.collapsed_mask()
        assert np.all(sc.flags[1:-1][collapsed[1:-1]])

    def test_grid_refinement_moves_flags_by_at_most_one_cell(self):
        u = cantor_level(CantorConstruction(5, "diamond"))
        coarse = scan(u, 3**5 + 1)
        fine = scan(u, 3**6 + 1)
        cell = 3.0**-5
        coarse_pts = coarse.flagged_points()
        for x in fine.flagged_points():
            assert np.abs(coarse_pts - x).min() <= cell + 1e-12

    def test_translation_invariance(self):
        u = cantor_level(CantorConstruction(3, "diamond"))
        shifted = PiecewiseAffineQ(u.breakpoints, u.branches + 7.25)
        a = scan(u, 244)
        b = scan(shifted, 244)
        assert np.array_equal(a.sigma, b.sigma)
        assert np.array_equal(a.flags, b.flags)

    def test_grid_size_guard(self):
        with pytest.raises(ValueError):
            scan(make_double_line(0.0, 1.0), 2)

    def test_csv_export(self, tmp_path):
        sc = scan(sin_sampled(257), 101)
        path = tmp_path / "scan.csv"
        sc.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "x,sigma,flagged"
        assert len(lines) == 102


class TestBoxDimension:
    def test_single_point_dimension_zero(self):
        u = sin_sampled(257)
        sc = scan(u, 401)
        # keep exactly one flagged point
        keep = np.zeros_like(sc.flags)
        keep[np.flatnonzero(sc.flags)[0]] = True
        single = type(sc)(grid=sc.grid, sigma=sc.sigma, flags=keep, tol=sc.tol, q_count=sc.q_count)
        assert box_dimension(single, [0.1, 0.01, 0.001]) == pytest.approx(0.0, abs=1e-12)

    def test_full_interval_dimension_one(self):
        u = make_double_line(0.0, 1.0)
        sc = scan(u, 2001)
        full = type(sc)(grid=sc.grid, sigma=sc.sigma, flags=np.ones_like(sc.flags), tol=sc.tol, q_count=1)
        # finer scales keep the +1 edge-box bias negligible
        slope = box_dimension(full, [0.03, 0.01, 0.003, 0.001])
        assert slope == pytest.approx(1.0, abs=0.02)

    def test_cantor_dimension_in_range(self):
        approx, _ = cantor_limit("diamond", 7)
        sc = scan(approx, 3**7 + 1)
        slope = box_dimension(sc, [3.0**-k for k in range(2, 7)])
        assert 0.55 <= slope <= 0.70

    def test_empty_flags_error(self):
        sc = scan(make_double_line(0.0, 1.0), 101)
        with pytest.raises(UndefinedDimensionError):
            box_counts(sc, [0.1])

    def test_report_fields(self):
        approx, _ = cantor_limit("diamond", 5)
        sc = scan(approx, 3**5 + 1)
        rep = dimension_report(sc, [3.0**-k for k in range(1, 5)])
        assert rep.counts.size == 4
        assert 0.0 <= rep.r_squared <= 1.0
        payload = rep.to_json_dict()
        assert set(payload) == {"scales", "counts", "slope", "r_squared"}


class TestMeasureAtScale:
    def test_empty_set(self):
        sc = scan(make_double_line(0.0, 1.0), 101)
        assert measure_at_scale(sc, 0.05) == 0.0

    def test_ternary_measure_decreases(self):
        vals = []
        for level in (3, 5, 7):
            sc = scan(cantor_level(CantorConstruction(level, "diamond")), 3**level + 1)
            vals.append(measure_at_scale(sc, 3.0**-level))
        assert vals[0] > vals[1] > vals[2]

    def test_fat_measure_bounded_below(self):
        fat, _ = cantor_limit("diamond", 6, schedule="fat")
        sc = scan(fat, 2049)
        m = measure_at_scale(sc, 0.01)
        assert m >= fat_residual_length(6) - 0.05

    def test_eps_below_grid_spacing_rejected(self):
        sc = scan(make_double_line(0.0, 1.0), 101)
        with pytest.raises(ValueError):
            measure_at_scale(sc, 1e-4)
