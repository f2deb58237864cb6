"""
Unit Tests for Erasure Analytics and Rate Regions

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import pytest
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analytics.erasure_analytics import (
    MIN_CUT, MONOTONE_RATE, TARGET_RPER, PathProfile, achievable_rate, binomial_lower_tail,
    hop_reliability, intermediate_targets_met, rate_drop, reliability_nc, reliability_uncoded,
    residual_erasure, rper_single_hop, theorem1_region_check,
)
from src.analytics.rate_region import (
    CSV_COLUMNS, GridSpec, RateRegionGrid, RegionCell, block_lengths, evaluate_cell, rate_region_grid,
    summarize_region,
)
from src.coding.models import CodeParams


class TestRper:
    """Test single-hop residual erasure rates."""

    def test_smallest_code(self):
        """(k=1, n=2, delta=0.5): lost only when both packets are erased."""
        assert rper_single_hop(CodeParams(k=1, n=2), 0.5) == pytest.approx(0.25)

    def test_edge_rates(self):
        """Perfect and dead links."""
        params = CodeParams(k=50, n=60)
        assert rper_single_hop(params, 0.0) == 0.0
        assert rper_single_hop(params, 1.0) == 1.0

    def test_uncoded_is_raw_erasure(self):
        """With n = k nothing can replace a lost packet."""
        assert rper_single_hop(CodeParams(k=10, n=10), 0.2) == pytest.approx(0.2)

    @pytest.mark.parametrize("n,expected", [
        (56, 0.04756), (58, 0.02066), (60, 0.006659), (62, 0.001655), (64, 0.000329),
    ])
    def test_reference_values_delta_010(self, n, expected):
        """k=50 over a 10% link."""
        assert rper_single_hop(CodeParams(k=50, n=n), 0.1) == pytest.approx(expected, rel=5e-3)

    @pytest.mark.parametrize("n,expected", [
        (56, 0.1278), (59, 0.0768), (61, 0.0426), (64, 0.01221),
    ])
    def test_reference_values_delta_015(self, n, expected):
        """k=50 over a 15% link."""
        assert rper_single_hop(CodeParams(k=50, n=n), 0.15) == pytest.approx(expected, rel=5e-3)

    def test_out_of_range_delta(self):
        """Erasure rate must be a probability."""
        with pytest.raises(ValueError):
            rper_single_hop(CodeParams(k=2, n=3), 1.5)

    @given(n=st.integers(50, 120), delta=st.floats(0.01, 0.6))
    def test_more_redundancy_never_hurts(self, n, delta):
        """eta is nonincreasing in n."""
        assert rper_single_hop(CodeParams(k=50, n=n + 1), delta) <= rper_single_hop(CodeParams(k=50, n=n), delta) + 1e-15

    @given(delta=st.floats(0.0, 1.0))
    def test_never_worse_than_uncoded(self, delta):
        """eta <= delta."""
        assert rper_single_hop(CodeParams(k=20, n=25), delta) <= delta + 1e-15

    def test_binomial_tail_bounds(self):
        """Degenerate thresholds."""
        assert binomial_lower_tail(10, 0.5, 0) == 0.0
        assert binomial_lower_tail(10, 0.5, 11) == 1.0
        assert binomial_lower_tail(2, 0.5, 1) == pytest.approx(0.25)


class TestPathReliability:
    """Test multi-hop reliability and the rate region inequalities."""

    def test_two_hop_small_code(self):
        """rho = (1 - 0.25)^2 and R = r * rho."""
        params = CodeParams(k=1, n=2)
        path = PathProfile(deltas=(0.5, 0.5))
        assert reliability_nc(params, path, 2) == pytest.approx(0.5625)
        assert achievable_rate(params, path, 2) == pytest.approx(0.28125)

    def test_uncoded_reliability(self):
        """Uncoded reliability is the product of link survival."""
        path = PathProfile.homogeneous(0.1, 20)
        assert reliability_uncoded(path, 2) == pytest.approx(0.81)
        assert reliability_uncoded(path, 20) == pytest.approx(0.1216, abs=1e-4)

    def test_heterogeneous_path(self):
        """Each link contributes its own eta."""
        params = CodeParams(k=10, n=12)
        path = PathProfile(deltas=(0.05, 0.2))
        expected = (1 - rper_single_hop(params, 0.05)) * (1 - rper_single_hop(params, 0.2))
        assert reliability_nc(params, path, 2) == pytest.approx(expected)

    def test_hop_out_of_range(self):
        """h must lie within the path."""
        path = PathProfile.homogeneous(0.1, 3)
        with pytest.raises(ValueError):
            reliability_nc(CodeParams(k=2, n=3), path, 4)
        with pytest.raises(ValueError):
            reliability_uncoded(path, 0)

    def test_invalid_path(self):
        """Empty paths and bad rates are rejected."""
        with pytest.raises(ValueError):
            PathProfile(deltas=())
        with pytest.raises(ValueError):
            PathProfile(deltas=(0.1, -0.2))
        with pytest.raises(ValueError):
            PathProfile(deltas=(0.1,), labels=('a', 'b'))

    def test_hop_profile_is_monotone(self):
        """Reliability and rate only decrease along the path."""
        profile = hop_reliability(CodeParams(k=50, n=60), PathProfile(deltas=(0.1, 0.05, 0.2, 0.1)))
        assert all(a >= b for a, b in zip(profile.cumulative_rho, profile.cumulative_rho[1:]))
        assert all(a >= b for a, b in zip(profile.rates, profile.rates[1:]))
        assert all(0 <= eta <= 1 for eta in profile.cumulative_eta)

    def test_region_point_inside(self):
        """The achievable rate itself satisfies all three inequalities."""
        params = CodeParams(k=50, n=60)
        path = PathProfile.homogeneous(0.1, 2)
        rate = achievable_rate(params, path, 2)
        check = theorem1_region_check(params, path, 3, rate, eta0=0.05)
        assert check.satisfies
        assert check.violated == []

    def test_region_min_cut_violation(self):
        """A rate above the link capacity breaks the min-cut bound."""
        params = CodeParams(k=50, n=60)
        path = PathProfile.homogeneous(0.1, 2)
        check = theorem1_region_check(params, path, 2, 0.95, eta0=0.05)
        assert MIN_CUT in check.violated
        assert MONOTONE_RATE in check.violated

    def test_region_target_violation(self):
        """Too little redundancy misses the residual erasure target."""
        params = CodeParams(k=50, n=52)
        path = PathProfile.homogeneous(0.15, 2)
        check = theorem1_region_check(params, path, 3, 0.1, eta0=0.05)
        assert TARGET_RPER in check.violated
        assert check.bounds['eta_m'] > 0.05

    def test_region_vertex_range(self):
        """The receiver vertex must be in [2, hops + 1]."""
        params = CodeParams(k=5, n=6)
        path = PathProfile.homogeneous(0.1, 2)
        with pytest.raises(ValueError):
            theorem1_region_check(params, path, 1, 0.5, 0.05)
        with pytest.raises(ValueError):
            theorem1_region_check(params, path, 4, 0.5, 0.05)

    def test_intermediate_receivers_follow_sink(self):
        """Meeting the target at the sink implies it upstream."""
        params = CodeParams(k=50, n=62)
        assert intermediate_targets_met(params, PathProfile.homogeneous(0.1, 4), eta0=0.05)

    def test_zero_target_needs_lossless_links(self):
        """eta0 = 0 rejects any lossy path even when eta^m is far below epsilon."""
        params = CodeParams(k=50, n=100)
        path = PathProfile(deltas=(0.05, 0.05))
        rate = achievable_rate(params, path, 2)
        check = theorem1_region_check(params, path, 3, rate, eta0=0.0)

        assert TARGET_RPER in check.violated
        assert 0.0 < check.bounds['eta_m'] < 1e-30
        assert check.bounds['rate_drop'] > 0.0
        assert residual_erasure(params, path, 2) > 0.0
        assert rate_drop(params, path, 2) > 0.0
        assert hop_reliability(params, path).cumulative_eta[-1] > 0.0

    def test_lossless_path_keeps_full_rate(self):
        """With every delta = 0, R^m = R^{m-1} = r and eta0 = 0 is met."""
        params = CodeParams(k=10, n=12)
        path = PathProfile(deltas=(0.0, 0.0, 0.0))
        r = float(params.r)
        for h in range(1, 4):
            assert achievable_rate(params, path, h) == r
            assert rate_drop(params, path, h) == 0.0
            assert residual_erasure(params, path, h) == 0.0
        check = theorem1_region_check(params, path, 4, r, eta0=0.0)
        assert check.satisfies

    def test_uncoded_code_sits_on_min_cut(self):
        """n = k gives R = 1 - delta, which lies on the min-cut bound."""
        params = CodeParams(k=10, n=10)
        path = PathProfile(deltas=(0.3,))
        rate = achievable_rate(params, path, 1)
        check = theorem1_region_check(params, path, 2, rate, eta0=0.31)
        assert rate == pytest.approx(0.7)
        assert check.satisfies

    def test_dead_link_erases_everything(self):
        """A link with delta = 1 ends the path."""
        params = CodeParams(k=5, n=8)
        path = PathProfile(deltas=(0.1, 1.0, 0.1))
        assert residual_erasure(params, path, 2) == 1.0
        assert residual_erasure(params, path, 3) == 1.0
        assert rate_drop(params, path, 3) == 0.0
        assert hop_reliability(params, path).cumulative_eta[1:] == [1.0, 1.0]


link_delta = st.one_of(st.just(0.0), st.floats(min_value=1e-3, max_value=0.6))


class TestRegionInequalities:
    """Randomized checks of the rate-region inequalities and the rate drop per link."""

    @settings(max_examples=1000, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=60),
        extra=st.floats(min_value=0.0, max_value=1.0),
        deltas=st.lists(link_delta, min_size=1, max_size=5),
        data=st.data(),
    )
    def test_achievable_rate_is_inside_region(self, k, extra, deltas, data):
        """(R^m, eta^m) satisfies all three inequalities at every receiver."""
        params = CodeParams(k=k, n=k + int(round(extra * k)))
        path = PathProfile(deltas=tuple(deltas))
        m = data.draw(st.integers(min_value=2, max_value=path.hops + 1))

        rate = achievable_rate(params, path, m - 1)
        eta_m = residual_erasure(params, path, m - 1)
        check = theorem1_region_check(params, path, m, rate, eta0=eta_m)

        assert check.satisfies, check.violated
        assert 0.0 <= eta_m <= 1.0

    @settings(max_examples=1000, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=60),
        extra=st.floats(min_value=0.0, max_value=1.0),
        deltas=st.lists(link_delta, min_size=1, max_size=5),
    )
    def test_rate_drops_exactly_on_lossy_links(self, k, extra, deltas):
        """R^h = R^{h-1} iff eta_h = 0; otherwise R^h < R^{h-1}."""
        params = CodeParams(k=k, n=k + int(round(extra * k)))
        path = PathProfile(deltas=tuple(deltas))
        profile = hop_reliability(params, path)

        previous = float(params.r)
        for h in range(1, path.hops + 1):
            eta_h = rper_single_hop(params, path.delta(h))
            drop = rate_drop(params, path, h)
            rate = achievable_rate(params, path, h)
            assert (drop > 0.0) == (eta_h > 0.0)
            assert profile.rate_drops[h - 1] == pytest.approx(drop)
            if eta_h == 0.0:
                assert rate == previous
            else:
                assert rate <= previous
            previous = rate

        all_lossless = all(d == 0.0 for d in path.deltas)
        assert (residual_erasure(params, path, path.hops) == 0.0) == all_lossless


class TestRateRegion:
    """Test two-hop rate region grids."""

    def test_block_lengths(self):
        """Candidate n cover the rate window."""
        lengths = block_lengths(50, (0.5, 1.0))
        assert lengths[0] == 50
        assert lengths[-1] == 100
        with pytest.raises(ValueError):
            block_lengths(50, (0.99, 0.995))

    def test_grid_axis(self):
        """The axis runs from 0 to max_delta inclusive."""
        axis = GridSpec(max_delta=0.5, step=0.1).axis()
        assert len(axis) == 6
        assert axis[0] == 0.0
        assert axis[-1] == pytest.approx(0.5)

    def test_coarse_grid_properties(self):
        """Re-encoding dominates end-to-end coding and both regions are symmetric."""
        grid = GridSpec(max_delta=0.5, step=0.05)
        nc = rate_region_grid('nc', 50, eta0=0.05, grid=grid)
        e2e = rate_region_grid('e2e', 50, eta0=0.05, grid=grid)

        assert (e2e.feasible_mask() <= nc.feasible_mask()).all()
        nc_summary = summarize_region(nc, baseline=e2e)
        assert nc_summary.symmetric
        assert summarize_region(e2e).symmetric
        assert nc_summary.area_ratio >= 1.0
        assert nc_summary.feasible_cells > summarize_region(e2e).feasible_cells

    def test_frame_columns(self):
        """Tables carry the documented columns."""
        grid = GridSpec(max_delta=0.2, step=0.1)
        frame = rate_region_grid('nc', 10, grid=grid).to_frame()
        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 9

    def test_unknown_scheme(self):
        """Only the two schemes exist."""
        with pytest.raises(ValueError):
            rate_region_grid('forward', 10, grid=GridSpec(max_delta=0.1, step=0.1))

    def test_single_cell_matches_grid(self):
        """evaluate_cell agrees with the grid cell at the same erasure rates."""
        grid = rate_region_grid('nc', 50, grid=GridSpec(max_delta=0.3, step=0.1))
        for scheme_grid in (grid, rate_region_grid('e2e', 50, grid=GridSpec(max_delta=0.3, step=0.1))):
            cell = evaluate_cell(scheme_grid.scheme, 50, 0.1, 0.2)
            expected = scheme_grid.cells[1][2]
            assert (cell.feasible, cell.best_n) == (expected.feasible, expected.best_n)

    def test_single_cell_asymmetric_links(self):
        """Swapping the links leaves the cell unchanged; a worse link never helps."""
        forward = evaluate_cell('nc', 50, 0.1, 0.3)
        assert evaluate_cell('nc', 50, 0.3, 0.1).best_n == forward.best_n
        assert evaluate_cell('nc', 50, 0.1, 0.1).best_n <= forward.best_n
        assert not evaluate_cell('e2e', 50, 0.5, 0.5).feasible

    def test_single_cell_rejects_bad_input(self):
        """Unknown schemes and erasure rates outside [0, 1] are refused."""
        with pytest.raises(ValueError):
            evaluate_cell('forward', 50, 0.1, 0.1)
        with pytest.raises(ValueError):
            evaluate_cell('nc', 50, 0.1, 1.5)

    def test_product_mismatch_on_corner(self):
        """A single missing corner of the product set is reported as on the edge."""
        mask = np.ones((4, 4), dtype=bool)
        mask[3:, :] = False
        mask[:, 3:] = False
        mask[2, 2] = False
        summary = summarize_region(_region_from_mask(mask))

        assert summary.product_mismatch_cells == [(pytest.approx(0.2), pytest.approx(0.2))]
        assert summary.mismatches_on_edge
        assert summary.rectangularity == pytest.approx(8 / 9)

    def test_product_mismatch_inside(self):
        """A hole away from the boundary is not an edge effect."""
        mask = np.ones((5, 5), dtype=bool)
        mask[1, 1] = False
        summary = summarize_region(_region_from_mask(mask))

        assert len(summary.product_mismatch_cells) == 1
        assert not summary.mismatches_on_edge

    def test_product_set_region(self):
        """An exact product set has no mismatches."""
        mask = np.zeros((4, 4), dtype=bool)
        mask[:3, :2] = True
        summary = summarize_region(_region_from_mask(mask))

        assert summary.product_mismatch_cells == []
        assert summary.mismatches_on_edge
        assert summary.rectangularity == 1.0


def _region_from_mask(mask: np.ndarray) -> RateRegionGrid:
    axis = np.round(np.arange(mask.shape[0]) * 0.1, 10)
    cells = [[RegionCell(feasible=bool(value)) for value in row] for row in mask]
    return RateRegionGrid(scheme='nc', k=50, q=8, eta0=0.05, rate_window=(0.5, 1.0),
                          delta1_axis=axis, delta2_axis=axis, cells=cells)
