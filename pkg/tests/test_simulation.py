"""
Unit Tests for the Monte-Carlo Oracle

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import math
import pytest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analytics.erasure_analytics import PathProfile
from src.coding.snc_codec import PartialPolicy
from src.simulation.mc_oracle import (
    RANK_BLOCK, CompareMode, RelayMode, SimConfig, SimEngine, SimEstimate, analytic_expectation,
    byte_params, compare, simulate, validate_grid,
)

SEED = 20160101
Z = 3.0


def config(**overrides) -> SimConfig:
    values = dict(params=byte_params(10, 12), path=PathProfile.homogeneous(0.1, 3), trials=3000,
                  seed=SEED, partial_policy=PartialPolicy.ZERO_FILL)
    values.update(overrides)
    return SimConfig(**values)


class TestSimulation:
    """Test the simulation engines."""

    def test_deterministic(self):
        """Same seed, same estimate."""
        first = simulate(config(trials=500))
        second = simulate(config(trials=500))
        assert first.delivered == second.delivered

    def test_chunking_does_not_change_results(self):
        """Per-trial streams make the split irrelevant."""
        whole = simulate(config(trials=600, chunk_size=600, engine=SimEngine.PACKET))
        split = simulate(config(trials=600, chunk_size=70, engine=SimEngine.PACKET))
        assert whole.delivered == split.delivered

    def test_worker_pool_matches_serial(self):
        """Parallel runs reproduce the serial estimate."""
        serial = simulate(config(trials=400, chunk_size=100, engine=SimEngine.PACKET))
        parallel = simulate(config(trials=400, chunk_size=100, workers=2, engine=SimEngine.PACKET))
        assert serial.delivered == parallel.delivered

    def test_rank_engine_ignores_worker_count(self):
        """Blocks are seeded by index, so any pool size gives the same counts."""
        trials = 3 * RANK_BLOCK + 17
        serial = simulate(config(trials=trials))
        for workers in (2, 3):
            assert simulate(config(trials=trials, workers=workers)).delivered == serial.delivered

    def test_lossless_path(self):
        """No erasures, everything delivered."""
        estimate = simulate(config(path=PathProfile.homogeneous(0.0, 2), trials=50))
        assert estimate.rho_hat == [1.0, 1.0]
        assert estimate.integrity_failures == 0

    def test_zero_fill_matches_analytic(self):
        """Under zero-fill the per-hop product is exact."""
        cfg = config()
        estimate = simulate(cfg)
        report = compare(analytic_expectation(cfg), estimate, z=Z)

        assert report.passed, report.failures
        assert estimate.integrity_failures == 0
        assert all(a >= b for a, b in zip(estimate.rho_hat, estimate.rho_hat[1:]))

    def test_recovered_span_is_bounded_below(self):
        """Forwarding partial spans can only help downstream receivers."""
        cfg = config(partial_policy=PartialPolicy.RECOVERED_SPAN, params=byte_params(10, 11),
                     path=PathProfile.homogeneous(0.15, 3))
        report = compare(analytic_expectation(cfg), simulate(cfg), z=Z,
                         modes={2: CompareMode.LOWER_BOUND, 3: CompareMode.LOWER_BOUND})
        assert report.passed, report.failures

    def test_forward_only_matches_total_erasure(self):
        """Without re-encoding the receiver sees one link of total erasure."""
        cfg = config(relay_mode=RelayMode.FORWARD_ONLY, path=PathProfile.homogeneous(0.05, 3))
        report = compare(analytic_expectation(cfg), simulate(cfg), z=Z)
        assert report.passed, report.failures

    def test_reencoding_beats_forwarding(self):
        """Relays that re-encode deliver more over several hops."""
        path = PathProfile.homogeneous(0.1, 3)
        coded = simulate(config(path=path, trials=1500))
        forwarded = simulate(config(path=path, trials=1500, relay_mode=RelayMode.FORWARD_ONLY))
        assert coded.rho_hat[-1] > forwarded.rho_hat[-1]

    def test_invalid_config(self):
        """Trials and workers must be positive."""
        with pytest.raises(ValueError):
            config(trials=0)
        with pytest.raises(ValueError):
            config(workers=0)


class TestEngines:
    """Test that the rank engine reproduces packet-level delivery."""

    @pytest.mark.parametrize("relay_mode, policy", [
        (RelayMode.DECODE_REENCODE, PartialPolicy.ZERO_FILL),
        (RelayMode.DECODE_REENCODE, PartialPolicy.RECOVERED_SPAN),
        (RelayMode.FORWARD_ONLY, PartialPolicy.ZERO_FILL),
    ])
    def test_engines_agree(self, relay_mode, policy):
        """Per-hop delivery fractions match within the joint standard error."""
        shared = dict(params=byte_params(10, 11), path=PathProfile.homogeneous(0.15, 3),
                      relay_mode=relay_mode, partial_policy=policy)
        rank = simulate(config(trials=20000, engine=SimEngine.RANK, **shared))
        packet = simulate(config(trials=3000, engine=SimEngine.PACKET, **shared))

        assert packet.integrity_failures == 0
        for a, b, se_a, se_b in zip(rank.rho_hat, packet.rho_hat, rank.stderr, packet.stderr):
            assert abs(a - b) <= Z * max(math.hypot(se_a, se_b), 1e-3)

    def test_rank_engine_on_grid_code(self):
        """A long code at high loss still agrees with the analytic product."""
        cfg = config(params=byte_params(50, 63), path=PathProfile.homogeneous(0.3, 2), trials=5000)
        report = compare(analytic_expectation(cfg), simulate(cfg), z=Z)
        assert report.passed, report.failures

    def test_uncoded_rank_engine(self):
        """n = k delivers exactly the packets that survive every link."""
        cfg = config(params=byte_params(8, 8), path=PathProfile.homogeneous(0.2, 2), trials=4000)
        estimate = simulate(cfg)
        assert estimate.rho_hat[0] == pytest.approx(0.8, abs=Z * 0.0065)
        assert estimate.rho_hat[1] == pytest.approx(0.64, abs=Z * 0.0076)

    def test_binary_field(self):
        """Zero coefficients are common over GF(2) and are handled like any other."""
        cfg = config(params=byte_params(10, 14, q=1), path=PathProfile.homogeneous(0.1, 1), trials=4000,
                     partial_policy=PartialPolicy.ZERO_FILL)
        rank = simulate(cfg)
        packet = simulate(config(params=byte_params(10, 14, q=1), path=PathProfile.homogeneous(0.1, 1),
                                 trials=1500, engine=SimEngine.PACKET))
        assert abs(rank.rho_hat[0] - packet.rho_hat[0]) <= Z * math.hypot(rank.stderr[0], packet.stderr[0])


class TestCompare:
    """Test the analytic-versus-simulated check."""

    def test_deviation_detected(self):
        """A value far outside the band fails."""
        estimate = SimEstimate(rho_hat=[0.9], eta_hat=[0.1], stderr=[0.003], trials=10000)
        assert compare([0.95], estimate, z=3.0).failures[0].name == 'rho[1]'
        assert compare([0.905], estimate, z=3.0).passed

    def test_lower_bound_mode(self):
        """Only analytic values above the estimate count in lower-bound mode."""
        estimate = SimEstimate(rho_hat=[0.9], eta_hat=[0.1], stderr=[0.003], trials=10000)
        assert compare([0.5], estimate, mode=CompareMode.LOWER_BOUND).passed
        assert not compare([0.95], estimate, mode=CompareMode.LOWER_BOUND).passed

    def test_stderr_floor(self):
        """A zero-variance estimate still tolerates 1/trials."""
        estimate = SimEstimate(rho_hat=[1.0], eta_hat=[0.0], stderr=[0.0], trials=1000)
        assert compare([0.9995], estimate, z=1.0).passed
        assert not compare([0.99], estimate, z=1.0).passed

    def test_length_mismatch(self):
        """One analytic value per hop."""
        estimate = SimEstimate(rho_hat=[0.9, 0.8], eta_hat=[0.1, 0.2], stderr=[0.01, 0.01], trials=100)
        with pytest.raises(ValueError):
            compare([0.9], estimate)


class TestValidateGrid:
    """Test grid validation."""

    def test_small_grid_passes(self):
        """Analytic reliability agrees with simulation on a small grid."""
        rows = validate_grid([(1, 2), (10, 12)], [0.1, 0.3], hops=2, trials=2000, seed=SEED, z=Z)
        assert len(rows) == 2 * 2 * 2
        assert all(row.passed for row in rows)

    def test_perturbation_fails(self):
        """Shifting the analytic values must be caught."""
        rows = validate_grid([(10, 12)], [0.1], hops=2, trials=2000, seed=SEED, z=Z, perturb=0.2)
        assert not any(row.passed for row in rows)

    def test_recovered_span_modes(self):
        """Downstream hops are checked as lower bounds under recovered-span."""
        rows = validate_grid([(10, 12)], [0.15], hops=3, trials=1000, seed=SEED, z=Z,
                             partial_policy=PartialPolicy.RECOVERED_SPAN)
        assert [row.mode for row in rows] == ['two-sided', 'lower-bound', 'lower-bound']
        assert all(row.passed for row in rows)
