"""
Monte-Carlo Oracle

Simulation of a coded line network: the source encodes random generations,
every link erases packets independently, relays decode and re-encode (or
just forward), and each receiver decodes. Per-hop delivery counts give
independent estimates of the analytic reliability figures.

Two engines share one interface. The packet engine moves real payloads
through the codec and checks every decoded payload. The rank engine tracks
only which indices each node knows and row-reduces the received coefficient
matrices of a whole block of trials at once; coefficients are i.i.d. uniform
over the field, so the received submatrix can be drawn directly.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.analytics.erasure_analytics import PathProfile, reliability_nc, rper_single_hop
from src.coding.galois_field import GaloisField, get_field
from src.coding.models import CodeParams, Generation
from src.coding.snc_codec import PartialPolicy, decode, encode, reencode

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 2000
RANK_BLOCK = 1000


class RelayMode(str, Enum):
    DECODE_REENCODE = 'decode-and-reencode'
    FORWARD_ONLY = 'forward-only'


class CompareMode(str, Enum):
    TWO_SIDED = 'two-sided'
    LOWER_BOUND = 'lower-bound'


class SimEngine(str, Enum):
    RANK = 'rank'
    PACKET = 'packet'


@dataclass(frozen=True)
class SimConfig:
    """
    Simulation setup.

    The packet engine draws trial t from its own PCG64 stream seeded with
    (seed, t); the rank engine draws block b of RANK_BLOCK trials from
    (seed, b). Either way results do not depend on how work is split across
    workers.
    """
    params: CodeParams
    path: PathProfile
    trials: int
    seed: int = 0
    relay_mode: RelayMode = RelayMode.DECODE_REENCODE
    partial_policy: PartialPolicy = PartialPolicy.RECOVERED_SPAN
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK
    engine: SimEngine = SimEngine.RANK

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, 'relay_mode', RelayMode(self.relay_mode))
        object.__setattr__(self, 'partial_policy', PartialPolicy(self.partial_policy))
        object.__setattr__(self, 'engine', SimEngine(self.engine))


@dataclass
class SimEstimate:
    """Per-hop estimates; index h-1 holds the receiver h hops from the source."""
    rho_hat: List[float]
    eta_hat: List[float]
    stderr: List[float]
    trials: int
    delivered: List[int] = field(default_factory=list)
    integrity_failures: int = 0


@dataclass
class QuantityCheck:
    name: str
    analytic: float
    estimate: float
    stderr: float
    deviation: float
    passed: bool


@dataclass
class ComparisonReport:
    checks: List[QuantityCheck]
    z: float
    mode: CompareMode

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[QuantityCheck]:
        return [c for c in self.checks if not c.passed]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


def _run_trial(config: SimConfig, trial: int, counts: np.ndarray) -> int:
    """Simulate one generation; adds per-hop delivered counts, returns integrity failures."""
    params = config.params
    rng = trial_rng(config.seed, trial)
    payloads = rng.integers(0, 1 << params.q, size=(params.k, params.s), dtype=np.int64).astype(np.uint8)
    generation = Generation.from_payloads(payloads, seed=int(rng.integers(1 << 62)))
    packets = encode(generation, params)

    valid = set(range(params.k))
    failures = 0
    for hop, delta in enumerate(config.path.deltas):
        kept = rng.random(len(packets)) >= delta
        received = [p for p, keep in zip(packets, kept) if keep]
        result = decode(received, params)

        # Forwarded packets are decoded afresh by every receiver
        if config.relay_mode == RelayMode.FORWARD_ONLY:
            candidates = set(result.payloads)
        else:
            candidates = valid.intersection(result.payloads)

        delivered = set()
        for index in candidates:
            if np.array_equal(result.payloads[index], payloads[index]):
                delivered.add(index)
            else:
                failures += 1
        valid = delivered
        counts[hop] += len(valid)

        if hop + 1 == config.path.hops:
            break
        if config.relay_mode == RelayMode.FORWARD_ONLY:
            packets = received
        else:
            packets = reencode(result, params, seed=int(rng.integers(1 << 62)), policy=config.partial_policy)
    return failures


def _run_chunk(args: Tuple[SimConfig, int, int]) -> Tuple[np.ndarray, int]:
    config, start, stop = args
    counts = np.zeros(config.path.hops, dtype=np.int64)
    failures = 0
    for trial in range(start, stop):
        failures += _run_trial(config, trial, counts)
    return counts, failures


def _first_true(mask: np.ndarray, width: int) -> np.ndarray:
    """Positions of the set entries of each row, set ones first and in order, cut to width."""
    return np.argsort(~mask, axis=1, kind='stable')[:, :width]


def _solve_unknowns(gf: GaloisField, coeffs: np.ndarray, rows: np.ndarray,
                    unknown: np.ndarray) -> np.ndarray:
    """
    Row-reduce compacted coefficient matrices and report recovered unknowns.

    Args:
        gf: Field
        coeffs: (T, R, W) received rows over the unknown columns, compacted
            to the top-left corner
        rows: Received coded rows per trial
        unknown: (T, k) mask of unknown indices

    Returns:
        (T, k) mask of unknowns whose unit vector is in the received row space
    """
    count, height, width = coeffs.shape
    cols = unknown.sum(axis=1)
    inside = ((np.arange(height)[None, :, None] < rows[:, None, None])
              & (np.arange(width)[None, None, :] < cols[:, None, None]))
    coeffs[~inside] = 0
    _, solved = gf.reduce_batch(coeffs)

    recovered = np.zeros_like(unknown)
    order = _first_true(unknown, width)
    trial, slot = np.nonzero(solved)
    recovered[trial, order[trial, slot]] = True
    return recovered


def _rank_hop_reencode(gf: GaloisField, rng: np.random.Generator, params: CodeParams,
                       policy: PartialPolicy, known: np.ndarray, delta: float) -> np.ndarray:
    """
    One link followed by decoding, for a block of trials.

    The sending node knows the indices in `known`. It emits a systematic slot
    for every index in its span and n - |span| coded rows over the span; the
    span is the known set under recovered-span and the whole generation under
    zero-fill. A node that knows nothing sends nothing.
    """
    count, k = known.shape
    n = params.n
    if policy == PartialPolicy.ZERO_FILL:
        span = np.broadcast_to(known.any(axis=1)[:, None], known.shape)
    else:
        span = known
    span_size = span.sum(axis=1)
    coded = np.where(span_size > 0, n - span_size, 0)

    systematic = span & (rng.random((count, k)) >= delta)
    received = (np.arange(n)[None, :] < coded[:, None]) & (rng.random((count, n)) >= delta)
    unknown = span & ~systematic
    rows = received.sum(axis=1)

    recovered = systematic.copy()
    need = np.flatnonzero((rows > 0) & unknown.any(axis=1))
    if need.size:
        height = int(rows[need].max())
        width = int(unknown[need].sum(axis=1).max())
        coeffs = rng.integers(0, gf.size, size=(need.size, height, width), dtype=np.int64).astype(np.uint8)
        recovered[need] |= _solve_unknowns(gf, coeffs, rows[need], unknown[need])
    return recovered


def _run_rank_block(args: Tuple[SimConfig, int]) -> Tuple[np.ndarray, int]:
    """Rank engine for trials [block * RANK_BLOCK, ...); returns per-hop delivered counts."""
    config, block = args
    params = config.params
    k, redundancy = params.k, params.redundancy
    count = min(RANK_BLOCK, config.trials - block * RANK_BLOCK)
    rng = trial_rng(config.seed, block)
    gf = get_field(params.q)
    counts = np.zeros(config.path.hops, dtype=np.int64)

    if config.relay_mode == RelayMode.DECODE_REENCODE:
        known = np.ones((count, k), dtype=bool)
        valid = known.copy()
        for hop, delta in enumerate(config.path.deltas):
            known = _rank_hop_reencode(gf, rng, params, config.partial_policy, known, delta)
            valid &= known
            counts[hop] = valid.sum()
        return counts, 0

    # Forwarding: the surviving source packets are decoded afresh at every receiver
    source = rng.integers(0, gf.size, size=(count, redundancy, k), dtype=np.int64).astype(np.uint8)
    systematic = np.ones((count, k), dtype=bool)
    coded = np.ones((count, redundancy), dtype=bool)
    for hop, delta in enumerate(config.path.deltas):
        systematic &= rng.random((count, k)) >= delta
        coded &= rng.random((count, redundancy)) >= delta
        unknown = ~systematic
        rows = coded.sum(axis=1)

        recovered = systematic.copy()
        need = np.flatnonzero((rows > 0) & unknown.any(axis=1))
        if need.size:
            height = int(rows[need].max())
            width = int(unknown[need].sum(axis=1).max())
            row_order = _first_true(coded[need], height)
            col_order = _first_true(unknown[need], width)
            coeffs = source[need[:, None, None], row_order[:, :, None], col_order[:, None, :]]
            recovered[need] |= _solve_unknowns(gf, coeffs, rows[need], unknown[need])
        counts[hop] = recovered.sum()
    return counts, 0


def simulate(config: SimConfig) -> SimEstimate:
    """
    Run the simulation.

    Args:
        config: Simulation setup

    Returns:
        SimEstimate with per-hop delivered fractions
    """
    if config.engine == SimEngine.RANK:
        runner = _run_rank_block
        work = [(config, block) for block in range(math.ceil(config.trials / RANK_BLOCK))]
    else:
        runner = _run_chunk
        work = [(config, start, min(start + config.chunk_size, config.trials))
                for start in range(0, config.trials, config.chunk_size)]

    if config.workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(runner, work))
    else:
        results = [runner(item) for item in work]

    counts = np.zeros(config.path.hops, dtype=np.int64)
    failures = 0
    for chunk_counts, chunk_failures in results:
        counts += chunk_counts
        failures += chunk_failures

    total = config.trials * config.params.k
    rho_hat = [int(c) / total for c in counts]
    stderr = [math.sqrt(p * (1.0 - p) / config.trials) for p in rho_hat]
    if failures:
        logger.warning(f"{failures} decoded payloads did not match the originals")
    logger.debug(f"Simulated {config.trials} trials over {config.path.hops} hops: rho_hat={rho_hat}")
    return SimEstimate(rho_hat=rho_hat, eta_hat=[1.0 - p for p in rho_hat], stderr=stderr,
                       trials=config.trials, delivered=[int(c) for c in counts],
                       integrity_failures=failures)


def analytic_expectation(config: SimConfig) -> List[float]:
    """
    Analytic reliability per hop for the configured relay mode.

    With re-encoding the per-hop residual erasures compose; with forwarding
    only, the receiver h hops away sees a single link of total erasure.
    """
    params, path = config.params, config.path
    if config.relay_mode == RelayMode.DECODE_REENCODE:
        return [reliability_nc(params, path, h) for h in range(1, path.hops + 1)]
    return [1.0 - rper_single_hop(params, min(1.0, max(0.0, path.total_erasure(h))))
            for h in range(1, path.hops + 1)]


def compare(analytic: List[float], estimate: SimEstimate, z: float = 3.0,
            mode: CompareMode = CompareMode.TWO_SIDED,
            modes: Optional[Dict[int, CompareMode]] = None) -> ComparisonReport:
    """
    Check analytic per-hop reliabilities against simulated estimates.

    A quantity fails when it deviates by more than z standard errors. The
    standard error is floored at 1/trials so a zero-variance estimate still
    tolerates rounding. In lower-bound mode only an analytic value above the
    estimate counts as a deviation.

    Args:
        analytic: Analytic reliability per hop
        estimate: Simulation estimate
        z: Sigma multiplier
        mode: Comparison mode for every hop
        modes: Optional per-hop overrides, keyed by hop number

    Returns:
        ComparisonReport
    """
    if len(analytic) != len(estimate.rho_hat):
        raise ValueError(f"Got {len(analytic)} analytic values for {len(estimate.rho_hat)} hops")

    checks = []
    for h, (value, observed, se) in enumerate(zip(analytic, estimate.rho_hat, estimate.stderr), start=1):
        hop_mode = CompareMode((modes or {}).get(h, mode))
        se = max(se, 1.0 / estimate.trials)
        deviation = value - observed if hop_mode == CompareMode.LOWER_BOUND else abs(value - observed)
        checks.append(QuantityCheck(name=f"rho[{h}]", analytic=value, estimate=observed, stderr=se,
                                    deviation=deviation, passed=deviation <= z * se))

    report = ComparisonReport(checks=checks, z=z, mode=CompareMode(mode))
    for check in report.failures:
        logger.warning(f"{check.name}: analytic {check.analytic:.6f} vs simulated {check.estimate:.6f} "
                       f"(stderr {check.stderr:.2e}, z={z})")
    return report


@dataclass
class ValidationRow:
    k: int
    n: int
    delta: float
    hop: int
    analytic: float
    estimate: float
    stderr: float
    passed: bool
    mode: str


def byte_params(k: int, n: int, q: int = 8) -> CodeParams:
    """One-byte packets: delivery statistics do not depend on the payload size."""
    return CodeParams(k=k, n=n, q=q, L=1)


def validate_grid(codes: List[Tuple[int, int]], deltas: List[float], hops: int, trials: int,
                  seed: int, q: int = 8, z: float = 3.0,
                  partial_policy: PartialPolicy = PartialPolicy.ZERO_FILL,
                  workers: int = 1, perturb: float = 0.0,
                  engine: SimEngine = SimEngine.RANK) -> List[ValidationRow]:
    """
    Compare analytic and simulated reliability over a grid of codes and erasure rates.

    One simulation per (code, delta) covers every hop count up to hops. Under
    the recovered-span policy the analytic product is only a lower bound from
    the second hop on, and is checked as such. perturb is added to every analytic value
    to check that the harness can fail.
    """
    policy = PartialPolicy(partial_policy)
    rows = []
    for k, n in codes:
        for delta in deltas:
            config = SimConfig(params=byte_params(k, n, q), path=PathProfile.homogeneous(delta, hops),
                               trials=trials, seed=seed, partial_policy=policy, workers=workers,
                               engine=engine)
            estimate = simulate(config)
            analytic = [value + perturb for value in analytic_expectation(config)]
            modes = {}
            if policy == PartialPolicy.RECOVERED_SPAN:
                modes = {h: CompareMode.LOWER_BOUND for h in range(2, hops + 1)}
            report = compare(analytic, estimate, z=z, modes=modes)
            for h, check in enumerate(report.checks, start=1):
                rows.append(ValidationRow(k=k, n=n, delta=delta, hop=h, analytic=check.analytic,
                                          estimate=check.estimate, stderr=check.stderr,
                                          passed=check.passed,
                                          mode=modes.get(h, CompareMode.TWO_SIDED).value))
            logger.info(f"Validated (k={k}, n={n}, delta={delta}): "
                        f"{'pass' if report.passed else 'FAIL'}")
    return rows
