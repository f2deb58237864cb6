"""
Erasure Analytics

Closed-form residual packet erasure rate (RPER) per hop, multi-hop
reliability with and without network coding, achievable rates, and the
per-receiver rate-region inequalities for line networks.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from src.coding.models import CodeParams

logger = logging.getLogger(__name__)

# Inequality identifiers reported by theorem1_region_check
MIN_CUT = 'min-cut'
TARGET_RPER = 'target-rper'
MONOTONE_RATE = 'monotone-rate'

# Relative slack on the min-cut bound for float rounding in R^m
RATE_RTOL = 1e-12


@dataclass(frozen=True)
class PathProfile:
    """
    Per-link erasure probabilities of a line network, in path order.

    Hop index i is 1-based: deltas[0] is link 1.
    """
    deltas: Tuple[float, ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        if not deltas:
            raise ValueError("A path needs at least one link")
        for i, delta in enumerate(deltas, start=1):
            if not 0.0 <= delta <= 1.0 or math.isnan(delta):
                raise ValueError(f"Erasure rate of link {i} must be in [0, 1], got {delta}")
        object.__setattr__(self, 'deltas', deltas)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(deltas):
                raise ValueError(f"Got {len(labels)} labels for {len(deltas)} links")
            object.__setattr__(self, 'labels', labels)

    @classmethod
    def homogeneous(cls, delta: float, hops: int) -> 'PathProfile':
        """Path of `hops` links that all erase with probability delta."""
        if hops < 1:
            raise ValueError(f"hops must be >= 1, got {hops}")
        return cls(deltas=(delta,) * hops)

    @property
    def hops(self) -> int:
        return len(self.deltas)

    def delta(self, i: int) -> float:
        """Erasure rate of link i (1-based)."""
        return self.deltas[i - 1]

    def total_erasure(self, h: Optional[int] = None) -> float:
        """Erasure seen end-to-end over the first h links: 1 - prod(1 - delta_i)."""
        h = self.hops if h is None else h
        return 1.0 - math.prod(1.0 - d for d in self.deltas[:h])


@dataclass
class HopReliability:
    """Per-hop and cumulative reliability figures of a coded path."""
    per_hop_eta: List[float] = field(default_factory=list)
    cumulative_eta: List[float] = field(default_factory=list)
    cumulative_rho: List[float] = field(default_factory=list)
    rates: List[float] = field(default_factory=list)
    uncoded_rho: List[float] = field(default_factory=list)
    rate_drops: List[float] = field(default_factory=list)


@dataclass
class RegionCheck:
    """Result of checking a candidate point against the rate-region inequalities."""
    satisfies: bool
    violated: List[str] = field(default_factory=list)
    bounds: Dict[str, float] = field(default_factory=dict)


def binomial_lower_tail(trials: int, p: float, k: int) -> float:
    """
    P[Binomial(trials, p) < k], summed exactly in log space.

    Args:
        trials: Number of Bernoulli trials
        p: Success probability
        k: Threshold

    Returns:
        Tail probability in [0, 1]
    """
    if k <= 0:
        return 0.0
    if k > trials:
        return 1.0
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0

    j = np.arange(k)
    log_terms = (gammaln(trials + 1) - gammaln(j + 1) - gammaln(trials - j + 1)
                 + j * math.log(p) + (trials - j) * math.log1p(-p))
    return float(min(1.0, math.exp(logsumexp(log_terms))))


def rper_single_hop(params: CodeParams, delta: float) -> float:
    """
    Residual packet erasure rate after decoding at one hop.

    A systematic packet stays lost iff it is erased and the other n-1 packets
    deliver fewer than k, assuming full rank whenever k packets arrive:
    eta = delta * P[Binomial(n-1, 1-delta) < k].

    Args:
        params: Coding parameters
        delta: Link erasure probability

    Returns:
        RPER in [0, 1]
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"Erasure rate must be in [0, 1], got {delta}")
    if delta == 0.0:
        return 0.0
    if delta == 1.0:
        return 1.0
    return delta * binomial_lower_tail(params.n - 1, 1.0 - delta, params.k)


def _check_hop(path: PathProfile, h: int):
    if not isinstance(h, (int, np.integer)) or not 1 <= h <= path.hops:
        raise ValueError(f"Hop index h={h} out of range [1, {path.hops}]")


def _hop_etas(params: CodeParams, deltas: Tuple[float, ...]) -> List[float]:
    cache = {d: rper_single_hop(params, d) for d in set(deltas)}
    return [cache[d] for d in deltas]


def _log_survival(etas: List[float]) -> float:
    """sum(log(1 - eta_i)); -inf once a link erases everything."""
    if any(eta >= 1.0 for eta in etas):
        return -math.inf
    return math.fsum(math.log1p(-eta) for eta in etas)


def reliability_nc(params: CodeParams, path: PathProfile, h: int) -> float:
    """
    Reliability after decoding at hop h with re-encoding at every relay.

    Product of (1 - eta_i) over links 1..h.
    """
    _check_hop(path, h)
    return math.prod(1.0 - eta for eta in _hop_etas(params, path.deltas[:h]))


def residual_erasure(params: CodeParams, path: PathProfile, h: int) -> float:
    """
    Cumulative residual erasure eta^h = 1 - rho_NC(h), kept in log space.

    Computed as -expm1(sum(log1p(-eta_i))) so that per-hop residuals far
    below machine epsilon still give a strictly positive eta^h.
    """
    _check_hop(path, h)
    log_rho = _log_survival(_hop_etas(params, path.deltas[:h]))
    return 1.0 if log_rho == -math.inf else -math.expm1(log_rho)


def reliability_uncoded(path: PathProfile, h: int) -> float:
    """Reliability at hop h without coding: product of (1 - delta_i) over links 1..h."""
    _check_hop(path, h)
    return math.prod(1.0 - d for d in path.deltas[:h])


def achievable_rate(params: CodeParams, path: PathProfile, m: int) -> float:
    """
    Achievable rate of the receiver m hops from the source.

    R^m = r * (1 - eta^m) = r * rho_NC(r, delta, m).
    """
    return float(params.r) * reliability_nc(params, path, m)


def rate_drop(params: CodeParams, path: PathProfile, h: int) -> float:
    """
    R^{h-1} - R^h, the rate lost on link h (R^0 = r at the source).

    Evaluated as r * rho_NC(h-1) * eta_h rather than as a difference of two
    rates, which round to the same float once eta_h drops below epsilon.
    Zero iff eta_h = 0 or nothing reaches hop h-1.
    """
    _check_hop(path, h)
    etas = _hop_etas(params, path.deltas[:h])
    upstream = math.prod(1.0 - eta for eta in etas[:-1])
    return float(params.r) * upstream * etas[-1]


def hop_reliability(params: CodeParams, path: PathProfile) -> HopReliability:
    """Full per-hop profile of a path: eta_i, eta^m, rho^NC, R^m and the uncoded baseline."""
    report = HopReliability()
    rho = 1.0
    rho_unc = 1.0
    log_rho = 0.0
    r = float(params.r)
    for eta, delta in zip(_hop_etas(params, path.deltas), path.deltas):
        report.rate_drops.append(r * rho * eta)
        rho *= 1.0 - eta
        rho_unc *= 1.0 - delta
        log_rho = -math.inf if eta >= 1.0 else log_rho + math.log1p(-eta)
        report.per_hop_eta.append(eta)
        report.cumulative_rho.append(rho)
        report.cumulative_eta.append(1.0 if log_rho == -math.inf else -math.expm1(log_rho))
        report.rates.append(r * rho)
        report.uncoded_rho.append(rho_unc)
    return report


def _vertex_rate(params: CodeParams, path: PathProfile, vertex: int) -> float:
    # The source is vertex 1 and transmits at rate r
    if vertex == 1:
        return float(params.r)
    return achievable_rate(params, path, vertex - 1)


def theorem1_region_check(params: CodeParams, path: PathProfile, m: int,
                          candidate_R: float, eta0: float) -> RegionCheck:
    """
    Check a candidate rate for the receiver at vertex m against the region.

    Vertices are numbered from the source (vertex 1); the receiver at vertex m
    sits behind links 1..m-1. The three inequalities are:

    - min-cut: R^m <= min over links 1..m-1 of (1 - delta_i)
    - target-rper: eta^m <= eta0
    - monotone-rate: R^m <= R^{m-1}

    eta^m comes from residual_erasure, so eta0 = 0 is only met by a path
    whose every link is lossless. The min-cut bound is checked with a
    relative tolerance of RATE_RTOL; it holds with equality for n = k.

    Args:
        params: Coding parameters
        path: Path profile
        m: Receiver vertex, 2 <= m <= hops + 1
        candidate_R: Candidate rate for the receiver
        eta0: Target residual erasure rate

    Returns:
        RegionCheck listing every violated inequality

    Raises:
        ValueError: If m is outside [2, |V|]
    """
    vertices = path.hops + 1
    if not 2 <= m <= vertices:
        raise ValueError(f"Receiver vertex m={m} outside [2, {vertices}]")

    min_cut = min(1.0 - d for d in path.deltas[:m - 1])
    eta_m = residual_erasure(params, path, m - 1)
    previous_rate = _vertex_rate(params, path, m - 1)

    violated = []
    if candidate_R > min_cut * (1.0 + RATE_RTOL):
        violated.append(MIN_CUT)
    if eta_m > eta0:
        violated.append(TARGET_RPER)
    if candidate_R > previous_rate:
        violated.append(MONOTONE_RATE)

    return RegionCheck(
        satisfies=not violated,
        violated=violated,
        bounds={'min_cut': min_cut, 'eta_m': eta_m, 'previous_rate': previous_rate,
                'rate_drop': rate_drop(params, path, m - 1)},
    )


def intermediate_targets_met(params: CodeParams, path: PathProfile, eta0: float) -> bool:
    """
    True when every receiver on the path meets eta0 whenever the sink does.

    Since eta^m is nondecreasing along the path, a sink that meets the target
    implies all intermediate receivers meet it, so optimizing for the sink is
    enough.
    """
    profile = hop_reliability(params, path)
    if profile.cumulative_eta[-1] > eta0:
        return True
    return all(eta <= eta0 for eta in profile.cumulative_eta)
