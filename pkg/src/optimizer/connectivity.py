"""
Connectivity and Reliability Gain

How many hops network coding keeps a path above the reliability target
compared with no coding, and the per-hop reliability gain of the optimized
code over a range of path lengths.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import pandas as pd

from src.analytics.erasure_analytics import PathProfile, reliability_nc, reliability_uncoded
from src.coding.models import CodeParams
from src.complexity.complexity_model import (
    DEFAULT_COSTS, ComplexityBudget, GateCosts, max_n_under_budget, roles_for_path,
)
from src.optimizer.utility_optimizer import optimize_rate

logger = logging.getLogger(__name__)

DEFAULT_H_LIMIT = 100000

SWEEP_COLUMNS = ['h', 'delta', 'beta0', 'n_opt', 'r_opt', 'rho_nc', 'rho_unc', 'gain', 'utility']


class SelectionMode(str, Enum):
    """How the block length is chosen for each path length."""
    UTILITY_ARGMAX = 'utility-argmax'
    MAX_REDUNDANCY = 'max-redundancy'


@dataclass
class ConnectivityResult:
    """
    Hop reach with and without coding.

    gamma is None when undefined; reason says why. Capped flags mark hop
    counts that hit the search limit instead of a true boundary.
    """
    delta: float
    rho0: float
    h_nc: int
    h_unc: int
    gamma: Optional[float]
    reason: Optional[str] = None
    h_nc_capped: bool = False
    h_unc_capped: bool = False
    chosen_n: Dict[int, int] = field(default_factory=dict)

    @property
    def n_at_reach(self) -> Optional[int]:
        return self.chosen_n.get(self.h_nc)

    def to_dict(self) -> Dict:
        return {
            'delta': self.delta,
            'rho0': self.rho0,
            'h_nc': self.h_nc,
            'h_unc': self.h_unc,
            'gamma': self.gamma,
            'reason': self.reason,
            'h_nc_capped': self.h_nc_capped,
            'h_unc_capped': self.h_unc_capped,
            'n_at_reach': self.n_at_reach,
        }


@dataclass
class GainRecord:
    h: int
    delta: float
    beta0: float
    n_opt: int
    r_opt: float
    rho_nc: float
    rho_unc: float
    gain: float
    utility: Optional[float]


def uncoded_reach(delta: float, rho0: float, h_limit: int = DEFAULT_H_LIMIT) -> int:
    """Largest h with (1 - delta)^h >= rho0, capped at h_limit."""
    rho = 1.0
    h = 0
    while h < h_limit:
        rho *= 1.0 - delta
        if rho < rho0:
            break
        h += 1
    return h


def choose_n(k: int, s: int, q: int, delta: float, h: int, rho0: float,
             budget: ComplexityBudget, mode: SelectionMode = SelectionMode.UTILITY_ARGMAX,
             costs: GateCosts = DEFAULT_COSTS) -> int:
    """Block length the source would use on an h-hop homogeneous path."""
    mode = SelectionMode(mode)
    if mode == SelectionMode.MAX_REDUNDANCY:
        return max_n_under_budget(k, s, q, budget, roles_for_path(h), costs).overall
    path = PathProfile.homogeneous(delta, h)
    return optimize_rate(k, s, q, path, rho0, budget, costs=costs).n


def connectivity_gain(k: int, s: int, q: int, delta: float, rho0: float,
                      budget: ComplexityBudget,
                      mode: SelectionMode = SelectionMode.UTILITY_ARGMAX,
                      costs: GateCosts = DEFAULT_COSTS,
                      h_limit: int = DEFAULT_H_LIMIT) -> ConnectivityResult:
    """
    Connectivity gain gamma = h_nc / h_unc on a homogeneous path.

    h_nc is found by doubling h until the target is missed and then
    bisecting; per-h feasibility is monotone because the affordable block
    length never grows with h and reliability falls with every hop.

    Args:
        k: Information packets
        s: Field symbols per packet
        q: Field exponent
        delta: Per-link erasure rate
        rho0: Target reliability
        budget: Gate ceilings
        mode: Block-length selection mode
        costs: Gate costs
        h_limit: Largest hop count tried

    Returns:
        ConnectivityResult
    """
    L = s * q // 8
    chosen: Dict[int, int] = {}

    def feasible(h: int) -> bool:
        n = choose_n(k, s, q, delta, h, rho0, budget, mode, costs)
        chosen[h] = n
        path = PathProfile.homogeneous(delta, h)
        return reliability_nc(CodeParams(k=k, n=n, q=q, L=L), path, h) >= rho0

    h_unc = uncoded_reach(delta, rho0, h_limit)

    if not feasible(1):
        h_nc = 0
        capped = False
    else:
        lo, hi = 1, 2
        while hi <= h_limit and feasible(hi):
            lo, hi = hi, hi * 2
        capped = hi > h_limit
        if capped:
            if feasible(h_limit):
                lo = hi = h_limit
            else:
                hi = h_limit
                capped = False
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        h_nc = lo

    result = ConnectivityResult(delta=delta, rho0=rho0, h_nc=h_nc, h_unc=h_unc, gamma=None,
                                h_nc_capped=capped, h_unc_capped=h_unc >= h_limit,
                                chosen_n={h: chosen[h] for h in sorted(chosen)})
    if delta == 0.0:
        result.reason = 'lossless links: both reaches are unbounded'
    elif h_unc == 0:
        result.reason = f'uncoded path misses rho0={rho0} after one hop'
    else:
        result.gamma = h_nc / h_unc
    logger.info(f"Connectivity delta={delta}, rho0={rho0}: h_nc={h_nc}, h_unc={h_unc}, gamma={result.gamma}")
    return result


def reliability_gain_sweep(k: int, s: int, q: int, delta: float, rho0: float,
                           budget: ComplexityBudget, h_max: int = 20,
                           mode: SelectionMode = SelectionMode.UTILITY_ARGMAX,
                           costs: GateCosts = DEFAULT_COSTS,
                           delta2: Optional[float] = None) -> List[GainRecord]:
    """
    Reliability gain of the optimized code over no coding for h = 1..h_max.

    Every link erases with probability delta, except link 2 when delta2 is
    given.

    Returns:
        One GainRecord per path length
    """
    L = s * q // 8
    records = []
    for h in range(1, h_max + 1):
        deltas = [delta] * h
        if delta2 is not None and h >= 2:
            deltas[1] = delta2
        path = PathProfile(deltas=tuple(deltas))
        point = optimize_rate(k, s, q, path, rho0, budget, costs=costs)
        n = point.n
        if SelectionMode(mode) == SelectionMode.MAX_REDUNDANCY:
            n = max_n_under_budget(k, s, q, budget, roles_for_path(h), costs).overall
        rho_nc = reliability_nc(CodeParams(k=k, n=n, q=q, L=L), path, h)
        rho_unc = reliability_uncoded(path, h)
        records.append(GainRecord(
            h=h, delta=delta, beta0=budget.beta0_source, n_opt=n, r_opt=k / n,
            rho_nc=rho_nc, rho_unc=rho_unc, gain=rho_nc - rho_unc,
            utility=point.utility if n == point.n else None,
        ))
    logger.debug(f"Reliability sweep delta={delta}: {len(records)} path lengths")
    return records


def sweep_frame(records: List[GainRecord]) -> pd.DataFrame:
    """Sweep records as a table with the sweep CSV columns."""
    return pd.DataFrame([r.__dict__ for r in records], columns=SWEEP_COLUMNS)
