"""
Utility Optimizer

Source utility of a coding rate (reliability margin over encoding cost),
budget-constrained maximization over the block length, and the operative
range in which network coding is worth activating.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional

from src.analytics.erasure_analytics import PathProfile, reliability_nc
from src.coding.models import CodeParams
from src.complexity.complexity_model import (
    DEFAULT_COSTS, ComplexityBudget, GateCosts, NodeRole, encoding_complexity,
    max_n_under_budget, role_complexity, roles_for_path,
)

logger = logging.getLogger(__name__)

DEFAULT_AUDIT_POINTS = 32


class RangePolicy(str, Enum):
    """How the lower utility bound of the operative range is chosen."""
    TARGET = 'target'
    FIXED_FLOOR = 'fixed-floor'


@dataclass(frozen=True)
class UtilityPoint:
    """
    Utility of one block length.

    utility is None at n = k, where the encoding cost is zero and the ratio is
    undefined; such a point is never an argmax candidate.
    """
    n: int
    k: int
    goodness: float
    cost: float
    reliability: float
    utility: Optional[float]
    feasible: Dict[str, bool] = field(default_factory=dict)
    best_effort: bool = False

    @property
    def r(self) -> float:
        return self.k / self.n

    @property
    def not_applicable(self) -> bool:
        return self.utility is None

    @property
    def meets_target(self) -> bool:
        return self.goodness >= 0

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'r': self.r,
            'utility': self.utility,
            'goodness': self.goodness,
            'cost': self.cost,
            'reliability': self.reliability,
            'feasible': dict(self.feasible),
            'best_effort': self.best_effort,
        }


@dataclass
class OperativeRange:
    points: List[UtilityPoint]
    u_max_point: Optional[UtilityPoint]
    u_min: Optional[float]
    policy: RangePolicy
    best_effort_point: Optional[UtilityPoint] = None

    @property
    def activate(self) -> bool:
        return bool(self.points)

    @property
    def u_max(self) -> Optional[float]:
        return self.u_max_point.utility if self.u_max_point else None


def utility(params: CodeParams, path: PathProfile, rho0: float,
            budget: Optional[ComplexityBudget] = None,
            roles: Optional[Iterable[NodeRole]] = None,
            costs: GateCosts = DEFAULT_COSTS) -> UtilityPoint:
    """
    Utility of a code on a path, evaluated at the sink.

    goodness = rho_NC - rho0 and cost = encoding gates at the source; the
    utility is their ratio and is negative when the target is missed.

    Args:
        params: Coding parameters
        path: Path profile; reliability is taken after its last hop
        rho0: Target reliability in (0, 1)
        budget: Optional budget, used only to fill the per-role feasibility flags
        roles: Roles checked against the budget (default: roles on the path)
        costs: Gate costs

    Returns:
        UtilityPoint
    """
    if not 0.0 < rho0 < 1.0:
        raise ValueError(f"rho0 must be in (0, 1), got {rho0}")

    reliability = reliability_nc(params, path, path.hops)
    goodness = reliability - rho0
    cost = encoding_complexity(params, costs).gates
    value = goodness / cost if cost > 0 else None

    feasible = {}
    if budget is not None:
        for role in roles or roles_for_path(path.hops):
            role = NodeRole(role)
            feasible[role.value] = role_complexity(params, role, costs).gates <= budget.ceiling(role)

    return UtilityPoint(n=params.n, k=params.k, goodness=goodness, cost=cost,
                        reliability=reliability, utility=value, feasible=feasible)


def _is_strictly_unimodal(values: List[float]) -> bool:
    i = 0
    while i + 1 < len(values) and values[i] < values[i + 1]:
        i += 1
    while i + 1 < len(values) and values[i] > values[i + 1]:
        i += 1
    return i == len(values) - 1


def _argmax(candidates: List[int], evaluate: Callable[[int], float]) -> int:
    # Smallest n wins ties
    return max(candidates, key=lambda n: (evaluate(n), -n))


def _ternary_search(lo: int, hi: int, evaluate: Callable[[int], float]) -> int:
    while hi - lo > 2:
        m1 = lo + (hi - lo) // 3
        m2 = hi - (hi - lo) // 3
        if evaluate(m1) < evaluate(m2):
            lo = m1 + 1
        else:
            hi = m2
    return _argmax(list(range(lo, hi + 1)), evaluate)


def _audit_indices(size: int, points: int) -> List[int]:
    stride = max(1, (size - 1) // (points - 1))
    indices = list(range(0, size, stride))
    if indices[-1] != size - 1:
        indices.append(size - 1)
    return indices


def optimize_rate(k: int, s: int, q: int, path: PathProfile, rho0: float,
                  budget: ComplexityBudget,
                  roles: Optional[Iterable[NodeRole]] = None,
                  costs: GateCosts = DEFAULT_COSTS,
                  exhaustive: bool = False,
                  audit_points: int = DEFAULT_AUDIT_POINTS) -> UtilityPoint:
    """
    Maximize utility over the budget-feasible block lengths n in (k, n_max].

    Utility is quasi-concave in n in practice, so a ternary search is used,
    but only after a coarse sampling of the curve confirms it is strictly
    unimodal; otherwise every n is scanned. When no n meets rho0 the source
    still codes as hard as it can afford: the maximum-reliability point n_max
    is returned, flagged best_effort.

    Args:
        k: Information packets
        s: Field symbols per packet
        q: Field exponent
        path: Path profile
        rho0: Target reliability
        budget: Gate ceilings
        roles: Roles on the path (default: derived from the hop count)
        costs: Gate costs
        exhaustive: Scan every n instead of searching
        audit_points: Samples used to audit unimodality

    Returns:
        The argmax UtilityPoint, or the n = k point when nothing else fits
    """
    roles = tuple(roles or roles_for_path(path.hops))
    L = s * q // 8
    n_max = max_n_under_budget(k, s, q, budget, roles, costs).overall

    cache: Dict[int, UtilityPoint] = {}

    def point(n: int) -> UtilityPoint:
        if n not in cache:
            cache[n] = utility(CodeParams(k=k, n=n, q=q, L=L), path, rho0, budget, roles, costs)
        return cache[n]

    if n_max <= k:
        logger.info(f"No coded packet fits the budget for k={k}; coding stays off")
        return point(k)

    candidates = list(range(k + 1, n_max + 1))

    def evaluate(n: int) -> float:
        return point(n).utility

    if exhaustive or len(candidates) <= audit_points:
        best = _argmax(candidates, evaluate)
    else:
        sampled = [evaluate(candidates[i]) for i in _audit_indices(len(candidates), audit_points)]
        if _is_strictly_unimodal(sampled):
            best = _ternary_search(candidates[0], candidates[-1], evaluate)
        else:
            logger.warning(f"Utility over n in ({k}, {n_max}] is not unimodal at the audit stride; "
                           f"scanning all {len(candidates)} block lengths")
            best = _argmax(candidates, evaluate)

    result = point(best)
    if not result.meets_target:
        # Reliability is nondecreasing in n, so n_max is the best-effort point
        fallback = point(n_max)
        logger.debug(f"No n in ({k}, {n_max}] meets rho0={rho0}; best effort at n={n_max}")
        return replace(fallback, best_effort=True)
    return result


def evaluate_range(k: int, s: int, q: int, path: PathProfile, rho0: float,
                   budget: ComplexityBudget,
                   roles: Optional[Iterable[NodeRole]] = None,
                   costs: GateCosts = DEFAULT_COSTS) -> List[UtilityPoint]:
    """Utility at every budget-feasible n in (k, n_max]."""
    roles = tuple(roles or roles_for_path(path.hops))
    n_max = max_n_under_budget(k, s, q, budget, roles, costs).overall
    L = s * q // 8
    return [utility(CodeParams(k=k, n=n, q=q, L=L), path, rho0, budget, roles, costs)
            for n in range(k + 1, n_max + 1)]


def operative_range(k: int, s: int, q: int, path: PathProfile, rho0: float,
                    budget: ComplexityBudget,
                    policy: RangePolicy = RangePolicy.TARGET,
                    u_floor: Optional[float] = None,
                    roles: Optional[Iterable[NodeRole]] = None,
                    costs: GateCosts = DEFAULT_COSTS) -> OperativeRange:
    """
    Block lengths whose utility lies between u_min and u_max.

    Under the target policy u_min is the smallest utility at which rho0 is
    still met. Under the fixed-floor policy u_min is u_floor, and points that
    miss rho0 are still excluded. Coding is activated iff the range is
    nonempty.
    """
    policy = RangePolicy(policy)
    if policy == RangePolicy.FIXED_FLOOR and u_floor is None:
        raise ValueError("The fixed-floor policy needs u_floor")

    points = evaluate_range(k, s, q, path, rho0, budget, roles, costs)
    meeting = [p for p in points if p.meets_target]

    if not meeting:
        best_effort = optimize_rate(k, s, q, path, rho0, budget, roles, costs, exhaustive=True)
        logger.info(f"Operative range empty for rho0={rho0}; coding not activated")
        return OperativeRange(points=[], u_max_point=None, u_min=None, policy=policy,
                              best_effort_point=best_effort)

    u_max_point = max(meeting, key=lambda p: (p.utility, -p.n))
    u_min = min(p.utility for p in meeting) if policy == RangePolicy.TARGET else u_floor
    members = [p for p in meeting if u_min <= p.utility <= u_max_point.utility]
    return OperativeRange(points=members, u_max_point=u_max_point if members else None,
                          u_min=u_min, policy=policy)
