"""
Complexity Model

Logic-gate counts for encoding at the source, decoding at the destination and
decode-plus-re-encode at relays, with per-role budgets.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, Optional, Tuple

from src.coding.models import CodeParams

logger = logging.getLogger(__name__)

MAX_BLOCK_LENGTH = 1000


class NodeRole(str, Enum):
    SOURCE = 'source'
    RELAY = 'relay'
    DEST = 'dest'


@dataclass(frozen=True)
class GateCosts:
    """
    Gates per GF(2^q) operation.

    A multiplication costs 2q^2 + 2q gates and an addition q gates, both
    multiplied by a common scale factor.
    """
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"Gate cost scale must be positive, got {self.scale}")

    def mul(self, q: int) -> float:
        return self.scale * (2 * q * q + 2 * q)

    def add(self, q: int) -> float:
        return self.scale * q

    def gates(self, n_mul: int, n_add: int, q: int) -> float:
        return n_mul * self.mul(q) + n_add * self.add(q)


DEFAULT_COSTS = GateCosts()


@dataclass(frozen=True)
class ComplexityReport:
    role: NodeRole
    n_mul: int
    n_add: int
    gates: float


@dataclass(frozen=True)
class ComplexityBudget:
    """
    Gate ceilings per role. A ceiling of math.inf leaves that role unconstrained.
    """
    beta0_source: float
    beta0_relay: float
    beta0_dest: float

    def __post_init__(self):
        for name in ('beta0_source', 'beta0_relay', 'beta0_dest'):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")

    @classmethod
    def uniform(cls, beta0: float) -> 'ComplexityBudget':
        return cls(beta0, beta0, beta0)

    @classmethod
    def source_only(cls, beta0: float) -> 'ComplexityBudget':
        return cls(beta0, math.inf, math.inf)

    def ceiling(self, role: NodeRole) -> float:
        return {
            NodeRole.SOURCE: self.beta0_source,
            NodeRole.RELAY: self.beta0_relay,
            NodeRole.DEST: self.beta0_dest,
        }[NodeRole(role)]

    def scaled(self, factor: float) -> 'ComplexityBudget':
        return ComplexityBudget(self.beta0_source * factor, self.beta0_relay * factor,
                                self.beta0_dest * factor)


def worst_case_decoder_ops(w: int, s: int) -> Tuple[int, int]:
    """
    Worst-case systematic Gaussian elimination over w unknowns.

    (w^3 - w)/3 multiplications to reduce the w x w system plus w^2 s to apply
    it to the payloads; one addition per multiplication.
    """
    if w <= 0:
        return 0, 0
    n_mul = (w ** 3 - w) // 3 + w * w * s
    return n_mul, n_mul


DECODER_MODELS: Dict[str, Callable[[int, int], Tuple[int, int]]] = {
    'worst-case': worst_case_decoder_ops,
}


def encoding_complexity(params: CodeParams, costs: GateCosts = DEFAULT_COSTS) -> ComplexityReport:
    """
    Gate count of producing the n-k coded packets.

    Args:
        params: Coding parameters
        costs: Gate costs per operation

    Returns:
        ComplexityReport for the source role
    """
    w, k, s = params.redundancy, params.k, params.s
    n_mul = w * k * s
    n_add = w * (k - 1) * s
    return ComplexityReport(NodeRole.SOURCE, n_mul, n_add, costs.gates(n_mul, n_add, params.q))


def decoding_complexity(params: CodeParams, costs: GateCosts = DEFAULT_COSTS,
                        model: str = 'worst-case') -> ComplexityReport:
    """
    Gate count of recovering the missing systematic packets at a destination.

    Args:
        params: Coding parameters
        costs: Gate costs per operation
        model: Name of the decoder operation-count model

    Returns:
        ComplexityReport for the destination role
    """
    if model not in DECODER_MODELS:
        raise ValueError(f"Unknown decoder model {model!r}; expected one of {sorted(DECODER_MODELS)}")
    n_mul, n_add = DECODER_MODELS[model](params.redundancy, params.s)
    return ComplexityReport(NodeRole.DEST, n_mul, n_add, costs.gates(n_mul, n_add, params.q))


def relay_complexity(params: CodeParams, costs: GateCosts = DEFAULT_COSTS,
                     model: str = 'worst-case') -> ComplexityReport:
    """A relay decodes then re-encodes."""
    enc = encoding_complexity(params, costs)
    dec = decoding_complexity(params, costs, model)
    return ComplexityReport(NodeRole.RELAY, enc.n_mul + dec.n_mul, enc.n_add + dec.n_add,
                            enc.gates + dec.gates)


def role_complexity(params: CodeParams, role: NodeRole, costs: GateCosts = DEFAULT_COSTS,
                    model: str = 'worst-case') -> ComplexityReport:
    role = NodeRole(role)
    if role == NodeRole.SOURCE:
        return encoding_complexity(params, costs)
    if role == NodeRole.RELAY:
        return relay_complexity(params, costs, model)
    return decoding_complexity(params, costs, model)


def roles_for_path(hops: int) -> Tuple[NodeRole, ...]:
    """Source and destination always; relays when the path has two or more hops."""
    if hops < 1:
        raise ValueError(f"A path needs at least one hop, got {hops}")
    if hops == 1:
        return NodeRole.SOURCE, NodeRole.DEST
    return NodeRole.SOURCE, NodeRole.RELAY, NodeRole.DEST


@dataclass(frozen=True)
class BudgetLimits:
    """Largest feasible n per role and overall (min over the roles considered)."""
    per_role: Dict[NodeRole, int]
    overall: int


def _largest_feasible_n(k: int, s: int, q: int, role: NodeRole, ceiling: float,
                        costs: GateCosts, model: str, n_cap: int) -> int:
    if math.isinf(ceiling):
        return n_cap

    def fits(n: int) -> bool:
        return role_complexity(CodeParams(k=k, n=n, q=q, L=s * q // 8), role, costs, model).gates <= ceiling

    # Costs are increasing in n, so the feasible set is a prefix [k, n*]
    lo, hi = k, n_cap
    if fits(hi):
        return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_n_under_budget(k: int, s: int, q: int, budget: ComplexityBudget,
                       roles: Optional[Iterable[NodeRole]] = None,
                       costs: GateCosts = DEFAULT_COSTS, model: str = 'worst-case',
                       n_cap: int = MAX_BLOCK_LENGTH) -> BudgetLimits:
    """
    Largest block length each role can afford.

    n = k always fits since it costs nothing, so every bound is at least k.

    Args:
        k: Information packets
        s: Field symbols per packet
        q: Field exponent
        budget: Gate ceilings
        roles: Roles present on the path (default: all three)
        costs: Gate costs
        model: Decoder count model
        n_cap: Upper limit of the search

    Returns:
        BudgetLimits
    """
    if (s * q) % 8 != 0:
        raise ValueError(f"s={s} symbols of {q} bits is not a whole number of bytes")
    roles = tuple(NodeRole(r) for r in (roles or tuple(NodeRole)))
    n_cap = max(n_cap, k)
    per_role = {
        role: _largest_feasible_n(k, s, q, role, budget.ceiling(role), costs, model, n_cap)
        for role in roles
    }
    overall = min(per_role.values())
    logger.debug(f"Budget limits for k={k}, s={s}, q={q}: {per_role} -> {overall}")
    return BudgetLimits(per_role=per_role, overall=overall)
