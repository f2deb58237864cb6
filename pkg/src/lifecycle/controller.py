"""
VGNCF Controller

Closes the loop between monitoring and coding policy: loss reports update the
link database, the refreshed path is re-evaluated against the reliability
target, and the optimizer picks a new block length when the target is missed.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from src.analytics.erasure_analytics import PathProfile, reliability_nc
from src.coding.models import CodeParams
from src.complexity.complexity_model import ComplexityBudget
from src.lifecycle.state_machine import (
    EventType, LifecycleEvent, LifecycleState, TransitionResult, VgncfStateMachine,
)
from src.optimizer.utility_optimizer import optimize_rate
from src.storage.database import GeoLinkDatabase
from src.storage.models import LinkObservation

logger = logging.getLogger(__name__)


class Decision(str, Enum):
    KEEP = 'keep'
    RECODE = 'recode'
    ESCALATE = 'escalate'


@dataclass(frozen=True)
class PolicyEvent:
    instance: str
    loss_rate: float
    decision: Decision
    n: Optional[int] = None
    reliability: Optional[float] = None

    def to_dict(self):
        return {
            'instance': self.instance,
            'loss_rate': self.loss_rate,
            'decision': self.decision.value,
            'n': self.n,
            'reliability': self.reliability,
        }


class VgncfController:
    """
    Drives one VGNCF instance through its lifecycle and applies coding policy.

    The initial block length is chosen by the optimizer at activation.
    """

    def __init__(self, machine: VgncfStateMachine, linkdb: GeoLinkDatabase,
                 budget: ComplexityBudget):
        self.machine = machine
        self.linkdb = linkdb
        self.budget = budget
        self.n: Optional[int] = None
        self.decisions: List[PolicyEvent] = []

    @property
    def descriptor(self):
        return self.machine.descriptor

    @property
    def service(self):
        return self.machine.catalogues.ns_catalog[self.machine.ns_id]

    def send(self, event_type: EventType, **data) -> TransitionResult:
        return self.machine.handle_event(LifecycleEvent(event_type, data))

    def instantiate(self) -> TransitionResult:
        """
        Run the instantiation phases and pick the initial code.

        The coding-capable route and the initial block length are settled
        before any lifecycle event is sent, so a missing route leaves the
        instance untouched.

        Returns:
            TransitionResult of the last phase, or a rejection when no route exists
        """
        route = self.linkdb.extract_path(self.service.source, self.service.sink, nc_only=True)
        if not route.found:
            diagnostic = f"No coding-capable route from {self.service.source} to {self.service.sink}"
            logger.warning(f"{self.machine.instance_id}: {diagnostic}")
            return TransitionResult(accepted=False, state=self.machine.state, diagnostic=diagnostic)
        point = self._optimize(route.profile)

        result = None
        for event_type in (EventType.USER_REQUEST, EventType.OE_DISPATCH,
                           EventType.VIM_ALLOCATION_ACK, EventType.VNFM_CONFIG_ACK):
            result = self.send(event_type)
            if not result.accepted:
                return result
        self.n = point.n
        self._set_n(self.n)
        return result

    def terminate(self) -> TransitionResult:
        """Run the termination phases."""
        result = None
        for event_type in (EventType.TERMINATION_REQUEST, EventType.OE_TERMINATION_DISPATCH,
                           EventType.VNFM_DEACTIVATION_ACK, EventType.VIM_RELEASE_ACK):
            result = self.send(event_type)
            if not result.accepted:
                return result
        return result

    def monitoring_tick(self, observations: List[LinkObservation]) -> PolicyEvent:
        """
        Process one monitoring report.

        Args:
            observations: Loss counts per link since the last report

        Returns:
            PolicyEvent with the keep, recode or escalate decision

        Raises:
            ValueError: If the instance is not active or has no block length yet
        """
        if self.machine.state != LifecycleState.ACTIVE:
            raise ValueError(f"Instance {self.machine.instance_id} is not active ({self.machine.state.value})")
        if self.n is None:
            raise ValueError(f"Instance {self.machine.instance_id} was activated without a block length")

        sent = sum(o.sent for o in observations)
        loss_rate = sum(o.lost for o in observations) / sent if sent else 0.0
        self.send(EventType.MONITORING_REPORT, observations=[
            {'src': o.src, 'dst': o.dst, 'sent': o.sent, 'lost': o.lost} for o in observations])

        for obs in observations:
            self.linkdb.update_stats(obs)
        self.send(EventType.GEO_FEEDBACK, links=len(observations))

        decision = self._decide(loss_rate)
        self.decisions.append(decision)
        logger.info(f"{decision.instance}: loss {loss_rate:.4f} -> {decision.decision.value}"
                    + (f" (n={decision.n})" if decision.n is not None else ''))
        return decision

    def _decide(self, loss_rate: float) -> PolicyEvent:
        instance = self.machine.instance_id
        route = self.linkdb.extract_path(self.service.source, self.service.sink, nc_only=True)
        if not route.found:
            return PolicyEvent(instance, loss_rate, Decision.ESCALATE)
        self.send(EventType.ROUTE_UPDATE, nodes=route.nodes)

        d = self.descriptor
        current = reliability_nc(CodeParams(k=d.k, n=self.n, q=d.q, L=d.L), route.profile, route.hops)
        if current >= d.rho0:
            return PolicyEvent(instance, loss_rate, Decision.KEEP, n=self.n, reliability=current)

        point = self._optimize(route.profile)
        if point.not_applicable or point.best_effort:
            return PolicyEvent(instance, loss_rate, Decision.ESCALATE, n=self.n, reliability=current)

        self.n = point.n
        self._set_n(point.n)
        self.send(EventType.MANAGEMENT_SYNC, n=point.n)
        return PolicyEvent(instance, loss_rate, Decision.RECODE, n=point.n, reliability=point.reliability)

    def _optimize(self, profile: PathProfile):
        d = self.descriptor
        s = 8 * d.L // d.q
        return optimize_rate(d.k, s, d.q, profile, d.rho0, self.budget)

    def _set_n(self, n: int):
        record = self.machine.catalogues.nfv_instances.get(self.machine.instance_id)
        if record is not None:
            record.n = n
