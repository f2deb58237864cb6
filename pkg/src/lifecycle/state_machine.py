"""
VGNCF Lifecycle State Machine

Instantiation, execution/monitoring and termination of a VGNCF instance as a
deterministic event-driven machine. Instantiation completes once both the VIM
allocation and the VNFM configuration acknowledgements are in, in either
order; termination completes once both the VNFM deactivation and the VIM
release acknowledgements are in.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

from src.lifecycle.catalogues import Catalogues, InstanceRecord

logger = logging.getLogger(__name__)


class LifecycleState(str, Enum):
    IDLE = 'Idle'
    REQUESTED = 'Requested'
    INSTANTIATING = 'Instantiating'
    RESOURCES_ALLOCATED = 'ResourcesAllocated'
    CONFIGURED = 'Configured'
    ACTIVE = 'Active'
    TERMINATING = 'Terminating'
    TERMINATED = 'Terminated'


class EventType(str, Enum):
    """Triggers, named after the exchange they stand for; value is the phase label."""
    USER_REQUEST = '1.1'
    OE_DISPATCH = '1.2'
    VIM_ALLOCATION_ACK = '1.3'
    VNFM_CONFIG_ACK = '1.4'
    MANAGEMENT_SYNC = '2.1'
    RESOURCE_REPORT = '2.2'
    ROUTE_UPDATE = '2.3'
    MONITORING_REPORT = '2.4'
    GEO_FEEDBACK = '2.5'
    TERMINATION_REQUEST = '3.1'
    OE_TERMINATION_DISPATCH = '3.2'
    VNFM_DEACTIVATION_ACK = '3.3'
    VIM_RELEASE_ACK = '3.4'

    @property
    def phase(self) -> str:
        return self.value


INSTANTIATION_COMPLETE = ('1.5', 'INSTANTIATION_COMPLETE')
TERMINATION_COMPLETE = ('3.5', 'TERMINATION_COMPLETE')

EXECUTION_EVENTS = {
    EventType.MANAGEMENT_SYNC, EventType.RESOURCE_REPORT, EventType.ROUTE_UPDATE,
    EventType.MONITORING_REPORT, EventType.GEO_FEEDBACK,
}


@dataclass(frozen=True)
class LifecycleEvent:
    type: EventType
    data: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class PhaseRecord:
    instance: str
    phase: str
    event: str
    state_after: LifecycleState
    t: int
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'instance': self.instance,
            'phase': self.phase,
            'event': self.event,
            'state_after': self.state_after.value,
            't': self.t,
            'data': self.data,
        }


@dataclass
class TransitionResult:
    accepted: bool
    state: LifecycleState
    actions: List[str] = field(default_factory=list)
    diagnostic: Optional[str] = None


class VgncfStateMachine:
    """
    Lifecycle of one VGNCF instance.

    Time is a logical clock advanced once per recorded phase, so identical
    event sequences give identical histories. Rejected events leave the
    machine and the catalogues untouched.
    """

    def __init__(self, instance_id: str, catalogues: Catalogues, ns_id: str, vnf_id: str):
        if ns_id not in catalogues.ns_catalog:
            raise ValueError(f"Unknown network service {ns_id!r}")
        if vnf_id not in catalogues.vnf_catalog:
            raise ValueError(f"Unknown VGNCF descriptor {vnf_id!r}")

        self.instance_id = instance_id
        self.catalogues = catalogues
        self.ns_id = ns_id
        self.vnf_id = vnf_id
        self.state = LifecycleState.IDLE
        self.history: List[PhaseRecord] = []
        self.clock = 0
        self._termination_dispatched = False
        self._termination_acks = set()

    @property
    def descriptor(self):
        return self.catalogues.vnf_catalog[self.vnf_id]

    def handle_event(self, event: LifecycleEvent) -> TransitionResult:
        """
        Apply one event.

        Args:
            event: Phase trigger

        Returns:
            TransitionResult; accepted is False with a diagnostic when the
            event is out of order
        """
        event_type = EventType(event.type)
        handler = getattr(self, f"_on_{event_type.name.lower()}", None)
        if event_type in EXECUTION_EVENTS:
            handler = self._on_execution
        diagnostic = self._check(event_type)
        if diagnostic:
            logger.warning(f"{self.instance_id}: rejected {event_type.name} in {self.state.value}: {diagnostic}")
            return TransitionResult(accepted=False, state=self.state, diagnostic=diagnostic)

        actions = handler(event)
        return TransitionResult(accepted=True, state=self.state, actions=actions)

    def _check(self, event_type: EventType) -> Optional[str]:
        s = self.state
        if s == LifecycleState.TERMINATED:
            return 'instance is terminated'
        if event_type == EventType.USER_REQUEST and s != LifecycleState.IDLE:
            return 'instantiation already requested'
        if event_type == EventType.OE_DISPATCH and s != LifecycleState.REQUESTED:
            return 'no pending instantiation request'
        if event_type == EventType.VIM_ALLOCATION_ACK and s not in (
                LifecycleState.INSTANTIATING, LifecycleState.CONFIGURED):
            return 'no outstanding resource allocation'
        if event_type == EventType.VNFM_CONFIG_ACK and s not in (
                LifecycleState.INSTANTIATING, LifecycleState.RESOURCES_ALLOCATED):
            return 'no outstanding configuration'
        if event_type in EXECUTION_EVENTS and s != LifecycleState.ACTIVE:
            return 'instance is not active'
        if event_type == EventType.TERMINATION_REQUEST and s != LifecycleState.ACTIVE:
            return 'no active instance to terminate'
        if event_type == EventType.OE_TERMINATION_DISPATCH and (
                s != LifecycleState.TERMINATING or self._termination_dispatched):
            return 'no pending termination request'
        if event_type in (EventType.VNFM_DEACTIVATION_ACK, EventType.VIM_RELEASE_ACK):
            if s != LifecycleState.TERMINATING or not self._termination_dispatched:
                return 'termination not dispatched'
            if event_type in self._termination_acks:
                return 'acknowledgement already received'
        return None

    def _record(self, phase: str, event: str, data: Optional[Dict[str, Any]] = None):
        self.clock += 1
        self.history.append(PhaseRecord(instance=self.instance_id, phase=phase, event=event,
                                        state_after=self.state, t=self.clock, data=dict(data or {})))

    # Instantiation

    def _on_user_request(self, event: LifecycleEvent) -> List[str]:
        self.state = LifecycleState.REQUESTED
        self._record(EventType.USER_REQUEST.phase, EventType.USER_REQUEST.name, event.data)
        return ['oe:validate-request']

    def _on_oe_dispatch(self, event: LifecycleEvent) -> List[str]:
        self.catalogues.add_instance(InstanceRecord(self.instance_id, self.ns_id, self.vnf_id))
        self.state = LifecycleState.INSTANTIATING
        self._record(EventType.OE_DISPATCH.phase, EventType.OE_DISPATCH.name, event.data)
        return ['vim:allocate', 'vnfm:configure']

    def _on_vim_allocation_ack(self, event: LifecycleEvent) -> List[str]:
        units = self.descriptor.resource_units
        self.catalogues.allocate(self.instance_id, units)
        if self.state == LifecycleState.CONFIGURED:
            return self._complete_instantiation(EventType.VIM_ALLOCATION_ACK, event)
        self.state = LifecycleState.RESOURCES_ALLOCATED
        self._record(EventType.VIM_ALLOCATION_ACK.phase, EventType.VIM_ALLOCATION_ACK.name, event.data)
        return []

    def _on_vnfm_config_ack(self, event: LifecycleEvent) -> List[str]:
        if self.state == LifecycleState.RESOURCES_ALLOCATED:
            return self._complete_instantiation(EventType.VNFM_CONFIG_ACK, event)
        self.state = LifecycleState.CONFIGURED
        self._record(EventType.VNFM_CONFIG_ACK.phase, EventType.VNFM_CONFIG_ACK.name, event.data)
        return []

    def _complete_instantiation(self, last: EventType, event: LifecycleEvent) -> List[str]:
        self.state = LifecycleState.ACTIVE
        self._record(last.phase, last.name, event.data)
        self._record(*INSTANTIATION_COMPLETE)
        logger.info(f"{self.instance_id}: active with {self.catalogues.allocation(self.instance_id)} NFVI units")
        return ['oe:ack-instantiation']

    # Execution and monitoring

    def _on_execution(self, event: LifecycleEvent) -> List[str]:
        event_type = EventType(event.type)
        self._record(event_type.phase, event_type.name, event.data)
        return []

    # Termination

    def _on_termination_request(self, event: LifecycleEvent) -> List[str]:
        self.state = LifecycleState.TERMINATING
        self._record(EventType.TERMINATION_REQUEST.phase, EventType.TERMINATION_REQUEST.name, event.data)
        return ['oe:validate-termination']

    def _on_oe_termination_dispatch(self, event: LifecycleEvent) -> List[str]:
        self._termination_dispatched = True
        self._record(EventType.OE_TERMINATION_DISPATCH.phase, EventType.OE_TERMINATION_DISPATCH.name,
                     event.data)
        return ['vnfm:deactivate', 'vim:release']

    def _on_vnfm_deactivation_ack(self, event: LifecycleEvent) -> List[str]:
        return self._termination_ack(EventType.VNFM_DEACTIVATION_ACK, event)

    def _on_vim_release_ack(self, event: LifecycleEvent) -> List[str]:
        self.catalogues.release(self.instance_id)
        return self._termination_ack(EventType.VIM_RELEASE_ACK, event)

    def _termination_ack(self, ack: EventType, event: LifecycleEvent) -> List[str]:
        self._termination_acks.add(ack)
        if len(self._termination_acks) < 2:
            self._record(ack.phase, ack.name, event.data)
            return []
        self.state = LifecycleState.TERMINATED
        self.catalogues.remove_instance(self.instance_id)
        self._record(ack.phase, ack.name, event.data)
        self._record(*TERMINATION_COMPLETE)
        logger.info(f"{self.instance_id}: terminated")
        return ['oe:ack-termination']

    # Event log

    def export_log(self) -> str:
        """Phase history as JSON lines."""
        return ''.join(json.dumps(record.to_dict(), sort_keys=True) + '\n' for record in self.history)


def replay(lines: Iterable[str], catalogues: Catalogues, ns_id: str, vnf_id: str) -> VgncfStateMachine:
    """
    Rebuild a machine by re-applying the triggers recorded in a JSON-lines log.

    Completion phases are derived, not replayed.
    """
    machine = None
    for line in lines:
        if not line.strip():
            continue
        record = json.loads(line)
        if machine is None:
            machine = VgncfStateMachine(record['instance'], catalogues, ns_id, vnf_id)
        if record['event'] not in EventType.__members__:
            continue
        result = machine.handle_event(LifecycleEvent(EventType[record['event']], record.get('data', {})))
        if not result.accepted:
            raise ValueError(f"Log replay diverged at t={record['t']}: {result.diagnostic}")
    if machine is None:
        raise ValueError("Empty event log")
    return machine
