"""
Unit Tests for the VGNCF Lifecycle and Controller

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import json
import pytest
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from hypothesis import settings, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, rule

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.complexity.complexity_model import ComplexityBudget
from src.lifecycle.catalogues import Catalogues, InstanceRecord, NsDescriptor, VgncfDescriptor
from src.lifecycle.controller import Decision, VgncfController
from src.lifecycle.state_machine import (
    EventType, LifecycleEvent, LifecycleState, VgncfStateMachine, replay,
)
from src.storage.database import GeoLinkDatabase
from src.storage.models import LinkObservation

SAMPLE = Path(__file__).parent.parent / 'data' / 'sample_topology.json'

INSTANTIATE = (EventType.USER_REQUEST, EventType.OE_DISPATCH,
               EventType.VIM_ALLOCATION_ACK, EventType.VNFM_CONFIG_ACK)
TERMINATE = (EventType.TERMINATION_REQUEST, EventType.OE_TERMINATION_DISPATCH,
             EventType.VNFM_DEACTIVATION_ACK, EventType.VIM_RELEASE_ACK)


def make_catalogues(units: int = 4) -> Catalogues:
    catalogues = Catalogues()
    catalogues.register_ns(NsDescriptor('ns-1', 'GW', 'SINK', geo_ref='sample'))
    catalogues.register_vnf(VgncfDescriptor('vgncf', resource_units=units))
    return catalogues


def make_machine(catalogues: Catalogues = None) -> VgncfStateMachine:
    return VgncfStateMachine('vgncf-1', catalogues or make_catalogues(), 'ns-1', 'vgncf')


def send(machine: VgncfStateMachine, *event_types: EventType):
    return [machine.handle_event(LifecycleEvent(event_type)) for event_type in event_types]


class TestStateMachine:
    """Test lifecycle phase ordering."""

    def test_instantiation(self):
        """1.1 to 1.4 activate the instance and allocate its resources."""
        machine = make_machine()
        results = send(machine, *INSTANTIATE)

        assert all(r.accepted for r in results)
        assert machine.state == LifecycleState.ACTIVE
        assert machine.catalogues.allocation('vgncf-1') == 4
        assert 'vgncf-1' in machine.catalogues.nfv_instances
        assert [r.phase for r in machine.history] == ['1.1', '1.2', '1.3', '1.4', '1.5']

    def test_acks_in_either_order(self):
        """Configuration may be acknowledged before allocation."""
        machine = make_machine()
        send(machine, EventType.USER_REQUEST, EventType.OE_DISPATCH, EventType.VNFM_CONFIG_ACK)
        assert machine.state == LifecycleState.CONFIGURED
        send(machine, EventType.VIM_ALLOCATION_ACK)
        assert machine.state == LifecycleState.ACTIVE

    def test_out_of_order_rejected(self):
        """An allocation ack before dispatch is refused and changes nothing."""
        machine = make_machine()
        send(machine, EventType.USER_REQUEST)
        result = machine.handle_event(LifecycleEvent(EventType.VIM_ALLOCATION_ACK))

        assert not result.accepted
        assert result.diagnostic
        assert machine.state == LifecycleState.REQUESTED
        assert len(machine.history) == 1
        assert machine.catalogues.allocation('vgncf-1') == 0

    def test_monitoring_requires_active(self):
        """Execution phases only run on an active instance."""
        machine = make_machine()
        assert not send(machine, EventType.MONITORING_REPORT)[0].accepted

    def test_termination(self):
        """3.1 to 3.4 release resources and remove the instance."""
        machine = make_machine()
        send(machine, *INSTANTIATE)
        results = send(machine, *TERMINATE)

        assert all(r.accepted for r in results)
        assert machine.state == LifecycleState.TERMINATED
        assert 'vgncf-1' not in machine.catalogues.nfv_instances
        assert machine.catalogues.total_allocated() == 0
        assert machine.history[-1].phase == '3.5'

    def test_termination_acks_need_dispatch(self):
        """3.3 before 3.2 is refused."""
        machine = make_machine()
        send(machine, *INSTANTIATE, EventType.TERMINATION_REQUEST)
        assert not send(machine, EventType.VNFM_DEACTIVATION_ACK)[0].accepted
        send(machine, EventType.OE_TERMINATION_DISPATCH, EventType.VIM_RELEASE_ACK)
        assert machine.state == LifecycleState.TERMINATING
        assert not send(machine, EventType.VIM_RELEASE_ACK)[0].accepted

    def test_terminated_is_final(self):
        """Nothing is accepted after termination."""
        machine = make_machine()
        send(machine, *INSTANTIATE, *TERMINATE)
        assert not any(r.accepted for r in send(machine, *EventType))

    def test_logical_clock(self):
        """Every recorded phase advances the clock by one."""
        machine = make_machine()
        send(machine, *INSTANTIATE, EventType.RESOURCE_REPORT, *TERMINATE)
        assert [r.t for r in machine.history] == list(range(1, len(machine.history) + 1))

    def test_unknown_descriptors(self):
        """Machines need registered descriptors."""
        with pytest.raises(ValueError):
            VgncfStateMachine('x', make_catalogues(), 'ns-missing', 'vgncf')
        with pytest.raises(ValueError):
            make_catalogues().add_instance(InstanceRecord('x', 'ns-1', 'missing'))

    def test_export_and_replay(self):
        """Replaying the log reproduces the history."""
        machine = make_machine()
        send(machine, *INSTANTIATE)
        machine.handle_event(LifecycleEvent(EventType.RESOURCE_REPORT, {'units': 4}))
        send(machine, *TERMINATE)

        log = machine.export_log()
        lines = log.splitlines()
        assert all(json.loads(line)['instance'] == 'vgncf-1' for line in lines)

        rebuilt = replay(lines, make_catalogues(), 'ns-1', 'vgncf')
        assert rebuilt.export_log() == log
        assert rebuilt.state == LifecycleState.TERMINATED

    def test_replay_empty_log(self):
        """An empty log cannot be replayed."""
        with pytest.raises(ValueError):
            replay([], make_catalogues(), 'ns-1', 'vgncf')


def check_invariants(machine: VgncfStateMachine, catalogues: Catalogues, units: int):
    """Clock, resource and registration invariants that hold after every event."""
    assert machine.clock == len(machine.history)
    state = machine.state
    allocated = catalogues.allocation(machine.instance_id)
    registered = machine.instance_id in catalogues.nfv_instances
    if state == LifecycleState.ACTIVE:
        assert allocated == units and registered
    if state in (LifecycleState.IDLE, LifecycleState.REQUESTED, LifecycleState.TERMINATED):
        assert allocated == 0 and not registered


class TestRandomSequences:
    """Bulk random event sequences against the lifecycle invariants."""

    def test_ten_thousand_sequences(self):
        """Rejected events change nothing; accepted ones keep resources consistent."""
        rng = np.random.default_rng(20160101)
        events = list(EventType)
        for _ in range(10_000):
            catalogues = make_catalogues(units=3)
            machine = make_machine(catalogues)
            for index in rng.integers(0, len(events), size=30):
                before = len(machine.history)
                state = machine.state
                result = machine.handle_event(LifecycleEvent(events[index]))
                if not result.accepted:
                    assert len(machine.history) == before
                    assert machine.state == state
                check_invariants(machine, catalogues, units=3)


class LifecycleMachine(RuleBasedStateMachine):
    """Random event sequences never break the catalogue invariants."""

    def __init__(self):
        super().__init__()
        self.catalogues = make_catalogues(units=3)
        self.machine = make_machine(self.catalogues)

    @rule(event_type=st.sampled_from(list(EventType)))
    def handle(self, event_type):
        before = len(self.machine.history)
        state = self.machine.state
        result = self.machine.handle_event(LifecycleEvent(event_type))
        if not result.accepted:
            assert len(self.machine.history) == before
            assert self.machine.state == state

    @invariant()
    def invariants_hold(self):
        check_invariants(self.machine, self.catalogues, units=3)


TestLifecycleMachine = LifecycleMachine.TestCase
TestLifecycleMachine.settings = settings(max_examples=200, stateful_step_count=30, deadline=None)


class TestController:
    """Test the monitoring loop and recoding decisions."""

    def setup_method(self):
        self.db = GeoLinkDatabase().ingest(SAMPLE.read_text(encoding='utf-8'))
        self.catalogues = make_catalogues()
        self.machine = make_machine(self.catalogues)
        self.controller = VgncfController(self.machine, self.db, ComplexityBudget.uniform(10e6))

    def teardown_method(self):
        self.db.close()

    def observations(self, loss: float, minute: int = 0):
        stamp = datetime(2026, 10, 1, 8, minute, tzinfo=timezone.utc)
        return [LinkObservation(src, dst, sent=100, lost=round(loss * 100), timestamp=stamp)
                for src, dst in (('GW', 'R1'), ('R1', 'SINK'))]

    def test_instantiate_picks_initial_code(self):
        """Activation optimizes n for the coding-capable route."""
        assert self.controller.instantiate().accepted
        assert self.controller.n == 51
        assert self.catalogues.nfv_instances['vgncf-1'].n == 51

    def test_keep_on_normal_loss(self):
        """Loss at the expected level keeps the code."""
        self.controller.instantiate()
        event = self.controller.monitoring_tick(self.observations(0.05))

        assert event.decision == Decision.KEEP
        assert event.n == 51
        phases = [r.phase for r in self.machine.history]
        assert phases[-3:] == ['2.4', '2.5', '2.3']

    def test_recode_on_loss_spike(self):
        """A spike drives delta to 0.14 and forces more redundancy."""
        self.controller.instantiate()
        self.controller.monitoring_tick(self.observations(0.05))
        event = self.controller.monitoring_tick(self.observations(0.5, minute=1))

        assert self.db.get_link('GW', 'R1').delta == pytest.approx(0.14)
        assert event.decision == Decision.RECODE
        assert 51 < event.n <= 60
        assert event.reliability >= 0.8
        assert self.controller.n == event.n
        assert self.machine.history[-1].phase == '2.1'

    def test_escalate_when_unreachable(self):
        """Links too bad for any affordable code escalate."""
        self.controller.instantiate()
        for minute in range(6):
            event = self.controller.monitoring_tick(self.observations(1.0, minute=minute))
        assert event.decision == Decision.ESCALATE

    def test_tick_requires_active(self):
        """Monitoring before activation is an error."""
        with pytest.raises(ValueError):
            self.controller.monitoring_tick(self.observations(0.05))

    def test_full_cycle(self):
        """Instantiate, recode, terminate."""
        self.controller.instantiate()
        self.controller.monitoring_tick(self.observations(0.5))
        assert self.controller.terminate().accepted
        assert self.machine.state == LifecycleState.TERMINATED
        assert self.catalogues.total_allocated() == 0

    def test_instantiate_without_route_stays_idle(self):
        """No coding-capable route: nothing is sent and no resources are held."""
        self.db.execute('DELETE FROM links WHERE src = ? AND dst = ?', ('GW', 'R1'))
        self.db.execute('DELETE FROM links WHERE src = ? AND dst = ?', ('GW', 'R3'))

        result = self.controller.instantiate()

        assert not result.accepted
        assert 'No coding-capable route' in result.diagnostic
        assert self.machine.state == LifecycleState.IDLE
        assert self.machine.history == []
        assert self.catalogues.allocation('vgncf-1') == 0
        assert 'vgncf-1' not in self.catalogues.nfv_instances
        assert self.controller.n is None

    def test_tick_requires_block_length(self):
        """An instance activated outside the controller has no code to evaluate."""
        send(self.machine, *INSTANTIATE)
        before = len(self.machine.history)

        assert self.machine.state == LifecycleState.ACTIVE
        with pytest.raises(ValueError):
            self.controller.monitoring_tick(self.observations(0.05))
        assert len(self.machine.history) == before
