"""
NFV Catalogues

In-memory repositories for network service descriptors, VGNCF descriptors,
running instances and the NFVI resource ledger.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NsDescriptor:
    """A network service and the geo-information it is deployed against."""
    id: str
    source: str
    sink: str
    geo_ref: str = ''


@dataclass(frozen=True)
class VgncfDescriptor:
    """Deployable coding function: code shape, reliability target and resource demand."""
    id: str
    k: int = 50
    L: int = 100
    q: int = 8
    rho0: float = 0.8
    resource_units: int = 4

    def __post_init__(self):
        if self.resource_units <= 0:
            raise ValueError(f"VGNCF {self.id} must request a positive resource amount")


@dataclass
class InstanceRecord:
    instance_id: str
    ns_id: str
    vnf_id: str
    n: Optional[int] = None


@dataclass
class Catalogues:
    """
    The four repositories shared by the orchestrator and the managers.

    nfvi_resources maps instance id to allocated units; an instance with no
    entry holds nothing.
    """
    ns_catalog: Dict[str, NsDescriptor] = field(default_factory=dict)
    vnf_catalog: Dict[str, VgncfDescriptor] = field(default_factory=dict)
    nfv_instances: Dict[str, InstanceRecord] = field(default_factory=dict)
    nfvi_resources: Dict[str, int] = field(default_factory=dict)

    def register_ns(self, descriptor: NsDescriptor):
        self.ns_catalog[descriptor.id] = descriptor

    def register_vnf(self, descriptor: VgncfDescriptor):
        self.vnf_catalog[descriptor.id] = descriptor

    def add_instance(self, record: InstanceRecord):
        if record.ns_id not in self.ns_catalog:
            raise ValueError(f"Unknown network service {record.ns_id!r}")
        if record.vnf_id not in self.vnf_catalog:
            raise ValueError(f"Unknown VGNCF descriptor {record.vnf_id!r}")
        self.nfv_instances[record.instance_id] = record

    def remove_instance(self, instance_id: str):
        self.nfv_instances.pop(instance_id, None)

    def allocate(self, instance_id: str, units: int):
        self.nfvi_resources[instance_id] = self.nfvi_resources.get(instance_id, 0) + units
        logger.debug(f"Allocated {units} NFVI units to {instance_id}")

    def release(self, instance_id: str) -> int:
        released = self.nfvi_resources.pop(instance_id, 0)
        logger.debug(f"Released {released} NFVI units from {instance_id}")
        return released

    def allocation(self, instance_id: str) -> int:
        return self.nfvi_resources.get(instance_id, 0)

    def total_allocated(self) -> int:
        return sum(self.nfvi_resources.values())
