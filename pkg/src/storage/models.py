"""
Link Database Models

Dataclasses for geo-localized nodes, their links and loss observations.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Dict, Optional, Tuple


class Role(str, Enum):
    SOURCE = 'source'
    RELAY = 'relay'
    SINK = 'sink'


@dataclass
class GeoNode:
    """A node with its GNSS position."""
    id: str
    lat: float
    lon: float
    role: Role = Role.RELAY
    nc_capable: bool = True

    def __post_init__(self):
        self.role = Role(self.role)
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"Node {self.id}: latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"Node {self.id}: longitude {self.lon} outside [-180, 180]")

    def to_dict(self) -> Dict:
        return {
            'id': self.id,
            'lat': self.lat,
            'lon': self.lon,
            'role': self.role.value,
            'nc_capable': self.nc_capable,
        }


@dataclass
class GeoLink:
    """A directed link and its current erasure estimate."""
    src: str
    dst: str
    delta: float
    samples: int = 0
    updated_at: Optional[str] = None

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"Link {self.src}->{self.dst} is a self-loop")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"Link {self.src}->{self.dst}: delta {self.delta} outside [0, 1]")
        if self.samples < 0:
            raise ValueError(f"Link {self.src}->{self.dst}: negative sample count {self.samples}")

    @property
    def key(self) -> Tuple[str, str]:
        return self.src, self.dst

    @property
    def label(self) -> str:
        return f"{self.src}->{self.dst}"

    def to_dict(self) -> Dict:
        return {
            'src': self.src,
            'dst': self.dst,
            'delta': self.delta,
            'samples': self.samples,
            'updated_at': self.updated_at,
        }


@dataclass(frozen=True)
class LinkObservation:
    """Packets sent and lost on a link over one reporting interval."""
    src: str
    dst: str
    sent: int
    lost: int
    timestamp: Optional[datetime] = None

    def __post_init__(self):
        if self.sent <= 0:
            raise ValueError(f"Observation on {self.src}->{self.dst} needs sent > 0, got {self.sent}")
        if not 0 <= self.lost <= self.sent:
            raise ValueError(f"Observation on {self.src}->{self.dst}: lost={self.lost} outside [0, {self.sent}]")

    @property
    def link(self) -> Tuple[str, str]:
        return self.src, self.dst

    @property
    def loss_rate(self) -> float:
        return self.lost / self.sent
