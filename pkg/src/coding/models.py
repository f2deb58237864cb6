"""
Coding Models

Dataclasses for coding parameters, packets, generations and decode results.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

SUPPORTED_Q = (1, 4, 8)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.uint8)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class CodeParams:
    """
    Coding configuration consumed by every formula.

    k information packets are sent systematically, followed by n-k random
    linear combinations over GF(2^q). Packets carry L bytes, i.e. s = 8L/q
    field symbols.
    """
    k: int
    n: int
    q: int = 8
    L: int = 100

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not isinstance(self.n, int) or self.n < self.k:
            raise ValueError(f"n must be an integer with n >= k={self.k}, got {self.n!r}")
        if self.q not in SUPPORTED_Q:
            raise ValueError(f"Unsupported field exponent q={self.q}; expected one of {SUPPORTED_Q}")
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError(f"L must be a positive number of bytes, got {self.L!r}")
        if (8 * self.L) % self.q != 0:
            raise ValueError(f"8*L={8 * self.L} bits is not divisible by q={self.q}")

    @property
    def r(self) -> Fraction:
        """Coding rate k/n as an exact rational."""
        return Fraction(self.k, self.n)

    @property
    def s(self) -> int:
        """Field symbols per packet."""
        return 8 * self.L // self.q

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def with_n(self, n: int) -> 'CodeParams':
        return replace(self, n=n)

    def with_length(self, L: int) -> 'CodeParams':
        return replace(self, L=L)


@dataclass(frozen=True, eq=False)
class Packet:
    """
    A coded or systematic packet.

    Attributes:
        payload: s field symbols
        coeffs: k coefficients over the generation
        systematic_index: Source index for systematic packets, else None
    """
    payload: np.ndarray
    coeffs: np.ndarray
    systematic_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'payload', _frozen(self.payload))
        object.__setattr__(self, 'coeffs', _frozen(self.coeffs))
        if self.systematic_index is not None:
            unit = np.zeros(len(self.coeffs), dtype=np.uint8)
            unit[self.systematic_index] = 1
            if not np.array_equal(self.coeffs, unit):
                raise ValueError(f"Systematic packet {self.systematic_index} must carry a unit coefficient vector")

    @classmethod
    def systematic(cls, index: int, payload, k: int) -> 'Packet':
        coeffs = np.zeros(k, dtype=np.uint8)
        coeffs[index] = 1
        return cls(payload=payload, coeffs=coeffs, systematic_index=index)

    @property
    def is_systematic(self) -> bool:
        return self.systematic_index is not None


@dataclass(frozen=True, eq=False)
class Generation:
    """k source packets plus the seed for coded-coefficient draws."""
    packets: Tuple[Packet, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'packets', tuple(self.packets))
        indices = sorted(p.systematic_index for p in self.packets if p.is_systematic)
        if len(indices) != len(self.packets) or indices != list(range(len(self.packets))):
            raise ValueError("A generation needs exactly k systematic packets with indices 0..k-1")

    @classmethod
    def from_payloads(cls, payloads: np.ndarray, seed: int = 0) -> 'Generation':
        """Build a generation from a (k, s) payload matrix."""
        payloads = np.asarray(payloads, dtype=np.uint8)
        k = payloads.shape[0]
        packets = tuple(Packet.systematic(i, payloads[i], k) for i in range(k))
        return cls(packets=packets, seed=seed)

    @property
    def k(self) -> int:
        return len(self.packets)

    def payload_matrix(self) -> np.ndarray:
        ordered = sorted(self.packets, key=lambda p: p.systematic_index)
        return np.vstack([p.payload for p in ordered])


@dataclass(frozen=True, eq=False)
class DecodeResult:
    """
    Outcome of decoding a received packet set.

    Attributes:
        payloads: Recovered systematic payloads by source index
        full_decode: True iff the received coefficients have rank k
        rank: Rank of the received coefficient matrix
        k: Generation size
    """
    payloads: Dict[int, np.ndarray] = field(default_factory=dict)
    full_decode: bool = False
    rank: int = 0
    k: int = 0

    @property
    def recovered_indices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.payloads))

    @property
    def is_empty(self) -> bool:
        return not self.payloads
