"""
Systematic Network Codec

Systematic encoder, Gaussian-elimination decoder and relay re-encoder over
GF(2^q). Coefficients are drawn from numpy's PCG64 generator so a seed
reproduces the same coded packets on every platform.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from enum import Enum
from typing import Iterable, List

import numpy as np

from src.coding.galois_field import get_field
from src.coding.models import CodeParams, DecodeResult, Generation, Packet

logger = logging.getLogger(__name__)


class PartialPolicy(str, Enum):
    """What a relay forwards when it could not decode the full generation."""
    RECOVERED_SPAN = 'recovered-span'
    ZERO_FILL = 'zero-fill'


def coefficient_rng(seed: int) -> np.random.Generator:
    """PCG64 generator used for every coefficient draw."""
    return np.random.Generator(np.random.PCG64(seed))


def _draw_coefficients(seed: int, rows: int, cols: int, q: int) -> np.ndarray:
    rng = coefficient_rng(seed)
    return rng.integers(0, 1 << q, size=(rows, cols), dtype=np.int64).astype(np.uint8)


def _check_packets(packets: Iterable[Packet], params: CodeParams):
    for packet in packets:
        if len(packet.payload) != params.s:
            raise ValueError(f"Payload length {len(packet.payload)} does not match s={params.s}")
        if len(packet.coeffs) != params.k:
            raise ValueError(f"Coefficient width {len(packet.coeffs)} does not match k={params.k}")


def encode(gen: Generation, params: CodeParams) -> List[Packet]:
    """
    Encode a generation into n packets.

    The first k outputs are the systematic packets unchanged; the remaining
    n-k carry coefficient vectors drawn uniformly from GF(2^q)^k with the
    generation seed.

    Args:
        gen: Source generation of k packets
        params: Coding parameters

    Returns:
        List of n packets

    Raises:
        ValueError: If the generation does not match params
    """
    if gen.k != params.k:
        raise ValueError(f"Generation has {gen.k} packets but k={params.k}")
    _check_packets(gen.packets, params)

    systematic = sorted(gen.packets, key=lambda p: p.systematic_index)
    if params.n == params.k:
        return list(systematic)

    field = get_field(params.q)
    coeffs = _draw_coefficients(gen.seed, params.redundancy, params.k, params.q)
    payloads = field.matmul(coeffs, gen.payload_matrix())
    coded = [Packet(payload=payloads[i], coeffs=coeffs[i]) for i in range(params.redundancy)]
    return systematic + coded


def decode(received: Iterable[Packet], params: CodeParams) -> DecodeResult:
    """
    Decode a set of received packets by Gaussian elimination.

    Received systematic packets are taken as known; their contribution is
    removed from the coded packets, and the coded packets are reduced over the
    remaining unknown columns. Any unknown whose unit vector appears in the
    reduced row space is recovered even when the full rank is not reached.

    Args:
        received: Received packets (any order, duplicates allowed)
        params: Coding parameters

    Returns:
        DecodeResult with recovered payloads and the full-decode flag
    """
    received = list(received)
    _check_packets(received, params)
    k, s = params.k, params.s
    field = get_field(params.q)

    known = {}
    coded = []
    for packet in received:
        if packet.is_systematic:
            known.setdefault(packet.systematic_index, packet.payload)
        else:
            coded.append(packet)

    unknown = [i for i in range(k) if i not in known]
    if not unknown:
        return DecodeResult(payloads=dict(sorted(known.items())), full_decode=True, rank=k, k=k)
    if not coded:
        return DecodeResult(payloads=dict(sorted(known.items())), full_decode=False, rank=len(known), k=k)

    coeffs = np.vstack([p.coeffs for p in coded])
    payloads = np.vstack([p.payload for p in coded])
    if known:
        known_idx = sorted(known)
        known_payloads = np.vstack([known[i] for i in known_idx])
        payloads = payloads ^ field.matmul(coeffs[:, known_idx], known_payloads)

    w = len(unknown)
    augmented = np.hstack([coeffs[:, unknown], payloads]).astype(np.uint8)
    rows = augmented.shape[0]

    pivot_cols = []
    row = 0
    for col in range(w):
        if row >= rows:
            break
        candidates = np.flatnonzero(augmented[row:, col]) + row
        if candidates.size == 0:
            continue
        pivot = candidates[0]
        if pivot != row:
            augmented[[row, pivot]] = augmented[[pivot, row]]
        augmented[row] = field.scale(field.inv(int(augmented[row, col])), augmented[row])
        others = np.flatnonzero(augmented[:, col])
        others = others[others != row]
        if others.size:
            factors = augmented[others, col]
            augmented[others] ^= field.mul_table[factors[:, None], augmented[row][None, :]]
        pivot_cols.append(col)
        row += 1

    recovered = dict(known)
    for i, col in enumerate(pivot_cols):
        if np.count_nonzero(augmented[i, :w]) == 1:
            recovered[unknown[col]] = augmented[i, w:].copy()

    rank = len(known) + len(pivot_cols)
    full = rank == k
    if not full:
        logger.debug(f"Partial decode: rank {rank}/{k}, recovered {len(recovered)}")
    return DecodeResult(payloads=dict(sorted(recovered.items())), full_decode=full, rank=rank, k=k)


def reencode(recovered: DecodeResult, params: CodeParams, seed: int,
             policy: PartialPolicy = PartialPolicy.RECOVERED_SPAN) -> List[Packet]:
    """
    Re-encode at a relay.

    After a full decode the relay emits a fresh encoding of the generation.
    Otherwise, under RECOVERED_SPAN, it forwards the recovered systematic
    packets plus random combinations of the recovered set only, padded to n
    packets. Under ZERO_FILL it substitutes zero payloads for the missing
    indices and encodes the full generation; those indices stay lost.

    Args:
        recovered: Decode result at the relay
        params: Coding parameters
        seed: Seed for the relay's coefficient draws
        policy: Partial-decode policy

    Returns:
        n packets, or an empty list when nothing was recovered
    """
    if recovered.is_empty:
        return []

    k, s = params.k, params.s
    if recovered.full_decode or policy == PartialPolicy.ZERO_FILL:
        matrix = np.zeros((k, s), dtype=np.uint8)
        for index, payload in recovered.payloads.items():
            matrix[index] = payload
        return encode(Generation.from_payloads(matrix, seed=seed), params)

    field = get_field(params.q)
    indices = list(recovered.recovered_indices)
    known_payloads = np.vstack([recovered.payloads[i] for i in indices])
    systematic = [Packet.systematic(i, recovered.payloads[i], k) for i in indices]

    extra = params.n - len(indices)
    coeffs = np.zeros((extra, k), dtype=np.uint8)
    coeffs[:, indices] = _draw_coefficients(seed, extra, len(indices), params.q)
    payloads = field.matmul(coeffs[:, indices], known_payloads)
    combos = [Packet(payload=payloads[i], coeffs=coeffs[i]) for i in range(extra)]
    return systematic + combos
