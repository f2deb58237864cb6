"""
Galois Field Arithmetic

GF(2^q) arithmetic with log/antilog tables for q in {1, 4, 8}.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Primitive polynomials, including the x^q term
PRIMITIVE_POLYNOMIALS = {
    1: 0x3,    # x + 1
    4: 0x13,   # x^4 + x + 1
    8: 0x11D,  # x^8 + x^4 + x^3 + x^2 + 1
}


class GaloisField:
    """
    Finite field GF(2^q) backed by log/antilog tables.

    Addition is XOR. Multiplication goes through the exp/log tables; a full
    multiplication table is also kept as a numpy array so packet matrices can
    be combined with fancy indexing instead of Python loops.
    """

    def __init__(self, q: int):
        """
        Build the field tables.

        Args:
            q: Field exponent (bits per symbol)

        Raises:
            ValueError: If q is not a supported exponent
        """
        if q not in PRIMITIVE_POLYNOMIALS:
            raise ValueError(f"Unsupported field exponent q={q}; expected one of {sorted(PRIMITIVE_POLYNOMIALS)}")

        self.q = q
        self.size = 1 << q
        self.order = self.size - 1
        self.primitive_polynomial = PRIMITIVE_POLYNOMIALS[q]

        self.exp_table = [0] * (2 * self.order)
        self.log_table = [0] * self.size
        self._init_tables()

        self.inv_table = np.zeros(self.size, dtype=np.uint8)
        for a in range(1, self.size):
            self.inv_table[a] = self.exp_table[(self.order - self.log_table[a]) % self.order]

        self.mul_table = np.zeros((self.size, self.size), dtype=np.uint8)
        for a in range(1, self.size):
            for b in range(1, self.size):
                self.mul_table[a, b] = self.exp_table[self.log_table[a] + self.log_table[b]]

        self.mul_table.setflags(write=False)
        self.inv_table.setflags(write=False)
        logger.debug(f"Built GF(2^{q}) tables with polynomial {self.primitive_polynomial:#x}")

    def _init_tables(self):
        x = 1
        for i in range(self.order):
            self.exp_table[i] = x
            self.log_table[x] = i
            x <<= 1
            if x & self.size:
                x ^= self.primitive_polynomial
        for i in range(self.order, 2 * self.order):
            self.exp_table[i] = self.exp_table[i - self.order]

    def mul(self, a: int, b: int) -> int:
        """Multiply two field symbols."""
        if a == 0 or b == 0:
            return 0
        return self.exp_table[self.log_table[a] + self.log_table[b]]

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a nonzero symbol."""
        if a == 0:
            raise ZeroDivisionError("Zero has no multiplicative inverse in GF(2^q)")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def scale(self, scalar: int, vector: np.ndarray) -> np.ndarray:
        """Multiply every symbol of a vector (or matrix) by a scalar."""
        return self.mul_table[scalar][vector]

    def matmul(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """
        Matrix product over the field.

        Args:
            left: (r, k) symbol matrix
            right: (k, s) symbol matrix

        Returns:
            (r, s) symbol matrix
        """
        if left.shape[1] != right.shape[0]:
            raise ValueError(f"Shape mismatch for field product: {left.shape} x {right.shape}")
        if left.shape[0] == 0 or left.shape[1] == 0:
            return np.zeros((left.shape[0], right.shape[1]), dtype=np.uint8)
        products = self.mul_table[left[:, :, None], right[None, :, :]]
        return np.bitwise_xor.reduce(products, axis=1)

    def reduce_batch(self, matrices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Reduced row echelon form of a stack of matrices, in place.

        Every matrix is eliminated independently, one column at a time for the
        whole stack, taking the first nonzero row at or below the current rank
        as the pivot and clearing the column above and below it.

        Args:
            matrices: (T, R, W) symbol array; overwritten with its RREF

        Returns:
            Tuple of (rank per matrix, (T, W) mask of columns whose unit
            vector lies in the row space)
        """
        count, rows, cols = matrices.shape
        rank = np.zeros(count, dtype=np.int64)
        pivot_row = np.full((count, cols), -1, dtype=np.int64)
        row_ids = np.arange(rows)

        for col in range(cols):
            candidates = (matrices[:, :, col] != 0) & (row_ids[None, :] >= rank[:, None])
            active = np.flatnonzero(candidates.any(axis=1))
            if active.size == 0:
                continue
            pivot = candidates[active].argmax(axis=1)
            target = rank[active]

            pivot_rows = matrices[active, pivot]
            matrices[active, pivot] = matrices[active, target]
            scale = self.inv_table[pivot_rows[:, col]]
            pivot_rows = self.mul_table[scale[:, None], pivot_rows]
            matrices[active, target] = pivot_rows

            block = matrices[active]
            factors = block[:, :, col].copy()
            factors[np.arange(active.size), target] = 0
            block ^= self.mul_table[factors[:, :, None], pivot_rows[:, None, :]]
            matrices[active] = block

            pivot_row[active, col] = target
            rank[active] += 1

        weights = np.count_nonzero(matrices, axis=2)
        has_pivot = pivot_row >= 0
        pivot_weight = np.take_along_axis(weights, np.where(has_pivot, pivot_row, 0), axis=1)
        return rank, has_pivot & (pivot_weight == 1)


@lru_cache(maxsize=None)
def get_field(q: int) -> GaloisField:
    """Shared, immutable field instance for exponent q."""
    return GaloisField(q)


def gf_mul(a: int, b: int, q: int) -> int:
    """
    Multiply two symbols of GF(2^q).

    Args:
        a: First symbol, a < 2^q
        b: Second symbol, b < 2^q
        q: Field exponent

    Returns:
        Product under the field's fixed primitive polynomial
    """
    field = get_field(q)
    if not (0 <= a < field.size and 0 <= b < field.size):
        raise ValueError(f"Symbols {a}, {b} out of range for GF(2^{q})")
    return field.mul(a, b)
