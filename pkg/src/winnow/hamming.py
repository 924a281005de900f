"""Hamming(2^m - 1) syndrome codec underlying the Winnow protocol.

Bit blocks are 0/1 sequences (lists or numpy arrays). Hamming positions are
1-based: position p lives at array index p - 1. With that convention the
parity-check matrix column at position j reads, least-significant row first,
as the binary number j, so a packed syndrome value directly names the
position to flip.

All functions here are pure and hold no shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class BlockLengthError(ValueError):
    """A bit block does not have the length the code expects."""


@dataclass(frozen=True)
class HammingParams:
    """Parameters of the Hamming code with m syndrome bits (m >= 3)."""

    m: int

    def __post_init__(self) -> None:
        if self.m < 3:
            raise ValueError(f"m must be >= 3, got {self.m}")

    @classmethod
    def for_block_size(cls, n: int) -> "HammingParams":
        """Parameters whose Winnow block length 2^m equals n."""
        m = n.bit_length() - 1
        if 1 << m != n:
            raise ValueError(f"block size must be a power of two, got {n}")
        return cls(m)

    @property
    def n_h(self) -> int:
        """Hamming block length 2^m - 1."""
        return (1 << self.m) - 1

    @property
    def n(self) -> int:
        """Winnow block length 2^m (Hamming block plus one parity bit)."""
        return 1 << self.m

    @property
    def k(self) -> int:
        """Payload length n_h - m remaining after privacy maintenance."""
        return self.n_h - self.m

    @property
    def pm_positions(self) -> tuple[int, ...]:
        """1-based positions {2^j} discarded for privacy maintenance."""
        return tuple(1 << j for j in range(self.m))


@lru_cache(maxsize=None)
def parity_check_matrix(params: HammingParams) -> np.ndarray:
    """m x n_h 0/1 matrix; entry (i, j) is bit i-1 of the column number j.

    Rows are indexed 1..m and columns 1..n_h in the maths; the returned
    array is 0-indexed. Computed on demand rather than stored as literals.
    """
    cols = np.arange(1, params.n_h + 1)
    rows = np.arange(params.m)
    matrix = ((cols[None, :] >> rows[:, None]) & 1).astype(np.uint8)
    matrix.setflags(write=False)
    return matrix


def _as_block(block, params: HammingParams) -> np.ndarray:
    arr = np.asarray(block, dtype=np.uint8)
    if arr.shape != (params.n_h,):
        raise BlockLengthError(
            f"expected a block of {params.n_h} bits, got shape {arr.shape}"
        )
    return arr


def syndrome(block, params: HammingParams) -> int:
    """Contract a length-n_h block with the parity-check matrix.

    Returns the syndrome packed as an integer with syndrome bit i at
    weight 2^(i-1). Because column j of the matrix is the binary number j,
    the packed value equals the XOR of the 1-based positions holding a 1.
    """
    arr = _as_block(block, params)
    positions = np.flatnonzero(arr) + 1
    return int(np.bitwise_xor.reduce(positions, initial=0))


def correction_position(s_d: int) -> int | None:
    """Position named by a syndrome difference, or None when it is zero.

    Flipping the returned 1-based position in either party's block drives
    the recomputed syndrome difference to zero.
    """
    return None if s_d == 0 else s_d


def apply_privacy_maintenance(block, params: HammingParams) -> np.ndarray:
    """Drop the pm_positions bits from a length-n_h block, order preserved."""
    arr = _as_block(block, params)
    return np.delete(arr, np.array(params.pm_positions) - 1)
