"""Exact combinatorics of error transitions under one Winnow pass.

Everything here is computed in exact integer or rational arithmetic
(``fractions.Fraction``); callers convert to floats only for presentation or
for the floating-point ensemble model in :mod:`winnow.efficiency`.

The per-block picture: an N = 2^m bit block first loses one bit after the
parity comparison, then (only when the block parity disagreed, i.e. the
error count is odd) the Hamming correction acts on the remaining
n_h = N - 1 bits, and finally the m privacy-maintenance positions are
discarded from corrected blocks. The tables produced by
:func:`transition_table` track the expected error count through each of
those stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .hamming import HammingParams, syndrome

#: Minimum Hamming distance of the codes used here (single-error correcting).
HAMMING_DISTANCE = 3

#: Refuse brute-force enumeration beyond this many patterns.
BRUTE_FORCE_CAP = 10_000_000


class DegenerateTransitionError(ValueError):
    """Conditional transition requested where no nonzero syndrome exists."""


def _m_for_block_length(n_h: int) -> int:
    m = (n_h + 1).bit_length() - 1
    if (1 << m) - 1 != n_h or m < 3:
        raise ValueError(f"block length must be 2^m - 1 with m >= 3, got {n_h}")
    return m


@dataclass(frozen=True)
class SyndromeZeroCounts:
    """Exact split of weight-n_i error patterns by syndrome difference."""

    n_h: int
    n_i: int
    count_zero: int
    count_nonzero: int

    @property
    def total(self) -> int:
        return self.count_zero + self.count_nonzero

    @property
    def fraction_zero(self) -> Fraction:
        """Probability that a uniform weight-n_i pattern has zero syndrome."""
        return Fraction(self.count_zero, self.total)

    @property
    def fraction_nonzero(self) -> Fraction:
        return Fraction(self.count_nonzero, self.total)


@lru_cache(maxsize=None)
def count_syndrome_zero(n_h: int, n_i: int) -> SyndromeZeroCounts:
    """Count weight-n_i patterns with zero / nonzero syndrome, exactly.

    Solves the 2x2 integer system

        count_zero + count_nonzero             = C(n_h, n_i)
        n_h * count_zero - count_nonzero       = (-1)^q * n_h * C((n_h-1)/2, p)

    with q = ceil(n_i / 2) and p = floor(n_i / 2). The right-hand sides are
    exact integers, and the solution is always integral.
    """
    _m_for_block_length(n_h)
    if not 0 <= n_i <= n_h:
        raise ValueError(f"n_i must be in 0..{n_h}, got {n_i}")
    q, p = (n_i + 1) // 2, n_i // 2
    total = math.comb(n_h, n_i)
    signed = (-1) ** q * n_h * math.comb((n_h - 1) // 2, p)
    count_zero, rem = divmod(total + signed, n_h + 1)
    if rem:  # the identity guarantees divisibility; anything else is a bug
        raise ArithmeticError(f"non-integral syndrome-zero count at ({n_h}, {n_i})")
    return SyndromeZeroCounts(n_h, n_i, count_zero, total - count_zero)


def brute_force_counts(n_h: int, n_i: int, cap: int = BRUTE_FORCE_CAP) -> SyndromeZeroCounts:
    """Oracle for :func:`count_syndrome_zero` by exhaustive enumeration.

    Walks every weight-n_i error pattern, computes its syndrome through the
    hamming module, and tallies zero against nonzero. Refuses when there are
    more than ``cap`` patterns.
    """
    m = _m_for_block_length(n_h)
    if not 0 <= n_i <= n_h:
        raise ValueError(f"n_i must be in 0..{n_h}, got {n_i}")
    total = math.comb(n_h, n_i)
    if total > cap:
        raise ValueError(
            f"refusing to enumerate C({n_h}, {n_i}) = {total} patterns (cap {cap})"
        )
    params = HammingParams(m)
    zero = 0
    for pattern in combinations(range(1, n_h + 1), n_i):
        block = np.zeros(n_h, dtype=np.uint8)
        block[np.array(pattern, dtype=np.intp) - 1] = 1
        if syndrome(block, params) == 0:
            zero += 1
    return SyndromeZeroCounts(n_h, n_i, zero, total - zero)


@dataclass(frozen=True)
class ConditionalTransition:
    """Error-count move probabilities given a nonzero syndrome difference.

    When the syndrome difference is nonzero the correction flips exactly one
    bit, so the error count moves to n_i + 1 or n_i - 1; these are the exact
    conditional probabilities of each direction.
    """

    n_h: int
    n_i: int
    prob_up_given_nonzero: Fraction
    prob_down_given_nonzero: Fraction


@lru_cache(maxsize=None)
def conditional_transition(n_h: int, n_i: int) -> ConditionalTransition:
    """Exact up/down split among nonzero-syndrome weight-n_i patterns.

    Each weight-(n_i + 1) zero-syndrome pattern is produced by exactly
    n_i + 1 weight-n_i patterns (drop one of its errors), so the number of
    upward movers is (n_i + 1) * count_zero(n_i + 1); every other
    nonzero-syndrome pattern moves down.
    """
    counts = count_syndrome_zero(n_h, n_i)
    if counts.count_nonzero == 0:
        raise DegenerateTransitionError(
            f"all weight-{n_i} patterns in {n_h} bits have zero syndrome"
        )
    up_ways = 0
    if n_i + 1 <= n_h:
        up_ways = (n_i + 1) * count_syndrome_zero(n_h, n_i + 1).count_zero
    up = Fraction(up_ways, counts.count_nonzero)
    return ConditionalTransition(n_h, n_i, up, 1 - up)


def unconditional_transition_fractions(n_h: int, n_i: int) -> tuple[Fraction, Fraction]:
    """Up/down fractions with the full C(n_h, n_i) denominator.

    This is the uncorrected composition that also counts zero-syndrome
    patterns among the upward movers and normalises by all patterns rather
    than by the nonzero-syndrome ones. It disagrees with exhaustive
    enumeration (e.g. at (7, 4) it gives a nonzero up fraction while no
    nonzero-syndrome weight-4 pattern gains an error) and is provided for
    reference only; nothing downstream uses it.
    """
    total = math.comb(n_h, n_i)
    n_plus = count_syndrome_zero(n_h, n_i).count_zero
    if n_i + 1 <= n_h:
        n_plus += (n_i + 1) * count_syndrome_zero(n_h, n_i + 1).count_zero
    up = Fraction(n_plus, total)
    return up, 1 - up


@lru_cache(maxsize=None)
def zero_syndrome_kept_profile(m: int) -> tuple[tuple[int, int], ...]:
    """Per-weight census of zero-syndrome patterns against the kept positions.

    Entry w is ``(pattern_count, kept_error_total)``: the number of
    weight-w zero-syndrome patterns and the total number of their errors
    landing outside the privacy-maintenance positions. Computed by an exact
    position-by-position convolution over (syndrome, weight, kept-weight)
    states, which enumerates every pattern by counting. Counts fit int64
    for m <= 6.
    """
    if m < 3 or m > 6:
        raise ValueError(f"profile enumeration supports m in 3..6, got {m}")
    params = HammingParams(m)
    n_h, k = params.n_h, params.k
    pm = set(params.pm_positions)
    # state[s, w, kw] = number of prefixes with syndrome s, weight w, kw kept errors
    state = np.zeros((1 << m, n_h + 1, k + 1), dtype=np.int64)
    state[0, 0, 0] = 1
    syndromes = np.arange(1 << m)
    for pos in range(1, n_h + 1):
        flipped = state[syndromes ^ pos]
        nxt = state.copy()
        if pos in pm:
            nxt[:, 1:, :] += flipped[:, :-1, :]
        else:
            nxt[:, 1:, 1:] += flipped[:, :-1, :-1]
        state = nxt
    zero = state[0]
    return tuple(
        (int(zero[w].sum()), int((zero[w] * np.arange(k + 1)).sum()))
        for w in range(n_h + 1)
    )


def kept_error_mean(params: HammingParams, weight: int) -> Fraction:
    """Expected errors surviving privacy maintenance, for a zero-syndrome
    pattern of the given weight.

    Exact enumeration for m <= 5; for larger m the code is position
    transitive, so each position carries weight/n_h of the errors and the
    k kept positions carry weight * k / n_h (validated against enumeration
    at m <= 5 in the test suite).
    """
    if params.m <= 5:
        count, kept_total = zero_syndrome_kept_profile(params.m)[weight]
        if count == 0:
            raise ValueError(f"no zero-syndrome patterns of weight {weight}")
        return Fraction(kept_total, count)
    return Fraction(weight * params.k, params.n_h)


@dataclass(frozen=True)
class TransitionRow:
    """Exact one-pass statistics for blocks starting with n_i errors.

    The move probabilities describe the change in error count after the
    parity-bit discard and the (conditional) Hamming correction; nf_p,
    nf_ph and nf_final are the expected error counts after the parity
    discard, after Hamming, and after privacy maintenance; n_f is the
    surviving block length and p_f = nf_final / n_f.
    """

    n_i: int
    p_plus1: Fraction
    p_zero: Fraction
    p_minus1: Fraction
    p_minus2: Fraction
    nf_p: Fraction
    nf_ph: Fraction
    nf_final: Fraction
    n_f: int
    p_f: Fraction


@dataclass(frozen=True)
class TransitionTable:
    """Rows indexed by initial error count n_i = 0..N for one block size."""

    params: HammingParams
    rows: tuple[TransitionRow, ...]

    def row(self, n_i: int) -> TransitionRow:
        return self.rows[n_i]


def _odd_row(params: HammingParams, n_i: int) -> TransitionRow:
    n, n_h, m = params.n, params.n_h, params.m
    pi_y = Fraction(n_i, n)
    pi_n = 1 - pi_y

    def split(r: int) -> tuple[Fraction, Fraction, Fraction]:
        """(stay, up, down) probabilities for Hamming acting on r errors."""
        counts = count_syndrome_zero(n_h, r)
        stay = counts.fraction_zero
        if counts.count_nonzero == 0:
            return stay, Fraction(0), Fraction(0)
        move = conditional_transition(n_h, r)
        nonzero = counts.fraction_nonzero
        return stay, nonzero * move.prob_up_given_nonzero, nonzero * move.prob_down_given_nonzero

    stay_n, up_n, down_n = split(n_i)
    stay_y, up_y, down_y = split(n_i - 1)

    p_plus1 = pi_n * up_n
    p_zero = pi_n * stay_n + pi_y * up_y
    p_minus1 = pi_n * down_n + pi_y * stay_y
    p_minus2 = pi_y * down_y

    nf_ph = n_i + (p_plus1 - p_minus1 - 2 * p_minus2)
    # every outcome of the odd branch is a zero-syndrome pattern, so the
    # privacy-maintenance loss follows from the per-weight kept-error means
    nf_final = Fraction(0)
    for delta, prob in ((1, p_plus1), (0, p_zero), (-1, p_minus1), (-2, p_minus2)):
        if prob:
            nf_final += prob * kept_error_mean(params, n_i + delta)
    n_f = n - m - 1
    return TransitionRow(
        n_i=n_i,
        p_plus1=p_plus1,
        p_zero=p_zero,
        p_minus1=p_minus1,
        p_minus2=p_minus2,
        nf_p=Fraction(n_i * (n - 1), n),
        nf_ph=nf_ph,
        nf_final=nf_final,
        n_f=n_f,
        p_f=Fraction(nf_final, n_f),
    )


def _even_row(params: HammingParams, n_i: int) -> TransitionRow:
    # parity agrees, Hamming and privacy maintenance are skipped; the only
    # loss is the discarded parity bit, which was an error with odds n_i/N
    n = params.n
    pi_y = Fraction(n_i, n)
    nf = Fraction(n_i * (n - 1), n)
    n_f = n - 1
    return TransitionRow(
        n_i=n_i,
        p_plus1=Fraction(0),
        p_zero=1 - pi_y,
        p_minus1=pi_y,
        p_minus2=Fraction(0),
        nf_p=nf,
        nf_ph=nf,
        nf_final=nf,
        n_f=n_f,
        p_f=Fraction(nf, n_f),
    )


@lru_cache(maxsize=None)
def transition_table(params: HammingParams) -> TransitionTable:
    """Exact per-n_i transition statistics for one Winnow pass at size N."""
    rows = []
    for n_i in range(params.n + 1):
        row = _odd_row(params, n_i) if n_i % 2 else _even_row(params, n_i)
        total = row.p_plus1 + row.p_zero + row.p_minus1 + row.p_minus2
        if total != 1:  # exact rational identity; a miss means broken counts
            raise ArithmeticError(f"transition probabilities sum to {total} at n_i={n_i}")
        rows.append(row)
    return TransitionTable(params=params, rows=tuple(rows))
