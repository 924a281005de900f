"""Binomial-ensemble model of Winnow passes.

Given a per-bit error probability p0 and the assumption that errors are
independently, binomially distributed across blocks (which the inter-pass
shuffle is there to enforce), this module computes the fraction of key
surviving one pass, the per-bit error probability after the pass, and the
iterated evolution under a schedule of passes at growing block sizes.

Sums over the binomial ensemble use log-space probability terms and exact
compensated summation (``math.fsum``); at N = 128 the terms span hundreds
of orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analysis import transition_table
from .hamming import HammingParams

#: Block sizes a schedule may use, in the order passes are applied.
BLOCK_SIZES = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class Schedule:
    """Pass counts per block size, applied in nondecreasing N order."""

    j8: int = 0
    j16: int = 0
    j32: int = 0
    j64: int = 0
    j128: int = 0

    def __post_init__(self) -> None:
        for count in self.counts():
            if count < 0:
                raise ValueError(f"pass counts must be nonnegative: {self}")

    def counts(self) -> tuple[int, int, int, int, int]:
        return (self.j8, self.j16, self.j32, self.j64, self.j128)

    def passes(self) -> tuple[int, ...]:
        """Block size of every pass, in application order."""
        return tuple(
            n for n, count in zip(BLOCK_SIZES, self.counts()) for _ in range(count)
        )

    @property
    def total_passes(self) -> int:
        return sum(self.counts())

    @classmethod
    def from_string(cls, text: str) -> "Schedule":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 5:
            raise ValueError(f"expected 5 comma-separated pass counts, got {text!r}")
        return cls(*parts)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.counts())


def _check_p0(p0: float, hi: float = 1.0) -> None:
    if not 0.0 <= p0 <= hi:
        raise ValueError(f"p0 must be in [0, {hi}], got {p0}")


@lru_cache(maxsize=None)
def _log_binom_row(n: int) -> np.ndarray:
    row = np.array([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                    for k in range(n + 1)])
    row.setflags(write=False)
    return row


def binomial_pmf(n_i: int, n: int, p0: float) -> float:
    """C(n, n_i) p0^n_i (1 - p0)^(n - n_i), evaluated in log space."""
    if not 0 <= n_i <= n:
        raise ValueError(f"n_i must be in 0..{n}, got {n_i}")
    _check_p0(p0)
    return float(binomial_pmf_vector(n, p0)[n_i])


def binomial_pmf_vector(n: int, p0: float) -> np.ndarray:
    """Binomial pmf over n_i = 0..n as a float array."""
    _check_p0(p0)
    if p0 == 0.0 or p0 == 1.0:
        out = np.zeros(n + 1)
        out[n if p0 else 0] = 1.0
        return out
    k = np.arange(n + 1)
    log_terms = _log_binom_row(n) + k * math.log(p0) + (n - k) * math.log1p(-p0)
    return np.exp(log_terms)


def odd_parity_probability(n: int, p0: float) -> float:
    """Probability an n-bit block holds an odd number of errors (closed form)."""
    _check_p0(p0)
    return 0.5 * (1.0 - (1.0 - 2.0 * p0) ** n)


@lru_cache(maxsize=None)
def _nf_final(params: HammingParams) -> np.ndarray:
    table = transition_table(params)
    out = np.array([float(row.nf_final) for row in table.rows])
    out.setflags(write=False)
    return out


def pass_mu(params: HammingParams, p0: float) -> float:
    """Fraction of key bits surviving one pass at block size N.

    Every block loses its parity bit; blocks with an odd error count lose
    the m syndrome bits as well, so mu = (N - 1 - m * P_odd) / N with P_odd
    summed over the binomial ensemble.
    """
    pmf = binomial_pmf_vector(params.n, p0)
    p_odd = math.fsum(pmf[1::2])
    return (params.n - 1 - params.m * p_odd) / params.n


def pass_error_rate(params: HammingParams, p0: float) -> float:
    """Per-bit error probability after one pass at block size N.

    Expected surviving errors over the binomial ensemble, divided by the
    expected surviving length N * mu.
    """
    pmf = binomial_pmf_vector(params.n, p0)
    expected_errors = math.fsum(_nf_final(params) * pmf)
    return expected_errors / (params.n * pass_mu(params, p0))


@dataclass(frozen=True)
class PassRecord:
    """One pass of a schedule: block size, error rates, surviving fraction."""

    block_size: int
    p_before: float
    p_after: float
    mu_step: float


@dataclass(frozen=True)
class CascadeState:
    """Outcome of iterating a schedule from an initial error rate."""

    schedule: Schedule
    p0: float
    trajectory: tuple[PassRecord, ...]
    p_final: float
    mu_total: float


def run_schedule(schedule: Schedule, p0: float) -> CascadeState:
    """Iterate the pass model through a schedule.

    After each pass the surviving errors are treated as freshly binomial at
    the new rate, which is what the inter-pass shuffle is for. Error rates
    above 0.5 are rejected; the model is meaningless there.
    """
    _check_p0(p0, hi=0.5)
    p = p0
    mu_total = 1.0
    trajectory = []
    for block_size in schedule.passes():
        params = HammingParams.for_block_size(block_size)
        mu_step = pass_mu(params, p)
        p_after = pass_error_rate(params, p)
        trajectory.append(PassRecord(block_size, p, p_after, mu_step))
        p = p_after
        mu_total *= mu_step
    return CascadeState(
        schedule=schedule,
        p0=p0,
        trajectory=tuple(trajectory),
        p_final=p,
        mu_total=mu_total,
    )
