"""Operational planning: error-rate estimation, secure yield, schedules.

The planner answers the questions an operator has after sifting: what is
the channel error rate, which pass schedule leaves the most secure key for
a given eavesdropping model, and up to what error rate is any secure key
left at all. Schedules are searched exhaustively within per-block-size
bounds; the search space is tiny and exhaustive search keeps results exact
and reproducible.

A parallel search is provided for the bisection-based BINARY primitive run
without privacy maintenance, where every revealed parity accumulates as a
debt that must be deducted from the key before privacy amplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .efficiency import (
    BLOCK_SIZES,
    Schedule,
    odd_parity_probability,
    pass_error_rate,
    pass_mu,
    run_schedule,
)
from .hamming import HammingParams

#: Fraction of the key an intercept/resend attack in the Breidbart basis
#: reveals while causing an error rate of 1/4.
BREIDBART_KNOWLEDGE_FRACTION = 0.59

#: Error rate caused by a full intercept/resend attack.
INTERCEPT_RESEND_ERROR_RATE = 0.25

#: Default cap on passes per block size in schedule searches.
DEFAULT_MAX_PASSES = 6


class EveModel(Enum):
    """Eavesdropper models, each a linear key deduction nu = mu - c * p0."""

    BB84_BREIDBART = "bb84"
    GENERIC = "generic"
    WORST_CASE = "worst"

    @property
    def deduction_coefficient(self) -> float:
        if self is EveModel.BB84_BREIDBART:
            return BREIDBART_KNOWLEDGE_FRACTION / INTERCEPT_RESEND_ERROR_RATE
        if self is EveModel.GENERIC:
            return 2.0 * math.sqrt(2.0)
        return 4.0


def secure_yield(mu: float, p0: float, model: EveModel) -> float:
    """Fraction of the original key that is secure after privacy
    amplification; negative means no secure key remains."""
    return mu - model.deduction_coefficient * p0


@dataclass(frozen=True)
class P0Estimate:
    """Initial error-rate estimate from a parity census.

    ``saturated`` is set when the observed odd fraction reaches 1/2, where
    the estimator's inversion pins to the 0.5 boundary.
    """

    value: float
    saturated: bool


def estimate_p0(m_odd: int, m_total: int, block_size: int) -> P0Estimate:
    """Invert the odd-parity fraction (1 - (1 - 2 p0)^N) / 2 for p0.

    m_odd is the number of N-bit blocks whose parities disagreed out of
    m_total blocks.
    """
    if m_total < 1:
        raise ValueError("m_total must be at least 1")
    if not 0 <= m_odd <= m_total:
        raise ValueError(f"m_odd must be in 0..{m_total}, got {m_odd}")
    fraction = m_odd / m_total
    if fraction >= 0.5:
        return P0Estimate(value=0.5, saturated=True)
    return P0Estimate(value=0.5 * (1.0 - (1.0 - 2.0 * fraction) ** (1.0 / block_size)),
                      saturated=False)


@dataclass(frozen=True)
class OptimizationResult:
    """Best schedule found for one (p0, model, target) query."""

    p0: float
    model: EveModel
    target_error: float
    max_passes: int
    feasible: bool
    schedule: Schedule | None = None
    nu: float | None = None
    p_final: float | None = None
    mu: float | None = None


def _better(a: tuple, b: tuple | None) -> bool:
    """Candidate ordering: higher nu, then fewer passes, then lexicographic."""
    if b is None:
        return True
    nu_a, passes_a, counts_a = a
    nu_b, passes_b, counts_b = b
    if nu_a != nu_b:
        return nu_a > nu_b
    if passes_a != passes_b:
        return passes_a < passes_b
    return counts_a < counts_b


class _WinnowPassModel:
    """Schedule-search adapter over the analytic Winnow pass model.

    State is (p, mu); nu of a finished schedule is mu - c * p0.
    """

    def initial_state(self, p0: float) -> tuple[float, float]:
        return (p0, 1.0)

    def apply_pass(self, state: tuple[float, float], block_size: int) -> tuple[float, float]:
        p, mu = state
        params = HammingParams.for_block_size(block_size)
        return (pass_error_rate(params, p), mu * pass_mu(params, p))

    def yield_fraction(self, state: tuple[float, float]) -> float:
        return state[1]


class _BinaryPassModel:
    """Schedule-search adapter for BINARY without privacy maintenance.

    No bits are discarded, so the key length is constant and blocks with an
    odd error count lose exactly one error per pass. Each pass reveals one
    parity per block plus log2(N) bisection parities per odd block; the
    revealed bits accumulate as a fraction of the (constant) key length and
    are deducted from the yield before privacy amplification. State is
    (p, leaked_fraction).
    """

    def initial_state(self, p0: float) -> tuple[float, float]:
        return (p0, 0.0)

    def apply_pass(self, state: tuple[float, float], block_size: int) -> tuple[float, float]:
        p, leaked = state
        levels = block_size.bit_length() - 1
        p_odd = odd_parity_probability(block_size, p)
        # p - p_odd/N can round a hair below zero once p is ~1e-17
        p_after = max(0.0, p - p_odd / block_size)
        leaked += (1.0 + levels * p_odd) / block_size
        return (p_after, leaked)

    def yield_fraction(self, state: tuple[float, float]) -> float:
        return 1.0 - state[1]


def binary_pass_statistics(block_size: int, p0: float) -> tuple[float, float]:
    """(error rate after, revealed-bit fraction) for one BINARY pass."""
    return _BinaryPassModel().apply_pass((p0, 0.0), block_size)


def _search_schedules(model_impl, p0: float, model: EveModel, target_error: float,
                      max_passes: int) -> OptimizationResult:
    deduction = model.deduction_coefficient * p0
    best: tuple | None = None
    best_extra: tuple | None = None

    def recurse(level: int, state, counts: tuple[int, ...], passes: int) -> None:
        nonlocal best, best_extra
        # the yield fraction strictly shrinks with every added pass, so a
        # branch whose ceiling is below the incumbent cannot win; exact
        # ties are left to the tie-break rules at the leaves
        if best is not None and model_impl.yield_fraction(state) - deduction < best[0]:
            return
        if level == len(BLOCK_SIZES):
            p, fraction = state[0], model_impl.yield_fraction(state)
            if p <= target_error:
                candidate = (fraction - deduction, passes, counts)
                if _better(candidate, best):
                    best = candidate
                    best_extra = (p, fraction)
            return
        block_size = BLOCK_SIZES[level]
        for j in range(max_passes + 1):
            if j > 0:
                state = model_impl.apply_pass(state, block_size)
            recurse(level + 1, state, counts + (j,), passes + j)

    recurse(0, model_impl.initial_state(p0), (), 0)
    if best is None:
        return OptimizationResult(p0=p0, model=model, target_error=target_error,
                                  max_passes=max_passes, feasible=False)
    nu, _, counts = best
    p_final, fraction = best_extra
    return OptimizationResult(
        p0=p0, model=model, target_error=target_error, max_passes=max_passes,
        feasible=True, schedule=Schedule(*counts), nu=nu, p_final=p_final, mu=fraction,
    )


def optimize_schedule(p0: float, model: EveModel, target_error: float,
                      max_passes: int = DEFAULT_MAX_PASSES) -> OptimizationResult:
    """Exhaustively search Winnow schedules maximizing the secure yield.

    Feasible schedules drive the modeled error rate at or below
    target_error; among those the one maximizing nu wins, with ties broken
    by fewer total passes and then lexicographically.
    """
    if not 0.0 <= p0 <= 0.5:
        raise ValueError(f"p0 must be in [0, 0.5], got {p0}")
    if target_error <= 0.0:
        raise ValueError("target_error must be positive")
    return _search_schedules(_WinnowPassModel(), p0, model, target_error, max_passes)


def optimize_binary_schedule(p0: float, model: EveModel, target_error: float,
                             max_passes: int = DEFAULT_MAX_PASSES) -> OptimizationResult:
    """Schedule search for BINARY without privacy maintenance."""
    if not 0.0 <= p0 <= 0.5:
        raise ValueError(f"p0 must be in [0, 0.5], got {p0}")
    if target_error <= 0.0:
        raise ValueError("target_error must be positive")
    return _search_schedules(_BinaryPassModel(), p0, model, target_error, max_passes)


@dataclass(frozen=True)
class MaxP0Result:
    """Largest workable initial error rate and the schedule achieving it."""

    p0_max: float
    schedule: Schedule
    nu: float
    p_final: float
    model: EveModel
    target_error: float
    tolerance: float


def _max_p0(optimizer, model: EveModel, target_error: float, tolerance: float,
            max_passes: int) -> MaxP0Result:
    lo, hi = 0.0, 0.5
    best = optimizer(lo, model, target_error, max_passes)
    if not (best.feasible and best.nu > 0.0):
        raise ArithmeticError("no feasible schedule even at p0 = 0")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        result = optimizer(mid, model, target_error, max_passes)
        if result.feasible and result.nu > 0.0:
            lo, best = mid, result
        else:
            hi = mid
    return MaxP0Result(p0_max=lo, schedule=best.schedule, nu=best.nu,
                       p_final=best.p_final, model=model,
                       target_error=target_error, tolerance=tolerance)


def max_correctable_p0(model: EveModel, target_error: float = 1e-6,
                       tolerance: float = 1e-4,
                       max_passes: int = DEFAULT_MAX_PASSES) -> MaxP0Result:
    """Largest p0 for which some Winnow schedule leaves secure key.

    Bisects the predicate "a feasible schedule with positive yield exists"
    over p0 in [0, 0.5] to the given absolute tolerance.
    """
    return _max_p0(optimize_schedule, model, target_error, tolerance, max_passes)


def binary_max_p0(model: EveModel, target_error: float = 1e-6,
                  tolerance: float = 1e-4,
                  max_passes: int = DEFAULT_MAX_PASSES) -> MaxP0Result:
    """Largest p0 for which BINARY without privacy maintenance leaves
    secure key after the revealed-bit debt is deducted."""
    return _max_p0(optimize_binary_schedule, model, target_error, tolerance, max_passes)
