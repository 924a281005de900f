"""Monte Carlo harness for reconciliation sessions.

Generates correlated key pairs with planted errors, runs whole schedules of
Winnow or BINARY passes with inter-pass shuffling, and aggregates the
statistics used to validate the analytic pass model.

Seeding: a master seed fans out through ``numpy.random.SeedSequence`` spawn
keys, so every trial (and every per-pass shuffle inside it) has an
independent, individually replayable stream: trial t draws Alice's bits
from spawn key (t, 0), the error pattern from (t, 1), and the shuffle
before pass i from (t, 2, i). Shuffle seeds are single uint32 words drawn
from those sequences and are public.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .efficiency import Schedule
from .hamming import HammingParams
from .protocol import (
    KeyString,
    LeakLedger,
    ShufflePlan,
    Transcript,
    binary_pass,
    shuffle,
    winnow_pass,
)

BINOMIAL = "binomial"
EXACT_COUNT = "exact_count"
BURST = "burst"


@dataclass(frozen=True)
class ErrorModel:
    """How Bob's bits differ from Alice's.

    binomial: every bit flips independently with probability p0.
    exact_count: exactly errors_per_block flips in every block_size-bit
    block (a trailing partial block gets none).
    burst: each position starts a run of burst_length consecutive flips
    with probability burst_rate / burst_length, so the overall flip rate is
    about burst_rate while errors arrive clumped.
    """

    kind: str
    seed: int = 0
    p0: float = 0.0
    errors_per_block: int = 0
    block_size: int = 0
    burst_length: int = 0
    burst_rate: float = 0.0

    @classmethod
    def binomial(cls, p0: float, seed: int = 0) -> "ErrorModel":
        if not 0.0 <= p0 <= 1.0:
            raise ValueError(f"p0 must be in [0, 1], got {p0}")
        return cls(kind=BINOMIAL, seed=seed, p0=p0)

    @classmethod
    def exact_count(cls, errors_per_block: int, block_size: int, seed: int = 0) -> "ErrorModel":
        if not 0 <= errors_per_block <= block_size:
            raise ValueError("errors_per_block must be in 0..block_size")
        return cls(kind=EXACT_COUNT, seed=seed,
                   errors_per_block=errors_per_block, block_size=block_size)

    @classmethod
    def burst(cls, burst_length: int, burst_rate: float, seed: int = 0) -> "ErrorModel":
        if burst_length < 1:
            raise ValueError("burst_length must be >= 1")
        if not 0.0 <= burst_rate <= 1.0:
            raise ValueError("burst_rate must be in [0, 1]")
        return cls(kind=BURST, seed=seed, burst_length=burst_length, burst_rate=burst_rate)

    def plant(self, rng: np.random.Generator, length: int) -> np.ndarray:
        """Draw an error pattern (1 = flipped) of the given length."""
        if self.kind == BINOMIAL:
            return (rng.random(length) < self.p0).astype(np.uint8)
        if self.kind == EXACT_COUNT:
            pattern = np.zeros(length, dtype=np.uint8)
            nblocks = length // self.block_size
            if nblocks and self.errors_per_block:
                scores = rng.random((nblocks, self.block_size))
                cols = np.argsort(scores, axis=1)[:, : self.errors_per_block]
                rows = np.repeat(np.arange(nblocks), self.errors_per_block)
                pattern[: nblocks * self.block_size].reshape(nblocks, self.block_size)[
                    rows, cols.ravel()
                ] = 1
            return pattern
        if self.kind == BURST:
            pattern = np.zeros(length, dtype=np.uint8)
            starts = np.flatnonzero(rng.random(length) < self.burst_rate / self.burst_length)
            for start in starts:
                pattern[start : start + self.burst_length] = 1
            return pattern
        raise ValueError(f"unknown error model kind: {self.kind!r}")


def generate_pair(length: int, model: ErrorModel) -> tuple[KeyString, KeyString]:
    """Correlated key pair: Alice uniform, Bob = Alice XOR planted errors."""
    if length < 1:
        raise ValueError("length must be >= 1")
    root = np.random.SeedSequence(model.seed)
    bits_ss, err_ss = root.spawn(2)
    alice_bits = np.random.default_rng(bits_ss).integers(0, 2, length, dtype=np.uint8)
    pattern = model.plant(np.random.default_rng(err_ss), length)
    return KeyString(alice_bits, 0), KeyString(alice_bits ^ pattern, 0)


def census_parity(alice: KeyString, bob: KeyString, params: HammingParams) -> tuple[int, int]:
    """(odd, even) counts of N-bit blocks by parity disagreement."""
    n = params.n
    nblocks = min(len(alice), len(bob)) // n
    diff = (alice.bits[: nblocks * n] ^ bob.bits[: nblocks * n]).reshape(nblocks, n)
    odd = int((diff.sum(axis=1) & 1).sum())
    return odd, nblocks - odd


@dataclass(frozen=True)
class TrialConfig:
    """One batch of independent reconciliation sessions."""

    length: int
    model: ErrorModel
    schedule: Schedule
    protocol: str = "winnow"
    trials: int = 1
    master_seed: int = 0
    shuffle: bool = True
    privacy_maintenance: bool = True
    capture_dir: str | None = None


@dataclass(frozen=True)
class TrialReport:
    """Aggregate outcome of a batch of sessions."""

    trials: int
    protocol: str
    schedule: Schedule
    initial_length: int
    initial_error_rate: float
    final_length_total: int
    final_error_rate: float
    final_error_rate_se: float
    fraction_remaining: float
    identical_fraction: float
    bits_revealed: int
    bits_discarded: int
    messages_sent: int

    def to_text(self) -> str:
        """Stable-order structured text for golden-file comparison."""
        lines = [
            f"trials: {self.trials}",
            f"protocol: {self.protocol}",
            f"schedule: {self.schedule}",
            f"initial_length: {self.initial_length}",
            f"initial_error_rate: {self.initial_error_rate!r}",
            f"final_length_total: {self.final_length_total}",
            f"final_error_rate: {self.final_error_rate!r}",
            f"final_error_rate_se: {self.final_error_rate_se!r}",
            f"fraction_remaining: {self.fraction_remaining!r}",
            f"identical_fraction: {self.identical_fraction!r}",
            f"bits_revealed: {self.bits_revealed}",
            f"bits_discarded: {self.bits_discarded}",
            f"messages_sent: {self.messages_sent}",
        ]
        return "\n".join(lines) + "\n"


def _shuffle_seed(master_seed: int, trial: int, pass_index: int) -> int:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial, 2, pass_index))
    return int(ss.generate_state(1)[0])


def run_session(alice: KeyString, bob: KeyString, schedule: Schedule,
                protocol: str = "winnow", privacy_maintenance: bool = True,
                shuffle_seeds: list[int] | None = None,
                transcript: Transcript | None = None,
                session_id: int = 0) -> tuple[KeyString, KeyString, LeakLedger]:
    """Run one full schedule on a key pair, shuffling before every pass
    after the first when shuffle seeds are provided."""
    ledger = LeakLedger()
    for index, block_size in enumerate(schedule.passes()):
        if shuffle_seeds is not None and index > 0:
            plan = ShufflePlan.from_seed(shuffle_seeds[index], len(alice))
            alice, bob = shuffle(alice, plan), shuffle(bob, plan)
        params = HammingParams.for_block_size(block_size)
        if protocol == "winnow":
            alice, bob, ledger = winnow_pass(alice, bob, params, ledger,
                                             transcript=transcript, session_id=session_id)
        elif protocol == "binary":
            alice, bob, ledger = binary_pass(alice, bob, params, ledger,
                                             privacy_maintenance=privacy_maintenance,
                                             transcript=transcript, session_id=session_id)
        else:
            raise ValueError(f"unknown protocol: {protocol!r}")
    return alice, bob, ledger


def run_trials(config: TrialConfig) -> TrialReport:
    """Run independent sessions and aggregate a deterministic report.

    The report depends only on the config (including master_seed),
    regardless of execution order.
    """
    if config.trials < 1:
        raise ValueError("trials must be >= 1")
    if config.protocol not in ("winnow", "binary"):
        raise ValueError(f"unknown protocol: {config.protocol!r}")

    total_initial_errors = 0
    total_final_errors = 0
    total_final_length = 0
    identical = 0
    revealed = discarded = messages = 0
    per_trial_rates = []

    n_passes = config.schedule.total_passes
    for trial in range(config.trials):
        trial_seed = int(np.random.SeedSequence(
            entropy=config.master_seed, spawn_key=(trial,)).generate_state(1)[0])
        model = dataclasses.replace(config.model, seed=trial_seed)
        alice, bob = generate_pair(config.length, model)
        total_initial_errors += int((alice.bits ^ bob.bits).sum())

        seeds = [_shuffle_seed(config.master_seed, trial, i) for i in range(n_passes)]
        transcript = None
        if config.capture_dir is not None:
            transcript = Transcript(session_id=trial,
                                    block_sizes=config.schedule.passes(),
                                    protocol=config.protocol, seeds=tuple(seeds))
        alice, bob, ledger = run_session(
            alice, bob, config.schedule,
            protocol=config.protocol,
            privacy_maintenance=config.privacy_maintenance,
            shuffle_seeds=seeds if config.shuffle else None,
            transcript=transcript, session_id=trial,
        )
        if transcript is not None:
            path = Path(config.capture_dir) / f"trial_{trial:05d}.transcript"
            transcript.save(path)

        errors = int((alice.bits ^ bob.bits).sum())
        total_final_errors += errors
        total_final_length += len(alice)
        per_trial_rates.append(errors / len(alice) if len(alice) else 0.0)
        if errors == 0:
            identical += 1
        revealed += ledger.total_bits_revealed
        discarded += ledger.total_bits_discarded
        messages += ledger.total_messages

    rate = total_final_errors / total_final_length if total_final_length else 0.0
    if config.trials > 1:
        mean = sum(per_trial_rates) / config.trials
        var = sum((r - mean) ** 2 for r in per_trial_rates) / (config.trials - 1)
        se = math.sqrt(var / config.trials)
    else:
        se = math.sqrt(rate * (1.0 - rate) / total_final_length) if total_final_length else 0.0

    total_initial = config.length * config.trials
    return TrialReport(
        trials=config.trials,
        protocol=config.protocol,
        schedule=config.schedule,
        initial_length=config.length,
        initial_error_rate=total_initial_errors / total_initial,
        final_length_total=total_final_length,
        final_error_rate=rate,
        final_error_rate_se=se,
        fraction_remaining=total_final_length / total_initial,
        identical_fraction=identical / config.trials,
        bits_revealed=revealed,
        bits_discarded=discarded,
        messages_sent=messages,
    )


def exact_count_pass_stats(params: HammingParams, n_i: int, blocks: int,
                           seed: int = 0) -> tuple[float, float]:
    """(mean, standard error) of final errors per block after one Winnow
    pass over ``blocks`` independent N-bit blocks planted with exactly n_i
    errors each.

    Runs the real protocol on one long key (blocks are independent under a
    single pass) and attributes surviving errors back to blocks.
    """
    n = params.n
    length = blocks * n
    model = ErrorModel.exact_count(n_i, n, seed=seed)
    alice, bob = generate_pair(length, model)

    diff_before = (alice.bits ^ bob.bits).reshape(blocks, n)
    mismatch = (diff_before.sum(axis=1) & 1).astype(bool)

    alice2, bob2, _ = winnow_pass(alice, bob, params)
    block_lengths = np.where(mismatch, n - 1 - params.m, n - 1)
    starts = np.concatenate([[0], np.cumsum(block_lengths)[:-1]])
    diff_after = (alice2.bits ^ bob2.bits).astype(np.int64)
    per_block = np.add.reduceat(diff_after, starts)
    # reduceat yields garbage for zero-length slices; none occur since
    # block_lengths >= n - 1 - m >= 4
    mean = float(per_block.mean())
    se = float(per_block.std(ddof=1) / math.sqrt(blocks)) if blocks > 1 else 0.0
    return mean, se
