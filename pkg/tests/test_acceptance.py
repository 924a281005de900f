"""Acceptance suite: one test per criterion, each printing a PASS line."""

import decimal
import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest

from winnow.analysis import brute_force_counts, count_syndrome_zero, transition_table
from winnow.cli import main
from winnow.efficiency import Schedule, pass_error_rate, run_schedule
from winnow.hamming import HammingParams
from winnow.planner import secure_yield
from winnow.protocol import KeyString, winnow_pass
from winnow.simulator import (
    ErrorModel,
    TrialConfig,
    exact_count_pass_stats,
    generate_pair,
    run_session,
    run_trials,
)


def printed(value: Fraction) -> Decimal:
    """Round an exact value the way the published tables print: two
    decimals, halves away from zero, trailing zeros insignificant."""
    d = Decimal(value.numerator) / Decimal(value.denominator)
    return d.quantize(Decimal("0.01"), rounding=decimal.ROUND_HALF_UP).normalize()


def test_criterion_01_counts_match_brute_force():
    for n_h in (7, 15):
        for n_i in range(n_h + 1):
            closed = count_syndrome_zero(n_h, n_i)
            brute = brute_force_counts(n_h, n_i)
            assert (closed.count_zero, closed.count_nonzero) == \
                (brute.count_zero, brute.count_nonzero), (n_h, n_i)
    split = count_syndrome_zero(7, 3)
    assert (split.count_zero, split.count_nonzero) == (7, 28)
    print("ACCEPTANCE 1 (closed-form counts vs brute force, m=3,4): PASS")


def test_criterion_02_table_reproduction():
    table = transition_table(HammingParams(3))
    published = {
        "nf_p": ["0", "0.88", "1.75", "2.63", "3.5", "4.38", "5.25", "6.13", "7"],
        "nf_ph": ["0", "0", "1.75", "3.5", "3.5", "3.5", "5.25", "7", "7"],
        "nf_final": ["0", "0", "1.75", "2.0", "3.5", "2.0", "5.25", "4", "7"],
        "p_f": ["0", "0", "0.25", "0.5", "0.5", "0.5", "0.75", "1", "1"],
    }
    for field, expected in published.items():
        got = [printed(getattr(row, field)) for row in table.rows]
        assert got == [Decimal(e).normalize() for e in expected], field
    # spot checks of the exact internal rationals
    assert table.row(2).nf_final == Fraction(7, 4)
    assert table.row(3).nf_final == 2
    assert table.row(5).nf_final == 2
    assert table.row(7).nf_final == 4
    print("ACCEPTANCE 2 (N=8 stage tables to printed precision): PASS")


def test_criterion_03_monte_carlo_matches_table():
    params = HammingParams(3)
    table = transition_table(params)
    for n_i in range(9):
        mean, se = exact_count_pass_stats(params, n_i, blocks=100_000, seed=123 + n_i)
        expected = float(table.row(n_i).nf_final)
        if se == 0.0:
            assert mean == expected, n_i
        else:
            assert abs(mean - expected) <= 3 * se, (n_i, mean, expected, se)
    print("ACCEPTANCE 3 (>=1e5 blocks per n_i within 3 sigma of table): PASS")


def test_criterion_04_single_error_guarantee():
    rng = np.random.default_rng(404)
    failures = 0
    for m in (3, 4, 5, 6, 7):
        params = HammingParams(m)
        n = params.n
        for position in range(n):
            bits = rng.integers(0, 2, n, dtype=np.uint8)
            alice = KeyString(bits.copy())
            bob = KeyString(bits.copy())
            bob.bits[position] ^= 1
            alice2, bob2, _ = winnow_pass(alice, bob, params)
            if not np.array_equal(alice2.bits, bob2.bits):
                failures += 1
    assert failures == 0
    print("ACCEPTANCE 4 (single error resolved, exhaustive N=8..128): PASS")


def test_criterion_05_ratio_curve_properties():
    grid = [round(i * 0.005, 10) for i in range(1, 100)]  # (0, 0.5) exclusive
    params = {n: HammingParams(n.bit_length() - 1) for n in (8, 16, 32)}
    ratios = {n: np.array([pass_error_rate(params[n], p) / p for p in grid])
              for n in (8, 16, 32)}

    def crossing(a, b):
        delta = ratios[a] - ratios[b]
        flips = [i for i in range(len(grid) - 1)
                 if (delta[i] < 0) != (delta[i + 1] < 0)]
        assert len(flips) == 1, (a, b, flips)
        i = flips[0]
        # linear interpolation inside the bracketing grid interval
        t = delta[i] / (delta[i] - delta[i + 1])
        return grid[i] + t * (grid[i + 1] - grid[i])

    c_8_16 = crossing(8, 16)
    assert abs(c_8_16 - 0.38) <= 0.01
    assert all(ratios[8][i] < ratios[16][i]
               for i, p in enumerate(grid) if p < c_8_16)
    c_16_32 = crossing(16, 32)
    assert abs(c_16_32 - 0.20) <= 0.01
    assert all(ratios[16][i] < ratios[32][i]
               for i, p in enumerate(grid) if p < c_16_32)

    for n in (8, 16, 32):
        signs = np.sign(ratios[n] - 1.0)
        changes = int(np.sum(signs[:-1] != signs[1:]))
        assert changes == 1, n
    print(f"ACCEPTANCE 5 (ratio curves: crossings at {c_8_16:.3f}, {c_16_32:.3f}, "
          "single unity crossing each): PASS")


def test_criterion_06_schedule_results(bb84_max, generic_max, worst_max):
    from winnow.planner import EveModel, optimize_schedule
    cases = [
        (bb84_max, EveModel.BB84_BREIDBART, 0.1322, Schedule(3, 1, 0, 1, 3), 0.0017),
        (generic_max, EveModel.GENERIC, 0.1222, Schedule(3, 0, 1, 0, 4), 0.0017),
        (worst_max, EveModel.WORST_CASE, 0.1037, Schedule(2, 1, 1, 0, 3), 0.0020),
    ]
    for found, model, p0, schedule, nu in cases:
        assert abs(found.p0_max - p0) <= 0.002, model
        best = optimize_schedule(p0, model, 1e-6)
        assert best.feasible
        assert abs(best.nu - nu) <= 5e-4, model
        # the published schedule is itself a feasible optimum
        state = run_schedule(schedule, p0)
        assert state.p_final <= 1e-6
        published_nu = secure_yield(state.mu_total, p0, model)
        assert abs(published_nu - nu) <= 5e-4, model
        assert published_nu >= best.nu - 1e-12, model
    print("ACCEPTANCE 6 (max p0 0.1322/0.1222/0.1037 and schedules): PASS")


def test_criterion_07_binary_comparison(binary_bb84_max, bb84_max):
    assert abs(binary_bb84_max.p0_max - 0.114) <= 0.01
    assert binary_bb84_max.p0_max < bb84_max.p0_max
    print(f"ACCEPTANCE 7 (BINARY max p0 {binary_bb84_max.p0_max:.4f} "
          f"< Winnow {bb84_max.p0_max:.4f}): PASS")


def test_criterion_08_ledger_accounting():
    schedule = Schedule(2, 1, 0, 0, 0)
    for trial in range(10):
        model = ErrorModel.binomial(0.08, seed=800 + trial)
        alice, bob = generate_pair(4096, model)
        seeds = list(range(schedule.total_passes))
        _, _, ledger = run_session(alice, bob, schedule, shuffle_seeds=seeds)
        for entry in ledger.entries:
            m = entry.block_size.bit_length() - 1
            assert entry.messages_sent <= 2
            assert entry.bits_discarded == entry.blocks + m * entry.mismatched_blocks

        alice, bob = generate_pair(4096, model)
        _, _, ledger = run_session(alice, bob, schedule, shuffle_seeds=seeds,
                                   protocol="binary")
        for entry in ledger.entries:
            levels = entry.block_size.bit_length() - 1
            expected = 1 + levels if entry.mismatched_blocks else 1
            assert entry.messages_sent == expected
    print("ACCEPTANCE 8 (per-pass ledger and communication counts): PASS")


def test_criterion_09_shuffle_necessity():
    base = dict(length=32768, model=ErrorModel.burst(32, 0.05),
                schedule=Schedule(3, 1, 0, 1, 3), trials=5, master_seed=77)
    shuffled = run_trials(TrialConfig(shuffle=True, **base))
    clumped = run_trials(TrialConfig(shuffle=False, **base))
    floor = 1.0 / clumped.final_length_total
    ratio = clumped.final_error_rate / max(shuffled.final_error_rate, floor)
    assert ratio >= 10.0, (clumped.final_error_rate, shuffled.final_error_rate)
    print(f"ACCEPTANCE 9 (burst errors without shuffle {ratio:.0f}x worse): PASS")


def test_criterion_10_cli_determinism(tmp_path):
    commands = [
        ["tables", "--m", "3"],
        ["figure", "--N", "8,16", "--p0-step", "0.02"],
        ["optimize", "--model", "bb84", "--p0", "0.12"],
        ["simulate", "--length", "4096", "--p0", "0.08",
         "--schedule", "3,1,0,0,0", "--trials", "3", "--seed", "42"],
    ]
    for index, argv in enumerate(commands):
        first = tmp_path / f"run_{index}_a.out"
        second = tmp_path / f"run_{index}_b.out"
        assert main(argv + ["--out", str(first)]) == 0
        assert main(argv + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes(), argv
    print("ACCEPTANCE 10 (seeded CLI runs byte-identical): PASS")
