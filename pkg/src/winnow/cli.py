"""Command-line front end.

Subcommands:

    tables     exact per-n_i pass statistics for one block size (CSV)
    figure     post/pre error-rate ratio curves over p0 (CSV)
    optimize   best schedule for a given p0, or the largest workable p0
    simulate   Monte Carlo reconciliation sessions (structured text report)

Exit codes: 0 success, 2 usage error, 3 infeasible optimization, 4 internal
invariant violation. All randomness flows from --seed, and a fixed command
line produces byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import transition_table
from .efficiency import BLOCK_SIZES, Schedule, pass_error_rate
from .hamming import HammingParams
from .planner import (
    DEFAULT_MAX_PASSES,
    EveModel,
    binary_max_p0,
    max_correctable_p0,
    optimize_binary_schedule,
    optimize_schedule,
)
from .simulator import ErrorModel, TrialConfig, run_trials

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4

_MODELS = {
    "bb84": EveModel.BB84_BREIDBART,
    "generic": EveModel.GENERIC,
    "worst": EveModel.WORST_CASE,
}


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _rows_to_text(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(header)] + [",".join(row) for row in rows]
    else:
        widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
        lines = [" ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
        lines += [" ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def _kv_text(pairs: list[tuple[str, object]], fmt: str) -> str:
    if fmt == "csv":
        return "\n".join(f"{k},{v}" for k, v in pairs) + "\n"
    return "\n".join(f"{k}: {v}" for k, v in pairs) + "\n"


def cmd_tables(args: argparse.Namespace) -> int:
    params = HammingParams(args.m)
    table = transition_table(params)
    header = ["n_i",
              "nf_p", "nf_p_exact",
              "nf_ph", "nf_ph_exact",
              "nf_final", "nf_final_exact",
              "p_f", "p_f_exact"]
    rows = []
    for row in table.rows:
        rows.append([
            str(row.n_i),
            repr(float(row.nf_p)), str(row.nf_p),
            repr(float(row.nf_ph)), str(row.nf_ph),
            repr(float(row.nf_final)), str(row.nf_final),
            repr(float(row.p_f)), str(row.p_f),
        ])
    _emit(_rows_to_text(header, rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    sizes = [int(n) for n in args.N.split(",")]
    for n in sizes:
        if n not in BLOCK_SIZES:
            raise _UsageError(f"block sizes must come from {BLOCK_SIZES}, got {n}")
    params = {n: HammingParams.for_block_size(n) for n in sizes}
    header = ["p0"] + [f"ratio_N{n}" for n in sizes]
    rows = []
    i = 1
    while True:
        p0 = i * args.p0_step
        if p0 >= 0.5:
            break
        rows.append([repr(round(p0, 12))] +
                    [repr(pass_error_rate(params[n], p0) / p0) for n in sizes])
        i += 1
    _emit(_rows_to_text(header, rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    model = _MODELS[args.model]
    fmt = args.format or "txt"
    common: list[tuple[str, object]] = [
        ("model", args.model),
        ("protocol", args.protocol),
        ("target_error", repr(args.target_error)),
        ("max_passes_per_block_size", args.max_passes),
    ]
    if args.find_max:
        finder = binary_max_p0 if args.protocol == "binary" else max_correctable_p0
        result = finder(model, args.target_error, tolerance=args.tolerance,
                        max_passes=args.max_passes)
        pairs = common + [
            ("bisection_tolerance", repr(args.tolerance)),
            ("p0_max", repr(result.p0_max)),
            ("schedule", str(result.schedule)),
            ("nu", repr(result.nu)),
            ("p_final", repr(result.p_final)),
        ]
        _emit(_kv_text(pairs, fmt), args.out)
        return EXIT_OK
    optimizer = optimize_binary_schedule if args.protocol == "binary" else optimize_schedule
    result = optimizer(args.p0, model, args.target_error, max_passes=args.max_passes)
    pairs = common + [("p0", repr(args.p0)), ("feasible", str(result.feasible).lower())]
    if not result.feasible:
        _emit(_kv_text(pairs, fmt), args.out)
        return EXIT_INFEASIBLE
    pairs += [
        ("schedule", str(result.schedule)),
        ("nu", repr(result.nu)),
        ("p_final", repr(result.p_final)),
        ("mu", repr(result.mu)),
    ]
    _emit(_kv_text(pairs, fmt), args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.schedule is not None:
        schedule = Schedule.from_string(args.schedule)
    else:
        counts = {n: 0 for n in BLOCK_SIZES}
        counts[args.N] = args.passes
        schedule = Schedule(*(counts[n] for n in BLOCK_SIZES))
    if args.exact_errors is not None:
        model = ErrorModel.exact_count(args.exact_errors, args.N)
    else:
        model = ErrorModel.binomial(args.p0)
    config = TrialConfig(
        length=args.length,
        model=model,
        schedule=schedule,
        protocol=args.protocol,
        trials=args.trials,
        master_seed=args.seed,
        shuffle=not args.no_shuffle,
        privacy_maintenance=args.privacy_maintenance == "on",
        capture_dir=args.capture_transcripts,
    )
    report = run_trials(config)
    fmt = args.format or "txt"
    if fmt == "csv":
        pairs = [tuple(line.split(": ", 1)) for line in report.to_text().splitlines()]
        _emit("\n".join(f"{k},{v}" for k, v in pairs) + "\n", args.out)
    else:
        _emit(report.to_text(), args.out)
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="winnow",
        description="Winnow error reconciliation: analysis tables, pass-model "
                    "curves, schedule planning and Monte Carlo simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tables = sub.add_parser("tables", help="exact per-n_i pass statistics")
    p_tables.add_argument("--m", type=int, required=True, choices=range(3, 8),
                          metavar="M", help="syndrome bits, 3..7")
    p_tables.add_argument("--out", default=None)
    p_tables.add_argument("--format", choices=("csv", "txt"), default=None)
    p_tables.set_defaults(func=cmd_tables)

    p_figure = sub.add_parser("figure", help="p_N/p_0 ratio curves over p0")
    p_figure.add_argument("--N", default="8,16,32",
                          help="comma-separated block sizes (default 8,16,32)")
    p_figure.add_argument("--p0-step", type=float, default=0.005, dest="p0_step")
    p_figure.add_argument("--out", default=None)
    p_figure.add_argument("--format", choices=("csv", "txt"), default=None)
    p_figure.set_defaults(func=cmd_figure)

    p_opt = sub.add_parser("optimize", help="schedule search / max workable p0")
    p_opt.add_argument("--model", choices=sorted(_MODELS), required=True)
    group = p_opt.add_mutually_exclusive_group(required=True)
    group.add_argument("--p0", type=float)
    group.add_argument("--find-max", action="store_true")
    p_opt.add_argument("--target-error", type=float, default=1e-6)
    p_opt.add_argument("--max-passes", type=int, default=DEFAULT_MAX_PASSES)
    p_opt.add_argument("--tolerance", type=float, default=1e-4,
                       help="bisection tolerance for --find-max")
    p_opt.add_argument("--protocol", choices=("winnow", "binary"), default="winnow")
    p_opt.add_argument("--out", default=None)
    p_opt.add_argument("--format", choices=("csv", "txt"), default=None)
    p_opt.set_defaults(func=cmd_optimize)

    p_sim = sub.add_parser("simulate", help="Monte Carlo reconciliation sessions")
    p_sim.add_argument("--length", type=int, required=True)
    err = p_sim.add_mutually_exclusive_group(required=True)
    err.add_argument("--p0", type=float)
    err.add_argument("--exact-errors", type=int, dest="exact_errors")
    p_sim.add_argument("--N", type=int, default=8, choices=BLOCK_SIZES,
                       help="block size for --exact-errors and --passes")
    sched = p_sim.add_mutually_exclusive_group()
    sched.add_argument("--schedule", default=None,
                       help="pass counts j8,j16,j32,j64,j128")
    sched.add_argument("--passes", type=int, default=1,
                       help="passes at block size --N (default 1)")
    p_sim.add_argument("--trials", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--protocol", choices=("winnow", "binary"), default="winnow")
    p_sim.add_argument("--privacy-maintenance", choices=("on", "off"), default="on",
                       dest="privacy_maintenance")
    p_sim.add_argument("--no-shuffle", action="store_true", dest="no_shuffle")
    p_sim.add_argument("--capture-transcripts", default=None, dest="capture_transcripts",
                       metavar="DIR")
    p_sim.add_argument("--out", default=None)
    p_sim.add_argument("--format", choices=("csv", "txt"), default=None)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        if args.protocol == "winnow" and args.privacy_maintenance == "off":
            parser.error("--privacy-maintenance off applies to --protocol binary only")
        if args.p0 is not None and not 0.0 <= args.p0 <= 1.0:
            parser.error("--p0 must be in [0, 1]")
    if args.command == "optimize" and args.p0 is not None and not 0.0 <= args.p0 <= 0.5:
        parser.error("--p0 must be in [0, 0.5]")
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
        return EXIT_USAGE  # unreachable; parser.error raises SystemExit(2)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, ArithmeticError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
