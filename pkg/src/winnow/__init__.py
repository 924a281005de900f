"""Winnow error reconciliation for quantum key distribution.

Parity-plus-syndrome reconciliation with privacy maintenance: exact
per-pass error-transition analysis, the binomial ensemble pass model, a
two-party protocol simulator with leak accounting, and a schedule planner.
"""

from .analysis import (
    ConditionalTransition,
    SyndromeZeroCounts,
    TransitionRow,
    TransitionTable,
    brute_force_counts,
    conditional_transition,
    count_syndrome_zero,
    transition_table,
)
from .efficiency import (
    BLOCK_SIZES,
    CascadeState,
    PassRecord,
    Schedule,
    binomial_pmf,
    odd_parity_probability,
    pass_error_rate,
    pass_mu,
    run_schedule,
)
from .hamming import (
    BlockLengthError,
    HammingParams,
    apply_privacy_maintenance,
    correction_position,
    parity_check_matrix,
    syndrome,
)
from .planner import (
    EveModel,
    MaxP0Result,
    OptimizationResult,
    P0Estimate,
    binary_max_p0,
    estimate_p0,
    max_correctable_p0,
    optimize_schedule,
    secure_yield,
)
from .protocol import (
    KeyString,
    LeakLedger,
    MessageKind,
    PassLeak,
    ProtocolError,
    ShufflePlan,
    Transcript,
    WinnowMessage,
    binary_pass,
    communications_per_pass,
    shuffle,
    winnow_pass,
)
from .simulator import (
    ErrorModel,
    TrialConfig,
    TrialReport,
    census_parity,
    generate_pair,
    run_trials,
)

__version__ = "0.1.0"

__all__ = [
    "BLOCK_SIZES",
    "BlockLengthError",
    "CascadeState",
    "ConditionalTransition",
    "ErrorModel",
    "EveModel",
    "HammingParams",
    "KeyString",
    "LeakLedger",
    "MaxP0Result",
    "MessageKind",
    "OptimizationResult",
    "P0Estimate",
    "PassLeak",
    "PassRecord",
    "ProtocolError",
    "Schedule",
    "ShufflePlan",
    "SyndromeZeroCounts",
    "Transcript",
    "TransitionRow",
    "TransitionTable",
    "TrialConfig",
    "TrialReport",
    "WinnowMessage",
    "apply_privacy_maintenance",
    "binary_max_p0",
    "binary_pass",
    "binomial_pmf",
    "brute_force_counts",
    "census_parity",
    "communications_per_pass",
    "conditional_transition",
    "correction_position",
    "count_syndrome_zero",
    "estimate_p0",
    "generate_pair",
    "max_correctable_p0",
    "odd_parity_probability",
    "optimize_schedule",
    "parity_check_matrix",
    "pass_error_rate",
    "pass_mu",
    "run_schedule",
    "run_trials",
    "secure_yield",
    "shuffle",
    "syndrome",
    "transition_table",
    "winnow_pass",
]
