"""sqrtsim: block-respecting simulation of multitape Turing machines with
accounted O(b + t/b) workspace, interval-summary algebra, and a certifying
transcript verifier."""

from .machine import (
    BLANK,
    Configuration,
    Machine,
    MachineError,
    MicroOp,
    initial_configuration,
    machine_to_text,
    parse_machine,
    run_direct,
    step,
)
from .transcript import (
    BlockSummary,
    LogMismatch,
    Transcript,
    Window,
    block_windows,
    num_blocks,
    partition,
    summarize_block,
    transcript_from_binary,
    transcript_from_text,
    transcript_to_binary,
    transcript_to_text,
)
from .interval import FailLocus, IntervalSummary, fold_balanced, fold_left, leaf_summary, merge
from .hct import PathToken, TraversalState, compute_endpoints, dfs_events, path_potential, weight
from .algebra import CombinerAlgebra, GridEvaluation, check_field_axioms, degree_check, interpolate
from .are import SpaceAudit, audit_row, evaluate_root, fit_envelope, sweep_b
from .verifier import Verdict, brute_force_consistent, corrupt, default_block_size, verify
from .corpus import build_inc_machine, build_two_tape_example, generate_corpus, random_machine

__version__ = "0.1.0"

__all__ = [
    "BLANK", "Configuration", "Machine", "MachineError", "MicroOp",
    "initial_configuration", "machine_to_text", "parse_machine", "run_direct", "step",
    "BlockSummary", "LogMismatch", "Transcript", "Window", "block_windows",
    "num_blocks", "partition", "summarize_block", "transcript_from_binary",
    "transcript_from_text", "transcript_to_binary", "transcript_to_text",
    "FailLocus", "IntervalSummary", "fold_balanced", "fold_left", "leaf_summary", "merge",
    "PathToken", "TraversalState", "compute_endpoints", "dfs_events",
    "path_potential", "weight",
    "CombinerAlgebra", "GridEvaluation", "check_field_axioms", "degree_check", "interpolate",
    "SpaceAudit", "audit_row", "evaluate_root", "fit_envelope", "sweep_b",
    "Verdict", "brute_force_consistent", "corrupt", "default_block_size", "verify",
    "build_inc_machine", "build_two_tape_example", "generate_corpus", "random_machine",
]
