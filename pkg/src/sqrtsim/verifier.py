"""Certifying streaming verifier: accept or reject a claimed movement
log for (machine, input, t) with accounted O(b + t/b) workspace.

The decision depends only on exact replay outcomes; fingerprints are
never consulted. Soundness is relative to transition-function
consistency of the replayed run: distinct encodings of the same no-op
are equivalent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .are import SpaceAudit, evaluate_root
from .interval import FailLocus
from .machine import MOVE_NAMES, Machine, MicroOp, initial_configuration, input_symbol_at, step
from .transcript import Transcript

ACCEPT = "ACCEPT"
REJECT = "REJECT"


@dataclass
class Verdict:
    decision: str
    locus: FailLocus | None
    audit: SpaceAudit | None

    def to_json(self) -> str:
        rec = {"decision": self.decision}
        if self.locus is not None:
            rec["locus"] = {"kind": self.locus.kind, "block": self.locus.block,
                            "tape": self.locus.tape, "field": self.locus.field,
                            "detail": self.locus.detail}
        if self.audit is not None:
            rec["peak_bits"] = dict(self.audit.peak)
            rec["peak_total_bits"] = self.audit.peak_total
        return json.dumps(rec)


def default_block_size(t: int) -> int:
    return max(1, math.ceil(math.sqrt(t)))


def verify(m: Machine, input_str: str, tr: Transcript, b: int | None = None) -> Verdict:
    """ACCEPT iff the root interval summary evaluates to OK."""
    if b is None:
        b = default_block_size(tr.t)
    if len(tr.records) != tr.t:
        return Verdict(REJECT, FailLocus("format", 0, None, "length",
                                         "record count differs from t"), None)
    if tr.machine_digest != m.digest:
        return Verdict(REJECT, FailLocus("format", 0, None, "digest",
                                         "transcript was produced for a different machine"), None)
    summary, audit = evaluate_root(m, input_str, tr, b)
    if summary.is_ok():
        return Verdict(ACCEPT, None, audit)
    return Verdict(REJECT, summary.locus, audit)


def corrupt(tr: Transcript, step_index: int, tape: int | None, field: str,
            value) -> Transcript:
    """Return a transcript differing in exactly one field of one record.

    step_index is 0-based; field is 'write' | 'move' | 'input_move';
    tape is required for the per-tape fields. The original is untouched.
    """
    if not 0 <= step_index < tr.t:
        raise IndexError(f"step {step_index} outside [0, {tr.t})")
    op = tr.records[step_index]
    if field == "write":
        writes = list(op.writes)
        writes[tape] = value
        new_op = MicroOp(writes=tuple(writes), moves=op.moves, input_move=op.input_move)
    elif field == "move":
        moves = list(op.moves)
        moves[tape] = value
        new_op = MicroOp(writes=op.writes, moves=tuple(moves), input_move=op.input_move)
    elif field == "input_move":
        new_op = MicroOp(writes=op.writes, moves=op.moves, input_move=value)
    else:
        raise ValueError(f"unknown field {field!r}")
    records = tr.records[:step_index] + (new_op,) + tr.records[step_index + 1:]
    return Transcript(machine_digest=tr.machine_digest, t=tr.t, records=records)


def brute_force_consistent(m: Machine, input_str: str, tr: Transcript) -> bool:
    """Full-replay oracle: run the machine directly for t steps and check
    that every logged record is effect-equivalent to the step actually
    performed (a write of the symbol already present equals no-write)."""
    c = initial_configuration(m)
    for op_logged in tr.records:
        before = c
        c, op_gen = step(m, before, input_str)
        for r in range(m.tau):
            cur = before.tape_cell(r, before.work_heads[r])
            eff_gen = cur if op_gen.writes[r] is None else op_gen.writes[r]
            eff_log = cur if op_logged.writes[r] is None else op_logged.writes[r]
            if eff_gen != eff_log or op_gen.moves[r] != op_logged.moves[r]:
                return False
        if op_gen.input_move != op_logged.input_move:
            return False
    return True
