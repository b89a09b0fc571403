"""Streaming evaluator over the compressed midpoint tree, with a
categorized workspace meter.

The evaluator walks the midpoint tree in-order with a pointerless token
stack, materializes one leaf window at a time, keeps a two-bit progress
flag per pending merge in a flat ledger, and threads a constant-size
cursor (state and head positions) through the leaves. Every accounted
buffer flows through the SpaceAudit; read-only inputs (machine, input
string, transcript) are never counted.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .algebra import CombinerAlgebra
from .hct import Dir, NodeType, PathToken, TraversalState, midpoint
from .interval import IntervalSummary, leaf_summary, merge
from .machine import Machine
from .transcript import Transcript, block_windows, num_blocks, summarize_block

CATEGORIES = ("leaf_window", "ledger", "stack_tokens", "scratch", "field_registers")

DEFAULT_SLACK = 2.0


def audit_slack() -> float:
    return float(os.environ.get("SQRTSIM_SLACK", DEFAULT_SLACK))


class AuditError(RuntimeError):
    pass


@dataclass
class SpaceAudit:
    """Peak-workspace meter in bits, one bucket per category."""
    slack: float = field(default_factory=audit_slack)
    current: dict = field(default_factory=lambda: {c: 0 for c in CATEGORIES})
    peak: dict = field(default_factory=lambda: {c: 0 for c in CATEGORIES})
    envelopes: dict = field(default_factory=dict)
    current_total: int = 0
    peak_total: int = 0
    # frontier instrumentation
    leaf_windows_live: int = 0
    peak_leaf_windows: int = 0
    interface_records_live: int = 0
    peak_interface_records: int = 0

    def account(self, category: str, delta: int):
        if category not in self.current:
            raise AuditError(f"unknown category {category!r}")
        new = self.current[category] + delta
        if new < 0:
            raise AuditError(f"negative balance in {category}: double release")
        env = self.envelopes.get(category)
        if env is not None and new > self.slack * env:
            raise AuditError(
                f"{category} at {new} bits exceeds envelope {env} x slack {self.slack}")
        self.current[category] = new
        self.peak[category] = max(self.peak[category], new)
        self.current_total += delta
        self.peak_total = max(self.peak_total, self.current_total)
        return self

    def claim(self, category: str, bits: int):
        return self.account(category, bits)

    def release(self, category: str, bits: int):
        return self.account(category, -bits)

    def enter_leaf_window(self):
        self.leaf_windows_live += 1
        self.peak_leaf_windows = max(self.peak_leaf_windows, self.leaf_windows_live)

    def exit_leaf_window(self):
        self.leaf_windows_live -= 1

    def enter_interface_record(self, n: int = 1):
        self.interface_records_live += n
        self.peak_interface_records = max(self.peak_interface_records,
                                          self.interface_records_live)

    def exit_interface_record(self, n: int = 1):
        self.interface_records_live -= n


def _bits(n: int) -> int:
    return max(1, n.bit_length())


@dataclass
class Sizing:
    """Bit sizes of the accounted objects for one (machine, t, b) run."""
    cell_bits: int
    state_bits: int
    pos_bits: int
    token_bits: int = 2

    @classmethod
    def for_run(cls, m: Machine, t: int) -> "Sizing":
        # window buffers store one byte per cell, matching the actual
        # byte-per-symbol representation
        return cls(cell_bits=8,
                   state_bits=_bits(len(m.states) - 1),
                   pos_bits=_bits(t + 2) + 1)  # signed positions

    def interface_record_bits(self, tau: int) -> int:
        # entry/exit state plus entry/exit input and work head positions
        return 2 * self.state_bits + 2 * (1 + tau) * self.pos_bits

    def cursor_bits(self, tau: int) -> int:
        return self.state_bits + (1 + tau) * self.pos_bits


def evaluate_root(m: Machine, input_str: str, tr: Transcript, b: int):
    """Evaluate Sigma([1, T]) by in-order DFS over the midpoint tree.

    Returns (root IntervalSummary, SpaceAudit). Exactly T leaf replays
    and T-1 merges are performed; at most one leaf window is ever
    materialized at a time.
    """
    t = tr.t
    if b < 1 or t < 1:
        raise ValueError(f"need b >= 1 and t >= 1, got b={b}, t={t}")
    if tr.machine_digest != m.digest:
        raise ValueError("transcript digest does not match the machine")

    T = num_blocks(t, b)
    tau = m.tau
    sz = Sizing.for_run(m, t)
    depth_bound = max(1, math.ceil(math.log2(T))) if T > 1 else 0
    audit = SpaceAudit()
    audit.envelopes = {
        "leaf_window": 2 * tau * b * sz.cell_bits + 8,
        "ledger": 2 * T + 2,
        "stack_tokens": sz.token_bits * (depth_bound + 1),
        "scratch": (2 * _bits(T + 1) + sz.cursor_bits(tau)
                    + (depth_bound + 2) * sz.interface_record_bits(tau)),
        "field_registers": 0,  # set below once the algebra is sized
    }
    algebra = CombinerAlgebra(m.states)
    grid_bits = 8 * (2 ** algebra.M) * algebra.p
    audit.envelopes["field_registers"] = (depth_bound + 2) * grid_bits

    ledger_bits = 2 * (T - 1)
    scratch_base = 2 * _bits(T + 1) + sz.cursor_bits(tau)
    audit.claim("ledger", ledger_bits)
    audit.claim("scratch", scratch_base)

    ledger = bytearray(2 * T)  # flat flag array indexed by merge boundary
    ctx = (m, input_str, tr, b)
    cursor = (m.start, 0, tuple(0 for _ in range(tau)))
    st = TraversalState(T=T)
    frontier = []  # completed left children: (summary, grid)
    iface_bits = sz.interface_record_bits(tau)
    merges_done = 0
    leaves_done = 0

    def push(tok):
        st.tokens.append(tok)
        audit.claim("stack_tokens", sz.token_bits)

    def pop():
        audit.release("stack_tokens", sz.token_bits)
        return st.tokens.pop()

    def descend_leftmost():
        while not st.at_leaf():
            push(PathToken(NodeType.SPLIT, Dir.L))

    def process_leaf(k):
        nonlocal cursor, leaves_done
        # size the window buffers before materializing them
        windows = block_windows(tr, b, k, cursor[2])
        window_bits = sum(len(w) for w in windows) * sz.cell_bits
        audit.claim("leaf_window", window_bits)
        audit.enter_leaf_window()
        sigma = summarize_block(m, input_str, tr, b, k, cursor)
        audit.exit_leaf_window()
        audit.release("leaf_window", window_bits)
        summary = leaf_summary(sigma)
        grid = algebra.leaf_grid(sigma.q_in, sigma.q_out, sigma.mismatch is None)
        audit.claim("field_registers", grid_bits)
        cursor = (sigma.q_out, sigma.input_head_out, summary.work_heads_out)
        leaves_done += 1
        return summary, grid

    def merge_windows_account():
        # interface reconciliation materializes at most two boundary
        # buffers of one tape at a time
        bits = 2 * b * sz.cell_bits
        audit.claim("leaf_window", bits)
        return bits

    descend_leftmost()
    summary = grid = None
    while True:
        lo, hi = st.endpoints()
        summary, grid = process_leaf(lo)
        audit.enter_interface_record()  # the summary in hand
        while st.tokens and st.tokens[-1].dir is Dir.R:
            pop()
            plo, phi = st.endpoints()
            boundary = midpoint(plo, phi)
            left_summary, left_grid = frontier.pop()
            mbits = merge_windows_account()
            summary = merge(left_summary, summary, ctx)
            audit.release("leaf_window", mbits)
            grid = algebra.combine(left_grid, grid)
            audit.release("field_registers", grid_bits)  # children collapse to parent
            audit.release("scratch", iface_bits)
            audit.exit_interface_record()
            ledger[2 * boundary - 1] = 1  # right_done
            merges_done += 1
        if not st.tokens:
            audit.exit_interface_record()
            break
        # current subtree is a left child: park it and move to the sibling
        pop()
        plo, phi = st.endpoints()
        boundary = midpoint(plo, phi)
        ledger[2 * boundary - 2] = 1  # left_done
        frontier.append((summary, grid))
        audit.claim("scratch", iface_bits)
        push(PathToken(NodeType.COMBINER, Dir.R))
        descend_leftmost()

    assert leaves_done == T and merges_done == T - 1, "schedule bookkeeping broke"
    audit.release("field_registers", grid_bits)
    audit.release("scratch", scratch_base)
    audit.release("ledger", ledger_bits)
    summary_grid_state = algebra.decode_grid(grid)
    summary._algebra_projection = summary_grid_state  # exposed for agreement checks
    return summary, audit


def projection_equal(a: IntervalSummary, b: IntervalSummary) -> bool:
    """b-independent comparison of root summaries (loci are b-granular)."""
    return (a.q_in == b.q_in and a.q_out == b.q_out
            and a.input_head_in == b.input_head_in
            and a.input_head_out == b.input_head_out
            and a.work_heads_in == b.work_heads_in
            and a.work_heads_out == b.work_heads_out
            and a.status == b.status)


CSV_COLUMNS = ("t", "b", "T", "leaf_window_bits", "ledger_bits", "stack_bits",
               "scratch_bits", "field_bits", "total_bits", "root_status")


def audit_row(t: int, b: int, summary: IntervalSummary, audit: SpaceAudit) -> dict:
    return {
        "t": t, "b": b, "T": num_blocks(t, b),
        "leaf_window_bits": audit.peak["leaf_window"],
        "ledger_bits": audit.peak["ledger"],
        "stack_bits": audit.peak["stack_tokens"],
        "scratch_bits": audit.peak["scratch"],
        "field_bits": audit.peak["field_registers"],
        "total_bits": audit.peak_total,
        "root_status": summary.status,
    }


def sweep_b(m: Machine, input_str: str, tr: Transcript, b_values):
    """One evaluate_root per block size; asserts b-invariance of the root.

    Returns (rows, root summary), rows following the CSV schema.
    """
    rows = []
    reference = None
    for b in b_values:
        summary, audit = evaluate_root(m, input_str, tr, b)
        if reference is None:
            reference = summary
        elif not projection_equal(reference, summary):
            raise AuditError(f"root summary differs at b={b}: evaluation is b-dependent")
        rows.append(audit_row(tr.t, b, summary, audit))
    return rows, reference


def fit_envelope(rows):
    """Nonnegative least-squares fit of
    peak_total = a*b + beta*(t/b) + gamma*log2(T+1) + d0.

    Fitted as a tight upper envelope: nonnegative constants minimizing
    the total overshoot subject to dominating every measurement. The
    domination constraint keeps the per-term slopes physical, so the
    constants extrapolate to larger t (an ordinary least-squares fit
    lets the intercept absorb the b- and t/b-dependence).
    """
    from scipy.optimize import linprog
    X = np.array([[r["b"], r["t"] / r["b"], math.log2(r["T"] + 1), 1.0] for r in rows])
    y = np.array([float(r["total_bits"]) for r in rows])
    # minimize sum_i (X_i . p - y_i)  s.t.  X p >= y, p >= 0
    res = linprog(c=X.sum(axis=0), A_ub=-X, b_ub=-y, bounds=[(0, None)] * 4,
                  method="highs")
    if not res.success:
        raise RuntimeError(f"envelope fit failed: {res.message}")
    return tuple(res.x)


def envelope_value(params, t: int, b: int) -> float:
    alpha, beta, gamma, delta0 = params
    T = num_blocks(t, b)
    return alpha * b + beta * (t / b) + gamma * math.log2(T + 1) + delta0
