"""Interval summaries and the associative merge operator with exact
interface replay.

Merging adjacent intervals checks the control state, the input head and
every work head at the unique interface, then reconciles window-overlap
contents by reconstructing the boundary windows from the transcript.
FAIL is absorbing; a merged FAIL always carries the earliest locus.
"""

from __future__ import annotations

from dataclasses import dataclass

from .machine import Machine
from .transcript import (BlockSummary, LogMismatch, Transcript, Window,
                         block_slice, num_blocks, reconstruct_window_at)


@dataclass(frozen=True)
class FailLocus:
    """First failing check: either a leaf replay divergence or an
    interface inconsistency at a block boundary."""
    kind: str              # 'leaf' | 'interface' | 'format'
    block: int             # leaf block index, or left block of the interface
    tape: int | None
    field: str
    detail: str

    def sort_key(self):
        # leaf faults within block k precede the interface k | k+1
        return (self.block, 0 if self.kind == "leaf" else 1,
                -1 if self.tape is None else self.tape, self.field)


def locus_from_mismatch(k: int, mm: LogMismatch) -> FailLocus:
    return FailLocus(kind="leaf", block=k, tape=mm.tape, field=mm.field,
                     detail=f"step {mm.step}: delta gives {mm.expected!r}, log says {mm.found!r}")


def _earliest(*loci):
    present = [l for l in loci if l is not None]
    return min(present, key=FailLocus.sort_key) if present else None


@dataclass
class IntervalSummary:
    interval: tuple          # (i, j), 1-based block indices
    q_in: str
    q_out: str
    input_head_in: int
    input_head_out: int
    work_heads_in: tuple
    work_heads_out: tuple
    # boundary windows are handles (block index + Window), never stored arrays
    left_windows: tuple      # windows of block i
    right_windows: tuple     # windows of block j
    status: str = "OK"       # 'OK' | 'FAIL'
    locus: FailLocus | None = None

    def is_ok(self) -> bool:
        return self.status == "OK"

    def same_fields(self, other: "IntervalSummary") -> bool:
        return (self.interval == other.interval and self.q_in == other.q_in
                and self.q_out == other.q_out
                and self.input_head_in == other.input_head_in
                and self.input_head_out == other.input_head_out
                and self.work_heads_in == other.work_heads_in
                and self.work_heads_out == other.work_heads_out
                and self.status == other.status and self.locus == other.locus)


def leaf_summary(sigma: BlockSummary) -> IntervalSummary:
    heads_in = tuple(sigma.windows[r].lo + sigma.enter_offsets[r]
                     for r in range(len(sigma.windows)))
    heads_out = tuple(sigma.windows[r].lo + sigma.exit_offsets[r]
                      for r in range(len(sigma.windows)))
    locus = locus_from_mismatch(sigma.k, sigma.mismatch) if sigma.mismatch else None
    return IntervalSummary(
        interval=(sigma.k, sigma.k), q_in=sigma.q_in, q_out=sigma.q_out,
        input_head_in=sigma.input_head_in, input_head_out=sigma.input_head_out,
        work_heads_in=heads_in, work_heads_out=heads_out,
        left_windows=sigma.windows, right_windows=sigma.windows,
        status="FAIL" if locus else "OK", locus=locus)


def check_topology(parent, left, right) -> bool:
    """True iff left/right are the midpoint children of parent."""
    i, j = parent
    return (left[0] == i and right[1] == j and left[1] == (i + j) // 2
            and right[0] == left[1] + 1 and i <= left[1] < j)


def _exit_contents(tr: Transcript, b: int, k: int, w: Window):
    """Window contents at the end of block k, obtained by reconstructing
    the entry contents and then applying block k's own log slice over w
    (the left route of the interface reconciliation)."""
    start, end = block_slice(tr.t, b, k)
    buf = list(reconstruct_window_at(tr, start, w))
    pos = tr.head_before_step(w.tape, start) if start < tr.t else 0
    for op in tr.records[start:end]:
        if op.writes[w.tape] is not None and w.lo <= pos <= w.hi:
            buf[pos - w.lo] = op.writes[w.tape]
        pos += op.moves[w.tape]
    return tuple(buf)


def _interface_check(left: IntervalSummary, right: IntervalSummary, ctx) -> FailLocus | None:
    """Exact checks at the unique interface between two adjacent intervals."""
    machine, input_str, tr, b = ctx
    m_blk = left.interval[1]
    if left.q_out != right.q_in:
        return FailLocus("interface", m_blk, None, "state",
                         f"exit {left.q_out} != entry {right.q_in}")
    if left.input_head_out != right.input_head_in:
        return FailLocus("interface", m_blk, None, "input_head",
                         f"exit {left.input_head_out} != entry {right.input_head_in}")
    for r in range(machine.tau):
        if left.work_heads_out[r] != right.work_heads_in[r]:
            return FailLocus("interface", m_blk, r, "work_head",
                             f"exit {left.work_heads_out[r]} != entry {right.work_heads_in[r]}")
    # Window-overlap consistency by exact bounded-window replay: the left
    # block's exit contents must agree with the right block's entry contents
    # on overlapping cells. Disjoint windows need no content check.
    for r in range(machine.tau):
        lw = left.right_windows[r]
        rw = right.left_windows[r]
        lo, hi = max(lw.lo, rw.lo), min(lw.hi, rw.hi)
        if lo > hi:
            continue
        left_exit = _exit_contents(tr, b, m_blk, lw)
        right_entry = reconstruct_window_at(tr, block_slice(tr.t, b, m_blk + 1)[0], rw)
        for cell in range(lo, hi + 1):
            a = left_exit[cell - lw.lo]
            c = right_entry[cell - rw.lo]
            if a != c:
                return FailLocus("interface", m_blk, r, "window",
                                 f"cell {cell}: left replay {a!r} != right entry {c!r}")
    return None


def merge(left: IntervalSummary, right: IntervalSummary, ctx) -> IntervalSummary:
    """The associative operator: Sigma([i,m]) (+) Sigma([m+1,j]).

    ctx is (Machine, input string, Transcript, block size). Non-adjacent
    intervals are a programming error, distinct from a semantic FAIL.
    """
    if left.interval[1] + 1 != right.interval[0]:
        raise ValueError(f"intervals {left.interval} and {right.interval} are not adjacent")
    own = _interface_check(left, right, ctx)
    locus = _earliest(left.locus, right.locus, own)
    return IntervalSummary(
        interval=(left.interval[0], right.interval[1]),
        q_in=left.q_in, q_out=right.q_out,
        input_head_in=left.input_head_in, input_head_out=right.input_head_out,
        work_heads_in=left.work_heads_in, work_heads_out=right.work_heads_out,
        left_windows=left.left_windows, right_windows=right.right_windows,
        status="FAIL" if locus else "OK", locus=locus)


def fold_left(summaries, ctx) -> IntervalSummary:
    """Left-deep fold over consecutive interval summaries."""
    acc = summaries[0]
    for s in summaries[1:]:
        acc = merge(acc, s, ctx)
    return acc


def fold_balanced(summaries, ctx) -> IntervalSummary:
    """Midpoint-balanced fold (matches the compressed-tree bracketing)."""
    if len(summaries) == 1:
        return summaries[0]
    i = summaries[0].interval[0]
    j = summaries[-1].interval[1]
    c = (i + j) // 2
    split = c - i + 1
    return merge(fold_balanced(summaries[:split], ctx),
                 fold_balanced(summaries[split:], ctx), ctx)
