"""Movement-log transcripts: block partition, windows, summaries, leaf replay.

A transcript is the read-only per-step micro-op stream of a t-step run.
Window contents are never stored; they are reconstructed on demand by
rescanning the transcript prefix (the rescans cost time, not accounted
workspace).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .machine import (BLANK, MOVE_CHARS, MOVE_NAMES, Configuration, Machine,
                      MicroOp, input_symbol_at)


class TranscriptFormatError(ValueError):
    pass


def fnv1a32(parts) -> int:
    """32-bit FNV-1a over an iterable of strings/ints. Advisory tags only."""
    h = 0x811C9DC5
    for p in parts:
        for byte in str(p).encode():
            h ^= byte
            h = (h * 0x01000193) & 0xFFFFFFFF
        h ^= 0xFF
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


@dataclass
class Transcript:
    machine_digest: str
    t: int
    records: tuple  # t MicroOps

    def __post_init__(self):
        if len(self.records) != self.t:
            raise TranscriptFormatError(
                f"transcript claims t={self.t} but has {len(self.records)} records")
        self._cache = None

    @property
    def tau(self) -> int:
        return len(self.records[0].writes) if self.records else 0

    # -- vectorized views (lazy; read-only acceleration of prefix scans) --

    def _arrays(self):
        if self._cache is None:
            tau = self.tau
            t = self.t
            symtab = []
            symidx = {}
            moves = np.zeros((tau, t), dtype=np.int64)
            wsym = np.full((tau, t), -1, dtype=np.int64)
            for s, op in enumerate(self.records):
                for r in range(tau):
                    moves[r, s] = op.moves[r]
                    w = op.writes[r]
                    if w is not None:
                        if w not in symidx:
                            symidx[w] = len(symtab)
                            symtab.append(w)
                        wsym[r, s] = symidx[w]
            # position scanned before each step (heads start at 0)
            pos = np.zeros((tau, t), dtype=np.int64)
            if t > 0:
                pos[:, 1:] = np.cumsum(moves[:, :-1], axis=1)
            self._cache = (moves, wsym, pos, symtab)
        return self._cache

    def head_before_step(self, r: int, s: int) -> int:
        """Work-head position of tape r scanned at 0-indexed step s."""
        _, _, pos, _ = self._arrays()
        return int(pos[r, s])


# ---------------------------------------------------------------------------
# Block partition and windows
# ---------------------------------------------------------------------------

def partition(t: int, b: int):
    """Block index ranges B_1..B_T as 1-based inclusive (start, end) pairs.

    b > t degenerates to a single block [1, t]."""
    if b < 1 or t < 1:
        raise ValueError(f"need b >= 1 and t >= 1, got b={b}, t={t}")
    blocks = []
    k = 1
    while (k - 1) * b + 1 <= t:
        blocks.append(((k - 1) * b + 1, min(k * b, t)))
        k += 1
    return blocks


def num_blocks(t: int, b: int) -> int:
    return -(-t // b)


@dataclass(frozen=True)
class Window:
    tape: int  # 0-based work-tape index
    lo: int
    hi: int

    def __len__(self):
        return self.hi - self.lo + 1


def block_slice(t: int, b: int, k: int):
    """0-indexed [start, end) record range of block k (1-based)."""
    T = num_blocks(t, b)
    if not 1 <= k <= T:
        raise ValueError(f"block index {k} outside [1, {T}]")
    return (k - 1) * b, min(k * b, t)


def block_windows(tr: Transcript, b: int, k: int, entry_heads) -> tuple:
    """Per-tape local window [min, max] of cells scanned during block k.

    entry_heads are the head positions at the start of the block; the
    window tracks the position scanned before each step (so the exit
    position after the final move may lie one cell outside).
    """
    start, end = block_slice(tr.t, b, k)
    moves, _, _, _ = tr._arrays()
    windows = []
    for r in range(tr.tau):
        rel = np.concatenate(([0], np.cumsum(moves[r, start:end - 1])))
        scanned = entry_heads[r] + rel
        windows.append(Window(tape=r, lo=int(scanned.min()), hi=int(scanned.max())))
    return tuple(windows)


def reconstruct_window_at(tr: Transcript, step0: int, w: Window):
    """Contents of window w at the start of 0-indexed step step0.

    Scans all records before step0 and applies the writes landing in w;
    cells never written are blank. Accounted workspace is the |w|-cell
    buffer; the transcript itself is read-only input.
    """
    _, wsym, pos, symtab = tr._arrays()
    n = len(w)
    buf = np.full(n, -1, dtype=np.int64)
    p = pos[w.tape, :step0]
    ws = wsym[w.tape, :step0]
    mask = (p >= w.lo) & (p <= w.hi) & (ws >= 0)
    idx = np.nonzero(mask)[0]
    if len(idx):
        rel = p[idx] - w.lo
        # ordered fancy assignment: the latest write to a cell wins
        for i in idx:
            buf[p[i] - w.lo] = ws[i]
        del rel
    return tuple(BLANK if v < 0 else symtab[v] for v in buf)


def reconstruct_entry_window(tr: Transcript, b: int, k: int, w: Window):
    """Contents of w at the start of block k (blocks 1..k-1 replayed)."""
    start, _ = block_slice(tr.t, b, k)
    return reconstruct_window_at(tr, start, w)


# ---------------------------------------------------------------------------
# Per-block summaries and exact leaf replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogMismatch:
    """First point where the transcript contradicts the transition function."""
    step: int          # 1-based global step index
    tape: int | None   # 0-based, or None for input-move / state-level faults
    field: str         # 'write' | 'move' | 'input_move'
    expected: object   # what delta produced
    found: object      # what the log claims

    def sort_key(self):
        return (self.step, -1 if self.tape is None else self.tape, self.field)


@dataclass
class BlockSummary:
    k: int
    q_in: str
    q_out: str
    input_head_in: int
    input_head_out: int
    windows: tuple            # Window per tape
    enter_offsets: tuple      # head offset from window lo at block entry
    exit_offsets: tuple       # may be -1 or len(window): one cell outside
    log_slice: tuple          # (start, end) 0-indexed into the transcript
    ops: tuple                # the micro-op slice itself
    fingerprint_in: tuple     # advisory 32-bit tags per tape
    fingerprint_out: tuple
    mismatch: LogMismatch | None = None


@dataclass
class LeafReplay:
    ok: bool
    mismatch: LogMismatch | None
    exit_state: str
    exit_input_head: int
    exit_heads: tuple
    exit_windows: tuple  # contents per tape


def _effective(write, current):
    return current if write is None else write


def _replay_block(m: Machine, input_str: str, ops, slice_start: int,
                  entry_state: str, entry_input_head: int, entry_heads,
                  windows, bufs):
    """Core bounded-window replay: re-execute delta inside the window
    buffers, comparing every generated micro-op against the logged one.

    On the first divergence the remaining logged ops are applied as raw
    tape edits so exit heads/contents stay log-derived (deterministic
    FAIL propagation). Returns a LeafReplay.
    """
    tau = m.tau
    bufs = [list(bf) for bf in bufs]
    heads = list(entry_heads)
    state = entry_state
    ih = entry_input_head
    mismatch = None
    for j, logged in enumerate(ops):
        step_global = slice_start + j + 1
        if mismatch is None:
            if m.is_halting(state):
                gen_writes, gen_moves, gen_in = (None,) * tau, (0,) * tau, 0
                q2 = state
            else:
                in_sym = input_symbol_at(input_str, ih)
                work = tuple(bufs[r][heads[r] - windows[r].lo] for r in range(tau))
                q2, gen_writes, gen_moves, gen_in = m.transition[(state, in_sym, work)]
            for r in range(tau):
                cur = bufs[r][heads[r] - windows[r].lo]
                if _effective(gen_writes[r], cur) != _effective(logged.writes[r], cur):
                    mismatch = LogMismatch(step_global, r, "write",
                                           gen_writes[r], logged.writes[r])
                    break
                if gen_moves[r] != logged.moves[r]:
                    mismatch = LogMismatch(step_global, r, "move",
                                           MOVE_NAMES[gen_moves[r]], MOVE_NAMES[logged.moves[r]])
                    break
            if mismatch is None and gen_in != logged.input_move:
                mismatch = LogMismatch(step_global, None, "input_move",
                                       MOVE_NAMES[gen_in], MOVE_NAMES[logged.input_move])
            if mismatch is None:
                state = q2
        # apply the logged op (post-divergence this keeps exits log-derived)
        for r in range(tau):
            if logged.writes[r] is not None:
                bufs[r][heads[r] - windows[r].lo] = logged.writes[r]
            heads[r] += logged.moves[r]
        ih += logged.input_move
    return LeafReplay(ok=mismatch is None, mismatch=mismatch, exit_state=state,
                      exit_input_head=ih, exit_heads=tuple(heads),
                      exit_windows=tuple(tuple(bf) for bf in bufs))


def replay_leaf(m: Machine, input_str: str, sigma: BlockSummary,
                entry_windows) -> LeafReplay:
    """Exact bounded-window replay of one block against its log slice."""
    return _replay_block(m, input_str, sigma.ops, sigma.log_slice[0],
                         sigma.q_in, sigma.input_head_in,
                         [sigma.windows[r].lo + sigma.enter_offsets[r] for r in range(m.tau)],
                         sigma.windows, entry_windows)


def _window_fingerprint(w: Window, contents, offset) -> int:
    return fnv1a32([w.lo, w.hi, offset, *contents])


def summarize_block(m: Machine, input_str: str, tr: Transcript, b: int, k: int,
                    entry) -> BlockSummary:
    """Extract sigma_k given the entry projection (state, input head, work heads).

    Exit fields come from replaying the log slice; fingerprints hash the
    entry and exit window contents (advisory only).
    """
    entry_state, entry_input_head, entry_heads = entry
    start, end = block_slice(tr.t, b, k)
    windows = block_windows(tr, b, k, entry_heads)
    bufs = [reconstruct_entry_window(tr, b, k, w) for w in windows]
    ops = tr.records[start:end]
    rep = _replay_block(m, input_str, ops, start, entry_state, entry_input_head,
                        entry_heads, windows, bufs)
    return BlockSummary(
        k=k, q_in=entry_state, q_out=rep.exit_state,
        input_head_in=entry_input_head, input_head_out=rep.exit_input_head,
        windows=windows,
        enter_offsets=tuple(entry_heads[r] - windows[r].lo for r in range(m.tau)),
        exit_offsets=tuple(rep.exit_heads[r] - windows[r].lo for r in range(m.tau)),
        log_slice=(start, end), ops=ops,
        fingerprint_in=tuple(_window_fingerprint(windows[r], bufs[r],
                                                 entry_heads[r] - windows[r].lo)
                             for r in range(m.tau)),
        fingerprint_out=tuple(_window_fingerprint(windows[r], rep.exit_windows[r],
                                                  rep.exit_heads[r] - windows[r].lo)
                              for r in range(m.tau)),
        mismatch=rep.mismatch,
    )


# ---------------------------------------------------------------------------
# Serialization: text form is normative, binary form is an alternate encoding
# ---------------------------------------------------------------------------

def transcript_to_text(tr: Transcript) -> str:
    lines = ["transcript v1", f"machine: {tr.machine_digest}", f"t: {tr.t}"]
    for s, op in enumerate(tr.records, start=1):
        groups = ";".join(
            f"w={'=' if w is None else w},m={MOVE_NAMES[mv]}"
            for w, mv in zip(op.writes, op.moves))
        lines.append(f"s{s}: {groups} din={MOVE_NAMES[op.input_move]}")
    return "\n".join(lines) + "\n"


def transcript_from_text(text: str) -> Transcript:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "transcript v1":
        raise TranscriptFormatError("missing 'transcript v1' header")
    if not lines[1].startswith("machine:"):
        raise TranscriptFormatError("missing machine digest")
    digest = lines[1].split(":", 1)[1].strip()
    if not lines[2].startswith("t:"):
        raise TranscriptFormatError("missing step count")
    t = int(lines[2].split(":", 1)[1].strip())
    records = []
    for s, ln in enumerate(lines[3:], start=1):
        head, _, rest = ln.partition(":")
        if head.strip() != f"s{s}":
            raise TranscriptFormatError(f"expected record s{s}, got '{head.strip()}'")
        body, _, din = rest.strip().rpartition(" din=")
        if not din:
            raise TranscriptFormatError(f"record s{s}: missing din")
        writes, moves = [], []
        for grp in body.split(";"):
            wpart, _, mpart = grp.partition(",m=")
            if not wpart.startswith("w=") or mpart not in MOVE_CHARS:
                raise TranscriptFormatError(f"record s{s}: bad group '{grp}'")
            wval = wpart[2:]
            writes.append(None if wval == "=" else wval)
            moves.append(MOVE_CHARS[mpart])
        if din not in MOVE_CHARS:
            raise TranscriptFormatError(f"record s{s}: bad din '{din}'")
        records.append(MicroOp(writes=tuple(writes), moves=tuple(moves),
                               input_move=MOVE_CHARS[din]))
    if len(records) != t:
        raise TranscriptFormatError(f"header says t={t} but found {len(records)} records")
    return Transcript(machine_digest=digest, t=t, records=tuple(records))


_BIN_MAGIC = b"SQTR1\x00"


def transcript_to_binary(tr: Transcript) -> bytes:
    out = [_BIN_MAGIC]
    dig = tr.machine_digest.encode()
    out.append(struct.pack("<H", len(dig)))
    out.append(dig)
    out.append(struct.pack("<QB", tr.t, tr.tau))
    for op in tr.records:
        for w, mv in zip(op.writes, op.moves):
            ws = b"\x00" if w is None else w.encode()
            out.append(struct.pack("<B", len(ws) if w is not None else 0))
            if w is not None:
                out.append(ws)
            out.append(struct.pack("<b", mv))
        out.append(struct.pack("<b", op.input_move))
    return b"".join(out)


def transcript_from_binary(data: bytes) -> Transcript:
    if data[:6] != _BIN_MAGIC:
        raise TranscriptFormatError("bad binary transcript magic")
    off = 6
    (dlen,) = struct.unpack_from("<H", data, off)
    off += 2
    digest = data[off:off + dlen].decode()
    off += dlen
    t, tau = struct.unpack_from("<QB", data, off)
    off += 9
    records = []
    for _ in range(t):
        writes, moves = [], []
        for _ in range(tau):
            (wlen,) = struct.unpack_from("<B", data, off)
            off += 1
            if wlen == 0:
                writes.append(None)
            else:
                writes.append(data[off:off + wlen].decode())
                off += wlen
            (mv,) = struct.unpack_from("<b", data, off)
            off += 1
            moves.append(mv)
        (din,) = struct.unpack_from("<b", data, off)
        off += 1
        records.append(MicroOp(writes=tuple(writes), moves=tuple(moves), input_move=din))
    return Transcript(machine_digest=digest, t=t, records=tuple(records))


def replay_transcript(tr: Transcript, tau: int) -> Configuration:
    """Apply the micro-ops verbatim from a blank start (faithfulness checks)."""
    c = Configuration(state="", input_head=0, work_heads=[0] * tau,
                      work_tapes=[{} for _ in range(tau)])
    for op in tr.records:
        for r in range(tau):
            if op.writes[r] is not None:
                if op.writes[r] == BLANK:
                    c.work_tapes[r].pop(c.work_heads[r], None)
                else:
                    c.work_tapes[r][c.work_heads[r]] = op.writes[r]
            c.work_heads[r] += op.moves[r]
        c.input_head += op.input_move
    return c
