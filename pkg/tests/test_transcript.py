import random

import pytest
from hypothesis import given, settings, strategies as st

from sqrtsim.corpus import random_input, random_machine
from sqrtsim.machine import BLANK, run_direct, step, initial_configuration
from sqrtsim.transcript import (Window, block_slice, block_windows, num_blocks,
                                partition, reconstruct_entry_window,
                                reconstruct_window_at, replay_leaf,
                                summarize_block, transcript_from_binary,
                                transcript_from_text, transcript_to_binary,
                                transcript_to_text, TranscriptFormatError)


# -- partition ---------------------------------------------------------------

def test_partition_t7_b3():
    assert partition(7, 3) == [(1, 3), (4, 6), (7, 7)]
    assert num_blocks(7, 3) == 3


def test_partition_single_block_when_b_exceeds_t():
    assert partition(5, 8) == [(1, 5)]
    assert num_blocks(5, 8) == 1


def test_partition_exact_division():
    assert partition(8, 2) == [(1, 2), (3, 4), (5, 6), (7, 8)]


def test_partition_rejects_bad_b():
    with pytest.raises(ValueError):
        partition(7, 0)


@given(t=st.integers(1, 300), b=st.integers(1, 300))
@settings(max_examples=100, deadline=None)
def test_partition_disjoint_cover(t, b):
    blocks = partition(t, b)
    assert blocks[0][0] == 1 and blocks[-1][1] == t
    for (a1, b1), (a2, b2) in zip(blocks, blocks[1:]):
        assert a2 == b1 + 1
    assert all(hi - lo + 1 <= b for lo, hi in blocks)
    assert len(blocks) == num_blocks(t, b)


# -- windows -----------------------------------------------------------------

def test_demo_block1_windows(demo):
    _, tr = run_direct(demo, "", 7)
    w = block_windows(tr, 3, 1, (0, 0))
    assert (w[0].lo, w[0].hi) == (0, 1)
    assert (w[1].lo, w[1].hi) == (-1, 0)


def test_window_all_stay_moves(demo):
    # the padding region of a halted run never moves the heads
    _, tr = run_direct(demo, "", 16)
    w = block_windows(tr, 4, 3, (2, 1))  # steps 9..12: machine halted at 7
    assert (w[0].lo, w[0].hi) == (2, 2) and len(w[0]) == 1
    assert (w[1].lo, w[1].hi) == (1, 1)


def test_inc_block2_window(inc):
    _, tr = run_direct(inc, "", 8)
    w = block_windows(tr, 4, 2, (4,))
    assert (w[0].lo, w[0].hi) == (4, 7)


def test_window_length_bound(small_corpus):
    b = 8
    for m, x in small_corpus:
        final, tr = run_direct(m, x, 64)
        heads = tuple(0 for _ in range(m.tau))
        cursor = (m.start, 0, heads)
        for k in range(1, num_blocks(64, b) + 1):
            sigma = summarize_block(m, x, tr, b, k, cursor)
            for w in sigma.windows:
                assert len(w) <= b
            assert sigma.log_slice[1] - sigma.log_slice[0] <= b
            cursor = (sigma.q_out, sigma.input_head_out,
                      tuple(sigma.windows[r].lo + sigma.exit_offsets[r]
                            for r in range(m.tau)))


# -- reconstruction ----------------------------------------------------------

def test_reconstruct_block1_all_blank(inc):
    _, tr = run_direct(inc, "", 8)
    w = Window(tape=0, lo=0, hi=3)
    assert reconstruct_entry_window(tr, 4, 1, w) == (BLANK,) * 4


def test_reconstruct_inc_block2_disjoint(inc):
    _, tr = run_direct(inc, "", 8)
    assert reconstruct_entry_window(tr, 4, 2, Window(0, 4, 7)) == (BLANK,) * 4


def test_reconstruct_inc_block2_overlapping(inc):
    _, tr = run_direct(inc, "", 8)
    assert reconstruct_entry_window(tr, 4, 2, Window(0, 2, 5)) == ("1", "1", BLANK, BLANK)


def test_reconstruction_matches_direct_snapshot(small_corpus):
    # cell-by-cell agreement with the oracle's tape at every block boundary
    t, b = 48, 6
    for m, x in small_corpus[:5]:
        _, tr = run_direct(m, x, t)
        c = initial_configuration(m)
        snapshots = {0: c.copy()}
        for s in range(1, t + 1):
            c, _ = step(m, c, x)
            snapshots[s] = c.copy()
        for k in range(1, num_blocks(t, b) + 1):
            start, _ = block_slice(t, b, k)
            snap = snapshots[start]
            for r in range(m.tau):
                w = Window(r, snap.work_heads[r] - 3, snap.work_heads[r] + 3)
                got = reconstruct_window_at(tr, start, w)
                want = tuple(snap.tape_cell(r, p) for p in range(w.lo, w.hi + 1))
                assert got == want


# -- summaries and leaf replay -----------------------------------------------

def test_demo_block_summaries(demo):
    _, tr = run_direct(demo, "", 7)
    s1 = summarize_block(demo, "", tr, 3, 1, ("q0", 0, (0, 0)))
    assert (s1.q_in, s1.q_out) == ("q0", "q1")
    assert s1.mismatch is None
    heads = tuple(s1.windows[r].lo + s1.exit_offsets[r] for r in range(2))
    s2 = summarize_block(demo, "", tr, 3, 2, (s1.q_out, s1.input_head_out, heads))
    assert (s2.q_in, s2.q_out) == ("q1", "q1")
    assert s2.mismatch is None


def test_padding_block_summary(demo):
    _, tr = run_direct(demo, "", 16)
    sigma = summarize_block(demo, "", tr, 4, 4, (demo.accept, 0, (2, 1)))
    assert sigma.q_in == sigma.q_out == demo.accept
    assert sigma.enter_offsets == sigma.exit_offsets
    assert all(op.is_noop() for op in sigma.ops)


def test_replay_detects_flipped_write(demo):
    from sqrtsim.verifier import corrupt
    _, tr = run_direct(demo, "", 7)
    bad = corrupt(tr, 0, 1, "write", "0")  # step 1 writes 1 on tape 2
    sigma = summarize_block(demo, "", bad, 3, 1, ("q0", 0, (0, 0)))
    assert sigma.mismatch is not None
    assert sigma.mismatch.step == 1
    assert sigma.mismatch.field == "write"


def test_replay_leaf_inc_block(inc):
    _, tr = run_direct(inc, "", 8)
    sigma = summarize_block(inc, "", tr, 4, 1, ("q0", 0, (0,)))
    rep = replay_leaf(inc, "", sigma, [(BLANK,) * 4])
    assert rep.ok
    assert rep.exit_heads == (4,)
    assert rep.exit_windows[0] == ("1",) * 4


def test_composed_exit_state_matches_oracle(small_corpus):
    for m, x in small_corpus:
        final, tr = run_direct(m, x, 64)
        cursor = (m.start, 0, tuple(0 for _ in range(m.tau)))
        for k in range(1, num_blocks(64, 8) + 1):
            sigma = summarize_block(m, x, tr, 8, k, cursor)
            assert sigma.mismatch is None
            cursor = (sigma.q_out, sigma.input_head_out,
                      tuple(sigma.windows[r].lo + sigma.exit_offsets[r]
                            for r in range(m.tau)))
        assert cursor[0] == final.state
        assert cursor[1] == final.input_head
        assert list(cursor[2]) == final.work_heads


# -- serialization -----------------------------------------------------------

def _random_run(seed, t=24):
    rng = random.Random(seed)
    m = random_machine(rng)
    x = random_input(rng, m)
    return run_direct(m, x, t)[1]


@given(seed=st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_text_roundtrip(seed):
    tr = _random_run(seed)
    tr2 = transcript_from_text(transcript_to_text(tr))
    assert tr2.machine_digest == tr.machine_digest
    assert tr2.records == tr.records


@given(seed=st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_binary_roundtrip(seed):
    tr = _random_run(seed)
    tr2 = transcript_from_binary(transcript_to_binary(tr))
    assert tr2.records == tr.records
    assert tr2.machine_digest == tr.machine_digest


def test_text_format_shape(inc):
    _, tr = run_direct(inc, "", 3)
    text = transcript_to_text(tr)
    lines = text.splitlines()
    assert lines[0] == "transcript v1"
    assert lines[1] == f"machine: {inc.digest}"
    assert lines[2] == "t: 3"
    assert lines[3] == "s1: w=1,m=R din=S"


def test_text_rejects_bad_header():
    with pytest.raises(TranscriptFormatError):
        transcript_from_text("nope\n")


def test_text_rejects_record_count_mismatch(inc):
    _, tr = run_direct(inc, "", 3)
    text = transcript_to_text(tr).replace("t: 3", "t: 4")
    with pytest.raises(TranscriptFormatError):
        transcript_from_text(text)
