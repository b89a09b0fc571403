import pytest
from hypothesis import given, settings, strategies as st

from sqrtsim.machine import (BLANK, MachineError, MicroOp, initial_configuration,
                             machine_to_text, noop_microop, parse_machine,
                             run_direct, step)
from sqrtsim.corpus import random_machine, random_input

import random


def test_parse_demo_machine(demo):
    assert demo.tau == 2
    assert len(demo.states) == 3
    assert set(demo.states) == {"q0", "q1", "qacc"}
    assert set(demo.alphabet) == {"0", "1", BLANK}


def test_parse_unknown_state():
    text = (
        "tapes: 1\nstates: q0 qacc qrej\nstart: q0\naccept: qacc\nreject: qrej\n"
        "alphabet: _ 1\ninput_alphabet: 1\n"
        "delta: q9 1 1 -> q0 = S S\n"
    )
    with pytest.raises(MachineError, match="unknown state"):
        parse_machine(text)


def test_parse_single_state_machine():
    # start = accept = reject: the lone state self-loops, no delta rules needed
    text = (
        "tapes: 1\nstates: q0\nstart: q0\naccept: q0\nreject: q0\n"
        "alphabet: _ 1\ninput_alphabet: 1\n"
    )
    m = parse_machine(text)
    assert len(m.states) == 1
    c = initial_configuration(m)
    c2, op = step(m, c, "")
    assert c2.state == "q0" and op.is_noop()


def test_parse_non_total_table():
    text = (
        "tapes: 1\nstates: q0 qacc qrej\nstart: q0\naccept: qacc\nreject: qrej\n"
        "alphabet: _ 1\ninput_alphabet: 1\n"
        "delta: q0 1 1 -> q0 = S S\n"
    )
    with pytest.raises(MachineError, match="non-total"):
        parse_machine(text)


def test_parse_duplicate_rule():
    text = (
        "tapes: 1\nstates: q0\nstart: q0\naccept: q0\nreject: q0\n"
        "alphabet: _ 1\ninput_alphabet: 1\n"
        "delta: q0 1 1 -> q0 = S S\n"
        "delta: q0 1 1 -> q0 1 R S\n"
    )
    with pytest.raises(MachineError, match="duplicate"):
        parse_machine(text)


def test_step_inc(inc):
    c = initial_configuration(inc)
    c2, op = step(inc, c, "")
    assert c2.work_heads == [1]
    assert c2.tape_cell(0, 0) == "1"
    assert op == MicroOp(writes=("1",), moves=(1,), input_move=0)


def test_step_halting_is_noop(demo):
    c = initial_configuration(demo)
    c.state = demo.accept
    c2, op = step(demo, c, "")
    assert op == noop_microop(demo.tau)
    assert c2.state == c.state and c2.work_heads == c.work_heads


def test_demo_block1_exit_state(demo):
    c = initial_configuration(demo)
    for _ in range(3):
        c, _ = step(demo, c, "")
    assert c.state == "q1"


def test_run_direct_inc_t5(inc):
    final, tr = run_direct(inc, "", 5)
    assert final.work_heads == [5]
    assert all(final.tape_cell(0, i) == "1" for i in range(5))
    assert tr.t == 5 and len(tr.records) == 5


def test_run_direct_t0(inc):
    final, tr = run_direct(inc, "", 0)
    assert final.state == inc.start and final.work_heads == [0]
    assert tr.t == 0 and tr.records == ()


def test_run_direct_pads_after_halt(demo):
    final, tr = run_direct(demo, "", 12)
    assert final.state == demo.accept
    assert all(op.is_noop() for op in tr.records[7:])
    assert len(tr.records) == 12


def test_machine_text_roundtrip_random():
    rng = random.Random(3)
    for _ in range(10):
        m = random_machine(rng)
        m2 = parse_machine(machine_to_text(m))
        assert m2.digest == m.digest
        assert m2.transition == m.transition


def test_digest_distinguishes_machines(inc, demo):
    assert inc.digest != demo.digest


@given(seed=st.integers(0, 10_000), t=st.integers(0, 40))
@settings(max_examples=40, deadline=None)
def test_run_direct_head_positions_match_moves(seed, t):
    # replaying the recorded moves from 0 must land on the final heads
    rng = random.Random(seed)
    m = random_machine(rng)
    x = random_input(rng, m)
    final, tr = run_direct(m, x, t)
    for r in range(m.tau):
        assert sum(op.moves[r] for op in tr.records) == final.work_heads[r]
    assert sum(op.input_move for op in tr.records) == final.input_head
