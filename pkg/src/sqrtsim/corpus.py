"""Built-in machines and the seeded random-machine corpus generator."""

from __future__ import annotations

import itertools
import random

from .machine import BLANK, Machine, parse_machine, machine_to_text, run_direct


def _fill_total(transition, states, halting, in_syms, alphabet, tau,
                default=None):
    """Pad every missing (state, input, work) key with a stay-put rule."""
    for q in states:
        if q in halting:
            continue
        for a in in_syms:
            for ws in itertools.product(alphabet, repeat=tau):
                if (q, a, ws) not in transition:
                    transition[(q, a, ws)] = default or (q, (None,) * tau, (0,) * tau, 0)


def build_inc_machine() -> Machine:
    """One-tape machine that writes 1 and moves right forever."""
    states = ("q0", "qacc", "qrej")
    alphabet = (BLANK, "1")
    transition = {}
    for a in ("1", BLANK):
        for w in alphabet:
            transition[("q0", a, (w,))] = ("q0", ("1",), (1,), 0)
    m = Machine(states=states, start="q0", accept="qacc", reject="qrej", tau=1,
                alphabet=alphabet, input_alphabet=("1",), transition=transition)
    # round-trip through the parser to get halting self-loops padded
    return parse_machine(machine_to_text(m))


def build_two_tape_example() -> Machine:
    """Two-tape machine whose 7-step run realizes the worked block
    structure: block 1 touches cells [0,1] / [-1,0] writing tape1[1]=1 and
    tape2[0]=1 and exits in q1; block 2 touches [1,2] / [0,1] staying in
    q1; step 7 accepts."""
    states = ("q0", "q1", "qacc")
    alphabet = ("0", "1", BLANK)
    tau = 2
    rules = {
        ("q0", (BLANK, BLANK)): ("q0->q1", (None, "1"), (1, 0)),
        ("q1", (BLANK, "1")): ("q1", ("1", None), (0, -1)),
        ("q1", ("1", BLANK)): ("q1", (None, None), (0, 1)),
        ("q1", ("1", "1")): ("q1", (None, None), (1, 1)),
        ("q1", (BLANK, BLANK)): ("q1", ("0", None), (0, 0)),
        ("q1", ("0", BLANK)): ("q1", (None, "0"), (0, 0)),
        ("q1", ("0", "0")): ("qacc", (None, None), (0, 0)),
    }
    transition = {}
    for (q, ws), (q2raw, writes, moves) in rules.items():
        q2 = "q1" if q2raw == "q0->q1" else q2raw
        for a in ("0", "1", BLANK):
            transition[(q, a, ws)] = (q2, writes, moves, 0)
    _fill_total(transition, states, {"qacc"}, ("0", "1", BLANK), alphabet, tau)
    m = Machine(states=states, start="q0", accept="qacc", reject="qacc", tau=tau,
                alphabet=alphabet, input_alphabet=("0", "1"), transition=transition)
    return parse_machine(machine_to_text(m))


def random_machine(rng: random.Random, max_states: int = 6, max_tau: int = 2,
                   max_alphabet: int = 3) -> Machine:
    """One random small machine (totality guaranteed, halting optional)."""
    tau = rng.randint(1, max_tau)
    n_work = rng.randint(1, max(2, max_states - 2))  # non-halting states
    states = tuple(f"s{i}" for i in range(n_work)) + ("qacc", "qrej")
    n_syms = rng.randint(2, max_alphabet)
    alphabet = (BLANK,) + tuple("01"[:n_syms - 1])
    input_alphabet = tuple(a for a in alphabet if a != BLANK)
    work_states = states[:n_work]
    transition = {}
    for q in work_states:
        for a in input_alphabet + (BLANK,):
            for ws in itertools.product(alphabet, repeat=tau):
                q2 = rng.choice(states) if rng.random() < 0.03 else rng.choice(work_states)
                writes = tuple(None if rng.random() < 0.3 else rng.choice(alphabet)
                               for _ in range(tau))
                moves = tuple(rng.choice((-1, 0, 1)) for _ in range(tau))
                din = rng.choice((-1, 0, 1))
                transition[(q, a, ws)] = (q2, writes, moves, din)
    m = Machine(states=states, start="s0", accept="qacc", reject="qrej", tau=tau,
                alphabet=alphabet, input_alphabet=input_alphabet, transition=transition)
    return parse_machine(machine_to_text(m))


def random_input(rng: random.Random, m: Machine, max_len: int = 8) -> str:
    n = rng.randint(0, max_len)
    return "".join(rng.choice(m.input_alphabet) for _ in range(n))


def generate_corpus(seed: int, count: int, min_live_steps: int):
    """Seeded machines that keep computing for at least min_live_steps / 2
    steps (so windows and interfaces stay nontrivial)."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("corpus generation is rejecting too many machines")
        m = random_machine(rng)
        x = random_input(rng, m)
        final, tr = run_direct(m, x, min_live_steps)
        live = sum(1 for op in tr.records if not op.is_noop())
        if live * 2 >= min_live_steps:
            out.append((m, x))
    return out
