"""Multitape Turing machine model, file parser, and direct simulator.

The direct simulator is the trusted oracle: it applies the transition
function step by step on finite-support tapes and records one micro-op
per step. Everything else in the package is checked against it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

BLANK = "_"

MOVE_CHARS = {"L": -1, "S": 0, "R": 1}
MOVE_NAMES = {-1: "L", 0: "S", 1: "R"}

NO_WRITE = None  # sentinel for "leave the cell alone"


class MachineError(ValueError):
    """Malformed machine description (syntax, unknown symbol, non-total table)."""


@dataclass(frozen=True)
class MicroOp:
    """Constant-size record of one step: per-tape writes and moves plus the input move."""

    writes: tuple  # per work tape: symbol or None (no write)
    moves: tuple   # per work tape: -1 / 0 / +1
    input_move: int

    def is_noop(self) -> bool:
        return all(w is None for w in self.writes) and all(m == 0 for m in self.moves) and self.input_move == 0


def noop_microop(tau: int) -> MicroOp:
    return MicroOp(writes=(None,) * tau, moves=(0,) * tau, input_move=0)


@dataclass
class Configuration:
    state: str
    input_head: int
    work_heads: list        # length tau
    work_tapes: list        # length tau, each a dict pos -> non-blank symbol

    def copy(self) -> "Configuration":
        return Configuration(self.state, self.input_head, list(self.work_heads),
                             [dict(t) for t in self.work_tapes])

    def tape_cell(self, r: int, pos: int) -> str:
        return self.work_tapes[r].get(pos, BLANK)


@dataclass(frozen=True)
class Machine:
    states: tuple
    start: str
    accept: str
    reject: str
    tau: int
    alphabet: tuple          # contains BLANK
    input_alphabet: tuple    # subset of alphabet
    # (state, input symbol, work symbols tuple) ->
    #   (new state, writes tuple, moves tuple, input move)
    transition: dict = field(compare=False)

    @property
    def digest(self) -> str:
        return hashlib.sha256(machine_to_text(self).encode()).hexdigest()

    def state_index(self, state: str) -> int:
        return self.states.index(state)

    def is_halting(self, state: str) -> bool:
        return state == self.accept or state == self.reject


def _input_symbols(m_input_alphabet) -> tuple:
    syms = tuple(m_input_alphabet)
    if BLANK not in syms:
        syms = syms + (BLANK,)
    return syms


def parse_machine(text: str) -> Machine:
    """Parse the line-based machine file format.

    Raises MachineError with a line number on syntax problems, unknown
    states/symbols, or a non-total transition table.
    """
    header: dict = {}
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise MachineError(f"line {lineno}: expected 'key: value'")
        key, rest = line.split(":", 1)
        key = key.strip()
        rest = rest.strip()
        if key == "delta":
            rules.append((lineno, rest))
        elif key in ("tapes", "states", "start", "accept", "reject", "alphabet", "input_alphabet"):
            if key in header:
                raise MachineError(f"line {lineno}: duplicate '{key}'")
            header[key] = (lineno, rest)
        else:
            raise MachineError(f"line {lineno}: unknown directive '{key}'")

    for req in ("tapes", "states", "start", "accept", "reject", "alphabet", "input_alphabet"):
        if req not in header:
            raise MachineError(f"missing '{req}' directive")

    lineno, rest = header["tapes"]
    try:
        tau = int(rest)
    except ValueError:
        raise MachineError(f"line {lineno}: tapes must be an integer") from None
    if tau < 1:
        raise MachineError(f"line {lineno}: need at least one work tape")

    states = tuple(header["states"][1].split())
    if len(set(states)) != len(states) or not states:
        raise MachineError(f"line {header['states'][0]}: states must be distinct and nonempty")
    alphabet = tuple(header["alphabet"][1].split())
    if BLANK not in alphabet or len(alphabet) < 2:
        raise MachineError(f"line {header['alphabet'][0]}: alphabet needs blank '_' and one more symbol")
    input_alphabet = tuple(header["input_alphabet"][1].split())
    for s in input_alphabet:
        if s not in alphabet:
            raise MachineError(f"line {header['input_alphabet'][0]}: unknown symbol '{s}'")

    def one_state(key):
        lineno, rest = header[key]
        s = rest.strip()
        if s not in states:
            raise MachineError(f"line {lineno}: unknown state '{s}'")
        return s

    start, accept, reject = one_state("start"), one_state("accept"), one_state("reject")

    transition: dict = {}
    for lineno, rest in rules:
        if "->" not in rest:
            raise MachineError(f"line {lineno}: delta rule needs '->'")
        lhs, rhs = rest.split("->", 1)
        lhs_toks = lhs.split()
        rhs_toks = rhs.split()
        if len(lhs_toks) != 2 + tau:
            raise MachineError(f"line {lineno}: expected state, input symbol and {tau} work symbols")
        if len(rhs_toks) != 2 + 2 * tau:
            raise MachineError(f"line {lineno}: expected state, {tau} write/move pairs and input move")
        q, in_sym, work_syms = lhs_toks[0], lhs_toks[1], tuple(lhs_toks[2:])
        if q not in states:
            raise MachineError(f"line {lineno}: unknown state '{q}'")
        if in_sym not in alphabet:
            raise MachineError(f"line {lineno}: unknown symbol '{in_sym}'")
        for w in work_syms:
            if w not in alphabet:
                raise MachineError(f"line {lineno}: unknown symbol '{w}'")
        q2 = rhs_toks[0]
        if q2 not in states:
            raise MachineError(f"line {lineno}: unknown state '{q2}'")
        writes = []
        moves = []
        for r in range(tau):
            w, mv = rhs_toks[1 + 2 * r], rhs_toks[2 + 2 * r]
            if w == "=":
                writes.append(None)
            elif w in alphabet:
                writes.append(w)
            else:
                raise MachineError(f"line {lineno}: unknown write symbol '{w}'")
            if mv not in MOVE_CHARS:
                raise MachineError(f"line {lineno}: move must be L, S or R")
            moves.append(MOVE_CHARS[mv])
        in_move = rhs_toks[1 + 2 * tau]
        if in_move not in MOVE_CHARS:
            raise MachineError(f"line {lineno}: input move must be L, S or R")
        key = (q, in_sym, work_syms)
        if key in transition:
            raise MachineError(f"line {lineno}: duplicate rule for {key}")
        transition[key] = (q2, tuple(writes), tuple(moves), MOVE_CHARS[in_move])

    # Halting states self-loop with no writes and no moves.
    import itertools
    in_syms = _input_symbols(input_alphabet)
    halting = {accept, reject}
    for q in halting:
        for a in in_syms:
            for ws in itertools.product(alphabet, repeat=tau):
                transition.setdefault((q, a, ws), (q, (None,) * tau, (0,) * tau, 0))

    # Totality over non-halting states.
    for q in states:
        if q in halting:
            continue
        for a in in_syms:
            for ws in itertools.product(alphabet, repeat=tau):
                if (q, a, ws) not in transition:
                    raise MachineError(
                        f"non-total transition: no rule for state {q}, input '{a}', work {ws}")

    return Machine(states=states, start=start, accept=accept, reject=reject, tau=tau,
                   alphabet=alphabet, input_alphabet=input_alphabet, transition=transition)


def machine_to_text(m: Machine) -> str:
    """Serialize a Machine back to the file format (canonical rule order)."""
    lines = [
        f"tapes: {m.tau}",
        "states: " + " ".join(m.states),
        f"start: {m.start}",
        f"accept: {m.accept}",
        f"reject: {m.reject}",
        "alphabet: " + " ".join(m.alphabet),
        "input_alphabet: " + " ".join(m.input_alphabet),
    ]
    halting = {m.accept, m.reject}
    for key in sorted(m.transition, key=lambda k: (m.states.index(k[0]), k[1], k[2])):
        q, a, ws = key
        if q in halting:
            continue  # regenerated as self-loops on parse
        q2, writes, moves, in_move = m.transition[key]
        rhs = [q2]
        for w, mv in zip(writes, moves):
            rhs.append("=" if w is None else w)
            rhs.append(MOVE_NAMES[mv])
        rhs.append(MOVE_NAMES[in_move])
        lines.append(f"delta: {q} {a} " + " ".join(ws) + " -> " + " ".join(rhs))
    return "\n".join(lines) + "\n"


def initial_configuration(m: Machine) -> Configuration:
    return Configuration(state=m.start, input_head=0,
                         work_heads=[0] * m.tau,
                         work_tapes=[{} for _ in range(m.tau)])


def input_symbol_at(input_str: str, pos: int) -> str:
    if 0 <= pos < len(input_str):
        return input_str[pos]
    return BLANK


def step(m: Machine, c: Configuration, input_str: str):
    """Apply one transition; returns (successor configuration, micro-op).

    Halting states return an unchanged copy with a no-op micro-op
    (self-loop padding).
    """
    if m.is_halting(c.state):
        return c.copy(), noop_microop(m.tau)
    in_sym = input_symbol_at(input_str, c.input_head)
    work_syms = tuple(c.tape_cell(r, c.work_heads[r]) for r in range(m.tau))
    q2, writes, moves, in_move = m.transition[(c.state, in_sym, work_syms)]
    nxt = c.copy()
    nxt.state = q2
    for r in range(m.tau):
        if writes[r] is not None:
            pos = c.work_heads[r]
            if writes[r] == BLANK:
                nxt.work_tapes[r].pop(pos, None)
            else:
                nxt.work_tapes[r][pos] = writes[r]
        nxt.work_heads[r] += moves[r]
    nxt.input_head += in_move
    return nxt, MicroOp(writes=writes, moves=moves, input_move=in_move)


def run_direct(m: Machine, input_str: str, t: int):
    """Run t steps from the initial configuration (the unaccounted oracle).

    Returns (final configuration, Transcript). Early halts are padded
    with no-op records so the transcript has exactly t records.
    """
    from .transcript import Transcript

    if t < 0:
        raise ValueError("t must be >= 0")
    c = initial_configuration(m)
    records = []
    for _ in range(t):
        c, op = step(m, c, input_str)
        records.append(op)
    return c, Transcript(machine_digest=m.digest, t=t, records=tuple(records))
