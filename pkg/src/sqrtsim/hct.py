"""Midpoint recursion, pointerless DFS tokens, and the telescoping
potential that bounds live interfaces.

The traversal never stores interval endpoints per level: the stack holds
two-bit tokens and the current endpoints are recomputed from the root on
demand using one shared scratch pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class NodeType(Enum):
    SPLIT = "SPLIT"
    COMBINER = "COMBINER"


class Dir(Enum):
    L = "L"
    R = "R"


@dataclass(frozen=True)
class PathToken:
    node_type: NodeType
    dir: Dir


def midpoint(i: int, j: int) -> int:
    if i > j:
        raise ValueError(f"empty interval [{i},{j}]")
    return (i + j) // 2


def compute_endpoints(tokens, T: int):
    """Replay the midpoint rule from the root [1, T] along the token path.

    Both SPLIT and COMBINER tokens select midpoint children; only the
    shared (l, r) scratch pair is used.
    """
    lo, hi = 1, T
    for tok in tokens:
        if lo == hi:
            raise ValueError("descent below a unit interval")
        c = midpoint(lo, hi)
        if tok.dir is Dir.L:
            hi = c
        else:
            lo = c + 1
    return lo, hi


@dataclass
class TraversalState:
    T: int
    tokens: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.tokens)

    def endpoints(self):
        return compute_endpoints(self.tokens, self.T)

    def at_leaf(self) -> bool:
        lo, hi = self.endpoints()
        return lo == hi


def dfs_advance(st: TraversalState, event: str) -> TraversalState:
    """Apply one DFS event ('descend-left' | 'descend-right' | 'ascend'),
    pushing or popping exactly one token."""
    if event == "ascend":
        if not st.tokens:
            raise ValueError("ascend at root")
        st.tokens.pop()
    elif event in ("descend-left", "descend-right"):
        if st.at_leaf():
            raise ValueError("descend at leaf")
        d = Dir.L if event == "descend-left" else Dir.R
        st.tokens.append(PathToken(NodeType.SPLIT, d))
    else:
        raise ValueError(f"unknown event {event!r}")
    return st


def weight(lam: int) -> int:
    """w(lambda) = ceil(log2(1 + lambda))."""
    if lam < 1:
        raise ValueError("weight is defined for lambda >= 1")
    return lam.bit_length()  # ceil(log2(n)) for n = 1+lam equals bit_length(lam)


def path_potential(lengths) -> int:
    """Telescoping potential over a root-leaf path of interval lengths."""
    total = 0
    for lam in lengths[:-1]:
        total += weight(lam) - weight(-(-lam // 2))
    return total


def dfs_events(T: int):
    """Full in-order DFS over the midpoint tree on [1, T].

    Yields (event, state) after each transition, where event is
    'descend-left' | 'descend-right' | 'ascend' | 'leaf'. The 'leaf'
    event reports arrival at a unit interval without changing the stack.
    """
    st = TraversalState(T=T)
    if T < 1:
        raise ValueError("T must be >= 1")

    def walk():
        if st.at_leaf():
            yield ("leaf", st)
            return
        dfs_advance(st, "descend-left")
        yield ("descend-left", st)
        yield from walk()
        dfs_advance(st, "ascend")
        yield ("ascend", st)
        dfs_advance(st, "descend-right")
        yield ("descend-right", st)
        yield from walk()
        dfs_advance(st, "ascend")
        yield ("ascend", st)

    yield from walk()


def dfs_trace_rows(T: int):
    """Debug trace rows `depth,ell,r,token_type,dir,potential` per DFS event."""
    path_lengths = [T]
    for event, st in dfs_events(T):
        lo, hi = st.endpoints()
        if event.startswith("descend"):
            path_lengths.append(hi - lo + 1)
        elif event == "ascend":
            path_lengths.pop()
        tok = st.tokens[-1] if st.tokens else None
        yield (st.depth, lo, hi,
               tok.node_type.value if tok else "",
               tok.dir.value if tok else "",
               path_potential(path_lengths))


def reference_dfs_endpoints(T: int):
    """Recursive reference traversal: endpoints after each DFS transition,
    in the same order as dfs_events. Oracle for endpoint recomputation."""
    out = []

    def rec(lo, hi):
        if lo == hi:
            out.append(("leaf", lo, hi))
            return
        c = midpoint(lo, hi)
        out.append(("descend-left", lo, c))
        rec(lo, c)
        out.append(("ascend", lo, hi))
        out.append(("descend-right", c + 1, hi))
        rec(c + 1, hi)
        out.append(("ascend", lo, hi))

    rec(1, T)
    return out
