import math

import pytest
from hypothesis import given, settings, strategies as st

from sqrtsim.hct import (Dir, NodeType, PathToken, TraversalState,
                         compute_endpoints, dfs_advance, dfs_events,
                         dfs_trace_rows, midpoint, path_potential,
                         reference_dfs_endpoints, weight)


def test_midpoint_values():
    assert midpoint(1, 8) == 4
    assert midpoint(1, 3) == 2
    assert midpoint(5, 5) == 5


def test_midpoint_empty_interval():
    with pytest.raises(ValueError):
        midpoint(6, 5)


def test_compute_endpoints_root():
    assert compute_endpoints([], 8) == (1, 8)


def test_compute_endpoints_one_left():
    assert compute_endpoints([PathToken(NodeType.SPLIT, Dir.L)], 8) == (1, 4)


def test_compute_endpoints_t7_right_left():
    toks = [PathToken(NodeType.SPLIT, Dir.R), PathToken(NodeType.SPLIT, Dir.L)]
    assert compute_endpoints(toks, 7) == (5, 6)


def test_compute_endpoints_below_unit():
    toks = [PathToken(NodeType.SPLIT, Dir.L)] * 4
    with pytest.raises(ValueError):
        compute_endpoints(toks, 8)


def test_dfs_advance_t4():
    st_ = TraversalState(T=4)
    dfs_advance(st_, "descend-left")
    assert st_.tokens == [PathToken(NodeType.SPLIT, Dir.L)]
    assert st_.endpoints() == (1, 2)


def test_dfs_leaf_order_t4():
    leaves = [st_.endpoints()[0] for ev, st_ in dfs_events(4) if ev == "leaf"]
    assert leaves == [1, 2, 3, 4]


def test_dfs_peak_depth_t7():
    peak = max(st_.depth for _, st_ in dfs_events(7))
    assert peak == 3 == math.ceil(math.log2(7))


def test_weight_values():
    assert weight(1) == 1
    assert weight(7) == 3
    assert weight(8) == 4


def test_weight_rejects_zero():
    with pytest.raises(ValueError):
        weight(0)


def test_path_potential_exact_halving():
    assert path_potential([8, 4, 2, 1]) == weight(8) - weight(1) == 3


def test_path_potential_leaf_only():
    assert path_potential([1]) == 0


@given(T=st.integers(1, 200))
@settings(max_examples=60, deadline=None)
def test_potential_bound(T):
    bound = math.ceil(math.log2(1 + T))
    lengths = [T]
    for _, st_ in dfs_events(T):
        lo, hi = st_.endpoints()
        lengths = [T]
        cur_lo, cur_hi = 1, T
        for tok in st_.tokens:
            c = midpoint(cur_lo, cur_hi)
            if tok.dir is Dir.L:
                cur_hi = c
            else:
                cur_lo = c + 1
            lengths.append(cur_hi - cur_lo + 1)
        assert path_potential(lengths) <= bound


def test_endpoints_match_reference_small():
    for T in range(1, 64):
        ref = reference_dfs_endpoints(T)
        got = [(ev, *st_.endpoints()) for ev, st_ in dfs_events(T)]
        assert got == ref, T


def test_trace_rows_shape():
    rows = list(dfs_trace_rows(7))
    assert all(len(r) == 6 for r in rows)
    # depth column always matches the token stack depth implied by the events
    assert rows[0][0] == 1


def test_depth_bound_exhaustive_small():
    for T in range(1, 130):
        peak = max(st_.depth for _, st_ in dfs_events(T))
        assert peak <= math.ceil(math.log2(T)) + 1 if T > 1 else peak == 0
