import itertools
import random

import numpy as np
import pytest

from sqrtsim.algebra import (CombinerAlgebra, GridEvaluation, ProjectionCodec,
                             TagOverflowError, check_field_axioms, degree_check,
                             evaluate, evaluate_on_grid, gadd, ginv, gmul,
                             interpolate, lagrange_matrix, merge_projection)


# -- field -------------------------------------------------------------------

def test_field_axioms():
    assert check_field_axioms() == []


def test_gmul_identity_and_zero():
    for a in (0, 1, 7, 255):
        assert gmul(a, 1) == a
        assert gmul(a, 0) == 0


def test_ginv_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ginv(0)


def test_addition_is_xor():
    assert gadd(0b1010, 0b0110) == 0b1100


# -- interpolation -----------------------------------------------------------

def test_interpolate_constant():
    axes = ((0, 1, 2), (0, 1, 2))
    vals = np.full((3, 3, 1), 7, dtype=np.uint8)
    coeffs = interpolate(GridEvaluation(axes=axes, values=vals))
    assert coeffs[0, 0, 0] == 7
    assert not coeffs.reshape(-1)[1:].any()
    assert degree_check(coeffs) == 0


def test_interpolate_known_linear():
    # f(x, y) = 3x + 5y + 9 over GF(256)
    axes = ((0, 1), (0, 1))
    vals = np.zeros((2, 2, 1), dtype=np.uint8)
    for i, x in enumerate(axes[0]):
        for j, y in enumerate(axes[1]):
            vals[i, j, 0] = gmul(3, x) ^ gmul(5, y) ^ 9
    coeffs = interpolate(GridEvaluation(axes=axes, values=vals))
    assert coeffs[0, 0, 0] == 9
    assert coeffs[1, 0, 0] == 3
    assert coeffs[0, 1, 0] == 5
    assert coeffs[1, 1, 0] == 0


def test_interpolate_residual_zero_random():
    rng = random.Random(5)
    axes = ((0, 1, 2), (0, 1, 2))  # m=2, D=2
    vals = np.array([[ [rng.randrange(256) for _ in range(2)]
                       for _ in range(3)] for _ in range(3)], dtype=np.uint8)
    grid = GridEvaluation(axes=axes, values=vals)
    coeffs = interpolate(grid)
    back = evaluate_on_grid(coeffs, axes)
    assert np.array_equal(back.values, grid.values)


def test_evaluate_off_grid_consistency():
    # Horner evaluation at a grid point equals the stored value
    rng = random.Random(9)
    axes = ((0, 1, 5), (0, 2, 3))
    vals = np.array([[[rng.randrange(256)] for _ in range(3)] for _ in range(3)],
                    dtype=np.uint8)
    grid = GridEvaluation(axes=axes, values=vals)
    coeffs = interpolate(grid)
    assert evaluate(coeffs, 2, (5, 3))[0] == vals[2, 2, 0]


def test_lagrange_matrix_rejects_duplicates():
    with pytest.raises(ValueError):
        lagrange_matrix((0, 0, 1))


# -- projection codec --------------------------------------------------------

def test_codec_distinct_codes(demo):
    codec = ProjectionCodec(demo.states)
    assert codec.encode("q0") != codec.encode("q1")


def test_codec_roundtrip_all_states(demo):
    codec = ProjectionCodec(demo.states)
    for q in demo.states:
        for flags in (0, 1):
            assert codec.decode(codec.encode(q, flags)) == (q, flags)


def test_codec_fail_flag(demo):
    from sqrtsim.algebra import FAIL_FLAG
    codec = ProjectionCodec(demo.states)
    state, flags = codec.decode(codec.encode("q1", FAIL_FLAG))
    assert state == "q1" and flags & FAIL_FLAG


def test_codec_tag_overflow(demo):
    codec = ProjectionCodec(demo.states)
    with pytest.raises(TagOverflowError):
        codec.encode("q0", 1 << 5)


# -- combiner ----------------------------------------------------------------

def test_combiner_merge_ok(demo):
    alg = CombinerAlgebra(demo.states)
    left = alg.leaf_grid("q0", "q1", True)
    right = alg.leaf_grid("q1", "q1", True)
    merged = alg.combine(left, right)
    assert alg.decode_grid(merged) == ("q0", "q1", True)


def test_combiner_merge_state_mismatch(demo):
    alg = CombinerAlgebra(demo.states)
    left = alg.leaf_grid("q0", "q0", True)
    right = alg.leaf_grid("q1", "q1", True)
    merged = alg.combine(left, right)
    assert merged is not None
    assert alg.decode_grid(merged)[2] is False


def test_combiner_associative_random(small_corpus):
    rng = random.Random(17)
    for m, _ in small_corpus[:4]:
        alg = CombinerAlgebra(m.states)
        for _ in range(25):
            projs = [(rng.choice(m.states), rng.choice(m.states), rng.random() < 0.8)
                     for _ in range(3)]
            g1, g2, g3 = (alg.leaf_grid(*p) for p in projs)
            left = alg.combine(alg.combine(g1, g2), g3)
            right = alg.combine(g1, alg.combine(g2, g3))
            assert np.array_equal(left.values, right.values)
            want = merge_projection(merge_projection(projs[0], projs[1]), projs[2])
            assert alg.decode_grid(left) == want


def test_combiner_degree_bound(demo):
    alg = CombinerAlgebra(demo.states)
    assert degree_check(alg.g_truth_grid()) <= alg.degree_bound


def test_degree_stable_under_composition(demo):
    alg = CombinerAlgebra(demo.states)
    rng = random.Random(3)
    acc = alg.leaf_grid(rng.choice(demo.states), rng.choice(demo.states), True)
    for _ in range(10):
        nxt = alg.leaf_grid(rng.choice(demo.states), rng.choice(demo.states),
                            rng.random() < 0.9)
        acc = alg.combine(acc, nxt)
        assert degree_check(acc) <= alg.degree_bound


def test_tampered_table_detected(demo):
    alg = CombinerAlgebra(demo.states)

    def tampered(lc, rc):
        word = sum(b << i for i, b in enumerate(lc))
        if word == 0:
            return tuple(1 for _ in lc)  # wrong on one input row
        li, ri = alg.decode_pair(lc), alg.decode_pair(rc)
        if None in (li[0], li[1], ri[0], ri[1]):
            return alg.encode_pair(alg.states[0], alg.states[0], False)
        return alg.encode_pair(*merge_projection(li, ri))

    alg._table_hook = tampered
    left = alg.leaf_grid(demo.states[0], demo.states[0], True)
    right = alg.leaf_grid(demo.states[0], demo.states[0], True)
    got = alg.decode_grid(alg.combine(left, right))
    want = merge_projection((demo.states[0], demo.states[0], True),
                            (demo.states[0], demo.states[0], True))
    assert got != want  # agreement check catches the tamper


def test_single_state_projection_domain():
    alg = CombinerAlgebra(("q0",))
    g = alg.leaf_grid("q0", "q0", True)
    assert alg.decode_grid(alg.combine(g, g)) == ("q0", "q0", True)
