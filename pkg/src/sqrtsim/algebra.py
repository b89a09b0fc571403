"""Constant-size field layer: GF(256) arithmetic, finite-state projection
codes, tensor-grid interpolation, and the constant-degree combiner.

Only the constant-size projection of a summary (entry/exit control state
plus a consistency flag) ever enters this layer; everything b-dependent
stays in the replay machinery. All checks are exact equalities in the
field, never tolerances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# GF(2^8) modulo x^8 + x^4 + x^3 + x + 1 (0x11B), generator 3.
_POLY = 0x11B

def _build_tables():
    exp = [0] * 510
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        # multiply by the generator 3 = x + 1
        x = x ^ (x << 1)
        if x & 0x100:
            x ^= _POLY
    for i in range(255, 510):
        exp[i] = exp[i - 255]
    return exp, log


EXP, LOG = _build_tables()

# full 256x256 product table for vectorized arithmetic
_MUL = np.zeros((256, 256), dtype=np.uint8)
for _a in range(1, 256):
    for _b in range(1, 256):
        _MUL[_a, _b] = EXP[LOG[_a] + LOG[_b]]


def gadd(a: int, b: int) -> int:
    return a ^ b


def gmul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def ginv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return EXP[255 - LOG[a]]


def gmul_array(a, b):
    """Element-wise GF(256) product of uint8 arrays (broadcasting)."""
    return _MUL[np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8)]


# ---------------------------------------------------------------------------
# Polynomial interpolation on tensor grids
# ---------------------------------------------------------------------------

def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, c in enumerate(q):
                if c:
                    out[i + j] ^= gmul(a, c)
    return out


def lagrange_matrix(points):
    """Matrix C with coeffs = C @ values for 1-D interpolation on `points`.

    C[d, i] is coefficient d of the Lagrange basis polynomial L_i.
    """
    n = len(points)
    if len(set(points)) != n:
        raise ValueError("interpolation points must be distinct")
    C = np.zeros((n, n), dtype=np.uint8)
    for i, xi in enumerate(points):
        basis = [1]
        denom = 1
        for j, xj in enumerate(points):
            if j == i:
                continue
            basis = _poly_mul(basis, [xj, 1])  # (x + xj) in characteristic 2
            denom = gmul(denom, xi ^ xj)
        inv = ginv(denom)
        for d, c in enumerate(basis):
            C[d, i] = gmul(c, inv)
    return C


def _apply_axis(matrix, values, axis):
    """GF(256) matrix application along one axis of a uint8 tensor."""
    v = np.moveaxis(np.asarray(values, dtype=np.uint8), axis, 0)
    n = matrix.shape[1]
    out = np.zeros((matrix.shape[0],) + v.shape[1:], dtype=np.uint8)
    for d in range(matrix.shape[0]):
        acc = np.zeros(v.shape[1:], dtype=np.uint8)
        for i in range(n):
            if matrix[d, i]:
                acc ^= gmul_array(np.uint8(matrix[d, i]), v[i])
        out[d] = acc
    return np.moveaxis(out, 0, axis)


@dataclass
class GridEvaluation:
    """Values of a vector-valued polynomial on a tensor grid.

    axes: per-variable evaluation points (each of size D+1).
    values: uint8 array of shape (|X_1|, ..., |X_m|, q).
    """
    axes: tuple
    values: np.ndarray

    @property
    def m(self) -> int:
        return len(self.axes)

    @property
    def q(self) -> int:
        return self.values.shape[-1]

    def register_count(self) -> int:
        return int(np.prod(self.values.shape))


def interpolate(grid: GridEvaluation) -> np.ndarray:
    """Unique coefficient tensor with per-variable degree <= D matching
    all grid values; exact in GF(256)."""
    coeffs = np.asarray(grid.values, dtype=np.uint8)
    for axis, points in enumerate(grid.axes):
        coeffs = _apply_axis(lagrange_matrix(points), coeffs, axis)
    return coeffs


def evaluate(coeffs: np.ndarray, axes_count: int, point) -> np.ndarray:
    """Evaluate a coefficient tensor at one point (Horner per axis)."""
    cur = np.asarray(coeffs, dtype=np.uint8)
    for x in point:
        acc = cur[-1]
        for d in range(cur.shape[0] - 2, -1, -1):
            acc = gmul_array(acc, np.uint8(x)) ^ cur[d]
        cur = acc
    return cur


def evaluate_on_grid(coeffs: np.ndarray, axes) -> GridEvaluation:
    shape = tuple(len(a) for a in axes)
    q = coeffs.shape[-1]
    vals = np.zeros(shape + (q,), dtype=np.uint8)
    for idx in itertools.product(*(range(len(a)) for a in axes)):
        vals[idx] = evaluate(coeffs, len(axes), [axes[k][i] for k, i in enumerate(idx)])
    return GridEvaluation(axes=tuple(tuple(a) for a in axes), values=vals)


def degree_check(g) -> int:
    """Maximum per-variable degree of the interpolant (GridEvaluation or
    coefficient tensor)."""
    coeffs = interpolate(g) if isinstance(g, GridEvaluation) else np.asarray(g)
    dmax = 0
    naxes = coeffs.ndim - 1
    for axis in range(naxes):
        moved = np.moveaxis(coeffs, axis, 0)
        for d in range(moved.shape[0] - 1, -1, -1):
            if moved[d].any():
                dmax = max(dmax, d)
                break
    return dmax


# ---------------------------------------------------------------------------
# Finite-state projection codes
# ---------------------------------------------------------------------------

TAG_BITS = 5  # 1 consistency flag + 4 advisory tag bits
FAIL_FLAG = 1


class TagOverflowError(ValueError):
    pass


class ProjectionCodec:
    """Injective byte-packed encoding of (control state, flags) into F^q,
    q = ceil((state bits + tag bits) / 8)."""

    def __init__(self, states):
        self.states = tuple(states)
        self.state_bits = max(1, (len(self.states) - 1).bit_length())
        self.q = -(-(self.state_bits + TAG_BITS) // 8)

    def encode(self, state, flags: int = 0):
        if flags >> TAG_BITS:
            raise TagOverflowError(f"flags {flags:#x} exceed the {TAG_BITS}-bit budget")
        word = self.states.index(state) | (flags << self.state_bits)
        return tuple((word >> (8 * i)) & 0xFF for i in range(self.q))

    def decode(self, code):
        word = 0
        for i, byte in enumerate(code):
            word |= int(byte) << (8 * i)
        state_idx = word & ((1 << self.state_bits) - 1)
        flags = word >> self.state_bits
        return self.states[state_idx], flags


def encode_projection(codec: ProjectionCodec, state, flags: int = 0):
    return codec.encode(state, flags)


# ---------------------------------------------------------------------------
# Combiner algebra on projection pairs
# ---------------------------------------------------------------------------

def merge_projection(left, right):
    """Direct finite-domain merge of (q_in, q_out, ok) projections; the
    semantic reference the algebraic layer must agree with."""
    qi1, qo1, ok1 = left
    qi2, qo2, ok2 = right
    return (qi1, qo2, ok1 and ok2 and qo1 == qi2)


class CombinerAlgebra:
    """Grid-evaluated combiner for one machine family.

    Projections (q_in, q_out, ok) are coded as bit vectors over GF(256)
    (one field element per bit), so the interpolated merge map G is
    multilinear: per-variable degree 1, hence D = 1 and a 2x2 evaluation
    grid in the m = 2 navigation variables.
    """

    M = 2

    def __init__(self, states):
        self.states = tuple(states)
        self.state_bits = max(1, (len(self.states) - 1).bit_length())
        self.p = 2 * self.state_bits + 1  # q_in bits, q_out bits, ok bit
        self.degree_bound = 1
        self.axes = tuple((0, 1) for _ in range(self.M))
        self._table_hook = None  # test hook: override the merge table

    # -- bit codes --

    def encode_pair(self, q_in, q_out, ok: bool):
        word = (self.states.index(q_in)
                | (self.states.index(q_out) << self.state_bits)
                | ((0 if ok else 1) << (2 * self.state_bits)))
        return tuple((word >> i) & 1 for i in range(self.p))

    def decode_pair(self, code):
        word = 0
        for i, bit in enumerate(code):
            if int(bit) not in (0, 1):
                raise ValueError("code is not bit-valued; nothing to decode")
            word |= int(bit) << i
        mask = (1 << self.state_bits) - 1
        qi = self.states[word & mask] if (word & mask) < len(self.states) else None
        qo_idx = (word >> self.state_bits) & mask
        qo = self.states[qo_idx] if qo_idx < len(self.states) else None
        ok = not (word >> (2 * self.state_bits)) & 1
        return qi, qo, ok

    # -- the merge map G on codes --

    def _table(self, left_code, right_code):
        if self._table_hook is not None:
            return self._table_hook(left_code, right_code)
        li = self.decode_pair(left_code)
        ri = self.decode_pair(right_code)
        if li[0] is None or li[1] is None or ri[0] is None or ri[1] is None:
            # grid point outside the valid projection domain: map to FAIL
            anchor = self.states[0]
            return self.encode_pair(anchor, anchor, False)
        return self.encode_pair(*merge_projection(li, ri))

    def g_map(self, y_left, y_right, x=None):
        """Evaluate G(y_left, y_right, x). Bit-valued inputs use the merge
        table directly; arbitrary field inputs use the multilinear
        extension (exact, by interpolation over {0,1}^(2p))."""
        yl = tuple(int(v) for v in y_left)
        yr = tuple(int(v) for v in y_right)
        if all(v in (0, 1) for v in yl + yr):
            return self._table(yl, yr)
        out = [0] * self.p
        for bits in itertools.product((0, 1), repeat=2 * self.p):
            val = self._table(bits[:self.p], bits[self.p:])
            if not any(val):
                continue
            coeff = 1
            for bit, y in zip(bits, yl + yr):
                factor = y if bit else (1 ^ y)  # chi_1(y)=y, chi_0(y)=1+y
                coeff = gmul(coeff, factor)
                if coeff == 0:
                    break
            if coeff:
                for j in range(self.p):
                    out[j] ^= gmul(coeff, val[j])
        return tuple(out)

    # -- grid layer --

    def leaf_grid(self, q_in, q_out, ok: bool = True) -> GridEvaluation:
        code = self.encode_pair(q_in, q_out, ok)
        shape = tuple(len(a) for a in self.axes)
        vals = np.zeros(shape + (self.p,), dtype=np.uint8)
        vals[...] = np.array(code, dtype=np.uint8)
        return GridEvaluation(axes=self.axes, values=vals)

    def combine(self, left: GridEvaluation, right: GridEvaluation) -> GridEvaluation:
        """Pointwise grid composition with identity navigation maps."""
        if left.axes != right.axes:
            raise ValueError("children must be evaluated on the same grid")
        vals = np.zeros_like(left.values)
        for idx in itertools.product(*(range(len(a)) for a in left.axes)):
            x = tuple(self.axes[k][i] for k, i in enumerate(idx))
            vals[idx] = self.g_map(left.values[idx], right.values[idx], x)
        return GridEvaluation(axes=left.axes, values=vals)

    def decode_grid(self, grid: GridEvaluation):
        origin = (0,) * len(grid.axes)
        return self.decode_pair(tuple(int(v) for v in grid.values[origin]))

    def g_truth_grid(self) -> GridEvaluation:
        """G's full truth table over {0,1}^(2p) as a grid evaluation
        (oracle for the degree bound D)."""
        axes = tuple((0, 1) for _ in range(2 * self.p))
        shape = tuple(2 for _ in range(2 * self.p))
        vals = np.zeros(shape + (self.p,), dtype=np.uint8)
        for bits in itertools.product((0, 1), repeat=2 * self.p):
            vals[bits] = np.array(self._table(bits[:self.p], bits[self.p:]),
                                  dtype=np.uint8)
        return GridEvaluation(axes=axes, values=vals)


# ---------------------------------------------------------------------------
# Field self-checks
# ---------------------------------------------------------------------------

def check_field_axioms(sample_triples=512, seed=0):
    """Exhaustive inverse check plus sampled associativity/distributivity.
    Returns a list of failure strings (empty = pass)."""
    import random
    failures = []
    for a in range(1, 256):
        if gmul(a, ginv(a)) != 1:
            failures.append(f"inverse fails for {a}")
    rng = random.Random(seed)
    for _ in range(sample_triples):
        a, b, c = rng.randrange(256), rng.randrange(256), rng.randrange(256)
        if gmul(gmul(a, b), c) != gmul(a, gmul(b, c)):
            failures.append(f"associativity fails for {(a, b, c)}")
        if gmul(a, b ^ c) != gmul(a, b) ^ gmul(a, c):
            failures.append(f"distributivity fails for {(a, b, c)}")
    return failures
