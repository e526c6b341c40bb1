from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dsrgkron import matcore as mc
from dsrgkron.errors import CapacityError, DimensionError, DivisibilityError, LayoutError
from dsrgkron.matcore import BinaryMatrix, BlockLayout, IntMatrix

from oracles import naive_product, p_entry_matrix


def bm(rows):
    return BinaryMatrix.from_rows(rows)


def binary_arrays(max_side=8):
    shape = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shape.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


# --- construction primitives -------------------------------------------------


def test_identity_examples():
    assert mc.identity(1) == bm(["1"])
    assert mc.identity(2) == bm(["10", "01"])
    x = BinaryMatrix.from_array(np.random.default_rng(0).integers(0, 2, (3, 5)))
    assert mc.mul(mc.identity(3), x) == IntMatrix.of(x)


def test_ones_examples():
    assert mc.ones(1, 1) == bm(["1"])
    assert mc.ones(2, 3) == bm(["111", "111"])
    assert mc.ones(3) == mc.ones(3, 3)
    for m, l in [(1, 1), (3, 7), (5, 64), (2, 65), (4, 130)]:
        assert (mc.ones(m, l).row_sums() == l).all()


def test_exchange_examples():
    assert mc.exchange(1) == bm(["1"])
    assert mc.exchange(2) == bm(["01", "10"])
    assert mc.exchange(3) == bm(["001", "010", "100"])


@pytest.mark.parametrize("ctor", [mc.identity, mc.exchange, lambda m: mc.ones(m, 1)])
def test_zero_dimension_rejected(ctor):
    with pytest.raises(DimensionError):
        ctor(0)
    with pytest.raises(DimensionError):
        mc.ones(2, 0)


def test_padding_must_be_zero():
    words = np.array([[np.uint64(1)]], dtype=np.uint64)
    with pytest.raises(ValueError):
        BinaryMatrix(1, 3, words)


def test_msb_first_packing():
    m = bm(["1" + "0" * 63 + "1"])
    assert m.words.shape == (1, 2)
    assert int(m.words[0, 0]) == 1 << 63
    assert int(m.words[0, 1]) == 1 << 63


@given(binary_arrays(70))
@settings(max_examples=40, deadline=None)
def test_array_round_trip_and_accessors(arr):
    m = BinaryMatrix.from_array(arr)
    assert np.array_equal(m.to_array(), arr)
    assert np.array_equal(m.row_sums(), arr.sum(axis=1))
    assert np.array_equal(m.col_sums(), arr.sum(axis=0))
    assert m.transpose() == BinaryMatrix.from_array(arr.T)
    i, j = arr.shape[0] - 1, arr.shape[1] - 1
    assert m[i, j] == arr[i, j]
    assert m.with_flipped(i, j)[i, j] == 1 - arr[i, j]


# --- kron --------------------------------------------------------------------


def test_kron_examples():
    assert mc.kron(mc.ones(2, 1), mc.exchange(2)) == bm(["01", "10", "01", "10"])
    x = bm(["0110", "1011"])
    assert mc.kron(mc.identity(1), x) == x
    p1 = mc.kron(mc.kron(mc.ones(2, 1), mc.exchange(2)), mc.ones(1, 2))
    assert np.array_equal(p1.to_array(), p_entry_matrix(1, 1))


@given(binary_arrays(6), binary_arrays(6))
@settings(max_examples=40, deadline=None)
def test_kron_entry_rule(a, b):
    k = mc.kron(BinaryMatrix.from_array(a), BinaryMatrix.from_array(b)).to_array()
    rb, cb = b.shape
    for i1 in range(a.shape[0]):
        for j1 in range(a.shape[1]):
            block = k[i1 * rb : (i1 + 1) * rb, j1 * cb : (j1 + 1) * cb]
            assert np.array_equal(block, a[i1, j1] * b)


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_mixed_product_law(data):
    n1, m1, p1 = (data.draw(st.integers(1, 4)) for _ in range(3))
    n2, m2, p2 = (data.draw(st.integers(1, 4)) for _ in range(3))
    draw = lambda r, c: BinaryMatrix.from_array(data.draw(arrays(np.uint8, (r, c), elements=st.integers(0, 1))))  # noqa: E731
    A, C = draw(n1, m1), draw(m1, p1)
    B, D = draw(n2, m2), draw(m2, p2)
    lhs = mc.mul(mc.kron(A, B), mc.kron(C, D)).entries
    rhs = np.kron(mc.mul(A, C).entries, mc.mul(B, D).entries)
    assert np.array_equal(lhs, rhs)


def test_kron_capacity():
    old = mc.set_capacity_limit(100)
    try:
        with pytest.raises(CapacityError):
            mc.kron(mc.ones(4, 4), mc.ones(4, 4))
    finally:
        mc.set_capacity_limit(old)


# --- alpha -------------------------------------------------------------------


def test_alpha_examples():
    assert mc.alpha(mc.ones(4, 3), 2) == mc.ones(2, 3)
    x = bm(["011", "100", "111"])
    assert mc.alpha(x, 1) == x
    p1 = BinaryMatrix.from_array(p_entry_matrix(1, 1))
    assert mc.alpha(p1, 2) == bm(["0011", "1100"])


def test_alpha_block_index_and_errors():
    x = bm(["00", "01", "10", "11"])
    assert mc.alpha(x, 2, block=1) == bm(["10", "11"])
    with pytest.raises(DivisibilityError):
        mc.alpha(x, 3)
    with pytest.raises(IndexError):
        mc.alpha(x, 2, block=2)


@given(binary_arrays(64).filter(lambda a: a.shape[0] <= 64), st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_alpha_inverts_vertical_repetition(arr, s):
    x = BinaryMatrix.from_array(arr)
    assert mc.alpha(mc.kron(mc.ones(s, 1), x), s) == x


# --- mul ---------------------------------------------------------------------


def test_mul_examples():
    assert mc.mul(mc.exchange(2), mc.exchange(2)) == IntMatrix.of(mc.identity(2))
    p1 = BinaryMatrix.from_array(p_entry_matrix(1, 1))
    assert mc.mul(p1, p1).is_constant(1)
    with pytest.raises(DimensionError):
        mc.mul(mc.ones(2, 3), mc.ones(2, 3))


def test_exchange_involution_up_to_64():
    for m in range(1, 65):
        k = mc.exchange(m)
        assert mc.mul(k, k) == IntMatrix.of(mc.identity(m))


def test_mul_matches_naive_on_corpus():
    rng = np.random.default_rng(7)
    shapes = [(1, 1, 1), (3, 5, 2), (8, 8, 8), (17, 64, 9), (64, 64, 64), (33, 65, 31), (20, 50, 64)]
    for n, m, p in shapes:
        for density in (0.1, 0.5, 0.9):
            a = (rng.random((n, m)) < density).astype(np.uint8)
            b = (rng.random((m, p)) < density).astype(np.uint8)
            got = mc.mul(BinaryMatrix.from_array(a), BinaryMatrix.from_array(b)).entries
            assert np.array_equal(got, naive_product(a, b))


def test_mul_threads_bit_identical():
    rng = np.random.default_rng(3)
    a = BinaryMatrix.from_array(rng.integers(0, 2, (300, 200)))
    b = BinaryMatrix.from_array(rng.integers(0, 2, (200, 150)))
    old = mc._CHUNK_BYTES
    mc._CHUNK_BYTES = 4096  # force several chunks
    try:
        assert mc.mul(a, b, threads=1) == mc.mul(a, b, threads=4)
    finally:
        mc._CHUNK_BYTES = old


def test_mul_integer_inputs():
    x = IntMatrix(np.array([[2, 0], [1, 3]]))
    y = mc.identity(2)
    assert mc.mul(x, y) == x
    assert mc.mul(x, x) == IntMatrix(np.array([[4, 0], [5, 9]]))
    assert (mc.mul(y, y) + x.scale(2)) == IntMatrix(np.array([[5, 0], [2, 7]]))


# --- assemble ----------------------------------------------------------------


def test_assemble_examples():
    one = mc.identity(1)
    assert mc.assemble(BlockLayout(((one, None), (None, one)))) == mc.identity(2)
    a = bm(["011", "101", "110"])
    assert mc.assemble(BlockLayout(((a, None), (None, a)))) == mc.kron(mc.identity(2), a)


def test_assemble_reads_back_cells():
    rng = np.random.default_rng(11)
    cells = [[BinaryMatrix.from_array(rng.integers(0, 2, (r, c))) for c in (3, 70, 5)] for r in (2, 9)]
    out = mc.assemble(BlockLayout(tuple(map(tuple, cells)))).to_array()
    r0 = 0
    for line, h in zip(cells, (2, 9)):
        c0 = 0
        for cell in line:
            assert np.array_equal(out[r0 : r0 + h, c0 : c0 + cell.cols], cell.to_array())
            c0 += cell.cols
        r0 += h


def test_layout_errors():
    with pytest.raises(LayoutError):
        BlockLayout(((mc.ones(2, 2), mc.ones(3, 2)),))
    with pytest.raises(LayoutError):
        BlockLayout(((None, None), (mc.ones(1, 1), mc.ones(1, 1))))
    with pytest.raises(LayoutError):
        BlockLayout(((mc.ones(1, 1),), (mc.ones(1, 1), mc.ones(1, 1))))
    lay = BlockLayout(((None, None), (mc.ones(1, 1), None)), row_spans=(2, 1), col_spans=(1, 3))
    assert mc.assemble(lay).shape == (3, 4)


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_two_by_two_kron_form_matches_four_by_four_grid(n, m, seed):
    rng = np.random.default_rng(seed)
    A = BinaryMatrix.from_array(rng.integers(0, 2, (n, n)))
    B = BinaryMatrix.from_array(rng.integers(0, 2, (n, m)))
    C = BinaryMatrix.from_array(rng.integers(0, 2, (m, n)))
    P = BinaryMatrix.from_array(rng.integers(0, 2, (m, m)))
    I2, K2 = mc.identity(2), mc.exchange(2)
    kron_form = mc.assemble(
        BlockLayout(((mc.kron(I2, A), mc.kron(I2, B)), (mc.kron(K2, C), mc.kron(K2, P))))
    )
    grid = mc.assemble(BlockLayout(((A, None, B, None), (None, A, None, B), (None, C, None, P), (C, None, P, None))))
    assert kron_form == grid


# --- column access -----------------------------------------------------------


def test_transpose_column_slice():
    assert list(mc.transpose_column_slice(mc.identity(3), 0)) == [1, 0, 0]
    assert list(mc.transpose_column_slice(mc.exchange(2), 1)) == [1, 0]
    assert mc.transpose_column_slice(mc.ones(5, 70), 69).tolist() == [1] * 5
    with pytest.raises(IndexError):
        mc.transpose_column_slice(mc.ones(2, 2), 2)
