"""
Exact dense 0/1 matrix kernel.

Rows are bit-packed into 64-bit words, most significant bit first, so that
column ``j`` of a row lives in word ``j // 64`` at bit ``63 - j % 64``.
Padding bits past the last column are always zero, which lets equality,
row sums and products work directly on the words.

Integer products of binary matrices are computed as
``popcount(row_i(a) & col_j(b))``; nothing here ever touches floating point.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CapacityError, DimensionError, DivisibilityError, LayoutError

WORD_BITS = 64
THREADS_ENV = "DSRGKRON_THREADS"

_capacity_bits = 2**31
# Bytes of temporaries allowed per chunk in kron/assemble/mul.
_CHUNK_BYTES = 32 * 2**20


def get_capacity_limit() -> int:
    """Maximum number of entries (rows * cols) a constructed matrix may have."""
    return _capacity_bits


def set_capacity_limit(bits: int) -> int:
    """Set the matrix capacity limit and return the previous value."""
    global _capacity_bits
    if bits < 1:
        raise ValueError("capacity limit must be positive")
    old, _capacity_bits = _capacity_bits, int(bits)
    return old


def check_capacity(rows: int, cols: int, what: str = "matrix") -> None:
    if rows * cols > _capacity_bits:
        raise CapacityError(
            f"{what} of size {rows}x{cols} exceeds capacity limit of {_capacity_bits} entries"
        )


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _words_per_row(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def _pack(arr: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into MSB-first uint64 words, one row per line."""
    rows, cols = arr.shape
    nwords = _words_per_row(cols)
    packed = np.packbits(arr.astype(np.uint8, copy=False), axis=1, bitorder="big")
    padded = np.zeros((rows, nwords * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view(">u8").astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    raw = words.astype(">u8").view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, count=cols, bitorder="big")


def _pad_mask(cols: int) -> np.ndarray:
    """Mask of valid bits for each word of a row of width ``cols``."""
    nwords = _words_per_row(cols)
    mask = np.full(nwords, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
    rem = cols % WORD_BITS
    if rem:
        mask[-1] = np.uint64(((1 << rem) - 1) << (WORD_BITS - rem))
    return mask


class BinaryMatrix:
    """Immutable dense 0/1 matrix with bit-packed rows.

    Build one with :meth:`from_array`, :meth:`from_rows` or the constructors
    in this module (:func:`identity`, :func:`ones`, :func:`exchange`, ...).
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows < 1 or cols < 1:
            raise DimensionError(f"matrix dimensions must be positive, got {rows}x{cols}")
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (rows, _words_per_row(cols)):
            raise DimensionError(
                f"word array shape {words.shape} does not fit a {rows}x{cols} matrix"
            )
        if np.any(words & ~_pad_mask(cols)):
            raise ValueError("padding bits must be zero")
        if words.flags.writeable:
            words = words.copy()
            words.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_array(cls, arr) -> "BinaryMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got {a.ndim}-D")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"matrix dimensions must be positive, got {a.shape}")
        if a.dtype != np.bool_ and np.any((a != 0) & (a != 1)):
            raise ValueError("binary matrix entries must be 0 or 1")
        words = _pack(a != 0)
        words.setflags(write=False)
        return cls(a.shape[0], a.shape[1], words)

    @classmethod
    def from_rows(cls, rows: Iterable[Union[str, Sequence[int]]]) -> "BinaryMatrix":
        """Build from row strings like ``"0110"`` or from nested sequences."""
        data = [[int(c) for c in r] if isinstance(r, str) else list(r) for r in rows]
        return cls.from_array(np.array(data, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_array(self) -> np.ndarray:
        """Dense ``uint8`` copy of the matrix."""
        return _unpack(self.words, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) out of range for {self.rows}x{self.cols}")
        w = int(self.words[i, j // WORD_BITS])
        return (w >> (WORD_BITS - 1 - j % WORD_BITS)) & 1

    def row(self, i: int) -> np.ndarray:
        return _unpack(self.words[i : i + 1], self.cols)[0]

    def row_sums(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def col_sums(self) -> np.ndarray:
        total = np.zeros(self.cols, dtype=np.int64)
        for r0, r1 in _row_chunks(self.rows, self.cols):
            total += _unpack(self.words[r0:r1], self.cols).sum(axis=0, dtype=np.int64)
        return total

    def count(self) -> int:
        return int(np.bitwise_count(self.words).sum(dtype=np.int64))

    def diagonal(self) -> np.ndarray:
        n = min(self.rows, self.cols)
        idx = np.arange(n)
        w = self.words[idx, idx // WORD_BITS]
        return ((w >> (WORD_BITS - 1 - idx % WORD_BITS).astype(np.uint64)) & np.uint64(1)).astype(
            np.uint8
        )

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_array(self.to_array().T)

    @property
    def T(self) -> "BinaryMatrix":
        return self.transpose()

    def with_flipped(self, i: int, j: int) -> "BinaryMatrix":
        """Copy with entry (i, j) toggled; handy for mutation tests."""
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) out of range")
        words = self.words.copy()
        words[i, j // WORD_BITS] ^= np.uint64(1 << (WORD_BITS - 1 - j % WORD_BITS))
        words.setflags(write=False)
        return BinaryMatrix(self.rows, self.cols, words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 256:
            body = ",".join("".join(map(str, r)) for r in self.to_array())
            return f"BinaryMatrix({self.rows}x{self.cols}: {body})"
        return f"BinaryMatrix({self.rows}x{self.cols}, ones={self.count()})"


@dataclass(frozen=True, eq=False)
class IntMatrix:
    """Exact nonnegative integer matrix (int64 storage, overflow-checked)."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.ndim != 2 or e.shape[0] < 1 or e.shape[1] < 1:
            raise DimensionError(f"integer matrix must be 2-D and non-empty, got shape {e.shape}")
        if e.dtype.kind not in "iub":
            raise TypeError("integer matrix entries must have an integer dtype")
        e = e.astype(np.int64)
        if np.any(e < 0):
            raise ValueError("integer matrix entries must be nonnegative")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def of(cls, m: Union["IntMatrix", BinaryMatrix]) -> "IntMatrix":
        if isinstance(m, IntMatrix):
            return m
        return cls(m.to_array().astype(np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __getitem__(self, ij) -> int:
        return int(self.entries[ij])

    def __add__(self, other) -> "IntMatrix":
        other = IntMatrix.of(other)
        if other.shape != self.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.entries + other.entries)

    __radd__ = __add__

    def scale(self, c: int) -> "IntMatrix":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return IntMatrix(self.entries * int(c))

    def __mul__(self, c: int) -> "IntMatrix":
        if not isinstance(c, (int, np.integer)):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def is_constant(self, value: int) -> bool:
        return bool(np.all(self.entries == value))

    def __eq__(self, other) -> bool:
        if isinstance(other, BinaryMatrix):
            other = IntMatrix.of(other)
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    __hash__ = None


def _row_chunks(rows: int, width_bytes: int):
    step = max(1, _CHUNK_BYTES // max(1, width_bytes))
    for r0 in range(0, rows, step):
        yield r0, min(rows, r0 + step)


def identity(m: int) -> BinaryMatrix:
    if m < 1:
        raise DimensionError("identity order must be positive")
    return BinaryMatrix.from_array(np.eye(m, dtype=np.uint8))


def ones(m: int, l: int | None = None) -> BinaryMatrix:
    """All-ones matrix of size m x l (square when ``l`` is omitted)."""
    l = m if l is None else l
    if m < 1 or l < 1:
        raise DimensionError(f"all-ones matrix needs positive dimensions, got {m}x{l}")
    check_capacity(m, l)
    words = np.tile(_pad_mask(l), (m, 1))
    words.setflags(write=False)
    return BinaryMatrix(m, l, words)


def zeros(m: int, l: int | None = None) -> BinaryMatrix:
    l = m if l is None else l
    if m < 1 or l < 1:
        raise DimensionError(f"zero matrix needs positive dimensions, got {m}x{l}")
    check_capacity(m, l)
    words = np.zeros((m, _words_per_row(l)), dtype=np.uint64)
    words.setflags(write=False)
    return BinaryMatrix(m, l, words)


def exchange(m: int) -> BinaryMatrix:
    """Exchange matrix: ones on the antidiagonal."""
    if m < 1:
        raise DimensionError("exchange matrix order must be positive")
    return BinaryMatrix.from_array(np.eye(m, dtype=np.uint8)[::-1])


def kron(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Kronecker product, built in row chunks to bound temporary memory."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    check_capacity(rows, cols, "Kronecker product")
    bd = b.to_array()
    out = np.empty((rows, _words_per_row(cols)), dtype=np.uint64)
    step = max(1, _CHUNK_BYTES // max(1, b.rows * cols))
    for r0 in range(0, a.rows, step):
        r1 = min(a.rows, r0 + step)
        dense = np.kron(_unpack(a.words[r0:r1], a.cols), bd)
        out[r0 * b.rows : r1 * b.rows] = _pack(dense)
    out.setflags(write=False)
    return BinaryMatrix(rows, cols, out)


def kron_chain(*factors: BinaryMatrix) -> BinaryMatrix:
    if not factors:
        raise ValueError("kron_chain needs at least one factor")
    result = factors[0]
    for f in factors[1:]:
        result = kron(result, f)
    return result


def alpha(x: BinaryMatrix, s: int, block: int = 0) -> BinaryMatrix:
    """Keep one of the ``s`` equal horizontal row blocks of ``x`` (the first by default)."""
    if s < 1:
        raise ValueError("alpha divisor must be positive")
    if x.rows % s:
        raise DivisibilityError(f"{x.rows} rows are not divisible by {s}")
    if not 0 <= block < s:
        raise IndexError(f"block index {block} out of range for {s} blocks")
    m = x.rows // s
    return BinaryMatrix(m, x.cols, x.words[block * m : (block + 1) * m])


def transpose_column_slice(a: BinaryMatrix, j: int) -> np.ndarray:
    """Column ``j`` of ``a`` as a 0/1 vector of length ``a.rows``."""
    if not 0 <= j < a.cols:
        raise IndexError(f"column {j} out of range for {a.cols} columns")
    w = a.words[:, j // WORD_BITS]
    return ((w >> np.uint64(WORD_BITS - 1 - j % WORD_BITS)) & np.uint64(1)).astype(np.uint8)


def _popcount_product(a: BinaryMatrix, b: BinaryMatrix, threads: int) -> np.ndarray:
    # Kronecker-built operands repeat rows/columns heavily; multiply distinct ones only.
    aw, a_inv = np.unique(a.words, axis=0, return_inverse=True)
    bt, b_inv = np.unique(b.transpose().words, axis=0, return_inverse=True)
    a_inv, b_inv = a_inv.reshape(-1), b_inv.reshape(-1)
    per_row = bt.shape[0] * bt.shape[1] * 8
    chunks = list(_row_chunks(aw.shape[0], per_row))
    small = np.empty((aw.shape[0], bt.shape[0]), dtype=np.int64)

    def work(span):
        r0, r1 = span
        block = aw[r0:r1, None, :] & bt[None, :, :]
        small[r0:r1] = np.bitwise_count(block).sum(axis=2, dtype=np.int64)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    else:
        for span in chunks:
            work(span)
    return small[np.ix_(a_inv, b_inv)]


def mul(a, b, *, threads: int | None = None) -> IntMatrix:
    """Exact integer product of binary and/or integer matrices."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    threads = default_threads() if threads is None else max(1, threads)
    if isinstance(a, BinaryMatrix) and isinstance(b, BinaryMatrix):
        return IntMatrix(_popcount_product(a, b, threads))
    ea, eb = IntMatrix.of(a).entries, IntMatrix.of(b).entries
    bound = int(ea.max()) * int(eb.max()) * a.cols
    if bound >= 2**63:
        raise CapacityError("integer product could overflow 64-bit entries")
    return IntMatrix(ea @ eb)


@dataclass(frozen=True)
class BlockLayout:
    """Rectangular grid of cells; ``None`` marks an all-zero block.

    Spans of all-zero block rows or columns cannot be inferred and must be
    passed explicitly through ``row_spans`` / ``col_spans``.
    """

    cells: tuple
    row_spans: tuple | None = None
    col_spans: tuple | None = None

    def __post_init__(self):
        cells = tuple(tuple(r) for r in self.cells)
        if not cells or not cells[0]:
            raise LayoutError("layout needs at least one cell")
        ncols = len(cells[0])
        if any(len(r) != ncols for r in cells):
            raise LayoutError("every block row must have the same number of cells")
        heights = self._spans(cells, self.row_spans, axis=0)
        widths = self._spans(tuple(zip(*cells)), self.col_spans, axis=1)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "row_spans", heights)
        object.__setattr__(self, "col_spans", widths)

    @staticmethod
    def _spans(lines, given, axis):
        name = "row" if axis == 0 else "column"
        spans = []
        for idx, line in enumerate(lines):
            sizes = {c.shape[axis] for c in line if c is not None}
            if given is not None:
                sizes.add(int(given[idx]))
            if len(sizes) > 1:
                raise LayoutError(f"block {name} {idx} has inconsistent spans {sorted(sizes)}")
            if not sizes:
                raise LayoutError(f"block {name} {idx} is all zero and has no explicit span")
            (span,) = sizes
            if span < 1:
                raise LayoutError(f"block {name} {idx} has non-positive span")
            spans.append(span)
        if given is not None and len(given) != len(lines):
            raise LayoutError(f"expected {len(lines)} {name} spans, got {len(given)}")
        return tuple(spans)

    @property
    def shape(self) -> tuple[int, int]:
        return (sum(self.row_spans), sum(self.col_spans))


def assemble(layout: BlockLayout) -> BinaryMatrix:
    """Compose the block grid into one matrix, one block row at a time."""
    rows, cols = layout.shape
    check_capacity(rows, cols, "assembled matrix")
    offsets = np.concatenate([[0], np.cumsum(layout.col_spans)])
    out = np.empty((rows, _words_per_row(cols)), dtype=np.uint64)
    r = 0
    for line, height in zip(layout.cells, layout.row_spans):
        for r0, r1 in _row_chunks(height, cols):
            dense = np.zeros((r1 - r0, cols), dtype=np.uint8)
            for cell, c0, c1 in zip(line, offsets[:-1], offsets[1:]):
                if cell is not None:
                    dense[:, c0:c1] = _unpack(cell.words[r0:r1], cell.cols)
            out[r + r0 : r + r1] = _pack(dense)
        r += height
    out.setflags(write=False)
    return BinaryMatrix(rows, cols, out)


def vstack(*blocks: BinaryMatrix) -> BinaryMatrix:
    return assemble(BlockLayout(tuple((b,) for b in blocks)))


def hstack(*blocks: BinaryMatrix) -> BinaryMatrix:
    return assemble(BlockLayout((tuple(blocks),)))
