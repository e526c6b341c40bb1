# %% [markdown]
# # Bit-packed 0/1 matrices
#
# Everything in `dsrgkron` is built from a handful of operations on binary
# matrices: identity, all-ones, exchange, Kronecker products, row truncation,
# block assembly and exact integer products. Rows are packed 64 bits to a
# word, so a product of two 0/1 matrices is a popcount of ANDed words.

# %%
import numpy as np

from dsrgkron import matcore as mc
from dsrgkron.matcore import BinaryMatrix, BlockLayout

# %% [markdown]
# The three basic shapes. `ones(m, l)` is the rectangular all-ones matrix
# and `exchange(m)` is the anti-diagonal permutation.

# %%
print(mc.identity(3).to_array())
print(mc.ones(2, 3).to_array())
print(mc.exchange(3).to_array())

# %% [markdown]
# Kronecker products compose; this is the smallest member of the P family
# for t = 1 (stack two copies of the exchange matrix, then widen each entry
# into a 1x2 block).

# %%
p1 = mc.kron_chain(mc.ones(2, 1), mc.exchange(2), mc.ones(1, 2))
print(p1.to_array())

# %% [markdown]
# `alpha(x, s)` keeps the first of `s` equal row blocks. It undoes a
# vertical repetition.

# %%
print(mc.alpha(p1, 2).to_array())
x = BinaryMatrix.from_rows(["0110", "1001"])
assert mc.alpha(mc.kron(mc.ones(3, 1), x), 3) == x

# %% [markdown]
# Products come back as `IntMatrix` (int64 entries). P_1 squared is the
# all-ones matrix, as expected.

# %%
sq = mc.mul(p1, p1)
print(sq.entries)
print("constant 1:", sq.is_constant(1))

# %% [markdown]
# Block assembly takes a grid of matrices and `None` for zero blocks.

# %%
a = BinaryMatrix.from_rows(["011", "101", "110"])
grid = mc.assemble(BlockLayout(((a, None), (None, a))))
print(grid.to_array())
print("same as I2 (x) A:", grid == mc.kron(mc.identity(2), a))

# %% [markdown]
# Larger matrices stay cheap: a 4096 x 4096 exchange matrix takes 2 MiB,
# and squaring it is a single popcount product.

# %%
k = mc.exchange(4096)
print(k.words.nbytes, "bytes")
print(mc.mul(k, k) == mc.IntMatrix.of(mc.identity(4096)))
