# %% [markdown]
# # Growing an infinite family
#
# Given a seed triple (A1, B1, C1) the next term is
#
#     A_{n+1} = [[A_n, 0,   B_n, 0  ],
#                [0,   A_n, 0,   B_n],
#                [0,   C_n, 0,   P_n],
#                [C_n, 0,   P_n, 0  ]]
#
# where P_n is a fixed Kronecker product and B_n, C_n grow by their own
# recurrences. Orders roughly quadruple at each step.

# %%
import time

from dsrgkron import catalog
from dsrgkron.dsrg import verify_algebraic, verify_sampled
from dsrgkron.family import (
    build_B,
    build_C,
    build_P,
    check_block_system,
    check_structure,
    family_params,
    iter_family,
)
from dsrgkron import matcore as mc

# %% [markdown]
# P_n squares to t J for every n.

# %%
for n in range(1, 5):
    p = build_P(n, 2)
    print(n, p.shape, mc.mul(p, p).is_constant(2))

# %% [markdown]
# Parameters of every catalogued family, first three terms.

# %%
for row in catalog.TABLE:
    print(row.index, [str(family_params(row.seed, n)) for n in (1, 2, 3)])

# %% [markdown]
# Build the t = 2 family and check each term. Full squaring is used up to
# order 1000, sampling beyond.

# %%
spec = catalog.load_fixture(1)
for term in iter_family(spec, 6):
    t0 = time.monotonic()
    if term.v_n <= 1000:
        rep = verify_algebraic(term.a_n, term.params_n)
    else:
        rep = verify_sampled(term.a_n, term.params_n, 50_000, rng_seed=0)
    print(f"A_{term.n}: dsrg({term.params_n})  {rep.summary()}  {time.monotonic() - t0:.2f}s")

# %% [markdown]
# B_n and C_n keep a rigid block pattern: every row of B_n is one all-ones
# block of width t 2^n, every column of C_n has t ones per block of t 2^n
# rows.

# %%
for n in (1, 2, 3):
    print(n, build_B(spec, n).shape, build_C(spec, n).shape, check_structure(spec, n).summary())

# %% [markdown]
# The six off-diagonal block equations, recomputed with full products.

# %%
for n in (1, 2, 3):
    rep = check_block_system(spec, n)
    print(n, rep.summary(), rep.details)
