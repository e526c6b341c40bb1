# %% [markdown]
# # Searching for seeds
#
# A family needs a seed matrix A1 and a blocky pair (B1, C1). Both come
# from backtracking search with node and time budgets. In deterministic mode
# the same input always gives the same answer and node count.

# %%
from dsrgkron.dsrg import DsrgParams
from dsrgkron.family import build_A
from dsrgkron.dsrg import verify_algebraic
from dsrgkron.search import (
    PairSearchProblem,
    PrecheckFailed,
    SearchBudget,
    SearchExhausted,
    assemble_seed,
    search_pair,
    search_seed,
)

# %% [markdown]
# The seed adjacency matrix. Row 0 and column 0 are fixed up to relabelling,
# which prunes most of the symmetric copies.

# %%
p = DsrgParams(8, 4, 3, 1, 3)
seed = search_seed(p, SearchBudget(max_wall_seconds=60))
print(seed.a1.to_array())
print(seed.stats.as_dict())

# %% [markdown]
# The pair. B1 reduces to a 0/1 vector over the rows of A1, and each half
# of C1 becomes a small exact-cover problem.

# %%
sol = search_pair(PairSearchProblem(seed.a1, p))
print(sol.b1.to_array())
print(sol.c1.to_array())
print(sol.stats.as_dict())

# %% [markdown]
# Assemble the validated seed and grow it.

# %%
spec = assemble_seed(seed.a1, sol, p)
for n in (2, 3):
    term = build_A(spec, n)
    print(term.params_n, verify_algebraic(term.a_n, term.params_n).summary())

# %% [markdown]
# Outcomes other than success are distinct exceptions: a failed precheck,
# a proof of infeasibility, or a budget that ran out.

# %%
try:
    search_seed(DsrgParams(6, 3, 3, 3, 3))
except PrecheckFailed as exc:
    print("precheck:", exc)
try:
    search_seed(p, SearchBudget(max_nodes=10))
except SearchExhausted as exc:
    print("exhausted:", exc.stats.as_dict())

# %% [markdown]
# Randomized mode restarts with growing node limits and shuffled value
# orders. It is reproducible for a fixed `rng_seed`.

# %%
budget = SearchBudget(deterministic=False, rng_seed=3, restart_nodes=50)
a = search_seed(p, budget)
b = search_seed(p, budget)
print(a.a1 == b.a1, a.stats.restarts, verify_algebraic(a.a1, p).ok)
