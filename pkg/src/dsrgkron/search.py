"""
Native constraint search for seed matrices.

``search_seed`` looks for a dsrg adjacency matrix row by row.
``search_pair`` looks for the blocky pair (B1, C1) that turns A1 into A2.

Blockiness collapses the pair problem. Every row of B1 is all ones on
exactly one half, so B1 is fully described by a 0/1 vector ``x`` (1 = left
half). With ``M = A1 + sI``:

* ``(A1 + sI) B1 = tJ`` becomes ``M x = t`` and ``M (1 - x) = t``;
* column sums of B1 give ``sum(x) = k`` and ``sum(1 - x) = k``;
* ``C1 (A1 + sI) = tJ`` and the row sums of C1 constrain each row ``y`` of
  C1 on its own: ``y M = t`` and ``|y| = k``;
* ``C1 B1 + s P1 = tJ`` fixes ``y . x`` per row. Rows of C1 facing the
  right-hand ones of P1 need ``y . x = t = k + s - t``; the others need
  ``y . x = t - s = k - t``;
* the column condition on C1 asks each half of C1 (2t rows) to have exactly
  t ones per column.

So the search enumerates ``x``, then the row domain ``{y}``, then fills one
half of C1 as a multiset exact cover (each column covered ``t`` times). Both
halves have identical constraints, so one half is used twice. The three
equations ``BC = tJ``, ``BP = tJ`` and ``PC = tJ`` are never enforced; they
follow from blockiness and are re-checked on every returned solution.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .dsrg import DsrgParams, Violation, precheck_family_feasibility, verify_algebraic
from .errors import DsrgError, SeedContractError, UnsupportedParametersError
from .family import FamilySpec, build_P, validate_seed
from .matcore import BinaryMatrix

SEED_SEARCH_MAX_V = 24
PROGRESS_EVERY = 1000


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10_000_000
    max_wall_seconds: float = 300.0
    rng_seed: int = 0
    deterministic: bool = True
    restart_nodes: int = 2000
    restart_growth: float = 2.0

    def __post_init__(self):
        if self.max_nodes < 0 or self.max_wall_seconds <= 0:
            raise ValueError("search budgets must be nonnegative node counts and positive times")


@dataclass
class SearchStats:
    nodes: int = 0
    wall_seconds: float = 0.0
    restarts: int = 0
    best_depth: int = 0

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "wall_seconds": round(self.wall_seconds, 6),
            "restarts": self.restarts,
            "best_depth": self.best_depth,
        }


class SearchExhausted(DsrgError):
    """The budget ran out before a solution or a proof of infeasibility."""

    def __init__(self, stats: SearchStats):
        self.stats = stats
        super().__init__(f"search budget exhausted after {stats.nodes} nodes")


class SearchInfeasible(DsrgError):
    """The search tree was fully explored without a solution."""

    def __init__(self, stats: SearchStats, reason: str = ""):
        self.stats = stats
        super().__init__("no solution exists" + (f": {reason}" if reason else ""))


class PrecheckFailed(DsrgError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations))


class _Restart(Exception):
    pass


class _Tracker:
    """Node/time accounting shared by one search call."""

    def __init__(self, budget: SearchBudget, on_progress: Callable[[dict], None] | None):
        self.budget = budget
        self.on_progress = on_progress
        self.stats = SearchStats()
        self.start = time.monotonic()
        self.restart_limit: float = math.inf

    def node(self, depth: int) -> None:
        st = self.stats
        st.nodes += 1
        st.best_depth = max(st.best_depth, depth)
        if st.nodes > self.budget.max_nodes:
            st.nodes -= 1
            raise SearchExhausted(self.finish())
        if st.nodes % 256 == 0 and time.monotonic() - self.start > self.budget.max_wall_seconds:
            raise SearchExhausted(self.finish())
        if self.on_progress is not None and st.nodes % PROGRESS_EVERY == 0:
            self.on_progress({"nodes": st.nodes, "depth": depth, "best_depth": st.best_depth})
        if st.nodes > self.restart_limit:
            raise _Restart

    def finish(self) -> SearchStats:
        self.stats.wall_seconds = time.monotonic() - self.start
        return self.stats


def _run_with_restarts(budget: SearchBudget, tracker: _Tracker, attempt: Callable[[random.Random | None], object]):
    """Deterministic mode: one pass in natural order. Otherwise geometric restarts
    with shuffled value orders; a pass that finishes under its limit is complete."""
    if budget.deterministic:
        return attempt(None)
    rng = random.Random(budget.rng_seed)
    limit = float(budget.restart_nodes)
    while True:
        tracker.restart_limit = tracker.stats.nodes + limit
        try:
            return attempt(rng)
        except _Restart:
            tracker.stats.restarts += 1
            limit *= budget.restart_growth


# --------------------------------------------------------------------------
# seed adjacency matrix
# --------------------------------------------------------------------------


class SeedSolution(NamedTuple):
    a1: BinaryMatrix
    stats: SearchStats


def _seed_prechecks(p: DsrgParams) -> list[Violation]:
    out = []
    if p.mu == p.t and p.t <= p.lam:
        out.append(Violation("s_nonpositive", f"mu = t requires t > lambda, got t={p.t}, lambda={p.lam}", "hard"))
    if p.k * p.k != p.t + p.lam * p.k + p.mu * (p.v - 1 - p.k):
        out.append(
            Violation(
                "path_count",
                f"k^2 = t + lambda*k + mu*(v-1-k) fails: {p.k * p.k} != "
                f"{p.t + p.lam * p.k + p.mu * (p.v - 1 - p.k)}",
                "hard",
            )
        )
    if p.t > p.k or p.lam > p.k or p.mu > p.k:
        out.append(Violation("count_exceeds_degree", "t, lambda and mu cannot exceed k", "hard"))
    return out


def search_seed(
    p: DsrgParams,
    budget: SearchBudget = SearchBudget(),
    *,
    max_v: int = SEED_SEARCH_MAX_V,
    on_progress: Callable[[dict], None] | None = None,
) -> SeedSolution:
    """Backtracking search for an adjacency matrix of dsrg(p).

    Rows are filled in order, each row cell by cell. For every filled row
    ``a`` the partial square ``P[a][j] = sum over filled w with A[a][w] = 1
    of A[w][j]`` is kept and bounded above by the required 2-path count and
    below by what the unfilled rows can still add. Row 0 is fixed to
    ``0 1..1 0..0`` and column 0 to in-edges from ``1..t`` and
    ``k+1..2k-t``; any solution can be relabelled into that form.

    Raises :class:`PrecheckFailed`, :class:`SearchExhausted` or
    :class:`SearchInfeasible`.
    """
    if p.v > max_v:
        raise UnsupportedParametersError(f"seed search is limited to v <= {max_v}, got v={p.v}")
    bad = _seed_prechecks(p)
    if bad:
        raise PrecheckFailed(bad)
    tracker = _Tracker(budget, on_progress)

    def attempt(rng):
        return _SeedSearch(p, tracker, rng).run()

    found = _run_with_restarts(budget, tracker, attempt)
    stats = tracker.finish()
    if found is None:
        raise SearchInfeasible(stats, "search tree exhausted (row 0 and column 0 fixed by symmetry)")
    a1 = BinaryMatrix.from_array(np.array(found, dtype=np.uint8))
    rep = verify_algebraic(a1, p)
    if not rep.ok:  # pragma: no cover - would be a propagation bug
        raise RuntimeError(f"seed search produced an invalid matrix: {rep.summary()}")
    return SeedSolution(a1, stats)


class _SeedSearch:
    def __init__(self, p: DsrgParams, tracker: _Tracker, rng):
        self.p = p
        self.tracker = tracker
        self.rng = rng
        v, k, t = p.v, p.k, p.t
        self.A = [[0] * v for _ in range(v)]
        self.P = [[0] * v for _ in range(v)]
        self.colcount = [0] * v
        # forced entries: row 0 and column 0 (see search_seed)
        self.forced: dict[tuple[int, int], int] = {}
        for j in range(v):
            self.forced[(0, j)] = 1 if 1 <= j <= k else 0
        for i in range(1, v):
            self.forced[(i, 0)] = 1 if (1 <= i <= t or k + 1 <= i <= 2 * k - t) else 0

    def target(self, a: int, j: int, row) -> int:
        if a == j:
            return self.p.t
        return self.p.lam if row[j] else self.p.mu

    def run(self):
        return self.rows(0)

    def rows(self, i: int):
        v = self.p.v
        if i == v:
            return [r[:] for r in self.A]
        feeders = [a for a in range(i) if self.A[a][i]]
        # room[a][j]: rows after i that a points to, excluding row j itself
        rooms = {}
        for a in feeders:
            cnt = sum(self.A[a][i + 1 :])
            rooms[a] = [cnt - (self.A[a][j] if j > i else 0) for j in range(v)]
        cols = [j for j in range(v) if j != i]
        if self.rng is not None:
            head = [j for j in cols if (i, j) in self.forced]
            rest = [j for j in cols if (i, j) not in self.forced]
            self.rng.shuffle(rest)
            cols = head + rest
        row = [0] * v
        pi = [0] * v
        return self.cells(i, 0, cols, row, pi, 0, feeders, rooms)

    def cells(self, i, pos, cols, row, pi, chosen, feeders, rooms):
        p, v, k = self.p, self.p.v, self.p.k
        if pos == len(cols):
            if chosen != k or not self.row_complete(i, row, pi):
                return None
            self.tracker.node(i + 1)
            self.A[i] = row[:]
            self.P[i] = pi[:]
            for a in feeders:
                Pa = self.P[a]
                for j in range(v):
                    Pa[j] += row[j]
            for j in range(v):
                self.colcount[j] += row[j]
            got = self.rows(i + 1)
            if got is not None:
                return got
            for j in range(v):
                self.colcount[j] -= row[j]
            for a in feeders:
                Pa = self.P[a]
                for j in range(v):
                    Pa[j] -= row[j]
            self.A[i] = [0] * v
            self.P[i] = [0] * v
            return None
        j = cols[pos]
        left = len(cols) - pos - 1
        forced = self.forced.get((i, j))
        options = (1, 0) if forced is None else (forced,)
        if forced is None and self.rng is not None and self.rng.random() < 0.5:
            options = (0, 1)
        for val in options:
            if val:
                if chosen >= k or self.colcount[j] >= k:
                    continue
                if any(self.P[a][j] + 1 > self.target(a, j, self.A[a]) for a in feeders):
                    continue
                if j < i:
                    Aj = self.A[j]
                    if any(pi[c] + Aj[c] > max(p.lam, p.mu) for c in range(v) if c != i):
                        continue
                    if pi[i] + Aj[i] > p.t:
                        continue
            else:
                if chosen + left < k:
                    continue
                future = (v - 1 - i) - (1 if j > i else 0)
                if k - self.colcount[j] > future:
                    continue
                if any(
                    self.P[a][j] + rooms[a][j] < self.target(a, j, self.A[a]) for a in feeders
                ):
                    continue
            row[j] = val
            if val and j < i:
                Aj = self.A[j]
                for c in range(v):
                    pi[c] += Aj[c]
            got = self.cells(i, pos + 1, cols, row, pi, chosen + val, feeders, rooms)
            if val and j < i:
                Aj = self.A[j]
                for c in range(v):
                    pi[c] -= Aj[c]
            row[j] = 0
            if got is not None:
                return got
        return None

    def row_complete(self, i, row, pi) -> bool:
        v = self.p.v
        fut = sum(row[i + 1 :])
        for c in range(v):
            tg = self.target(i, c, row)
            room = fut - (row[c] if c > i else 0)
            if pi[c] > tg or pi[c] + room < tg:
                return False
        return True


# --------------------------------------------------------------------------
# seed pair (B1, C1)
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PairSearchProblem:
    """A verified A1 with its parameters; construction runs the prechecks."""

    a1: BinaryMatrix
    params: DsrgParams
    force: bool = False
    violations: tuple = field(default=(), init=False)

    def __post_init__(self):
        p = self.params
        if p.mu != p.t:
            raise UnsupportedParametersError("pair search requires mu == t")
        viol = precheck_family_feasibility(p)
        object.__setattr__(self, "violations", tuple(viol))
        hard = [x for x in viol if x.tag == "hard"]
        if hard and not self.force:
            raise PrecheckFailed(hard)
        rep = verify_algebraic(self.a1, p)
        if not rep.ok:
            f = rep.failures[0]
            raise SeedContractError(
                f"A1 is a dsrg({p})", f"{f.kind} at ({f.i}, {f.j}): got {f.got}, expected {f.expected}"
            )

    @property
    def s(self) -> int:
        return self.params.s


@dataclass(frozen=True, eq=False)
class PairSolution:
    b1: BinaryMatrix
    c1: BinaryMatrix
    stats: SearchStats


def _binary_solutions(
    M: np.ndarray, target: int, card: int, tracker: _Tracker, rng, fixed: dict | None = None
) -> Iterator[np.ndarray]:
    """All z in {0,1}^n with ``M z = target`` (every row) and ``sum(z) = card``.

    Bounds per row: the partial sum may not exceed ``target`` and the
    undecided weight must still be able to reach it.
    """
    n = M.shape[1]
    order = list(range(n))
    if rng is not None:
        rng.shuffle(order)
    fixed = fixed or {}
    # suffix weights: max additional contribution after position d in `order`
    Mo = M[:, order]
    suffix = np.zeros((M.shape[0], n + 1), dtype=np.int64)
    suffix[:, :n] = np.cumsum(Mo[:, ::-1], axis=1)[:, ::-1]
    z = np.zeros(n, dtype=np.int64)

    def rec(d, partial, ones):
        if ones > card or ones + (n - d) < card:
            return
        if np.any(partial > target) or np.any(partial + suffix[:, d] < target):
            return
        if d == n:
            yield z.copy()
            return
        w = order[d]
        values = (1, 0) if rng is None or rng.random() < 0.5 else (0, 1)
        if w in fixed:
            values = (fixed[w],)
        for val in values:
            tracker.node(d + 1)
            z[w] = val
            yield from rec(d + 1, partial + val * Mo[:, d], ones + val)
        z[w] = 0

    yield from rec(0, np.zeros(M.shape[0], dtype=np.int64), 0)


def _cover_half(
    Y: np.ndarray, is_top: np.ndarray, t: int, tracker: _Tracker, depth0: int
) -> list[int] | None:
    """Pick t rows with ``is_top`` and t without (repeats allowed) so every
    column of the picked rows sums to exactly t.

    Branches on the leftmost column still short of t. Rows taken while
    branching on the same column come in nondecreasing index order; a row
    can only be taken for the leftmost column it covers, so each multiset is
    reached once.
    """
    nrows, v = Y.shape
    colsum = np.zeros(v, dtype=np.int64)
    picked: list[int] = []

    def rec(q_top, q_other, last_col, last_idx):
        if q_top == 0 and q_other == 0:
            return list(picked) if np.all(colsum == t) else None
        deficit = t - colsum
        remaining = q_top + q_other
        if np.any(deficit > remaining):
            return None
        quota_ok = np.where(is_top, q_top > 0, q_other > 0)
        compat = quota_ok & np.all(Y + colsum[None, :] <= t, axis=1)
        if np.any((deficit > 0) & ~Y[compat].any(axis=0)):
            return None
        c = int(np.argmax(deficit > 0))
        cand = np.flatnonzero(compat & (Y[:, c] == 1))
        if c == last_col:
            cand = cand[cand >= last_idx]
        for r in cand:
            tracker.node(depth0 + len(picked) + 1)
            picked.append(int(r))
            colsum[:] += Y[r]
            top = bool(is_top[r])
            got = rec(q_top - top, q_other - (not top), c, int(r))
            if got is not None:
                return got
            colsum[:] -= Y[r]
            picked.pop()
        return None

    return rec(t, t, -1, 0)


def solve_pair_system(
    a1: BinaryMatrix,
    t: int,
    lam: int,
    k: int,
    budget: SearchBudget = SearchBudget(),
    on_progress: Callable[[dict], None] | None = None,
) -> PairSolution:
    """Search for a blocky (B1, C1) meeting every block-form condition for this A1.

    A1 need not be a dsrg here; this is the raw solver behind
    :func:`search_pair`. Raises :class:`SearchInfeasible` when the search
    tree is exhausted and :class:`SearchExhausted` on budget overrun.
    """
    v = a1.rows
    s = t - lam
    if s <= 0:
        raise UnsupportedParametersError("need t > lambda")
    M = a1.to_array().astype(np.int64) + s * np.eye(v, dtype=np.int64)
    rowsum = int(M.sum(axis=1).max()) if v else 0
    tracker = _Tracker(budget, on_progress)
    # targets for y . x on rows facing right-hand / left-hand ones of P1
    want_top = {t, k + s - t}
    want_bot = {t - s, k - t}
    symmetric = (
        np.all(M.sum(axis=1) == 2 * t) and v == 2 * k and len(want_top) == 1 and len(want_bot) == 1
    )

    def attempt(rng):
        if len(want_top) > 1 or len(want_bot) > 1 or v != 2 * k:
            return None
        if np.any(M.sum(axis=1) != 2 * t):
            return None
        (y_top,), (y_bot,) = want_top, want_bot
        ydom = np.array(list(_binary_solutions(M.T, t, k, tracker, rng)), dtype=np.int64)
        if len(ydom) == 0:
            return None
        fixed = {0: 1} if symmetric else None
        for x in _binary_solutions(M, t, k, tracker, rng, fixed):
            dots = ydom @ x
            sel = (dots == y_top) | (dots == y_bot)
            Y = ydom[sel]
            is_top = dots[sel] == y_top
            if is_top.sum() == 0 or (~is_top).sum() == 0:
                continue
            if rng is not None:
                perm = list(range(len(Y)))
                rng.shuffle(perm)
                Y, is_top = Y[perm], is_top[perm]
            half = _cover_half(Y, is_top, t, tracker, v)
            if half is not None:
                tops = [Y[r] for r in half if is_top[r]]
                bots = [Y[r] for r in half if not is_top[r]]
                return x, np.array(tops + bots + tops + bots)
        return None

    found = _run_with_restarts(budget, tracker, attempt)
    stats = tracker.finish()
    if found is None:
        reason = f"no blocky pair for this A1 (row sums of A1+sI: {rowsum})"
        raise SearchInfeasible(stats, reason)
    x, c = found
    b = np.zeros((v, 4 * t), dtype=np.uint8)
    b[x == 1, : 2 * t] = 1
    b[x == 0, 2 * t :] = 1
    return PairSolution(BinaryMatrix.from_array(b), BinaryMatrix.from_array(c), stats)


def search_pair(
    problem: PairSearchProblem,
    budget: SearchBudget = SearchBudget(),
    on_progress: Callable[[dict], None] | None = None,
) -> PairSolution:
    """Find (B1, C1) for a verified A1; the result is re-validated before return."""
    p = problem.params
    sol = solve_pair_system(problem.a1, p.t, p.lam, p.k, budget, on_progress)
    validate_seed(p, problem.a1, sol.b1, sol.c1)
    return sol


def assemble_seed(a1: BinaryMatrix, sol: PairSolution, p: DsrgParams) -> FamilySpec:
    """Turn a pair solution into a validated :class:`FamilySpec`."""
    return FamilySpec(p, a1, sol.b1, sol.c1)


def exhaustive_pair_check(a1: BinaryMatrix, t: int, lam: int, k: int) -> bool:
    """Brute force over every blocky (B1, C1): does any pair meet all conditions?

    Direct matrix products, no reformulation; only for tiny ``v`` and ``t``.
    """
    from itertools import combinations, product

    v = a1.rows
    s = t - lam
    A = a1.to_array().astype(np.int64)
    P = build_P(1, t).to_array().astype(np.int64)
    tJ = lambda r, c: np.full((r, c), t)  # noqa: E731
    half_cols = []
    for top in combinations(range(2 * t), t):
        for bot in combinations(range(2 * t, 4 * t), t):
            col = np.zeros(4 * t, dtype=np.int64)
            col[list(top) + list(bot)] = 1
            half_cols.append(col)
    for xbits in product((0, 1), repeat=v):
        B = np.zeros((v, 4 * t), dtype=np.int64)
        for w, xb in enumerate(xbits):
            B[w, : 2 * t] = xb
            B[w, 2 * t :] = 1 - xb
        if np.any(B.sum(axis=0) != k):
            continue
        if not np.array_equal(A @ B + s * B, tJ(v, 4 * t)):
            continue
        for cols in product(half_cols, repeat=v):
            C = np.stack(cols, axis=1)
            if (
                np.array_equal(B @ C, tJ(v, v))
                and np.array_equal(B @ P, tJ(v, 4 * t))
                and np.array_equal(P @ C, tJ(4 * t, v))
                and np.array_equal(C @ A + s * C, tJ(4 * t, v))
                and np.array_equal(C @ B + s * P, tJ(4 * t, 4 * t))
                and np.all(C.sum(axis=1) == k)
                and np.all(C.sum(axis=0) == 2 * t)
            ):
                return True
    return False
