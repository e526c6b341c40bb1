"""
Kronecker-product recurrences for infinite families of dsrg(v_n, k_n, t, lam, t).

Starting from a seed triple ``(A1, B1, C1)`` the family is

    A_{n+1} = [[A_n, 0,   B_n, 0  ],
               [0,   A_n, 0,   B_n],
               [0,   C_n, 0,   P_n],
               [C_n, 0,   P_n, 0  ]]

with ``P_n = J_{2^n,1} (x) K_{2^n} (x) J_{t, t*2^n}`` and ``B_n``, ``C_n``
grown by the recurrences in :func:`next_B` and :func:`next_C`.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Iterator

import numpy as np

from . import matcore as mc
from .dsrg import DsrgParams, Failure, VerifyReport, verify_algebraic
from .errors import CapacityError, DimensionError, SeedContractError, UnsupportedParametersError
from .matcore import BinaryMatrix, BlockLayout, IntMatrix

FULL_PRODUCT_LIMIT = 8192

EQUATIONS = (
    "B C = tJ",
    "B P = tJ",
    "P C = tJ",
    "(A + sI) B = tJ",
    "C (A + sI) = tJ",
    "C B + sP = tJ",
)


def family_order(v: int, t: int, n: int) -> int:
    return (v + (2 ** (n + 1) - 4) * t) * 2 ** (n - 1)


def family_params(seed: DsrgParams, n: int) -> DsrgParams:
    """Parameters of the n-th family term grown from ``seed``."""
    if seed.mu != seed.t:
        raise UnsupportedParametersError("family construction requires mu == t")
    if n < 1:
        raise ValueError("family index starts at 1")
    v, k, t, lam, _ = seed.as_tuple()
    return DsrgParams(family_order(v, t, n), k + (2**n - 2) * t, t, lam, t)


def build_P(n: int, t: int) -> BinaryMatrix:
    if n < 1 or t < 1:
        raise ValueError("build_P needs n >= 1 and t >= 1")
    order = t * 4**n
    mc.check_capacity(order, order, f"P_{n}")
    return mc.kron_chain(mc.ones(2**n, 1), mc.exchange(2**n), mc.ones(t, t * 2**n))


def build_P_recursive(n: int, t: int) -> BinaryMatrix:
    """P_n grown level by level through row truncation (cross-check for build_P)."""
    if n < 1 or t < 1:
        raise ValueError("build_P_recursive needs n >= 1 and t >= 1")
    mc.check_capacity(t * 4**n, t * 4**n, f"P_{n}")
    p = mc.kron_chain(mc.ones(2, 1), mc.exchange(2), mc.ones(t, 2 * t))
    k2, j12 = mc.exchange(2), mc.ones(1, 2)
    for m in range(2, n + 1):
        p = mc.kron_chain(mc.ones(2**m, 1), k2, mc.alpha(p, 2 ** (m - 1)), j12)
    return p


def next_B(b_prev: BinaryMatrix, p_prev: BinaryMatrix) -> BinaryMatrix:
    top = mc.kron_chain(mc.exchange(2), b_prev, mc.ones(1, 2))
    bottom = mc.kron_chain(mc.identity(2), p_prev, mc.ones(1, 2))
    return mc.vstack(top, bottom)


def next_C(c_prev: BinaryMatrix, p_prev: BinaryMatrix, n: int, block: int = 0) -> BinaryMatrix:
    """C_n from C_{n-1}; ``block`` picks which row block of C_{n-1} is kept."""
    s = 2 ** (n - 1)
    if c_prev.rows % s:
        raise RuntimeError(
            f"C_{n - 1} has {c_prev.rows} rows, not divisible by {s}; recursion state is corrupt"
        )
    lead = mc.kron(mc.ones(2**n, 1), mc.identity(2))
    left = mc.kron(lead, mc.alpha(c_prev, s, block % s))
    right = mc.kron(lead, mc.alpha(p_prev, s))
    return mc.hstack(left, right)


def a_next_layout(a, b, c, p) -> BlockLayout:
    return BlockLayout(
        (
            (a, None, b, None),
            (None, a, None, b),
            (None, c, None, p),
            (c, None, p, None),
        )
    )


def _row_blocks_ok(m: np.ndarray, width: int) -> np.ndarray:
    """Per row: exactly one all-ones block of ``width`` and zeros elsewhere."""
    sums = m.reshape(m.shape[0], -1, width).sum(axis=2)
    return ((sums == width).sum(axis=1) == 1) & ((sums == 0).sum(axis=1) == sums.shape[1] - 1)


def _col_blocks_ok(m: np.ndarray, height: int, per_block: int) -> np.ndarray:
    """Per column: every consecutive block of ``height`` rows holds ``per_block`` ones."""
    sums = m.reshape(-1, height, m.shape[1]).sum(axis=1)
    return np.all(sums == per_block, axis=0)


def blockiness_failures(b1: BinaryMatrix, c1: BinaryMatrix, t: int) -> list[str]:
    out = []
    bad = np.flatnonzero(~_row_blocks_ok(b1.to_array(), 2 * t))
    if len(bad):
        out.append(f"B row {int(bad[0])} is not one all-ones half plus one all-zeros half")
    bad = np.flatnonzero(~_col_blocks_ok(c1.to_array(), 2 * t, t))
    if len(bad):
        out.append(f"C column {int(bad[0])} does not have exactly {t} ones in each half")
    return out


def block_system(a, b, c, p, t: int, s: int) -> VerifyReport:
    """Evaluate the six off-diagonal block equations exactly.

    Failures carry the equation name in ``kind`` and the first bad entry.
    """
    sb = IntMatrix.of(b).scale(s)
    sc = IntMatrix.of(c).scale(s)
    sp = IntMatrix.of(p).scale(s)
    lhs = {
        EQUATIONS[0]: lambda: mc.mul(b, c),
        EQUATIONS[1]: lambda: mc.mul(b, p),
        EQUATIONS[2]: lambda: mc.mul(p, c),
        EQUATIONS[3]: lambda: mc.mul(a, b) + sb,
        EQUATIONS[4]: lambda: mc.mul(c, a) + sc,
        EQUATIONS[5]: lambda: mc.mul(c, b) + sp,
    }
    failures, total, details = [], 0, {}
    for name, fn in lhs.items():
        e = fn().entries
        bad = np.argwhere(e != t)
        details[name] = len(bad) == 0
        if len(bad):
            i, j = (int(x) for x in bad[0])
            failures.append(Failure(i, j, t, int(e[i, j]), name))
            total += len(bad)
    return VerifyReport(
        ok=not failures, mode="block-system", failures=tuple(failures),
        failure_count=total, details=details,
    )


def validate_seed(p: DsrgParams, a1: BinaryMatrix, b1: BinaryMatrix, c1: BinaryMatrix) -> None:
    """Raise :class:`SeedContractError` naming the first violated condition."""
    if p.mu != p.t:
        raise SeedContractError("mu == t", f"mu={p.mu}, t={p.t}")
    if p.s <= 0:
        raise SeedContractError("t > lambda", f"t={p.t}, lambda={p.lam}")
    t, v = p.t, p.v
    for name, m, shape in (("A1", a1, (v, v)), ("B1", b1, (v, 4 * t)), ("C1", c1, (4 * t, v))):
        if m.shape != shape:
            raise SeedContractError(f"{name} dimensions", f"expected {shape}, got {m.shape}")
    try:
        rep = verify_algebraic(a1, p)
    except (DimensionError, ValueError) as exc:
        raise SeedContractError("A1 is an adjacency matrix", str(exc)) from exc
    if not rep.ok:
        f = rep.failures[0]
        raise SeedContractError(f"A1 is a dsrg({p})", f"{f.kind} at ({f.i}, {f.j}): {f.got} != {f.expected}")
    for msg in blockiness_failures(b1, c1, t):
        raise SeedContractError("blockiness", msg)
    rep = block_system(a1, b1, c1, build_P(1, t), t, p.s)
    for f in rep.failures:
        raise SeedContractError(f.kind, f"entry ({f.i}, {f.j}) is {f.got}, expected {t}")
    sums = (
        ("B row sums = 2t", b1.row_sums(), 2 * t),
        ("B column sums = k", b1.col_sums(), p.k),
        ("C row sums = k", c1.row_sums(), p.k),
        ("C column sums = 2t", c1.col_sums(), 2 * t),
    )
    for name, got, want in sums:
        if np.any(got != want):
            idx = int(np.flatnonzero(got != want)[0])
            raise SeedContractError(name, f"index {idx} has {int(got[idx])}, expected {want}")


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """Validated seed triple. Pass ``check=False`` only to build deliberately broken fixtures."""

    seed_params: DsrgParams
    a1: BinaryMatrix
    b1: BinaryMatrix
    c1: BinaryMatrix
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        if check:
            validate_seed(self.seed_params, self.a1, self.b1, self.c1)

    @property
    def t(self) -> int:
        return self.seed_params.t


@dataclass(frozen=True, eq=False)
class FamilyTerm:
    n: int
    a_n: BinaryMatrix
    params_n: DsrgParams

    @property
    def v_n(self) -> int:
        return self.params_n.v


def build_B(spec: FamilySpec, n: int) -> BinaryMatrix:
    if n < 1:
        raise ValueError("family index starts at 1")
    b = spec.b1
    for m in range(2, n + 1):
        b = next_B(b, build_P(m - 1, spec.t))
    return b


def build_C(spec: FamilySpec, n: int, block: int = 0) -> BinaryMatrix:
    if n < 1:
        raise ValueError("family index starts at 1")
    c = spec.c1
    for m in range(2, n + 1):
        c = next_C(c, build_P(m - 1, spec.t), m, block)
    return c


def iter_family(spec: FamilySpec, n_max: int, c_block: int = 0) -> Iterator[FamilyTerm]:
    """Yield A_1, A_2, ..., A_{n_max}, keeping only the previous level in memory."""
    if n_max < 1:
        raise ValueError("family index starts at 1")
    p0 = spec.seed_params
    t = p0.t
    for m in range(2, n_max + 1):
        v = family_order(p0.v, t, m)
        if v * v > mc.get_capacity_limit():
            raise CapacityError(
                f"A_{m} has order {v}; {v * v} entries exceed capacity limit {mc.get_capacity_limit()}"
            )
    a, b, c = spec.a1, spec.b1, spec.c1
    yield FamilyTerm(1, a, family_params(p0, 1))
    for m in range(1, n_max):
        p = build_P(m, t)
        a = mc.assemble(a_next_layout(a, b, c, p))
        yield FamilyTerm(m + 1, a, family_params(p0, m + 1))
        if m + 1 < n_max:
            b, c = next_B(b, p), next_C(c, p, m + 1, c_block)


def build_A(spec: FamilySpec, n: int, c_block: int = 0) -> FamilyTerm:
    term = None
    for term in iter_family(spec, n, c_block):
        pass
    return term


def family_matrices(spec: FamilySpec, n: int, c_block: int = 0):
    """Return (A_n, B_n, C_n, P_n)."""
    return (
        build_A(spec, n, c_block).a_n,
        build_B(spec, n),
        build_C(spec, n, c_block),
        build_P(n, spec.t),
    )


def check_block_system(spec: FamilySpec, n: int, c_block: int = 0) -> VerifyReport:
    """Recompute the six block equations for level ``n`` with full products."""
    v_n = family_order(spec.seed_params.v, spec.t, n)
    if max(v_n, spec.t * 4**n) > FULL_PRODUCT_LIMIT:
        raise CapacityError(
            f"level {n} has order {v_n}; full products are limited to {FULL_PRODUCT_LIMIT}, "
            "use sampled verification instead"
        )
    a, b, c, p = family_matrices(spec, n, c_block)
    return block_system(a, b, c, p, spec.t, spec.seed_params.s)


def check_structure(spec: FamilySpec, n: int, c_block: int = 0) -> VerifyReport:
    """Row/column counts and block patterns of B_n, C_n and P_n.

    Checks: B_n rows hold t*2^n ones and columns k_n; C_n rows hold k_n and
    columns t*2^n; rows of B_n and P_n split into blocks of t*2^n with
    exactly one all-ones block; columns of C_n and P_n split into blocks of
    t*2^n with exactly t ones each.
    """
    t = spec.t
    k_n = family_params(spec.seed_params, n).k
    width = t * 2**n
    b = build_B(spec, n)
    c = build_C(spec, n, c_block)
    p = build_P(n, t)
    bd, cd, pd = b.to_array(), c.to_array(), p.to_array()
    checks = {
        "B row sums": (b.row_sums(), width),
        "B column sums": (b.col_sums(), k_n),
        "C row sums": (c.row_sums(), k_n),
        "C column sums": (c.col_sums(), width),
        "P row sums": (p.row_sums(), width),
        "P column sums": (p.col_sums(), width),
    }
    failures, total, details = [], 0, {}
    for name, (got, want) in checks.items():
        bad = np.flatnonzero(got != want)
        details[name] = len(bad) == 0
        if len(bad):
            i, j = (-1, int(bad[0])) if "column" in name else (int(bad[0]), -1)
            failures.append(Failure(i, j, want, int(got[bad[0]]), name))
            total += len(bad)
    patterns = {
        "B row blocks": ~_row_blocks_ok(bd, width),
        "P row blocks": ~_row_blocks_ok(pd, width),
        "C column blocks": ~_col_blocks_ok(cd, width, t),
        "P column blocks": ~_col_blocks_ok(pd, width, t),
    }
    for name, bad_mask in patterns.items():
        bad = np.flatnonzero(bad_mask)
        details[name] = len(bad) == 0
        if len(bad):
            i, j = (-1, int(bad[0])) if "column" in name else (int(bad[0]), -1)
            failures.append(Failure(i, j, 1, 0, name))
            total += len(bad)
    return VerifyReport(
        ok=not failures, mode="structural", failures=tuple(failures[:32]),
        failure_count=total, details=details,
    )
