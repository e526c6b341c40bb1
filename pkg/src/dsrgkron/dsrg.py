"""
Directed strongly regular graph parameters and verifiers.

Two full verifiers are provided and are deliberately independent:

* :func:`verify_algebraic` squares the adjacency matrix (bitwise popcount
  product) and compares it against ``tI + lam*A + mu*(J - I - A)``;
* :func:`verify_combinatorial` counts directed 2-paths through explicit
  out/in-neighbourhood intersections and never forms a matrix product.

:func:`verify_sampled` spot-checks ``A^2 + sA = tJ`` on pseudo-random
entries drawn from a counter-based SplitMix64 stream, and is the only
verifier that stays cheap on very large family terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DimensionError, LoopError, UnsupportedParametersError
from .matcore import WORD_BITS, BinaryMatrix, mul

MAX_WITNESSES = 32


@dataclass(frozen=True)
class DsrgParams:
    """Parameter set (v, k, t, lambda, mu); ``lam`` stands for lambda."""

    v: int
    k: int
    t: int
    lam: int
    mu: int

    def __post_init__(self):
        for name in ("v", "k", "t", "lam", "mu"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, np.integer)):
                raise TypeError(f"{name} must be an integer")
            if val < 0:
                raise ValueError(f"{name} must be nonnegative, got {val}")
            object.__setattr__(self, name, int(val))
        if self.k < 1 or self.v <= self.k:
            raise ValueError(f"need v > k >= 1, got v={self.v}, k={self.k}")

    @property
    def s(self) -> int:
        return self.t - self.lam

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.v, self.k, self.t, self.lam, self.mu)

    @classmethod
    def from_seq(cls, seq) -> "DsrgParams":
        v, k, t, lam, mu = (int(x) for x in seq)
        return cls(v, k, t, lam, mu)

    def __str__(self) -> str:
        return " ".join(map(str, self.as_tuple()))


class Failure(NamedTuple):
    """One verification witness.

    ``kind`` is ``"entry"`` for a bad 2-path count at (i, j), ``"row_sum"``
    (j = -1) or ``"col_sum"`` (i = -1) for a degree mismatch, or the name of
    a matrix equation for block-system checks.
    """

    i: int
    j: int
    expected: int
    got: int
    kind: str = "entry"


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    mode: str
    failures: tuple[Failure, ...] = ()
    failure_count: int = 0
    samples_checked: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ok != (len(self.failures) == 0):
            raise ValueError("report is ok exactly when it carries no failures")

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "mode": self.mode,
            "failure_count": self.failure_count,
            "samples_checked": self.samples_checked,
            "failures": [f._asdict() for f in self.failures],
            "details": dict(self.details),
        }

    def summary(self) -> str:
        status = "OK" if self.ok else "FAILED"
        text = f"{status} [{self.mode}]"
        if self.mode == "sampled":
            text += f" samples={self.samples_checked}"
        if not self.ok:
            text += f" failures={self.failure_count}"
        return text


class _Collector:
    def __init__(self):
        self.failures: list[Failure] = []
        self.count = 0

    def add(self, f: Failure) -> None:
        self.count += 1
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append(f)

    def report(self, mode: str, **kw) -> VerifyReport:
        return VerifyReport(
            ok=self.count == 0,
            mode=mode,
            failures=tuple(self.failures),
            failure_count=self.count,
            **kw,
        )


def _check_input(a: BinaryMatrix, p: DsrgParams) -> None:
    if a.rows != a.cols:
        raise DimensionError(f"adjacency matrix must be square, got {a.rows}x{a.cols}")
    if a.rows != p.v:
        raise DimensionError(f"adjacency matrix has order {a.rows}, parameters say v={p.v}")
    diag = a.diagonal()
    if diag.any():
        raise LoopError(f"adjacency matrix has a loop at vertex {int(np.argmax(diag))}")


def _degree_failures(col: _Collector, row_sums, col_sums, k: int) -> None:
    for i in np.flatnonzero(row_sums != k):
        col.add(Failure(int(i), -1, k, int(row_sums[i]), "row_sum"))
    for j in np.flatnonzero(col_sums != k):
        col.add(Failure(-1, int(j), k, int(col_sums[j]), "col_sum"))


def verify_algebraic(a: BinaryMatrix, p: DsrgParams) -> VerifyReport:
    """Check ``A^2 = tI + lam*A + mu*(J - I - A)`` and all degrees equal ``k``."""
    _check_input(a, p)
    col = _Collector()
    _degree_failures(col, a.row_sums(), a.col_sums(), p.k)
    sq = mul(a, a).entries
    dense = a.to_array().astype(np.int64)
    expected = np.where(dense == 1, p.lam, p.mu)
    np.fill_diagonal(expected, p.t)
    bad_i, bad_j = np.nonzero(sq != expected)
    for i, j in zip(bad_i, bad_j):
        col.add(Failure(int(i), int(j), int(expected[i, j]), int(sq[i, j])))
    return col.report("algebraic-full")


def verify_combinatorial(a: BinaryMatrix, p: DsrgParams) -> VerifyReport:
    """Count 2-paths x -> w -> y by neighbourhood intersection."""
    _check_input(a, p)
    v = p.v
    dense = a.to_array()
    out_nb = [frozenset(np.flatnonzero(dense[x]).tolist()) for x in range(v)]
    in_nb = [frozenset(np.flatnonzero(dense[:, y]).tolist()) for y in range(v)]
    col = _Collector()
    _degree_failures(
        col,
        np.array([len(s) for s in out_nb]),
        np.array([len(s) for s in in_nb]),
        p.k,
    )
    for x in range(v):
        ox = out_nb[x]
        for y in range(v):
            paths = len(ox & in_nb[y])
            if x == y:
                want = p.t
            elif y in ox:
                want = p.lam
            else:
                want = p.mu
            if paths != want:
                col.add(Failure(x, y, want, paths))
    return col.report("combinatorial-full")


# SplitMix64 constants (golden-ratio increment and the two mixing multipliers).
_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MUL2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, counters: np.ndarray) -> np.ndarray:
    """Counter-based SplitMix64: output ``i`` depends only on ``(seed, i)``.

    ``z = seed + (i + 1) * 0x9E3779B97F4A7C15`` followed by the standard
    finaliser ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31`` (all arithmetic mod 2**64).
    """
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2**64) + (counters.astype(np.uint64) + np.uint64(1)) * _SM_GAMMA
        z = (z ^ (z >> np.uint64(30))) * _SM_MUL1
        z = (z ^ (z >> np.uint64(27))) * _SM_MUL2
        return z ^ (z >> np.uint64(31))


def sample_pairs(v: int, samples: int, rng_seed: int) -> np.ndarray:
    """Uniform (i, j) pairs in ``[0, v)^2`` drawn from the SplitMix64 stream.

    Raw words at or above the largest multiple of ``v`` are rejected so the
    reduction mod ``v`` is exactly uniform. Consecutive accepted words give
    ``i`` then ``j``.
    """
    need = 2 * samples
    limit = 2**64 - (2**64 % v)
    accepted: list[np.ndarray] = []
    have, counter = 0, 0
    while have < need:
        batch = max(1024, need - have + 64)
        z = splitmix64(rng_seed, np.arange(counter, counter + batch, dtype=np.uint64))
        counter += batch
        if limit < 2**64:
            z = z[z < np.uint64(limit)]
        accepted.append(z % np.uint64(v))
        have += len(accepted[-1])
    flat = np.concatenate(accepted)[:need].astype(np.int64) if need else np.empty(0, np.int64)
    return flat.reshape(samples, 2)


def verify_sampled(
    a: BinaryMatrix,
    p: DsrgParams,
    samples: int,
    rng_seed: int = 0,
    pairs: Iterable[tuple[int, int]] | None = None,
) -> VerifyReport:
    """Exact degree checks plus ``A^2 + sA = tJ`` on sampled entries.

    ``pairs`` overrides the random draw with an explicit list of entries
    (pass every pair to make the check exhaustive).
    """
    if p.mu != p.t:
        raise UnsupportedParametersError("sampled verification requires mu == t")
    if a.rows != a.cols or a.rows != p.v:
        raise DimensionError(f"expected a square matrix of order {p.v}, got {a.rows}x{a.cols}")
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    col = _Collector()
    _degree_failures(col, a.row_sums(), a.col_sums(), p.k)
    if pairs is not None:
        idx = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    else:
        idx = sample_pairs(p.v, samples, rng_seed)
    if len(idx):
        at = a.transpose().words
        s, t = p.s, p.t
        for b0 in range(0, len(idx), 8192):
            chunk = idx[b0 : b0 + 8192]
            i, j = chunk[:, 0], chunk[:, 1]
            sq = np.bitwise_count(a.words[i] & at[j]).sum(axis=1, dtype=np.int64)
            bit = (a.words[i, j // WORD_BITS] >> (WORD_BITS - 1 - j % WORD_BITS).astype(np.uint64)) & np.uint64(1)
            got = sq + s * bit.astype(np.int64)
            for n in np.flatnonzero(got != t):
                col.add(Failure(int(i[n]), int(j[n]), t, int(got[n])))
    return col.report("sampled", samples_checked=len(idx))


class Violation(NamedTuple):
    code: str
    message: str
    tag: str  # "hard" (algebraically forced) or "empirical"


def precheck_family_feasibility(p: DsrgParams) -> list[Violation]:
    """Cheap necessary conditions for a seed (A1, B1, C1) to exist.

    All four checks are forced once the block-form equations and the
    blockiness conditions are imposed:

    * ``mu == t`` and ``s = t - lam > 0`` are required by the construction;
    * rows of B1 carry ``2t`` ones, so the row sums of ``(A1 + sI) B1 = tJ``
      give ``(k + s) * 2t = 4t^2``, i.e. ``k = t + lam``;
    * column sums of B1 equal ``k`` and every row puts its ones in exactly
      one half, so ``k`` rows choose the left half and ``k`` the right one,
      i.e. ``v = 2k``.
    """
    out: list[Violation] = []
    if p.mu != p.t:
        out.append(Violation("mu_ne_t", f"mu={p.mu} differs from t={p.t}", "hard"))
    if p.s <= 0:
        out.append(Violation("s_nonpositive", f"s = t - lambda = {p.s} must be positive", "hard"))
    if p.k != p.t + p.lam:
        out.append(
            Violation("k_ne_t_plus_lambda", f"k={p.k} differs from t+lambda={p.t + p.lam}", "hard")
        )
    if p.v != 2 * p.k:
        out.append(Violation("v_ne_2k", f"v={p.v} differs from 2k={2 * p.k}", "hard"))
    return out
