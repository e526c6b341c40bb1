"""Command-line front end: ``dsrgkron <verb> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__, catalog
from . import matcore as mc
from .dsrg import DsrgParams, verify_algebraic, verify_combinatorial, verify_sampled
from .errors import (
    CapacityError,
    DimensionError,
    DsrgError,
    LoopError,
    MatrixFormatError,
    SeedContractError,
    UnsupportedParametersError,
)
from .family import (
    FULL_PRODUCT_LIMIT,
    FamilySpec,
    block_system,
    blockiness_failures,
    build_P,
    check_structure,
    family_params,
    iter_family,
)
from .fileio import manifest_path, read_matrix, sha256_file, write_manifest, write_matrix
from .search import (
    PairSearchProblem,
    PrecheckFailed,
    SearchBudget,
    SearchExhausted,
    SearchInfeasible,
    search_pair,
    search_seed,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3
EXIT_PRECHECK = 4
EXIT_EXHAUSTED = 5

EXIT_HELP = """exit status:
  0  ok
  1  verification failed
  2  input error (bad arguments, unreadable or invalid input files)
  3  infeasible (search proved that no solution exists)
  4  infeasible-precheck (parameters fail a necessary condition)
  5  exhausted (search budget ran out)

environment:
  DSRGKRON_THREADS  default worker count for matrix products
"""

SAMPLED_DEFAULT = 100_000


class InputError(DsrgError):
    pass


def _out(msg: str = "") -> None:
    print(msg, flush=True)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr, flush=True)


def _base_manifest(args, command: str) -> dict:
    entries = {"command": command, "tool_version": __version__}
    for key, val in sorted(vars(args).items()):
        if key in ("func", "command"):
            continue
        entries[f"arg.{key}"] = " ".join(map(str, val)) if isinstance(val, list) else val
    return entries


def _finish_manifest(entries: dict, inputs: dict, outputs: dict, started: float, manifest_file) -> None:
    for name, path in inputs.items():
        entries[f"input.{name}.path"] = str(path)
        entries[f"input.{name}.sha256"] = sha256_file(path)
    for name, path in outputs.items():
        entries[f"output.{name}.path"] = str(path)
        entries[f"output.{name}.sha256"] = sha256_file(path)
    entries["wall_seconds"] = f"{time.monotonic() - started:.6f}"
    write_manifest(manifest_file, entries)


def _budget(args) -> SearchBudget:
    return SearchBudget(
        max_nodes=args.max_nodes,
        max_wall_seconds=args.max_seconds,
        rng_seed=args.rng_seed,
        deterministic=args.deterministic,
    )


def _load(path) -> mc.BinaryMatrix:
    try:
        return read_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except MatrixFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _seed_params_from(a1: mc.BinaryMatrix, t: int, lam: int) -> DsrgParams:
    if a1.rows != a1.cols:
        raise InputError(f"A1 must be square, got {a1.rows}x{a1.cols}")
    sums = a1.row_sums()
    try:
        return DsrgParams(a1.rows, int(sums[0]), t, lam, t)
    except ValueError as exc:
        raise InputError(f"A1 does not give valid parameters: {exc}") from exc


def _definition_clause(a1, p: DsrgParams) -> str | None:
    """Name the first failing adjacency-matrix clause, or None when A1 is fine."""
    try:
        rep = verify_algebraic(a1, p)
    except LoopError as exc:
        return f"no loops: {exc}"
    except DimensionError as exc:
        return str(exc)
    if rep.ok:
        return None
    f = rep.failures[0]
    if f.kind in ("row_sum", "col_sum"):
        return f"AJ = JA = kJ fails ({f.kind.replace('_', ' ')} at index {max(f.i, f.j)} is {f.got}, k={p.k})"
    return (
        f"A^2 = tI + lambda*A + mu*(J - I - A) fails at ({f.i}, {f.j}): "
        f"got {f.got}, expected {f.expected}"
    )


def _params_arg(args, n_values: int) -> DsrgParams:
    if args.family is not None:
        return catalog.row(args.family).seed
    vals = args.params
    if len(vals) == 4 and n_values == 5:
        vals = vals + [vals[2]]
    if len(vals) != n_values:
        raise InputError(f"expected {n_values} parameters, got {len(vals)}")
    try:
        return DsrgParams.from_seq(vals)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


# --------------------------------------------------------------------------


def cmd_params(args) -> int:
    vals = args.params
    if args.family is not None:
        p = catalog.row(args.family).seed
    else:
        if len(vals) not in (4, 5):
            raise InputError("params takes v k t lambda (mu is t)")
        if len(vals) == 5 and vals[4] != vals[2]:
            _err("only mu = t families are supported")
            return EXIT_PRECHECK
        if vals[2] <= vals[3]:
            _err(f"t must exceed lambda (t={vals[2]}, lambda={vals[3]})")
            return EXIT_PRECHECK
        try:
            p = DsrgParams(vals[0], vals[1], vals[2], vals[3], vals[2])
        except (TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    if p.s <= 0:
        _err(f"t must exceed lambda (t={p.t}, lambda={p.lam})")
        return EXIT_PRECHECK
    for n in args.n:
        if n < 1:
            raise InputError("n must be at least 1")
        _out(str(family_params(p, n)))
    return EXIT_OK


def cmd_search_seed(args) -> int:
    started = time.monotonic()
    p = _params_arg(args, 5)
    manifest = _base_manifest(args, "search-seed")
    manifest["params"] = str(p)
    manifest["rng_seed"] = args.rng_seed
    try:
        sol = search_seed(p, _budget(args))
    except PrecheckFailed as exc:
        _err(f"infeasible-precheck: {exc}")
        return EXIT_PRECHECK
    except SearchInfeasible as exc:
        _err(f"infeasible after {exc.stats.nodes} nodes: {exc}")
        return EXIT_INFEASIBLE
    except SearchExhausted as exc:
        _err(f"exhausted: {exc}")
        return EXIT_EXHAUSTED
    except UnsupportedParametersError as exc:
        raise InputError(str(exc)) from exc
    out = Path(args.out)
    write_matrix(out, sol.a1, args.format, [f"dsrg({p}) adjacency matrix"])
    for key, val in sol.stats.as_dict().items():
        if key != "wall_seconds":
            manifest[f"search.{key}"] = val
    _finish_manifest(manifest, {}, {"a1": out}, started, manifest_path(out))
    _out(f"found dsrg({p}) after {sol.stats.nodes} nodes -> {out}")
    return EXIT_OK


def cmd_search_pair(args) -> int:
    started = time.monotonic()
    a1 = _load(args.seed)
    p = _seed_params_from(a1, args.t, args.lam)
    clause = _definition_clause(a1, p)
    if clause is not None:
        raise InputError(f"{args.seed} is not a dsrg({p}): {clause}")
    manifest = _base_manifest(args, "search-pair")
    manifest["params"] = str(p)
    manifest["rng_seed"] = args.rng_seed
    try:
        problem = PairSearchProblem(a1, p, force=args.force)
        sol = search_pair(problem, _budget(args))
    except PrecheckFailed as exc:
        _err(f"infeasible-precheck: {exc}")
        return EXIT_PRECHECK
    except SearchInfeasible as exc:
        _err(f"infeasible after {exc.stats.nodes} nodes: {exc}")
        return EXIT_INFEASIBLE
    except SearchExhausted as exc:
        _err(f"exhausted: {exc}")
        return EXIT_EXHAUSTED
    except UnsupportedParametersError as exc:
        raise InputError(str(exc)) from exc
    out_b, out_c = Path(args.out_b), Path(args.out_c)
    write_matrix(out_b, sol.b1, args.format, [f"B1 for dsrg({p})"])
    write_matrix(out_c, sol.c1, args.format, [f"C1 for dsrg({p})"])
    for key, val in sol.stats.as_dict().items():
        if key != "wall_seconds":
            manifest[f"search.{key}"] = val
    _finish_manifest(manifest, {"a1": args.seed}, {"b1": out_b, "c1": out_c}, started, manifest_path(out_b))
    _out(f"found B1 {sol.b1.rows}x{sol.b1.cols}, C1 {sol.c1.rows}x{sol.c1.cols} after {sol.stats.nodes} nodes")
    return EXIT_OK


def _load_triple(args):
    if args.seed is None and args.family is not None:
        try:
            spec = catalog.load_fixture(args.family)
        except FileNotFoundError as exc:
            raise InputError(str(exc)) from exc
        return spec.a1, spec.b1, spec.c1, spec.seed_params, {}
    if args.seed is None or args.b is None or args.c is None:
        raise InputError("need --seed, --b and --c (or --family with a bundled seed)")
    a1, b1, c1 = _load(args.seed), _load(args.b), _load(args.c)
    if args.t is None or args.lam is None:
        raise InputError("t and lambda are required with explicit seed files")
    p = _seed_params_from(a1, args.t, args.lam)
    return a1, b1, c1, p, {"a1": args.seed, "b1": args.b, "c1": args.c}


def cmd_verify_pair(args) -> int:
    a1, b1, c1, p, _ = _load_triple(args)
    lines, ok = [], True
    clause = _definition_clause(a1, p)
    lines.append(("A1 is a dsrg(%s)" % p, clause is None, clause or ""))
    t = p.t
    shapes_ok = b1.shape == (p.v, 4 * t) and c1.shape == (4 * t, p.v)
    lines.append(("dimensions", shapes_ok, f"B1 {b1.shape}, C1 {c1.shape}"))
    if shapes_ok:
        blk = blockiness_failures(b1, c1, t)
        lines.append(("blockiness", not blk, "; ".join(blk)))
        rep = block_system(a1, b1, c1, build_P(1, t), t, p.s)
        for name, passed in rep.details.items():
            detail = next((f"first bad entry ({f.i}, {f.j}) = {f.got}" for f in rep.failures if f.kind == name), "")
            lines.append((name, passed, detail))
        for name, got, want in (
            ("B row sums = 2t", b1.row_sums(), 2 * t),
            ("B column sums = k", b1.col_sums(), p.k),
            ("C row sums = k", c1.row_sums(), p.k),
            ("C column sums = 2t", c1.col_sums(), 2 * t),
        ):
            lines.append((name, bool((got == want).all()), ""))
    for name, passed, detail in lines:
        ok &= passed
        _out(f"{'ok  ' if passed else 'FAIL'} {name}" + (f"  [{detail}]" if detail and not passed else ""))
    _out(json.dumps({"ok": ok, "checks": {n: bool(pa) for n, pa, _ in lines}}))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _verify_term(a, params, mode: str, samples: int, rng_seed: int):
    if mode == "auto":
        mode = "full" if params.v <= FULL_PRODUCT_LIMIT else "sampled"
    if mode == "full":
        return verify_algebraic(a, params)
    if mode == "sampled":
        return verify_sampled(a, params, samples, rng_seed)
    raise ValueError(mode)


def cmd_build(args) -> int:
    started = time.monotonic()
    a1, b1, c1, p, inputs = _load_triple(args)
    try:
        spec = FamilySpec(p, a1, b1, c1)
    except SeedContractError as exc:
        raise InputError(str(exc)) from exc
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = _base_manifest(args, "build")
    manifest["seed_params"] = str(p)
    manifest["rng_seed"] = args.rng_seed
    outputs = {}
    ok = True
    suffix = ".bin" if args.format == "binary" else ".txt"
    try:
        for term in iter_family(spec, args.n):
            path = outdir / f"A_{term.n}{suffix}"
            write_matrix(path, term.a_n, args.format, [f"dsrg({term.params_n}) family term n={term.n}"])
            outputs[f"A_{term.n}"] = path
            manifest[f"term.{term.n}.params"] = str(term.params_n)
            status = []
            if args.verify != "structural":
                rep = _verify_term(term.a_n, term.params_n, args.verify, args.samples, args.rng_seed)
                status.append(rep.summary())
                ok &= rep.ok
            if term.n < args.n:
                srep = check_structure(spec, term.n)
                status.append("structural " + ("OK" if srep.ok else "FAILED"))
                ok &= srep.ok
            manifest[f"term.{term.n}.verify"] = "; ".join(status)
            _out(f"A_{term.n}: dsrg({term.params_n})  " + "; ".join(status))
    except CapacityError as exc:
        _err(f"capacity exceeded at n={len(outputs) + 1}: {exc}")
        return EXIT_INPUT_ERROR
    _finish_manifest(manifest, inputs, outputs, started, outdir / "build.manifest")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    started = time.monotonic()
    a = _load(args.matrix)
    p = _params_arg(args, 5)
    mode = args.mode
    if mode == "auto":
        mode = "algebraic" if p.v <= FULL_PRODUCT_LIMIT else "sampled"
    try:
        if mode == "algebraic":
            rep = verify_algebraic(a, p)
        elif mode == "combinatorial":
            rep = verify_combinatorial(a, p)
        else:
            rep = verify_sampled(a, p, args.samples, args.rng_seed)
    except UnsupportedParametersError as exc:
        _err(str(exc))
        return EXIT_INPUT_ERROR
    except (DimensionError, LoopError) as exc:
        raise InputError(str(exc)) from exc
    _out(f"dsrg({p}): {rep.summary()}")
    for f in rep.failures:
        _out(f"  {f.kind} ({f.i}, {f.j}): expected {f.expected}, got {f.got}")
    payload = rep.to_dict()
    payload["params"] = list(p.as_tuple())
    _out(json.dumps(payload))
    if args.report:
        out = Path(args.report)
        out.write_text(json.dumps(payload, indent=2) + "\n")
        manifest = _base_manifest(args, "verify")
        manifest["rng_seed"] = args.rng_seed
        _finish_manifest(manifest, {"matrix": args.matrix}, {"report": out}, started, manifest_path(out))
    return EXIT_OK if rep.ok else EXIT_VERIFY_FAILED


def cmd_convert(args) -> int:
    started = time.monotonic()
    m = _load(args.input)
    out = Path(args.output)
    fmt = args.to
    try:
        write_matrix(out, m, fmt)
    except MatrixFormatError as exc:
        raise InputError(str(exc)) from exc
    manifest = _base_manifest(args, "convert")
    _finish_manifest(manifest, {"input": args.input}, {"output": out}, started, manifest_path(out))
    _out(f"{args.input} -> {out} ({m.rows}x{m.cols})")
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-nodes", type=int, default=10_000_000)
    p.add_argument("--max-seconds", type=float, default=300.0)
    p.add_argument("--rng-seed", type=int, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--deterministic", dest="deterministic", action="store_true", default=True,
                   help="fixed exploration order (default)")
    g.add_argument("--randomized", dest="deterministic", action="store_false",
                   help="shuffled value order with geometric restarts")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "binary"), default=None,
                   help="output matrix format (default: by file suffix, .bin is binary)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsrgkron",
        description="Build and verify Kronecker-recurrence families of directed strongly regular graphs.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for matrix products")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_, epilog=EXIT_HELP,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(func=func)
        return sp

    sp = add("params", cmd_params, "print family parameters for seed v k t lambda")
    sp.add_argument("params", type=int, nargs="*", metavar="V K T LAMBDA")
    sp.add_argument("--family", type=int, help="use a catalog row (1-11) as the seed")
    sp.add_argument("--n", type=int, nargs="+", default=[2])

    sp = add("search-seed", cmd_search_seed, "search for a seed adjacency matrix A1")
    sp.add_argument("params", type=int, nargs="*", metavar="V K T LAMBDA [MU]")
    sp.add_argument("--family", type=int)
    sp.add_argument("--out", required=True)
    _add_budget(sp)
    _add_format(sp)

    sp = add("search-pair", cmd_search_pair, "search for B1, C1 given A1")
    sp.add_argument("--seed", required=True, help="A1 matrix file")
    sp.add_argument("t", type=int)
    sp.add_argument("lam", type=int, metavar="lambda")
    sp.add_argument("--out-b", required=True)
    sp.add_argument("--out-c", required=True)
    sp.add_argument("--force", action="store_true", help="run even when prechecks fail")
    _add_budget(sp)
    _add_format(sp)

    for name, func, help_ in (
        ("verify-pair", cmd_verify_pair, "check a seed triple against every seed condition"),
        ("build", cmd_build, "grow a family from a seed triple"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("t", type=int, nargs="?")
        sp.add_argument("lam", type=int, nargs="?", metavar="lambda")
        sp.add_argument("--seed", help="A1 matrix file")
        sp.add_argument("--b", help="B1 matrix file")
        sp.add_argument("--c", help="C1 matrix file")
        sp.add_argument("--family", type=int, help="use the bundled seed of a catalog row")
        if name == "build":
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--out", required=True, help="output directory")
            sp.add_argument("--verify", choices=("auto", "full", "sampled", "structural"), default="auto")
            sp.add_argument("--samples", type=int, default=SAMPLED_DEFAULT)
            sp.add_argument("--rng-seed", type=int, default=0)
            _add_format(sp)

    sp = add("verify", cmd_verify, "verify a matrix file against dsrg parameters")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("params", type=int, nargs="*", metavar="V K T LAMBDA MU")
    sp.add_argument("--family", type=int)
    sp.add_argument("--mode", choices=("auto", "algebraic", "combinatorial", "sampled"), default="auto")
    sp.add_argument("--samples", type=int, default=SAMPLED_DEFAULT)
    sp.add_argument("--rng-seed", type=int, default=0)
    sp.add_argument("--report", help="also write the JSON report here (with manifest)")

    sp = add("convert", cmd_convert, "convert between text and binary matrix files")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--to", choices=("text", "binary"), default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ[mc.THREADS_ENV] = str(max(1, args.threads))
    try:
        return args.func(args)
    except InputError as exc:
        _err(str(exc))
        return EXIT_INPUT_ERROR
    except (SeedContractError, MatrixFormatError) as exc:
        _err(str(exc))
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
