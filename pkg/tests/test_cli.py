from __future__ import annotations

import json
import subprocess
import sys

from dsrgkron import catalog
from dsrgkron.cli import (
    EXIT_EXHAUSTED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_PRECHECK,
    EXIT_VERIFY_FAILED,
    main,
)
from dsrgkron.matcore import BinaryMatrix
from dsrgkron.fileio import manifest_path, read_manifest, read_matrix, sha256_file, write_matrix


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# --- params ------------------------------------------------------------------


def test_params_examples(capsys):
    assert run(capsys, "params", 6, 3, 2, 1, "--n", 2)[:2] == (0, "28 7 2 1 2\n")
    assert run(capsys, "params", 24, 12, 7, 5, "--n", 2)[:2] == (0, "104 26 7 5 7\n")
    assert run(capsys, "params", 6, 3, 2, 1, "--n", 1)[1] == "6 3 2 1 2\n"
    code, out, _ = run(capsys, "params", "--family", 6, "--n", 1, 2)
    assert out == "16 8 5 3 5\n72 18 5 3 5\n"


def test_params_rejects_t_le_lambda(capsys):
    code, out, err = run(capsys, "params", 6, 3, 2, 2, "--n", 2)
    assert code == EXIT_PRECHECK and "lambda" in err and out == ""
    assert run(capsys, "params", 6, 3, 2, "--n", 2)[0] == EXIT_INPUT_ERROR


# --- search ------------------------------------------------------------------


def test_search_seed_and_pair_pipeline(tmp_path, capsys):
    a1 = tmp_path / "a1.m"
    code, out, _ = run(capsys, "search-seed", 6, 3, 2, 1, 2, "--out", a1)
    assert code == EXIT_OK
    man = read_manifest(manifest_path(a1))
    assert man["params"] == "6 3 2 1 2" and man["output.a1.sha256"] == sha256_file(a1)
    assert run(capsys, "verify", "--matrix", a1, 6, 3, 2, 1, 2)[0] == EXIT_OK

    b1, c1 = tmp_path / "b1.m", tmp_path / "c1.m"
    code, out, _ = run(capsys, "search-pair", "--seed", a1, 2, 1, "--out-b", b1, "--out-c", c1)
    assert code == EXIT_OK
    assert read_matrix(b1).shape == (6, 8) and read_matrix(c1).shape == (8, 6)
    assert read_manifest(manifest_path(b1))["input.a1.sha256"] == sha256_file(a1)
    assert run(capsys, "verify-pair", 2, 1, "--seed", a1, "--b", b1, "--c", c1)[0] == EXIT_OK


def test_search_exit_codes(tmp_path, capsys):
    out = tmp_path / "a.m"
    assert run(capsys, "search-seed", 8, 4, 3, 1, 3, "--out", out, "--max-nodes", 0)[0] == EXIT_EXHAUSTED
    assert run(capsys, "search-seed", 6, 3, 3, 3, 3, "--out", out)[0] == EXIT_PRECHECK
    assert not out.exists()


def test_search_pair_precheck_and_bad_seed(tmp_path, capsys):
    spec = catalog.load_fixture(1)
    a1 = write_matrix(tmp_path / "a1.txt", spec.a1)
    # t = 3 with this 6x6 A1 breaks k = t + lambda and the A1 contract
    code, _, err = run(capsys, "search-pair", "--seed", a1, 3, 0, "--out-b", tmp_path / "b", "--out-c", tmp_path / "c")
    assert code == EXIT_INPUT_ERROR and "not a dsrg" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n01\n1?\n")
    code, _, err = run(capsys, "search-pair", "--seed", bad, 1, 0, "--out-b", tmp_path / "b", "--out-c", tmp_path / "c")
    assert code == EXIT_INPUT_ERROR and "line 3, column 2" in err


def test_verify_pair_reports_blockiness(tmp_path, capsys):
    spec = catalog.load_fixture(1)
    a1 = write_matrix(tmp_path / "a1.txt", spec.a1)
    b1 = write_matrix(tmp_path / "b1.txt", spec.b1.with_flipped(0, 0))
    c1 = write_matrix(tmp_path / "c1.txt", spec.c1)
    code, out, _ = run(capsys, "verify-pair", 2, 1, "--seed", a1, "--b", b1, "--c", c1)
    assert code == EXIT_VERIFY_FAILED
    assert "FAIL blockiness" in out
    assert json.loads(out.strip().splitlines()[-1])["checks"]["blockiness"] is False


# --- build / verify ----------------------------------------------------------


def test_build_t2_orders_and_manifest(tmp_path, capsys):
    code, out, _ = run(capsys, "build", "--family", 1, "--n", 4, "--out", tmp_path / "fam")
    assert code == EXIT_OK
    orders = [read_matrix(tmp_path / "fam" / f"A_{n}.txt").rows for n in range(1, 5)]
    assert orders == [6, 28, 120, 496]
    man = read_manifest(tmp_path / "fam" / "build.manifest")
    assert man["term.2.params"] == "28 7 2 1 2"
    assert man["output.A_4.sha256"] == sha256_file(tmp_path / "fam" / "A_4.txt")


def test_build_n1_and_explicit_files(tmp_path, capsys):
    spec = catalog.load_fixture(2)
    paths = [write_matrix(tmp_path / f"{x}.txt", m) for x, m in (("a1", spec.a1), ("b1", spec.b1), ("c1", spec.c1))]
    code, _, _ = run(capsys, "build", 3, 1, "--seed", paths[0], "--b", paths[1], "--c", paths[2],
                     "--n", 1, "--out", tmp_path / "o")
    assert code == EXIT_OK
    assert read_matrix(tmp_path / "o" / "A_1.txt") == spec.a1
    man = read_manifest(tmp_path / "o" / "build.manifest")
    assert man["input.a1.sha256"] == sha256_file(paths[0])


def test_build_rejects_broken_seed(tmp_path, capsys):
    spec = catalog.load_fixture(1)
    a1 = write_matrix(tmp_path / "a1.txt", spec.a1)
    b1 = write_matrix(tmp_path / "b1.txt", spec.b1)
    c = spec.c1.to_array()
    # move a one within the top half of column 0; blockiness still holds
    top = c[: 2 * spec.t, 0]
    c[int(top.argmax()), 0], c[int(top.argmin()), 0] = 0, 1
    c1 = write_matrix(tmp_path / "c1.txt", BinaryMatrix.from_array(c))
    code, _, err = run(capsys, "build", 2, 1, "--seed", a1, "--b", b1, "--c", c1, "--n", 2, "--out", tmp_path / "o")
    assert code == EXIT_INPUT_ERROR and "seed contract violated" in err


def test_verify_modes(tmp_path, capsys):
    run(capsys, "build", "--family", 1, "--n", 2, "--out", tmp_path)
    a2 = tmp_path / "A_2.txt"
    code, out, _ = run(capsys, "verify", "--matrix", a2, 28, 7, 2, 1, 2)
    assert code == EXIT_OK and json.loads(out.splitlines()[-1])["ok"] is True
    code, out, _ = run(capsys, "verify", "--matrix", a2, 28, 7, 2, 0, 2, "--mode", "combinatorial")
    assert code == EXIT_VERIFY_FAILED and "expected 0, got 1" in out
    r1 = run(capsys, "verify", "--matrix", a2, 28, 7, 2, 1, 2, "--mode", "sampled", "--samples", 500, "--rng-seed", 3)
    r2 = run(capsys, "verify", "--matrix", a2, 28, 7, 2, 1, 2, "--mode", "sampled", "--samples", 500, "--rng-seed", 3)
    assert r1 == r2 and r1[0] == EXIT_OK
    code, _, err = run(capsys, "verify", "--matrix", a2, 28, 7, 2, 1, 1, "--mode", "sampled")
    assert code == EXIT_INPUT_ERROR and "mu == t" in err
    report = tmp_path / "rep.json"
    run(capsys, "verify", "--matrix", a2, 28, 7, 2, 1, 2, "--report", report)
    assert json.loads(report.read_text())["mode"] == "algebraic-full"
    assert read_manifest(manifest_path(report))["input.matrix.sha256"] == sha256_file(a2)


def test_convert(tmp_path, capsys):
    spec = catalog.load_fixture(1)
    src = write_matrix(tmp_path / "a.txt", spec.c1)
    assert run(capsys, "convert", src, tmp_path / "a.bin")[0] == EXIT_OK
    assert run(capsys, "convert", tmp_path / "a.bin", tmp_path / "b.txt")[0] == EXIT_OK
    assert read_matrix(tmp_path / "a.bin") == read_matrix(tmp_path / "b.txt") == spec.c1
    assert (tmp_path / "b.txt").read_bytes().endswith(src.read_bytes().split(b"\n", 1)[1])


def test_missing_file_is_input_error(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--matrix", tmp_path / "nope", 6, 3, 2, 1, 2)
    assert code == EXIT_INPUT_ERROR and "cannot read" in err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dsrgkron.cli", "params", "8", "4", "3", "1", "--n", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "40 10 3 1 3\n"
    res = subprocess.run([sys.executable, "-m", "dsrgkron.cli", "--help"], capture_output=True, text=True)
    assert "exit status" in res.stdout
