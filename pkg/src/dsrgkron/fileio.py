"""
Matrix file formats and run manifests.

Text format::

    # optional comment lines
    3 3
    010
    001
    100

Binary format: the magic ``b"DSRGB1\\n"``, rows and cols as 8-byte
little-endian unsigned integers, then each row packed MSB-first into
``ceil(cols / 8)`` bytes with zero padding bits.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError
from .matcore import BinaryMatrix

MAGIC = b"DSRGB1\n"
TEXT_LIMIT_BYTES = 2 * 1024**3
BINARY_SUFFIXES = {".bin", ".dsrgb"}


def format_text(m: BinaryMatrix, comments: list[str] = ()) -> str:
    if m.rows * (m.cols + 1) > TEXT_LIMIT_BYTES:
        raise MatrixFormatError("matrix too large for the text format; use binary")
    lines = [f"# {c}" for c in comments]
    lines.append(f"{m.rows} {m.cols}")
    dense = m.to_array()
    table = np.frombuffer(b"01", dtype=np.uint8)
    for r in dense:
        lines.append(table[r].tobytes().decode("ascii"))
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> BinaryMatrix:
    lines = text.split("\n")
    if not text.endswith("\n"):
        raise MatrixFormatError("file must end with a newline", len(lines))
    lines = lines[:-1]
    n = 0
    while n < len(lines) and lines[n].startswith("#"):
        n += 1
    if n == len(lines):
        raise MatrixFormatError("missing 'rows cols' header", n + 1)
    header = lines[n].split(" ")
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise MatrixFormatError(f"bad header {lines[n]!r}, expected 'rows cols'", n + 1)
    rows, cols = int(header[0]), int(header[1])
    if rows < 1 or cols < 1:
        raise MatrixFormatError("dimensions must be positive", n + 1)
    body = lines[n + 1 :]
    if len(body) != rows:
        raise MatrixFormatError(f"expected {rows} matrix rows, found {len(body)}", n + 2 + min(rows, len(body)))
    arr = np.empty((rows, cols), dtype=np.uint8)
    for r, line in enumerate(body):
        lineno = n + 2 + r
        raw = np.frombuffer(line.encode("ascii", errors="replace"), dtype=np.uint8)
        bad = np.flatnonzero((raw != ord("0")) & (raw != ord("1")))
        if len(bad):
            c = int(bad[0])
            what = "trailing whitespace" if line[c:].strip() == "" else f"invalid character {line[c]!r}"
            raise MatrixFormatError(what, lineno, c + 1)
        if len(line) != cols:
            raise MatrixFormatError(f"row has {len(line)} entries, expected {cols}", lineno, min(len(line), cols) + 1)
        arr[r] = raw - ord("0")
    return BinaryMatrix.from_array(arr)


def to_binary(m: BinaryMatrix) -> bytes:
    nbytes = (m.cols + 7) // 8
    payload = m.words.astype(">u8").view(np.uint8).reshape(m.rows, -1)[:, :nbytes]
    return MAGIC + struct.pack("<QQ", m.rows, m.cols) + payload.tobytes()


def from_binary(data: bytes) -> BinaryMatrix:
    if not data.startswith(MAGIC):
        raise MatrixFormatError("missing DSRGB1 magic")
    head = len(MAGIC) + 16
    if len(data) < head:
        raise MatrixFormatError("truncated header")
    rows, cols = struct.unpack("<QQ", data[len(MAGIC) : head])
    if rows < 1 or cols < 1:
        raise MatrixFormatError("dimensions must be positive")
    nbytes = (cols + 7) // 8
    if len(data) - head != rows * nbytes:
        raise MatrixFormatError(f"payload has {len(data) - head} bytes, expected {rows * nbytes}")
    payload = np.frombuffer(data, dtype=np.uint8, offset=head).reshape(rows, nbytes)
    if cols % 8 and np.any(payload[:, -1] & np.uint8((1 << (8 - cols % 8)) - 1)):
        raise MatrixFormatError("nonzero padding bits")
    nwords = (cols + 63) // 64
    padded = np.zeros((rows, nwords * 8), dtype=np.uint8)
    padded[:, :nbytes] = payload
    return BinaryMatrix(int(rows), int(cols), padded.view(">u8").astype(np.uint64))


def is_binary_path(path) -> bool:
    return Path(path).suffix.lower() in BINARY_SUFFIXES


def read_matrix(path) -> BinaryMatrix:
    """Read either format; the magic bytes decide."""
    data = Path(path).read_bytes()
    if data.startswith(MAGIC):
        return from_binary(data)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        col = exc.start - (data.rfind(b"\n", 0, exc.start) + 1) + 1
        raise MatrixFormatError("non-ASCII byte", line, col) from exc
    return parse_text(text)


def write_matrix(path, m: BinaryMatrix, fmt: str | None = None, comments: list[str] = ()) -> Path:
    """Write ``m``; ``fmt`` is ``"text"`` or ``"binary"`` (default: by suffix)."""
    path = Path(path)
    if fmt is None:
        fmt = "binary" if is_binary_path(path) else "text"
    if fmt == "binary":
        path.write_bytes(to_binary(m))
    elif fmt == "text":
        path.write_text(format_text(m, comments), encoding="ascii", newline="\n")
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest")


def write_manifest(path, entries: dict) -> Path:
    """Flat ``key = value`` text, one entry per line, in insertion order."""
    lines = []
    for key, value in entries.items():
        sval = str(value)
        if "\n" in sval or "\n" in key or "=" in key:
            raise ValueError(f"manifest entry {key!r} is not flat")
        lines.append(f"{key} = {sval}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def read_manifest(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, value = line.partition(" = ")
        out[key] = value
    return out
