"""File formats: VPRD matrices, CSV score matrices, and P5 PGM images.

VPRD v1 layout (little-endian throughout):

    offset 0   magic          4 bytes  "VPRD"
    offset 4   version        u8       1
    offset 5   dtype          u8       1 (float32)
    offset 6   role           u8       0 = descriptors, 1 = scores
    offset 7   rows           u32
    offset 11  cols           u32
    offset 15  payload        rows*cols float32, row-major

For score matrices rows are queries and cols are reference places. Values
are stored as float32 but always handed to callers as float64, so
downstream accumulation does not depend on file precision.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import BadMagic, NonFiniteValue, TruncatedFile

MAGIC = b"VPRD"
VERSION = 1
DTYPE_F32 = 1
ROLE_DESCRIPTORS = 0
ROLE_SCORES = 1

_HEADER = struct.Struct("<4sBBBII")


def save_vprd(path, matrix, role: int) -> None:
    """Write a 2-D real matrix as a VPRD v1 file (float32 payload)."""
    if role not in (ROLE_DESCRIPTORS, ROLE_SCORES):
        raise ValueError(f"role must be 0 or 1, got {role}")
    arr = np.ascontiguousarray(matrix, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr.ravel()))[0])
        raise NonFiniteValue(f"non-finite value at element {bad}")
    header = _HEADER.pack(
        MAGIC, VERSION, DTYPE_F32, role, arr.shape[0], arr.shape[1]
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def load_vprd(path) -> tuple[np.ndarray, int]:
    """Read a VPRD v1 file.

    Returns:
        (matrix as float64, role byte)

    Raises BadMagic / TruncatedFile / NonFiniteValue; messages name the
    offending byte offset.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFile(
            f"{path}: header needs {_HEADER.size} bytes, file has {len(raw)}"
        )
    magic, version, dtype, role, rows, cols = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r} at byte 0")
    if version != VERSION:
        raise BadMagic(f"{path}: unsupported version {version} at byte 4")
    if dtype != DTYPE_F32:
        raise BadMagic(f"{path}: unsupported dtype code {dtype} at byte 5")
    if role not in (ROLE_DESCRIPTORS, ROLE_SCORES):
        raise BadMagic(f"{path}: unknown role {role} at byte 6")
    expected = rows * cols * 4
    body = raw[_HEADER.size:]
    if len(body) < expected:
        raise TruncatedFile(
            f"{path}: payload ends at byte {len(raw)}, "
            f"expected {_HEADER.size + expected} bytes"
        )
    data = np.frombuffer(body[:expected], dtype="<f4").reshape(rows, cols)
    if not np.all(np.isfinite(data)):
        bad = int(np.flatnonzero(~np.isfinite(data.ravel()))[0])
        raise NonFiniteValue(
            f"{path}: non-finite value at byte {_HEADER.size + bad * 4}"
        )
    return data.astype(np.float64), role


def load_score_csv(path) -> np.ndarray:
    """Score matrix from headerless CSV, one query per line."""
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise BadMagic(f"{path}: not a numeric CSV matrix ({exc})") from exc
    if not np.all(np.isfinite(data)):
        raise NonFiniteValue(f"{path}: non-finite value in CSV matrix")
    return data


def save_score_csv(path, matrix) -> None:
    arr = np.asarray(matrix, dtype=np.float64)
    with open(path, "w") as fh:
        for row in arr:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _pgm_tokens(raw: bytes):
    """Yield header tokens of a PGM, skipping whitespace and # comments."""
    i = 0
    while i < len(raw):
        ch = raw[i:i + 1]
        if ch.isspace():
            i += 1
            continue
        if ch == b"#":
            while i < len(raw) and raw[i:i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(raw) and not raw[j:j + 1].isspace():
            j += 1
        yield raw[i:j], j
        i = j


def load_pgm(path) -> np.ndarray:
    """Read an 8-bit binary (P5) PGM as a 2-D uint8 array."""
    raw = Path(path).read_bytes()
    tokens = _pgm_tokens(raw)
    try:
        magic, _ = next(tokens)
        if magic != b"P5":
            raise BadMagic(f"{path}: expected P5 magic, got {magic!r}")
        (w_tok, _), (h_tok, _), (m_tok, end) = (next(tokens) for _ in range(3))
        width, height, maxval = int(w_tok), int(h_tok), int(m_tok)
    except StopIteration:
        raise TruncatedFile(f"{path}: incomplete PGM header") from None
    except ValueError as exc:
        raise BadMagic(f"{path}: malformed PGM header ({exc})") from exc
    if maxval <= 0 or maxval > 255:
        raise BadMagic(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    body = raw[end + 1:]  # single whitespace byte after maxval
    n = width * height
    if len(body) < n:
        raise TruncatedFile(
            f"{path}: pixel data ends at byte {len(raw)}, expected {end + 1 + n}"
        )
    return np.frombuffer(body[:n], dtype=np.uint8).reshape(height, width)


def save_pgm(path, image) -> None:
    """Write a 2-D uint8 array as a binary (P5) PGM."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {arr.shape}")
    arr = arr.astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode())
        fh.write(arr.tobytes())
