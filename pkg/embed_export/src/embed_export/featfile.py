"""Writer for the binary feature-file format consumed by the otood CLI.

Layout, little-endian: magic ``FEAT``, uint32 version (1), uint32 row
count, uint32 dimension, then row-major float32 payload. Implemented
against the wire format specification; this package deliberately does
not import the consumer.
"""

from __future__ import annotations

import hashlib
import os
import struct

import numpy as np

MAGIC = b"FEAT"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


class FeatureFileError(Exception):
    exit_code = 2


def payload_bytes(rows: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise FeatureFileError(f"expected a 2-D row matrix, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise FeatureFileError("refusing to write non-finite values")
    return arr.tobytes(order="C")


def write_atomic(path, rows: np.ndarray) -> str:
    """Write header + payload via a temp file and rename; returns payload sha256."""
    payload = payload_bytes(rows)
    n, d = rows.shape
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, d))
        fh.write(payload)
    os.replace(tmp, path)
    return hashlib.sha256(payload).hexdigest()


def read_header(path) -> tuple[int, int, int]:
    """Return (version, rows, dim) of an existing feature file."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise FeatureFileError(f"{path}: too short for a feature-file header")
    magic, version, n, d = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    return version, n, d


def payload_sha256(path) -> str:
    with open(path, "rb") as fh:
        fh.seek(_HEADER.size)
        return hashlib.sha256(fh.read()).hexdigest()
