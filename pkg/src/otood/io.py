"""Feature-file and CSV formats.

Binary feature files carry the header ``FEAT`` + three little-endian
uint32s (version=1, row count, dimension) followed by row-major float32
payload. Files with a ``.csv`` extension are instead parsed as headerless
comma-separated rows. Score files are CSV with the header
``index,score,converged``; label files hold one ``0`` or ``1`` per line
(1 = OOD).
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .exceptions import DataError, FormatError
from .scoring import ScoredBatch
from .validation import check_features

MAGIC = b"FEAT"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_features(path, features) -> None:
    """Write a binary feature file (rows are cast to float32)."""
    arr = np.ascontiguousarray(np.asarray(features, dtype=np.float32))
    if arr.ndim != 2:
        raise DataError(f"features must be 2-D, got ndim={arr.ndim}")
    if not np.isfinite(arr).all():
        raise DataError("features contain non-finite values")
    n, d = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, d))
        fh.write(arr.tobytes(order="C"))


def _read_binary(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: too short for a feature-file header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}, expected {VERSION}")
    expected = _HEADER.size + n * d * 4
    if len(raw) != expected:
        kind = "truncated" if len(raw) < expected else "trailing bytes in"
        raise FormatError(f"{path}: {kind} payload ({len(raw)} bytes, expected {expected})")
    payload = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return payload.reshape(n, d).astype(np.float64)


def _read_csv_features(path) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"{path}: unparseable CSV feature file: {exc}") from None
    if arr.size == 0:
        raise FormatError(f"{path}: CSV feature file is empty")
    # match the float32 storage of the binary format
    return arr.astype(np.float32).astype(np.float64)


def read_features(path, normalize: bool = True) -> np.ndarray:
    """Load features from a binary or ``.csv`` file as float64 rows.

    With ``normalize`` each row is rescaled to unit norm (zero rows are a
    data error); otherwise rows must already be unit-norm.
    """
    if str(path).endswith(".csv"):
        arr = _read_csv_features(path)
    else:
        arr = _read_binary(path)
    try:
        return check_features(arr, normalize=normalize, name=f"{path}")
    except DataError:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise DataError(f"{path}: {exc}") from exc


def write_scores(path, batch: ScoredBatch) -> None:
    """Write scores as CSV rows ``index,score,converged`` in input order."""
    _write_score_rows(path, batch.scores, batch.row_converged)


def _write_score_rows(path_or_file, scores, row_converged) -> None:
    scores = np.asarray(scores, dtype=np.float64)
    flags = np.asarray(row_converged, dtype=bool)

    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(["index", "score", "converged"])
        for i, (s, ok) in enumerate(zip(scores, flags)):
            writer.writerow([i, f"{s:.6f}", "true" if ok else "false"])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


def read_scores(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a score CSV back; returns (scores, converged flags)."""
    scores = []
    flags = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "score", "converged"]:
            raise FormatError(f"{path}: unexpected score header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                scores.append(float(row[1]))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad score {row[1]!r}") from None
            if row[2] not in ("true", "false"):
                raise FormatError(f"{path}:{lineno}: bad converged flag {row[2]!r}")
            flags.append(row[2] == "true")
    return np.asarray(scores, dtype=np.float64), np.asarray(flags, dtype=bool)


def read_labels(path) -> np.ndarray:
    """Read a label file: one 0 (ID) or 1 (OOD) per line."""
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text not in ("0", "1"):
                raise FormatError(f"{path}:{lineno}: label must be 0 or 1, got {text!r}")
            labels.append(int(text))
    if not labels:
        raise FormatError(f"{path}: label file is empty")
    return np.asarray(labels, dtype=np.int64)


def write_labels(path, labels) -> None:
    arr = np.asarray(labels, dtype=np.int64)
    with open(path, "w") as fh:
        for value in arr:
            fh.write(f"{int(value)}\n")
