"""Batch inference and feature-file export with a manifest sidecar.

Embeddings are L2-normalized float32 rows; the file write is atomic
(temp + rename) and a ``<out>.manifest`` sidecar records what was
exported plus the sha256 of the payload. Inference runs single-threaded
in eval mode so identical invocations produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from pathlib import Path

import numpy as np
import torch
from torchvision import transforms

from .datasets import load_images
from .encoders import build_encoder
from .featfile import read_header, write_atomic


class ExportError(Exception):
    exit_code = 2


@dataclass(frozen=True)
class ExportManifest:
    dataset: str
    split: str
    encoder: str
    dim: int
    rows: int
    output: str
    sha256: str

    def to_text(self) -> str:
        lines = [
            f"dataset={self.dataset}",
            f"split={self.split}",
            f"encoder={self.encoder}",
            f"dim={self.dim}",
            f"rows={self.rows}",
            f"output={self.output}",
            f"sha256={self.sha256}",
        ]
        return "\n".join(lines) + "\n"


def read_manifest(path) -> dict:
    entries = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            entries[key] = value
    return entries


def _batches(iterable, size):
    iterator = iter(iterable)
    while True:
        chunk = list(islice(iterator, size))
        if not chunk:
            return
        yield chunk


def export(
    dataset: str,
    split: str,
    encoder: str,
    out_path,
    *,
    path,
    weights: str = "random",
    seed: int = 0,
    use_head: bool = False,
    image_size: int = 32,
    batch_size: int = 64,
    expect_dim: int | None = None,
) -> ExportManifest:
    """Embed every image of the dataset and write a feature file.

    ``expect_dim`` aborts before anything is written if the encoder's
    output dimension differs from the caller's expectation.
    """
    bundle = build_encoder(encoder, weights=weights, seed=seed, use_head=use_head)
    if expect_dim is not None and bundle.dim != expect_dim:
        raise ExportError(
            f"encoder produces {bundle.dim}-dimensional embeddings, expected {expect_dim}; "
            "nothing was written"
        )

    to_tensor = transforms.Compose([
        transforms.Resize((image_size, image_size)),
        transforms.ToTensor(),
        transforms.Normalize(mean=[0.5, 0.5, 0.5], std=[0.5, 0.5, 0.5]),
    ])

    torch.set_num_threads(1)  # deterministic reductions on repeat runs
    chunks = []
    for batch in _batches(load_images(dataset, path, split), batch_size):
        stacked = torch.stack([to_tensor(img) for img in batch])
        chunks.append(bundle.embed(stacked).numpy().astype(np.float32))
    rows = np.vstack(chunks)

    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    zero = np.nonzero(norms[:, 0] == 0.0)[0]
    if zero.size:
        raise ExportError(f"embedding row {zero[0]} has zero norm and cannot be normalized")
    rows = rows / norms

    out_path = str(out_path)
    sha256 = write_atomic(out_path, rows)
    version, n, d = read_header(out_path)
    if (n, d) != rows.shape:
        raise ExportError(f"written header ({n}, {d}) does not match payload {rows.shape}")

    manifest = ExportManifest(
        dataset=dataset,
        split=split,
        encoder=bundle.identifier,
        dim=d,
        rows=n,
        output=out_path,
        sha256=sha256,
    )
    Path(f"{out_path}.manifest").write_text(manifest.to_text())
    return manifest
