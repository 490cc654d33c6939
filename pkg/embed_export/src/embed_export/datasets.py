"""Local dataset loaders: an image folder, or CIFAR-10/100 already on disk.

Nothing is downloaded; a missing dataset is a descriptive error. Folder
iteration is sorted by filename so exports are reproducible.
"""

from __future__ import annotations

from pathlib import Path

from PIL import Image

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}


class DatasetError(Exception):
    exit_code = 2


def _folder_images(root: Path, split: str):
    if split not in ("", "all") and (root / split).is_dir():
        root = root / split
    elif split not in ("", "all"):
        raise DatasetError(f"split {split!r} is not a subdirectory of {root}")
    if not root.is_dir():
        raise DatasetError(f"image folder {root} does not exist")
    paths = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise DatasetError(f"no images with suffixes {sorted(IMAGE_SUFFIXES)} in {root}")
    for path in paths:
        with Image.open(path) as img:
            yield img.convert("RGB")


def _cifar_images(name: str, root: Path, split: str):
    from torchvision import datasets

    cls = {"cifar10": datasets.CIFAR10, "cifar100": datasets.CIFAR100}[name]
    if split not in ("train", "test"):
        raise DatasetError(f"{name} needs --split train or test, got {split!r}")
    try:
        data = cls(root=str(root), train=split == "train", download=False)
    except RuntimeError as exc:
        raise DatasetError(f"{name} not found under {root}: {exc}") from exc
    for image, _ in data:
        yield image.convert("RGB")


def load_images(dataset: str, path, split: str):
    """Yield PIL RGB images for the named dataset."""
    root = Path(path)
    if dataset == "folder":
        return _folder_images(root, split)
    if dataset in ("cifar10", "cifar100"):
        return _cifar_images(dataset, root, split)
    raise DatasetError(f"unknown dataset {dataset!r}; available: folder, cifar10, cifar100")
