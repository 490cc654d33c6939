"""Command-line entry point for the embedding exporter."""

from __future__ import annotations

import argparse
import sys

from .datasets import DatasetError
from .encoders import EncoderError
from .export import ExportError, export
from .featfile import FeatureFileError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export unit-normalized image embeddings to a feature file",
    )
    parser.add_argument("--dataset", required=True,
                        choices=("folder", "cifar10", "cifar100"))
    parser.add_argument("--path", required=True, help="dataset location on disk")
    parser.add_argument("--split", default="all",
                        help="train|test for CIFAR, subdirectory or 'all' for folders")
    parser.add_argument("--encoder", default="resnet18")
    parser.add_argument("--weights", default="pretrained",
                        help="'pretrained', 'random', or a local state-dict path")
    parser.add_argument("--seed", type=int, default=0,
                        help="initialization seed for --weights random (and the head)")
    parser.add_argument("--head", action="store_true",
                        help="export projection-head output instead of encoder output")
    parser.add_argument("--image-size", type=int, default=32)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--expect-dim", type=int, default=None,
                        help="abort before writing if the embedding dimension differs")
    parser.add_argument("--out", required=True, help="output feature-file path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = export(
            args.dataset,
            args.split,
            args.encoder,
            args.out,
            path=args.path,
            weights=args.weights,
            seed=args.seed,
            use_head=args.head,
            image_size=args.image_size,
            batch_size=args.batch_size,
            expect_dim=args.expect_dim,
        )
    except (ExportError, EncoderError, DatasetError, FeatureFileError) as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"embed-export: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {manifest.rows} x {manifest.dim} embeddings to {manifest.output}")
    print(f"encoder: {manifest.encoder}")
    print(f"payload sha256: {manifest.sha256}")
    print(f"manifest: {manifest.output}.manifest")
    return 0


if __name__ == "__main__":
    sys.exit(main())
