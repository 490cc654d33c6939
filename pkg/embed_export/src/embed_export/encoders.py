"""Encoder construction: a ResNet-18 backbone, optionally with a projection head.

The backbone's classifier layer is replaced by the identity, exposing the
512-dimensional penultimate features. ``weights`` selects pretrained
torchvision weights, a local state-dict path, or a seeded random
initialization (useful where no weights are resolvable; embeddings are
then deterministic but not semantically meaningful). The optional head is
a freshly initialized 512->512->128 MLP drawn from the same seed, for
experiments with head-space embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
from torchvision import models


class EncoderError(Exception):
    exit_code = 2


@dataclass
class Encoder:
    model: nn.Module
    head: nn.Module | None
    dim: int
    identifier: str

    @torch.no_grad()
    def embed(self, batch: torch.Tensor) -> torch.Tensor:
        features = self.model(batch)
        if self.head is not None:
            features = self.head(features)
        return features


def build_encoder(
    name: str = "resnet18",
    weights: str = "random",
    seed: int = 0,
    use_head: bool = False,
) -> Encoder:
    if name != "resnet18":
        raise EncoderError(f"unknown encoder {name!r}; available: resnet18")

    torch.manual_seed(seed)
    if weights == "pretrained":
        try:
            model = models.resnet18(weights=models.ResNet18_Weights.DEFAULT)
        except Exception as exc:
            raise EncoderError(
                f"could not resolve pretrained weights ({exc}); "
                "pass --weights PATH for a local state dict or --weights random"
            ) from exc
        tag = "pretrained"
    elif weights == "random":
        model = models.resnet18(weights=None)
        tag = f"random:seed={seed}"
    else:
        model = models.resnet18(weights=None)
        try:
            state = torch.load(weights, map_location="cpu", weights_only=True)
            model.load_state_dict(state)
        except Exception as exc:
            raise EncoderError(f"could not load weights from {weights!r}: {exc}") from exc
        tag = f"file:{weights}"

    backbone_dim = model.fc.in_features
    model.fc = nn.Identity()
    model.eval()

    head = None
    dim = backbone_dim
    if use_head:
        head = nn.Sequential(
            nn.Linear(backbone_dim, backbone_dim),
            nn.ReLU(inplace=True),
            nn.Linear(backbone_dim, 128),
        )
        head.eval()
        dim = 128

    identifier = f"{name}[{tag}]" + ("+head" if use_head else "")
    return Encoder(model=model, head=head, dim=dim, identifier=identifier)
