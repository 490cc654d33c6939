"""Image-to-embedding export tool for the otood feature-file format."""

from .datasets import DatasetError, load_images
from .encoders import Encoder, EncoderError, build_encoder
from .export import ExportError, ExportManifest, export, read_manifest
from .featfile import FeatureFileError, payload_sha256, read_header, write_atomic

__version__ = "0.1.0"

__all__ = [
    "DatasetError",
    "Encoder",
    "EncoderError",
    "ExportError",
    "ExportManifest",
    "FeatureFileError",
    "build_encoder",
    "export",
    "load_images",
    "payload_sha256",
    "read_header",
    "read_manifest",
    "write_atomic",
]
