"""Segmentation trainer for datasets in the pushbroom-manifest/1 format."""

from .data import DataRecord, SegmentationDataset, read_manifest_records
from .errors import InvalidDataError, InvalidParameterError, TrainerError
from .model import ConvBlock, NetworkSpec, UNet, build_network, shape_audit
from .predict import predict, read_image, write_mask_png
from .train import TrainConfig, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "ConvBlock",
    "DataRecord",
    "InvalidDataError",
    "InvalidParameterError",
    "NetworkSpec",
    "SegmentationDataset",
    "TrainConfig",
    "TrainerError",
    "UNet",
    "build_network",
    "load_checkpoint",
    "predict",
    "read_image",
    "read_manifest_records",
    "save_checkpoint",
    "shape_audit",
    "train",
    "write_mask_png",
    "__version__",
]
