"""Inference: class-index masks plus per-class probability rasters."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .errors import InvalidParameterError
from .model import POOL_STAGES, UNet


def predict(model: UNet, image: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Segment one grayscale image.

    Returns (mask, probabilities): mask is uint8 per-pixel argmax over the
    class logits (ties go to the lowest class index), probabilities is a
    float32 (num_classes, H, W) stack of per-channel sigmoids.
    """
    if image.ndim != 2:
        raise InvalidParameterError(f"expected a 2-D grayscale image, got shape {image.shape}")
    h, w = image.shape
    divisor = 2 ** POOL_STAGES
    if h % divisor or w % divisor:
        raise InvalidParameterError(f"image dims must be divisible by {divisor}, got {w}x{h}")

    x = torch.from_numpy(image.astype(np.float32) / 255.0)[None, None]
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            logits = model(x)[0]
    finally:
        model.train(was_training)
    mask = torch.argmax(logits, dim=0).to(torch.uint8).numpy()
    probs = torch.sigmoid(logits).numpy().astype(np.float32)
    return mask, probs


def read_image(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img)
    if arr.ndim == 3:
        arr = arr[..., 0]
    return arr.astype(np.uint8)


def write_mask_png(path: str | Path, mask: np.ndarray) -> None:
    """Write a class-index mask in the dataset's 8-bit grayscale format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mask.astype(np.uint8), mode="L").save(path, format="PNG")
