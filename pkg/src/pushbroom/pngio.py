"""8-bit PNG input/output and raster validation.

Images are plain numpy arrays: grayscale rasters have shape (H, W), RGB
rasters (H, W, 3), both dtype uint8. Label masks share the grayscale layout
with pixel values equal to class indices 0..4.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidInputError

NUM_CLASSES = 5


def ensure_gray(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate a 1-channel uint8 raster and return it unchanged."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name}: expected a 1-channel (H, W) raster, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"{name}: expected dtype uint8, got {arr.dtype}")
    if arr.size == 0:
        raise InvalidInputError(f"{name}: empty raster")
    return arr


def ensure_rgb(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate a 3-channel uint8 raster and return it unchanged."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"{name}: expected a 3-channel (H, W, 3) raster, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"{name}: expected dtype uint8, got {arr.dtype}")
    if arr.size == 0:
        raise InvalidInputError(f"{name}: empty raster")
    return arr


def ensure_mask(mask: np.ndarray, name: str = "mask") -> np.ndarray:
    """Validate a class-index mask: (H, W) uint8 with values < NUM_CLASSES."""
    arr = ensure_gray(mask, name)
    top = int(arr.max())
    if top >= NUM_CLASSES:
        raise InvalidInputError(f"{name}: class index {top} outside palette 0..{NUM_CLASSES - 1}")
    return arr


def ensure_aligned(img: np.ndarray, mask: np.ndarray) -> None:
    """Require an image and its mask to share height and width."""
    if img.shape[:2] != mask.shape[:2]:
        raise InvalidInputError(
            f"image/mask dims differ: {img.shape[:2]} vs {mask.shape[:2]}"
        )


def read_png(path: str | Path) -> np.ndarray:
    """Read an 8-bit PNG as (H, W) grayscale or (H, W, 3) RGB uint8."""
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)
        if im.mode == "RGB":
            return np.asarray(im, dtype=np.uint8)
        if im.mode in ("P", "LA", "RGBA", "I", "I;16"):
            # Palettized / alpha / 16-bit inputs are normalized on read.
            converted = im.convert("RGB") if im.mode in ("RGBA", "P") else im.convert("L")
            return np.asarray(converted, dtype=np.uint8)
        raise InvalidInputError(f"{path}: unsupported PNG mode {im.mode}")


def read_gray_png(path: str | Path) -> np.ndarray:
    """Read a PNG that must be single-channel."""
    arr = read_png(path)
    if arr.ndim != 2:
        raise InvalidInputError(f"{path}: expected grayscale PNG, got shape {arr.shape}")
    return arr


def read_rgb_png(path: str | Path) -> np.ndarray:
    """Read a PNG that must be 3-channel."""
    arr = read_png(path)
    if arr.ndim != 3:
        raise InvalidInputError(f"{path}: expected RGB PNG, got shape {arr.shape}")
    return arr


def write_png(path: str | Path, img: np.ndarray) -> None:
    """Write a uint8 raster as PNG; grayscale for 2-D, RGB for (H, W, 3)."""
    arr = np.ascontiguousarray(img)
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"write_png: expected uint8, got {arr.dtype}")
    if arr.ndim == 2:
        im = Image.fromarray(arr, mode="L")
    elif arr.ndim == 3 and arr.shape[2] == 3:
        im = Image.fromarray(arr, mode="RGB")
    else:
        raise InvalidInputError(f"write_png: unsupported shape {arr.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    im.save(path, format="PNG")
