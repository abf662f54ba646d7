"""Color and brightness transforms that turn a CMOS RGB capture into a
clean pseudo-spectral grayscale image.

The stage order is fixed: grayscale conversion, gamma correction, global
histogram equalization, saturating constant add. Each stage computes in
float64 and quantizes back to uint8 at its boundary, rounding half away
from zero, so outputs are identical across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .pngio import ensure_gray, ensure_rgb

# ITU-R BT.601 luma weights.
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def round_half_away(x: np.ndarray | float) -> np.ndarray:
    """Round to nearest integer, ties away from zero (unlike np.round)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class SpectralParams:
    """Brightness-adjustment knobs for the spectralization stage."""

    gamma: float = 0.3
    c1: int = 100

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma}")
        if not 0 <= self.c1 <= 255:
            raise InvalidParameterError(f"c1 must be a gray level in [0, 255], got {self.c1}")


def to_grayscale(rgb: np.ndarray) -> np.ndarray:
    """Convert an RGB raster to single-channel luma."""
    rgb = ensure_rgb(rgb)
    r, g, b = (rgb[..., i].astype(np.float64) for i in range(3))
    wr, wg, wb = GRAY_WEIGHTS
    gray = round_half_away(wr * r + wg * g + wb * b)
    return gray.astype(np.uint8)


def gamma_correct(img: np.ndarray, gamma: float) -> np.ndarray:
    """Apply v -> 255 * (v/255)^(1/gamma) per pixel.

    gamma < 1 darkens; the table is built once per call and applied as a LUT.
    """
    img = ensure_gray(img)
    if gamma <= 0:
        raise InvalidParameterError(f"gamma must be positive, got {gamma}")
    levels = np.arange(256, dtype=np.float64) / 255.0
    lut = round_half_away(255.0 * np.power(levels, 1.0 / gamma))
    lut = np.clip(lut, 0, 255).astype(np.uint8)
    return lut[img]


def equalize_histogram(img: np.ndarray) -> np.ndarray:
    """Global CDF histogram equalization.

    v -> round((cdf(v) - cdf_min) / (P - cdf_min) * 255) where P is the pixel
    count and cdf_min the smallest nonzero CDF value. A constant image is
    returned unchanged (the formula would divide by zero).
    """
    img = ensure_gray(img)
    counts = np.bincount(img.ravel(), minlength=256)
    cdf = counts.cumsum()
    total = int(cdf[-1])
    cdf_min = int(cdf[cdf > 0][0]) if total else 0
    if total == cdf_min:
        return img.copy()
    scaled = (cdf - cdf_min) / (total - cdf_min) * 255.0
    lut = np.clip(round_half_away(scaled), 0, 255).astype(np.uint8)
    return lut[img]


def add_constant_saturating(img: np.ndarray, c: int) -> np.ndarray:
    """Add a uniform gray level with saturation at 255."""
    img = ensure_gray(img)
    if not 0 <= c <= 255:
        raise InvalidParameterError(f"c must be a gray level in [0, 255], got {c}")
    out = img.astype(np.int16) + int(c)
    return np.minimum(out, 255).astype(np.uint8)


def spectralize(rgb: np.ndarray, params: SpectralParams) -> np.ndarray:
    """Full clean-image stage: grayscale, gamma, equalize, add constant."""
    gray = to_grayscale(rgb)
    gray = gamma_correct(gray, params.gamma)
    gray = equalize_histogram(gray)
    return add_constant_saturating(gray, params.c1)
