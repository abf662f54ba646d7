"""Joint geometric augmentations for an image and its mask.

Exactly five transform kinds exist: crop (with resize to the training
resolution), horizontal flip, vertical flip, combined flip, and translation.
Images are resampled bilinearly, masks nearest-neighbor so labels are never
interpolated. A TransformRecord replays a stored transform byte-for-byte.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .imaging import round_half_away
from .noise import BACKGROUND_CLASS
from .pngio import ensure_aligned, ensure_gray, ensure_mask

TRANSFORM_KINDS = ("crop", "hflip", "vflip", "hvflip", "translate")

# The full five-transform expansion, in pipeline order.
DEFAULT_TRANSFORMS = ("crop", "hflip", "translate", "vflip", "hvflip")

# Fraction of each dimension used as the translation offset bound.
DEFAULT_TRANSLATE_FRAC = 0.1


@dataclass(frozen=True)
class Sample:
    """One image/mask pair with its provenance."""

    image: np.ndarray
    mask: np.ndarray
    type_label: int = 1
    source_id: str = ""

    def __post_init__(self) -> None:
        ensure_gray(self.image)
        ensure_mask(self.mask)
        ensure_aligned(self.image, self.mask)
        if not 1 <= self.type_label <= 7:
            raise InvalidParameterError(f"type_label must be in [1, 7], got {self.type_label}")

    @property
    def width(self) -> int:
        return self.image.shape[1]

    @property
    def height(self) -> int:
        return self.image.shape[0]


@dataclass(frozen=True)
class GeoParams:
    """Crop bounds, transform list, and output resolution."""

    cw: int = 800
    ch: int = 700
    transforms: tuple[str, ...] = DEFAULT_TRANSFORMS
    target_width: int = 640
    target_height: int = 480
    translate_frac: float = DEFAULT_TRANSLATE_FRAC

    def __post_init__(self) -> None:
        if self.cw < 1 or self.ch < 1:
            raise InvalidParameterError(f"crop bounds must be >= 1, got cw={self.cw}, ch={self.ch}")
        if self.target_width < 1 or self.target_height < 1:
            raise InvalidParameterError("target dims must be >= 1")
        unknown = [t for t in self.transforms if t not in TRANSFORM_KINDS]
        if unknown:
            raise InvalidParameterError(f"unknown transform kinds {unknown}; valid: {TRANSFORM_KINDS}")
        if not 0 <= self.translate_frac < 1:
            raise InvalidParameterError(f"translate_frac must be in [0, 1), got {self.translate_frac}")


@dataclass(frozen=True)
class TransformRecord:
    """A fully determined transform: kind plus its sampled parameters.

    crop carries (x, y, w, h) plus the resize target; translate carries
    (dx, dy); flips carry nothing.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "TransformRecord":
        return cls(kind=str(d["kind"]), params=dict(d.get("params") or {}))


def flip(sample: Sample, axis: str) -> Sample:
    """Mirror image and mask about 'horizontal', 'vertical', or 'both' axes.

    'horizontal' mirrors left-right, 'vertical' top-bottom.
    """
    if axis == "horizontal":
        img, mask = np.fliplr(sample.image), np.fliplr(sample.mask)
    elif axis == "vertical":
        img, mask = np.flipud(sample.image), np.flipud(sample.mask)
    elif axis == "both":
        img = np.flipud(np.fliplr(sample.image))
        mask = np.flipud(np.fliplr(sample.mask))
    else:
        raise InvalidParameterError(f"axis must be horizontal|vertical|both, got {axis!r}")
    return replace(sample, image=np.ascontiguousarray(img), mask=np.ascontiguousarray(mask))


def sample_crop_rect(
    params: GeoParams, width: int, height: int, rng: np.random.Generator
) -> tuple[int, int, int, int]:
    """Sample a crop rectangle (x, y, w, h).

    Width is uniform in [ceil(min(cw, width)/2), min(cw, width)] and height
    likewise, so crops never degenerate below half the clamped maximum; the
    top-left corner is uniform over all valid positions.
    """
    if width < 1 or height < 1:
        raise InvalidParameterError("frame dims must be >= 1")
    max_w = min(params.cw, width)
    max_h = min(params.ch, height)
    min_w = (max_w + 1) // 2
    min_h = (max_h + 1) // 2
    w = int(rng.integers(min_w, max_w + 1))
    h = int(rng.integers(min_h, max_h + 1))
    x = int(rng.integers(0, width - w + 1))
    y = int(rng.integers(0, height - h + 1))
    return (x, y, w, h)


def resize_bilinear(img: np.ndarray, target_width: int, target_height: int) -> np.ndarray:
    """Bilinear resize with center-aligned sampling, uint8 in and out."""
    img = ensure_gray(img)
    h, w = img.shape
    if (w, h) == (target_width, target_height):
        return img.copy()
    sx = w / target_width
    sy = h / target_height
    xs = (np.arange(target_width, dtype=np.float64) + 0.5) * sx - 0.5
    ys = (np.arange(target_height, dtype=np.float64) + 0.5) * sy - 0.5
    x0 = np.clip(np.floor(xs), 0, w - 1).astype(np.int64)
    y0 = np.clip(np.floor(ys), 0, h - 1).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(xs - x0, 0.0, 1.0)
    fy = np.clip(ys - y0, 0.0, 1.0)
    src = img.astype(np.float64)
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return np.clip(round_half_away(out), 0, 255).astype(np.uint8)


def resize_nearest(mask: np.ndarray, target_width: int, target_height: int) -> np.ndarray:
    """Nearest-neighbor resize (center-aligned); labels are never invented."""
    mask = ensure_gray(mask)
    h, w = mask.shape
    if (w, h) == (target_width, target_height):
        return mask.copy()
    xs = np.minimum(((np.arange(target_width) + 0.5) * (w / target_width)).astype(np.int64), w - 1)
    ys = np.minimum(((np.arange(target_height) + 0.5) * (h / target_height)).astype(np.int64), h - 1)
    return np.ascontiguousarray(mask[ys][:, xs])


def crop(
    sample: Sample,
    rect: tuple[int, int, int, int],
    target_width: int,
    target_height: int,
) -> Sample:
    """Cut a rectangle and resize it to the target resolution."""
    x, y, w, h = (int(v) for v in rect)
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > sample.width or y + h > sample.height:
        raise InvalidInputError(
            f"crop rect {rect} outside frame {sample.width}x{sample.height}"
        )
    img = sample.image[y : y + h, x : x + w]
    mask = sample.mask[y : y + h, x : x + w]
    return replace(
        sample,
        image=resize_bilinear(img, target_width, target_height),
        mask=resize_nearest(mask, target_width, target_height),
    )


def translate(sample: Sample, dx: int, dy: int) -> Sample:
    """Displace content by (dx, dy); vacated image pixels become 0 and
    vacated mask pixels the background class."""
    if abs(dx) >= sample.width or abs(dy) >= sample.height:
        raise InvalidInputError(
            f"offsets ({dx}, {dy}) exceed frame {sample.width}x{sample.height}"
        )
    img = np.zeros_like(sample.image)
    mask = np.full_like(sample.mask, BACKGROUND_CLASS)
    h, w = sample.image.shape
    src_x = slice(max(0, -dx), min(w, w - dx))
    src_y = slice(max(0, -dy), min(h, h - dy))
    dst_x = slice(max(0, dx), min(w, w + dx))
    dst_y = slice(max(0, dy), min(h, h + dy))
    img[dst_y, dst_x] = sample.image[src_y, src_x]
    mask[dst_y, dst_x] = sample.mask[src_y, src_x]
    return replace(sample, image=img, mask=mask)


def sample_transform(
    kind: str,
    sample_width: int,
    sample_height: int,
    params: GeoParams,
    rng: np.random.Generator,
) -> TransformRecord:
    """Draw the free parameters of one transform kind into a record."""
    if kind == "crop":
        rect = sample_crop_rect(params, sample_width, sample_height, rng)
        return TransformRecord(
            "crop",
            {
                "x": rect[0], "y": rect[1], "w": rect[2], "h": rect[3],
                "target_width": params.target_width,
                "target_height": params.target_height,
            },
        )
    if kind == "translate":
        max_dx = int(sample_width * params.translate_frac)
        max_dy = int(sample_height * params.translate_frac)
        dx = int(rng.integers(-max_dx, max_dx + 1)) if max_dx else 0
        dy = int(rng.integers(-max_dy, max_dy + 1)) if max_dy else 0
        return TransformRecord("translate", {"dx": dx, "dy": dy})
    if kind in ("hflip", "vflip", "hvflip"):
        return TransformRecord(kind)
    raise InvalidParameterError(f"unknown transform kind {kind!r}")


def apply_transform(sample: Sample, record: TransformRecord) -> Sample:
    """Apply a fully determined transform; replay is exact."""
    kind = record.kind
    if kind == "hflip":
        return flip(sample, "horizontal")
    if kind == "vflip":
        return flip(sample, "vertical")
    if kind == "hvflip":
        return flip(sample, "both")
    if kind == "translate":
        return translate(sample, int(record.params["dx"]), int(record.params["dy"]))
    if kind == "crop":
        p = record.params
        rect = (int(p["x"]), int(p["y"]), int(p["w"]), int(p["h"]))
        return crop(sample, rect, int(p["target_width"]), int(p["target_height"]))
    raise InvalidParameterError(f"unknown transform kind {kind!r}")


def ensure_target_dims(sample: Sample, target_width: int, target_height: int) -> Sample:
    """Resize a sample to the output resolution unless it already matches."""
    if (sample.width, sample.height) == (target_width, target_height):
        return sample
    return replace(
        sample,
        image=resize_bilinear(sample.image, target_width, target_height),
        mask=resize_nearest(sample.mask, target_width, target_height),
    )
