"""Polygon annotation ingestion and rasterization.

Reads LabelMe-style JSON documents and paints them into class-index masks
with an even-odd scanline fill sampled at pixel centers. Shapes are painted
in document order, later shapes overwriting earlier ones, which lets
annotators punch nuclei out of cytoplasm regions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import AnnotationParseError, InvalidInputError, LabelMappingError
from .pngio import NUM_CLASSES, ensure_mask

HYPERSPECTRAL_CLASSES = (0, 1, 2)  # empty, cancer cytoplasm, nuclear


@dataclass(frozen=True)
class Polygon:
    label: str
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AnnotationDoc:
    image_width: int
    image_height: int
    shapes: tuple[Polygon, ...]


def load_palette(path: str | Path | None = None) -> dict[str, int]:
    """Load the label-text to class-index dictionary.

    The default dictionary ships as package data; a config file with the
    same layout ({"classes": {...}, "synonyms": {...}}) overrides it.
    """
    if path is None:
        raw = resources.files("pushbroom").joinpath("data/palette.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    doc = json.loads(raw)
    palette = {k.lower(): int(v) for k, v in doc.get("classes", {}).items()}
    for alias, canonical in doc.get("synonyms", {}).items():
        canonical = canonical.lower()
        if canonical not in palette:
            raise LabelMappingError(f"synonym {alias!r} points at unknown class {canonical!r}")
        palette[alias.lower()] = palette[canonical]
    bad = {k: v for k, v in palette.items() if not 0 <= v < NUM_CLASSES}
    if bad:
        raise LabelMappingError(f"palette indices outside 0..{NUM_CLASSES - 1}: {bad}")
    return palette


def parse_annotations(
    document: str | bytes | dict,
    palette: dict[str, int] | None = None,
    source: str = "<annotation>",
    validate_labels: bool = True,
) -> AnnotationDoc:
    """Parse one LabelMe JSON document into a typed AnnotationDoc.

    Vertices are clamped to the image bounds. Every shape label must map
    through the palette (the bundled one when none is given); unknown labels
    raise LabelMappingError listing each offending string rather than being
    dropped. Pass validate_labels=False to defer that check to rasterize.
    """
    if palette is None and validate_labels:
        palette = load_palette()
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise AnnotationParseError(f"{source}: invalid JSON at line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise AnnotationParseError(f"{source}: top level must be an object")

    try:
        width = int(doc["imageWidth"])
        height = int(doc["imageHeight"])
    except (KeyError, TypeError, ValueError) as exc:
        raise AnnotationParseError(f"{source}: missing or non-integer imageWidth/imageHeight") from exc
    if width < 1 or height < 1:
        raise AnnotationParseError(f"{source}: non-positive image dims {width}x{height}")

    shapes = []
    unknown: list[str] = []
    for i, shape in enumerate(doc.get("shapes", [])):
        where = f"{source}: shapes[{i}]"
        if not isinstance(shape, dict) or "label" not in shape or "points" not in shape:
            raise AnnotationParseError(f"{where}: expected an object with 'label' and 'points'")
        label = str(shape["label"])
        pts = shape["points"]
        if not isinstance(pts, list) or len(pts) < 3:
            raise AnnotationParseError(f"{where}: polygon needs >= 3 vertices, got {len(pts) if isinstance(pts, list) else type(pts)}")
        clamped = []
        for j, pt in enumerate(pts):
            try:
                x, y = float(pt[0]), float(pt[1])
            except (TypeError, ValueError, IndexError) as exc:
                raise AnnotationParseError(f"{where}.points[{j}]: expected [x, y]") from exc
            clamped.append((min(max(x, 0.0), float(width)), min(max(y, 0.0), float(height))))
        if validate_labels and palette is not None and label.lower() not in palette:
            unknown.append(label)
        shapes.append(Polygon(label=label, points=tuple(clamped)))

    if unknown:
        raise LabelMappingError(f"{source}: unmapped label(s): {sorted(set(unknown))}")
    return AnnotationDoc(image_width=width, image_height=height, shapes=tuple(shapes))


def _fill_polygon(canvas: np.ndarray, points: tuple[tuple[float, float], ...], value: int) -> None:
    """Even-odd scanline fill; a pixel (x, y) is inside when its center
    (x+0.5, y+0.5) is inside the polygon."""
    height, width = canvas.shape
    xs = np.asarray([p[0] for p in points], dtype=np.float64)
    ys = np.asarray([p[1] for p in points], dtype=np.float64)
    n = len(points)
    centers = np.arange(width, dtype=np.float64) + 0.5
    y_min = max(0, int(np.floor(ys.min() - 0.5)))
    y_max = min(height - 1, int(np.ceil(ys.max())))
    for row in range(y_min, y_max + 1):
        yc = row + 0.5
        crossings = []
        for i in range(n):
            j = (i - 1) % n
            yi, yj = ys[i], ys[j]
            if (yi > yc) != (yj > yc):
                crossings.append((xs[j] - xs[i]) * (yc - yi) / (yj - yi) + xs[i])
        if not crossings:
            continue
        crossings.sort()
        # Inside exactly between crossing pairs: a <= center < b, matching a
        # strict center < crossing parity test.
        for a, b in zip(crossings[0::2], crossings[1::2]):
            lo = int(np.searchsorted(centers, a, side="left"))
            hi = int(np.searchsorted(centers, b, side="left"))
            if hi > lo:
                canvas[row, lo:hi] = value


def rasterize(doc: AnnotationDoc, palette: dict[str, int] | None = None) -> np.ndarray:
    """Paint an AnnotationDoc into a class-index mask.

    No partial mask is ever produced: all labels are checked before any
    painting happens.
    """
    if palette is None:
        palette = load_palette()
    missing = sorted({s.label for s in doc.shapes if s.label.lower() not in palette})
    if missing:
        raise LabelMappingError(f"unmapped label(s): {missing}")
    mask = np.zeros((doc.image_height, doc.image_width), dtype=np.uint8)
    for shape in doc.shapes:
        _fill_polygon(mask, shape.points, palette[shape.label.lower()])
    return mask


def harmonize_hyperspectral(mask3: np.ndarray) -> np.ndarray:
    """Embed a 3-class hyperspectral mask into the 5-class palette.

    Class indices carry over unchanged; inputs containing RBC or fibroblast
    indices are rejected because hyperspectral annotations never had them.
    """
    mask3 = ensure_mask(mask3)
    present = np.unique(mask3)
    illegal = [int(v) for v in present if int(v) not in HYPERSPECTRAL_CLASSES]
    if illegal:
        raise InvalidInputError(
            f"hyperspectral mask may only use classes {HYPERSPECTRAL_CLASSES}, found {illegal}"
        )
    return mask3.copy()
