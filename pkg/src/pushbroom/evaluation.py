"""Segmentation metrics, stripe/scan-band profiling, per-type statistics.

Metrics are one-vs-rest per class. A pair with no positives on either side
scores 1.0 by default; pass empty="skip" to leave such pairs out of macro
averages instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .pngio import NUM_CLASSES, ensure_gray, ensure_mask


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel counts for one binary (one-vs-rest) comparison."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tn + other.tn,
        )


def confusion(pred: np.ndarray, truth: np.ndarray, positive_class: int = 1) -> ConfusionCounts:
    """Count tp/fp/fn/tn for one class treated as the positive label."""
    pred = ensure_mask(pred, name="pred")
    truth = ensure_mask(truth, name="truth")
    if pred.shape != truth.shape:
        raise InvalidInputError(f"shape mismatch: pred {pred.shape} vs truth {truth.shape}")
    p = pred == positive_class
    t = truth == positive_class
    tp = int(np.count_nonzero(p & t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    tn = p.size - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn)


def iou(counts: ConfusionCounts) -> float:
    """Intersection over union; 1.0 when neither side has positives."""
    denom = counts.tp + counts.fp + counts.fn
    if denom == 0:
        return 1.0
    return counts.tp / denom


def dice(counts: ConfusionCounts) -> float:
    """Dice coefficient; 1.0 when neither side has positives."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        return 1.0
    return 2 * counts.tp / denom


@dataclass(frozen=True)
class EvalItem:
    """One prediction/truth mask pair to score."""

    id: str
    pred: np.ndarray
    truth: np.ndarray
    type_label: int = 1


@dataclass(frozen=True)
class ClassScore:
    """Aggregate for one class: micro over summed counts, macro over images."""

    positive_class: int
    counts: ConfusionCounts
    micro_iou: float
    micro_dice: float
    macro_iou: float
    macro_dice: float
    images: int


@dataclass(frozen=True)
class EvalReport:
    per_image: tuple[dict, ...]
    per_class: dict[int, ClassScore]
    per_type: dict[int, dict[int, ClassScore]]


def _aggregate(rows: list[dict], positive_class: int, empty: str) -> ClassScore:
    mine = [r for r in rows if r["class"] == positive_class]
    total = ConfusionCounts(0, 0, 0, 0)
    for r in mine:
        total = total + r["counts"]
    scored = mine
    if empty == "skip":
        scored = [r for r in mine if r["counts"].tp + r["counts"].fp + r["counts"].fn > 0]
    macro_iou = float(np.mean([r["iou"] for r in scored])) if scored else 1.0
    macro_dice = float(np.mean([r["dice"] for r in scored])) if scored else 1.0
    return ClassScore(
        positive_class=positive_class,
        counts=total,
        micro_iou=iou(total),
        micro_dice=dice(total),
        macro_iou=macro_iou,
        macro_dice=macro_dice,
        images=len(scored),
    )


def evaluate(
    items: list[EvalItem],
    classes: tuple[int, ...] = (1,),
    empty: str = "one",
) -> EvalReport:
    """Score every item against every requested class.

    Any shape mismatch aborts and names the offending item.
    """
    if empty not in ("one", "skip"):
        raise InvalidParameterError(f"empty must be 'one' or 'skip', got {empty!r}")
    if not classes:
        raise InvalidParameterError("classes must not be empty")
    for c in classes:
        if not 0 <= c < NUM_CLASSES:
            raise InvalidParameterError(f"class index out of range: {c}")
    rows: list[dict] = []
    for item in items:
        if item.pred.shape != item.truth.shape:
            raise InvalidInputError(
                f"record {item.id}: pred {item.pred.shape} vs truth {item.truth.shape}"
            )
        for c in classes:
            counts = confusion(item.pred, item.truth, c)
            rows.append(
                {
                    "id": item.id,
                    "type_label": item.type_label,
                    "class": c,
                    "counts": counts,
                    "iou": iou(counts),
                    "dice": dice(counts),
                }
            )
    per_class = {c: _aggregate(rows, c, empty) for c in classes}
    per_type: dict[int, dict[int, ClassScore]] = {}
    for t in sorted({r["type_label"] for r in rows}):
        trows = [r for r in rows if r["type_label"] == t]
        per_type[t] = {c: _aggregate(trows, c, empty) for c in classes}
    return EvalReport(per_image=tuple(rows), per_class=per_class, per_type=per_type)


@dataclass(frozen=True)
class NoiseProfile:
    """Detected stripe columns and scan-band rows for one image."""

    stripe_columns: tuple[int, ...]
    stripe_count: int
    min_spacing: int | None
    max_spacing: int | None
    mean_spacing: float | None
    anomalous_rows: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "stripe_columns": list(self.stripe_columns),
            "stripe_count": self.stripe_count,
            "min_spacing": self.min_spacing,
            "max_spacing": self.max_spacing,
            "mean_spacing": self.mean_spacing,
            "anomalous_rows": list(self.anomalous_rows),
        }


def profile_noise(
    image: np.ndarray,
    uniformity_threshold: float = 0.95,
    contrast_threshold: float = 8.0,
    row_factor: float = 4.0,
) -> NoiseProfile:
    """Detect vertical stripe lines and horizontal scan anomalies.

    A column is a stripe when at least uniformity_threshold of its pixels
    share one value and its mean differs from each existing neighbor column
    by at least contrast_threshold. Rows are anomalous when the mean absolute
    difference to the previous row exceeds row_factor times the image-wide
    median of that statistic.
    """
    image = ensure_gray(image, name="image")
    if not 0.0 < uniformity_threshold <= 1.0:
        raise InvalidParameterError(f"uniformity_threshold out of (0, 1]: {uniformity_threshold}")
    if contrast_threshold < 0 or row_factor <= 0:
        raise InvalidParameterError("contrast_threshold must be >= 0 and row_factor > 0")
    height, width = image.shape
    img = image.astype(np.float64)
    col_means = img.mean(axis=0)

    # fraction of pixels agreeing with the column's most common value
    uniform_frac = np.empty(width)
    for x in range(width):
        counts = np.bincount(image[:, x], minlength=256)
        uniform_frac[x] = counts.max() / height

    columns = []
    for x in range(width):
        if uniform_frac[x] < uniformity_threshold:
            continue
        ok = True
        if x > 0 and abs(col_means[x] - col_means[x - 1]) < contrast_threshold:
            ok = False
        if x + 1 < width and abs(col_means[x] - col_means[x + 1]) < contrast_threshold:
            ok = False
        if ok:
            columns.append(x)

    diffs = np.abs(np.diff(img, axis=0)).mean(axis=1) if height > 1 else np.empty(0)
    rows: list[int] = []
    if diffs.size:
        med = float(np.median(diffs))
        limit = row_factor * med
        rows = [int(i) + 1 for i in np.nonzero(diffs > limit)[0]]

    spacings = np.diff(columns) if len(columns) >= 2 else np.empty(0, dtype=np.int64)
    return NoiseProfile(
        stripe_columns=tuple(columns),
        stripe_count=len(columns),
        min_spacing=int(spacings.min()) if spacings.size else None,
        max_spacing=int(spacings.max()) if spacings.size else None,
        mean_spacing=float(spacings.mean()) if spacings.size else None,
        anomalous_rows=tuple(rows),
    )


@dataclass(frozen=True)
class TypeReport:
    """Accumulated statistics for one tissue type."""

    type_label: int
    count: int
    mean_image: np.ndarray
    mean_intensity: float
    histogram: np.ndarray = field(repr=False)


def analyze_types(items: list[tuple[int, np.ndarray]]) -> dict[int, TypeReport]:
    """Per-type pixel mean image, mean intensity, and 256-bin histogram.

    Images within a type must share dimensions (the per-pixel mean needs it).
    """
    if not items:
        raise InvalidInputError("no images to analyze")
    groups: dict[int, list[np.ndarray]] = {}
    for type_label, image in items:
        groups.setdefault(int(type_label), []).append(ensure_gray(image, name="image"))
    out: dict[int, TypeReport] = {}
    for type_label in sorted(groups):
        imgs = groups[type_label]
        shape = imgs[0].shape
        for im in imgs:
            if im.shape != shape:
                raise InvalidInputError(
                    f"type {type_label}: image dims {im.shape} differ from {shape}"
                )
        stack = np.stack([im.astype(np.float64) for im in imgs])
        hist = np.zeros(256, dtype=np.int64)
        for im in imgs:
            hist += np.bincount(im.reshape(-1), minlength=256)
        out[type_label] = TypeReport(
            type_label=type_label,
            count=len(imgs),
            mean_image=stack.mean(axis=0),
            mean_intensity=float(stack.mean()),
            histogram=hist,
        )
    return out
