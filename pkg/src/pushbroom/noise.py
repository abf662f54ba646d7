"""Instrumental push-broom noise: sampling and application.

Line push-broom captures show two artifact families: thin vertical stripes
(slit occlusion, sensor sensitivity) and a horizontal scan-band event where
rows are lost, replicated, and shifted sideways. A NoisePlan is one sampled
realization of both; applying a stored plan is pure and reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .imaging import round_half_away
from .pngio import ensure_aligned, ensure_gray, ensure_mask

BACKGROUND_CLASS = 0


@dataclass(frozen=True)
class NoiseParams:
    """Sampling bounds for one noise realization (§-free: all counts in px)."""

    n1: int = 19          # vertical line count, lower bound
    n2: int = 29          # vertical line count, upper bound
    sigma1: int = 5       # vertical position jitter, +- columns
    c2: int = 128         # stripe gray level
    r1: int = 26          # horizontal event anchor region, first row
    r2: int = 32          # horizontal event anchor region, last row
    sigma2: int = 3       # anchor jitter, +- rows
    h1: int = 15          # slice height, lower bound
    h2: int = 30          # slice height, upper bound
    m: int = 2            # maximum information loss, rows
    d: int = 3            # pixel shift magnitude, columns

    def __post_init__(self) -> None:
        if not 1 <= self.n1 <= self.n2:
            raise InvalidParameterError(f"need 1 <= n1 <= n2, got n1={self.n1}, n2={self.n2}")
        if self.h1 > self.h2:
            raise InvalidParameterError(f"need h1 <= h2, got h1={self.h1}, h2={self.h2}")
        if self.r1 > self.r2:
            raise InvalidParameterError(f"need r1 <= r2, got r1={self.r1}, r2={self.r2}")
        if self.m < 0 or self.d < 0:
            raise InvalidParameterError("m and d must be non-negative")
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise InvalidParameterError("sigma1 and sigma2 must be non-negative")
        if not 0 <= self.c2 <= 255:
            raise InvalidParameterError(f"c2 must be a gray level in [0, 255], got {self.c2}")


@dataclass(frozen=True)
class HorizontalEvent:
    """One scan-band defect: rows [anchor, anchor+height) lose the top
    loss_rows rows and are shifted sideways by shift_cols."""

    anchor_row: int
    slice_height: int
    loss_rows: int
    shift_cols: int

    def to_dict(self) -> dict:
        return {
            "anchor_row": self.anchor_row,
            "slice_height": self.slice_height,
            "loss_rows": self.loss_rows,
            "shift_cols": self.shift_cols,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HorizontalEvent":
        return cls(
            anchor_row=int(d["anchor_row"]),
            slice_height=int(d["slice_height"]),
            loss_rows=int(d["loss_rows"]),
            shift_cols=int(d["shift_cols"]),
        )


@dataclass(frozen=True)
class NoisePlan:
    """A replayable noise realization: stripe columns plus one optional
    horizontal event."""

    vertical_columns: tuple[int, ...] = field(default_factory=tuple)
    horizontal_event: HorizontalEvent | None = None

    def __post_init__(self) -> None:
        cols = tuple(int(c) for c in self.vertical_columns)
        if any(b <= a for a, b in zip(cols, cols[1:])):
            raise InvalidParameterError(f"vertical_columns must be strictly increasing, got {cols}")
        object.__setattr__(self, "vertical_columns", cols)

    def validate_for(self, width: int, height: int) -> None:
        if self.vertical_columns and not (0 <= self.vertical_columns[0] and self.vertical_columns[-1] < width):
            raise InvalidParameterError(f"plan columns {self.vertical_columns} outside [0, {width})")
        ev = self.horizontal_event
        if ev is not None:
            if ev.anchor_row < 0 or ev.slice_height < 1 or ev.anchor_row + ev.slice_height > height:
                raise InvalidParameterError(
                    f"event rows [{ev.anchor_row}, {ev.anchor_row + ev.slice_height}) outside height {height}"
                )
            if ev.loss_rows < 0 or ev.loss_rows >= ev.slice_height:
                raise InvalidParameterError(f"loss_rows {ev.loss_rows} must be in [0, slice_height)")
            if abs(ev.shift_cols) >= width:
                raise InvalidParameterError(f"shift_cols {ev.shift_cols} exceeds width {width}")

    def to_dict(self) -> dict:
        return {
            "vertical_columns": list(self.vertical_columns),
            "horizontal_event": self.horizontal_event.to_dict() if self.horizontal_event else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoisePlan":
        ev = d.get("horizontal_event")
        return cls(
            vertical_columns=tuple(int(c) for c in d["vertical_columns"]),
            horizontal_event=HorizontalEvent.from_dict(ev) if ev else None,
        )


def plan_noise(
    params: NoiseParams,
    width: int,
    height: int,
    rng: np.random.Generator,
    with_event: bool = True,
) -> NoisePlan:
    """Sample one noise realization for a width x height frame.

    The n vertical lines start from evenly spaced nominal columns
    round((k+1) * width / (n+1)) and each gets an independent integer jitter
    in [-sigma1, +sigma1]; out-of-frame positions are clamped and collisions
    deduplicated. The horizontal event anchor is uniform over
    [r1 - sigma2, r2 + sigma2] (floored at 0), the slice height uniform in
    [h1, h2], the information loss uniform in [0, m], and the shift is +-d
    with equal probability.
    """
    if width <= params.n2:
        raise InvalidParameterError(f"width {width} must exceed n2={params.n2} to place distinct lines")
    if with_event and height < params.r2 + params.sigma2 + params.h2:
        raise InvalidParameterError(
            f"height {height} too small for event region r2+sigma2+h2="
            f"{params.r2 + params.sigma2 + params.h2}"
        )

    n = int(rng.integers(params.n1, params.n2 + 1))
    ks = np.arange(1, n + 1, dtype=np.float64)
    nominal = round_half_away(ks * width / (n + 1)).astype(np.int64)
    jitter = rng.integers(-params.sigma1, params.sigma1 + 1, size=n)
    cols = np.clip(nominal + jitter, 0, width - 1)
    cols = np.unique(cols)

    event = None
    if with_event:
        lo = max(0, params.r1 - params.sigma2)
        hi = params.r2 + params.sigma2
        anchor = int(rng.integers(lo, hi + 1))
        slice_height = int(rng.integers(params.h1, params.h2 + 1))
        loss = int(rng.integers(0, params.m + 1))
        shift = params.d if rng.integers(0, 2) == 1 else -params.d
        event = HorizontalEvent(anchor, slice_height, loss, shift)

    return NoisePlan(tuple(int(c) for c in cols), event)


def _shift_rows(block: np.ndarray, shift: int, fill: int) -> np.ndarray:
    """Displace every row of a block horizontally, filling vacated columns."""
    out = np.full_like(block, fill)
    if shift == 0:
        return block.copy()
    if shift > 0:
        out[:, shift:] = block[:, :-shift]
    else:
        out[:, :shift] = block[:, -shift:]
    return out


def _apply_event(block: np.ndarray, event: HorizontalEvent, fill: int) -> np.ndarray:
    """Information loss then sideways shift on one slice (image or mask)."""
    h = event.slice_height
    loss = event.loss_rows
    out = block.copy()
    if loss > 0:
        out[: h - loss] = block[loss:]
        out[h - loss:] = block[h - 1]  # replicate the last valid row
    return _shift_rows(out, event.shift_cols, fill)


def apply_noise(
    img: np.ndarray,
    mask: np.ndarray,
    plan: NoisePlan,
    c2: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply a sampled plan to an image and its mask.

    Vertical stripes overwrite image intensity only (anatomy under a stripe
    is unchanged). The horizontal event displaces mask rows and columns
    exactly like image rows and columns; vacated image columns are filled
    with c2 and vacated mask columns with the background class.
    """
    img = ensure_gray(img)
    mask = ensure_mask(mask)
    ensure_aligned(img, mask)
    if not 0 <= c2 <= 255:
        raise InvalidParameterError(f"c2 must be a gray level in [0, 255], got {c2}")
    height, width = img.shape
    plan.validate_for(width, height)

    out_img = img.copy()
    out_mask = mask.copy()

    if plan.vertical_columns:
        out_img[:, list(plan.vertical_columns)] = c2

    ev = plan.horizontal_event
    if ev is not None:
        rows = slice(ev.anchor_row, ev.anchor_row + ev.slice_height)
        out_img[rows] = _apply_event(out_img[rows], ev, fill=c2)
        out_mask[rows] = _apply_event(out_mask[rows], ev, fill=BACKGROUND_CLASS)

    return out_img, out_mask
