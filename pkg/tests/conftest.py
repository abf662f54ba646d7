"""Shared fixture builders: synthetic sources, annotations, datasets."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from pushbroom import write_png

LABELS = ("empty", "cancer cytoplasm", "nuclear", "rbc", "fibroblast")


def square(x0: int, y0: int, x1: int, y1: int) -> list[list[float]]:
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def annotation_doc(width: int, height: int, shapes: list[tuple[str, list]]) -> dict:
    return {
        "imageWidth": width,
        "imageHeight": height,
        "shapes": [{"label": label, "points": points} for label, points in shapes],
    }


def write_source(
    directory: Path,
    stem: str,
    rng: np.random.Generator,
    width: int = 96,
    height: int = 72,
    shapes: list[tuple[str, list]] | None = None,
) -> None:
    """One RGB PNG plus its sibling annotation JSON."""
    rgb = rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
    write_png(directory / f"{stem}.png", rgb)
    if shapes is None:
        shapes = [
            ("cancer cytoplasm", square(5, 5, width // 2, height // 2)),
            ("nuclear", square(10, 10, 20, 20)),
        ]
    doc = annotation_doc(width, height, shapes)
    (directory / f"{stem}.json").write_text(json.dumps(doc), "utf-8")


def make_source_dir(
    root: Path,
    count: int,
    seed: int = 7,
    width: int = 96,
    height: int = 72,
    types: bool = True,
) -> Path:
    """A directory of `count` synthetic sources, cycling type labels 1..7."""
    directory = root / "sources"
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        prefix = f"t{(i % 7) + 1}_" if types else ""
        write_source(directory, f"{prefix}s{i:03d}", rng, width, height)
    return directory


def make_originals_dir(
    root: Path,
    count: int,
    seed: int = 11,
    width: int = 80,
    height: int = 60,
    types: bool = True,
) -> Path:
    """A directory of original grayscale images with 3-class masks."""
    directory = root / "originals"
    (directory / "images").mkdir(parents=True, exist_ok=True)
    (directory / "masks").mkdir(exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(count):
        prefix = f"t{(i % 7) + 1}_" if types else ""
        stem = f"{prefix}h{i:03d}"
        img = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
        mask = rng.integers(0, 3, size=(height, width)).astype(np.uint8)
        write_png(directory / "images" / f"{stem}.png", img)
        write_png(directory / "masks" / f"{stem}.png", mask)
    return directory


def textured_image(
    rng: np.random.Generator, width: int = 640, height: int = 480, low: int = 0, high: int = 100
) -> np.ndarray:
    """Busy texture with no uniform columns, values well away from 128."""
    return rng.integers(low, high, size=(height, width), dtype=np.uint8)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
