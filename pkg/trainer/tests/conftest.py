"""Shared fixtures: tiny datasets written in the manifest+PNG layout the
augmentation pipeline produces, built by hand so these tests exercise the
file format and nothing else."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image


def write_png(path: Path, arr: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr.astype(np.uint8), mode="L").save(path, format="PNG")


def write_manifest(root: Path, rows: list[dict]) -> Path:
    header = {"schema": "pushbroom-manifest/1", "master_seed": 0, "config": {}, "count": len(rows)}
    lines = [json.dumps(header, sort_keys=True)]
    lines += [json.dumps(row, sort_keys=True) for row in rows]
    path = root / "manifest.jsonl"
    path.write_text("\n".join(lines) + "\n", "utf-8")
    return path


def toy_pair(rng: np.random.Generator, size: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """One image/mask pair where intensity bands identify the classes:
    background near 30, class 1 near 140, class 2 near 230."""
    mask = np.zeros((size, size), dtype=np.uint8)
    x0, y0 = int(rng.integers(2, size // 3)), int(rng.integers(2, size // 3))
    x1, y1 = int(rng.integers(2 * size // 3, size - 1)), int(rng.integers(2 * size // 3, size - 1))
    mask[y0:y1, x0:x1] = 1
    ix0, iy0 = (x0 + x1) // 2 - (x1 - x0) // 4, (y0 + y1) // 2 - (y1 - y0) // 4
    ix1, iy1 = ix0 + max(2, (x1 - x0) // 3), iy0 + max(2, (y1 - y0) // 3)
    mask[iy0:iy1, ix0:ix1] = 2
    levels = np.array([30, 140, 230], dtype=np.int16)
    image = levels[mask] + rng.integers(-8, 9, size=mask.shape, dtype=np.int16)
    return np.clip(image, 0, 255).astype(np.uint8), mask


def make_toy_dataset(root: Path, count: int, size: int = 32, seed: int = 0) -> Path:
    """A `count`-record dataset of toy pairs; returns the manifest path."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        image, mask = toy_pair(rng, size)
        rec_id = f"toy{i:03d}"
        write_png(root / "images" / f"{rec_id}.png", image)
        write_png(root / "masks" / f"{rec_id}.png", mask)
        rows.append(
            {
                "id": rec_id,
                "kind": "original",
                "source_id": rec_id,
                "type_label": i % 3 + 1,
                "image_path": f"images/{rec_id}.png",
                "mask_path": f"masks/{rec_id}.png",
                "seed": i,
                "noise_plan": None,
                "transform": None,
            }
        )
    return write_manifest(root, rows)


def make_band_dataset(root: Path, count: int, size: int = 32, seed: int = 7) -> Path:
    """A dataset of horizontal three-band scenes. Band edges vary per image
    but every class occupies a wide contiguous stripe, so a model that has
    genuinely memorised the set can reproduce the masks almost exactly."""
    rng = np.random.default_rng(seed)
    levels = np.array([30, 140, 230], dtype=np.int16)
    rows = []
    for i in range(count):
        top = int(rng.integers(size // 4, size // 2 - 2))
        bottom = int(rng.integers(size // 2 + 3, size - 6))
        mask = np.zeros((size, size), dtype=np.uint8)
        mask[top:bottom] = 1
        mask[bottom:] = 2
        image = levels[mask] + rng.integers(-8, 9, size=mask.shape, dtype=np.int16)
        rec_id = f"band{i:03d}"
        write_png(root / "images" / f"{rec_id}.png", np.clip(image, 0, 255).astype(np.uint8))
        write_png(root / "masks" / f"{rec_id}.png", mask)
        rows.append(
            {
                "id": rec_id,
                "kind": "original",
                "source_id": rec_id,
                "type_label": 1,
                "image_path": f"images/{rec_id}.png",
                "mask_path": f"masks/{rec_id}.png",
                "seed": i,
                "noise_plan": None,
                "transform": None,
            }
        )
    return write_manifest(root, rows)


def class_iou(pred: np.ndarray, truth: np.ndarray, cls: int) -> float:
    """Plain numpy IoU for one class; empty-on-both-sides counts as 1."""
    p = pred == cls
    t = truth == cls
    union = np.count_nonzero(p | t)
    if union == 0:
        return 1.0
    return np.count_nonzero(p & t) / union
