"""Dataset access: the JSONL manifest + PNG layout the augmentation
pipeline emits (schema pushbroom-manifest/1).

Only the consumer-facing fields are read: record id, kind, image/mask
paths, and type label. Paths are relative to the manifest's directory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidDataError, InvalidParameterError

MANIFEST_SCHEMA = "pushbroom-manifest/1"
RECORD_KINDS = ("original", "pseudo", "geo")


@dataclass(frozen=True)
class DataRecord:
    id: str
    kind: str
    image_path: Path
    mask_path: Path
    type_label: int


def read_manifest_records(
    manifest_path: str | Path,
    kinds: tuple[str, ...] | None = None,
) -> list[DataRecord]:
    """Parse a dataset manifest, optionally keeping only some record kinds."""
    manifest_path = Path(manifest_path)
    if kinds is not None:
        unknown = [k for k in kinds if k not in RECORD_KINDS]
        if unknown:
            raise InvalidParameterError(f"unknown record kinds {unknown}; valid: {RECORD_KINDS}")
    if not manifest_path.is_file():
        raise InvalidDataError(f"manifest not found: {manifest_path}")
    root = manifest_path.parent

    records: list[DataRecord] = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidDataError(f"{manifest_path}:{lineno}: not JSON: {exc}") from exc
            if lineno == 1:
                schema = row.get("schema")
                if schema != MANIFEST_SCHEMA:
                    raise InvalidDataError(
                        f"{manifest_path}: expected schema {MANIFEST_SCHEMA!r}, got {schema!r}"
                    )
                continue
            try:
                record = DataRecord(
                    id=str(row["id"]),
                    kind=str(row["kind"]),
                    image_path=root / row["image_path"],
                    mask_path=root / row["mask_path"],
                    type_label=int(row.get("type_label", 1)),
                )
            except KeyError as exc:
                raise InvalidDataError(f"{manifest_path}:{lineno}: missing field {exc}") from exc
            if kinds is None or record.kind in kinds:
                records.append(record)
    return records


def _load_png(path: Path, record_id: str, what: str) -> np.ndarray:
    try:
        with Image.open(path) as img:
            arr = np.asarray(img)
    except FileNotFoundError as exc:
        raise InvalidDataError(f"record {record_id}: missing {what} {path}") from exc
    except Exception as exc:
        raise InvalidDataError(f"record {record_id}: unreadable {what} {path}: {exc}") from exc
    if arr.ndim == 3:
        arr = arr[..., 0]
    if arr.dtype != np.uint8:
        raise InvalidDataError(f"record {record_id}: {what} {path} is not 8-bit")
    return arr


class SegmentationDataset:
    """Image/mask pairs as torch-ready arrays.

    Images come out as float32 in [0, 1] shaped (1, H, W); masks as int64
    class indices shaped (H, W). Bad files raise with the record id.
    """

    def __init__(
        self,
        manifest_path: str | Path,
        kinds: tuple[str, ...] | None = None,
        num_classes: int = 5,
    ) -> None:
        self.records = read_manifest_records(manifest_path, kinds)
        self.num_classes = num_classes

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int) -> tuple[np.ndarray, np.ndarray, str]:
        rec = self.records[index]
        image = _load_png(rec.image_path, rec.id, "image")
        mask = _load_png(rec.mask_path, rec.id, "mask")
        if image.shape != mask.shape:
            raise InvalidDataError(
                f"record {rec.id}: image {image.shape} vs mask {mask.shape}"
            )
        if int(mask.max(initial=0)) >= self.num_classes:
            raise InvalidDataError(
                f"record {rec.id}: mask labels exceed {self.num_classes - 1}"
            )
        x = (image.astype(np.float32) / 255.0)[None, :, :]
        y = mask.astype(np.int64)
        return x, y, rec.id
