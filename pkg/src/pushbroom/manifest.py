"""Dataset manifest: the provenance ledger for every emitted file.

The on-disk format is newline-delimited JSON with a schema-versioned header
line, so manifests stream and diff cleanly. Each record carries enough to
regenerate its file from the raw source alone (seed, noise plan, transform).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ManifestError
from .geometry import TransformRecord
from .noise import NoisePlan

SCHEMA = "pushbroom-manifest/1"

KINDS = ("original", "pseudo", "geo")


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    kind: str
    source_id: str
    type_label: int
    image_path: str
    mask_path: str
    seed: int
    noise_plan: NoisePlan | None = None
    transform: TransformRecord | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ManifestError(f"record {self.id}: unknown kind {self.kind!r}")
        if self.kind in ("pseudo", "geo") and self.noise_plan is None:
            raise ManifestError(f"record {self.id}: {self.kind} records must carry a noise plan")
        if self.kind == "geo" and self.transform is None:
            raise ManifestError(f"record {self.id}: geo records must carry a transform")
        if self.kind == "original" and (self.noise_plan or self.transform):
            raise ManifestError(f"record {self.id}: originals carry neither plan nor transform")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "source_id": self.source_id,
            "type_label": self.type_label,
            "image_path": self.image_path,
            "mask_path": self.mask_path,
            "seed": self.seed,
            "noise_plan": self.noise_plan.to_dict() if self.noise_plan else None,
            "transform": self.transform.to_dict() if self.transform else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ManifestRecord":
        plan = d.get("noise_plan")
        tf = d.get("transform")
        return cls(
            id=str(d["id"]),
            kind=str(d["kind"]),
            source_id=str(d["source_id"]),
            type_label=int(d["type_label"]),
            image_path=str(d["image_path"]),
            mask_path=str(d["mask_path"]),
            seed=int(d["seed"]),
            noise_plan=NoisePlan.from_dict(plan) if plan else None,
            transform=TransformRecord.from_dict(tf) if tf else None,
        )


@dataclass
class DatasetManifest:
    records: list[ManifestRecord] = field(default_factory=list)
    master_seed: int = 0
    config: dict = field(default_factory=dict)

    def by_kind(self, kind: str) -> list[ManifestRecord]:
        return [r for r in self.records if r.kind == kind]

    def by_type(self) -> dict[int, list[ManifestRecord]]:
        groups: dict[int, list[ManifestRecord]] = {}
        for rec in self.records:
            groups.setdefault(rec.type_label, []).append(rec)
        return groups


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    """Write JSONL atomically: the final rename happens only after every
    record line hit the temp file, so a crash never leaves a valid manifest
    pointing at partial data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "schema": SCHEMA,
        "master_seed": manifest.master_seed,
        "config": manifest.config,
        "count": len(manifest.records),
    }
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in manifest.records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ManifestError(f"{path}: empty manifest")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}:1: bad header: {exc.msg}") from exc
    if header.get("schema") != SCHEMA:
        raise ManifestError(f"{path}: unsupported schema {header.get('schema')!r}, expected {SCHEMA}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            records.append(ManifestRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ManifestError(f"{path}:{lineno}: bad record: {exc}") from exc
    declared = header.get("count")
    if declared is not None and declared != len(records):
        raise ManifestError(f"{path}: header declares {declared} records, found {len(records)}")
    return DatasetManifest(
        records=records,
        master_seed=int(header.get("master_seed", 0)),
        config=dict(header.get("config", {})),
    )


def check_integrity(manifest: DatasetManifest, root: str | Path) -> None:
    """Fail if any record references a missing file."""
    root = Path(root)
    missing = []
    for rec in manifest.records:
        for rel in (rec.image_path, rec.mask_path):
            if not (root / rel).is_file():
                missing.append(f"{rec.id}: {rel}")
    if missing:
        raise ManifestError("manifest references missing files:\n  " + "\n  ".join(missing))
