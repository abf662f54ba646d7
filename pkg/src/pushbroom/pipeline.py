"""End-to-end dataset generation.

Per source image: spectralize once, apply several independently sampled
noise realizations, then expand each pseudo-noisy sample with the configured
geometric transforms. Original hyperspectral images pass through unchanged
(aside from the uniform output resolution). Every record's randomness comes
from a seed derived from (master, source, realization, stage), so output is
byte-identical for any worker count.
"""
from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .annotations import load_palette, parse_annotations, rasterize
from .config import AugmentConfig
from .errors import InvalidInputError, InvalidParameterError, ManifestError, PushbroomError
from .geometry import Sample, apply_transform, ensure_target_dims, sample_transform
from .imaging import spectralize
from .manifest import DatasetManifest, ManifestRecord, write_manifest
from .noise import apply_noise, plan_noise
from .pngio import ensure_mask, read_gray_png, read_rgb_png, write_png
from .seeding import derive_seed

_TYPE_PATTERN = re.compile(r"^t(?:ype)?([1-7])[_-]")


@dataclass(frozen=True)
class SourceItem:
    """One ingested CMOS source: RGB image, rasterized mask, identity."""

    source_id: str
    rgb: np.ndarray
    mask: np.ndarray
    type_label: int


@dataclass(frozen=True)
class OriginalItem:
    """One original hyperspectral image with its mask."""

    source_id: str
    image: np.ndarray
    mask: np.ndarray
    type_label: int


def generate_pseudo(
    source: SourceItem, config: AugmentConfig
) -> list[tuple[Sample, ManifestRecord]]:
    """Spectralize one source and emit pseudo_per_source noise realizations."""
    spectral = spectralize(source.rgb, config.spectral)
    height, width = spectral.shape
    out = []
    for r in range(config.pseudo_per_source):
        seed = derive_seed(config.master_seed, source.source_id, r, "noise")
        rng = np.random.default_rng(seed)
        plan = plan_noise(config.noise, width, height, rng)
        img, mask = apply_noise(spectral, source.mask, plan, config.noise.c2)
        sample = Sample(img, mask, source.type_label, source.source_id)
        rec = ManifestRecord(
            id=f"{source.source_id}-p{r}",
            kind="pseudo",
            source_id=source.source_id,
            type_label=source.type_label,
            image_path="",  # filled by the writer
            mask_path="",
            seed=seed,
            noise_plan=plan,
        )
        out.append((sample, rec))
    return out


def expand_geo(
    pseudo: list[tuple[Sample, ManifestRecord]], config: AugmentConfig
) -> list[tuple[Sample, ManifestRecord]]:
    """Emit each pseudo sample unchanged plus one output per transform."""
    out = []
    for sample, rec in pseudo:
        out.append((sample, rec))
        realization = int(rec.id.rsplit("-p", 1)[1])
        for j, kind in enumerate(config.geo.transforms):
            seed = derive_seed(config.master_seed, rec.source_id, realization, f"geo{j}-{kind}")
            rng = np.random.default_rng(seed)
            tf = sample_transform(kind, sample.width, sample.height, config.geo, rng)
            transformed = apply_transform(sample, tf)
            out.append(
                (
                    transformed,
                    ManifestRecord(
                        id=f"{rec.id}-g{j}-{kind}",
                        kind="geo",
                        source_id=rec.source_id,
                        type_label=rec.type_label,
                        image_path="",
                        mask_path="",
                        seed=seed,
                        noise_plan=rec.noise_plan,
                        transform=tf,
                    ),
                )
            )
    return out


def regenerate(
    record: ManifestRecord, rgb: np.ndarray, mask: np.ndarray, config: AugmentConfig
) -> Sample:
    """Rebuild a pseudo/geo sample from its manifest record alone."""
    if record.kind == "original":
        raise InvalidInputError("originals are copies of their inputs; nothing to regenerate")
    spectral = spectralize(rgb, config.spectral)
    img, noisy_mask = apply_noise(spectral, mask, record.noise_plan, config.noise.c2)
    sample = Sample(img, noisy_mask, record.type_label, record.source_id)
    if record.transform is not None:
        sample = apply_transform(sample, record.transform)
    return ensure_target_dims(sample, config.geo.target_width, config.geo.target_height)


def read_type_labels(directory: Path) -> dict[str, int]:
    """Optional types.json ({stem: 1..7}) mapping for a source directory."""
    path = directory / "types.json"
    if not path.is_file():
        return {}
    try:
        raw = json.loads(path.read_text("utf-8"))
        return {str(k): int(v) for k, v in raw.items()}
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"{path}: bad types.json: {exc}") from exc


def _type_label_for(stem: str, table: dict[str, int]) -> int:
    if stem in table:
        return table[stem]
    match = _TYPE_PATTERN.match(stem)
    return int(match.group(1)) if match else 1


def ingest_sources(directory: str | Path, palette: dict[str, int] | None = None) -> list[SourceItem]:
    """Load every RGB PNG with its sibling annotation JSON.

    All annotation problems are collected and reported together; nothing is
    generated from a directory with a bad document.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InvalidInputError(f"source directory not found: {directory}")
    palette = palette if palette is not None else load_palette()
    types = read_type_labels(directory)
    items = []
    failures = []
    pngs = sorted(directory.glob("*.png"))
    if not pngs:
        raise InvalidInputError(f"no PNG sources in {directory}")
    for png in pngs:
        ann = png.with_suffix(".json")
        if not ann.is_file():
            failures.append(f"{png.name}: missing annotation {ann.name}")
            continue
        try:
            rgb = read_rgb_png(png)
            doc = parse_annotations(ann.read_text("utf-8"), palette, source=str(ann))
            if (doc.image_width, doc.image_height) != (rgb.shape[1], rgb.shape[0]):
                raise InvalidInputError(
                    f"annotation dims {doc.image_width}x{doc.image_height} "
                    f"differ from image {rgb.shape[1]}x{rgb.shape[0]}"
                )
            mask = rasterize(doc, palette)
        except PushbroomError as exc:
            failures.append(f"{png.name}: {exc}")
            continue
        items.append(SourceItem(png.stem, rgb, mask, _type_label_for(png.stem, types)))
    if failures:
        raise InvalidInputError(
            "source ingestion failed for {} file(s):\n  {}".format(len(failures), "\n  ".join(failures))
        )
    return items


def ingest_originals(directory: str | Path) -> list[OriginalItem]:
    """Load original grayscale images from images/ with masks from masks/."""
    directory = Path(directory)
    img_dir = directory / "images"
    mask_dir = directory / "masks"
    if not img_dir.is_dir() or not mask_dir.is_dir():
        raise InvalidInputError(f"originals directory needs images/ and masks/: {directory}")
    types = read_type_labels(directory)
    items = []
    failures = []
    pngs = sorted(img_dir.glob("*.png"))
    for png in pngs:
        mask_path = mask_dir / png.name
        if not mask_path.is_file():
            failures.append(f"{png.name}: missing mask {mask_path.name}")
            continue
        try:
            image = read_gray_png(png)
            mask = ensure_mask(read_gray_png(mask_path), name=str(mask_path))
            if image.shape != mask.shape:
                raise InvalidInputError(f"mask dims {mask.shape} differ from image {image.shape}")
        except PushbroomError as exc:
            failures.append(f"{png.name}: {exc}")
            continue
        items.append(OriginalItem(png.stem, image, mask, _type_label_for(png.stem, types)))
    if failures:
        raise InvalidInputError(
            "originals ingestion failed for {} file(s):\n  {}".format(len(failures), "\n  ".join(failures))
        )
    return items


def _emit(sample: Sample, rec: ManifestRecord, out_dir: Path, config: AugmentConfig) -> ManifestRecord:
    final = ensure_target_dims(sample, config.geo.target_width, config.geo.target_height)
    image_rel = f"images/{rec.id}.png"
    mask_rel = f"masks/{rec.id}.png"
    write_png(out_dir / image_rel, final.image)
    write_png(out_dir / mask_rel, final.mask)
    return ManifestRecord(
        id=rec.id,
        kind=rec.kind,
        source_id=rec.source_id,
        type_label=rec.type_label,
        image_path=image_rel,
        mask_path=mask_rel,
        seed=rec.seed,
        noise_plan=rec.noise_plan,
        transform=rec.transform,
    )


def _source_job(source: SourceItem, config: AugmentConfig, out_dir: Path) -> list[ManifestRecord]:
    emitted = expand_geo(generate_pseudo(source, config), config)
    return [_emit(sample, rec, out_dir, config) for sample, rec in emitted]


def _original_job(item: OriginalItem, config: AugmentConfig, out_dir: Path) -> ManifestRecord:
    sample = Sample(item.image, item.mask, item.type_label, item.source_id)
    rec = ManifestRecord(
        id=f"orig-{item.source_id}",
        kind="original",
        source_id=item.source_id,
        type_label=item.type_label,
        image_path="",
        mask_path="",
        seed=derive_seed(config.master_seed, item.source_id, 0, "original"),
    )
    return _emit(sample, rec, out_dir, config)


def run_pipeline(
    config: AugmentConfig,
    sources_dir: str | Path,
    out_dir: str | Path,
    originals_dir: str | Path | None = None,
    workers: int = 1,
    palette: dict[str, int] | None = None,
) -> DatasetManifest:
    """Generate the full training set and write its manifest.

    Record order, file names, and bytes are functions of (config, inputs)
    only; the worker count changes wall time, never output.
    """
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    sources = ingest_sources(sources_dir, palette)
    originals: list[OriginalItem] = []
    if originals_dir is not None and config.include_originals:
        originals = ingest_originals(originals_dir)

    records: list[ManifestRecord] = []
    if workers == 1:
        for item in originals:
            records.append(_original_job(item, config, out_dir))
        for source in sources:
            records.extend(_source_job(source, config, out_dir))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            orig_futures = [pool.submit(_original_job, item, config, out_dir) for item in originals]
            src_futures = [pool.submit(_source_job, source, config, out_dir) for source in sources]
            records.extend(f.result() for f in orig_futures)
            for f in src_futures:
                records.extend(f.result())

    manifest = DatasetManifest(
        records=records,
        master_seed=config.master_seed,
        config=config.to_flat_dict(),
    )
    write_manifest(manifest, out_dir / "manifest.jsonl")
    return manifest


def balanced_subset(
    manifest: DatasetManifest, k: int, rng: np.random.Generator
) -> DatasetManifest:
    """Sample exactly k records per type, without replacement.

    Output order is normalized to (type_label, id) so equal selections
    compare equal regardless of input order.
    """
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    groups = manifest.by_type()
    chosen: list[ManifestRecord] = []
    for type_label in sorted(groups):
        group = sorted(groups[type_label], key=lambda r: r.id)
        if len(group) < k:
            raise ManifestError(
                f"type {type_label} has only {len(group)} records, need {k}"
            )
        idx = rng.choice(len(group), size=k, replace=False)
        chosen.extend(group[i] for i in sorted(int(i) for i in idx))
    chosen.sort(key=lambda r: (r.type_label, r.id))
    return DatasetManifest(
        records=chosen,
        master_seed=manifest.master_seed,
        config=dict(manifest.config),
    )
