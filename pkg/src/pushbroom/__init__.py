"""Deterministic pseudo-hyperspectral training data synthesis and evaluation.

Clean RGB microscope images go in; grayscale images that look like they came
off a push-broom scanner (spectral compression, stripe lines, scan-band
glitches) come out, together with co-transformed segmentation masks and a
replayable manifest. The evaluation side scores predicted masks and can
verify that generated images actually carry the injected artifacts.
"""
from .annotations import (
    AnnotationDoc,
    HYPERSPECTRAL_CLASSES,
    Polygon,
    harmonize_hyperspectral,
    load_palette,
    parse_annotations,
    rasterize,
)
from .config import AugmentConfig, build_config, parse_config_file, parse_overrides
from .errors import (
    AnnotationParseError,
    InvalidInputError,
    InvalidParameterError,
    LabelMappingError,
    ManifestError,
    PushbroomError,
)
from .evaluation import (
    ConfusionCounts,
    EvalItem,
    EvalReport,
    NoiseProfile,
    TypeReport,
    analyze_types,
    confusion,
    dice,
    evaluate,
    iou,
    profile_noise,
)
from .geometry import (
    GeoParams,
    Sample,
    TransformRecord,
    apply_transform,
    crop,
    ensure_target_dims,
    flip,
    resize_bilinear,
    resize_nearest,
    sample_crop_rect,
    sample_transform,
    translate,
)
from .imaging import (
    SpectralParams,
    add_constant_saturating,
    equalize_histogram,
    gamma_correct,
    round_half_away,
    spectralize,
    to_grayscale,
)
from .manifest import (
    DatasetManifest,
    ManifestRecord,
    check_integrity,
    read_manifest,
    write_manifest,
)
from .noise import HorizontalEvent, NoiseParams, NoisePlan, apply_noise, plan_noise
from .pipeline import (
    OriginalItem,
    SourceItem,
    balanced_subset,
    expand_geo,
    generate_pseudo,
    ingest_originals,
    ingest_sources,
    regenerate,
    run_pipeline,
)
from .pngio import (
    NUM_CLASSES,
    ensure_gray,
    ensure_mask,
    ensure_rgb,
    read_gray_png,
    read_png,
    read_rgb_png,
    write_png,
)
from .seeding import derive_seed, fnv1a64, splitmix64

__version__ = "0.1.0"

__all__ = [
    "AnnotationDoc",
    "AnnotationParseError",
    "AugmentConfig",
    "ConfusionCounts",
    "DatasetManifest",
    "EvalItem",
    "EvalReport",
    "GeoParams",
    "HYPERSPECTRAL_CLASSES",
    "HorizontalEvent",
    "InvalidInputError",
    "InvalidParameterError",
    "LabelMappingError",
    "ManifestError",
    "ManifestRecord",
    "NUM_CLASSES",
    "NoiseParams",
    "NoisePlan",
    "NoiseProfile",
    "OriginalItem",
    "Polygon",
    "PushbroomError",
    "Sample",
    "SourceItem",
    "SpectralParams",
    "TransformRecord",
    "TypeReport",
    "add_constant_saturating",
    "analyze_types",
    "apply_noise",
    "apply_transform",
    "balanced_subset",
    "build_config",
    "check_integrity",
    "confusion",
    "crop",
    "derive_seed",
    "dice",
    "ensure_gray",
    "ensure_mask",
    "ensure_rgb",
    "ensure_target_dims",
    "equalize_histogram",
    "evaluate",
    "expand_geo",
    "flip",
    "fnv1a64",
    "gamma_correct",
    "generate_pseudo",
    "harmonize_hyperspectral",
    "ingest_originals",
    "ingest_sources",
    "iou",
    "load_palette",
    "parse_annotations",
    "parse_config_file",
    "parse_overrides",
    "plan_noise",
    "profile_noise",
    "rasterize",
    "read_gray_png",
    "read_manifest",
    "read_png",
    "read_rgb_png",
    "regenerate",
    "resize_bilinear",
    "resize_nearest",
    "round_half_away",
    "run_pipeline",
    "sample_crop_rect",
    "sample_transform",
    "spectralize",
    "splitmix64",
    "to_grayscale",
    "translate",
    "write_manifest",
    "write_png",
]
