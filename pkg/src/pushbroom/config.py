"""Augmentation configuration: built-in defaults, flat config files, and
key=value overrides.

Precedence is defaults < config file < overrides; the file format is plain
"key = value" lines with # comments, one key per line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidParameterError
from .geometry import GeoParams
from .imaging import SpectralParams
from .noise import NoiseParams

_INT_KEYS = {
    "c1", "n1", "n2", "sigma1", "c2", "r1", "r2", "sigma2", "h1", "h2",
    "m", "d", "cw", "ch", "target_width", "target_height",
    "pseudo_per_source", "master_seed",
}
_FLOAT_KEYS = {"gamma", "translate_frac"}
_BOOL_KEYS = {"include_originals"}
_LIST_KEYS = {"transforms"}

KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _LIST_KEYS


@dataclass(frozen=True)
class AugmentConfig:
    """Every pipeline knob, defaulting to the published parameter set."""

    spectral: SpectralParams = field(default_factory=SpectralParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    geo: GeoParams = field(default_factory=GeoParams)
    pseudo_per_source: int = 3
    include_originals: bool = True
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.pseudo_per_source < 1:
            raise InvalidParameterError(f"pseudo_per_source must be >= 1, got {self.pseudo_per_source}")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameterError("master_seed must fit in 64 unsigned bits")

    def to_flat_dict(self) -> dict:
        return {
            "gamma": self.spectral.gamma,
            "c1": self.spectral.c1,
            "n1": self.noise.n1,
            "n2": self.noise.n2,
            "sigma1": self.noise.sigma1,
            "c2": self.noise.c2,
            "r1": self.noise.r1,
            "r2": self.noise.r2,
            "sigma2": self.noise.sigma2,
            "h1": self.noise.h1,
            "h2": self.noise.h2,
            "m": self.noise.m,
            "d": self.noise.d,
            "cw": self.geo.cw,
            "ch": self.geo.ch,
            "transforms": list(self.geo.transforms),
            "target_width": self.geo.target_width,
            "target_height": self.geo.target_height,
            "translate_frac": self.geo.translate_frac,
            "pseudo_per_source": self.pseudo_per_source,
            "include_originals": self.include_originals,
            "master_seed": self.master_seed,
        }


def default_flat_dict() -> dict:
    """Flat view of the default configuration."""
    return AugmentConfig().to_flat_dict()


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError as exc:
            raise InvalidParameterError(f"{key}: expected an integer, got {raw!r}") from exc
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError as exc:
            raise InvalidParameterError(f"{key}: expected a number, got {raw!r}") from exc
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise InvalidParameterError(f"{key}: expected a boolean, got {raw!r}")
    if key in _LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    raise InvalidParameterError(f"unknown config key {key!r}")


def parse_config_file(path: str | Path) -> dict:
    """Read a flat key=value config file into a {key: parsed value} dict."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise InvalidParameterError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def parse_overrides(pairs: list[str]) -> dict:
    """Parse repeatable --set key=value flags."""
    values: dict = {}
    for pair in pairs:
        if "=" not in pair:
            raise InvalidParameterError(f"override {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise InvalidParameterError(f"unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def build_config(*layers: dict) -> AugmentConfig:
    """Merge flat dicts (later layers win) into an AugmentConfig."""
    flat = AugmentConfig().to_flat_dict()
    for layer in layers:
        for key in layer:
            if key not in KNOWN_KEYS:
                raise InvalidParameterError(f"unknown config key {key!r}")
        flat.update(layer)
    return AugmentConfig(
        spectral=SpectralParams(gamma=flat["gamma"], c1=flat["c1"]),
        noise=NoiseParams(
            n1=flat["n1"], n2=flat["n2"], sigma1=flat["sigma1"], c2=flat["c2"],
            r1=flat["r1"], r2=flat["r2"], sigma2=flat["sigma2"],
            h1=flat["h1"], h2=flat["h2"], m=flat["m"], d=flat["d"],
        ),
        geo=GeoParams(
            cw=flat["cw"], ch=flat["ch"], transforms=tuple(flat["transforms"]),
            target_width=flat["target_width"], target_height=flat["target_height"],
            translate_frac=flat["translate_frac"],
        ),
        pseudo_per_source=flat["pseudo_per_source"],
        include_originals=flat["include_originals"],
        master_seed=flat["master_seed"],
    )
