"""Command-line entry points.

Exit codes: 0 on success, 1 for usage problems (bad flags, unknown --set
keys), 2 for data problems (unreadable inputs, bad annotations, manifest
errors).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .config import build_config, default_flat_dict, parse_config_file, parse_overrides
from .errors import PushbroomError
from .evaluation import EvalItem, analyze_types, evaluate, profile_noise
from .imaging import round_half_away
from .manifest import check_integrity, read_manifest, write_manifest
from .pipeline import balanced_subset, read_type_labels, run_pipeline
from .pngio import read_gray_png, write_png

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage by default; we reserve 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="pushbroom", description="Pseudo-hyperspectral dataset tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p_aug = sub.add_parser("augment", help="generate pseudo-noisy training data")
    p_aug.add_argument("--sources", required=True, help="directory of RGB PNGs + annotation JSONs")
    p_aug.add_argument("--originals", help="directory with images/ and masks/ of originals")
    p_aug.add_argument("--out", required=True, help="output dataset directory")
    p_aug.add_argument("--config", help="key = value config file")
    p_aug.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p_aug.add_argument("--seed", type=int, help="master seed (overrides config)")
    p_aug.add_argument("--workers", type=int, default=1)

    p_eval = sub.add_parser("evaluate", help="score predicted masks against truth masks")
    p_eval.add_argument("--pred", required=True, help="directory of predicted mask PNGs")
    p_eval.add_argument("--truth", required=True, help="directory of ground-truth mask PNGs")
    p_eval.add_argument("--classes", default="1", help="comma-separated class indices")
    p_eval.add_argument("--empty", choices=("one", "skip"), default="one")
    p_eval.add_argument("--per-image", action="store_true", help="include per-image rows")
    p_eval.add_argument("--format", choices=("json", "table", "csv"), default="table")
    p_eval.add_argument("--out", help="write the report here instead of stdout")

    p_prof = sub.add_parser("profile", help="detect stripe columns and scan-band rows")
    p_prof.add_argument("images", nargs="+", help="grayscale PNGs to profile")
    p_prof.add_argument("--uniformity", type=float, default=0.95)
    p_prof.add_argument("--contrast", type=float, default=8.0)
    p_prof.add_argument("--row-factor", type=float, default=4.0)
    p_prof.add_argument("--format", choices=("json", "table", "csv"), default="table")
    p_prof.add_argument("--out", help="write the report here instead of stdout")

    p_type = sub.add_parser("analyze-types", help="per-type mean images and histograms")
    p_type.add_argument("--manifest", required=True, help="manifest.jsonl of a generated dataset")
    p_type.add_argument("--root", help="dataset root (defaults to the manifest's directory)")
    p_type.add_argument("--out", required=True, help="directory for mean/histogram PNGs")
    p_type.add_argument("--format", choices=("json", "table", "csv"), default="table")

    p_sub = sub.add_parser("subset", help="draw a type-balanced subset of a manifest")
    p_sub.add_argument("--manifest", required=True)
    p_sub.add_argument("-k", type=int, required=True, help="records per type")
    p_sub.add_argument("--seed", type=int, default=0)
    p_sub.add_argument("--out", required=True, help="path for the subset manifest")

    p_cfg = sub.add_parser("show-config", help="print the effective configuration")
    p_cfg.add_argument("--config", help="key = value config file")
    p_cfg.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p_cfg.add_argument("--format", choices=("json", "table"), default="table")
    return parser


def _emit_text(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


def _render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if not rows:
        return ""
    headers = list(rows[0].keys())
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=headers)
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    cells = [[str(r.get(h, "")) for h in headers] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    for c in cells:
        lines.append("  ".join(c[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines) + "\n"


class _UsageError(Exception):
    pass


def _resolve_config(args) -> "AugmentConfig":
    layers = [default_flat_dict()]
    if getattr(args, "config", None):
        layers.append(parse_config_file(args.config))
    if getattr(args, "overrides", None):
        try:
            layers.append(parse_overrides(args.overrides))
        except PushbroomError as exc:
            # bad --set syntax or an unknown key is a command-line mistake
            raise _UsageError(str(exc)) from exc
    if getattr(args, "seed", None) is not None:
        layers.append({"master_seed": int(args.seed)})
    return build_config(*layers)


def _cmd_augment(args) -> int:
    config = _resolve_config(args)
    manifest = run_pipeline(
        config,
        sources_dir=args.sources,
        out_dir=args.out,
        originals_dir=args.originals,
        workers=args.workers,
    )
    kinds = {}
    for rec in manifest.records:
        kinds[rec.kind] = kinds.get(rec.kind, 0) + 1
    parts = ", ".join(f"{kinds[k]} {k}" for k in sorted(kinds))
    print(f"wrote {len(manifest.records)} records ({parts}) to {args.out}")
    return 0


def _score_rows(report, per_image: bool) -> list[dict]:
    rows = []
    for c, score in sorted(report.per_class.items()):
        rows.append(
            {
                "scope": "all",
                "class": c,
                "images": score.images,
                "micro_iou": f"{score.micro_iou:.6f}",
                "micro_dice": f"{score.micro_dice:.6f}",
                "macro_iou": f"{score.macro_iou:.6f}",
                "macro_dice": f"{score.macro_dice:.6f}",
            }
        )
    for t, by_class in sorted(report.per_type.items()):
        for c, score in sorted(by_class.items()):
            rows.append(
                {
                    "scope": f"type{t}",
                    "class": c,
                    "images": score.images,
                    "micro_iou": f"{score.micro_iou:.6f}",
                    "micro_dice": f"{score.micro_dice:.6f}",
                    "macro_iou": f"{score.macro_iou:.6f}",
                    "macro_dice": f"{score.macro_dice:.6f}",
                }
            )
    if per_image:
        for r in report.per_image:
            rows.append(
                {
                    "scope": r["id"],
                    "class": r["class"],
                    "images": 1,
                    "micro_iou": f"{r['iou']:.6f}",
                    "micro_dice": f"{r['dice']:.6f}",
                    "macro_iou": f"{r['iou']:.6f}",
                    "macro_dice": f"{r['dice']:.6f}",
                }
            )
    return rows


def _cmd_evaluate(args) -> int:
    pred_dir, truth_dir = Path(args.pred), Path(args.truth)
    if not pred_dir.is_dir():
        raise PushbroomError(f"prediction directory not found: {pred_dir}")
    if not truth_dir.is_dir():
        raise PushbroomError(f"truth directory not found: {truth_dir}")
    try:
        classes = tuple(int(c) for c in args.classes.split(",") if c.strip())
    except ValueError:
        print(f"pushbroom evaluate: error: bad --classes value: {args.classes}", file=sys.stderr)
        return USAGE_ERROR
    types = read_type_labels(truth_dir)
    items = []
    for pred_path in sorted(pred_dir.glob("*.png")):
        truth_path = truth_dir / pred_path.name
        if not truth_path.is_file():
            raise PushbroomError(f"no truth mask for {pred_path.name}")
        items.append(
            EvalItem(
                id=pred_path.stem,
                pred=read_gray_png(pred_path),
                truth=read_gray_png(truth_path),
                type_label=types.get(pred_path.stem, 1),
            )
        )
    if not items:
        raise PushbroomError(f"no prediction PNGs in {pred_dir}")
    report = evaluate(items, classes=classes, empty=args.empty)
    _emit_text(_render_rows(_score_rows(report, args.per_image), args.format), args.out)
    return 0


def _cmd_profile(args) -> int:
    rows = []
    for path in args.images:
        profile = profile_noise(
            read_gray_png(path),
            uniformity_threshold=args.uniformity,
            contrast_threshold=args.contrast,
            row_factor=args.row_factor,
        )
        row = {"image": str(path)}
        row.update(profile.to_dict())
        row["stripe_columns"] = " ".join(str(c) for c in profile.stripe_columns)
        row["anomalous_rows"] = " ".join(str(r) for r in profile.anomalous_rows)
        rows.append(row)
    _emit_text(_render_rows(rows, args.format), args.out)
    return 0


def _cmd_analyze_types(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = read_manifest(manifest_path)
    root = Path(args.root) if args.root else manifest_path.parent
    check_integrity(manifest, root)
    items = [(rec.type_label, read_gray_png(root / rec.image_path)) for rec in manifest.records]
    reports = analyze_types(items)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = []
    for t, rep in sorted(reports.items()):
        mean_u8 = round_half_away(rep.mean_image).astype(np.uint8)
        write_png(out_dir / f"type{t}_mean.png", mean_u8)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(np.arange(256), rep.histogram, width=1.0, color="steelblue")
        ax.set_xlabel("intensity")
        ax.set_ylabel("pixel count")
        ax.set_title(f"type {t} ({rep.count} images)")
        fig.tight_layout()
        fig.savefig(out_dir / f"type{t}_hist.png")
        plt.close(fig)
        rows.append(
            {
                "type": t,
                "images": rep.count,
                "mean_intensity": f"{rep.mean_intensity:.4f}",
                "mean_png": f"type{t}_mean.png",
                "hist_png": f"type{t}_hist.png",
            }
        )
    _emit_text(_render_rows(rows, args.format), None)
    return 0


def _cmd_subset(args) -> int:
    manifest = read_manifest(args.manifest)
    rng = np.random.default_rng(args.seed)
    subset = balanced_subset(manifest, args.k, rng)
    write_manifest(subset, args.out)
    print(f"wrote {len(subset.records)} records to {args.out}")
    return 0


def _cmd_show_config(args) -> int:
    config = _resolve_config(args)
    flat = config.to_flat_dict()
    if args.format == "json":
        print(json.dumps(flat, indent=2, sort_keys=True))
    else:
        width = max(len(k) for k in flat)
        for k in sorted(flat):
            print(f"{k.ljust(width)}  {flat[k]}")
    return 0


_COMMANDS = {
    "augment": _cmd_augment,
    "evaluate": _cmd_evaluate,
    "profile": _cmd_profile,
    "analyze-types": _cmd_analyze_types,
    "subset": _cmd_subset,
    "show-config": _cmd_show_config,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"pushbroom {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except PushbroomError as exc:
        print(f"pushbroom {args.command}: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except FileNotFoundError as exc:
        print(f"pushbroom {args.command}: error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
