"""Command line: `train` on a dataset manifest, `predict` onto mask PNGs.

Exit codes follow the dataset tools: 0 success, 1 usage, 2 bad data.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import torch

from .data import SegmentationDataset
from .errors import InvalidParameterError, TrainerError
from .model import NetworkSpec, build_network
from .predict import predict, read_image, write_mask_png
from .train import TrainConfig, load_checkpoint, train

_TRAIN_INT = {"epochs", "batch_size"}
_TRAIN_FLOAT = {"learning_rate", "weight_decay", "momentum"}
_NET_INT = {"in_channels", "num_classes", "input_height", "input_width"}
_NET_BOOL = {"transposed_upsampling"}
KNOWN_KEYS = _TRAIN_INT | _TRAIN_FLOAT | _NET_INT | _NET_BOOL


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage problems
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


class _UsageError(Exception):
    pass


def _parse_kv(pairs: list[str], source: str) -> dict:
    values: dict = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise _UsageError(f"{source}: expected key=value, got {pair!r}")
        if key not in KNOWN_KEYS:
            raise _UsageError(f"{source}: unknown key {key!r}")
        raw = raw.strip()
        try:
            if key in _TRAIN_INT or key in _NET_INT:
                values[key] = int(raw)
            elif key in _TRAIN_FLOAT:
                values[key] = float(raw)
            else:
                values[key] = raw.lower() in ("1", "true", "yes", "on")
        except ValueError as exc:
            raise _UsageError(f"{source}: bad value for {key}: {raw!r}") from exc
    return values


def _read_config_file(path: str) -> dict:
    lines = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            lines.append(text)
    return _parse_kv(lines, path)


def _split_settings(flat: dict) -> tuple[TrainConfig, NetworkSpec]:
    train_kw = {k: v for k, v in flat.items() if k in _TRAIN_INT | _TRAIN_FLOAT}
    net_kw = {k: v for k, v in flat.items() if k in _NET_INT | _NET_BOOL}
    return TrainConfig(**train_kw), NetworkSpec(**net_kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unet-trainer", description="Segmentation network trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train on a dataset manifest")
    p_train.add_argument("--manifest", required=True, help="manifest.jsonl of a generated dataset")
    p_train.add_argument("--out", required=True, help="directory for checkpoint and loss curve")
    p_train.add_argument("--config", help="key = value config file")
    p_train.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--kinds", help="comma-separated record kinds to train on")

    p_pred = sub.add_parser("predict", help="write predicted masks for images")
    p_pred.add_argument("--checkpoint", required=True)
    p_pred.add_argument("--images", required=True, help="directory of grayscale PNGs")
    p_pred.add_argument("--out", required=True, help="directory for mask PNGs")
    return parser


def _cmd_train(args: argparse.Namespace) -> int:
    flat: dict = {}
    if args.config:
        try:
            flat.update(_read_config_file(args.config))
        except FileNotFoundError:
            print(f"unet-trainer train: error: config not found: {args.config}", file=sys.stderr)
            return 2
    flat.update(_parse_kv(args.overrides, "--set"))
    config, spec = _split_settings(flat)
    kinds = tuple(k.strip() for k in args.kinds.split(",")) if args.kinds else None

    torch.manual_seed(args.seed)
    model = build_network(spec)
    dataset = SegmentationDataset(args.manifest, kinds=kinds, num_classes=spec.num_classes)
    history = train(model, dataset, config, args.out, seed=args.seed)
    final = history["epoch_means"][-1] if history["epoch_means"] else float("nan")
    print(
        f"trained {config.epochs} epochs on {len(dataset)} records "
        f"({history['steps']} steps, final epoch loss {final:.6f}); "
        f"artifacts in {args.out}"
    )
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model, _ = load_checkpoint(args.checkpoint)
    images = sorted(Path(args.images).glob("*.png"))
    if not images:
        print(f"unet-trainer predict: error: no PNGs in {args.images}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    for path in images:
        mask, _ = predict(model, read_image(path))
        write_mask_png(out_dir / path.name, mask)
    print(f"wrote {len(images)} masks to {out_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            return _cmd_train(args)
        return _cmd_predict(args)
    except _UsageError as exc:
        print(f"unet-trainer {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except InvalidParameterError as exc:
        print(f"unet-trainer {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (TrainerError, FileNotFoundError) as exc:
        print(f"unet-trainer {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
