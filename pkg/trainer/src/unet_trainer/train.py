"""Seeded training loop: RMSprop over pixelwise cross-entropy.

Everything that varies run-to-run is derived from one seed: weight init
happens under torch.manual_seed and the per-epoch shuffle comes from a
numpy generator, so equal seeds give identical loss curves and weights.
"""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch.nn.functional import cross_entropy

from .data import SegmentationDataset
from .errors import InvalidParameterError
from .model import NetworkSpec, UNet, build_network

CHECKPOINT_NAME = "checkpoint.pt"
LOSS_CURVE_NAME = "loss_curve.csv"


@dataclass(frozen=True)
class TrainConfig:
    """Optimization schedule; defaults are the published recipe."""

    epochs: int = 200
    batch_size: int = 2
    learning_rate: float = 1e-4
    weight_decay: float = 1e-8
    momentum: float = 0.9

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise InvalidParameterError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise InvalidParameterError("learning_rate must be positive")
        if self.weight_decay < 0 or not 0 <= self.momentum < 1:
            raise InvalidParameterError("bad weight_decay or momentum")


def save_checkpoint(model: UNet, path: str | Path, epoch: int, config: TrainConfig) -> None:
    torch.save(
        {
            "spec": model.spec.to_dict(),
            "model_state": model.state_dict(),
            "epoch": epoch,
            "config": asdict(config),
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[UNet, dict]:
    """Rebuild a model from a checkpoint; returns (model, metadata)."""
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = build_network(NetworkSpec.from_dict(payload["spec"]))
    model.load_state_dict(payload["model_state"])
    return model, {"epoch": payload["epoch"], "config": payload["config"]}


def _write_loss_curve(path: Path, rows: list[tuple[int, int, float]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "step", "loss"])
        writer.writerows(rows)


def train(
    model: UNet,
    dataset: SegmentationDataset,
    config: TrainConfig,
    out_dir: str | Path,
    seed: int = 0,
) -> dict:
    """Optimize the model on a dataset; returns the loss history.

    Artifacts: `checkpoint.pt` rewritten at initialization and after every
    epoch (a zero-epoch run therefore checkpoints the untouched init) and
    `loss_curve.csv` with one row per optimizer step. History carries
    per-step losses and per-epoch means.
    """
    if len(dataset) == 0:
        raise InvalidParameterError("dataset is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    optimizer = torch.optim.RMSprop(
        model.parameters(),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
        momentum=config.momentum,
    )
    shuffle_rng = np.random.default_rng(seed)
    model.train()

    step_rows: list[tuple[int, int, float]] = []
    epoch_means: list[float] = []
    save_checkpoint(model, out_dir / CHECKPOINT_NAME, 0, config)
    _write_loss_curve(out_dir / LOSS_CURVE_NAME, step_rows)

    deterministic_before = torch.are_deterministic_algorithms_enabled()
    torch.use_deterministic_algorithms(True)
    step = 0
    try:
        for epoch in range(1, config.epochs + 1):
            order = shuffle_rng.permutation(len(dataset))
            epoch_losses: list[float] = []
            for start in range(0, len(order), config.batch_size):
                batch = [dataset[int(i)] for i in order[start : start + config.batch_size]]
                x = torch.from_numpy(np.stack([item[0] for item in batch]))
                y = torch.from_numpy(np.stack([item[1] for item in batch]))
                optimizer.zero_grad()
                loss = cross_entropy(model(x), y)
                loss.backward()
                optimizer.step()
                step += 1
                value = float(loss.detach())
                epoch_losses.append(value)
                step_rows.append((epoch, step, value))
            epoch_means.append(float(np.mean(epoch_losses)))
            save_checkpoint(model, out_dir / CHECKPOINT_NAME, epoch, config)
            _write_loss_curve(out_dir / LOSS_CURVE_NAME, step_rows)
    finally:
        torch.use_deterministic_algorithms(deterministic_before)

    return {
        "step_losses": [row[2] for row in step_rows],
        "epoch_means": epoch_means,
        "steps": step,
    }
