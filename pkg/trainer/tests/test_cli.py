"""Command-line behavior: the train/predict flow and its exit-code contract."""
from __future__ import annotations

import csv

import numpy as np
import pytest
from PIL import Image

from unet_trainer.cli import main

from conftest import make_toy_dataset, toy_pair, write_manifest, write_png

SMALL_NET = ["--set", "input_height=32", "--set", "input_width=32"]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_train_then_predict_round_trip(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=4, seed=0)
    out = tmp_path / "run"
    code, stdout, _ = run(
        ["train", "--manifest", str(manifest), "--out", str(out),
         "--set", "epochs=1", *SMALL_NET, "--seed", "3"],
        capsys,
    )
    assert code == 0
    assert "trained 1 epochs on 4 records" in stdout
    assert (out / "checkpoint.pt").is_file()
    with open(out / "loss_curve.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["epoch", "step", "loss"]
    assert len(rows) == 3  # 4 records at batch 2 = 2 steps

    pred = tmp_path / "pred"
    code, stdout, _ = run(
        ["predict", "--checkpoint", str(out / "checkpoint.pt"),
         "--images", str(tmp_path / "data" / "images"), "--out", str(pred)],
        capsys,
    )
    assert code == 0
    assert "wrote 4 masks" in stdout
    masks = sorted(pred.glob("*.png"))
    assert len(masks) == 4
    for path in masks:
        mask = np.asarray(Image.open(path))
        assert mask.shape == (32, 32)
        assert mask.dtype == np.uint8
        assert mask.max() < 5


def test_set_overrides_win_over_config_file(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=1)
    cfg = tmp_path / "train.cfg"
    cfg.write_text("epochs = 5  # overridden below\nlearning_rate = 0.001\n", "utf-8")
    code, stdout, _ = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--config", str(cfg), "--set", "epochs=1", *SMALL_NET],
        capsys,
    )
    assert code == 0
    assert "trained 1 epochs" in stdout


def test_kinds_filter_limits_training_records(tmp_path, capsys):
    root = tmp_path / "data"
    rng = np.random.default_rng(4)
    rows = []
    for i, kind in enumerate(["original", "original", "pseudo"]):
        image, mask = toy_pair(rng)
        rec_id = f"r{i}"
        write_png(root / "images" / f"{rec_id}.png", image)
        write_png(root / "masks" / f"{rec_id}.png", mask)
        rows.append({"id": rec_id, "kind": kind, "source_id": rec_id, "type_label": 1,
                     "image_path": f"images/{rec_id}.png", "mask_path": f"masks/{rec_id}.png",
                     "seed": i, "noise_plan": None, "transform": None})
    manifest = write_manifest(root, rows)
    code, stdout, _ = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--set", "epochs=1", "--set", "batch_size=1", *SMALL_NET,
         "--kinds", "original"],
        capsys,
    )
    assert code == 0
    assert "on 2 records" in stdout


def test_unknown_setting_key_exits_one(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=2)
    code, _, stderr = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--set", "bogus=1"],
        capsys,
    )
    assert code == 1
    assert "bogus" in stderr


def test_bad_setting_value_exits_one(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=2)
    code, _, stderr = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--set", "epochs=abc"],
        capsys,
    )
    assert code == 1
    assert "bad value" in stderr


def test_rejected_config_value_exits_one(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=2)
    code, _, stderr = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--set", "batch_size=0"],
        capsys,
    )
    assert code == 1
    assert "batch_size" in stderr


def test_missing_manifest_exits_two(tmp_path, capsys):
    code, _, stderr = run(
        ["train", "--manifest", str(tmp_path / "nowhere.jsonl"),
         "--out", str(tmp_path / "run"), "--set", "epochs=1"],
        capsys,
    )
    assert code == 2
    assert "nowhere.jsonl" in stderr


def test_missing_config_file_exits_two(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=2)
    code, _, stderr = run(
        ["train", "--manifest", str(manifest), "--out", str(tmp_path / "run"),
         "--config", str(tmp_path / "absent.cfg")],
        capsys,
    )
    assert code == 2
    assert "absent.cfg" in stderr


def test_predict_missing_checkpoint_exits_two(tmp_path, capsys):
    (tmp_path / "images").mkdir()
    code, _, stderr = run(
        ["predict", "--checkpoint", str(tmp_path / "none.pt"),
         "--images", str(tmp_path / "images"), "--out", str(tmp_path / "pred")],
        capsys,
    )
    assert code == 2


def test_predict_empty_image_dir_exits_two(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=5)
    out = tmp_path / "run"
    code, _, _ = run(
        ["train", "--manifest", str(manifest), "--out", str(out),
         "--set", "epochs=1", *SMALL_NET],
        capsys,
    )
    assert code == 0
    (tmp_path / "empty").mkdir()
    code, _, stderr = run(
        ["predict", "--checkpoint", str(out / "checkpoint.pt"),
         "--images", str(tmp_path / "empty"), "--out", str(tmp_path / "pred")],
        capsys,
    )
    assert code == 2
    assert "no PNGs" in stderr


def test_predict_rejects_bad_image_dims(tmp_path, capsys):
    manifest = make_toy_dataset(tmp_path / "data", count=2, seed=5)
    out = tmp_path / "run"
    run(["train", "--manifest", str(manifest), "--out", str(out),
         "--set", "epochs=1", *SMALL_NET], capsys)
    bad = tmp_path / "bad"
    write_png(bad / "odd.png", np.zeros((30, 32), dtype=np.uint8))
    code, _, stderr = run(
        ["predict", "--checkpoint", str(out / "checkpoint.pt"),
         "--images", str(bad), "--out", str(tmp_path / "pred")],
        capsys,
    )
    assert code == 1
    assert "divisible by 16" in stderr


def test_missing_required_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["train"])
    assert exc.value.code == 1


def test_unknown_subcommand_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
