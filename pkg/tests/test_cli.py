"""Command-line surface: exit codes, artifacts, report formats."""
from __future__ import annotations

import json

import numpy as np
import pytest

from pushbroom import read_manifest, write_png
from pushbroom.cli import main

from conftest import make_originals_dir, make_source_dir

SMALL_ARGS = [
    "--set", "target_width=64", "--set", "target_height=48",
    "--set", "n1=3", "--set", "n2=5", "--set", "sigma1=1",
    "--set", "r1=5", "--set", "r2=8", "--set", "sigma2=1",
    "--set", "h1=4", "--set", "h2=6",
]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_augment_writes_dataset(tmp_path, capsys):
    sources = make_source_dir(tmp_path, 2)
    out = tmp_path / "ds"
    code, stdout, _ = run(
        ["augment", "--sources", str(sources), "--out", str(out), *SMALL_ARGS, "--seed", "9"],
        capsys,
    )
    assert code == 0
    assert "36 records" in stdout
    manifest = read_manifest(out / "manifest.jsonl")
    assert manifest.master_seed == 9
    assert len(manifest.records) == 36


def test_augment_with_originals_and_workers(tmp_path, capsys):
    sources = make_source_dir(tmp_path, 2)
    originals = make_originals_dir(tmp_path, 2)
    out = tmp_path / "ds"
    code, stdout, _ = run(
        [
            "augment", "--sources", str(sources), "--originals", str(originals),
            "--out", str(out), *SMALL_ARGS, "--workers", "3",
        ],
        capsys,
    )
    assert code == 0
    assert len(read_manifest(out / "manifest.jsonl").records) == 38


def test_unknown_override_key_is_usage_error(tmp_path, capsys):
    sources = make_source_dir(tmp_path, 1)
    code, _, stderr = run(
        ["augment", "--sources", str(sources), "--out", str(tmp_path / "x"), "--set", "bogus=1"],
        capsys,
    )
    assert code == 1
    assert "bogus" in stderr


def test_missing_sources_is_data_error(tmp_path, capsys):
    code, _, stderr = run(
        ["augment", "--sources", str(tmp_path / "nowhere"), "--out", str(tmp_path / "x")],
        capsys,
    )
    assert code == 2
    assert "nowhere" in stderr


def test_bad_annotation_aborts_with_file_list(tmp_path, capsys):
    sources = make_source_dir(tmp_path, 1)
    rng = np.random.default_rng(0)
    write_png(sources / "broken.png", rng.integers(0, 256, size=(40, 48, 3), dtype=np.uint8))
    (sources / "broken.json").write_text("{nope")
    code, _, stderr = run(
        ["augment", "--sources", str(sources), "--out", str(tmp_path / "x"), *SMALL_ARGS],
        capsys,
    )
    assert code == 2
    assert "broken.png" in stderr


def test_usage_error_on_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["augment", "--frobnicate"])
    assert exc.value.code == 1


def test_usage_error_on_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["explode"])
    assert exc.value.code == 1


def make_dataset(tmp_path, capsys, n_sources=2):
    sources = make_source_dir(tmp_path, n_sources)
    out = tmp_path / "ds"
    code, _, _ = run(
        ["augment", "--sources", str(sources), "--out", str(out), *SMALL_ARGS],
        capsys,
    )
    assert code == 0
    return out


def test_evaluate_self_is_perfect(tmp_path, capsys):
    out = make_dataset(tmp_path, capsys)
    code, stdout, _ = run(
        ["evaluate", "--pred", str(out / "masks"), "--truth", str(out / "masks"), "--format", "csv"],
        capsys,
    )
    assert code == 0
    header, first = stdout.splitlines()[:2]
    assert "micro_iou" in header
    assert "1.000000" in first


def test_evaluate_dim_mismatch_names_record(tmp_path, capsys):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    write_png(pred / "a.png", np.zeros((4, 4), dtype=np.uint8))
    write_png(truth / "a.png", np.zeros((4, 5), dtype=np.uint8))
    code, _, stderr = run(
        ["evaluate", "--pred", str(pred), "--truth", str(truth)],
        capsys,
    )
    assert code == 2
    assert "a" in stderr


def test_evaluate_missing_truth_is_data_error(tmp_path, capsys):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    write_png(pred / "a.png", np.zeros((4, 4), dtype=np.uint8))
    truth.mkdir()
    code, _, stderr = run(["evaluate", "--pred", str(pred), "--truth", str(truth)], capsys)
    assert code == 2
    assert "a.png" in stderr


def test_profile_reports_injected_columns(tmp_path, capsys):
    rng = np.random.default_rng(1)
    img = rng.integers(0, 100, size=(64, 120), dtype=np.uint8)
    img[:, 30] = 200
    img[:, 60] = 200
    path = tmp_path / "img.png"
    write_png(path, img)
    code, stdout, _ = run(["profile", str(path), "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(stdout)
    assert rows[0]["stripe_columns"] == "30 60"
    assert rows[0]["stripe_count"] == 2
    assert rows[0]["min_spacing"] == 30


def test_subset_balances_types(tmp_path, capsys):
    out = make_dataset(tmp_path, capsys, n_sources=7)
    sub_path = tmp_path / "subset.jsonl"
    code, stdout, _ = run(
        ["subset", "--manifest", str(out / "manifest.jsonl"), "-k", "2", "--seed", "5",
         "--out", str(sub_path)],
        capsys,
    )
    assert code == 0
    subset = read_manifest(sub_path)
    assert len(subset.records) == 14


def test_subset_insufficient_type_is_data_error(tmp_path, capsys):
    out = make_dataset(tmp_path, capsys, n_sources=2)
    code, _, stderr = run(
        ["subset", "--manifest", str(out / "manifest.jsonl"), "-k", "99",
         "--out", str(tmp_path / "s.jsonl")],
        capsys,
    )
    assert code == 2
    assert "type" in stderr


def test_analyze_types_emits_pngs(tmp_path, capsys):
    out = make_dataset(tmp_path, capsys)
    report_dir = tmp_path / "report"
    code, stdout, _ = run(
        ["analyze-types", "--manifest", str(out / "manifest.jsonl"), "--out", str(report_dir)],
        capsys,
    )
    assert code == 0
    assert (report_dir / "type1_mean.png").is_file()
    assert (report_dir / "type1_hist.png").is_file()
    assert (report_dir / "type2_mean.png").is_file()
    assert "mean_intensity" in stdout


def test_show_config_reports_effective_values(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 0.5\n", "utf-8")
    code, stdout, _ = run(
        ["show-config", "--config", str(cfg), "--set", "n1=7", "--format", "json"],
        capsys,
    )
    assert code == 0
    flat = json.loads(stdout)
    assert flat["gamma"] == 0.5
    assert flat["n1"] == 7
    assert flat["c2"] == 128
