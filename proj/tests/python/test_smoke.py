import csv
import json

import pytest

import pcomp


def test_metrics_match_hand_values():
    m = pcomp.classification_metrics([1, 1, 1, 0, 0, 0, 1, 1], [1, 1, 1, 0, 0, 1, 0, 0])
    assert m["accuracy"] == pytest.approx(0.625)
    assert m["precision"] == pytest.approx(0.75)
    assert m["recall"] == pytest.approx(0.6)
    assert pcomp.mse([1, 2], [2, 4]) == pytest.approx(2.5)
    assert pcomp.pearson_r([1, 2, 3, 4], [1, 2, 3, 10]) == pytest.approx(0.8854, abs=1e-4)
    assert pcomp.classification_metrics([1, 0], [0, 0])["precision"] is None


def test_fusion_and_icc():
    scores, winner = pcomp.late_fuse([[0.6, 0.4], [0.7, 0.3]], "LF_product")
    assert scores == pytest.approx([0.42 / 0.54, 0.12 / 0.54])
    assert winner == 0
    assert pcomp.icc_a_k([[1, 1], [2, 2], [3, 3]]) == pytest.approx(1.0)


def test_errors_map_to_python_exceptions():
    with pytest.raises(pcomp.DomainError):
        pcomp.pearson_r([1, 1, 1], [1, 2, 3])
    with pytest.raises(pcomp.InputError):
        pcomp.late_fuse([[0.5, 0.5]], "LF_sum")
    with pytest.raises(pcomp.InputError):
        pcomp.validate("/nonexistent/manifest.json")


def test_synth_validate_run_report(tmp_path):
    spec = {"n_videos": 12, "n_persons": 12, "duration_min_s": 20, "duration_max_s": 30, "seed": 3}
    pcomp.synth(tmp_path / "data", spec)
    report = pcomp.validate(tmp_path / "data" / "manifest.json")
    assert report["pass"], report["issues"]
    assert len(report["videos"]) == 12

    config = {
        "train_manifest": "data/manifest.json",
        "k": 3,
        "families": ["DT"],
        "scopes": ["global"],
        "tasks": ["classification"],
        "output_dir": "run",
    }
    pcomp.run(config, base_dir=tmp_path)
    with open(tmp_path / "run" / "results.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    # 3 single modalities plus 4 fusion rules.
    assert len(rows) == 7
    fingerprint = json.loads((tmp_path / "run" / "config.json").read_text())["fingerprint"]
    assert all(r["fingerprint"] == fingerprint for r in rows)
    assert "DT" in pcomp.report(tmp_path / "run")


def test_failed_command_raises(tmp_path):
    with pytest.raises(pcomp.CommandError) as info:
        pcomp.run({"train_manifest": str(tmp_path / "missing.json")})
    assert info.value.code == 2
