"""Tests for the fusionseg command-line interface."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from fusionseg_cli import main
from fusionseg_cli.commands import phantom as phantom_cmd
from fusionseg_cli.main import cli
from fusionseg_cli.run_config import LOCK_NAME, RunConfig, load_run_config_from_file
from fusionseg_core.constants import Setup
from fusionseg_core.exceptions import InvalidConfig, IoError, SchemaError
from fusionseg_volume import load_manifest, load_study, nifti_write

SMALL_PHANTOM = {
    "seed": 5,
    "split_counts": [1, 0, 2],
    "trus_dims": [24, 24, 16],
    "trus_spacing": [1.0, 1.0, 1.0],
    "mri_spacing": [1.0, 1.0, 2.0],
    "gland_axes_mm": [[7.0, 8.0], [6.0, 7.0], [4.0, 5.0]],
    "lesions_per_study": [1, 1],
    "lesion_radius_mm": [1.5, 2.0],
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.yaml"
    config = {"phantom": SMALL_PHANTOM, "evaluation": {"label": "any_cancer"}}
    path.write_text(yaml.safe_dump(config))
    return path


def run_phantom(runner, config_file, out, *extra):
    return runner.invoke(cli, ["--config", str(config_file), "phantom", "--out", str(out), *extra])


def write_perfect_predictions(manifest, directory):
    """Probability 0.9 inside every lesion, 0 elsewhere, for the test split."""
    directory.mkdir()
    for entry in load_manifest(manifest):
        if entry.split != "test":
            continue
        study = load_study(entry)
        prob = np.where(study.lesion_labels.data > 0, 0.9, 0.0)
        nifti_write(study.trus.with_data(prob), directory / f"{study.study_id}_any_cancer.nii")


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.evaluation.threshold == 0.5
        assert cfg.train.setup.value == "multimodal"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("phantom:\n  bogus: 1\n")
        with pytest.raises(InvalidConfig):
            load_run_config_from_file(path)

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("x = 1\n")
        with pytest.raises(SchemaError):
            load_run_config_from_file(path)

    def test_empty_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("")
        assert load_run_config_from_file(path) == RunConfig()

    def test_override_ignores_none(self):
        cfg = RunConfig()
        assert cfg.override("train", seed=None) is cfg

    def test_override_validates(self):
        with pytest.raises(InvalidConfig):
            RunConfig().override("evaluation", threshold=2.0)

    def test_setup_sets_channels(self):
        cfg = RunConfig().with_setup(Setup.TRUS_ONLY)
        assert cfg.train.setup is Setup.TRUS_ONLY
        assert cfg.unet.in_channels == 1


class TestPhantomCommand:
    def test_generates_cohort(self, runner, config_file, tmp_path):
        out = tmp_path / "phantom"
        result = run_phantom(runner, config_file, out)
        assert result.exit_code == 0, result.output
        entries = load_manifest(out / "manifest.json")
        assert [e.split for e in entries] == ["train", "test", "test"]
        assert (out / LOCK_NAME).exists()

    def test_json_output(self, runner, config_file, tmp_path):
        out = tmp_path / "phantom"
        result = runner.invoke(
            cli, ["--json", "--config", str(config_file), "phantom", "--out", str(out)]
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["status"] == "success"
        assert payload["data"]["studies"] == 3
        assert payload["data"]["lesions"] == 3

    def test_refuses_non_empty_output(self, runner, config_file, tmp_path):
        out = tmp_path / "phantom"
        out.mkdir()
        (out / "keep.txt").write_text("x")
        assert run_phantom(runner, config_file, out).exit_code == 1
        assert run_phantom(runner, config_file, out, "--force").exit_code == 0

    def test_force_from_environment(self, runner, config_file, tmp_path, monkeypatch):
        out = tmp_path / "phantom"
        out.mkdir()
        (out / "keep.txt").write_text("x")
        monkeypatch.setattr(main.settings, "force", True)
        assert run_phantom(runner, config_file, out).exit_code == 0

    def test_invalid_config_exits_1(self, runner, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("phantom:\n  trus_dims: [2, 2, 2]\n")
        out = tmp_path / "o"
        result = runner.invoke(cli, ["--config", str(path), "phantom", "--out", str(out)])
        assert result.exit_code == 1

    def test_runtime_failure_exits_2(self, runner, config_file, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise IoError("disk full")

        monkeypatch.setattr(phantom_cmd, "write_cohort", broken)
        assert run_phantom(runner, config_file, tmp_path / "phantom").exit_code == 2

    def test_lock_reproduces_run(self, runner, config_file, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert run_phantom(runner, config_file, first, "--seed", "11").exit_code == 0
        lock = first / LOCK_NAME
        assert json.loads(lock.read_text())["phantom"]["seed"] == 11

        assert run_phantom(runner, lock, second).exit_code == 0
        assert (second / LOCK_NAME).read_text() == lock.read_text()
        a = load_study(load_manifest(first / "manifest.json")[0])
        b = load_study(load_manifest(second / "manifest.json")[0])
        np.testing.assert_array_equal(a.trus.data, b.trus.data)


class TestRegisterCommand:
    def test_relative_paths_survive(self, runner, tmp_path, monkeypatch):
        config = tmp_path / "run.yaml"
        config.write_text(
            yaml.safe_dump(
                {"phantom": SMALL_PHANTOM, "registration": {"max_iters": 3, "pyramid_levels": 1}}
            )
        )
        monkeypatch.chdir(tmp_path)
        assert run_phantom(runner, "run.yaml", "runs/phantom").exit_code == 0

        result = runner.invoke(
            cli,
            ["--config", "run.yaml", "register", "runs/phantom/manifest.json", "--out", "runs/reg"],
        )
        assert result.exit_code == 0, result.output

        entries = load_manifest("runs/reg/manifest.json")
        assert len(entries) == 3
        assert entries[0].t2w == (tmp_path / "runs/phantom/phantom_000/t2w.nii").resolve()
        assert entries[0].mri_to_trus.parent == (tmp_path / "runs/reg").resolve()
        assert load_study(entries[0]).mri_to_trus is not None


class TestEvaluateAndReport:
    @pytest.fixture
    def cohort(self, runner, config_file, tmp_path):
        out = tmp_path / "phantom"
        assert run_phantom(runner, config_file, out).exit_code == 0
        return out / "manifest.json"

    def evaluate(self, runner, config_file, manifest, predictions, out, *extra):
        return runner.invoke(
            cli,
            [
                "--config", str(config_file), "evaluate", str(manifest),
                "--predictions", str(predictions), "--out", str(out), "--setup", "trus", *extra,
            ],
        )

    def test_perfect_predictions(self, runner, config_file, cohort, tmp_path):
        predictions = tmp_path / "pred"
        write_perfect_predictions(cohort, predictions)
        out = tmp_path / "eval"
        result = self.evaluate(runner, config_file, cohort, predictions, out)
        assert result.exit_code == 0, result.output

        for name in ("cases.csv", "lesions.csv", "roc.csv", "pr.csv", "roc.svg", "pr.svg"):
            assert (out / name).exists()
        summary = json.loads((out / "evaluation.json").read_text())
        average = summary["reports"][-1]
        assert summary["setup"] == "trus"
        assert average["cohort"] == "Average"
        assert average["sensitivity"] == 1.0
        assert average["specificity"] == 1.0
        assert average["fp"] == 0
        with open(out / "lesions.csv", newline="") as f:
            assert {row["status"] for row in csv.DictReader(f)} == {"TP"}

    def test_missing_predictions_exit_1(self, runner, config_file, cohort, tmp_path):
        predictions = tmp_path / "pred"
        predictions.mkdir()
        result = self.evaluate(runner, config_file, cohort, predictions, tmp_path / "eval")
        assert result.exit_code == 1

    def test_empty_split_exit_1(self, runner, config_file, cohort, tmp_path):
        predictions = tmp_path / "pred"
        predictions.mkdir()
        result = self.evaluate(
            runner, config_file, cohort, predictions, tmp_path / "eval", "--split", "val"
        )
        assert result.exit_code == 1

    def test_report(self, runner, config_file, cohort, tmp_path):
        predictions = tmp_path / "pred"
        write_perfect_predictions(cohort, predictions)
        result = self.evaluate(runner, config_file, cohort, predictions, tmp_path / "eval")
        assert result.exit_code == 0

        out = tmp_path / "report"
        result = runner.invoke(
            cli, ["report", str(tmp_path / "eval" / "evaluation.json"), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        with open(out / "comparison.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert rows[-1]["setup"] == "trus"
        assert rows[-1]["cohort"] == "Average"
        assert float(rows[-1]["sensitivity"]) == 1.0
        assert (out / "roc_overlay.svg").read_text().startswith("<svg")

    def test_report_rejects_bad_summary(self, runner, tmp_path):
        bad = tmp_path / "evaluation.json"
        bad.write_text("{}")
        result = runner.invoke(cli, ["report", str(bad), "--out", str(tmp_path / "report")])
        assert result.exit_code == 1


@pytest.mark.slow
class TestEndToEnd:
    def test_full_run(self, runner, tmp_path):
        config = tmp_path / "run.yaml"
        config.write_text(
            yaml.safe_dump(
                {
                    "phantom": SMALL_PHANTOM,
                    "preprocess": {
                        "mri_spacing": [1.0, 1.0, 2.0],
                        "trus_spacing": [1.0, 1.0, 1.0],
                        "crop_extent_mm": [24.0, 24.0],
                    },
                    "registration": {"max_iters": 30, "pyramid_levels": 2},
                    "unet": {"stages": 2, "base_channels": 4},
                    "train": {"patch_size": [8, 16, 16], "epochs": 1, "steps_per_epoch": 2},
                    "inference": {"patch_size": [8, 16, 16]},
                }
            )
        )

        def invoke(*args):
            result = runner.invoke(cli, ["--config", str(config), *args])
            assert result.exit_code == 0, result.output
            return result

        invoke("phantom", "--out", str(tmp_path / "phantom"))
        invoke(
            "register", str(tmp_path / "phantom" / "manifest.json"),
            "--out", str(tmp_path / "reg"), "--truth",
        )
        invoke(
            "preprocess", str(tmp_path / "reg" / "manifest.json"), "--out", str(tmp_path / "prep")
        )
        manifest = str(tmp_path / "prep" / "manifest.json")
        invoke("train", manifest, "--setup", "multimodal", "--out", str(tmp_path / "train"))
        invoke(
            "infer", manifest, "--checkpoint", str(tmp_path / "train" / "model.ckpt"),
            "--setup", "multimodal", "--out", str(tmp_path / "pred"),
        )
        invoke(
            "evaluate", manifest, "--predictions", str(tmp_path / "pred"),
            "--setup", "multimodal", "--out", str(tmp_path / "eval"),
        )
        invoke("report", str(tmp_path / "eval" / "evaluation.json"), "--out", str(tmp_path / "rep"))

        assert (tmp_path / "train" / "loss.csv").exists()
        assert sorted(p.name for p in (tmp_path / "pred").iterdir())[:3] == [
            "phantom_001_any_cancer.nii",
            "phantom_001_cspca.nii",
            "phantom_001_gland.nii",
        ]
        assert (tmp_path / "rep" / "comparison.csv").exists()


class TestShippedConfig:
    def test_example_config_loads(self):
        path = Path(__file__).parents[2] / "config.yaml"
        cfg = load_run_config_from_file(path)
        assert cfg.train.setup is Setup.MULTIMODAL
        assert cfg.phantom.study_count == 40
