"""Tests for study manifests, study I/O and study validation."""

import json
import logging

import numpy as np
import pytest

from fusionseg_core.exceptions import GridMismatch, MissingFile, SchemaError
from fusionseg_volume import (
    Affine3,
    load_manifest,
    load_study,
    save_study,
    validate_study,
    write_manifest,
)


class TestSaveLoadStudy:
    """save_study then load_study."""

    def test_roundtrip(self, tmp_path, make_study):
        study = make_study("ph001", split="test", cohort="site_a")
        entry = save_study(study, tmp_path / "ph001")

        back = load_study(entry)

        assert back.study_id == "ph001"
        assert back.split == "test"
        assert back.cohort == "site_a"
        assert back.lesion_gg == {1: 3}
        assert np.array_equal(back.trus.data, study.trus.data)
        assert np.array_equal(back.lesion_labels.data, study.lesion_labels.data)
        assert back.mri_to_trus is not None
        assert back.mri_to_trus.allclose(Affine3.identity())
        assert back.synthesis_transform is None

    def test_phantom_truth_is_carried(self, tmp_path, make_study):
        truth = Affine3.translation((1.0, -2.0, 0.5))
        study = make_study().with_updates(synthesis_transform=truth)
        entry = save_study(study, tmp_path / "s")
        assert entry.phantom_truth is not None
        assert np.array_equal(load_study(entry).synthesis_transform.matrix, truth.matrix)


class TestManifest:
    """load_manifest / write_manifest."""

    def test_relative_paths_resolve(self, tmp_path, make_study):
        entries = [save_study(make_study(f"s{i}"), tmp_path / f"s{i}") for i in range(2)]
        path = tmp_path / "manifest.json"
        write_manifest(entries, path)

        raw = json.loads(path.read_text())
        assert raw[0]["t2w"] == "s0/t2w.nii"

        loaded = load_manifest(path)
        assert [e.study_id for e in loaded] == ["s0", "s1"]
        assert loaded[0].t2w.resolve() == entries[0].t2w

    def test_rewrite_from_relative_manifest(self, tmp_path, make_study, monkeypatch):
        monkeypatch.chdir(tmp_path)
        entries = [save_study(make_study("s0"), tmp_path / "a" / "s0")]
        write_manifest(entries, tmp_path / "a" / "manifest.json")

        loaded = load_manifest("a/manifest.json")
        assert loaded[0].t2w.is_absolute()
        (tmp_path / "b").mkdir()
        write_manifest(loaded, "b/manifest.json")

        raw = json.loads((tmp_path / "b" / "manifest.json").read_text())
        assert raw[0]["t2w"] == str((tmp_path / "a" / "s0" / "t2w.nii").resolve())
        assert load_manifest("b/manifest.json")[0].t2w == loaded[0].t2w

    def test_single_object_manifest(self, tmp_path, make_study):
        entry = save_study(make_study("only"), tmp_path / "only")
        path = tmp_path / "one.json"
        path.write_text(json.dumps(entry.to_json_dict(relative_to=tmp_path)))
        assert [e.study_id for e in load_manifest(path)] == ["only"]

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingFile):
            load_manifest(tmp_path / "none.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[{")
        with pytest.raises(SchemaError):
            load_manifest(path)

    def test_duplicate_study_id(self, tmp_path, make_study):
        entry = save_study(make_study("dup"), tmp_path / "dup")
        path = tmp_path / "m.json"
        data = entry.to_json_dict(relative_to=tmp_path)
        path.write_text(json.dumps([data, data]))
        with pytest.raises(SchemaError, match="Duplicate"):
            load_manifest(path)

    def test_grade_group_out_of_range(self, tmp_path, make_study):
        entry = save_study(make_study("gg"), tmp_path / "gg")
        data = entry.to_json_dict(relative_to=tmp_path)
        data["lesion_gg"] = {"1": 6}
        path = tmp_path / "m.json"
        path.write_text(json.dumps([data]))
        with pytest.raises(SchemaError):
            load_manifest(path)

    def test_referenced_file_missing(self, tmp_path, make_study):
        entry = save_study(make_study("gone"), tmp_path / "gone")
        path = tmp_path / "m.json"
        write_manifest([entry], path)
        entry.adc.unlink()
        with pytest.raises(MissingFile):
            load_manifest(path)


class TestValidateStudy:
    """validate_study invariants."""

    def test_valid(self, study):
        validate_study(study)

    def test_non_binary_gland(self, study):
        gland = study.gland_mask.data.copy()
        gland[0, 0, 0] = 0.5
        with pytest.raises(SchemaError, match="gland"):
            validate_study(study.with_updates(gland_mask=study.gland_mask.with_data(gland)))

    def test_lesion_without_grade_group(self, study):
        with pytest.raises(SchemaError, match="grade group"):
            validate_study(study.with_updates(lesion_gg={}))

    def test_mask_off_trus_grid(self, study):
        with pytest.raises(GridMismatch):
            validate_study(study.with_updates(gland_mask=study.t2w))

    def test_mri_sequences_on_different_grids(self, study):
        with pytest.raises(GridMismatch):
            validate_study(study.with_updates(adc=study.trus))

    def test_lesion_outside_gland_warns(self, study, caplog):
        labels = study.lesion_labels.data.copy()
        labels[0, 0, 0] = 1.0
        with caplog.at_level(logging.WARNING):
            validate_study(study.with_updates(lesion_labels=study.lesion_labels.with_data(labels)))
        assert "outside the gland" in caplog.text
