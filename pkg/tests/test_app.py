import json
import shutil

import numpy as np
import pandas as pd
import pytest

from conftest import cap_forest_sizes
from ate_app.config import (
    OUTPUT_ROOT_ENV,
    PipelineConfig,
    apply_overrides,
    load_config,
    output_root,
)
from ate_app.main import build_parser, main
from ate_app.manifest import RunManifest, config_hash
from ate_app.pipeline import Pipeline, cmd_predict, cmd_synth
from ate_app.storage import MatrixCache
from ate_core.atomic import atomic_write_text, write_json
from ate_core.characterization import CharacterizationMatrix
from ate_core.errors import ConfigError, WidthMismatchError
from ate_core.experiment_runner import ExperimentRunner
from ate_core.regress import load_model
from ate_core.trajectory import AlignmentMode


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """A four-sequence synthetic corpus with a small tuning budget."""
    root = tmp_path_factory.mktemp("corpus")
    config_path = cmd_synth(root, n_sequences=4, master_seed=0, min_keyframes=8,
                            max_keyframes=10)
    data = json.loads(config_path.read_text())
    data["tuning"] = {"n_candidates": 2, "k_folds": 3}
    data["sweep_fractions"] = [0.5, 0.7]
    config_path.write_text(json.dumps(data))
    return config_path


@pytest.fixture(scope="module")
def trained(corpus, tmp_path_factory):
    """Output root of one `train` run over the corpus."""
    out = tmp_path_factory.mktemp("trained")
    with pytest.MonkeyPatch.context() as monkeypatch:
        cap_forest_sizes(monkeypatch)
        assert main(["train", "--config", str(corpus), "--out", str(out), "-q"]) == 0
    return out


def minimal_config(tmp_path, **extra):
    for name in ("est.txt", "gt.txt", "index.csv"):
        (tmp_path / name).write_text("")
    data = {
        "testcases": [{
            "id": "M-TEST",
            "sequences": [{
                "id": "a",
                "estimate_trajectory_path": "est.txt",
                "ground_truth_path": "gt.txt",
                "frames_index_path": "index.csv",
            }],
        }],
        **extra,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


class TestConfig:
    def test_relative_paths_resolved(self, tmp_path):
        config = load_config(minimal_config(tmp_path))
        sequence = config.testcases[0].sequences[0]
        assert sequence.estimate_trajectory_path == (tmp_path / "est.txt").resolve()
        assert sequence.imu_path is None

    def test_alignment_follows_operating_mode(self, tmp_path):
        config = load_config(minimal_config(tmp_path))
        assert config.testcases[0].alignment is AlignmentMode.SIM3

    def test_missing_input(self, tmp_path):
        path = minimal_config(tmp_path)
        (tmp_path / "gt.txt").unlink()
        with pytest.raises(ConfigError, match="gt.txt"):
            load_config(path)
        assert load_config(path, check_files=False).testcases[0].id == "M-TEST"

    @pytest.mark.parametrize("extra", [
        {"pooling_kind": "harmonic"}, {"train_fraction": 1.0}, {"pmcc_threshold": 0.0},
        {"sweep_fractions": [0.0, 0.5]}, {"unknown_field": 1},
    ])
    def test_invalid_values(self, tmp_path, extra):
        with pytest.raises(ConfigError):
            load_config(minimal_config(tmp_path, **extra))

    def test_invalid_json(self, tmp_path):
        (tmp_path / "config.json").write_text("{")
        with pytest.raises(ConfigError):
            load_config(tmp_path / "config.json")

    def test_overrides(self, tmp_path):
        config = load_config(minimal_config(tmp_path))
        updated = apply_overrides(config, pooling_kind="MAX", train_fraction=None, n_jobs=2)
        assert (updated.pooling_kind, updated.train_fraction, updated.n_jobs) == ("max", 0.7, 2)
        with pytest.raises(ConfigError):
            apply_overrides(config, train_fraction=1.5)

    def test_hash_ignores_jobs_and_output(self, tmp_path):
        config = load_config(minimal_config(tmp_path))
        other = apply_overrides(config, n_jobs=4, output_dir=tmp_path / "elsewhere")
        assert config_hash(config.hash_payload()) == config_hash(other.hash_payload())
        seeded = apply_overrides(config, master_seed=3)
        assert config_hash(config.hash_payload()) != config_hash(seeded.hash_payload())

    def test_output_root_precedence(self, tmp_path, monkeypatch):
        config = load_config(minimal_config(tmp_path))
        monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "env"))
        assert output_root(config) == (tmp_path / "env").resolve()
        explicit = apply_overrides(config, output_dir=tmp_path / "flag")
        assert output_root(explicit) == tmp_path / "flag"

    def test_duplicate_sequence_ids(self, tmp_path):
        path = minimal_config(tmp_path)
        data = json.loads(path.read_text())
        data["testcases"][0]["sequences"] *= 2
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigError):
            load_config(path)


class TestStorage:
    def test_atomic_write(self, tmp_path):
        path = atomic_write_text(tmp_path / "sub" / "file.txt", "hello")
        assert path.read_text() == "hello"
        assert sorted(p.name for p in path.parent.iterdir()) == ["file.txt"]

    def test_json_sorted(self, tmp_path):
        write_json(tmp_path / "a.json", {"b": 1, "a": 2})
        assert (tmp_path / "a.json").read_text() == '{\n  "a": 2,\n  "b": 1\n}\n'

    def test_matrix_cache(self, tmp_path, rng):
        (tmp_path / "img.pgm").write_bytes(b"P5 1 1 255 x")
        index = tmp_path / "index.csv"
        pd.DataFrame({"timestamp": [0.0], "image_path": ["img.pgm"]}).to_csv(index, index=False)
        key = MatrixCache.key(index, None, ["brightness"])
        assert key == MatrixCache.key(index, None, ["brightness"])
        assert key != MatrixCache.key(index, None, ["contrast"])
        (tmp_path / "img.pgm").write_bytes(b"P5 1 1 255 y")
        assert key != MatrixCache.key(index, None, ["brightness"])

        cache = MatrixCache(tmp_path / "cache")
        assert cache.get(key, "s") is None
        matrix = CharacterizationMatrix(rng.normal(size=(2, 3)), ("a", "b"), "s",
                                        timestamps=np.arange(3.0))
        cache.put(key, matrix)
        assert np.array_equal(cache.get(key, "s").values, matrix.values)


class TestManifest:
    def test_relative_output_labels(self, tmp_path):
        manifest = RunManifest("abc", tmp_path)
        path = atomic_write_text(tmp_path / "reports" / "x.txt", "x")
        manifest.record_output("train", path)
        manifest.add_timing("train", 1.5)
        manifest.save()
        saved = json.loads((tmp_path / "manifest.json").read_text())
        assert list(saved["stages"]["train"]["outputs"]) == ["reports/x.txt"]
        assert "timings" not in saved
        assert json.loads((tmp_path / "timings.json").read_text()) == {"train": 1.5}
        assert saved["versions"]["ate_core"] == "0.1.0"


class TestCli:
    def test_parser(self):
        args = build_parser().parse_args(["train", "--config", "c.json", "--pool", "max",
                                          "--jobs", "2", "-v"])
        assert (args.command, args.pool, args.jobs, args.verbose) == ("train", "max", 2, True)
        with pytest.raises(SystemExit):
            build_parser().parse_args(["train", "--pool", "harmonic", "--config", "c.json"])

    def test_missing_config_exits_1(self, tmp_path):
        assert main(["train", "--config", str(tmp_path / "none.json"), "-q"]) == 1

    def test_synth_writes_config(self, tmp_path):
        assert main(["synth", "--out", str(tmp_path), "--sequences", "2",
                     "--min-keyframes", "5", "--max-keyframes", "5", "-q"]) == 0
        config = load_config(tmp_path / "config.json")
        assert config.testcases[0].id == "S-SYNTH"
        assert len(config.testcases[0].sequences) == 2

    def test_invalid_synth_settings_exit_1(self, tmp_path):
        assert main(["synth", "--out", str(tmp_path), "--min-keyframes", "1", "-q"]) == 1


class TestPipeline:
    def test_train_outputs(self, trained):
        for relative in (
            "examples/S-SYNTH/seq00.csv", "examples/S-SYNTH/summary.json",
            "datasets/S-SYNTH/mean.csv", "models/S-SYNTH/mean.json",
            "models/S-SYNTH/mean.mask.json", "reports/S-SYNTH/train_mean.json",
            "reports/S-SYNTH/train_mean.txt", "reports/S-SYNTH/predictions_mean.csv",
            "manifest.json", "timings.json",
        ):
            assert (trained / relative).is_file(), relative
        summary = json.loads((trained / "examples/S-SYNTH/summary.json").read_text())
        for row in summary["sequences"]:
            assert row["keyframes"] == row["examples"] + row["skipped"]
            assert row["skipped"] >= 2
        report = json.loads((trained / "reports/S-SYNTH/train_mean.json").read_text())
        assert report["report"]["testcase_id"] == "S-SYNTH"
        assert len(report["cv"]["candidates"]) == 2
        bundle = load_model(trained / "models/S-SYNTH/mean.json")
        assert bundle.metadata["pooling_kind"] == "mean"
        manifest = json.loads((trained / "manifest.json").read_text())
        assert "models/S-SYNTH/mean.json" in manifest["stages"]["train"]["outputs"]

    def test_examples_csv(self, trained):
        labels = pd.read_csv(trained / "examples/S-SYNTH/seq00.csv")
        assert labels["cutoff_k"].tolist() == list(range(1, len(labels) + 1))
        assert labels["skipped"].tolist()[:2] == [True, True]
        assert (labels.loc[~labels["skipped"], "ate"] >= 0).all()

    def test_reproducible_across_jobs(self, corpus, trained, tmp_path, small_forests):
        assert main(["train", "--config", str(corpus), "--out", str(tmp_path),
                     "--jobs", "2", "-q"]) == 0
        for relative in ("models/S-SYNTH/mean.json", "reports/S-SYNTH/train_mean.json",
                         "datasets/S-SYNTH/mean.csv", "manifest.json"):
            assert (tmp_path / relative).read_bytes() == (trained / relative).read_bytes()

    def test_characterize(self, corpus, tmp_path):
        assert main(["characterize", "--config", str(corpus), "--out", str(tmp_path),
                     "--pool", "max", "-q"]) == 0
        matrix = pd.read_csv(tmp_path / "matrices/S-SYNTH/seq01.csv")
        assert matrix.columns[0] == "timestamp"
        assert len(matrix.columns) == 11
        descriptors = pd.read_csv(tmp_path / "descriptors/S-SYNTH/max.csv")
        assert len(descriptors) == 4
        assert descriptors.columns[1] == "brightness:max"
        assert len(list((tmp_path / "cache/matrices").glob("*.csv"))) == 4

    def test_matrix_cache_reused(self, corpus, tmp_path):
        config = apply_overrides(load_config(corpus), output_dir=tmp_path)
        first = Pipeline(config)
        first.characterize()
        second = Pipeline(config)
        second.characterize()
        a = first.matrices(config.testcases[0])
        b = second.matrices(config.testcases[0])
        for sequence_id in a:
            assert np.array_equal(a[sequence_id].values, b[sequence_id].values)

    def test_sweep_and_baseline(self, corpus, tmp_path, small_forests, monkeypatch):
        calls = []
        train_and_evaluate = ExperimentRunner.train_and_evaluate

        def counted(runner, *args, **kwargs):
            calls.append(args[1])
            return train_and_evaluate(runner, *args, **kwargs)

        monkeypatch.setattr(ExperimentRunner, "train_and_evaluate", counted)
        assert main(["sweep", "--config", str(corpus), "--out", str(tmp_path), "-q"]) == 0
        sweep = json.loads((tmp_path / "reports/sweep.json").read_text())
        assert [row["train_fraction"] for row in sweep[0]["rows"]] == [0.5, 0.7]
        baseline = json.loads((tmp_path / "reports/baseline.json").read_text())
        assert baseline["fraction"] == 0.2
        assert baseline["rows"][0]["testcase_id"] == "S-SYNTH"
        assert "ATE@20%" in (tmp_path / "reports/baseline.txt").read_text()
        assert calls == [0.5, 0.7]
        assert baseline["rows"][0]["model_r2"] == sweep[0]["rows"][1]["reports"][0]["r2"]
        assert baseline["rows"][0]["model_mape"] == sweep[0]["rows"][1]["reports"][0]["mape"]

    def test_compare_models(self, corpus, tmp_path, small_forests):
        assert main(["compare-models", "--config", str(corpus), "--out", str(tmp_path),
                     "-q"]) == 0
        data = json.loads((tmp_path / "reports/models.json").read_text())
        assert set(data["reports"]) == {"dummy", "linear", "tree", "forest"}

    def test_compare_poolings(self, corpus, tmp_path, small_forests):
        assert main(["compare-poolings", "--config", str(corpus), "--out", str(tmp_path),
                     "-q"]) == 0
        data = json.loads((tmp_path / "reports/pooling.json").read_text())
        assert len(data["reports"]) == 12
        assert len(list((tmp_path / "datasets/S-SYNTH").glob("*.csv"))) == 12

    def test_testcase_failure_exit_code(self, corpus, tmp_path):
        broken = tmp_path / "corpus"
        shutil.copytree(corpus.parent, broken)
        (broken / "seq00/estimate.txt").write_text("not a trajectory\n")
        assert main(["generate-examples", "--config", str(broken / "config.json"),
                     "--out", str(tmp_path / "out"), "-q"]) == 1
        assert (tmp_path / "out/manifest.json").is_file()


class TestPredict:
    def test_dataset_rows(self, trained, tmp_path):
        out = tmp_path / "pred.csv"
        assert main(["predict", "--model", str(trained / "models/S-SYNTH/mean.json"),
                     "--input", str(trained / "datasets/S-SYNTH/mean.csv"),
                     "--out", str(out), "-q"]) == 0
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv")
        predictions = pd.read_csv(out)
        assert list(predictions.columns) == ["source_id", "predicted_ate"]
        assert len(predictions) == len(dataset)
        first = f"{dataset['sequence_id'][0]}@{dataset['cutoff_k'][0]}"
        assert predictions["source_id"][0] == first
        assert np.all(np.isfinite(predictions["predicted_ate"]))

    def test_batch_equals_single_rows(self, trained, tmp_path):
        model = trained / "models/S-SYNTH/mean.json"
        source = trained / "datasets/S-SYNTH/mean.csv"
        cmd_predict(model, source, tmp_path / "batch.csv", chunksize=1024)
        cmd_predict(model, source, tmp_path / "single.csv", chunksize=1)
        assert (tmp_path / "batch.csv").read_bytes() == (tmp_path / "single.csv").read_bytes()

    def test_matches_model(self, trained, tmp_path):
        bundle = load_model(trained / "models/S-SYNTH/mean.json")
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv")
        features = dataset.drop(columns=["sequence_id", "cutoff_k", "ate"]).head(1)
        features.insert(0, "source_id", ["only"])
        features.to_csv(tmp_path / "one.csv", index=False, float_format="%.17g")
        cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "one.csv",
                    tmp_path / "out.csv")
        result = pd.read_csv(tmp_path / "out.csv", float_precision="round_trip")
        assert result["source_id"].tolist() == ["only"]
        expected = bundle.predict(features.drop(columns=["source_id"]).to_numpy())[0]
        assert result["predicted_ate"][0] == expected

    def test_header_only(self, trained, tmp_path):
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv")
        dataset.head(0).to_csv(tmp_path / "empty.csv", index=False)
        cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "empty.csv",
                    tmp_path / "out.csv")
        assert (tmp_path / "out.csv").read_text() == "source_id,predicted_ate\n"

    def test_unknown_columns(self, trained, tmp_path):
        wide = pd.DataFrame(np.ones((2, 12)), columns=[f"f{i}" for i in range(12)])
        wide.insert(0, "source_id", ["a", "b"])
        wide.to_csv(tmp_path / "wide.csv", index=False)
        with pytest.raises(WidthMismatchError, match="unexpected") as info:
            cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "wide.csv",
                        tmp_path / "out.csv")
        assert info.value.row is None
        assert "f0" in str(info.value)
        assert not (tmp_path / "out.csv").exists()
        assert main(["predict", "--model", str(trained / "models/S-SYNTH/mean.json"),
                     "--input", str(tmp_path / "wide.csv"), "--out",
                     str(tmp_path / "out.csv"), "-q"]) == 1

    def test_permuted_columns_follow_names(self, trained, tmp_path):
        model = trained / "models/S-SYNTH/mean.json"
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv", float_precision="round_trip")
        features = [c for c in dataset.columns if c not in ("sequence_id", "cutoff_k", "ate")]
        reordered = dataset[["sequence_id", "cutoff_k", "ate", *reversed(features)]]
        reordered.to_csv(tmp_path / "reversed.csv", index=False, float_format="%.17g")
        cmd_predict(model, trained / "datasets/S-SYNTH/mean.csv", tmp_path / "plain.csv")
        cmd_predict(model, tmp_path / "reversed.csv", tmp_path / "permuted.csv")
        assert (tmp_path / "plain.csv").read_bytes() == (tmp_path / "permuted.csv").read_bytes()

    def test_renamed_column(self, trained, tmp_path):
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv")
        renamed = dataset.rename(columns={dataset.columns[3]: "not_a_metric"})
        renamed.to_csv(tmp_path / "renamed.csv", index=False)
        with pytest.raises(WidthMismatchError) as info:
            cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "renamed.csv",
                        tmp_path / "out.csv")
        assert dataset.columns[3] in str(info.value)
        assert "not_a_metric" in str(info.value)

    def test_missing_value_names_row(self, trained, tmp_path):
        dataset = pd.read_csv(trained / "datasets/S-SYNTH/mean.csv").head(3)
        dataset.iloc[2, 4] = np.nan
        dataset.to_csv(tmp_path / "gap.csv", index=False)
        with pytest.raises(WidthMismatchError) as info:
            cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "gap.csv",
                        tmp_path / "out.csv")
        assert info.value.row == 3

    def test_short_row_inside_chunk(self, trained, tmp_path):
        lines = (trained / "datasets/S-SYNTH/mean.csv").read_text().splitlines()
        lines[5] = ",".join(lines[5].split(",")[:4])
        (tmp_path / "short.csv").write_text("\n".join(lines[:7]) + "\n")
        with pytest.raises(WidthMismatchError) as info:
            cmd_predict(trained / "models/S-SYNTH/mean.json", tmp_path / "short.csv",
                        tmp_path / "out.csv", chunksize=3)
        assert info.value.row == 5
        assert not (tmp_path / "out.csv").exists()

    def test_config_type(self, corpus):
        assert isinstance(load_config(corpus), PipelineConfig)
