import json

import pytest

from relaylearn import OracleModel, read_csv
from relaylearn.cli import main
from relaylearn.modelio import save_model


def _generate(tmp_path, name="data.csv", n=400, seed=5, extra=()):
    path = tmp_path / name
    code = main(["generate", "--n", str(n), "--seed", str(seed), "-o", str(path), *extra])
    assert code == 0
    return path


class TestGenerate:
    def test_writes_deterministic_csv(self, tmp_path, capsys):
        a = _generate(tmp_path, "a.csv")
        b = _generate(tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()
        out = capsys.readouterr().out
        assert "400 samples" in out
        assert "label balance" in out

    def test_default_scenario_recorded_in_columns(self, tmp_path):
        path = _generate(tmp_path)
        ds = read_csv(path)
        for s in ds.samples:
            assert s.freq_ghz == 28.0
            assert s.tx_power_dbm == 30.0
            assert 1.0 <= s.distance_m <= 40.0

    def test_zero_samples_is_usage_error(self, tmp_path):
        code = main(["generate", "--n", "0", "-o", str(tmp_path / "x.csv")])
        assert code == 2

    def test_unwritable_output_is_usage_error(self, tmp_path):
        code = main(["generate", "--n", "5", "-o", str(tmp_path / "no" / "dir" / "x.csv")])
        assert code == 2

    def test_directory_output_is_io_error(self, tmp_path):
        code = main(["generate", "--n", "5", "-o", str(tmp_path)])
        assert code == 4

    def test_config_file_with_flag_overrides(self, tmp_path):
        cfg_path = tmp_path / "scenario.json"
        cfg_path.write_text(json.dumps({"n_samples": 30, "freq_ghz": 60.0, "fi": {"sigma": 0.0}}))
        path = tmp_path / "d.csv"
        assert main(["generate", "--config", str(cfg_path), "--freq-ghz", "39.0", "--seed", "1", "-o", str(path)]) == 0
        ds = read_csv(path)
        assert len(ds) == 30
        assert all(s.freq_ghz == 39.0 for s in ds.samples)

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RELAYLEARN_SEED", "7")
        a = tmp_path / "env.csv"
        assert main(["generate", "--n", "50", "-o", str(a)]) == 0
        b = tmp_path / "flag.csv"
        assert main(["generate", "--n", "50", "--seed", "7", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_config_json_is_usage_error(self, tmp_path):
        cfg_path = tmp_path / "broken.json"
        cfg_path.write_text("{not json")
        assert main(["generate", "--config", str(cfg_path), "-o", str(tmp_path / "x.csv")]) == 2


class TestTrain:
    def test_m5_architecture_recorded(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "m5.json"
        code = main(["train", "--model", "m5", "--data", str(data), "--seed", "7",
                     "--max-epochs", "3", "-o", str(model_path)])
        assert code == 0
        doc = json.loads(model_path.read_text())
        assert doc["architecture"]["hidden_sizes"] == [10, 50, 100, 50, 10]
        assert doc["kind"] == "mlp"
        assert doc["split"] == {
            "seed": 7,
            "train_fraction": 0.75,
            "n_samples": 400,
            "dataset_sha256": doc["split"]["dataset_sha256"],
        }

    def test_m1_default_learning_rate_recorded(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "m1.json"
        assert main(["train", "--model", "m1", "--data", str(data), "--max-epochs", "2",
                     "-o", str(model_path)]) == 0
        doc = json.loads(model_path.read_text())
        assert doc["train_config"]["learning_rate"] == 1e-5

    def test_rerun_is_byte_identical(self, tmp_path):
        data = _generate(tmp_path)
        outs = []
        for name in ("one", "two"):
            model_path = tmp_path / f"{name}.json"
            assert main(["train", "--model", "m2", "--data", str(data), "--seed", "3",
                         "--max-epochs", "5", "-o", str(model_path)]) == 0
            outs.append((model_path.read_bytes(), (tmp_path / f"{name}.loss.csv").read_bytes()))
        assert outs[0] == outs[1]

    def test_unknown_preset_exits_2(self, tmp_path):
        data = _generate(tmp_path)
        with pytest.raises(SystemExit) as exc:
            main(["train", "--model", "nope", "--data", str(data), "-o", str(tmp_path / "x.json")])
        assert exc.value.code == 2

    def test_single_class_data_exits_3(self, tmp_path):
        data = _generate(tmp_path, "weak.csv", extra=["--alpha", "200.0"])  # every link weak
        code = main(["train", "--model", "logreg", "--data", str(data), "-o", str(tmp_path / "x.json")])
        assert code == 3

    def test_missing_data_exits_2(self, tmp_path):
        code = main(["train", "--model", "m1", "--data", str(tmp_path / "none.csv"),
                     "-o", str(tmp_path / "x.json")])
        assert code == 2

    def test_baseline_kinds_train(self, tmp_path):
        data = _generate(tmp_path)
        for kind in ("logreg", "dummy", "svm"):
            out = tmp_path / f"{kind}.json"
            assert main(["train", "--model", kind, "--data", str(data), "--max-epochs", "50",
                         "-o", str(out)]) == 0
            assert json.loads(out.read_text())["kind"] == kind


class TestEval:
    def test_oracle_model_is_perfect_on_full_data(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        report_path = tmp_path / "report.json"
        assert main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(report_path)]) == 0
        doc = json.loads(report_path.read_text())
        assert doc["accuracy"] == 1.0
        assert doc["model_name"] == "oracle"

    def test_report_csv_columns(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "lr.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(model_path)]) == 0
        report_path = tmp_path / "rep.json"
        csv_path = tmp_path / "rep.csv"
        assert main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(report_path), "--report-csv", str(csv_path)]) == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "model,precision,recall,f1,accuracy,roc_auc"

    def test_dataset_fingerprint_mismatch_exits_3(self, tmp_path):
        data = _generate(tmp_path, "train.csv", seed=5)
        other = _generate(tmp_path, "other.csv", seed=6)
        model_path = tmp_path / "lr.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(model_path)]) == 0
        code = main(["eval", "--model-file", str(model_path), "--data", str(other),
                     "-o", str(tmp_path / "rep.json")])
        assert code == 3

    def test_split_test_without_metadata_exits_3(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        code = main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "--split", "test", "-o", str(tmp_path / "rep.json")])
        assert code == 3

    def test_curve_files_written(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "lr.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(model_path)]) == 0
        curves = tmp_path / "curves"
        assert main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(tmp_path / "rep.json"), "--curves-dir", str(curves)]) == 0
        assert (curves / "logreg_roc.csv").exists()
        assert (curves / "logreg_pr.csv").exists()

    def test_curve_files_default_next_to_report(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "lr.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(model_path)]) == 0
        out_dir = tmp_path / "reports"
        out_dir.mkdir()
        assert main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(out_dir / "rep.json")]) == 0
        assert (out_dir / "logreg_roc.csv").exists()
        assert (out_dir / "logreg_pr.csv").exists()

    def test_svg_rendering(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "lr.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(model_path)]) == 0
        curves = tmp_path / "curves"
        assert main(["eval", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(tmp_path / "rep.json"), "--curves-dir", str(curves), "--svg"]) == 0
        for name in ("logreg_roc.svg", "logreg_pr.svg"):
            body = (curves / name).read_text()
            assert body.lstrip().startswith("<?xml")
            assert "svg" in body

    def test_feature_ablation(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "lr2.json"
        assert main(["train", "--model", "logreg", "--data", str(data),
                     "--features", "distance_m,rx_power_dbm", "-o", str(model_path)]) == 0
        doc = json.loads(model_path.read_text())
        assert doc["normalizer"]["feature_names"] == ["distance_m", "rx_power_dbm"]

    def test_unknown_feature_exits_3(self, tmp_path):
        data = _generate(tmp_path)
        code = main(["train", "--model", "logreg", "--data", str(data),
                     "--features", "bogus_column", "-o", str(tmp_path / "x.json")])
        assert code == 3


class TestCompare:
    def test_ranked_output(self, tmp_path):
        data = _generate(tmp_path)
        lr_path = tmp_path / "lr.json"
        dummy_path = tmp_path / "dummy.json"
        assert main(["train", "--model", "logreg", "--data", str(data), "-o", str(lr_path)]) == 0
        assert main(["train", "--model", "dummy", "--data", str(data), "-o", str(dummy_path)]) == 0
        table = tmp_path / "ranked.csv"
        assert main(["compare", "--model-file", str(lr_path), "--model-file", str(dummy_path),
                     "--data", str(data), "-o", str(table)]) == 0
        lines = table.read_text().splitlines()
        assert lines[1].startswith("logreg,")
        assert lines[2].startswith("dummy,")


class TestSimulate:
    def test_oracle_summary(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        trace_path = tmp_path / "trace.csv"
        summary_path = tmp_path / "summary.json"
        assert main(["simulate", "--model-file", str(model_path), "--data", str(data),
                     "--n-candidates", "4", "-o", str(trace_path), "--summary", str(summary_path)]) == 0
        summary = json.loads(summary_path.read_text())
        assert summary["selection_accuracy"] == 1.0
        assert summary["steps"] == 100

    def test_all_weak_trajectory_full_outage(self, tmp_path):
        data = _generate(tmp_path, "weak.csv", extra=["--alpha", "200.0"])
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        summary_path = tmp_path / "summary.json"
        assert main(["simulate", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(tmp_path / "t.csv"), "--summary", str(summary_path)]) == 0
        assert json.loads(summary_path.read_text())["outage_fraction"] == 1.0

    def test_rerun_identical(self, tmp_path):
        data = _generate(tmp_path)
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        outs = []
        for name in ("s1", "s2"):
            trace = tmp_path / f"{name}.csv"
            summary = tmp_path / f"{name}.json"
            assert main(["simulate", "--model-file", str(model_path), "--data", str(data),
                         "-o", str(trace), "--summary", str(summary)]) == 0
            outs.append((trace.read_bytes(), summary.read_bytes()))
        assert outs[0] == outs[1]

    def test_missing_grouping_exits_3(self, tmp_path):
        data = _generate(tmp_path, n=402)  # not divisible by 4
        model_path = tmp_path / "oracle.json"
        save_model(OracleModel(), model_path)
        code = main(["simulate", "--model-file", str(model_path), "--data", str(data),
                     "-o", str(tmp_path / "t.csv"), "--summary", str(tmp_path / "s.json")])
        assert code == 3
