import csv
import json
from pathlib import Path

import numpy as np
import pytest

from calibrec.cli import main as cli_main
from calibrec.errors import ConfigError, PipelineError
from calibrec.mini import write_mini_dataset
from calibrec.orchestrator import (
    ExperimentConfig,
    lambda_stage,
    load_calibrated,
    load_candidates,
    load_cleaned,
    run_experiment,
)


def reduced_config(data_dir: Path, **overrides) -> Path:
    """Mini dataset with a faster config variant for stage tests."""
    config_path = write_mini_dataset(data_dir)
    with config_path.open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    raw["score_mode"] = "original"
    raw["recommender"]["hyperparams"] = {
        "n_factors": 8, "n_epochs": 15, "lr_all": 0.01, "reg_all": 0.02
    }
    raw["calibration"]["lambda_grid"] = [0.0, 0.5, 1.0]
    raw["structure"]["algorithms"] = ["kmeans", "envelope"]
    raw.update(overrides)
    with config_path.open("w", encoding="utf-8") as fh:
        json.dump(raw, fh)
    return config_path


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("mini")
    config_path = reduced_config(data_dir)
    cfg = ExperimentConfig.from_json(config_path)
    run_experiment(cfg)
    return cfg, config_path


class TestConfigValidation:
    def test_missing_key(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"output_dir": "out"}), encoding="utf-8")
        with pytest.raises(ConfigError, match="missing"):
            ExperimentConfig.from_json(path)

    def test_empty_lambda_grid(self, tmp_path):
        config_path = reduced_config(tmp_path)
        raw = json.loads(config_path.read_text(encoding="utf-8"))
        raw["calibration"]["lambda_grid"] = []
        config_path.write_text(json.dumps(raw), encoding="utf-8")
        with pytest.raises(ConfigError, match="empty"):
            ExperimentConfig.from_json(config_path)

    def test_nonexistent_paths(self, tmp_path):
        config_path = reduced_config(tmp_path)
        raw = json.loads(config_path.read_text(encoding="utf-8"))
        raw["dataset"]["ratings"] = "missing.csv"
        config_path.write_text(json.dumps(raw), encoding="utf-8")
        with pytest.raises(ConfigError, match="does not exist"):
            ExperimentConfig.from_json(config_path)

    def test_bad_score_mode(self, tmp_path):
        config_path = reduced_config(tmp_path)
        raw = json.loads(config_path.read_text(encoding="utf-8"))
        raw["score_mode"] = "half"
        config_path.write_text(json.dumps(raw), encoding="utf-8")
        with pytest.raises(ConfigError, match="score_mode"):
            ExperimentConfig.from_json(config_path)

    def test_output_dir_env_override(self, tmp_path, monkeypatch):
        config_path = reduced_config(tmp_path)
        monkeypatch.setenv("CALIBREC_OUTPUT_DIR", str(tmp_path / "elsewhere"))
        cfg = ExperimentConfig.from_json(config_path)
        assert cfg.output_dir == tmp_path / "elsewhere"


class TestArtifacts:
    def test_cleaned_dataset_round_trips(self, pipeline):
        cfg, _ = pipeline
        interactions, catalog, folds = load_cleaned(cfg, "original")
        assert len(interactions.users()) == 60
        assert catalog.n_genres == 6
        # folds partition every user's items 5 ways, sizes within 1
        per_user = {}
        for (user, _), f in folds.assignment.items():
            per_user.setdefault(user, []).append(f)
        for user, fs in per_user.items():
            counts = np.bincount(fs, minlength=5)
            assert counts.max() - counts.min() <= 1

    def test_candidate_lists_complete(self, pipeline):
        cfg, _ = pipeline
        cand = load_candidates(cfg, "original", 0)
        assert len(cand) == 60
        for ranked in cand.values():
            assert len(ranked.entries) == cfg.n_candidates
            scores = [s for _, s in ranked.entries]
            assert scores == sorted(scores, reverse=True)

    def test_calibrated_lists_match_grid(self, pipeline):
        cfg, _ = pipeline
        swept = load_calibrated(cfg, "original", 0)
        assert sorted(swept) == [0.0, 0.5, 1.0]
        for lists in swept.values():
            assert len(lists) == 60
            for ranked in lists.values():
                assert len(ranked.entries) == cfg.calibration.list_size

    def test_lambda_zero_equals_candidate_head(self, pipeline):
        cfg, _ = pipeline
        cand = load_candidates(cfg, "original", 1)
        swept = load_calibrated(cfg, "original", 1)
        n = cfg.calibration.list_size
        for user, ranked in swept[0.0].items():
            assert ranked.entries == cand[user].entries[:n]

    def test_candidates_exclude_training_items(self, pipeline):
        cfg, _ = pipeline
        interactions, _, folds = load_cleaned(cfg, "original")
        from calibrec.ingest import fold_split

        train, _ = fold_split(interactions, folds, 0)
        by_user = train.by_user()
        cand = load_candidates(cfg, "original", 0)
        for user, ranked in cand.items():
            seen = {r.item for r in by_user[user]}
            assert not (set(ranked.items()) & seen)

    def test_stage_files_exist(self, pipeline):
        cfg, _ = pipeline
        out = cfg.mode_dir("original")
        stages = ["PREF"] + [lambda_stage(l) for l in cfg.calibration.lambda_grid]
        for f in range(cfg.folds):
            for stage in stages:
                assert (out / "matrices" / f"matrix_fold{f}_{stage}.csv").exists()
                for alg in cfg.algorithms:
                    assert (out / "labelings" / f"labels_fold{f}_{alg}_{stage}.csv").exists()
            with (out / f"chosen_configs_fold{f}.csv").open() as fh:
                header = fh.readline().strip()
            assert header == "algorithm,parameter,value,silhouette"

    def test_fig_csvs_well_formed(self, pipeline):
        cfg, _ = pipeline
        out = cfg.mode_dir("original")
        with (out / "fig-silhouette.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert {r["stage"] for r in rows} == {"PREF", "C@0.0", "C@0.5", "C@1.0"}
        assert all(-1.0 <= float(r["value"]) <= 1.0 for r in rows)
        with (out / "fig-jaccard.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert {r["stage"] for r in rows} == {"C@0.0", "C@0.5", "C@1.0"}
        assert all(0.0 <= float(r["value"]) <= 1.0 for r in rows)
        with (out / "fig-ranking.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert {r["metric"] for r in rows} == {"map", "mrr", "mace"}
        # 3 metrics x 3 stages x 5 folds
        assert len(rows) == 45

    def test_plot_data_emitted(self, pipeline):
        cfg, _ = pipeline
        out = cfg.mode_dir("original")
        with (out / "plot-jaccard.csv").open() as fh:
            header = fh.readline().strip().split(",")
        assert header[:4] == ["dataset", "score_mode", "algorithm", "metric"]
        assert "C@0.0_mean" in header and "C@1.0_sd" in header

    def test_pref_silhouette_soft_expectation(self, pipeline):
        # reported, not asserted: the preference-stage silhouette tends to
        # exceed the 10-item list stages (profiles carry far more data)
        cfg, _ = pipeline
        out = cfg.mode_dir("original")
        with (out / "fig-silhouette.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        pref = {}
        list_stages = {}
        for r in rows:
            key = (r["algorithm"], r["fold"])
            if r["stage"] == "PREF":
                pref[key] = float(r["value"])
            else:
                list_stages.setdefault(key, []).append(float(r["value"]))
        holds = sum(
            pref[key] >= max(values) for key, values in list_stages.items()
        )
        print(f"soft expectation: PREF silhouette >= every list stage in "
              f"{holds}/{len(list_stages)} (algorithm, fold) cells")

    def test_manifest_records_axis_and_backend(self, pipeline):
        cfg, _ = pipeline
        with (Path(cfg.output_dir) / "manifest.json").open() as fh:
            manifest = json.load(fh)
        assert manifest["genre_axes"]["original"] == sorted(manifest["genre_axes"]["original"])
        assert manifest["kernel_backend"] in ("cython", "python")
        assert "config_hash" in manifest


class TestCli:
    def test_run_all_and_stage_commands(self, tmp_path):
        config_path = reduced_config(tmp_path, folds=5)
        assert cli_main(["ingest", "--config", str(config_path)]) == 0
        assert cli_main(["tune", "--config", str(config_path)]) == 0
        assert cli_main(["recommend", "--config", str(config_path)]) == 0
        assert cli_main(["calibrate", "--config", str(config_path)]) == 0
        assert cli_main(["analyze", "--config", str(config_path)]) == 0
        assert cli_main(["report", "--config", str(config_path)]) == 0
        out = tmp_path / "out" / "results_original"
        assert (out / "fig-ranking.csv").exists()

    def test_stage_out_of_order_fails_with_diagnostic(self, tmp_path, capsys):
        config_path = reduced_config(tmp_path)
        code = cli_main(["recommend", "--config", str(config_path)])
        assert code == 1
        err = capsys.readouterr().err
        assert "ingest" in err

    def test_bad_config_exit_code(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{}", encoding="utf-8")
        assert cli_main(["ingest", "--config", str(path)]) == 2

    def test_tune_respects_flag_overrides(self, tmp_path):
        config_path = reduced_config(tmp_path)
        raw = json.loads(config_path.read_text(encoding="utf-8"))
        raw["recommender"]["hyperparams"] = None
        raw["recommender"]["n_trials"] = 1
        config_path.write_text(json.dumps(raw), encoding="utf-8")
        assert cli_main(["ingest", "--config", str(config_path)]) == 0
        assert cli_main(["tune", "--config", str(config_path), "--n-trials", "1",
                         "--seed", "99"]) == 0
        hp = json.loads(
            (tmp_path / "out" / "results_original" / "hyperparams.json").read_text()
        )
        assert set(hp) == {"n_factors", "n_epochs", "lr_all", "reg_all"}


def test_pipeline_error_reports_stage_and_fold():
    err = PipelineError("analyze", "boom", fold=3, subject="kmeans")
    assert "[analyze:fold3:kmeans] boom" in str(err)


class TestEmitPlotData:
    def reports(self, values, stage="C@0.0"):
        from calibrec.metrics import MetricReport

        return [
            MetricReport("d", "original", "kmeans", stage, f, "jaccard", v)
            for f, v in enumerate(values)
        ]

    def test_mean_and_sd_over_folds(self, tmp_path):
        from calibrec.orchestrator import emit_plot_data

        values = [0.2, 0.4, 0.6, 0.8, 1.0]
        emit_plot_data(self.reports(values), tmp_path, ["C@0.0"])
        with (tmp_path / "plot-jaccard.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert float(rows[0]["C@0.0_mean"]) == pytest.approx(np.mean(values))
        assert float(rows[0]["C@0.0_sd"]) == pytest.approx(np.std(values))

    def test_single_fold_sd_zero(self, tmp_path):
        from calibrec.orchestrator import emit_plot_data

        emit_plot_data(self.reports([0.7]), tmp_path, ["C@0.0"])
        with (tmp_path / "plot-jaccard.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert float(rows[0]["C@0.0_sd"]) == 0.0

    def test_stage_columns_in_lambda_order(self, tmp_path):
        from calibrec.orchestrator import emit_plot_data, lambda_stage

        stages = [lambda_stage(round(0.1 * i, 1)) for i in range(11)]
        reports = []
        for stage in stages:
            reports.extend(self.reports([0.5], stage=stage))
        emit_plot_data(reports, tmp_path, stages)
        with (tmp_path / "plot-jaccard.csv").open() as fh:
            header = fh.readline().strip().split(",")
        mean_cols = [c for c in header if c.endswith("_mean")]
        assert mean_cols == [f"{s}_mean" for s in stages]
