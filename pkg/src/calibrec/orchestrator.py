"""End-to-end experiment driver.

Runs ingest -> tune -> recommend -> calibrate -> analyze -> report per score
mode, from a single JSON config, writing every intermediate artifact as CSV
so each stage is a pure function of the previous stage's files. Reruns with
the same (config, seed) produce byte-identical CSV bundles; the manifest
additionally records timings and environment, and is excluded from that
guarantee.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .calibrate import CalibrationConfig, sweep_lambda
from .distribution import (
    STAGE_CALIBRATED,
    STAGE_CANDIDATE,
    distribution_matrix,
    list_distribution,
    load_matrix_csv,
    preference_distribution,
    save_matrix_csv,
)
from .errors import ConfigError, PipelineError
from .ingest import (
    FoldAssignment,
    binarize,
    fold_split,
    load_csv,
    load_genre_csv,
    load_movielens,
    preprocess,
    save_genre_csv,
    save_interactions_csv,
    split_folds,
)
from .metrics import (
    MetricReport,
    jaccard_labels,
    mace,
    map_at_n,
    mrr,
    save_reports_csv,
    silhouette_from_distances,
)
from .recommender import (
    HyperParams,
    RankedList,
    candidates,
    random_search,
    save_model,
    train_mf,
)
from .structure import (
    ALGORITHMS,
    Labeling,
    SearchSpace,
    default_search_space,
    fit_structure,
    grid_search,
    pairwise_distances,
)
from .utils import coerce_id, derive_seed, fmt

PREF_STAGE = "PREF"


def lambda_stage(lam: float) -> str:
    """Canonical stage label: C@0.0 ... C@1.0."""
    if abs(lam * 10 - round(lam * 10)) < 1e-9:
        return f"C@{lam:.1f}"
    return f"C@{lam!r}"


@dataclass
class ExperimentConfig:
    dataset_name: str
    dataset_format: str
    ratings_path: Path
    genres_path: Path
    scale: tuple
    score_mode: str
    output_dir: Path
    csv_schema: dict | None = None
    folds: int = 5
    seed: int = 0
    min_user_tx: int = 50
    mf_n_trials: int = 20
    mf_cv_folds: int = 5
    mf_hyperparams: dict | None = None
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    n_candidates: int = 100
    algorithms: tuple = ALGORITHMS
    spaces: dict = field(default_factory=dict)

    def modes(self) -> list[str]:
        if self.score_mode == "both":
            return ["original", "binary"]
        return [self.score_mode]

    def search_space(self, algorithm: str) -> SearchSpace:
        override = self.spaces.get(algorithm)
        if override:
            return SearchSpace({k: list(v) for k, v in override.items()})
        return default_search_space(algorithm)

    def mode_dir(self, mode: str) -> Path:
        return Path(self.output_dir) / f"results_{mode}"

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            raw = json.load(fh)
        base = path.parent

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        try:
            ds = raw["dataset"]
            cal = raw.get("calibration", {})
            rec = raw.get("recommender", {})
            struct = raw.get("structure", {})
            grid = cal.get("lambda_grid")
            calibration = CalibrationConfig(
                lambda_grid=tuple(grid) if grid is not None else CalibrationConfig().lambda_grid,
                alpha=cal.get("alpha", 0.01),
                list_size=cal.get("list_size", 10),
                divergence=cal.get("divergence", "emanon2"),
                eps=cal.get("eps", 1e-5),
                use_blend=cal.get("blend", True),
            )
            out_dir = os.environ.get("CALIBREC_OUTPUT_DIR") or raw["output_dir"]
            cfg = cls(
                dataset_name=ds["name"],
                dataset_format=ds["format"],
                ratings_path=resolve(ds["ratings"]),
                genres_path=resolve(ds["genres"]),
                scale=tuple(ds.get("scale", (0.0, 5.0))),
                csv_schema=ds.get("schema"),
                score_mode=raw.get("score_mode", "original"),
                folds=raw.get("folds", 5),
                seed=raw.get("seed", 0),
                min_user_tx=raw.get("min_user_interactions", 50),
                mf_n_trials=rec.get("n_trials", 20),
                mf_cv_folds=rec.get("cv_folds", 5),
                mf_hyperparams=rec.get("hyperparams"),
                calibration=calibration,
                n_candidates=cal.get("candidates", 100),
                algorithms=tuple(struct.get("algorithms", ALGORITHMS)),
                spaces=struct.get("spaces", {}),
                output_dir=resolve(out_dir),
            )
        except KeyError as exc:
            raise ConfigError(f"config missing required key: {exc}") from exc
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.score_mode not in ("original", "binary", "both"):
            raise ConfigError(f"bad score_mode {self.score_mode!r}")
        if self.dataset_format not in ("movielens", "csv"):
            raise ConfigError(f"bad dataset format {self.dataset_format!r}")
        for p in (self.ratings_path, self.genres_path):
            if not Path(p).exists():
                raise ConfigError(f"referenced path does not exist: {p}")
        if self.dataset_format == "csv" and not self.csv_schema:
            raise ConfigError("csv datasets need a dataset.schema mapping")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.n_candidates < self.calibration.list_size:
            raise ConfigError("candidates must be >= the calibrated list size")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown structure algorithms: {unknown}")

    def canonical(self) -> dict:
        return {
            "dataset": {
                "name": self.dataset_name,
                "format": self.dataset_format,
                "ratings": str(self.ratings_path),
                "genres": str(self.genres_path),
                "scale": list(self.scale),
                "schema": self.csv_schema,
            },
            "score_mode": self.score_mode,
            "folds": self.folds,
            "seed": self.seed,
            "min_user_interactions": self.min_user_tx,
            "recommender": {
                "n_trials": self.mf_n_trials,
                "cv_folds": self.mf_cv_folds,
                "hyperparams": self.mf_hyperparams,
            },
            "calibration": {
                "lambda_grid": list(self.calibration.lambda_grid),
                "alpha": self.calibration.alpha,
                "list_size": self.calibration.list_size,
                "divergence": self.calibration.divergence,
                "eps": self.calibration.eps,
                "blend": self.calibration.use_blend,
                "candidates": self.n_candidates,
            },
            "structure": {
                "algorithms": list(self.algorithms),
                "spaces": self.spaces,
            },
        }


# ---------------------------------------------------------------- ingest

def run_ingest(cfg: ExperimentConfig, mode: str) -> None:
    """Load, clean, optionally binarize, and split into folds."""
    out = cfg.mode_dir(mode)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if cfg.dataset_format == "movielens":
            interactions, catalog = load_movielens(cfg.ratings_path, cfg.genres_path)
        else:
            interactions = load_csv(cfg.ratings_path, cfg.csv_schema, cfg.scale)
            catalog = load_genre_csv(cfg.genres_path)
        interactions, catalog = preprocess(interactions, catalog, cfg.min_user_tx)
        if mode == "binary":
            interactions = binarize(interactions)
        folds = split_folds(interactions, k=cfg.folds, seed=derive_seed(cfg.seed, "folds"))
    except Exception as exc:
        raise PipelineError("ingest", str(exc)) from exc

    save_interactions_csv(interactions, out / "cleaned_ratings.csv")
    save_genre_csv(catalog, out / "genres.csv")
    with (out / "folds.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "item_id", "fold"])
        for (user, item), f in sorted(
            folds.assignment.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))
        ):
            writer.writerow([user, item, f])
    meta = {
        "dataset": cfg.dataset_name,
        "mode": mode,
        "scale": [interactions.scale.min, interactions.scale.max],
        "users": len(interactions.users()),
        "items": len(interactions.items()),
        "ratings": len(interactions),
        "genres": catalog.n_genres,
    }
    with (out / "dataset_meta.json").open("w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_cleaned(cfg: ExperimentConfig, mode: str):
    out = cfg.mode_dir(mode)
    for name in ("cleaned_ratings.csv", "genres.csv", "folds.csv", "dataset_meta.json"):
        if not (out / name).exists():
            raise PipelineError("ingest", f"missing artifact {name}; run ingest first")
    with (out / "dataset_meta.json").open("r", encoding="utf-8") as fh:
        meta = json.load(fh)
    schema = {"user": "user_id", "item": "item_id", "score": "score",
              "timestamp": "timestamp"}
    interactions = load_csv(out / "cleaned_ratings.csv", schema, tuple(meta["scale"]))
    catalog = load_genre_csv(out / "genres.csv")
    assignment = {}
    with (out / "folds.csv").open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            assignment[(coerce_id(row[0]), coerce_id(row[1]))] = int(row[2])
    folds = FoldAssignment(k=cfg.folds, assignment=assignment)
    return interactions, catalog, folds


# ------------------------------------------------------------------ tune

def run_tune(cfg: ExperimentConfig, mode: str,
             n_trials: int | None = None, seed: int | None = None) -> None:
    """Pick MF hyperparameters: fixed from config, or random search scored
    by CV RMSE on fold 0's training split."""
    out = cfg.mode_dir(mode)
    master_seed = cfg.seed if seed is None else seed
    trials = n_trials if n_trials is not None else cfg.mf_n_trials
    try:
        if cfg.mf_hyperparams:
            hp = HyperParams(**cfg.mf_hyperparams)
        else:
            interactions, _, folds = load_cleaned(cfg, mode)
            train, _ = fold_split(interactions, folds, 0)
            hp = random_search(
                train, n_trials=trials, k=cfg.mf_cv_folds,
                seed=derive_seed(master_seed, "tune"),
            )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("tune", str(exc)) from exc
    with (out / "hyperparams.json").open("w", encoding="utf-8") as fh:
        json.dump(
            {"n_factors": hp.n_factors, "n_epochs": hp.n_epochs,
             "lr_all": hp.lr_all, "reg_all": hp.reg_all},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")


def load_hyperparams(cfg: ExperimentConfig, mode: str) -> HyperParams:
    path = cfg.mode_dir(mode) / "hyperparams.json"
    if not path.exists():
        raise PipelineError("tune", "missing hyperparams.json; run tune first")
    with path.open("r", encoding="utf-8") as fh:
        return HyperParams(**json.load(fh))


# ------------------------------------------------------------- recommend

def run_recommend(cfg: ExperimentConfig, mode: str) -> None:
    """Train one MF model per fold and emit every user's candidate list."""
    out = cfg.mode_dir(mode)
    interactions, catalog, folds = load_cleaned(cfg, mode)
    hp = load_hyperparams(cfg, mode)
    pool = sorted(catalog.item_genres)
    for f in range(cfg.folds):
        try:
            train, _ = fold_split(interactions, folds, f)
            model = train_mf(train, hp, seed=derive_seed(cfg.seed, "mf", f))
            save_model(model, out / f"model_fold{f}.npz")
            by_user = train.by_user()
            with (out / f"candidates_fold{f}.csv").open(
                "w", newline="", encoding="utf-8"
            ) as fh:
                writer = csv.writer(fh)
                writer.writerow(["user_id", "rank", "item_id", "predicted_score"])
                for user in sorted(by_user, key=str):
                    seen = {rec.item for rec in by_user[user]}
                    ranked = candidates(model, user, seen, n=cfg.n_candidates, pool=pool)
                    for rank, (item, score) in enumerate(ranked.entries, start=1):
                        writer.writerow([user, rank, item, fmt(score)])
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError("recommend", str(exc), fold=f) from exc


def load_candidates(cfg: ExperimentConfig, mode: str, f: int) -> dict:
    path = cfg.mode_dir(mode) / f"candidates_fold{f}.csv"
    if not path.exists():
        raise PipelineError("recommend", f"missing {path.name}; run recommend first", fold=f)
    lists: dict = {}
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            user = coerce_id(row[0])
            lists.setdefault(user, []).append((coerce_id(row[2]), float(row[3])))
    return {u: RankedList(owner=u, entries=entries) for u, entries in lists.items()}


# ------------------------------------------------------------- calibrate

def run_calibrate(cfg: ExperimentConfig, mode: str) -> None:
    """Greedy lambda sweep per user per fold."""
    out = cfg.mode_dir(mode)
    interactions, catalog, folds = load_cleaned(cfg, mode)
    for f in range(cfg.folds):
        try:
            cand = load_candidates(cfg, mode, f)
            train, _ = fold_split(interactions, folds, f)
            by_user = train.by_user()
            with (out / f"calibrated_fold{f}.csv").open(
                "w", newline="", encoding="utf-8"
            ) as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["user_id", "lambda", "rank", "item_id", "predicted_score"]
                )
                for user in sorted(cand, key=str):
                    pref = preference_distribution(
                        [(r.item, r.score) for r in by_user[user]], catalog, owner=user
                    )
                    swept = sweep_lambda(cand[user], pref, cfg.calibration, catalog)
                    for lam, ranked in swept.items():
                        for rank, (item, score) in enumerate(ranked.entries, start=1):
                            writer.writerow([user, fmt(float(lam)), rank, item, fmt(score)])
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError("calibrate", str(exc), fold=f) from exc


def load_calibrated(cfg: ExperimentConfig, mode: str, f: int) -> dict:
    """-> {lambda: {user: RankedList}} preserving the grid order."""
    path = cfg.mode_dir(mode) / f"calibrated_fold{f}.csv"
    if not path.exists():
        raise PipelineError("calibrate", f"missing {path.name}; run calibrate first", fold=f)
    swept: dict = {float(lam): {} for lam in cfg.calibration.lambda_grid}
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            user = coerce_id(row[0])
            lam = float(row[1])
            swept[lam].setdefault(user, []).append((coerce_id(row[3]), float(row[4])))
    return {
        lam: {u: RankedList(owner=u, entries=e) for u, e in users.items()}
        for lam, users in swept.items()
    }


# --------------------------------------------------------------- analyze

def run_analyze(cfg: ExperimentConfig, mode: str) -> None:
    """Build the stage matrices and label them with every algorithm.

    Hyperparameters are chosen once per algorithm by grid search on the
    preference matrix and reused, with a shared seed, to re-fit the
    candidate and calibrated matrices so labels stay comparable.
    """
    out = cfg.mode_dir(mode)
    (out / "matrices").mkdir(exist_ok=True)
    (out / "labelings").mkdir(exist_ok=True)
    interactions, catalog, folds = load_cleaned(cfg, mode)

    for f in range(cfg.folds):
        chosen_rows = []
        try:
            train, _ = fold_split(interactions, folds, f)
            by_user = train.by_user()
            prefs = [
                preference_distribution(
                    [(r.item, r.score) for r in by_user[user]], catalog, owner=user
                )
                for user in sorted(by_user, key=str)
            ]
            matrices = {PREF_STAGE: distribution_matrix(prefs, catalog)}
            swept = load_calibrated(cfg, mode, f)
            for lam in cfg.calibration.lambda_grid:
                stage = lambda_stage(lam)
                kind = STAGE_CANDIDATE if lam == 0.0 else STAGE_CALIBRATED
                dists = [
                    list_distribution(ranked, catalog, stage=kind)
                    for _, ranked in sorted(swept[float(lam)].items(), key=lambda kv: str(kv[0]))
                ]
                matrices[stage] = distribution_matrix(dists, catalog)
            for stage, matrix in matrices.items():
                save_matrix_csv(matrix, out / "matrices" / f"matrix_fold{f}_{stage}.csv")

            pref_matrix = matrices[PREF_STAGE]
            for alg in cfg.algorithms:
                config, pref_labeling, score = grid_search(
                    alg, cfg.search_space(alg), pref_matrix,
                    seed=derive_seed(cfg.seed, "grid", f, alg),
                )
                for param in sorted(config):
                    chosen_rows.append([alg, param, config[param], fmt(float(score))])
                _save_labels(
                    pref_labeling, out / "labelings" / f"labels_fold{f}_{alg}_{PREF_STAGE}.csv"
                )
                fit_seed = derive_seed(cfg.seed, "fit", f, alg)
                for lam in cfg.calibration.lambda_grid:
                    stage = lambda_stage(lam)
                    labeling = fit_structure(alg, config, matrices[stage], fit_seed)
                    _save_labels(
                        labeling, out / "labelings" / f"labels_fold{f}_{alg}_{stage}.csv"
                    )
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError("analyze", str(exc), fold=f) from exc

        with (out / f"chosen_configs_fold{f}.csv").open(
            "w", newline="", encoding="utf-8"
        ) as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "parameter", "value", "silhouette"])
            writer.writerows(chosen_rows)


def _save_labels(labeling: Labeling, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "label"])
        for user, label in zip(labeling.users, labeling.labels.tolist()):
            writer.writerow([user, label])


def _load_labels(path, algorithm: str) -> Labeling:
    users, labels = [], []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            users.append(coerce_id(row[0]))
            labels.append(int(row[1]))
    return Labeling.build(users, np.array(labels), algorithm)


# ---------------------------------------------------------------- report

def run_report(cfg: ExperimentConfig, mode: str) -> None:
    """Silhouette, Jaccard and ranking metric CSVs, one file per figure."""
    out = cfg.mode_dir(mode)
    interactions, catalog, folds = load_cleaned(cfg, mode)
    stages = [PREF_STAGE] + [lambda_stage(l) for l in cfg.calibration.lambda_grid]

    sil_reports, jac_reports, rank_reports = [], [], []
    for f in range(cfg.folds):
        try:
            labelings: dict = {}
            for stage in stages:
                matrix_path = out / "matrices" / f"matrix_fold{f}_{stage}.csv"
                if not matrix_path.exists():
                    raise PipelineError(
                        "analyze", f"missing {matrix_path.name}; run analyze first", fold=f
                    )
                matrix = load_matrix_csv(matrix_path)
                d = pairwise_distances(matrix, "euclidean").d
                for alg in cfg.algorithms:
                    labeling = _load_labels(
                        out / "labelings" / f"labels_fold{f}_{alg}_{stage}.csv", alg
                    )
                    labelings[(alg, stage)] = labeling
                    try:
                        value = silhouette_from_distances(d, labeling.labels)
                    except ValueError:
                        value = -1.0  # degenerate labeling: silhouette undefined
                    sil_reports.append(MetricReport(
                        cfg.dataset_name, mode, alg, stage, f, "silhouette", value
                    ))
            for alg in cfg.algorithms:
                ref = labelings[(alg, PREF_STAGE)]
                for stage in stages[1:]:
                    jac_reports.append(MetricReport(
                        cfg.dataset_name, mode, alg, stage, f, "jaccard",
                        jaccard_labels(ref, labelings[(alg, stage)]),
                    ))

            train, test = fold_split(interactions, folds, f)
            threshold = _relevance_threshold(interactions.scale)
            relevant: dict = {}
            for rec in test.records:
                if rec.score >= threshold:
                    relevant.setdefault(rec.user, set()).add(rec.item)
            by_user = train.by_user()
            prefs = {
                user: preference_distribution(
                    [(r.item, r.score) for r in recs], catalog, owner=user
                )
                for user, recs in by_user.items()
            }
            swept = load_calibrated(cfg, mode, f)
            for lam in cfg.calibration.lambda_grid:
                stage = lambda_stage(lam)
                lists = swept[float(lam)]
                rank_reports.extend([
                    MetricReport(cfg.dataset_name, mode, "-", stage, f, "map",
                                 map_at_n(lists, relevant)),
                    MetricReport(cfg.dataset_name, mode, "-", stage, f, "mrr",
                                 mrr(lists, relevant)),
                    MetricReport(cfg.dataset_name, mode, "-", stage, f, "mace",
                                 mace(prefs, lists, catalog)),
                ])
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError("report", str(exc), fold=f) from exc

    save_reports_csv(sil_reports, out / "fig-silhouette.csv")
    save_reports_csv(jac_reports, out / "fig-jaccard.csv")
    save_reports_csv(rank_reports, out / "fig-ranking.csv")
    emit_plot_data(sil_reports + jac_reports + rank_reports, out, stages)


def _relevance_threshold(scale) -> float:
    if scale.max == 1:
        return 1.0
    if scale.max == 5:
        return 4.0
    if scale.max == 10:
        return 8.0
    raise ValueError(f"no relevance rule for scale max {scale.max}")


def emit_plot_data(reports, out_dir, stages) -> None:
    """Fold-averaged wide CSVs with mean and sd columns per stage."""
    by_metric: dict = {}
    for r in reports:
        by_metric.setdefault(r.metric, {}).setdefault(
            (r.dataset, r.score_mode, r.algorithm), {}
        ).setdefault(r.stage, []).append(r.value)

    files = {"silhouette": "plot-silhouette.csv", "jaccard": "plot-jaccard.csv",
             "map": "plot-ranking.csv", "mrr": "plot-ranking.csv",
             "mace": "plot-ranking.csv"}
    handles: dict = {}
    try:
        for metric in ("silhouette", "jaccard", "map", "mrr", "mace"):
            if metric not in by_metric:
                continue
            name = files[metric]
            stage_cols = [s for s in stages if any(
                s in cells for cells in by_metric[metric].values()
            )]
            if name not in handles:
                fh = (Path(out_dir) / name).open("w", newline="", encoding="utf-8")
                handles[name] = (fh, csv.writer(fh))
                header = ["dataset", "score_mode", "algorithm", "metric"]
                for s in stage_cols:
                    header += [f"{s}_mean", f"{s}_sd"]
                handles[name][1].writerow(header)
            writer = handles[name][1]
            for (dataset, mode, alg), cells in sorted(by_metric[metric].items()):
                row = [dataset, mode, alg, metric]
                for s in stage_cols:
                    values = cells.get(s)
                    if values is None:
                        row += ["", ""]
                    else:
                        arr = np.array(values, dtype=float)
                        sd = float(arr.std(ddof=0)) if len(arr) > 1 else 0.0
                        row += [fmt(float(arr.mean())), fmt(sd)]
                writer.writerow(row)
    finally:
        for fh, _ in handles.values():
            fh.close()


# ----------------------------------------------------------------- runner

STAGES = ("ingest", "tune", "recommend", "calibrate", "analyze", "report")


def run_experiment(cfg: ExperimentConfig,
                   n_trials: int | None = None, seed: int | None = None) -> dict:
    """All stages for every score mode, plus the run manifest."""
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    genre_axes: dict = {}
    for mode in cfg.modes():
        for stage in STAGES:
            start = time.perf_counter()
            if stage == "tune":
                run_tune(cfg, mode, n_trials=n_trials, seed=seed)
            else:
                globals()[f"run_{stage}"](cfg, mode)
            timings[f"{mode}/{stage}"] = round(time.perf_counter() - start, 3)
        with (cfg.mode_dir(mode) / "genres.csv").open("r", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader)
            names = set()
            for row in reader:
                names.update(g for g in row[1].split("|") if g)
        genre_axes[mode] = sorted(names)

    manifest = {
        "config": cfg.canonical(),
        "config_hash": hashlib.sha256(
            json.dumps(cfg.canonical(), sort_keys=True).encode("utf-8")
        ).hexdigest(),
        "seed": cfg.seed,
        "genre_axes": genre_axes,
        "kernel_backend": _kernels.BACKEND,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timings_s": timings,
    }
    with (Path(cfg.output_dir) / "manifest.json").open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
