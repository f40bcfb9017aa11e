"""Synthetic 60-user mini dataset for smoke runs and the acceptance suite.

Two latent taste groups (genres 0-2 vs 3-5) drive both the ratings and the
recoverable two-cluster structure. Materialize with:

    python -m calibrec.mini --out data/mini
    calibrec run-all --config data/mini/config.json
"""

from __future__ import annotations

import argparse
import csv
import json
from pathlib import Path

import numpy as np

GENRES = ("action", "comedy", "documentary", "drama", "horror", "romance")
N_USERS = 60
N_ITEMS = 220
DEFAULT_SEED = 20240801


def generate(seed: int = DEFAULT_SEED):
    """-> (ratings rows, item genre names); deterministic in the seed."""
    rng = np.random.default_rng(seed)
    item_genres = {}
    for item in range(1, N_ITEMS + 1):
        count = int(rng.integers(1, 4))
        picks = rng.choice(len(GENRES), size=count, replace=False)
        item_genres[item] = tuple(GENRES[g] for g in sorted(picks))

    # two taste blocks, plus three eclectic users whose flat profiles sit
    # between the blocks and give the outlier detectors something to find
    taste = {u: (0, 1, 2) if u <= (N_USERS - 3) // 2 else (3, 4, 5)
             for u in range(1, N_USERS + 1)}
    eclectic = set(range(N_USERS - 2, N_USERS + 1))
    genre_index = {name: i for i, name in enumerate(GENRES)}

    rows = []
    stamp = 978_300_000
    items = np.array(sorted(item_genres))
    for user in range(1, N_USERS + 1):
        liked = set(taste[user])
        if user in eclectic:
            weights = np.ones(len(items))
        else:
            weights = np.array([
                3.0 if liked & {genre_index[g] for g in item_genres[i]} else 1.0
                for i in items
            ])
        weights /= weights.sum()
        count = 55 + int(rng.integers(0, 12))
        chosen = rng.choice(items, size=count, replace=False, p=weights)
        for item in sorted(int(i) for i in chosen):
            if user in eclectic:
                pool = (1, 2, 3, 4, 5)
            else:
                matched = bool(liked & {genre_index[g] for g in item_genres[item]})
                pool = (3, 4, 4, 5, 5) if matched else (1, 2, 2, 3, 3)
            score = int(pool[rng.integers(len(pool))])
            rows.append((user, item, score, stamp))
            stamp += 1
    return rows, item_genres


def write_mini_dataset(out_dir, seed: int = DEFAULT_SEED) -> Path:
    """Write ratings.csv, genres.csv and config.json; returns the config path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, item_genres = generate(seed)

    with (out / "ratings.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "item_id", "score", "timestamp"])
        writer.writerows(rows)
    with (out / "genres.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "genres"])
        for item in sorted(item_genres):
            writer.writerow([item, "|".join(item_genres[item])])

    config = {
        "dataset": {
            "name": "mini",
            "format": "csv",
            "ratings": "ratings.csv",
            "genres": "genres.csv",
            "scale": [0, 5],
            "schema": {"user": "user_id", "item": "item_id",
                       "score": "score", "timestamp": "timestamp"},
        },
        "score_mode": "both",
        "folds": 5,
        "seed": 1234,
        "min_user_interactions": 50,
        "recommender": {"n_trials": 2, "cv_folds": 5, "hyperparams": None},
        "calibration": {
            "lambda_grid": [round(0.1 * i, 1) for i in range(11)],
            "alpha": 0.01,
            "list_size": 10,
            "divergence": "emanon2",
            "candidates": 100,
            "blend": True,
        },
        "structure": {
            "algorithms": ["kmeans", "bisecting", "fuzzy", "agglomerative",
                           "dbscan", "optics", "gmm", "iforest", "lof", "envelope"],
            "spaces": {
                "kmeans": {"n_clusters": [2, 3, 5]},
                "bisecting": {"n_clusters": [2, 3, 5]},
                "fuzzy": {"n_clusters": [2, 3, 5]},
                "agglomerative": {"n_clusters": [2, 3, 5]},
                "gmm": {"n_components": [1, 2, 3]},
                "dbscan": {"eps": [0.1, 0.2, 0.3], "min_samples": [2, 3, 5],
                           "metric": ["euclidean", "cityblock"]},
                "optics": {"eps": [0.1, 0.2, 0.3], "min_samples": [2, 3, 5],
                           "metric": ["euclidean", "cityblock"]},
                "iforest": {"n_estimators": [23]},
                "lof": {"n_neighbors": [5, 11], "metric": ["euclidean"]},
                "envelope": {"nu": [0.05, 0.1]},
            },
        },
        "output_dir": "out",
    }
    config_path = out / "config.json"
    with config_path.open("w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")
    return config_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="materialize the mini dataset")
    parser.add_argument("--out", required=True, help="target directory")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    path = write_mini_dataset(args.out, seed=args.seed)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
