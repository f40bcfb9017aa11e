"""Hyperparameter grids and silhouette-maximizing grid search."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..utils import derive_seed
from .base import Labeling
from .density import fit_density
from .distances import canonical_metric, pairwise_distances
from .hierarchy import average_linkage_merges, fit_agglomerative
from .mixture import fit_gaussian_mixture
from .outliers import fit_outlier
from .partitional import fit_partitional

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
          53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
WITH_ONE = (1,) + PRIMES
EPSILONS = tuple(round(0.05 * i, 2) for i in range(1, 12))
METRIC_CHOICES = ("cityblock", "cosine", "euclidean", "l1", "l2", "manhattan",
                  "braycurtis", "canberra", "chebyshev", "correlation", "hamming")
NUS = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)

ALGORITHMS = ("kmeans", "bisecting", "fuzzy", "agglomerative",
              "dbscan", "optics", "gmm", "iforest", "lof", "envelope")

_PARTITIONAL = ("kmeans", "bisecting", "fuzzy")
_OUTLIER = ("iforest", "lof", "envelope")


@dataclass
class SearchSpace:
    """Per-parameter candidate value lists for one algorithm."""

    params: dict = field(default_factory=dict)

    def configs(self):
        """Cross product in declaration order, rightmost parameter fastest."""
        names = list(self.params)
        for combo in product(*(self.params[name] for name in names)):
            yield dict(zip(names, combo))

    def __len__(self) -> int:
        if not self.params:
            return 0
        out = 1
        for values in self.params.values():
            out *= len(values)
        return out


def default_search_space(method: str) -> SearchSpace:
    if method in _PARTITIONAL or method == "agglomerative":
        return SearchSpace({"n_clusters": list(PRIMES)})
    if method == "gmm":
        return SearchSpace({"n_components": list(WITH_ONE)})
    if method in ("dbscan", "optics"):
        return SearchSpace({
            "eps": list(EPSILONS),
            "min_samples": list(PRIMES),
            "metric": list(METRIC_CHOICES),
        })
    if method == "iforest":
        return SearchSpace({"n_estimators": list(WITH_ONE)})
    if method == "lof":
        return SearchSpace({
            "n_neighbors": list(WITH_ONE),
            "metric": list(METRIC_CHOICES),
        })
    if method == "envelope":
        return SearchSpace({"nu": list(NUS)})
    raise ValueError(f"unknown algorithm {method!r}")


def fit_structure(method: str, config: dict, X, seed: int,
                  merges: list | None = None) -> Labeling:
    """Fit any of the ten structure learners from a config record."""
    if method in _PARTITIONAL:
        return fit_partitional(method, int(config["n_clusters"]), X, seed)
    if method == "agglomerative":
        return fit_agglomerative(int(config["n_clusters"]), X, merges=merges)
    if method in ("dbscan", "optics"):
        return fit_density(
            method, float(config["eps"]), int(config["min_samples"]),
            config.get("metric", "euclidean"), X,
        )
    if method == "gmm":
        return fit_gaussian_mixture(int(config["n_components"]), X, seed)
    if method in _OUTLIER:
        return fit_outlier(method, config, X, seed)
    raise ValueError(f"unknown algorithm {method!r}")


def config_is_valid(method: str, config: dict, n: int) -> bool:
    """Whether the config satisfies the method's preconditions at size n."""
    if method in _PARTITIONAL or method == "agglomerative":
        return 1 < int(config["n_clusters"]) <= n
    if method == "gmm":
        return 1 <= int(config["n_components"]) <= n
    if method == "lof":
        return 1 <= int(config["n_neighbors"]) < n
    return True


def grid_search(method: str, space: SearchSpace, X, seed: int):
    """Exhaustive search maximizing the mean silhouette of the labeling.

    Configs producing fewer than two effective groups (or failing to fit)
    score -1; configs violating the method's preconditions at this data
    size are skipped. Ties keep the first config in enumeration order.
    Returns (config, labeling, mean silhouette).
    """
    from ..metrics import silhouette_from_distances  # deferred: import cycle

    if not len(space):
        raise ValueError("empty search space")
    data = np.asarray(getattr(X, "data", X), dtype=float)
    n = data.shape[0]

    sil_d = pairwise_distances(X, "euclidean").d
    dist_cache: dict[str, np.ndarray] = {}
    merges = average_linkage_merges(data) if method == "agglomerative" else None

    best = None
    first = None
    for index, config in enumerate(space.configs()):
        if not config_is_valid(method, config, n):
            continue
        config_seed = derive_seed(seed, index)
        try:
            if method in ("dbscan", "optics"):
                key = canonical_metric(config.get("metric", "euclidean"))
                if key not in dist_cache:
                    dist_cache[key] = pairwise_distances(X, key).d
                labeling = _fit_density_cached(
                    method, config, dist_cache[key], X
                )
            else:
                labeling = fit_structure(method, config, X, config_seed, merges)
            if labeling.effective_groups() < 2:
                score = -1.0
            else:
                score = silhouette_from_distances(sil_d, labeling.labels)
        except (ValueError, np.linalg.LinAlgError):
            labeling, score = None, -1.0
        if first is None and labeling is not None:
            first = (config, labeling, score)
        if labeling is not None and (best is None or score > best[2]):
            best = (config, labeling, score)

    if best is None:
        raise ValueError(f"no evaluable configs for {method} at n={n}")
    if best[2] == -1.0:
        warnings.warn(
            f"{method}: every configuration degenerate (fewer than two groups); "
            "returning the first evaluated config"
        )
        return first
    return best


def _fit_density_cached(method, config, d, X):
    from .density import dbscan_labels, optics_labels

    eps = float(config["eps"])
    min_samples = int(config["min_samples"])
    if eps <= 0.0 or min_samples < 1:
        raise ValueError("bad density parameters")
    labels = dbscan_labels(d, eps, min_samples) if method == "dbscan" else \
        optics_labels(d, eps, min_samples)
    rows = getattr(X, "rows", None)
    users = list(rows) if rows is not None else list(range(d.shape[0]))
    return Labeling.build(
        users, labels, method,
        {"eps": eps, "min_samples": min_samples,
         "metric": canonical_metric(config.get("metric", "euclidean"))},
    )
