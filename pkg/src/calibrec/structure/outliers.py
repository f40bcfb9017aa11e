"""Outlier detectors: isolation forest, local outlier factor, elliptic
envelope (empirical covariance). All emit binary labels, 1 = outlier."""

from __future__ import annotations

from math import ceil, log

import numpy as np

from .base import Labeling
from .distances import pairwise_distances

IFOREST_SUBSAMPLE = 256
IFOREST_THRESHOLD = 0.5
LOF_THRESHOLD = 1.5
ENVELOPE_REG = 1e-6

_EULER_GAMMA = 0.5772156649015329


def _avg_path(m: float) -> float:
    """Expected unsuccessful-search path length in a BST of m points."""
    if m <= 1.0:
        return 0.0
    if m == 2.0:
        return 1.0
    h = log(m - 1.0) + _EULER_GAMMA
    return 2.0 * h - 2.0 * (m - 1.0) / m


def _build_tree(data, idx, depth, limit, rng):
    n = len(idx)
    if depth >= limit or n <= 1:
        return ("leaf", n)
    sub = data[idx]
    mins = sub.min(axis=0)
    maxs = sub.max(axis=0)
    valid = np.flatnonzero(maxs > mins)
    if len(valid) == 0:
        return ("leaf", n)
    f = int(valid[rng.integers(len(valid))])
    split = rng.uniform(mins[f], maxs[f])
    left = idx[data[idx, f] < split]
    right = idx[data[idx, f] >= split]
    return (
        "node",
        f,
        split,
        _build_tree(data, left, depth + 1, limit, rng),
        _build_tree(data, right, depth + 1, limit, rng),
    )


def _path_length(tree, x) -> float:
    depth = 0
    while tree[0] == "node":
        _, f, split, left, right = tree
        tree = left if x[f] < split else right
        depth += 1
    return depth + _avg_path(float(tree[1]))


def isolation_forest_scores(data, n_estimators, rng) -> np.ndarray:
    """Anomaly score in (0, 1): 2^(-mean path / c(sample size))."""
    n = data.shape[0]
    sample = min(IFOREST_SUBSAMPLE, n)
    limit = int(ceil(np.log2(sample))) if sample > 1 else 0
    trees = []
    for _ in range(n_estimators):
        idx = rng.choice(n, size=sample, replace=False)
        trees.append(_build_tree(data, idx, 0, limit, rng))
    norm = _avg_path(float(sample))
    depths = np.empty((n, n_estimators))
    for t, tree in enumerate(trees):
        for i in range(n):
            depths[i, t] = _path_length(tree, data[i])
    mean_depth = depths.mean(axis=1)
    return np.power(2.0, -mean_depth / norm)


def lof_scores(d: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Local outlier factor per point (self excluded from neighborhoods)."""
    n = d.shape[0]
    if not 1 <= n_neighbors < n:
        raise ValueError(f"need 1 <= n_neighbors < {n}, got {n_neighbors}")
    work = d.copy()
    np.fill_diagonal(work, np.inf)
    sorted_d = np.sort(work, axis=1)
    kdist = sorted_d[:, n_neighbors - 1]
    neighborhoods = [np.flatnonzero(work[i] <= kdist[i]) for i in range(n)]

    lrd = np.empty(n)
    for i in range(n):
        nb = neighborhoods[i]
        reach = np.maximum(kdist[nb], work[i, nb])
        total = reach.sum()
        lrd[i] = len(nb) / total if total > 0.0 else np.inf

    lof = np.empty(n)
    for i in range(n):
        nb = neighborhoods[i]
        if np.isinf(lrd[i]):
            # duplicate-dense point: by convention not more outlying than
            # its neighbors
            lof[i] = 1.0
        else:
            lof[i] = lrd[nb].sum() / (len(nb) * lrd[i])
    return lof


def envelope_outliers(data, nu: float) -> np.ndarray:
    """Flag the ceil(nu * n) largest Mahalanobis distances from the
    empirical center."""
    n = data.shape[0]
    if not 0.0 < nu <= 0.5:
        raise ValueError(f"need nu in (0, 0.5], got {nu}")
    mean = data.mean(axis=0)
    diff = data - mean
    cov = diff.T @ diff / n
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        cov = cov + ENVELOPE_REG * np.eye(cov.shape[0])
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance singular despite regularization") from exc
    z = np.linalg.solve(chol, diff.T)
    d2 = (z * z).sum(axis=0)
    m = int(ceil(nu * n))
    order = np.lexsort((np.arange(n), -d2))
    labels = np.zeros(n, dtype=np.int64)
    labels[order[:m]] = 1
    return labels


def fit_outlier(method: str, params: dict, X, seed: int) -> Labeling:
    """Binary labeling (0 inlier / 1 outlier) from one of the detectors.

    iforest uses params['n_estimators'] and flags scores above 0.5; lof
    uses params['n_neighbors'] plus optional 'metric' and flags LOF > 1.5;
    envelope flags the params['nu'] fraction with the largest Mahalanobis
    distances.
    """
    data = np.asarray(getattr(X, "data", X), dtype=float)
    n = data.shape[0]
    rng = np.random.default_rng(seed)
    if method == "iforest":
        n_estimators = int(params["n_estimators"])
        if n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        scores = isolation_forest_scores(data, n_estimators, rng)
        labels = (scores > IFOREST_THRESHOLD).astype(np.int64)
    elif method == "lof":
        metric = params.get("metric", "euclidean")
        d = pairwise_distances(data, metric).d
        scores = lof_scores(d, int(params["n_neighbors"]))
        labels = (scores > LOF_THRESHOLD).astype(np.int64)
    elif method == "envelope":
        labels = envelope_outliers(data, float(params["nu"]))
    else:
        raise ValueError(f"unknown outlier method {method!r}")
    rows = getattr(X, "rows", None)
    users = list(rows) if rows is not None else list(range(n))
    return Labeling.build(users, labels, method, dict(params, seed=seed))
