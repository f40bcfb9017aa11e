"""Partition clusterers: k-means, bisecting k-means, fuzzy c-means."""

from __future__ import annotations

import numpy as np

from .base import Labeling, compress_labels

LLOYD_TOL = 1e-6
LLOYD_MAX_ITER = 300
FUZZIFIER = 2.0


def _as_data(X) -> np.ndarray:
    return np.asarray(getattr(X, "data", X), dtype=float)


def _users_of(X, n):
    rows = getattr(X, "rows", None)
    return list(rows) if rows is not None else list(range(n))


def _sq_dists(data, centers):
    # (n, k) squared euclidean distances
    diff = data[:, None, :] - centers[None, :, :]
    return (diff * diff).sum(axis=2)


def kmeans_pp_init(data, k, rng):
    """k-means++ seeding; degenerate all-zero spread falls back to the
    first unchosen index so the init stays deterministic."""
    n = data.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((data - data[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            pick = next(i for i in range(n) if i not in set(chosen))
        else:
            r = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            pick = min(pick, n - 1)
        chosen.append(pick)
        d2 = np.minimum(d2, ((data - data[pick]) ** 2).sum(axis=1))
    return data[np.array(chosen)].copy()


def lloyd(data, centers, tol=LLOYD_TOL, max_iter=LLOYD_MAX_ITER):
    """Lloyd iterations to convergence.

    Returns (labels, centers, inertia_history); the history records the
    inertia after every assignment step and is non-increasing.
    """
    k = centers.shape[0]
    history = []
    labels = None
    for _ in range(max_iter):
        d2 = _sq_dists(data, centers)
        labels = d2.argmin(axis=1)
        # re-seed empty clusters on the farthest point from its center
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(d2[np.arange(len(labels)), labels]))
                centers[j] = data[far]
                d2[:, j] = ((data - centers[j]) ** 2).sum(axis=1)
                labels = d2.argmin(axis=1)
        history.append(float(d2[np.arange(len(labels)), labels].sum()))
        new_centers = np.empty_like(centers)
        for j in range(k):
            members = data[labels == j]
            new_centers[j] = members.mean(axis=0)
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < tol:
            break
    d2 = _sq_dists(data, centers)
    labels = d2.argmin(axis=1)
    history.append(float(d2[np.arange(len(labels)), labels].sum()))
    return labels, centers, history


def kmeans_fit(data, k, rng):
    centers = kmeans_pp_init(data, k, rng)
    return lloyd(data, centers)


def bisecting_fit(data, k, rng):
    """Repeatedly 2-means-split the cluster with the largest inertia."""
    clusters = [np.arange(data.shape[0])]
    while len(clusters) < k:
        inertias = []
        for idx in clusters:
            sub = data[idx]
            center = sub.mean(axis=0)
            inertias.append(float(((sub - center) ** 2).sum()))
        order = sorted(range(len(clusters)), key=lambda j: (-inertias[j], j))
        target = None
        for j in order:
            sub = data[clusters[j]]
            if len(clusters[j]) >= 2 and np.any(sub != sub[0]):
                target = j
                break
        if target is None:
            raise ValueError(
                f"cannot bisect further: fewer than {k} distinct point groups"
            )
        idx = clusters[target]
        sub_labels, _, _ = kmeans_fit(data[idx], 2, rng)
        sub_labels = compress_labels(sub_labels)
        clusters[target] = idx[sub_labels == 0]
        clusters.insert(target + 1, idx[sub_labels == 1])
    labels = np.empty(data.shape[0], dtype=np.int64)
    for pos, idx in enumerate(clusters):
        labels[idx] = pos
    return labels


def fuzzy_cmeans_fit(data, k, rng, tol=LLOYD_TOL, max_iter=LLOYD_MAX_ITER):
    """Fuzzy c-means with fuzzifier m=2.

    Returns (hard labels, memberships); memberships of each user sum to 1
    and the hard label is the argmax membership.
    """
    centers = kmeans_pp_init(data, k, rng)
    memberships = None
    for _ in range(max_iter):
        d2 = _sq_dists(data, centers)
        memberships = _memberships(d2)
        weights = memberships ** FUZZIFIER
        denom = weights.sum(axis=0)
        new_centers = np.empty_like(centers)
        for j in range(k):
            if denom[j] > 0.0:
                new_centers[j] = (weights[:, j][:, None] * data).sum(axis=0) / denom[j]
            else:
                new_centers[j] = centers[j]
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < tol:
            break
    d2 = _sq_dists(data, centers)
    memberships = _memberships(d2)
    return memberships.argmax(axis=1), memberships


def _memberships(d2):
    # m=2 gives u_ij = (sum_l d2_ij / d2_il)^-1; points sitting on a center
    # get full membership split across the zero-distance centers
    n, k = d2.shape
    u = np.zeros((n, k))
    zero = d2 <= 0.0
    any_zero = zero.any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / d2
    finite = ~any_zero
    u[finite] = inv[finite] / inv[finite].sum(axis=1, keepdims=True)
    if any_zero.any():
        counts = zero[any_zero].sum(axis=1, keepdims=True)
        u[any_zero] = zero[any_zero] / counts
    return u


def fit_partitional(method: str, k: int, X, seed: int) -> Labeling:
    """Fit one of kmeans / bisecting / fuzzy at a fixed cluster count."""
    data = _as_data(X)
    n = data.shape[0]
    if not 1 < k <= n:
        raise ValueError(f"need 1 < k <= {n}, got k={k}")
    rng = np.random.default_rng(seed)
    if method == "kmeans":
        raw, _, _ = kmeans_fit(data, k, rng)
    elif method == "bisecting":
        raw = bisecting_fit(data, k, rng)
    elif method == "fuzzy":
        raw, _ = fuzzy_cmeans_fit(data, k, rng)
    else:
        raise ValueError(f"unknown partitional method {method!r}")
    labels = compress_labels(raw)
    return Labeling.build(
        _users_of(X, n), labels, method, {"n_clusters": k, "seed": seed}
    )
