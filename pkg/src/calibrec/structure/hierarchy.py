"""Bottom-up average-linkage agglomerative clustering."""

from __future__ import annotations

import numpy as np

from .base import Labeling, compress_labels
from .distances import pairwise_distances


def average_linkage_merges(X) -> list:
    """Full merge sequence on euclidean distances.

    Clusters keep the smaller member index as their id; each step merges
    the pair at minimal average-linkage distance, ties going to the
    smallest (i, j) in row-major order. Returns n-1 (i, j) merges.
    """
    data = np.asarray(getattr(X, "data", X), dtype=float)
    n = data.shape[0]
    d = pairwise_distances(data, "euclidean").d.copy()
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    # mask self and the lower triangle so argmin scans i<j row-major
    work = d.copy()
    work[np.tril_indices(n)] = np.inf

    merges = []
    for _ in range(n - 1):
        flat = int(np.argmin(work))
        i, j = divmod(flat, n)
        merges.append((i, j))
        # Lance-Williams update for average linkage: cluster i absorbs j
        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        if len(others):
            new_d = (sizes[i] * d[i, others] + sizes[j] * d[j, others]) / (
                sizes[i] + sizes[j]
            )
            d[i, others] = new_d
            d[others, i] = new_d
            lo = np.minimum(i, others)
            hi = np.maximum(i, others)
            work[lo, hi] = new_d
        sizes[i] += sizes[j]
        active[j] = False
        work[j, :] = np.inf
        work[:, j] = np.inf
        d[j, :] = np.inf
        d[:, j] = np.inf
    return merges


def cut_merges(merges: list, n: int, k: int) -> np.ndarray:
    """Labels after replaying the first n-k merges."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in merges[: n - k]:
        parent[find(j)] = find(i)
    roots = np.array([find(x) for x in range(n)])
    return compress_labels(roots)


def fit_agglomerative(k: int, X, merges: list | None = None) -> Labeling:
    data = np.asarray(getattr(X, "data", X), dtype=float)
    n = data.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    if merges is None:
        merges = average_linkage_merges(data)
    labels = cut_merges(merges, n, k)
    rows = getattr(X, "rows", None)
    users = list(rows) if rows is not None else list(range(n))
    return Labeling.build(users, labels, "agglomerative", {"n_clusters": k})
