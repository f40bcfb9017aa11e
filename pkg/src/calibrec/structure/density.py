"""Density-based clustering: DBSCAN and OPTICS with eps-cut extraction.

Both discover the number of clusters from the data and label sparse points
as noise (-1). OPTICS computes the full reachability ordering and extracts
clusters with the DBSCAN-equivalent eps cut, so the two agree on core
structure while OPTICS stays usable for smaller epsilons.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .base import NOISE, Labeling
from .distances import pairwise_distances


def dbscan_labels(d: np.ndarray, eps: float, min_samples: int) -> np.ndarray:
    """Connected components of core points plus reachable border points.

    A point is core when at least min_samples points (itself included) lie
    within eps. Border points join the first cluster that reaches them;
    everything else is noise.
    """
    n = d.shape[0]
    within = d <= eps
    core = within.sum(axis=1) >= min_samples
    labels = np.full(n, NOISE, dtype=np.int64)
    cluster = 0
    for start in range(n):
        if not core[start] or labels[start] != NOISE:
            continue
        labels[start] = cluster
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in np.flatnonzero(within[v]):
                if labels[w] == NOISE:
                    labels[w] = cluster
                    if core[w]:
                        queue.append(int(w))
        cluster += 1
    return labels


def optics_order(d: np.ndarray, min_samples: int):
    """Reachability ordering with unlimited max-eps.

    Returns (order, reachability, core_distance); starts and ties resolve
    to the lowest index, so the ordering is deterministic.
    """
    n = d.shape[0]
    core_dist = np.sort(d, axis=1)[:, min_samples - 1] if min_samples <= n else np.full(n, np.inf)
    reach = np.full(n, np.inf)
    processed = np.zeros(n, dtype=bool)
    order = []

    for start in range(n):
        if processed[start]:
            continue
        processed[start] = True
        order.append(start)
        seeds = _update(d, core_dist, reach, processed, start, {})
        while seeds:
            nxt = min(seeds.items(), key=lambda kv: (kv[1], kv[0]))[0]
            del seeds[nxt]
            processed[nxt] = True
            order.append(nxt)
            seeds = _update(d, core_dist, reach, processed, nxt, seeds)
    return np.array(order), reach, core_dist


def _update(d, core_dist, reach, processed, p, seeds):
    cd = core_dist[p]
    if not np.isfinite(cd):
        return seeds
    for o in np.flatnonzero(~processed):
        new_reach = max(cd, d[p, o])
        if new_reach < reach[o]:
            reach[o] = new_reach
            seeds[int(o)] = new_reach
    return seeds


def optics_labels(d: np.ndarray, eps: float, min_samples: int) -> np.ndarray:
    """Eps-cut cluster extraction over the reachability ordering."""
    order, reach, core_dist = optics_order(d, min_samples)
    labels = np.full(d.shape[0], NOISE, dtype=np.int64)
    cluster = -1
    for p in order:
        if reach[p] > eps:
            if core_dist[p] <= eps:
                cluster += 1
                labels[p] = cluster
        else:
            labels[p] = cluster
    return labels


def fit_density(
    method: str, eps: float, min_samples: int, metric: str, X
) -> Labeling:
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    dist = pairwise_distances(X, metric)
    if method == "dbscan":
        labels = dbscan_labels(dist.d, eps, min_samples)
    elif method == "optics":
        labels = optics_labels(dist.d, eps, min_samples)
    else:
        raise ValueError(f"unknown density method {method!r}")
    rows = getattr(X, "rows", None)
    users = list(rows) if rows is not None else list(range(dist.n))
    return Labeling.build(
        users, labels, method,
        {"eps": eps, "min_samples": min_samples, "metric": dist.metric},
    )
