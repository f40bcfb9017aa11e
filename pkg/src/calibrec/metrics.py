"""Evaluation metrics: silhouette, label-agreement Jaccard, MAP, MRR, MACE."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .distribution import list_distribution
from .structure.distances import pairwise_distances
from .utils import fmt


@dataclass
class MetricReport:
    dataset: str
    score_mode: str
    algorithm: str
    stage: str
    fold: int
    metric: str
    value: float


def silhouette_from_distances(d: np.ndarray, labels) -> float:
    """Mean silhouette over a precomputed distance matrix.

    Noise (-1) counts as a regular group; singleton-group points score 0.
    Raises when fewer than two effective groups exist.
    """
    labels = np.asarray(labels)
    groups = sorted(set(labels.tolist()))
    if len(groups) < 2:
        raise ValueError("silhouette undefined: fewer than two effective groups")
    n = len(labels)
    onehot = np.zeros((n, len(groups)))
    col = {g: j for j, g in enumerate(groups)}
    for i, l in enumerate(labels.tolist()):
        onehot[i, col[l]] = 1.0
    counts = onehot.sum(axis=0)
    sums = d @ onehot

    own = np.array([col[l] for l in labels.tolist()])
    own_counts = counts[own]
    sil = np.zeros(n)
    multi = own_counts > 1
    a = np.zeros(n)
    a[multi] = sums[np.arange(n), own][multi] / (own_counts[multi] - 1.0)

    means = sums / counts[None, :]
    means[np.arange(n), own] = np.inf
    b = means.min(axis=1)

    denom = np.maximum(a, b)
    ok = multi & (denom > 0.0)
    sil[ok] = (b[ok] - a[ok]) / denom[ok]
    # singletons stay 0 by convention; so do coincident-point ties (a=b=0)
    return float(sil.mean())


def silhouette(X, labeling, metric: str = "euclidean") -> float:
    """Mean silhouette of a labeling over a distribution matrix."""
    labels = getattr(labeling, "labels", labeling)
    d = pairwise_distances(X, metric).d
    return silhouette_from_distances(d, labels)


def jaccard_labels(a, b) -> float:
    """Agreement between two labelings of the same users, in [0, 1].

    The second labeling is aligned to the first by a maximum-agreement
    one-to-one matching of label values (identity when both labelings are
    binary outlier-style over {0, 1}). With m agreeing users out of n, the
    score is m / (2n - m): the Jaccard overlap of the two sets of
    (user, label) pairs.
    """
    labels_a = np.asarray(getattr(a, "labels", a))
    labels_b = np.asarray(getattr(b, "labels", b))
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"labelings disagree on length: {len(labels_a)} vs {len(labels_b)}"
        )
    users_a = getattr(a, "users", None)
    users_b = getattr(b, "users", None)
    if users_a is not None and users_b is not None and list(users_a) != list(users_b):
        raise ValueError("labelings cover different users or orderings")
    n = len(labels_a)
    if n == 0:
        raise ValueError("empty labelings")

    set_a = set(labels_a.tolist())
    set_b = set(labels_b.tolist())
    if set_a <= {0, 1} and set_b <= {0, 1}:
        aligned = labels_b
    else:
        vals_a = sorted(set_a)
        vals_b = sorted(set_b)
        contingency = np.zeros((len(vals_b), len(vals_a)))
        row = {v: i for i, v in enumerate(vals_b)}
        colmap = {v: j for j, v in enumerate(vals_a)}
        for va, vb in zip(labels_a.tolist(), labels_b.tolist()):
            contingency[row[vb], colmap[va]] += 1.0
        rows, cols = linear_sum_assignment(contingency, maximize=True)
        remap = {vals_b[r]: vals_a[c] for r, c in zip(rows, cols)}
        # unmatched source labels keep an impossible value
        aligned = np.array(
            [remap.get(v, np.iinfo(np.int64).min) for v in labels_b.tolist()]
        )
    m = int((aligned == labels_a).sum())
    return m / (2 * n - m)


def map_at_n(lists: dict, relevant: dict) -> float:
    """Mean average precision over the top-N lists.

    Per user, precision at each relevant hit's rank is averaged over the
    hits; users with no relevant item in the list contribute 0.
    """
    if not lists:
        raise ValueError("no lists to evaluate")
    total = 0.0
    for user, ranked in lists.items():
        rel = relevant.get(user, set())
        hits = 0
        precision_sum = 0.0
        for rank, (item, _) in enumerate(_entries(ranked), start=1):
            if item in rel:
                hits += 1
                precision_sum += hits / rank
        total += precision_sum / hits if hits else 0.0
    return total / len(lists)


def mrr(lists: dict, relevant: dict) -> float:
    """Mean reciprocal rank of the first relevant item (0 when none)."""
    if not lists:
        raise ValueError("no lists to evaluate")
    total = 0.0
    for user, ranked in lists.items():
        rel = relevant.get(user, set())
        for rank, (item, _) in enumerate(_entries(ranked), start=1):
            if item in rel:
                total += 1.0 / rank
                break
    return total / len(lists)


def mace(prefs: dict, lists: dict, catalog) -> float:
    """Mean average calibration error over rank prefixes.

    For each user and each prefix length k, the absolute P-Q_k difference
    is averaged over the union support of P and the full-list distribution;
    those prefix errors are averaged per user, then over users.
    """
    if not lists:
        raise ValueError("no lists to evaluate")
    total = 0.0
    for user, ranked in lists.items():
        p = prefs[user]
        entries = _entries(ranked)
        if not entries:
            raise ValueError(f"user {user!r} has an empty list")
        q_full = list_distribution(entries, catalog)
        support = sorted(p.support() | q_full.support())
        if not support:
            continue
        ace_sum = 0.0
        for k in range(1, len(entries) + 1):
            q_k = list_distribution(entries[:k], catalog)
            err = 0.0
            for g in support:
                err += abs(p.get(g) - q_k.get(g))
            ace_sum += err / len(support)
        total += ace_sum / len(entries)
    return total / len(lists)


def _entries(ranked):
    return list(getattr(ranked, "entries", ranked))


def save_reports_csv(reports, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset", "score_mode", "algorithm", "stage", "fold", "metric", "value"]
        )
        for r in reports:
            writer.writerow(
                [r.dataset, r.score_mode, r.algorithm, r.stage, r.fold,
                 r.metric, fmt(float(r.value))]
            )
