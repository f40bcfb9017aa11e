"""Pairwise distance matrices for the structure learners.

Eleven accepted metric names collapse to eight distinct metrics
(cityblock = L1 = manhattan, euclidean = L2). Zero vectors under cosine and
correlation are defined to be at distance 1 from anything nonzero and 0
from each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRIC_ALIASES = {
    "cityblock": "cityblock",
    "l1": "cityblock",
    "manhattan": "cityblock",
    "euclidean": "euclidean",
    "l2": "euclidean",
    "cosine": "cosine",
    "braycurtis": "braycurtis",
    "canberra": "canberra",
    "chebyshev": "chebyshev",
    "correlation": "correlation",
    "hamming": "hamming",
}

METRIC_NAMES = tuple(sorted(METRIC_ALIASES))

_BLOCK = 64


@dataclass
class DistanceMatrix:
    n: int
    d: np.ndarray
    metric: str


def canonical_metric(metric: str) -> str:
    key = str(metric).lower()
    if key not in METRIC_ALIASES:
        raise ValueError(
            f"unknown metric {metric!r}; accepted names: {sorted(METRIC_ALIASES)}"
        )
    return METRIC_ALIASES[key]


def pairwise_distances(X, metric: str = "euclidean") -> DistanceMatrix:
    data = np.asarray(getattr(X, "data", X), dtype=float)
    if data.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    name = canonical_metric(metric)
    d = _DISPATCH[name](data)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(n=data.shape[0], d=d, metric=name)


def _blockwise(data, accumulate):
    n = data.shape[0]
    d = np.empty((n, n))
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        diff = data[start:stop, None, :] - data[None, :, :]
        d[start:stop] = accumulate(diff, data[start:stop], data)
    return d


def _euclidean(data):
    return _blockwise(data, lambda diff, a, b: np.sqrt((diff * diff).sum(axis=2)))


def _cityblock(data):
    return _blockwise(data, lambda diff, a, b: np.abs(diff).sum(axis=2))


def _chebyshev(data):
    return _blockwise(data, lambda diff, a, b: np.abs(diff).max(axis=2))


def _hamming(data):
    n = data.shape[0]
    d = np.empty((n, n))
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        d[start:stop] = (data[start:stop, None, :] != data[None, :, :]).mean(axis=2)
    return d


def _canberra(data):
    def acc(diff, a, b):
        denom = np.abs(a)[:, None, :] + np.abs(b)[None, :, :]
        with np.errstate(invalid="ignore", divide="ignore"):
            terms = np.abs(diff) / denom
        terms[denom == 0.0] = 0.0
        return terms.sum(axis=2)

    return _blockwise(data, acc)


def _braycurtis(data):
    def acc(diff, a, b):
        num = np.abs(diff).sum(axis=2)
        den = np.abs(a[:, None, :] + b[None, :, :]).sum(axis=2)
        out = np.zeros_like(num)
        mask = den > 0.0
        out[mask] = num[mask] / den[mask]
        return out

    return _blockwise(data, acc)


def _cosine(data):
    return _dot_based(data)


def _correlation(data):
    centered = data - data.mean(axis=1, keepdims=True)
    return _dot_based(centered)


def _dot_based(rows):
    # 1 - cos(x, y) == 0.5 * ||x/|x| - y/|y|||^2; the difference form makes
    # identical rows exactly 0 and keeps the matrix symmetric and >= 0
    # without clipping
    norms = np.sqrt((rows * rows).sum(axis=1))
    nonzero = norms > 0.0
    safe = np.where(nonzero, norms, 1.0)
    units = rows / safe[:, None]
    d = _blockwise(units, lambda diff, a, b: 0.5 * (diff * diff).sum(axis=2))
    # zero (or constant, for correlation) rows: distance 1 to anything
    # nonzero, 0 to each other
    d[~nonzero, :] = 1.0
    d[:, ~nonzero] = 1.0
    zz = np.ix_(~nonzero, ~nonzero)
    d[zz] = 0.0
    return d


_DISPATCH = {
    "euclidean": _euclidean,
    "cityblock": _cityblock,
    "chebyshev": _chebyshev,
    "hamming": _hamming,
    "canberra": _canberra,
    "braycurtis": _braycurtis,
    "cosine": _cosine,
    "correlation": _correlation,
}
