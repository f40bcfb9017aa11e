"""Gaussian mixture fitted by EM with full covariances."""

from __future__ import annotations

import numpy as np

from .base import Labeling, compress_labels
from .partitional import kmeans_fit

COV_REG = 1e-6
EM_TOL = 1e-4
EM_MAX_ITER = 200


def _log_gaussians(data, means, covs):
    """Per-component log densities, (n, k)."""
    n, dim = data.shape
    k = means.shape[0]
    out = np.empty((n, k))
    for j in range(k):
        try:
            chol = np.linalg.cholesky(covs[j])
        except np.linalg.LinAlgError as exc:
            raise ValueError(
                f"component {j} covariance is singular despite regularization"
            ) from exc
        diff = data - means[j]
        z = np.linalg.solve(chol, diff.T)
        maha = (z * z).sum(axis=0)
        logdet = 2.0 * np.log(np.diag(chol)).sum()
        out[:, j] = -0.5 * (dim * np.log(2.0 * np.pi) + logdet + maha)
    return out


def gaussian_mixture_fit(data, n_components, rng):
    """EM loop seeded from a k-means hard assignment.

    Returns (labels, responsibilities, mean log-likelihood history).
    """
    n, dim = data.shape
    k = n_components
    if k == 1:
        hard = np.zeros(n, dtype=np.int64)
    else:
        hard, _, _ = kmeans_fit(data, k, rng)
    resp = np.zeros((n, k))
    resp[np.arange(n), hard] = 1.0

    means = np.empty((k, dim))
    covs = np.empty((k, dim, dim))
    weights = np.empty(k)
    history = []
    prev_ll = -np.inf
    for _ in range(EM_MAX_ITER):
        # M step
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 10 * np.finfo(float).tiny)
        weights = nk / n
        means = (resp.T @ data) / nk[:, None]
        for j in range(k):
            diff = data - means[j]
            covs[j] = (resp[:, j][:, None] * diff).T @ diff / nk[j]
            covs[j][np.diag_indices(dim)] += COV_REG
        # E step
        log_prob = _log_gaussians(data, means, covs) + np.log(weights)[None, :]
        shift = log_prob.max(axis=1, keepdims=True)
        log_norm = shift[:, 0] + np.log(np.exp(log_prob - shift).sum(axis=1))
        resp = np.exp(log_prob - log_norm[:, None])
        ll = float(log_norm.mean())
        history.append(ll)
        if abs(ll - prev_ll) < EM_TOL:
            break
        prev_ll = ll
    return resp.argmax(axis=1), resp, history


def fit_gaussian_mixture(n_components: int, X, seed: int) -> Labeling:
    data = np.asarray(getattr(X, "data", X), dtype=float)
    n = data.shape[0]
    if not 1 <= n_components <= n:
        raise ValueError(f"need 1 <= n_components <= {n}, got {n_components}")
    rng = np.random.default_rng(seed)
    raw, _, _ = gaussian_mixture_fit(data, n_components, rng)
    labels = compress_labels(raw)
    rows = getattr(X, "rows", None)
    users = list(rows) if rows is not None else list(range(n))
    return Labeling.build(
        users, labels, "gmm", {"n_components": n_components, "seed": seed}
    )
