"""Relevance/calibration scoring and greedy trade-off list construction.

The trade-off objective is (1-lambda) * NDCG(list) minus lambda times the
divergence between the user's preference distribution and the blended list
distribution. Lists are built position by position, appending whichever
candidate maximizes the objective of the extended prefix (surrogate
submodular greedy). The hot loop lives in the kernel backend; this module
owns the contracts and the single-evaluation building blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, log2

import numpy as np

from . import _kernels
from .distribution import GenreDistribution, blend, genre_proportions, list_distribution
from .errors import ConfigError
from .ingest import GenreCatalog

DIVERGENCES = ("emanon2", "kl")
DEFAULT_LAMBDA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_EPS = 1e-5


@dataclass
class CalibrationConfig:
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    alpha: float = 0.01
    list_size: int = 10
    divergence: str = "emanon2"
    eps: float = DEFAULT_EPS
    use_blend: bool = True

    def __post_init__(self):
        if not self.lambda_grid:
            raise ConfigError("lambda grid is empty")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_grid):
            raise ConfigError(f"lambda grid outside [0, 1]: {self.lambda_grid}")
        if self.list_size < 1:
            raise ConfigError(f"list size {self.list_size} < 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha {self.alpha} outside (0, 1)")
        if self.divergence not in DIVERGENCES:
            raise ConfigError(
                f"unknown divergence {self.divergence!r}; choose from {DIVERGENCES}"
            )


def emanon2(p: GenreDistribution, q: GenreDistribution, eps: float = DEFAULT_EPS) -> float:
    """Vicis-symmetric chi-square style divergence.

    Sum over genres of (p_g - q_g)^2 / min(p_g, q_g)^2, skipping genres where
    both are zero and flooring the min at eps so a zero on one side yields a
    large but finite penalty.
    """
    if p.n_genres != q.n_genres:
        raise ValueError("genre axis mismatch")
    total = 0.0
    for g in sorted(set(p.values) | set(q.values)):
        pv = p.get(g)
        qv = q.get(g)
        if pv == 0.0 and qv == 0.0:
            continue
        m = pv if pv < qv else qv
        if m < eps:
            m = eps
        d = pv - qv
        total += (d * d) / (m * m)
    return total


def kl_divergence(
    p: GenreDistribution, q_tilde: GenreDistribution, eps: float = DEFAULT_EPS
) -> float:
    """Kullback-Leibler divergence after renormalizing both sides to sum 1.

    Summed over genres with positive p; q is floored at eps so support
    mismatches stay finite.
    """
    if p.n_genres != q_tilde.n_genres:
        raise ValueError("genre axis mismatch")
    genres = sorted(set(p.values) | set(q_tilde.values))
    sum_p = 0.0
    sum_q = 0.0
    for g in genres:
        sum_p += p.get(g)
        sum_q += q_tilde.get(g)
    if sum_p <= 0.0:
        return 0.0
    total = 0.0
    for g in genres:
        pv = p.get(g)
        if pv <= 0.0:
            continue
        pn = pv / sum_p
        qn = q_tilde.get(g) / sum_q if sum_q > 0.0 else 0.0
        if qn < eps:
            qn = eps
        total += pn * log(pn / qn)
    return total


def ndcg(ranked) -> float:
    """Normalized discounted cumulative gain of the list in its given order.

    Gains are 2^score - 1 with a log2(position + 1) discount; the ideal
    ordering is the list's own entries re-sorted by descending score. A
    zero ideal gain (all scores zero) scores 1 by convention.
    """
    entries = getattr(ranked, "entries", ranked)
    if not entries:
        raise ValueError("ndcg of an empty list")
    scores = [float(s) for _, s in entries]
    dcg = 0.0
    for pos, s in enumerate(scores, start=1):
        dcg += (pow(2.0, s) - 1.0) / log2(pos + 1.0)
    idcg = 0.0
    for pos, s in enumerate(sorted(scores, reverse=True), start=1):
        idcg += (pow(2.0, s) - 1.0) / log2(pos + 1.0)
    if idcg == 0.0:
        return 1.0
    return dcg / idcg


def divergence(
    p: GenreDistribution, q: GenreDistribution, cfg: CalibrationConfig
) -> float:
    """Configured divergence of the (optionally blended) list distribution."""
    target = blend(q, p, cfg.alpha) if cfg.use_blend else q
    if cfg.divergence == "kl":
        return kl_divergence(p, target, cfg.eps)
    return emanon2(p, target, cfg.eps)


def tradeoff_objective(
    ranked, p: GenreDistribution, lam: float, cfg: CalibrationConfig,
    catalog: GenreCatalog,
) -> float:
    """(1-lam) * ndcg(list) - lam * divergence against the preference."""
    q = list_distribution(ranked, catalog)
    return (1.0 - lam) * ndcg(ranked) - lam * divergence(p, q, cfg)


def _sorted_entries(entries):
    return sorted(entries, key=lambda e: (-float(e[1]), _id_key(e[0])))


def _id_key(item):
    return (0, item) if isinstance(item, (int, float)) else (1, str(item))


def greedy_select(
    candidates, p: GenreDistribution, lam: float, cfg: CalibrationConfig,
    catalog: GenreCatalog,
):
    """Greedy trade-off maximization over the candidate list.

    Returns a RankedList of cfg.list_size entries in selection order. Ties
    in the objective prefer the higher predicted score, then the lower item
    id. At lam=0 the result is exactly the top-N candidate head.
    """
    from .recommender import RankedList

    entries = _sorted_entries(getattr(candidates, "entries", candidates))
    owner = getattr(candidates, "owner", None)
    n = cfg.list_size
    if len(entries) < n:
        raise ValueError(
            f"greedy_select needs at least {n} candidates, got {len(entries)}"
        )
    scores = np.array([float(s) for _, s in entries], dtype=np.float64)
    props = np.zeros((len(entries), catalog.n_genres), dtype=np.float64)
    for row, (item, _) in enumerate(entries):
        for g, share in genre_proportions(item, catalog).items():
            props[row, g] = share
    pref = np.ascontiguousarray(p.as_array(), dtype=np.float64)

    picked = _kernels.greedy_rerank(
        scores, props, pref,
        float(lam), float(cfg.alpha), int(n),
        1 if cfg.divergence == "kl" else 0,
        bool(cfg.use_blend), float(cfg.eps),
    )
    return RankedList(owner=owner, entries=[entries[i] for i in picked])


def sweep_lambda(
    candidates, p: GenreDistribution, cfg: CalibrationConfig, catalog: GenreCatalog,
) -> dict:
    """One greedy list per lambda on the grid.

    The lambda=0 entry is the raw top-N candidate head, which the greedy
    construction provably reproduces.
    """
    from .recommender import RankedList

    entries = _sorted_entries(getattr(candidates, "entries", candidates))
    owner = getattr(candidates, "owner", None)
    out = {}
    for lam in cfg.lambda_grid:
        if lam == 0.0:
            if len(entries) < cfg.list_size:
                raise ValueError(
                    f"sweep needs at least {cfg.list_size} candidates, got {len(entries)}"
                )
            out[lam] = RankedList(owner=owner, entries=list(entries[: cfg.list_size]))
        else:
            out[lam] = greedy_select(candidates, p, lam, cfg, catalog)
    return out
