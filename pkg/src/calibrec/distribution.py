"""Genre distribution derivation.

Three per-user distributions share one formula: a weighted mean of each
item's genre proportions, with the denominator restricted to the items that
actually carry the genre. Weights are the user's own scores for the
preference distribution and the recommender's predicted scores for list
distributions. Values are deliberately not renormalized to sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import GenreCatalog

STAGE_PREFERENCE = "preference"
STAGE_CANDIDATE = "candidate"
STAGE_CALIBRATED = "calibrated"

DENOMINATOR_PER_GENRE = "per_genre"
DENOMINATOR_GLOBAL = "global"


@dataclass
class GenreDistribution:
    """Sparse genre-index -> proportion map for one user at one stage.

    Genres absent from the map are zero. ``n_genres`` identifies the axis;
    distributions can only be combined when their axes match.
    """

    values: dict[int, float]
    owner: object
    stage: str
    n_genres: int

    def get(self, genre: int) -> float:
        return self.values.get(genre, 0.0)

    def support(self) -> set[int]:
        return {g for g, v in self.values.items() if v > 0.0}

    def as_array(self) -> np.ndarray:
        out = np.zeros(self.n_genres)
        for g, v in self.values.items():
            out[g] = v
        return out


@dataclass
class DistributionMatrix:
    """Users x genres matrix; row i is the distribution of user rows[i]."""

    rows: list
    cols: list[str]
    data: np.ndarray

    @property
    def n(self) -> int:
        return len(self.rows)


def genre_proportions(item, catalog: GenreCatalog) -> dict[int, float]:
    """Uniform split of an item over its genres: each of k genres gets 1/k."""
    genres = catalog.item_genres[item]
    if not genres:
        raise ValueError(f"item {item!r} has no genres (preprocess violation)")
    share = 1.0 / len(genres)
    return {g: share for g in sorted(genres)}


def _weighted_distribution(
    weighted_items,
    catalog: GenreCatalog,
    owner,
    stage: str,
    denominator: str,
) -> GenreDistribution:
    num: dict[int, float] = {}
    den: dict[int, float] = {}
    total = 0.0
    for item, weight in weighted_items:
        props = genre_proportions(item, catalog)
        total += weight
        for g, share in props.items():
            num[g] = num.get(g, 0.0) + weight * share
            den[g] = den.get(g, 0.0) + weight
    values: dict[int, float] = {}
    for g in sorted(num):
        bottom = total if denominator == DENOMINATOR_GLOBAL else den[g]
        values[g] = num[g] / bottom if bottom > 0.0 else 0.0
    return GenreDistribution(
        values=values, owner=owner, stage=stage, n_genres=catalog.n_genres
    )


def preference_distribution(
    user_items,
    catalog: GenreCatalog,
    owner=None,
    denominator: str = DENOMINATOR_PER_GENRE,
) -> GenreDistribution:
    """Distribution of a user's own interactions, weighted by their scores.

    user_items is a list of (item, score). Per genre, the value is
    sum(score * proportion) / sum(score) over the items carrying the genre;
    ``denominator='global'`` switches to one shared denominator instead.
    """
    user_items = list(user_items)
    if not user_items:
        raise ValueError("preference_distribution needs at least one interaction")
    return _weighted_distribution(
        user_items, catalog, owner, STAGE_PREFERENCE, denominator
    )


def list_distribution(
    ranked,
    catalog: GenreCatalog,
    stage: str = STAGE_CANDIDATE,
    denominator: str = DENOMINATOR_PER_GENRE,
) -> GenreDistribution:
    """Distribution of a ranked list, weighted by predicted scores.

    ``ranked`` is anything with .entries (owner taken from .owner) or a bare
    list of (item, predicted_score) pairs.
    """
    entries = getattr(ranked, "entries", ranked)
    owner = getattr(ranked, "owner", None)
    if not entries:
        raise ValueError("list_distribution of an empty list")
    return _weighted_distribution(entries, catalog, owner, stage, denominator)


def blend(
    q: GenreDistribution, p: GenreDistribution, alpha: float = 0.01
) -> GenreDistribution:
    """Per-genre convex mix (1-alpha)*q + alpha*p.

    alpha is normally small and in (0, 1); 0 and 1 are accepted and return
    q and p respectively.
    """
    if q.n_genres != p.n_genres:
        raise ValueError(
            f"genre axis mismatch: {q.n_genres} vs {p.n_genres} genres"
        )
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    values: dict[int, float] = {}
    for g in sorted(set(q.values) | set(p.values)):
        values[g] = (1.0 - alpha) * q.get(g) + alpha * p.get(g)
    return GenreDistribution(
        values=values, owner=q.owner, stage=q.stage, n_genres=q.n_genres
    )


def distribution_matrix(
    dists, catalog: GenreCatalog
) -> DistributionMatrix:
    """Stack per-user distributions into a users x genres matrix.

    Rows are sorted by user id; all inputs must share one stage and axis.
    """
    dists = list(dists)
    stages = {d.stage for d in dists}
    if len(stages) > 1:
        raise ValueError(f"mixed stages in one matrix: {sorted(stages)}")
    axes = {d.n_genres for d in dists}
    if axes and axes != {catalog.n_genres}:
        raise ValueError("distribution axis does not match the catalog")
    owners = [d.owner for d in dists]
    if len(set(owners)) != len(owners):
        dupes = sorted({o for o in owners if owners.count(o) > 1}, key=str)
        raise ValueError(f"duplicate users in matrix: {dupes}")
    ordered = sorted(dists, key=lambda d: _sort_key(d.owner))
    data = np.zeros((len(ordered), catalog.n_genres))
    for i, dist in enumerate(ordered):
        for g, v in dist.values.items():
            data[i, g] = v
    return DistributionMatrix(
        rows=[d.owner for d in ordered], cols=list(catalog.genres), data=data
    )


def _sort_key(owner):
    return (0, owner) if isinstance(owner, (int, float)) else (1, str(owner))


def save_matrix_csv(matrix: DistributionMatrix, path) -> None:
    from .utils import fmt

    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["user_id"] + list(matrix.cols)) + "\n")
        for i, user in enumerate(matrix.rows):
            cells = [str(user)] + [fmt(float(v)) for v in matrix.data[i]]
            fh.write(",".join(cells) + "\n")


def load_matrix_csv(path) -> DistributionMatrix:
    from .utils import coerce_id

    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n").split(",")
        cols = header[1:]
        rows = []
        data = []
        for line in fh:
            if not line.strip():
                continue
            cells = line.rstrip("\n").split(",")
            rows.append(coerce_id(cells[0]))
            data.append([float(c) for c in cells[1:]])
    return DistributionMatrix(
        rows=rows, cols=cols, data=np.array(data, dtype=float).reshape(len(rows), len(cols))
    )
