import numpy as np
import pytest

from calibrec.ingest import GenreCatalog, Interaction, InteractionSet, ScoreScale

EXAMPLE_GENRES = ["Action", "Adventure", "Comedy", "Crime", "Drama", "Romance", "Sci-fi"]


@pytest.fixture
def movie_catalog():
    """The seven-genre catalog of the worked example (three items)."""
    return GenreCatalog(
        genres=list(EXAMPLE_GENRES),
        item_genres={
            "three_musketeers": frozenset({1, 2}),   # Adventure, Comedy
            "the_whale": frozenset({4}),             # Drama
            "batman": frozenset({0, 1, 3, 4}),       # Action, Adventure, Crime, Drama
        },
    )


@pytest.fixture
def movie_profile():
    """(item, score) pairs of the worked example profile."""
    return [("three_musketeers", 5.0), ("the_whale", 4.0), ("batman", 4.0)]


def make_blobs(n_per_blob=100, dim=5, separation=100.0, std=1.0, seed=0):
    """Two well-separated gaussian blobs; returns (X, true labels)."""
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, std, (n_per_blob, dim))
    center = np.zeros(dim)
    center[0] = separation
    b = center + rng.normal(0.0, std, (n_per_blob, dim))
    X = np.vstack([a, b])
    labels = np.array([0] * n_per_blob + [1] * n_per_blob)
    return X, labels


def interactions_from_tuples(tuples, scale=(0.0, 5.0)):
    records = [Interaction(u, i, float(s), int(t)) for u, i, s, t in tuples]
    return InteractionSet(records=records, scale=ScoreScale(*scale))


def same_partition(labels_a, labels_b) -> bool:
    """Same grouping regardless of label ids."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if labels_a.shape != labels_b.shape:
        return False
    mapping = {}
    reverse = {}
    for x, y in zip(labels_a.tolist(), labels_b.tolist()):
        if mapping.setdefault(x, y) != y:
            return False
        if reverse.setdefault(y, x) != x:
            return False
    return True
