"""Dataset loading, cleaning and fold splitting.

Supports the MovieLens ``::``-separated .dat files and generic CSV ratings
with a header row. Cleaning applies three rules, iterated to a fixpoint:
items without genres are dropped, users with fewer than ``min_user_tx``
interactions are dropped, and items left with no interactions are dropped.
"""

from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, ParseError
from .utils import coerce_id as _coerce_id

NO_GENRES_TOKEN = "(no genres listed)"


class Interaction(NamedTuple):
    user: object
    item: object
    score: float
    timestamp: int


class ScoreScale(NamedTuple):
    min: float
    max: float


@dataclass
class GenreCatalog:
    """Ordered genre axis plus the genre set of every item.

    The genre order is total and frozen; every distribution and matrix
    downstream lays its values out on this axis. Items may carry an empty
    genre set only before preprocessing.
    """

    genres: list[str]
    item_genres: dict[object, frozenset[int]]

    @property
    def n_genres(self) -> int:
        return len(self.genres)

    def genres_of(self, item) -> frozenset[int]:
        return self.item_genres[item]

    def validate(self, strict: bool = True) -> None:
        n = len(self.genres)
        if len(set(self.genres)) != n:
            raise ValueError("duplicate genre names in catalog")
        for item, gset in self.item_genres.items():
            if strict and not gset:
                raise ValueError(f"item {item!r} has no genres")
            if any(g < 0 or g >= n for g in gset):
                raise ValueError(f"item {item!r} references an unknown genre index")


@dataclass
class InteractionSet:
    """User-item-score records with the score scale they live on."""

    records: list[Interaction]
    scale: ScoreScale

    def __len__(self) -> int:
        return len(self.records)

    def by_user(self) -> dict[object, list[Interaction]]:
        grouped: dict[object, list[Interaction]] = {}
        for rec in self.records:
            grouped.setdefault(rec.user, []).append(rec)
        return grouped

    def users(self) -> list[object]:
        return sorted({rec.user for rec in self.records})

    def items(self) -> list[object]:
        return sorted({rec.item for rec in self.records})

    def validate(self) -> None:
        seen = set()
        for rec in self.records:
            key = (rec.user, rec.item)
            if key in seen:
                raise ValueError(f"duplicate (user, item) pair {key}")
            seen.add(key)
            if not (self.scale.min <= rec.score <= self.scale.max):
                raise ValueError(
                    f"score {rec.score} of {key} outside scale "
                    f"[{self.scale.min}, {self.scale.max}]"
                )


@dataclass
class FoldAssignment:
    """Per-user partition of interactions into k cross-validation folds."""

    k: int
    assignment: dict[tuple, int]

    def fold_of(self, user, item) -> int:
        return self.assignment[(user, item)]


def load_movielens(ratings_path, movies_path) -> tuple[InteractionSet, GenreCatalog]:
    """Parse MovieLens 1M style .dat files.

    ratings: ``UserID::MovieID::Rating::Timestamp``
    movies:  ``MovieID::Title::Genre1|Genre2|...``

    Items tagged ``(no genres listed)`` keep an empty genre set; preprocess
    removes them. Genre order is lexicographic.
    """
    movies_path = Path(movies_path)
    ratings_path = Path(ratings_path)

    raw_items: dict[int, list[str]] = {}
    genre_names: set[str] = set()
    with movies_path.open("r", encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("::")
            if len(parts) != 3:
                raise ParseError(f"{movies_path.name}:{lineno}: expected 3 '::' fields")
            item_raw, _title, genre_field = parts
            try:
                item = int(item_raw)
            except ValueError as exc:
                raise ParseError(f"{movies_path.name}:{lineno}: bad item id {item_raw!r}") from exc
            if genre_field == NO_GENRES_TOKEN or not genre_field:
                names: list[str] = []
            else:
                names = [g for g in genre_field.split("|") if g]
            raw_items[item] = names
            genre_names.update(names)

    genres = sorted(genre_names)
    index = {name: i for i, name in enumerate(genres)}
    item_genres = {
        item: frozenset(index[name] for name in names)
        for item, names in raw_items.items()
    }
    catalog = GenreCatalog(genres=genres, item_genres=item_genres)

    records: list[Interaction] = []
    seen: set[tuple] = set()
    with ratings_path.open("r", encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("::")
            if len(parts) != 4:
                raise ParseError(f"{ratings_path.name}:{lineno}: expected 4 '::' fields")
            try:
                user = int(parts[0])
                item = int(parts[1])
                score = float(parts[2])
                timestamp = int(parts[3])
            except ValueError as exc:
                raise ParseError(f"{ratings_path.name}:{lineno}: {exc}") from exc
            key = (user, item)
            if key in seen:
                raise ParseError(
                    f"{ratings_path.name}:{lineno}: duplicate (user, item) pair {key}"
                )
            seen.add(key)
            records.append(Interaction(user, item, score, timestamp))

    return InteractionSet(records=records, scale=ScoreScale(0.0, 5.0)), catalog


def load_csv(ratings_path, schema: dict, scale: tuple = (0.0, 5.0)) -> InteractionSet:
    """Load ratings from a headered CSV.

    schema maps the roles 'user', 'item', 'score', 'timestamp' to column
    names. Ids are kept as ints when the whole column is integral.
    """
    required = ("user", "item", "score", "timestamp")
    missing = [role for role in required if role not in schema]
    if missing:
        raise ConfigError(f"schema missing column mapping for {missing}")

    ratings_path = Path(ratings_path)
    records: list[Interaction] = []
    seen: set[tuple] = set()
    duplicates: list[tuple] = []
    with ratings_path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for role in required:
            if schema[role] not in header:
                raise ConfigError(
                    f"column {schema[role]!r} (role {role}) not in header {header}"
                )
        for rowno, row in enumerate(reader, start=2):
            try:
                score = float(row[schema["score"]])
            except ValueError as exc:
                raise ParseError(
                    f"{ratings_path.name}:{rowno}: non-numeric score "
                    f"{row[schema['score']]!r}"
                ) from exc
            user = _coerce_id(row[schema["user"]])
            item = _coerce_id(row[schema["item"]])
            try:
                timestamp = int(float(row[schema["timestamp"]]))
            except ValueError as exc:
                raise ParseError(f"{ratings_path.name}:{rowno}: bad timestamp") from exc
            key = (user, item)
            if key in seen:
                duplicates.append(key)
            seen.add(key)
            records.append(Interaction(user, item, score, timestamp))
    if duplicates:
        raise ParseError(f"duplicate (user, item) rows: {sorted(set(duplicates))}")

    return InteractionSet(records=records, scale=ScoreScale(float(scale[0]), float(scale[1])))


def load_genre_csv(path) -> GenreCatalog:
    """Load the genre sidecar file: ``item_id,genre1|genre2|...`` with header."""
    path = Path(path)
    raw_items: dict[object, list[str]] = {}
    genre_names: set[str] = set()
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row in reader:
            if not row:
                continue
            item = _coerce_id(row[0])
            names = [g for g in row[1].split("|") if g] if len(row) > 1 else []
            raw_items[item] = names
            genre_names.update(names)
    genres = sorted(genre_names)
    index = {name: i for i, name in enumerate(genres)}
    item_genres = {
        item: frozenset(index[name] for name in names)
        for item, names in raw_items.items()
    }
    return GenreCatalog(genres=genres, item_genres=item_genres)


def save_interactions_csv(interactions: InteractionSet, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "item_id", "score", "timestamp"])
        for rec in sorted(interactions.records, key=lambda r: (str(r.user), str(r.item))):
            writer.writerow([rec.user, rec.item, repr(float(rec.score)), rec.timestamp])


def save_genre_csv(catalog: GenreCatalog, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["item_id", "genres"])
        for item in sorted(catalog.item_genres, key=str):
            names = "|".join(catalog.genres[g] for g in sorted(catalog.item_genres[item]))
            writer.writerow([item, names])


def preprocess(
    interactions: InteractionSet,
    catalog: GenreCatalog,
    min_user_tx: int = 50,
) -> tuple[InteractionSet, GenreCatalog]:
    """Apply the three cleaning rules to a fixpoint.

    (i) drop items with no genre information (including ratings of items
    absent from the catalog); (ii) drop users with fewer than min_user_tx
    interactions; (iii) drop items with no remaining interactions. The
    returned catalog keeps only genres attached to a surviving item, on a
    fresh lexicographic axis.
    """
    records = [
        rec
        for rec in interactions.records
        if rec.item in catalog.item_genres and catalog.item_genres[rec.item]
    ]
    live_items = {item for item, gset in catalog.item_genres.items() if gset}

    while True:
        counts: dict[object, int] = {}
        for rec in records:
            counts[rec.user] = counts.get(rec.user, 0) + 1
        keep_users = {u for u, c in counts.items() if c >= min_user_tx}
        new_records = [rec for rec in records if rec.user in keep_users]

        rated = {rec.item for rec in new_records}
        new_items = live_items & rated

        stable = len(new_records) == len(records) and new_items == live_items
        records, live_items = new_records, new_items
        if stable:
            break

    if not records:
        raise ValueError("dataset eliminated by preprocessing")

    surviving = sorted({
        catalog.genres[g] for item in live_items for g in catalog.item_genres[item]
    })
    index = {name: i for i, name in enumerate(surviving)}
    item_genres = {
        item: frozenset(index[catalog.genres[g]] for g in catalog.item_genres[item])
        for item in live_items
    }
    cleaned_catalog = GenreCatalog(genres=surviving, item_genres=item_genres)
    cleaned = InteractionSet(records=records, scale=interactions.scale)
    return cleaned, cleaned_catalog


def binarize(interactions: InteractionSet) -> InteractionSet:
    """Map scores to {0, 1}: >=4 on a 0-5 scale, >=8 on a 0-10 scale.

    Zero-scored interactions are kept; they contribute zero weight in the
    distribution derivation, which matches dropping them outright.
    """
    if interactions.scale.max == 5:
        threshold = 4.0
    elif interactions.scale.max == 10:
        threshold = 8.0
    else:
        raise ValueError(
            f"unsupported scale max {interactions.scale.max}; "
            "binarization supports 0-5 and 0-10 scales"
        )
    records = [
        Interaction(rec.user, rec.item, 1.0 if rec.score >= threshold else 0.0, rec.timestamp)
        for rec in interactions.records
    ]
    return InteractionSet(records=records, scale=ScoreScale(0.0, 1.0))


def _user_key(user) -> int:
    if isinstance(user, (int, np.integer)) and int(user) >= 0:
        return int(user)
    return zlib.crc32(repr(user).encode("utf-8"))


def split_folds(interactions: InteractionSet, k: int = 5, seed: int = 0) -> FoldAssignment:
    """Randomly partition each user's interactions into k near-equal folds.

    Deterministic given the seed and independent of record order: each
    user's items are sorted, shuffled with a per-user generator, and dealt
    round-robin.
    """
    assignment: dict[tuple, int] = {}
    for user, recs in sorted(interactions.by_user().items(), key=lambda kv: str(kv[0])):
        if len(recs) < k:
            raise ValueError(f"user {user!r} has {len(recs)} interactions, fewer than k={k}")
        items = sorted((rec.item for rec in recs), key=str)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), _user_key(user)]))
        order = rng.permutation(len(items))
        for j, idx in enumerate(order):
            assignment[(user, items[idx])] = j % k
    return FoldAssignment(k=k, assignment=assignment)


def fold_split(
    interactions: InteractionSet, folds: FoldAssignment, test_fold: int
) -> tuple[InteractionSet, InteractionSet]:
    """Split into (train, test) interaction sets around one held-out fold."""
    train, test = [], []
    for rec in interactions.records:
        if folds.assignment[(rec.user, rec.item)] == test_fold:
            test.append(rec)
        else:
            train.append(rec)
    return (
        InteractionSet(records=train, scale=interactions.scale),
        InteractionSet(records=test, scale=interactions.scale),
    )
