"""Biased matrix factorization trained by SGD, plus candidate generation.

The model is the classic FunkSVD formulation: prediction is global mean +
user bias + item bias + factor dot product, trained by stochastic gradient
descent on squared error with a single learning rate and L2 regularizer.
Hyperparameters are tuned by random search over the stated uniform ranges,
scored by k-fold cross-validated RMSE.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ingest import InteractionSet, ScoreScale, fold_split, split_folds
from .utils import derive_seed

FACTOR_INIT_SIGMA = 0.1


@dataclass
class HyperParams:
    n_factors: int
    n_epochs: int
    lr_all: float
    reg_all: float


@dataclass
class RankedList:
    """Ordered (item, predicted score) pairs for one user.

    Recommender-produced lists are strictly score-descending with ties
    broken by ascending item id; calibrated lists keep selection order.
    """

    owner: object
    entries: list

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> list:
        return [item for item, _ in self.entries]


@dataclass
class MFModel:
    global_mean: float
    user_ids: list
    item_ids: list
    user_index: dict
    item_index: dict
    user_bias: np.ndarray
    item_bias: np.ndarray
    user_factors: np.ndarray
    item_factors: np.ndarray
    scale: ScoreScale


def train_mf(train: InteractionSet, hp: HyperParams, seed: int) -> MFModel:
    """SGD training pass over the interactions, n_epochs times.

    Factors start from seeded N(0, 0.1^2) draws, biases from zero. The
    visit order is reshuffled every epoch from the same generator, so the
    result is fully determined by (train, hp, seed).
    """
    if not train.records:
        raise ValueError("cannot train on an empty interaction set")
    users = train.users()
    items = train.items()
    user_index = {u: i for i, u in enumerate(users)}
    item_index = {it: i for i, it in enumerate(items)}

    u_idx = np.array([user_index[r.user] for r in train.records], dtype=np.int64)
    i_idx = np.array([item_index[r.item] for r in train.records], dtype=np.int64)
    ratings = np.array([r.score for r in train.records], dtype=np.float64)
    global_mean = float(np.mean(ratings))

    rng = np.random.default_rng(seed)
    pu = rng.normal(0.0, FACTOR_INIT_SIGMA, (len(users), hp.n_factors))
    qi = rng.normal(0.0, FACTOR_INIT_SIGMA, (len(items), hp.n_factors))
    pu = np.ascontiguousarray(pu, dtype=np.float64)
    qi = np.ascontiguousarray(qi, dtype=np.float64)
    bu = np.zeros(len(users), dtype=np.float64)
    bi = np.zeros(len(items), dtype=np.float64)

    for _ in range(hp.n_epochs):
        order = np.ascontiguousarray(rng.permutation(len(ratings)), dtype=np.int64)
        _kernels.sgd_epoch(
            u_idx, i_idx, ratings, order, global_mean,
            bu, bi, pu, qi, hp.lr_all, hp.reg_all,
        )

    return MFModel(
        global_mean=global_mean,
        user_ids=users,
        item_ids=items,
        user_index=user_index,
        item_index=item_index,
        user_bias=bu,
        item_bias=bi,
        user_factors=pu,
        item_factors=qi,
        scale=train.scale,
    )


def predict(model: MFModel, user, item) -> float:
    """Clamped biased dot-product prediction; unknown ids contribute zero."""
    value = model.global_mean
    u = model.user_index.get(user)
    i = model.item_index.get(item)
    if u is not None:
        value += model.user_bias[u]
    if i is not None:
        value += model.item_bias[i]
    if u is not None and i is not None:
        value += float(np.dot(model.user_factors[u], model.item_factors[i]))
    return float(min(max(value, model.scale.min), model.scale.max))


def candidates(
    model: MFModel, user, seen, n: int = 100, pool=None
) -> RankedList:
    """Top-n unseen items by predicted score, ties by ascending item id.

    pool defaults to the model's training items; pass the catalog's item
    list to also consider items unseen at training time (they score as the
    bias-only prediction). Fewer than n unseen items returns them all with
    a warning.
    """
    seen = set(seen)
    if pool is None:
        pool = model.item_ids
    unseen = [item for item in pool if item not in seen]

    u = model.user_index.get(user)
    bias_u = float(model.user_bias[u]) if u is not None else 0.0
    base = model.global_mean + bias_u

    scores = np.empty(len(unseen), dtype=np.float64)
    known_rows = []
    known_pos = []
    for pos, item in enumerate(unseen):
        i = model.item_index.get(item)
        if i is None:
            scores[pos] = base
        else:
            known_rows.append(i)
            known_pos.append(pos)
    if known_rows:
        rows = np.array(known_rows, dtype=np.intp)
        vals = base + model.item_bias[rows]
        if u is not None:
            vals = vals + model.item_factors[rows] @ model.user_factors[u]
        scores[np.array(known_pos, dtype=np.intp)] = vals
    np.clip(scores, model.scale.min, model.scale.max, out=scores)

    if len(unseen) < n:
        warnings.warn(
            f"user {user!r}: only {len(unseen)} unseen items available, fewer than n={n}"
        )
    # unseen is in ascending pool order, so a stable sort keeps the id
    # tie-break for equal scores
    order = np.argsort(-scores, kind="stable")[:n]
    entries = [(unseen[j], float(scores[j])) for j in order]
    return RankedList(owner=user, entries=entries)


def cv_rmse(train: InteractionSet, hp: HyperParams, k: int, seed: int) -> float:
    """Mean held-out RMSE over a k-fold per-user split of the train set."""
    folds = split_folds(train, k=k, seed=derive_seed(seed, "cv-folds"))
    errors = []
    for f in range(k):
        tr, te = fold_split(train, folds, f)
        model = train_mf(tr, hp, seed=derive_seed(seed, "cv-train", f))
        sq = 0.0
        for rec in te.records:
            diff = predict(model, rec.user, rec.item) - rec.score
            sq += diff * diff
        errors.append(np.sqrt(sq / len(te.records)))
    return float(np.mean(errors))


def random_search(
    train: InteractionSet, n_trials: int, k: int = 5, seed: int = 0
) -> HyperParams:
    """Random hyperparameter search scored by k-fold CV RMSE.

    n_factors and n_epochs are uniform integers in [10, 150]; the learning
    rate is uniform in [0.001, 0.01] and the regularizer in [0.01, 0.1].
    Returns the lowest-RMSE sample, earlier trial winning ties.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = np.random.default_rng(derive_seed(seed, "hp-sampling"))
    trials = [
        HyperParams(
            n_factors=int(rng.integers(10, 151)),
            n_epochs=int(rng.integers(10, 151)),
            lr_all=float(rng.uniform(0.001, 0.01)),
            reg_all=float(rng.uniform(0.01, 0.1)),
        )
        for _ in range(n_trials)
    ]
    best = None
    best_rmse = np.inf
    for t, hp in enumerate(trials):
        rmse = cv_rmse(train, hp, k=k, seed=derive_seed(seed, "cv", t))
        if rmse < best_rmse:
            best, best_rmse = hp, rmse
    return best


def save_model(model: MFModel, path) -> None:
    """Versioned .npz checkpoint (format v1, documented in the README)."""
    np.savez(
        path,
        version=np.array([1]),
        global_mean=np.array([model.global_mean]),
        user_ids=np.array(model.user_ids),
        item_ids=np.array(model.item_ids),
        user_bias=model.user_bias,
        item_bias=model.item_bias,
        user_factors=model.user_factors,
        item_factors=model.item_factors,
        scale=np.array([model.scale.min, model.scale.max]),
    )


def load_model(path) -> MFModel:
    data = np.load(path, allow_pickle=False)
    version = int(data["version"][0])
    if version != 1:
        raise ValueError(f"unsupported model checkpoint version {version}")
    user_ids = [u.item() if hasattr(u, "item") else u for u in data["user_ids"]]
    item_ids = [i.item() if hasattr(i, "item") else i for i in data["item_ids"]]
    return MFModel(
        global_mean=float(data["global_mean"][0]),
        user_ids=user_ids,
        item_ids=item_ids,
        user_index={u: i for i, u in enumerate(user_ids)},
        item_index={it: i for i, it in enumerate(item_ids)},
        user_bias=data["user_bias"],
        item_bias=data["item_bias"],
        user_factors=data["user_factors"],
        item_factors=data["item_factors"],
        scale=ScoreScale(float(data["scale"][0]), float(data["scale"][1])),
    )
