"""calibrec: calibrated-recommendation pipeline and distribution-structure
analysis.

Derives per-user genre distributions from ratings, trains a biased-MF
recommender, re-ranks candidates under a relevance/calibration trade-off,
and analyzes the resulting user-by-genre matrices with a suite of
clustering and outlier detectors.
"""

from ._kernels import BACKEND
from .calibrate import (
    CalibrationConfig,
    emanon2,
    greedy_select,
    kl_divergence,
    ndcg,
    sweep_lambda,
    tradeoff_objective,
)
from .distribution import (
    DistributionMatrix,
    GenreDistribution,
    blend,
    distribution_matrix,
    genre_proportions,
    list_distribution,
    preference_distribution,
)
from .ingest import (
    FoldAssignment,
    GenreCatalog,
    Interaction,
    InteractionSet,
    ScoreScale,
    binarize,
    load_csv,
    load_movielens,
    preprocess,
    split_folds,
)
from .metrics import jaccard_labels, mace, map_at_n, mrr, silhouette
from .recommender import (
    HyperParams,
    MFModel,
    RankedList,
    candidates,
    predict,
    random_search,
    train_mf,
)
from .structure import Labeling, default_search_space, fit_structure, grid_search

__version__ = "0.1.0"
