"""Structure learners for the user-genre distribution matrices.

Ten algorithms across six families: partitional (kmeans, bisecting, fuzzy),
hierarchical (agglomerative), density (dbscan, optics), mixture (gmm) and
outlier detection (iforest, lof, envelope). ``grid_search`` tunes each one
by maximizing mean silhouette over its declared search space.
"""

from .base import NOISE, Labeling, compress_labels
from .density import fit_density
from .distances import (
    METRIC_ALIASES,
    METRIC_NAMES,
    DistanceMatrix,
    canonical_metric,
    pairwise_distances,
)
from .hierarchy import average_linkage_merges, cut_merges, fit_agglomerative
from .mixture import fit_gaussian_mixture
from .outliers import fit_outlier
from .partitional import fit_partitional, fuzzy_cmeans_fit, kmeans_fit
from .search import (
    ALGORITHMS,
    EPSILONS,
    METRIC_CHOICES,
    NUS,
    PRIMES,
    WITH_ONE,
    SearchSpace,
    config_is_valid,
    default_search_space,
    fit_structure,
    grid_search,
)

__all__ = [
    "ALGORITHMS",
    "DistanceMatrix",
    "EPSILONS",
    "Labeling",
    "METRIC_ALIASES",
    "METRIC_CHOICES",
    "METRIC_NAMES",
    "NOISE",
    "NUS",
    "PRIMES",
    "SearchSpace",
    "WITH_ONE",
    "average_linkage_merges",
    "canonical_metric",
    "compress_labels",
    "config_is_valid",
    "cut_merges",
    "default_search_space",
    "fit_agglomerative",
    "fit_density",
    "fit_gaussian_mixture",
    "fit_outlier",
    "fit_partitional",
    "fit_structure",
    "fuzzy_cmeans_fit",
    "grid_search",
    "kmeans_fit",
    "pairwise_distances",
]
