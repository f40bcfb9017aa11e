import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calibrec.distribution import GenreDistribution
from calibrec.ingest import GenreCatalog
from calibrec.metrics import jaccard_labels, mace, map_at_n, mrr, silhouette
from calibrec.recommender import RankedList
from calibrec.structure import Labeling


def brute_silhouette(X, labels):
    """Independent O(n^2) implementation straight from the definition."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    n = len(labels)

    def dist(i, j):
        return float(np.sqrt(((X[i] - X[j]) ** 2).sum()))

    values = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            values.append(0.0)
            continue
        a = sum(dist(i, j) for j in own) / len(own)
        b = np.inf
        for other in set(labels.tolist()) - {labels[i]}:
            members = [j for j in range(n) if labels[j] == other]
            b = min(b, sum(dist(i, j) for j in members) / len(members))
        denom = max(a, b)
        values.append((b - a) / denom if denom > 0 else 0.0)
    return float(np.mean(values))


class TestSilhouette:
    def test_two_tight_pairs(self):
        X = np.array([[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.0, 10.1]])
        labels = np.array([0, 0, 1, 1])
        got = silhouette(X, labels)
        assert got == pytest.approx(brute_silhouette(X, labels), abs=1e-12)
        assert got == pytest.approx(0.9929, abs=1e-3)

    def test_all_singletons_zero(self):
        X = np.array([[0.0], [1.0], [5.0]])
        assert silhouette(X, np.array([0, 1, 2])) == 0.0

    def test_duplicated_points_score_one(self):
        X = np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 4.0], [3.0, 4.0]])
        assert silhouette(X, np.array([0, 0, 1, 1])) == 1.0

    def test_single_group_undefined(self):
        X = np.zeros((4, 2))
        with pytest.raises(ValueError, match="undefined"):
            silhouette(X, np.array([0, 0, 0, 0]))

    def test_noise_counts_as_group(self):
        X = np.array([[0.0], [0.1], [9.0]])
        value = silhouette(X, np.array([0, 0, -1]))
        assert -1.0 <= value <= 1.0

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(5, 50))
            g = int(rng.integers(2, 6))
            dim = int(rng.integers(2, 10))
            X = rng.uniform(0, 1, (n, dim))
            labels = rng.integers(0, g, n)
            if len(set(labels.tolist())) < 2:
                continue
            got = silhouette(X, labels)
            assert got == pytest.approx(brute_silhouette(X, labels), abs=1e-9)

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(0, 1, (20, 3))
        labels = rng.integers(0, 3, 20)
        swapped = np.select(
            [labels == 0, labels == 1, labels == 2], [2, 0, 1]
        )
        assert silhouette(X, labels) == pytest.approx(silhouette(X, swapped), abs=1e-12)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(0, 1, (15, 4))
        labels = rng.integers(0, 2, 15)
        if len(set(labels.tolist())) < 2:
            labels[0] = 1 - labels[0]
        assert silhouette(X, labels) == pytest.approx(
            silhouette(7.5 * X, labels), abs=1e-12
        )


def labeling(values, algorithm="test"):
    return Labeling.build(list(range(len(values))), np.array(values), algorithm)


class TestJaccard:
    def test_identical_labelings(self):
        a = labeling([0, 1, 2, 1, 0])
        assert jaccard_labels(a, a) == 1.0

    def test_binary_total_disagreement(self):
        a = labeling([0, 1, 0, 1])
        b = labeling([1, 0, 1, 0])
        assert jaccard_labels(a, b) == 0.0

    def test_three_of_four_agree(self):
        a = labeling([0, 0, 1, 1])
        b = labeling([0, 0, 1, 0])
        assert jaccard_labels(a, b) == pytest.approx(0.6)

    def test_alignment_by_maximum_agreement(self):
        a = labeling([0, 0, 0, 1, 1, 2])
        b = labeling([2, 2, 2, 0, 0, 1])  # same partition, permuted names
        assert jaccard_labels(a, b) == 1.0

    def test_disjoint_group_structure_near_zero(self):
        n = 200
        a = labeling([i % 2 for i in range(n)])
        b = labeling([i % 97 for i in range(n)])
        assert jaccard_labels(a, b) < 0.05

    def test_symmetry_after_alignment(self):
        rng = np.random.default_rng(3)
        a = labeling(rng.integers(0, 4, 30).tolist())
        b = labeling(rng.integers(0, 3, 30).tolist())
        assert jaccard_labels(a, b) == pytest.approx(jaccard_labels(b, a))

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            jaccard_labels(labeling([0, 1]), labeling([0, 1, 1]))

    def test_different_users_rejected(self):
        a = Labeling.build([1, 2, 3], np.array([0, 0, 1]), "x")
        b = Labeling.build([1, 2, 4], np.array([0, 0, 1]), "x")
        with pytest.raises(ValueError, match="users"):
            jaccard_labels(a, b)

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_self_jaccard_is_one(self, values):
        a = labeling(values)
        assert jaccard_labels(a, a) == 1.0

    def test_noise_participates_as_label(self):
        a = labeling([0, 0, -1, 1])
        b = labeling([0, 0, -1, 1])
        assert jaccard_labels(a, b) == 1.0


def rl(user, items, scores=None):
    scores = scores or list(range(len(items), 0, -1))
    return RankedList(owner=user, entries=list(zip(items, map(float, scores))))


class TestRankingMetrics:
    def test_map_all_relevant(self):
        lists = {"u": rl("u", ["a", "b", "c"])}
        assert map_at_n(lists, {"u": {"a", "b", "c"}}) == 1.0

    def test_map_single_hit_at_one(self):
        lists = {"u": rl("u", list("abcdefghij"))}
        assert map_at_n(lists, {"u": {"a"}}) == 1.0

    def test_map_hits_at_one_and_three(self):
        lists = {"u": rl("u", ["a", "b", "c", "d"])}
        assert map_at_n(lists, {"u": {"a", "c"}}) == pytest.approx((1.0 + 2 / 3) / 2)

    def test_map_no_relevant_contributes_zero(self):
        lists = {"u": rl("u", ["a"]), "v": rl("v", ["b"])}
        assert map_at_n(lists, {"u": {"a"}}) == pytest.approx(0.5)

    def test_mrr_first_hit_rank_two(self):
        lists = {"u": rl("u", ["x", "a", "b"])}
        assert mrr(lists, {"u": {"a"}}) == 0.5

    def test_mrr_no_hit_zero(self):
        lists = {"u": rl("u", ["x", "y"])}
        assert mrr(lists, {"u": {"a"}}) == 0.0

    def test_mrr_mean_over_users(self):
        lists = {"u": rl("u", ["a", "b", "c", "d"]), "v": rl("v", ["w", "x", "y", "a"])}
        assert mrr(lists, {"u": {"a"}, "v": {"a"}}) == pytest.approx((1.0 + 0.25) / 2)

    def test_empty_lists_error(self):
        with pytest.raises(ValueError):
            map_at_n({}, {})
        with pytest.raises(ValueError):
            mrr({}, {})


class TestMace:
    def catalog(self):
        return GenreCatalog(
            genres=["A", "B"],
            item_genres={"a": frozenset({0}), "b": frozenset({1}),
                         "ab": frozenset({0, 1})},
        )

    def test_perfectly_calibrated_prefixes(self):
        catalog = self.catalog()
        p = GenreDistribution(values={0: 0.5, 1: 0.5}, owner="u",
                              stage="preference", n_genres=2)
        lists = {"u": rl("u", ["ab", "ab2"], [2.0, 1.0])}
        catalog.item_genres["ab2"] = frozenset({0, 1})
        assert mace({"u": p}, lists, catalog) == 0.0

    def test_single_genre_world(self):
        catalog = GenreCatalog(genres=["A"], item_genres={
            "x": frozenset({0}), "y": frozenset({0})
        })
        p = GenreDistribution(values={0: 1.0}, owner="u", stage="preference", n_genres=1)
        lists = {"u": rl("u", ["x", "y"], [2.0, 1.0])}
        assert mace({"u": p}, lists, catalog) == 0.0

    def test_one_item_list_worked_value(self):
        catalog = self.catalog()
        p = GenreDistribution(values={0: 0.5, 1: 0.5}, owner="u",
                              stage="preference", n_genres=2)
        lists = {"u": rl("u", ["a"], [3.0])}
        assert mace({"u": p}, lists, catalog) == pytest.approx(0.5)
