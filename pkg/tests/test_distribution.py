import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calibrec.distribution import (
    DENOMINATOR_GLOBAL,
    GenreDistribution,
    blend,
    distribution_matrix,
    genre_proportions,
    list_distribution,
    load_matrix_csv,
    preference_distribution,
    save_matrix_csv,
)
from calibrec.ingest import GenreCatalog


class TestGenreProportions:
    def test_two_genre_item(self, movie_catalog):
        props = genre_proportions("three_musketeers", movie_catalog)
        assert props == {1: 0.5, 2: 0.5}

    def test_four_genre_item(self, movie_catalog):
        props = genre_proportions("batman", movie_catalog)
        assert props == {0: 0.25, 1: 0.25, 3: 0.25, 4: 0.25}

    def test_single_genre_item(self, movie_catalog):
        assert genre_proportions("the_whale", movie_catalog) == {4: 1.0}

    def test_genreless_item_is_an_error(self):
        catalog = GenreCatalog(genres=["g"], item_genres={1: frozenset()})
        with pytest.raises(ValueError, match="no genres"):
            genre_proportions(1, catalog)


class TestPreferenceDistribution:
    # Worked-example golden values: Action 1/4, Adventure 3.5/9, Comedy
    # 2.5/5, Crime 1/4, Drama 5/8, Romance and Sci-fi absent.
    def test_worked_example(self, movie_catalog, movie_profile):
        p = preference_distribution(movie_profile, movie_catalog)
        expected = {0: 0.25, 1: 3.5 / 9, 2: 0.5, 3: 0.25, 4: 0.625}
        assert set(p.values) == set(expected)
        for g, v in expected.items():
            assert p.get(g) == pytest.approx(v, abs=1e-12)
        assert p.get(5) == 0.0 and p.get(6) == 0.0

    def test_single_item_single_genre(self, movie_catalog):
        p = preference_distribution([("the_whale", 3.0)], movie_catalog)
        assert p.values == {4: 1.0}

    def test_shared_genre_ratio_cancels(self):
        catalog = GenreCatalog(genres=["g"], item_genres={1: frozenset({0}), 2: frozenset({0})})
        p = preference_distribution([(1, 2.0), (2, 4.0)], catalog)
        assert p.get(0) == pytest.approx(1.0)

    def test_global_denominator_switch(self, movie_catalog, movie_profile):
        p = preference_distribution(
            movie_profile, movie_catalog, denominator=DENOMINATOR_GLOBAL
        )
        # literal reading: every genre divided by 5 + 4 + 4
        assert p.get(0) == pytest.approx(1.0 / 13)
        assert p.get(1) == pytest.approx(3.5 / 13)

    def test_zero_weight_carriers_give_zero_not_error(self, movie_catalog):
        p = preference_distribution(
            [("the_whale", 0.0), ("three_musketeers", 1.0)], movie_catalog
        )
        assert p.get(4) == 0.0
        assert p.get(1) == pytest.approx(0.5)

    def test_empty_profile_is_an_error(self, movie_catalog):
        with pytest.raises(ValueError):
            preference_distribution([], movie_catalog)

    @given(st.floats(min_value=0.01, max_value=100.0))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, c):
        catalog = GenreCatalog(
            genres=["a", "b", "c"],
            item_genres={1: frozenset({0, 1}), 2: frozenset({1}), 3: frozenset({2})},
        )
        base = [(1, 5.0), (2, 3.0), (3, 1.0)]
        scaled = [(i, s * c) for i, s in base]
        p0 = preference_distribution(base, catalog)
        p1 = preference_distribution(scaled, catalog)
        for g in range(3):
            assert p1.get(g) == pytest.approx(p0.get(g), rel=1e-12)

    def test_values_within_unit_interval(self, movie_catalog, movie_profile):
        p = preference_distribution(movie_profile, movie_catalog)
        assert all(0.0 <= v <= 1.0 for v in p.values.values())

    def test_binary_mode_equivalence(self, movie_catalog):
        weighted = [("three_musketeers", 1.0), ("the_whale", 0.0), ("batman", 1.0)]
        dropped = [("three_musketeers", 1.0), ("batman", 1.0)]
        a = preference_distribution(weighted, movie_catalog)
        b = preference_distribution(dropped, movie_catalog)
        for g in range(movie_catalog.n_genres):
            assert a.get(g) == b.get(g)


class TestListDistribution:
    def test_single_shared_genre(self):
        catalog = GenreCatalog(genres=["g"], item_genres={1: frozenset({0}), 2: frozenset({0})})
        q = list_distribution([(1, 4.2), (2, 3.7)], catalog)
        assert q.get(0) == pytest.approx(1.0)

    def test_two_genre_item_any_scale(self, movie_catalog):
        for s in (0.5, 1.0, 4.0):
            q = list_distribution([("three_musketeers", s)], movie_catalog)
            assert q.get(1) == pytest.approx(0.5)
            assert q.get(2) == pytest.approx(0.5)

    def test_empty_list_is_an_error(self, movie_catalog):
        with pytest.raises(ValueError):
            list_distribution([], movie_catalog)


class TestBlend:
    def table_fixture(self, movie_catalog, movie_profile):
        p = preference_distribution(movie_profile, movie_catalog)
        q = GenreDistribution(
            values={1: 0.35, 2: 0.563, 3: 0.4, 4: 0.5},
            owner=p.owner, stage="candidate", n_genres=7,
        )
        return p, q

    def test_worked_example_blend(self, movie_catalog, movie_profile):
        # Crime is asserted at the Eq.-3-derived 0.3985; the printed table
        # value 0.3935 is inconsistent with the blend formula.
        p, q = self.table_fixture(movie_catalog, movie_profile)
        qt = blend(q, p, 0.01)
        expected = {0: 0.0025, 1: 0.35038, 2: 0.56237, 3: 0.3985, 4: 0.50125}
        for g, v in expected.items():
            assert qt.get(g) == pytest.approx(v, abs=1e-5)
        assert qt.get(5) == 0.0 and qt.get(6) == 0.0

    def test_endpoints(self, movie_catalog, movie_profile):
        p, q = self.table_fixture(movie_catalog, movie_profile)
        zero = blend(q, p, 0.0)
        one = blend(q, p, 1.0)
        for g in range(7):
            assert zero.get(g) == q.get(g)
            assert one.get(g) == p.get(g)

    @given(st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=50, deadline=None)
    def test_bounds_per_genre(self, alpha):
        p = GenreDistribution(values={0: 0.8, 1: 0.1}, owner=None, stage="preference", n_genres=3)
        q = GenreDistribution(values={0: 0.2, 2: 0.5}, owner=None, stage="candidate", n_genres=3)
        qt = blend(q, p, alpha)
        for g in range(3):
            lo, hi = min(p.get(g), q.get(g)), max(p.get(g), q.get(g))
            assert lo - 1e-12 <= qt.get(g) <= hi + 1e-12

    def test_axis_mismatch(self):
        p = GenreDistribution(values={0: 1.0}, owner=None, stage="preference", n_genres=2)
        q = GenreDistribution(values={0: 1.0}, owner=None, stage="candidate", n_genres=3)
        with pytest.raises(ValueError, match="axis"):
            blend(q, p)


class TestDistributionMatrix:
    def test_worked_example_row(self, movie_catalog, movie_profile):
        p = preference_distribution(movie_profile, movie_catalog, owner=1)
        matrix = distribution_matrix([p], movie_catalog)
        assert matrix.rows == [1]
        np.testing.assert_allclose(
            matrix.data[0], [0.25, 3.5 / 9, 0.5, 0.25, 0.625, 0.0, 0.0]
        )

    def test_zero_users(self, movie_catalog):
        matrix = distribution_matrix([], movie_catalog)
        assert matrix.data.shape == (0, 7)

    def test_identical_distributions_identical_rows(self, movie_catalog, movie_profile):
        p1 = preference_distribution(movie_profile, movie_catalog, owner=1)
        p2 = preference_distribution(movie_profile, movie_catalog, owner=2)
        matrix = distribution_matrix([p1, p2], movie_catalog)
        np.testing.assert_array_equal(matrix.data[0], matrix.data[1])

    def test_rows_sorted_by_user(self, movie_catalog, movie_profile):
        dists = [
            preference_distribution(movie_profile, movie_catalog, owner=u)
            for u in (5, 1, 3)
        ]
        assert distribution_matrix(dists, movie_catalog).rows == [1, 3, 5]

    def test_duplicate_user_is_an_error(self, movie_catalog, movie_profile):
        p = preference_distribution(movie_profile, movie_catalog, owner=1)
        with pytest.raises(ValueError, match="duplicate"):
            distribution_matrix([p, p], movie_catalog)

    def test_csv_roundtrip(self, tmp_path, movie_catalog, movie_profile):
        dists = [
            preference_distribution(movie_profile, movie_catalog, owner=u)
            for u in (1, 2)
        ]
        matrix = distribution_matrix(dists, movie_catalog)
        save_matrix_csv(matrix, tmp_path / "m.csv")
        back = load_matrix_csv(tmp_path / "m.csv")
        assert back.rows == matrix.rows
        assert back.cols == matrix.cols
        np.testing.assert_array_equal(back.data, matrix.data)
