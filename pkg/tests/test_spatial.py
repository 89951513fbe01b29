"""Nearest-centroid index: exactness against linear scan, tie handling."""

import numpy as np
import pytest

from mvndt import spatial


def _linear_scan(centroids, point):
    """Brute-force oracle: first index attaining the minimum squared distance."""
    d2 = ((centroids - point) ** 2).sum(axis=1)
    idx = int(np.argmin(d2))
    return idx, float(d2[idx])


class TestBuild:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            spatial.build(np.zeros((0, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            spatial.build(np.array([[np.nan, 0.0, 0.0]]))

    def test_size(self):
        rng = np.random.default_rng(0)
        index = spatial.build(rng.uniform(size=(100, 3)))
        assert len(index) == 100


class TestNearest:
    def test_single_centroid(self):
        index = spatial.build(np.array([[1.0, 2.0, 3.0]]))
        label, d2 = spatial.nearest(index, [1.0, 2.0, 4.0])
        assert label == 0
        assert d2 == pytest.approx(1.0, abs=1e-15)

    def test_two_centroids(self):
        index = spatial.build(np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]]))
        assert spatial.nearest(index, [1.0, 0.0, 0.0]) == (0, 1.0)

    def test_duplicate_centroid_returns_lowest_index(self):
        centroids = np.zeros((10, 3))
        centroids[:, 0] = np.arange(10.0)
        centroids[7] = centroids[3]
        index = spatial.build(centroids)
        label, d2 = spatial.nearest(index, centroids[3])
        assert (label, d2) == (3, 0.0)

    def test_equidistant_returns_lowest_index(self):
        centroids = np.array([[5.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 2.0, 0.0],
                              [9.0, 9.0, 9.0], [0.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
        index = spatial.build(centroids)
        label, _ = spatial.nearest(index, [0.0, 1.0, 0.0])
        assert label == 1

    def test_matches_linear_scan(self):
        """500 random centroids, 1000 queries: identical to the O(K) oracle."""
        rng = np.random.default_rng(1)
        centroids = rng.uniform(-5, 5, (500, 3))
        index = spatial.build(centroids)
        queries = rng.uniform(-6, 6, (1000, 3))
        labels, d2 = spatial.nearest_many(index, queries)
        for q, label, dist in zip(queries, labels, d2):
            expected = _linear_scan(centroids, q)
            assert (int(label), float(dist)) == expected

    def test_queries_at_centroids_with_duplicates(self):
        rng = np.random.default_rng(2)
        centroids = rng.uniform(size=(50, 3))
        centroids[25:] = centroids[:25]
        index = spatial.build(centroids)
        labels, d2 = spatial.nearest_many(index, centroids)
        assert (labels < 25).all()
        assert (d2 == 0.0).all()

    def test_rebuild_is_deterministic(self):
        rng = np.random.default_rng(3)
        centroids = rng.uniform(size=(64, 3))
        queries = rng.uniform(size=(256, 3))
        a = spatial.nearest_many(spatial.build(centroids), queries)
        b = spatial.nearest_many(spatial.build(centroids), queries)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
