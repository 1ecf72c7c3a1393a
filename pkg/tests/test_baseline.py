import numpy as np
import pytest

from malcom.baseline import KMeansConfig, KMeansError, kmeans, tfidf_matrix
from malcom.dataset import Dataset, Sample
from malcom.weighting import TfIdfModel, compute_tfidf
from malcom.synth import SynthConfig, generate


def model_1d(values):
    return TfIdfModel(
        n=len(values),
        sample_ids=[f"s{i}" for i in range(len(values))],
        doc_freq={"perm/x": 1},
        values=[{"perm/x": v} if v != 0 else {} for v in values],
    )


class TestKMeans:
    def test_two_well_separated_groups(self):
        m = model_1d([0.0, 0.1, 10.0, 10.1])
        res = kmeans(m, KMeansConfig(c=2, rng_seed=0))
        assert res.assignment[0] == res.assignment[1]
        assert res.assignment[2] == res.assignment[3]
        assert res.assignment[0] != res.assignment[2]
        centers = sorted(res.centers.ravel())
        assert centers == pytest.approx([0.05, 10.05])

    def test_c_1_center_is_mean(self):
        m = model_1d([1.0, 2.0, 6.0])
        res = kmeans(m, KMeansConfig(c=1, rng_seed=0))
        assert res.centers.ravel()[0] == pytest.approx(3.0)
        assert res.assignment == [0, 0, 0]

    def test_c_equals_n(self):
        m = model_1d([1.0, 2.0, 3.0, 4.0])
        res = kmeans(m, KMeansConfig(c=4, rng_seed=1))
        assert sorted(res.assignment) == [0, 1, 2, 3]
        assert res.objective == pytest.approx(0.0, abs=1e-12)

    def test_c_out_of_range(self):
        m = model_1d([1.0, 2.0])
        with pytest.raises(KMeansError):
            kmeans(m, KMeansConfig(c=3))

    def test_deterministic_for_fixed_seed(self):
        d = generate(SynthConfig(num_families=4, samples_per_family=10, rng_seed=3))
        m = compute_tfidf(d)
        r1 = kmeans(m, KMeansConfig(c=4, rng_seed=7))
        r2 = kmeans(m, KMeansConfig(c=4, rng_seed=7))
        assert r1.assignment == r2.assignment
        assert np.array_equal(r1.centers, r2.centers)

    def test_assignment_is_nearest_center(self):
        d = generate(SynthConfig(num_families=3, samples_per_family=8, rng_seed=5))
        m = compute_tfidf(d)
        res = kmeans(m, KMeansConfig(c=3, rng_seed=2))
        X, _ = tfidf_matrix(m)
        dense = np.asarray(X.todense())
        dists = ((dense[:, None, :] - res.centers[None, :, :]) ** 2).sum(axis=2)
        nearest = dists.min(axis=1)
        chosen = dists[np.arange(len(dense)), res.assignment]
        assert np.allclose(chosen, nearest)

    def test_clusters_non_empty(self):
        d = generate(SynthConfig(num_families=2, samples_per_family=6, rng_seed=9))
        m = compute_tfidf(d)
        res = kmeans(m, KMeansConfig(c=5, rng_seed=0))
        assert set(res.assignment) == set(range(5))


def test_tfidf_matrix_columns_sorted():
    d = Dataset(
        samples=[
            Sample("s1", None, {"perm/b": 1.0, "perm/a": 2.0}),
            Sample("s2", None, {"perm/c": 1.0}),
        ]
    )
    X, names = tfidf_matrix(compute_tfidf(d))
    assert names == sorted(names)
    assert X.shape == (2, len(names))
