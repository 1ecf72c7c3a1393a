import numpy as np
import pytest

from conftest import weight_set
from malcom.graph import (
    GraphError,
    build_en,
    build_epsilon,
    build_knn,
    percentile_cutoff,
    read_edges,
    write_edges,
)


def edge_ids(g):
    return {
        tuple(sorted((g.vertices[i], g.vertices[j])))
        for i, j in zip(g.edge_i.tolist(), g.edge_j.tolist())
    }


class TestPercentileCutoff:
    def test_hand_enumeration(self, six_weight_set):
        cutoff, m = percentile_cutoff(six_weight_set, 50)
        assert m == 3
        assert cutoff == 3.0

    def test_p_100_takes_minimum(self, six_weight_set):
        cutoff, m = percentile_cutoff(six_weight_set, 100)
        assert m == 6
        assert cutoff == 0.1

    def test_tie_at_cutoff(self):
        ws = weight_set(
            ["a", "b", "c"], {("a", "b"): 2.0, ("a", "c"): 2.0, ("b", "c"): 1.0}
        )
        cutoff, m = percentile_cutoff(ws, 34)
        assert m == 2
        assert cutoff == 2.0
        g = build_epsilon(ws, cutoff)
        assert edge_ids(g) == {("a", "b"), ("a", "c")}

    def test_empty_weight_set_rejected(self):
        ws = weight_set(["a", "b"], {})
        with pytest.raises(GraphError):
            percentile_cutoff(ws, 50)

    def test_matches_full_sort(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            w = rng.uniform(0.01, 10.0, size=n)
            ids = [f"v{i}" for i in range(n + 1)]
            ws = weight_set(
                ids, {(ids[0], ids[i + 1]): float(w[i]) for i in range(n)}
            )
            p = float(rng.uniform(0.5, 100.0))
            cutoff, m = percentile_cutoff(ws, p)
            assert cutoff == sorted(w, reverse=True)[m - 1]


class TestBuildEpsilon:
    def test_hand_enumeration(self, six_weight_set):
        g = build_epsilon(six_weight_set, 1.0)
        assert edge_ids(g) == {("1", "2"), ("1", "3"), ("2", "3")}
        assert g.degrees()[g.vertices.index("4")] == 0

    def test_threshold_above_max(self, six_weight_set):
        assert build_epsilon(six_weight_set, 10.0).num_edges == 0

    def test_zero_threshold_keeps_all(self, six_weight_set):
        assert build_epsilon(six_weight_set, 0.0).num_edges == 6


class TestBuildKnn:
    def test_hand_enumeration(self, six_weight_set):
        g = build_knn(six_weight_set, 1)
        assert edge_ids(g) == {("1", "2"), ("1", "3"), ("1", "4")}

    def test_k_n_minus_1_complete(self, six_weight_set):
        g = build_knn(six_weight_set, 3)
        assert g.num_edges == 6

    def test_all_weights_absent_uses_floor(self):
        ws = weight_set(["a", "b", "c"], {})
        g = build_knn(ws, 1)
        assert edge_ids(g) == {("a", "b"), ("a", "c")}
        assert (g.edge_w > 0).all()

    def test_degree_at_least_k(self, six_weight_set):
        for k in (1, 2, 3):
            assert (build_knn(six_weight_set, k).degrees() >= k).all()

    def test_k_out_of_range(self, six_weight_set):
        with pytest.raises(GraphError):
            build_knn(six_weight_set, 4)


class TestBuildEn:
    def test_hand_enumeration(self, six_weight_set):
        g = build_en(six_weight_set, 50, 1)
        assert edge_ids(g) == {("1", "2"), ("1", "3"), ("2", "3"), ("1", "4")}
        w = {
            tuple(sorted((g.vertices[i], g.vertices[j]))): weight
            for i, j, weight in zip(
                g.edge_i.tolist(), g.edge_j.tolist(), g.edge_w.tolist()
            )
        }
        assert w[("1", "4")] == 0.5
        assert g.meta["isolated_before_fallback"] == 1

    def test_noop_when_no_isolated(self, six_weight_set):
        g = build_en(six_weight_set, 100, 1)
        eps = build_epsilon(six_weight_set, 0.1)
        assert edge_ids(g) == edge_ids(eps)

    def test_two_vertices(self):
        ws = weight_set(["a", "b"], {("a", "b"): 0.3})
        g = build_en(ws, 1, 1)
        assert edge_ids(g) == {("a", "b")}

    def test_superset_of_epsilon_and_no_isolated(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(3, 25))
            ids = [f"v{i:02d}" for i in range(n)]
            entries = {}
            for a in range(n):
                for b in range(a + 1, n):
                    if rng.random() < 0.3:
                        entries[(ids[a], ids[b])] = float(rng.uniform(0.1, 5))
            if not entries:
                continue
            ws = weight_set(ids, entries)
            p = float(rng.uniform(5, 60))
            k = int(rng.integers(1, min(3, n - 1) + 1))
            cutoff, _ = percentile_cutoff(ws, p)
            eps_g = build_epsilon(ws, cutoff)
            en_g = build_en(ws, p, k)
            assert (en_g.degrees() >= 1).all()
            eps_edges = edge_ids(eps_g)
            en_edges = edge_ids(en_g)
            assert eps_edges <= en_edges
            # extras touch only step-1-isolated vertices
            deg = eps_g.degrees()
            isolated = {ids[v] for v in range(n) if deg[v] == 0}
            for a, b in en_edges - eps_edges:
                assert a in isolated or b in isolated


def test_edge_file_round_trip(tmp_path, six_weight_set):
    g = build_en(six_weight_set, 50, 1)
    path = tmp_path / "edges.tsv"
    write_edges(g, path)
    text = path.read_text()
    assert text.startswith("# vertices: 4\n")
    loaded = read_edges(path)
    assert edge_ids(loaded) == edge_ids(g)
    assert loaded.n == g.n


def test_epsilon_file_lists_isolated_placeholders(tmp_path, six_weight_set):
    g = build_epsilon(six_weight_set, 1.0)
    path = tmp_path / "edges.tsv"
    write_edges(g, path)
    assert "4\t\t0" in path.read_text()
    loaded = read_edges(path)
    assert loaded.n == 4
