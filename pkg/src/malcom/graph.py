"""Relation-graph construction: epsilon threshold, k-NN, and the combined
E-N method (epsilon edges plus k-NN fallback for isolated vertices).

The percentile cutoff counts only strictly positive stored weights and is
found by selection (introselect via numpy.partition), never by a full sort.
The k-NN builder deliberately performs a per-vertex full sort; it is the
slow baseline the E-N method is benchmarked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .weighting import WeightSet

# Fallback edges for vertices with no positive weight at all get this
# fraction of the smallest positive weight, keeping them flow-connected
# without perturbing any ranking.
FLOOR_FACTOR = 1e-3
DEFAULT_FLOOR = 1e-3  # used when the weight set has no positive entry


class GraphError(ValueError):
    pass


@dataclass
class RelationGraph:
    vertices: list[str]
    edge_i: np.ndarray  # int64, edge_i < edge_j
    edge_j: np.ndarray
    edge_w: np.ndarray  # float64, all > 0
    meta: dict = field(default_factory=dict)
    _adj: Optional[list[list[tuple[int, float]]]] = field(
        default=None, repr=False, compare=False
    )

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edge_w)

    def adjacency(self) -> list[list[tuple[int, float]]]:
        if self._adj is None:
            adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
            for i, j, w in zip(
                self.edge_i.tolist(), self.edge_j.tolist(), self.edge_w.tolist()
            ):
                adj[i].append((j, w))
                adj[j].append((i, w))
            self._adj = adj
        return self._adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edge_i, 1)
        np.add.at(deg, self.edge_j, 1)
        return deg

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.edge_i.tolist(), self.edge_j.tolist()))

    def total_weight(self) -> float:
        return float(self.edge_w.sum())


@dataclass
class GraphBuildParams:
    method: str = "en"  # epsilon | knn | en
    p: float = 10.0
    k: int = 1
    epsilon: Optional[float] = None

    def validate(self, n: int) -> None:
        if self.method not in ("epsilon", "knn", "en"):
            raise GraphError(f"unknown graph method {self.method!r}")
        if self.method in ("epsilon", "en") and self.epsilon is None:
            if not (0 < self.p <= 100):
                raise GraphError(f"p must be in (0, 100], got {self.p}")
        if self.method in ("knn", "en"):
            if self.k < 1:
                raise GraphError(f"k must be >= 1, got {self.k}")
            if self.k >= n:
                raise GraphError(f"k must be < n ({n}), got {self.k}")


def percentile_cutoff(ws: WeightSet, p: float) -> tuple[float, int]:
    """Threshold for keeping the top p percent of stored weights.

    Returns (cutoff, m) where m = ceil(p/100 * |W|) and the cutoff is the
    m-th largest weight.  All pairs with weight >= cutoff become edges, so
    ties at the cutoff can push the edge count above m.
    """
    if len(ws) == 0:
        raise GraphError("cannot take a percentile of an empty weight set")
    if not (0 < p <= 100):
        raise GraphError(f"p must be in (0, 100], got {p}")
    total = len(ws)
    m = math.ceil(p / 100.0 * total)
    m = min(m, total)
    # m-th largest == (total - m)-th smallest; introselect, no full sort
    cutoff = float(np.partition(ws.w, total - m)[total - m])
    return cutoff, m


def build_epsilon(ws: WeightSet, epsilon: float) -> RelationGraph:
    """Edge for every pair with weight >= epsilon; isolated vertices allowed."""
    if epsilon < 0:
        raise GraphError(f"epsilon must be >= 0, got {epsilon}")
    mask = ws.w >= epsilon
    return RelationGraph(
        vertices=list(ws.ids),
        edge_i=ws.i[mask].copy(),
        edge_j=ws.j[mask].copy(),
        edge_w=ws.w[mask].copy(),
        meta={"method": "epsilon", "epsilon": epsilon},
    )


def _floor_weight(ws: WeightSet) -> float:
    if len(ws) == 0:
        return DEFAULT_FLOOR
    return float(ws.w.min()) * FLOOR_FACTOR


def _neighbor_lists(ws: WeightSet) -> list[list[tuple[int, float]]]:
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(ws.n)]
    for i, j, w in zip(ws.i.tolist(), ws.j.tolist(), ws.w.tolist()):
        nbrs[i].append((j, w))
        nbrs[j].append((i, w))
    return nbrs


def _k_nearest(
    v: int,
    k: int,
    nbrs: list[list[tuple[int, float]]],
    ids: list[str],
    floor: float,
    full_sort: bool,
) -> list[tuple[int, float]]:
    """Top-k neighbors of v by descending weight, ties by ascending id.

    Absent pairs count as weight 0 and, if selected, carry the floor weight.
    """
    cand = nbrs[v]
    if full_sort or len(cand) <= k:
        ranked = sorted(cand, key=lambda t: (-t[1], ids[t[0]]))
    else:
        # partial selection: partition by weight, then resolve the boundary
        arr_w = np.array([w for _, w in cand])
        kth = -np.partition(-arr_w, k - 1)[k - 1]
        keep = [(u, w) for u, w in cand if w >= kth]
        ranked = sorted(keep, key=lambda t: (-t[1], ids[t[0]]))
    chosen = ranked[:k]
    if len(chosen) < k:
        have = {u for u, _ in chosen} | {v}
        fill = sorted(
            (u for u in range(len(ids)) if u not in have), key=lambda u: ids[u]
        )
        chosen.extend((u, floor) for u in fill[: k - len(chosen)])
    return chosen


def build_knn(ws: WeightSet, k: int) -> RelationGraph:
    """Undirected union of every vertex's k largest-weight neighbors.

    Uses a per-vertex full sort on purpose: this is the quadratic baseline
    whose construction time the E-N method must beat.
    """
    n = ws.n
    if not (1 <= k < n):
        raise GraphError(f"k must satisfy 1 <= k < n ({n}), got {k}")
    floor = _floor_weight(ws)
    nbrs = _neighbor_lists(ws)
    edges: dict[tuple[int, int], float] = {}
    for v in range(n):
        for u, w in _k_nearest(v, k, nbrs, ws.ids, floor, full_sort=True):
            key = (v, u) if v < u else (u, v)
            edges[key] = w if w > 0 else floor
    return _from_edge_dict(ws.ids, edges, {"method": "knn", "k": k})


def build_en(ws: WeightSet, p: float, k: int) -> RelationGraph:
    """Epsilon graph at the top-p-percent cutoff, then k-NN fallback edges
    for every vertex the first step left isolated."""
    n = ws.n
    if not (1 <= k < n):
        raise GraphError(f"k must satisfy 1 <= k < n ({n}), got {k}")
    epsilon, _ = percentile_cutoff(ws, p)
    base = build_epsilon(ws, epsilon)
    deg = base.degrees()
    isolated = [v for v in range(n) if deg[v] == 0]

    edges: dict[tuple[int, int], float] = {
        (i, j): w
        for i, j, w in zip(
            base.edge_i.tolist(), base.edge_j.tolist(), base.edge_w.tolist()
        )
    }
    fallback = 0
    if isolated:
        floor = _floor_weight(ws)
        nbrs = _neighbor_lists(ws)
        for v in isolated:
            for u, w in _k_nearest(v, k, nbrs, ws.ids, floor, full_sort=False):
                key = (v, u) if v < u else (u, v)
                if key not in edges:
                    edges[key] = w if w > 0 else floor
                    fallback += 1
    meta = {
        "method": "en",
        "p": p,
        "k": k,
        "epsilon": epsilon,
        "isolated_before_fallback": len(isolated),
        "fallback_edges": fallback,
    }
    return _from_edge_dict(ws.ids, edges, meta)


def _from_edge_dict(
    ids: list[str], edges: dict[tuple[int, int], float], meta: dict
) -> RelationGraph:
    keys = sorted(edges)
    ei = np.array([a for a, _ in keys], dtype=np.int64)
    ej = np.array([b for _, b in keys], dtype=np.int64)
    ew = np.array([edges[key] for key in keys], dtype=np.float64)
    return RelationGraph(
        vertices=list(ids), edge_i=ei, edge_j=ej, edge_w=ew, meta=meta
    )


def build_graph(ws: WeightSet, params: GraphBuildParams) -> RelationGraph:
    params.validate(ws.n)
    if params.method == "epsilon":
        eps = params.epsilon
        if eps is None:
            eps, _ = percentile_cutoff(ws, params.p)
        return build_epsilon(ws, eps)
    if params.method == "knn":
        return build_knn(ws, params.k)
    return build_en(ws, params.p, params.k)


def write_edges(g: RelationGraph, path) -> None:
    """TSV edge list: ``src<TAB>dst<TAB>weight`` with src < dst
    lexicographically.  Epsilon graphs list isolated vertices as
    placeholder lines ``id<TAB><TAB>0``."""
    ids = g.vertices
    lines = []
    for i, j, w in zip(g.edge_i.tolist(), g.edge_j.tolist(), g.edge_w.tolist()):
        a, b = ids[i], ids[j]
        if b < a:
            a, b = b, a
        lines.append((a, b, f"{w:.10g}"))
    lines.sort()
    extra = []
    if g.meta.get("method") == "epsilon":
        deg = g.degrees()
        extra = sorted(ids[v] for v in range(g.n) if deg[v] == 0)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# vertices: {g.n}\n")
        for a, b, w in lines:
            fh.write(f"{a}\t{b}\t{w}\n")
        for vid in extra:
            fh.write(f"{vid}\t\t0\n")


def read_edges(path) -> RelationGraph:
    """Inverse of write_edges (placeholder lines restore isolated vertices)."""
    ids: list[str] = []
    index: dict[str, int] = {}

    def vid(name: str) -> int:
        if name not in index:
            index[name] = len(ids)
            ids.append(name)
        return index[name]

    triples = []
    n_declared = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# vertices:"):
                n_declared = int(line.split(":", 1)[1])
                continue
            src, dst, w = line.split("\t")
            if dst == "":
                vid(src)
                continue
            triples.append((vid(src), vid(dst), float(w)))
    ei = np.array([a for a, _, _ in triples], dtype=np.int64)
    ej = np.array([b for _, b, _ in triples], dtype=np.int64)
    ew = np.array([w for _, _, w in triples], dtype=np.float64)
    swap = ei > ej
    ei[swap], ej[swap] = ej[swap], ei[swap]
    g = RelationGraph(vertices=ids, edge_i=ei, edge_j=ej, edge_w=ew)
    if n_declared is not None and n_declared != g.n:
        raise GraphError(
            f"edge file declares {n_declared} vertices but lists {g.n}"
        )
    return g
