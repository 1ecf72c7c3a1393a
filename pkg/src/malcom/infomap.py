"""Two-level map-equation community detection on undirected weighted graphs.

The objective is the expected per-step description length of a random walk
under one index codebook plus one codebook per community:

    L = q * H(Q) + sum_i p_i * H(P_i)

where q is the total community-exit rate, H(Q) the entropy of the
normalized exit rates, p_i the usage rate of community i's codebook and
H(P_i) the entropy of its exit-plus-visit rates.  Visit rates follow the
undirected flow model p_v = strength(v) / (2 * total_weight), with no
teleportation.  All entropies are base 2 (codelengths in bits).

Optimization is a Louvain-style local-move pass (strictly improving moves
only, scan order shuffled per pass by a seeded RNG) with multilevel
aggregation into super-vertices; an exhaustive Bell-number oracle is
provided for small graphs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import RelationGraph


class InfomapError(ValueError):
    pass


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


@dataclass
class FlowModel:
    total_weight: float
    visit_rates: np.ndarray  # p_v per vertex; sums to 1


@dataclass
class Partition:
    assignment: list[int]  # vertex -> community id, dense 0..m-1
    m: int

    @staticmethod
    def from_labels(labels: list[int]) -> "Partition":
        """Canonicalize arbitrary labels to dense ids by first appearance."""
        remap: dict[int, int] = {}
        dense = []
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap)
            dense.append(remap[lab])
        return Partition(assignment=dense, m=len(remap))

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.m)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return groups


@dataclass
class MapEquationBreakdown:
    q_exit: np.ndarray        # per-community exit rate q_i
    q_total: float            # sum of q_i
    index_entropy: float      # H(Q)
    module_usage: np.ndarray  # p_i = q_i + sum of visit rates in i
    module_entropy: np.ndarray
    codelength: float         # bits


@dataclass
class DetectorConfig:
    rng_seed: int = 0
    convergence_tolerance: float = 1e-10  # bits
    max_outer_levels: Optional[int] = None

    def __post_init__(self):
        if self.convergence_tolerance <= 0:
            raise InfomapError("convergence tolerance must be > 0")


class _Net:
    """Adjacency view used across aggregation levels.

    Self-loops (u == v) count twice toward a vertex's strength and once
    toward the total weight, so aggregation preserves flows exactly.
    """

    def __init__(self, n: int, edges: list[tuple[int, int, float]]):
        self.n = n
        self.adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        self.strength = np.zeros(n, dtype=np.float64)
        self.loop = np.zeros(n, dtype=np.float64)
        total = 0.0
        for u, v, w in edges:
            if u == v:
                self.loop[u] += w
                self.strength[u] += 2.0 * w
            else:
                self.adj[u].append((v, w))
                self.adj[v].append((u, w))
                self.strength[u] += w
                self.strength[v] += w
            total += w
        self.total_weight = total
        # sum of plogp over the FINEST level's visit rates; aggregated nets
        # inherit it so codelengths stay comparable across levels
        self.fine_vertex_plogp: Optional[float] = None

    def own_vertex_plogp(self) -> float:
        return float(sum(_plogp(pv) for pv in self.visit_rates()))

    def visit_rates(self) -> np.ndarray:
        if self.total_weight <= 0.0:
            if self.n == 1:
                return np.array([1.0])
            raise InfomapError("graph with >= 2 vertices has zero total weight")
        return self.strength / (2.0 * self.total_weight)


def _net_from_graph(g: RelationGraph) -> _Net:
    edges = list(
        zip(g.edge_i.tolist(), g.edge_j.tolist(), g.edge_w.tolist())
    )
    net = _Net(g.n, edges)
    net.fine_vertex_plogp = net.own_vertex_plogp()
    return net


def compute_flows(g: RelationGraph) -> FlowModel:
    if g.n == 0:
        raise InfomapError("empty graph")
    net = _net_from_graph(g)
    return FlowModel(total_weight=net.total_weight, visit_rates=net.visit_rates())


def _breakdown(net: _Net, assignment: list[int], m: int) -> MapEquationBreakdown:
    p = net.visit_rates()
    two_w = 2.0 * net.total_weight if net.total_weight > 0 else 1.0

    cut = np.zeros(m, dtype=np.float64)  # raw inter-community weight per community
    for v in range(net.n):
        cv = assignment[v]
        for u, w in net.adj[v]:
            if assignment[u] != cv:
                cut[cv] += w

    q_exit = cut / two_w
    q_total = float(q_exit.sum())

    if q_total > 0.0:
        index_entropy = -sum(
            _plogp(qi / q_total) for qi in q_exit if qi > 0.0
        )
    else:
        index_entropy = 0.0

    sum_p = np.zeros(m, dtype=np.float64)
    for v in range(net.n):
        sum_p[assignment[v]] += p[v]
    usage = q_exit + sum_p

    module_entropy = np.zeros(m, dtype=np.float64)
    groups: list[list[int]] = [[] for _ in range(m)]
    for v in range(net.n):
        groups[assignment[v]].append(v)
    for c in range(m):
        if usage[c] <= 0.0:
            continue
        h = 0.0
        if q_exit[c] > 0.0:
            h -= _plogp(q_exit[c] / usage[c])
        for v in groups[c]:
            if p[v] > 0.0:
                h -= _plogp(p[v] / usage[c])
        module_entropy[c] = h

    codelength = q_total * index_entropy + float(
        np.dot(usage, module_entropy)
    )
    # on an aggregated net, re-express per-super-vertex entropy in terms of
    # the finest level's vertices (constant shift; zero at the fine level)
    if net.fine_vertex_plogp is not None:
        codelength += net.own_vertex_plogp() - net.fine_vertex_plogp
    return MapEquationBreakdown(
        q_exit=q_exit,
        q_total=q_total,
        index_entropy=index_entropy,
        module_usage=usage,
        module_entropy=module_entropy,
        codelength=codelength,
    )


def codelength(g: RelationGraph, part: Partition) -> MapEquationBreakdown:
    if len(part.assignment) != g.n:
        raise InfomapError(
            f"partition covers {len(part.assignment)} vertices, graph has {g.n}"
        )
    if sorted(set(part.assignment)) != list(range(part.m)):
        raise InfomapError("community ids must be dense 0..m-1")
    return _breakdown(_net_from_graph(g), part.assignment, part.m)


def _codelength_terms(q_tot: float, q: np.ndarray, usage: np.ndarray) -> float:
    """L minus the constant -sum plogp(p_v) term, in expanded form."""
    return (
        _plogp(q_tot)
        - 2.0 * sum(_plogp(x) for x in q)
        + sum(_plogp(x) for x in usage)
    )


class _LocalState:
    """Incrementally maintained codelength state for one level."""

    def __init__(self, net: _Net, assignment: list[int]):
        self.net = net
        self.assignment = assignment
        self.p = net.visit_rates()
        two_w = 2.0 * net.total_weight if net.total_weight > 0 else 1.0
        self.inv_two_w = 1.0 / two_w
        m = max(assignment) + 1
        self.q = np.zeros(m, dtype=np.float64)
        self.sum_p = np.zeros(m, dtype=np.float64)
        for v in range(net.n):
            c = assignment[v]
            self.sum_p[c] += self.p[v]
            for u, w in net.adj[v]:
                if assignment[u] != c:
                    self.q[c] += w * self.inv_two_w
        self.q_total = float(self.q.sum())
        fine = net.fine_vertex_plogp
        self.const = -(fine if fine is not None else net.own_vertex_plogp())

    def codelength(self) -> float:
        usage = self.q + self.sum_p
        return _codelength_terms(self.q_total, self.q, usage) + self.const

    def move_delta(self, v: int, target: int, w_va: float, w_vb: float) -> float:
        """Codelength change of moving v from its community to target.

        w_va / w_vb: normalized edge weight from v into its current /
        target community (excluding v itself).
        """
        a = self.assignment[v]
        d_v = (self.net.strength[v] - 2.0 * self.net.loop[v]) * self.inv_two_w
        p_v = self.p[v]

        qa, qb = self.q[a], self.q[target]
        qa_new = qa - d_v + 2.0 * w_va
        qb_new = qb + d_v - 2.0 * w_vb
        q_tot_new = self.q_total + (qa_new - qa) + (qb_new - qb)

        ua = qa + self.sum_p[a]
        ub = qb + self.sum_p[target]
        ua_new = qa_new + self.sum_p[a] - p_v
        ub_new = qb_new + self.sum_p[target] + p_v

        return (
            _plogp(q_tot_new)
            - _plogp(self.q_total)
            - 2.0 * (_plogp(qa_new) + _plogp(qb_new) - _plogp(qa) - _plogp(qb))
            + (_plogp(ua_new) + _plogp(ub_new) - _plogp(ua) - _plogp(ub))
        )

    def apply_move(self, v: int, target: int, w_va: float, w_vb: float) -> None:
        a = self.assignment[v]
        d_v = (self.net.strength[v] - 2.0 * self.net.loop[v]) * self.inv_two_w
        p_v = self.p[v]
        qa_new = self.q[a] - d_v + 2.0 * w_va
        qb_new = self.q[target] + d_v - 2.0 * w_vb
        self.q_total += (qa_new - self.q[a]) + (qb_new - self.q[target])
        self.q[a] = qa_new
        self.q[target] = qb_new
        self.sum_p[a] -= p_v
        self.sum_p[target] += p_v
        self.assignment[v] = target


def _local_move_passes(
    net: _Net, rng: np.random.Generator, tol: float
) -> list[int]:
    """Run shuffled local-move passes from all-singletons to convergence."""
    assignment = list(range(net.n))
    state = _LocalState(net, assignment)
    while True:
        moved = False
        order = rng.permutation(net.n)
        for v in order.tolist():
            a = state.assignment[v]
            # normalized weight from v into each neighbor community
            w_to: dict[int, float] = {}
            for u, w in net.adj[v]:
                c = state.assignment[u]
                w_to[c] = w_to.get(c, 0.0) + w * state.inv_two_w
            w_va = w_to.get(a, 0.0)
            best_c, best_delta = a, 0.0
            for c in sorted(w_to):
                if c == a:
                    continue
                delta = state.move_delta(v, c, w_va, w_to[c])
                if delta < best_delta:
                    best_delta, best_c = delta, c
            if best_c != a and best_delta < -tol:
                state.apply_move(v, best_c, w_va, w_to[best_c])
                moved = True
        if not moved:
            break
    return state.assignment


def _aggregate(net: _Net, assignment: list[int], m: int) -> _Net:
    agg: dict[tuple[int, int], float] = {}
    for v in range(net.n):
        cv = assignment[v]
        if net.loop[v] > 0:
            key = (cv, cv)
            agg[key] = agg.get(key, 0.0) + net.loop[v]
        for u, w in net.adj[v]:
            if u < v:
                continue  # each undirected edge once
            cu = assignment[u]
            key = (cv, cu) if cv <= cu else (cu, cv)
            agg[key] = agg.get(key, 0.0) + w
    edges = [(a, b, w) for (a, b), w in sorted(agg.items())]
    out = _Net(m, edges)
    out.fine_vertex_plogp = net.fine_vertex_plogp
    return out


def detect(
    g: RelationGraph, cfg: DetectorConfig | None = None
) -> tuple[Partition, MapEquationBreakdown]:
    """Minimize the map equation by local moves plus multilevel aggregation.

    Deterministic for a fixed seed; returns the flat vertex-level partition
    (canonical ids by first appearance in vertex order) and its breakdown.
    """
    if cfg is None:
        cfg = DetectorConfig()
    if g.n == 0:
        raise InfomapError("empty graph")
    rng = np.random.default_rng(cfg.rng_seed)
    tol = cfg.convergence_tolerance

    net = _net_from_graph(g)
    vertex_node = list(range(g.n))  # original vertex -> current-level node
    level = 0
    while True:
        level += 1
        assignment = _local_move_passes(net, rng, tol)
        dense = Partition.from_labels(assignment)
        if dense.m == net.n:
            break  # no merges at this level; converged
        vertex_node = [dense.assignment[node] for node in vertex_node]
        net = _aggregate(net, dense.assignment, dense.m)
        if cfg.max_outer_levels is not None and level >= cfg.max_outer_levels:
            break

    part = Partition.from_labels(vertex_node)
    return part, codelength(g, part)


def _set_partitions(n: int):
    """All set partitions of range(n) as restricted-growth label lists,
    in lexicographic order (first yield: everything in one block)."""
    labels = [0] * n

    def rec(i: int, used: int):
        if i == n:
            yield labels.copy()
            return
        for c in range(used + 1):
            labels[i] = c
            yield from rec(i + 1, max(used, c + 1))

    yield from rec(1, 1) if n > 1 else iter([labels.copy()])


def exhaustive_min_codelength(
    g: RelationGraph,
) -> tuple[Partition, MapEquationBreakdown]:
    """Global minimizer by Bell-number enumeration; |V| <= 12 only.

    Ties resolve to the first partition in enumeration order.
    """
    if g.n > 12:
        raise InfomapError(f"exhaustive search limited to 12 vertices, got {g.n}")
    if g.n == 0:
        raise InfomapError("empty graph")
    net = _net_from_graph(g)
    best_labels = None
    best_len = math.inf
    for labels in _set_partitions(g.n):
        m = max(labels) + 1
        length = _breakdown(net, labels, m).codelength
        if length < best_len:
            best_len = length
            best_labels = labels
    part = Partition.from_labels(best_labels)
    return part, codelength(g, part)
