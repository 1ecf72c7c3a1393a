"""End-to-end orchestration: load -> filter -> tf-idf -> weights -> graph
-> community detection -> evaluation, with per-stage timings and the
report files the CLI emits."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import metrics
from .dataset import Dataset, filter_by_scope, load_dataset, load_dictionary
from .graph import GraphBuildParams, RelationGraph, build_graph, write_edges
from .infomap import DetectorConfig, detect
from .weighting import compute_tfidf, pairwise_weights


@dataclass
class PipelineReport:
    parameters: dict
    timings_ms: dict[str, float] = field(default_factory=dict)
    graph_stats: dict = field(default_factory=dict)
    codelength_bits: float = 0.0
    num_communities: int = 0
    q_total: float = 0.0
    evaluation: Optional[metrics.EvaluationReport] = None

    def to_json(self) -> dict:
        obj = {
            "parameters": self.parameters,
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
            "graph_stats": self.graph_stats,
            "codelength_bits": self.codelength_bits,
            "num_communities": self.num_communities,
            "q_total": self.q_total,
            "seed": self.parameters.get("seed"),
        }
        if self.evaluation is not None:
            obj["evaluation"] = {
                "rs": self.evaluation.rand_statistic,
                "accuracy": self.evaluation.accuracy,
                "num_families": self.evaluation.num_families,
                "num_communities": self.evaluation.num_communities,
            }
        return obj


def write_partition(sample_ids: list[str], assignment: list[int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "community_id"])
        for sid, c in zip(sample_ids, assignment):
            writer.writerow([sid, c])


def read_partition(path) -> tuple[list[str], list[int]]:
    ids: list[str] = []
    comms: list[int] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["sample_id", "community_id"]:
            raise ValueError(f"unexpected partition header: {header}")
        for sid, c in reader:
            ids.append(sid)
            comms.append(int(c))
    return ids, comms


def load_inputs(
    dataset_path, dict_path=None, scope: str = "all", on_missing: str = "error"
) -> Dataset:
    d = load_dataset(dataset_path)
    if dict_path is not None:
        d.dictionary = load_dictionary(dict_path)
    return filter_by_scope(d, scope, on_missing=on_missing)


def run_pipeline(
    dataset: Dataset,
    params: GraphBuildParams,
    seed: int = 0,
    out_dir=None,
    threads: int = 1,
    scope: str = "all",
) -> PipelineReport:
    """Run the full pipeline on an in-memory dataset.

    When out_dir is given, writes edges.tsv, partition.csv, report.json and
    (for fully labeled corpora) eval.json there.  ``threads`` caps worker
    parallelism; the current stages run sequentially, so any value yields
    identical output.
    """
    report = PipelineReport(
        parameters={
            "scope": scope,
            "method": params.method,
            "p": params.p,
            "k": params.k,
            "epsilon": params.epsilon,
            "seed": seed,
            "threads": threads,
            "n_samples": len(dataset),
        }
    )

    t0 = time.perf_counter()
    model = compute_tfidf(dataset)
    t1 = time.perf_counter()
    report.timings_ms["tfidf"] = (t1 - t0) * 1000.0

    ws = pairwise_weights(model)
    t2 = time.perf_counter()
    report.timings_ms["weights"] = (t2 - t1) * 1000.0

    g = build_graph(ws, params)
    t3 = time.perf_counter()
    report.timings_ms["graph"] = (t3 - t2) * 1000.0
    report.graph_stats = _graph_stats(g)

    part, breakdown = detect(g, DetectorConfig(rng_seed=seed))
    t4 = time.perf_counter()
    report.timings_ms["detect"] = (t4 - t3) * 1000.0
    report.codelength_bits = breakdown.codelength
    report.num_communities = part.m
    report.q_total = breakdown.q_total

    if dataset.fully_labeled() and len(dataset) >= 2:
        report.evaluation = metrics.evaluate(dataset.labels(), part.assignment)
        report.timings_ms["eval"] = (time.perf_counter() - t4) * 1000.0

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_edges(g, out / "edges.tsv")
        write_partition(g.vertices, part.assignment, out / "partition.csv")
        if report.evaluation is not None:
            metrics.write_report(report.evaluation, out / "eval.json")
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def _graph_stats(g: RelationGraph) -> dict:
    deg = g.degrees()
    stats = {
        "vertices": g.n,
        "edges": g.num_edges,
        "mean_degree": float(deg.mean()) if g.n else 0.0,
        "isolated": int((deg == 0).sum()),
    }
    for key in ("epsilon", "isolated_before_fallback", "fallback_edges"):
        if key in g.meta:
            stats[key] = g.meta[key]
    return stats
