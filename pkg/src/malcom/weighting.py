"""Tf-idf importances and pairwise sample weights.

tfidf(m, j) = tf(m, j) * ln(n / s_m), with tf the raw stored feature value,
n the sample count and s_m the number of samples containing feature m.
The weight of a sample pair is the sum over shared features of the mean of
the two tf-idf values.  Accumulation happens feature by feature in
ascending feature-name order, so results are bit-reproducible and match a
brute-force double loop exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .dataset import Dataset, DatasetError


@dataclass
class TfIdfModel:
    n: int
    sample_ids: list[str]
    doc_freq: dict[str, int]
    # per-sample sparse maps, parallel to sample_ids; zeros never stored
    values: list[dict[str, float]]


class WeightSet:
    """Sparse symmetric positive pair weights over n vertices.

    Stored as parallel arrays (i, j, w) with i < j (vertex indices in
    dataset order) and w > 0.
    """

    def __init__(self, ids: list[str], i: np.ndarray, j: np.ndarray, w: np.ndarray):
        self.ids = ids
        self.i = np.asarray(i, dtype=np.int64)
        self.j = np.asarray(j, dtype=np.int64)
        self.w = np.asarray(w, dtype=np.float64)
        self._index: Optional[dict[tuple[int, int], float]] = None

    @property
    def n(self) -> int:
        return len(self.ids)

    def __len__(self) -> int:
        return len(self.w)

    def pairs(self) -> Iterator[tuple[int, int, float]]:
        yield from zip(self.i.tolist(), self.j.tolist(), self.w.tolist())

    def get(self, a: int, b: int) -> float:
        """Weight between vertex indices a and b; 0 when the pair is absent."""
        if a == b:
            raise ValueError("no self-pairs in a weight set")
        if self._index is None:
            self._index = {
                (ii, jj): ww for ii, jj, ww in zip(self.i, self.j, self.w)
            }
        key = (a, b) if a < b else (b, a)
        return self._index.get(key, 0.0)


@dataclass
class FamilySimilarityMatrix:
    families: list[str]
    matrix: np.ndarray  # symmetric, diagonal = mean intra-family pair weight


def compute_tfidf(d: Dataset) -> TfIdfModel:
    if len(d) == 0:
        raise DatasetError("cannot compute tf-idf on an empty dataset")
    n = len(d)
    doc_freq: dict[str, int] = {}
    for s in d.samples:
        for name in s.features:
            doc_freq[name] = doc_freq.get(name, 0) + 1
    values = []
    for s in d.samples:
        row = {}
        for name, tf in s.features.items():
            idf = math.log(n / doc_freq[name])
            v = tf * idf
            if v != 0.0:
                row[name] = v
        values.append(row)
    return TfIdfModel(
        n=n,
        sample_ids=[s.id for s in d.samples],
        doc_freq=doc_freq,
        values=values,
    )


def pairwise_weights(m: TfIdfModel) -> WeightSet:
    """Symmetric pair weights via an inverted index over features.

    For each feature (ascending name) the tf-idf values of the samples
    containing it are combined pairwise as (t_i + t_j) / 2 and accumulated
    into the pair's weight.  Accumulation uses a dense n x n buffer, so
    memory is O(n^2); fine for desk-scale corpora.
    """
    n = m.n
    inverted: dict[str, tuple[list[int], list[float]]] = {}
    for idx, row in enumerate(m.values):
        for name, v in row.items():
            bucket = inverted.setdefault(name, ([], []))
            bucket[0].append(idx)
            bucket[1].append(v)

    acc = np.zeros((n, n), dtype=np.float64)
    for name in sorted(inverted):
        idx, vals = inverted[name]
        if len(idx) < 2:
            continue
        ix = np.asarray(idx, dtype=np.int64)
        t = np.asarray(vals, dtype=np.float64)
        block = (t[:, None] + t[None, :]) * 0.5
        acc[np.ix_(ix, ix)] += block

    iu, ju = np.triu_indices(n, k=1)
    w = acc[iu, ju]
    mask = w > 0
    return WeightSet(ids=list(m.sample_ids), i=iu[mask], j=ju[mask], w=w[mask])


def family_similarity(d: Dataset, ws: WeightSet) -> FamilySimilarityMatrix:
    """Mean pair weight between (and within) ground-truth families."""
    if not d.fully_labeled():
        raise DatasetError("family similarity requires every sample labeled")
    families = sorted({s.family for s in d.samples})
    fam_index = {f: k for k, f in enumerate(families)}
    sample_fam = np.array([fam_index[s.family] for s in d.samples], dtype=np.int64)
    sizes = np.bincount(sample_fam, minlength=len(families)).astype(np.float64)

    sums = np.zeros((len(families), len(families)), dtype=np.float64)
    for i, j, w in zip(ws.i, ws.j, ws.w):
        a, b = sample_fam[i], sample_fam[j]
        sums[a, b] += w
        if a != b:
            sums[b, a] += w

    counts = np.outer(sizes, sizes)
    np.fill_diagonal(counts, sizes * (sizes - 1) / 2.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        matrix = np.where(counts > 0, sums / counts, 0.0)
    return FamilySimilarityMatrix(families=families, matrix=matrix)


def feature_frequency(d: Dataset, top: int) -> list[tuple[str, float]]:
    """Top features ranked by fraction of samples containing them.

    Descending by fraction, ties broken by ascending feature name.
    """
    n = len(d)
    if n == 0:
        return []
    counts: dict[str, int] = {}
    for s in d.samples:
        for name in s.features:
            counts[name] = counts.get(name, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(name, c / n) for name, c in ranked[:top]]


def dump_tfidf(m: TfIdfModel, path) -> None:
    """Write the model as JSON Lines with 10-significant-digit values."""
    with open(path, "w", encoding="utf-8") as fh:
        for sid, row in zip(m.sample_ids, m.values):
            parts = ",".join(
                f'{json.dumps(k)}:{v:.10g}' for k, v in sorted(row.items())
            )
            fh.write(f'{{"id":{json.dumps(sid)},"tfidf":{{{parts}}}}}\n')
