"""Per-query score normalization, weighted run fusion, and candidate pooling.

Sparse and dense scores live on incomparable scales, so each system's run is
min-max normalized per query before a weighted sum over the candidate union;
a document missing from one run contributes 0 from that run. The fused run's
top-K prefix per query is the candidate pool fed to sampling and reranking.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import DataError
from .runs import Run, rank_sorted

MINMAX = "minmax"

DEFAULT_POOL_K = 200


@dataclass
class CandidatePool:
    """Per-query top-K candidates, in source-run order."""

    entries: dict[str, list[tuple[str, float]]]
    k: int
    provenance: str

    def docids(self, qid: str) -> list[str]:
        return [docid for docid, _ in self.entries.get(qid, [])]

    @property
    def qids(self) -> list[str]:
        return list(self.entries)

    def to_run(self) -> Run:
        return Run(entries={q: list(v) for q, v in self.entries.items()}, tag=self.provenance)


def normalize_run(run: Run, method: str = MINMAX) -> Run:
    """Min-max normalize scores per query; a degenerate query (max == min)
    maps every score to 1.0. Ranking order is unchanged."""
    if method != MINMAX:
        raise ValueError(f"unknown normalization method: {method!r}")
    entries: dict[str, list[tuple[str, float]]] = {}
    for qid, ranked in run.entries.items():
        if not ranked:
            entries[qid] = []
            continue
        values = [s for _, s in ranked]
        lo, hi = min(values), max(values)
        if hi == lo:
            entries[qid] = [(docid, 1.0) for docid, _ in ranked]
        else:
            span = hi - lo
            entries[qid] = [(docid, (s - lo) / span) for docid, s in ranked]
    return Run(entries=entries, tag=run.tag)


def fuse(runs: Sequence[Run], weights: Sequence[float]) -> Run:
    """Weighted per-(qid, docid) sum over the union of run candidates.

    Callers normalize first when combining heterogeneous systems; weights
    must be nonnegative with a positive sum.
    """
    if len(runs) != len(weights):
        raise ValueError(f"{len(runs)} runs but {len(weights)} weights")
    if any(w < 0 for w in weights):
        raise DataError("fusion weights must be >= 0")
    if sum(weights) <= 0:
        raise DataError("fusion weights sum to zero")
    contributions: dict[str, dict[str, list[float]]] = {}
    for run, weight in zip(runs, weights):
        for qid, ranked in run.entries.items():
            acc = contributions.setdefault(qid, {})
            for docid, score in ranked:
                acc.setdefault(docid, []).append(weight * score)
    # fsum is exactly rounded, so the output is identical under any
    # permutation of the (run, weight) pairs
    entries = {
        qid: rank_sorted((docid, math.fsum(parts)) for docid, parts in acc.items())
        for qid, acc in contributions.items()
    }
    return Run(entries=entries, tag="hybrid")


def cut_pool(run: Run, k: int = DEFAULT_POOL_K) -> CandidatePool:
    """Keep the first min(k, len) entries per query, preserving run order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    entries = {qid: list(ranked[:k]) for qid, ranked in run.entries.items()}
    return CandidatePool(entries=entries, k=k, provenance=run.tag)
