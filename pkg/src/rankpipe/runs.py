"""Ranked run lists and TREC-format run file IO.

A run maps qid -> list of (docid, score) sorted by score descending with
ties broken by ascending docid; docids are unique within a query. The file
format is the six-column TREC layout ``qid Q0 docid rank score tag`` with
ranks starting at 1 and scores written at full precision.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .errors import FormatError


def rank_sorted(pairs: Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    return sorted(pairs, key=lambda p: (-p[1], p[0]))


@dataclass
class Run:
    entries: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    tag: str = "run"

    @classmethod
    def from_scores(cls, scores: Mapping[str, Mapping[str, float]], tag: str = "run") -> "Run":
        """Build a valid run from per-query docid -> score mappings."""
        entries = {
            qid: rank_sorted((docid, float(s)) for docid, s in docs.items())
            for qid, docs in scores.items()
        }
        return cls(entries=entries, tag=tag)

    def scores(self, qid: str) -> dict[str, float]:
        return dict(self.entries.get(qid, []))

    def docids(self, qid: str) -> list[str]:
        return [docid for docid, _ in self.entries.get(qid, [])]

    @property
    def qids(self) -> list[str]:
        return list(self.entries)

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def read_run(path: str) -> Run:
    """Read a TREC run file; entries are re-sorted into canonical order.

    Duplicate (qid, docid) pairs are rejected with their line number.
    """
    per_query: dict[str, dict[str, float]] = {}
    tag: str | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 6:
                raise FormatError(f"expected 6 columns, got {len(parts)}", path=path, line=lineno)
            qid, _, docid, _, score_str, line_tag = parts
            try:
                score = float(score_str)
            except ValueError:
                raise FormatError(f"non-numeric score {score_str!r}", path=path, line=lineno) from None
            if not math.isfinite(score):
                raise FormatError(f"non-finite score {score_str!r}", path=path, line=lineno)
            docs = per_query.setdefault(qid, {})
            if docid in docs:
                raise FormatError(f"duplicate document {docid!r} for query {qid!r}", path=path, line=lineno)
            docs[docid] = score
            if tag is None:
                tag = line_tag
    run = Run.from_scores(per_query, tag=tag if tag is not None else "run")
    return run


def write_run(run: Run, path: str, header: str | None = None) -> None:
    """Write a run file with queries in sorted order for stable bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for qid in sorted(run.entries):
            for rank, (docid, score) in enumerate(run.entries[qid], 1):
                fh.write(f"{qid} Q0 {docid} {rank} {score!r} {run.tag}\n")
