"""Loading, validation, and statistics for line-based retrieval collections.

Three on-disk formats live here:

* corpus: one JSON object per line with string fields ``docid``, ``title``,
  ``text`` (unknown extra fields are ignored);
* topics: two-column TSV ``qid<TAB>query text``, no header;
* qrels: whitespace-delimited ``qid Q0 docid grade``, no header.

All files are strict UTF-8; lines starting with ``#`` and blank lines are
skipped everywhere.
"""
from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import FormatError

SPLITS = ("train", "dev", "test-a", "test-b")


@dataclass(frozen=True)
class Document:
    """A passage: the unit of retrieval."""

    docid: str
    title: str
    text: str


@dataclass(frozen=True)
class Query:
    qid: str
    text: str
    language: str = ""
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r} (known: {', '.join(SPLITS)})")


class JudgmentSet:
    """Graded relevance labels keyed by (qid, docid), grades >= 0."""

    def __init__(self, entries: Mapping[tuple[str, str], int] | None = None):
        self._by_qid: dict[str, dict[str, int]] = {}
        if entries:
            for (qid, docid), grade in entries.items():
                self.add(qid, docid, grade)

    def add(self, qid: str, docid: str, grade: int) -> None:
        if grade < 0:
            raise ValueError(f"negative grade for ({qid}, {docid})")
        docs = self._by_qid.setdefault(qid, {})
        if docid in docs:
            raise ValueError(f"duplicate judgment for ({qid}, {docid})")
        docs[docid] = int(grade)

    def grade(self, qid: str, docid: str, default: int | None = None) -> int | None:
        return self._by_qid.get(qid, {}).get(docid, default)

    def judged_docids(self, qid: str) -> dict[str, int]:
        return dict(self._by_qid.get(qid, {}))

    def positives(self, qid: str) -> set[str]:
        return {d for d, g in self._by_qid.get(qid, {}).items() if g >= 1}

    @property
    def qids(self) -> list[str]:
        return list(self._by_qid)

    def items(self) -> Iterator[tuple[str, str, int]]:
        for qid, docs in self._by_qid.items():
            for docid, grade in docs.items():
                yield qid, docid, grade

    def __len__(self) -> int:
        return sum(len(d) for d in self._by_qid.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JudgmentSet):
            return NotImplemented
        return self._by_qid == other._by_qid

    def __repr__(self) -> str:
        return f"JudgmentSet({len(self)} judgments, {len(self._by_qid)} queries)"


@dataclass
class StatsRow:
    """Per-language collection statistics; ``articles`` stays None when no
    article metadata is available rather than guessing a count."""

    language: str
    queries: dict[str, int]
    judgments: dict[str, int]
    passages: int
    articles: int | None = None


def _data_lines(path: str) -> Iterator[tuple[int, str]]:
    """Yield (line number, decoded line) pairs, skipping blanks and comments.

    Decoding is per line so UTF-8 errors can name the offending line.
    """
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FormatError(f"invalid UTF-8: {exc}", path=path, line=lineno) from None
            stripped = line.rstrip("\n").rstrip("\r")
            if not stripped.strip() or stripped.startswith("#"):
                continue
            yield lineno, stripped


def load_corpus(path: str) -> Iterator[Document]:
    """Stream documents from a JSON-lines corpus file.

    Yields in file order with constant per-record memory; duplicate docids
    and malformed records raise with the offending line number.
    """
    seen: set[str] = set()
    for lineno, line in _data_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON: {exc.msg}", path=path, line=lineno) from None
        if not isinstance(record, dict):
            raise FormatError("record is not an object", path=path, line=lineno)
        docid = record.get("docid")
        text = record.get("text")
        title = record.get("title", "")
        if not isinstance(docid, str) or not docid:
            raise FormatError("missing or empty 'docid'", path=path, line=lineno)
        if not isinstance(title, str):
            raise FormatError("'title' is not a string", path=path, line=lineno)
        if not isinstance(text, str) or not text.strip():
            raise FormatError(f"document {docid!r} has empty 'text'", path=path, line=lineno)
        if docid in seen:
            raise FormatError(f"duplicate docid {docid!r}", path=path, line=lineno)
        seen.add(docid)
        yield Document(docid=docid, title=title, text=text)


def load_topics(path: str, language: str = "", split: str = "train") -> list[Query]:
    """Load a two-column topics TSV; tabs after the first stay in the text."""
    queries: list[Query] = []
    seen: set[str] = set()
    for lineno, line in _data_lines(path):
        parts = line.split("\t", 1)
        if len(parts) != 2:
            raise FormatError("expected 'qid<TAB>text'", path=path, line=lineno)
        qid, text = parts
        if qid in seen:
            raise FormatError(f"duplicate qid {qid!r}", path=path, line=lineno)
        seen.add(qid)
        queries.append(Query(qid=qid, text=text, language=language, split=split))
    return queries


def load_qrels(path: str) -> JudgmentSet:
    """Load whitespace-delimited qrels ``qid Q0 docid grade``."""
    judgments = JudgmentSet()
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"expected 4 columns, got {len(parts)}", path=path, line=lineno)
        qid, _, docid, grade_str = parts
        try:
            grade = int(grade_str)
        except ValueError:
            raise FormatError(f"non-integer grade {grade_str!r}", path=path, line=lineno) from None
        try:
            judgments.add(qid, docid, grade)
        except ValueError as exc:
            raise FormatError(str(exc), path=path, line=lineno) from None
    return judgments


def write_qrels(judgments: JudgmentSet, path: str, header: str | None = None) -> None:
    """Write qrels sorted by (qid, docid) so output bytes are deterministic."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for qid, docid, grade in sorted(judgments.items()):
            fh.write(f"{qid} Q0 {docid} {grade}\n")


def write_corpus(documents: Iterable[Document], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            record = {"docid": doc.docid, "title": doc.title, "text": doc.text}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_topics(queries: Iterable[Query], path: str, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for query in queries:
            fh.write(f"{query.qid}\t{query.text}\n")


def corpus_stats(
    corpus: Iterable[Document],
    topics_by_split: Mapping[str, Iterable[Query]],
    qrels_by_split: Mapping[str, JudgmentSet],
    language: str = "",
) -> StatsRow:
    """Count queries, judgments, and passages for one language."""
    queries = {split: sum(1 for _ in topics) for split, topics in topics_by_split.items()}
    judgments = {split: len(qrels) for split, qrels in qrels_by_split.items()}
    passages = sum(1 for _ in corpus)
    return StatsRow(language=language, queries=queries, judgments=judgments, passages=passages)
