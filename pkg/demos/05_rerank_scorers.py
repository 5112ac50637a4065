"""Building query-document pairs and scoring them with pluggable scorers.

The pair text is ``query [SEP] title [SEP] body``, token-capped at a budget
(256 by default, query always kept whole). Scores can come from the built-in
lexical baseline, a precomputed score file, or any external process speaking
the line protocol (see example_scorer.py).
"""
import sys
import tempfile
from pathlib import Path

from rankpipe import (
    Document,
    Run,
    ScorerHandle,
    build_pairs,
    cut_pool,
    lexical_score,
    score_pairs,
    truncate_pair_text,
)
from rankpipe.tokenization import tokenize

HERE = Path(__file__).resolve().parent

corpus = {
    "d1": Document("d1", "negative sampling", "sampling hard negatives from the candidate pool"),
    "d2": Document("d2", "", "an unrelated passage about something else entirely"),
    "d3": Document("d3", "pool candidates", "the pool holds the top fused candidates per query"),
}
pool = cut_pool(Run.from_scores({"q1": {"d1": 3.0, "d3": 2.0, "d2": 1.0}}, tag="hybrid"), 3)
topics = {"q1": "negative sampling from the pool"}

# --- pair construction -------------------------------------------------------
pairs = list(build_pairs(pool, topics, corpus, budget=256))
print(pairs[0].text)

# truncation keeps the query intact and counts every token of the final text
long_text = pairs[0].text + " padding" * 400
capped = truncate_pair_text(long_text, budget=40)
print(f"capped to {len(tokenize(capped))} tokens")

# --- scorer 1: the built-in lexical baseline ---------------------------------
print("\nlexical overlap scores:")
for pair in pairs:
    print(f"  {pair.docid}: {lexical_score(pair):.3f}")
reranked = score_pairs(pairs, ScorerHandle.parse("lexical"))
print("reranked order:", reranked.docids("q1"))

# --- scorer 2: a score file (e.g. exported from a GPU job) -------------------
with tempfile.TemporaryDirectory(prefix="rankpipe-demo-") as tmp:
    score_file = Path(tmp) / "scores.tsv"
    score_file.write_text("q1 d1 0.91\nq1 d2 0.05\nq1 d3 0.64\n", encoding="utf-8")
    from_file = score_pairs(pairs, ScorerHandle.parse(f"file:{score_file}"))
    print("score-file order:", from_file.docids("q1"))

# --- scorer 3: an external process (any runtime, any model) ------------------
handle = ScorerHandle.parse(f'cmd:{sys.executable} {HERE / "example_scorer.py"}')
from_process = score_pairs(pairs, handle)
print("external-scorer order:", from_process.docids("q1"))
