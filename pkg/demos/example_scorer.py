#!/usr/bin/env python3
"""Reference external scorer: the whole wire protocol in a dozen lines.

Usage: rankpipe rerank --scorer cmd:"python3 demos/example_scorer.py" ...

Reads requests from stdin, answers on stdout. Swap `score()` for a real
model and keep everything else.
"""
import sys


def unescape(text: str) -> str:
    return text.replace("\\n", "\n").replace("\\t", "\t").replace("\\\\", "\\")


def score(text: str) -> float:
    query, _, doc = unescape(text).partition(" [SEP] ")
    words = {w for w in query.lower().split() if w}
    hits = sum(1 for w in words if w in doc.lower())
    return hits / len(words) if words else 0.0


assert sys.stdin.readline().strip() == "HELLO 1"
print("READY 1", flush=True)
for line in sys.stdin:
    _, qid, docid, text = line.rstrip("\n").split("\t")
    print(f"{qid}\t{docid}\t{score(text)}", flush=True)
