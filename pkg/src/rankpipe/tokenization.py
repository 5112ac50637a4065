"""Multilingual tokenization with per-script segmentation policies.

Space-delimited scripts are split on runs of non-alphanumeric characters;
unsegmented scripts (Han, kana, Hangul, Thai) are broken into one token per
character so their text stays retrievable without a real word segmenter.
"""
from __future__ import annotations

import re

WHITESPACE = "whitespace"
UNIGRAM = "unigram"
AUTO = "auto"

POLICIES = (WHITESPACE, UNIGRAM, AUTO)

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Code-point ranges that get character-level segmentation.
_UNIGRAM_RANGES: tuple[tuple[int, int], ...] = (
    (0x1100, 0x11FF),  # Hangul jamo
    (0x0E00, 0x0E7F),  # Thai
    (0x3040, 0x309F),  # Hiragana
    (0x30A0, 0x30FF),  # Katakana
    (0x31F0, 0x31FF),  # Katakana phonetic extensions
    (0x3130, 0x318F),  # Hangul compatibility jamo
    (0x3400, 0x4DBF),  # CJK extension A
    (0x4E00, 0x9FFF),  # CJK unified ideographs
    (0xAC00, 0xD7AF),  # Hangul syllables
    (0xF900, 0xFAFF),  # CJK compatibility ideographs
)


def is_unigram_char(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _UNIGRAM_RANGES)


def detect_policy(text: str) -> str:
    """Pick whitespace or unigram segmentation by majority script of the text.

    Only alphanumeric characters vote; a text without any defaults to
    whitespace splitting.
    """
    unigram = 0
    other = 0
    for ch in text:
        if not ch.isalnum():
            continue
        if is_unigram_char(ch):
            unigram += 1
        else:
            other += 1
    return UNIGRAM if unigram > other else WHITESPACE


def tokenize(text: str, script_policy: str = AUTO) -> list[str]:
    """Case-fold and segment ``text`` into tokens under the given policy.

    Empty input yields an empty list; no token is ever the empty string.
    """
    if script_policy not in POLICIES:
        raise ValueError(f"unknown script policy: {script_policy!r}")
    folded = text.casefold()
    policy = detect_policy(folded) if script_policy == AUTO else script_policy
    if policy == UNIGRAM:
        return [ch for ch in folded if ch.isalnum()]
    return _WORD_RE.findall(folded)
