"""Word-order-independent lexical distance between sentences.

A sentence is reduced to a bag (multiset) of lowercased tokens; the
distance is the minimal total character-level edit distance over all
ways of matching the two bags, with unmatched words paying their own
length. The optimal matching is solved exactly as a linear assignment.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class WordBag:
    """Multiset of tokens plus the total character count."""

    words: tuple[str, ...]
    total_chars: int

    @classmethod
    def from_words(cls, words) -> "WordBag":
        words = tuple(words)
        return cls(words, sum(len(w) for w in words))


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(sentence: str) -> WordBag:
    """Lowercase, split on whitespace, strip edge punctuation, keep duplicates."""
    out = []
    for raw in sentence.lower().split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if end > start:
            out.append(raw[start:end])
    return WordBag.from_words(out)


def char_edit_distance(w1: str, w2: str) -> int:
    """Levenshtein distance over Unicode scalar values."""
    if w1 == w2:
        return 0
    if len(w1) < len(w2):
        w1, w2 = w2, w1
    if not w2:
        return len(w1)
    previous = list(range(len(w2) + 1))
    for i, c1 in enumerate(w1, start=1):
        current = [i]
        for j, c2 in enumerate(w2, start=1):
            cost = previous[j - 1] + (c1 != c2)
            deletion = previous[j] + 1
            insertion = current[j - 1] + 1
            current.append(min(cost, deletion, insertion))
        previous = current
    return previous[-1]


def bag_assignment_cost(a: WordBag, b: WordBag) -> int:
    """Minimal matching cost between two bags.

    The smaller bag is padded with empty words (matching a word to the
    empty word costs its length, i.e. leaving it unmatched), which makes
    the optimal partial matching expressible as a square assignment.
    """
    wa, wb = a.words, b.words
    k = max(len(wa), len(wb))
    if k == 0:
        return 0
    cost = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        wi = wa[i] if i < len(wa) else ""
        for j in range(k):
            wj = wb[j] if j < len(wb) else ""
            cost[i, j] = char_edit_distance(wi, wj)
    rows, cols = linear_sum_assignment(cost)
    return int(cost[rows, cols].sum())


def lexical_distance(s1: str, s2: str) -> float:
    """Bag-of-words character edit distance on a 0-100 scale.

    Normalized by the larger bag's character count (0/0 is 0) and clamped:
    substitution-heavy matchings can slightly exceed the denominator.
    """
    a, b = tokenize(s1), tokenize(s2)
    denom = max(a.total_chars, b.total_chars)
    if denom == 0:
        return 0.0
    ratio = bag_assignment_cost(a, b) / denom
    return 100.0 * min(max(ratio, 0.0), 1.0)
