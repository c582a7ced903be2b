"""Self-contained ROUGE-1/2/L F1 scoring.

Tokenization lowercases and splits on maximal runs of non-alphanumeric
characters; no stemming is applied. ROUGE-L uses sentence-level LCS over the
full token sequences.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum


# \w minus underscore: Unicode letters and digits.
_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


ZERO_SCORE = RougeScore(0.0, 0.0, 0.0)


class RougeVariant(Enum):
    R1 = "R1"
    R2 = "R2"
    RL = "RL"


def rouge_tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _from_counts(overlap: int, n_candidate: int, n_reference: int) -> RougeScore:
    if n_candidate == 0 or n_reference == 0:
        return ZERO_SCORE
    p = overlap / n_candidate
    r = overlap / n_reference
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return RougeScore(p, r, f1)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram multiset overlap F1, n in {1, 2}."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand = _ngrams(rouge_tokenize(candidate), n)
    ref = _ngrams(rouge_tokenize(reference), n)
    overlap = sum((cand & ref).values())
    return _from_counts(overlap, sum(cand.values()), sum(ref.values()))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """Longest-common-subsequence F1 over the token sequences."""
    cand = rouge_tokenize(candidate)
    ref = rouge_tokenize(reference)
    return _from_counts(_lcs_length(cand, ref), len(cand), len(ref))


def rouge_score(candidate: str, reference: str, variant: RougeVariant) -> RougeScore:
    if variant is RougeVariant.R1:
        return rouge_n(candidate, reference, 1)
    if variant is RougeVariant.R2:
        return rouge_n(candidate, reference, 2)
    return rouge_l(candidate, reference)
