"""Pseudo-summary construction by factuality-aware gap sentence selection.

Each sentence is scored against the rest of the document: a ROUGE F1 term
plus a binary consistency verdict. The top-scoring sentence becomes the
pseudo-summary and is replaced by a mask token in the pseudo-document.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .corpus import AnnotatedDocument
from .rouge import RougeVariant, rouge_score
from .scorer import ScorerInput


class ShortDocumentError(Exception):
    """Raised for documents with fewer than two sentences."""


@dataclass(frozen=True)
class SelectionConfig:
    variant: RougeVariant = RougeVariant.R1
    candidate_pool: int = 5
    mask_token: str = "<mask>"
    skip_short_docs: bool = True

    def __post_init__(self):
        if self.candidate_pool < 1:
            raise ValueError("candidate_pool must be at least 1")
        if not self.mask_token:
            raise ValueError("mask_token must be non-empty")


@dataclass(frozen=True)
class SelectionScore:
    sentence_index: int
    rouge_f1: float
    factuality: Optional[int]  # None = outside the candidate pool, unscored
    combined: float


@dataclass(frozen=True)
class PseudoExample:
    doc_id: str
    pseudo_document: str
    pseudo_summary: str
    selected_index: int
    scores: tuple[SelectionScore, ...] = field(default_factory=tuple)


def score_sentences(doc: AnnotatedDocument, config: SelectionConfig, scorer) -> list[SelectionScore]:
    """Score every sentence against the concatenation of all the others.

    Only the candidate_pool sentences with the highest ROUGE get a
    consistency verdict (ties broken toward the lower index); the rest are
    left unscored and are ineligible for selection.
    """
    n = len(doc.sentences)
    if n < 2:
        raise ShortDocumentError(f"document {doc.doc_id!r} has {n} sentence(s); need at least 2")

    texts = [doc.sentence_text(i) for i in range(n)]
    entities = [tuple(e.surface for e in doc.sentence_entities(i)) for i in range(n)]
    rouges = []
    for i in range(n):
        rest = " ".join(texts[j] for j in range(n) if j != i)
        rouges.append(rouge_score(texts[i], rest, config.variant).f1)

    pool = sorted(range(n), key=lambda i: (-rouges[i], i))[: config.candidate_pool]
    in_pool = set(pool)

    scores = []
    for i in range(n):
        if i in in_pool:
            claim = ScorerInput(texts[i], entities[i])
            rest_text = " ".join(texts[j] for j in range(n) if j != i)
            rest_entities = tuple(s for j in range(n) if j != i for s in entities[j])
            verdict = scorer.score(claim, ScorerInput(rest_text, rest_entities), key=(doc.doc_id, i))
            scores.append(SelectionScore(i, rouges[i], verdict, rouges[i] + verdict))
        else:
            scores.append(SelectionScore(i, rouges[i], None, rouges[i]))
    return scores


def select_gap_sentence(scores: list[SelectionScore]) -> int:
    """Index of the best combined score among sentences holding a verdict."""
    if not scores:
        raise ValueError("empty score list")
    eligible = [s for s in scores if s.factuality is not None]
    if not eligible:
        raise ValueError("no sentence carries a factuality verdict")
    best = max(eligible, key=lambda s: (s.combined, -s.sentence_index))
    return best.sentence_index


def build_pseudo_example(
    doc: AnnotatedDocument,
    selected_index: int,
    mask_token: str,
    scores: tuple[SelectionScore, ...] = (),
) -> PseudoExample:
    """Replace the selected sentence with the mask token, in place."""
    span = doc.sentences[selected_index]
    if mask_token in doc.text:
        raise ValueError(f"document {doc.doc_id!r} already contains the mask token")
    raw = doc.encoded()
    pseudo_document = (raw[: span.start] + mask_token.encode("utf-8") + raw[span.end :]).decode("utf-8")
    return PseudoExample(
        doc_id=doc.doc_id,
        pseudo_document=pseudo_document,
        pseudo_summary=doc.sentence_text(selected_index),
        selected_index=selected_index,
        scores=tuple(scores),
    )


def reconstruct(pseudo_document: str, pseudo_summary: str, mask_token: str) -> str:
    """Undo the masking; inverse of build_pseudo_example on its outputs."""
    return pseudo_document.replace(mask_token, pseudo_summary, 1)


def make_pseudo_example(doc: AnnotatedDocument, config: SelectionConfig, scorer) -> PseudoExample:
    scores = score_sentences(doc, config, scorer)
    chosen = select_gap_sentence(scores)
    return build_pseudo_example(doc, chosen, config.mask_token, tuple(scores))
