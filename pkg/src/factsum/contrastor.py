"""Perturbed negative-summary generation for contrastive training.

Negatives are built by splicing a same-category replacement over one factual
summary entity. Intrinsic mode draws replacements from the document's own
entities; extrinsic mode draws from a corpus-wide entity bank, excluding
anything the document mentions.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .corpus import AnnotatedDocument, EntityMention, SummaryExample, normalize_surface


class EmptyNegativeSetError(Exception):
    """The summary has no factual entities to perturb."""


class NegativeMode(Enum):
    INTRINSIC = "intrinsic"
    EXTRINSIC = "extrinsic"


class EntityCategory(Enum):
    NUMBER = "number"
    DATE = "date"
    NAMED = "named"


_NUMBER_LABELS = frozenset({"MONEY", "QUANTITY", "CARDINAL"})
_DATE_LABELS = frozenset({"DATE", "TIME"})


def categorize(label: str) -> EntityCategory:
    if label in _NUMBER_LABELS:
        return EntityCategory.NUMBER
    if label in _DATE_LABELS:
        return EntityCategory.DATE
    return EntityCategory.NAMED


@dataclass
class EntityBank:
    """Per-category multisets of entity surfaces from a training corpus."""

    counts: dict[EntityCategory, Counter] = field(
        default_factory=lambda: {c: Counter() for c in EntityCategory}
    )

    def add_document(self, doc: AnnotatedDocument) -> None:
        for e in doc.entities:
            if e.surface:
                self.counts[categorize(e.label)][e.surface] += 1

    def merge(self, other: "EntityBank") -> "EntityBank":
        for category, counter in other.counts.items():
            self.counts[category].update(counter)
        return self

    def size(self, category: EntityCategory) -> int:
        return sum(self.counts[category].values())


def harvest_entity_bank(docs: Iterable[AnnotatedDocument]) -> EntityBank:
    bank = EntityBank()
    for doc in docs:
        bank.add_document(doc)
    return bank


@dataclass(frozen=True)
class NegativeSample:
    text: str
    span: tuple[int, int]  # byte range of the perturbed entity in the source summary
    original: str
    replacement: str
    mode: NegativeMode


@dataclass(frozen=True)
class NegativeSet:
    samples: tuple[NegativeSample, ...]
    seed: int
    shortfall: int = 0  # how far below k the candidate space left us


def _factual_entities(example: SummaryExample) -> list[EntityMention]:
    known = {normalize_surface(e.surface) for e in example.document.entities}
    return [m for m in example.summary.entities if normalize_surface(m.surface) in known]


def _candidate_surfaces(
    example: SummaryExample,
    mention: EntityMention,
    mode: NegativeMode,
    bank: Optional[EntityBank],
) -> dict[str, int]:
    """Distinct replacement surfaces with multiset weights."""
    category = categorize(mention.label)
    document_surfaces = {normalize_surface(e.surface) for e in example.document.entities}
    options: Counter = Counter()
    if mode is NegativeMode.INTRINSIC:
        original = normalize_surface(mention.surface)
        for e in example.document.entities:
            if categorize(e.label) is category and normalize_surface(e.surface) != original:
                options[e.surface] += 1
    else:
        for surface, count in bank.counts[category].items():
            if normalize_surface(surface) not in document_surfaces:
                options[surface] += count
    return dict(options)


def _splice(summary: AnnotatedDocument, span: tuple[int, int], replacement: str) -> str:
    raw = summary.encoded()
    return (raw[: span[0]] + replacement.encode("utf-8") + raw[span[1] :]).decode("utf-8")


def generate_negatives(
    example: SummaryExample,
    mode: NegativeMode,
    k: int = 5,
    seed: int = 0,
    bank: Optional[EntityBank] = None,
) -> NegativeSet:
    """Up to k distinct perturbed summaries, deterministic in the seed.

    Each draw picks a factual summary entity uniformly among those that can
    still produce an unseen text, then a weighted same-category replacement.
    Candidates whose splice would duplicate an earlier text are discarded, so
    the result reaches min(k, distinct candidate space) before the retry
    budget runs out on anything but pathological inputs.
    """
    if mode is NegativeMode.EXTRINSIC and bank is None:
        raise ValueError("extrinsic mode requires an entity bank")
    factual = _factual_entities(example)
    if not factual:
        raise EmptyNegativeSetError(
            f"summary of {example.document.doc_id!r} has no factual entities"
        )

    rng = random.Random(seed)
    live: dict[int, dict[str, int]] = {}
    for i, mention in enumerate(factual):
        options = _candidate_surfaces(example, mention, mode, bank)
        if options:
            live[i] = options

    samples: list[NegativeSample] = []
    seen: set[str] = set()
    budget = 10 * k
    while len(samples) < k and live and budget > 0:
        budget -= 1
        i = rng.choice(sorted(live))
        mention = factual[i]
        options = live[i]
        surfaces = sorted(options)
        surface = rng.choices(surfaces, weights=[options[s] for s in surfaces])[0]
        options.pop(surface)
        if not options:
            del live[i]
        span = example.summary.entity_char_span(mention)
        text = _splice(example.summary, span, surface)
        if text in seen:
            continue
        seen.add(text)
        samples.append(NegativeSample(text, span, mention.surface, surface, mode))
    return NegativeSet(tuple(samples), seed, shortfall=k - len(samples))
