"""Mask-token insertion for downstream inputs, plus a position-sweep harness.

Inserting the pre-training mask into fine-tuning documents lets a model keep
treating summarization as filling the masked slot. Positions are 1-based:
position p splices the token immediately before the p-th sentence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .corpus import AnnotatedDocument


class PositionOutOfRange(Exception):
    """Requested sentence position exceeds the document's sentence count."""


@dataclass(frozen=True)
class ConnectorConfig:
    mask_token: str = "<mask>"
    position: int = 1

    def __post_init__(self):
        if not self.mask_token:
            raise ValueError("mask_token must be non-empty")
        if self.position < 1:
            raise ValueError("position must be at least 1")


def insert_mask(doc: AnnotatedDocument, config: ConnectorConfig) -> str:
    """Document text with mask token + one space spliced before the sentence.

    No clamping: a position past the last sentence raises PositionOutOfRange,
    since silently shifting the mask would corrupt position comparisons.
    """
    if config.position > len(doc.sentences):
        raise PositionOutOfRange(
            f"position {config.position} exceeds {len(doc.sentences)} sentence(s)"
            f" in document {doc.doc_id!r}"
        )
    at = doc.sentences[config.position - 1].start
    raw = doc.encoded()
    return (raw[:at] + config.mask_token.encode("utf-8") + b" " + raw[at:]).decode("utf-8")


@dataclass(frozen=True)
class SweepRow:
    position: int
    score: Optional[float]
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepResult:
    best_position: int
    rows: tuple[SweepRow, ...]


def sweep_positions(
    docs: Sequence[AnnotatedDocument],
    positions: Iterable[int],
    evaluate: Callable[[list[str]], float],
) -> SweepResult:
    """Try each insertion position over the sample and keep the best.

    The callback receives the masked texts and returns a score; higher wins,
    ties go to the smallest position. A failing position is recorded and the
    sweep continues; it errors only if every position fails.
    """
    rows = []
    for position in positions:
        config = ConnectorConfig(position=position)
        try:
            masked = [insert_mask(d, config) for d in docs]
            rows.append(SweepRow(position, float(evaluate(masked))))
        except Exception as exc:
            rows.append(SweepRow(position, None, f"{type(exc).__name__}: {exc}"))
    scored = [r for r in rows if r.score is not None]
    if not scored:
        raise RuntimeError("every sweep position failed")
    best = max(scored, key=lambda r: (r.score, -r.position))
    return SweepResult(best.position, tuple(rows))
