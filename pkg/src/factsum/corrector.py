"""Hallucination detection and summary repair.

A summary entity is hallucinated when no document entity has the same
normalized surface (labels are ignored for detection). Repair strategies:
replace the mention with a label-matched document entity built from a subset
of its words, remove the mention together with its dependency context, or
replace where possible and remove the rest. Every change is recorded as a
byte-range edit; replaying the edits reproduces the corrected text.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .corpus import AnnotatedDocument, EntityMention, SummaryExample, normalize_surface
from .rouge import rouge_tokenize

FACTUAL = "factual"
HALLUCINATED = "hallucinated"

# Heads with these relations get pulled into a removal when their whole
# subtree is already going; children with these relations are spared.
_ABSORBING_HEAD_RELS = frozenset({"pobj", "prep"})
_PROTECTED_CHILD_RELS = frozenset({"compound", "relcl", "fixed"})


class CorrectionStrategy(Enum):
    REPLACE = "replace"
    REMOVE = "remove"
    COMBINED = "combined"


@dataclass(frozen=True)
class HallucinationReport:
    mention: EntityMention
    status: str
    replacement: Optional[EntityMention] = None


@dataclass(frozen=True)
class Edit:
    """One byte-range rewrite of the summary text (new_text empty = delete)."""

    kind: str  # "replace" or "remove"
    start: int
    end: int
    original_text: str
    new_text: str
    removed_token_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class CorrectedSummary:
    text: str
    edits: tuple[Edit, ...]


def detect_hallucinations(example: SummaryExample) -> list[HallucinationReport]:
    """One report per summary entity, with a replacement when one exists."""
    known = {normalize_surface(e.surface) for e in example.document.entities}
    reports = []
    for mention in example.summary.entities:
        if normalize_surface(mention.surface) in known:
            reports.append(HallucinationReport(mention, FACTUAL))
        else:
            replacement = find_replacement(mention, example.document)
            reports.append(HallucinationReport(mention, HALLUCINATED, replacement))
    return reports


def find_replacement(
    mention: EntityMention, doc: AnnotatedDocument
) -> Optional[EntityMention]:
    """Best same-label document entity whose words all occur in the mention.

    Candidates are ranked by word count (more specific wins); ties go to the
    earliest document occurrence.
    """
    mention_words = set(rouge_tokenize(mention.surface))
    best: Optional[EntityMention] = None
    best_size = 0
    for candidate in doc.entities:
        if candidate.label != mention.label:
            continue
        words = set(rouge_tokenize(candidate.surface))
        if not words or not words <= mention_words:
            continue
        if len(words) > best_size:
            best, best_size = candidate, len(words)
    return best


def _children_map(summary: AnnotatedDocument) -> dict[int, list[int]]:
    children: dict[int, list[int]] = {}
    for t in summary.tokens:
        if t.head != t.index:
            children.setdefault(t.head, []).append(t.index)
    return children


def remove_entity_with_deps(mention: EntityMention, summary: AnnotatedDocument) -> frozenset[int]:
    """Token indices to delete for one mention.

    Starts from the mention's tokens, then climbs to heads related as pobj or
    prep once their entire child set is marked, then descends through all
    remaining descendants except compound, relcl, and fixed subtrees.
    """
    tokens = summary.tokens
    children = _children_map(summary)
    removal = set(range(mention.tok_start, mention.tok_end))

    changed = True
    while changed:
        changed = False
        for i in sorted(removal):
            h = tokens[i].head
            if h in removal or tokens[h].deprel not in _ABSORBING_HEAD_RELS:
                continue
            if all(c in removal for c in children.get(h, ())):
                removal.add(h)
                changed = True

    queue = deque(sorted(removal))
    while queue:
        for c in children.get(queue.popleft(), ()):
            if c not in removal and tokens[c].deprel not in _PROTECTED_CHILD_RELS:
                removal.add(c)
                queue.append(c)
    return frozenset(removal)


def _token_runs(indices: set[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for i in sorted(indices):
        if runs and i == runs[-1][-1] + 1:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def correct(example: SummaryExample, strategy: CorrectionStrategy) -> CorrectedSummary:
    """Repair the summary under the given strategy; see the module docstring."""
    summary = example.summary
    raw = summary.encoded()

    replacing: list[tuple[EntityMention, EntityMention]] = []
    removal: set[int] = set()
    for report in detect_hallucinations(example):
        if report.status != HALLUCINATED:
            continue
        use_replace = strategy is not CorrectionStrategy.REMOVE and report.replacement is not None
        if use_replace:
            replacing.append((report.mention, report.replacement))
        elif strategy is not CorrectionStrategy.REPLACE:
            removal |= remove_entity_with_deps(report.mention, summary)

    edits: list[Edit] = []
    for mention, replacement in replacing:
        if set(range(mention.tok_start, mention.tok_end)) & removal:
            continue  # another mention's removal already swallows this span
        s, e = summary.entity_char_span(mention)
        edits.append(Edit("replace", s, e, mention.surface, replacement.surface))

    for run in _token_runs(removal):
        s = summary.tokens[run[0]].start
        e = summary.tokens[run[-1]].end
        while e < len(raw) and raw[e] in b" \t\n":
            e += 1
        if e == len(raw):
            while s > 0 and raw[s - 1] in b" \t\n":
                s -= 1
        edits.append(Edit("remove", s, e, raw[s:e].decode("utf-8"), "", tuple(run)))

    edits.extend(_capitalization_edits(summary, removal, edits))
    edits.sort(key=lambda ed: ed.start)
    for a, b in zip(edits, edits[1:]):
        if b.start < a.end:
            raise RuntimeError(f"overlapping edits at bytes {b.start} and {a.start}")
    return CorrectedSummary(apply_edits(summary.text, edits), tuple(edits))


def _capitalization_edits(
    summary: AnnotatedDocument, removal: set[int], edits: list[Edit]
) -> list[Edit]:
    """Re-capitalize a sentence whose uppercase opening token was removed."""
    raw = summary.encoded()
    out = []
    for sent in summary.sentences:
        if sent.tok_start not in removal:
            continue
        survivors = [i for i in range(sent.tok_start, sent.tok_end) if i not in removal]
        if not survivors:
            continue
        original_first = raw[sent.start : sent.end].decode("utf-8")[0]
        if not original_first.isupper():
            continue
        pos = summary.tokens[survivors[0]].start
        if any(e.start <= pos < e.end for e in edits):
            continue
        first = raw[pos:].decode("utf-8")[0]
        if not first.islower():
            continue
        width = len(first.encode("utf-8"))
        out.append(Edit("replace", pos, pos + width, first, first.upper()))
    return out


def apply_edits(text: str, edits: list[Edit]) -> str:
    """Replay edits right-to-left over the text's UTF-8 bytes."""
    raw = text.encode("utf-8")
    for e in sorted(edits, key=lambda e: e.start, reverse=True):
        raw = raw[: e.start] + e.new_text.encode("utf-8") + raw[e.end :]
    return raw.decode("utf-8")


def remap_spans(
    edits: tuple[Edit, ...], spans: list[tuple[int, int]]
) -> list[Optional[tuple[int, int]]]:
    """Map byte spans of the original text through the edits.

    A span wholly rewritten by a single replace edit maps onto the
    replacement text; a span touched by any other edit maps to None.
    """
    out: list[Optional[tuple[int, int]]] = []
    ordered = sorted(edits, key=lambda e: e.start)
    for s, e in spans:
        delta = 0
        mapped: Optional[tuple[int, int]] = None
        dropped = False
        for edit in ordered:
            width = len(edit.new_text.encode("utf-8"))
            if edit.end <= s:
                delta += width - (edit.end - edit.start)
                continue
            if edit.start >= e:
                break
            if edit.kind == "replace" and (edit.start, edit.end) == (s, e):
                mapped = (s + delta, s + delta + width)
            else:
                dropped = True
            break
        if dropped:
            out.append(None)
        elif mapped is not None:
            out.append(mapped)
        else:
            out.append((s + delta, e + delta))
    return out
