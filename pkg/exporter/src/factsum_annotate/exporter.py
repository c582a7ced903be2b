"""Raw text to annotated-corpus conversion with a built-in schema self-check.

Raw records are line-delimited JSON objects `{"doc_id", "text", "summary"?}`.
Annotators report character offsets; everything downstream speaks UTF-8 byte
offsets, and that conversion happens here so backends stay offset-agnostic.
Every record is validated before it is written; a failure aborts the export,
since it signals a bug rather than bad input.
"""

from __future__ import annotations

import json
import sys
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Union

from factsum import (
    AnnotatedDocument,
    EntityMention,
    SentenceSpan,
    SummaryExample,
    Token,
    dumps_record,
    parse_record,
    validate,
)

from .annotators import Annotation


class ExportAbort(Exception):
    """An emitted record failed validation; the export must not continue."""

    def __init__(self, doc_id: str, violations: list[str]):
        self.doc_id = doc_id
        self.violations = violations
        summary = violations[0] if violations else "unknown violation"
        more = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
        super().__init__(f"record {doc_id!r} failed self-check: {summary}{more}")


@dataclass
class ExportReport:
    exported: int = 0
    skipped: int = 0
    reasons: Counter = field(default_factory=Counter)

    def to_obj(self) -> dict:
        return {
            "exported": self.exported,
            "skipped": self.skipped,
            "skip_reasons": dict(sorted(self.reasons.items())),
        }


def _byte_offsets(text: str) -> list[int]:
    """Prefix table: byte offset of each character boundary (length + 1 entries)."""
    table = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        table.append(total)
    return table


def build_document(doc_id: str, text: str, ann: Annotation) -> AnnotatedDocument:
    """Assemble a schema document from char-offset annotations.

    Entity char spans are expanded to the tokens they touch; expanded spans
    that collide keep the earliest-starting, then longest, mention.
    """
    table = _byte_offsets(text)
    tokens = tuple(
        Token(i, rt.text, table[rt.start], table[rt.end], rt.head, rt.deprel)
        for i, rt in enumerate(ann.tokens)
    )
    sentences = tuple(
        SentenceSpan(a, b, tokens[a].start, tokens[b - 1].end) for a, b in ann.sentences
    )

    starts = [rt.start for rt in ann.tokens]
    ends = [rt.end for rt in ann.tokens]
    spans = []
    for ent in ann.entities:
        a = bisect_right(ends, ent.start)
        b = bisect_left(starts, ent.end)
        if a < b:
            spans.append((a, b, ent.label))
    spans.sort(key=lambda s: (s[0], -s[1]))
    mentions = []
    covered_to = 0
    for a, b, label in spans:
        if a < covered_to:
            continue
        surface = text[ann.tokens[a].start : ann.tokens[b - 1].end]
        mentions.append(EntityMention(a, b, label, surface))
        covered_to = b
    return AnnotatedDocument(doc_id, text, tokens, sentences, tuple(mentions))


Record = Union[AnnotatedDocument, SummaryExample]


def annotate_record(
    annotator, obj, pairs: bool = False
) -> tuple[Optional[Record], Optional[str]]:
    """Annotate one raw object; returns (record, None) or (None, skip reason)."""
    if not isinstance(obj, dict):
        return None, "bad-record"
    doc_id = obj.get("doc_id")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        return None, "bad-record"
    if not isinstance(text, str) or not text.strip():
        return None, "bad-record"
    summary = obj.get("summary")
    if summary is not None and (not isinstance(summary, str) or not summary.strip()):
        return None, "bad-record"
    if pairs and summary is None:
        return None, "missing-summary"

    doc_ann = annotator.annotate(text)
    if not doc_ann.tokens:
        return None, "empty-annotation"
    document = build_document(doc_id, text, doc_ann)
    if summary is None:
        return document, None
    sum_ann = annotator.annotate(summary)
    if not sum_ann.tokens:
        return None, "empty-annotation"
    return SummaryExample(document, build_document(f"{doc_id}-summary", summary, sum_ann)), None


def export_stream(
    annotator,
    lines: Iterable[str],
    out: IO[str],
    pairs: bool = False,
    log: IO[str] = sys.stderr,
) -> ExportReport:
    """Annotate a raw stream in input order, skipping records that cannot be
    annotated and aborting if an annotated record fails validation."""
    report = ExportReport()
    seen_ids: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            obj = None
            record, reason = None, "bad-json"
        else:
            record, reason = annotate_record(annotator, obj, pairs)
        doc_id = "?"
        if record is not None:
            doc_id = record.document.doc_id if isinstance(record, SummaryExample) else record.doc_id
            if doc_id in seen_ids:
                record, reason = None, "duplicate-doc-id"
        elif isinstance(obj, dict) and isinstance(obj.get("doc_id"), str):
            doc_id = obj["doc_id"]
        if record is None:
            report.skipped += 1
            report.reasons[reason] += 1
            print(f"skipped line {line_no} ({doc_id}): {reason}", file=log)
            continue
        violations = validate(record)
        if violations:
            raise ExportAbort(doc_id, violations)
        seen_ids.add(doc_id)
        out.write(dumps_record(record))
        out.write("\n")
        report.exported += 1
    return report


def check_stream(lines: Iterable[str], out: IO[str]) -> tuple[int, int, int]:
    """Validate an annotated stream under the corpus schema rules.

    Writes one line per violation and returns
    (records seen, invalid records, total violations).
    """
    seen_ids: set[str] = set()
    records = invalid = total = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        records += 1
        record = None
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems = [f"invalid JSON: {exc.msg}"]
        else:
            try:
                record = parse_record(obj)
            except Exception as exc:
                path = getattr(exc, "path", None)
                message = getattr(exc, "message", None)
                problems = [f"{path}: {message}" if path and message else str(exc)]
        if record is not None:
            problems = validate(record)
            doc_id = record.document.doc_id if isinstance(record, SummaryExample) else record.doc_id
            if doc_id in seen_ids:
                problems.append("doc_id duplicate within corpus")
            seen_ids.add(doc_id)
        if problems:
            invalid += 1
            total += len(problems)
            for problem in problems:
                out.write(f"line {line_no}: {problem}\n")
    return records, invalid, total
