"""Streaming orchestration of the corpus transformations.

Stages are pure per-record functions chained over line-delimited JSON. A
producer feeds a worker pool through a bounded window and an order-restoring
sink writes results, so output order always equals input order and a run is
byte-identical no matter how many workers execute it.
"""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Iterator, Optional, Union

from .connector import ConnectorConfig, PositionOutOfRange, insert_mask
from .contrastor import (
    EmptyNegativeSetError,
    EntityBank,
    NegativeMode,
    generate_negatives,
)
from .corpus import (
    AnnotatedDocument,
    MalformedLineError,
    Record,
    RecordValidationError,
    SummaryExample,
    _FieldError,
    parse_record,
    record_to_obj,
    validate,
)
from .corrector import (
    HALLUCINATED,
    CorrectionStrategy,
    correct,
    detect_hallucinations,
    remap_spans,
)
from .gsg import SelectionConfig, ShortDocumentError, make_pseudo_example
from .scorer import ScorerError


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


class DataError(Exception):
    """Input that violates the data contract; maps to exit code 2."""


class RecordSkip(Exception):
    """A stage declining one record for a benign, countable reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class StageFailure(Exception):
    """Hard stage error annotated with the stage name and record identity."""

    def __init__(self, stage: str, doc_id: str, cause: Exception):
        super().__init__(f"stage {stage}: document {doc_id!r}: {cause}")
        self.stage = stage
        self.doc_id = doc_id
        self.cause = cause


# Enrichment keys a stage may add to a record envelope. They are stripped
# before schema parsing so stage outputs stay readable as stage inputs.
EXTRA_KEYS = ("corrected", "edits", "connected_text")

TERMINAL_STAGES = ("pretrain-data", "negatives")
CHAIN_STAGES = ("correct", "connect")


@dataclass
class PipeRecord:
    line_no: int
    record: Record
    extras: dict = field(default_factory=dict)
    side: dict = field(default_factory=dict)  # sink-only artifacts (report rows)

    @property
    def doc_id(self) -> str:
        rec = self.record
        return rec.doc_id if isinstance(rec, AnnotatedDocument) else rec.document.doc_id

    def document_side(self) -> AnnotatedDocument:
        rec = self.record
        return rec if isinstance(rec, AnnotatedDocument) else rec.document


StageFn = Callable[[PipeRecord, Counter], Union[PipeRecord, dict]]


def derive_seed(base_seed: int, doc_id: str) -> int:
    """Per-record seed, stable across record order and worker count."""
    digest = hashlib.sha256(f"{base_seed}:{doc_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def dumps_obj(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def iter_pipe_records(
    stream: Iterable[str], strict: bool = True
) -> Iterator[Union[PipeRecord, Exception]]:
    """Parse and validate records, yielding errors instead of raising them.

    Yielding lets the caller apply the skip/abort policy per line while the
    stream keeps its position.
    """
    seen: dict[str, int] = {}
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield MalformedLineError(line_no, "$", f"invalid JSON: {exc.msg}")
            continue
        extras = {}
        if isinstance(obj, dict):
            for key in EXTRA_KEYS:
                if key in obj:
                    extras[key] = obj.pop(key)
        try:
            record = parse_record(obj, strict=strict)
        except _FieldError as exc:
            yield MalformedLineError(line_no, exc.path, exc.message)
            continue
        violations = validate(record)
        doc_id = (
            record.doc_id
            if isinstance(record, AnnotatedDocument)
            else record.document.doc_id
        )
        if doc_id in seen:
            violations.append(f"duplicate doc_id (first seen on line {seen[doc_id]})")
        else:
            seen[doc_id] = line_no
        if violations:
            yield RecordValidationError(line_no, doc_id, violations)
            continue
        yield PipeRecord(line_no, record, extras)


def _require_example(pr: PipeRecord, stage: str) -> SummaryExample:
    if not isinstance(pr.record, SummaryExample):
        raise DataError(
            f"stage {stage}: document {pr.doc_id!r} has no summary side"
        )
    return pr.record


def build_pretrain_stage(config: SelectionConfig, scorer) -> StageFn:
    def stage(pr: PipeRecord, counters: Counter) -> dict:
        doc = pr.document_side()
        if config.mask_token in doc.text:
            raise DataError(
                f"document {doc.doc_id!r} already contains the mask token"
            )
        try:
            pseudo = make_pseudo_example(doc, config, scorer)
        except ShortDocumentError as exc:
            raise RecordSkip("short_document") from exc
        return {
            "doc_id": pseudo.doc_id,
            "pseudo_document": pseudo.pseudo_document,
            "pseudo_summary": pseudo.pseudo_summary,
            "selected_index": pseudo.selected_index,
            "scores": [
                {
                    "i": s.sentence_index,
                    "rouge": s.rouge_f1,
                    "factcc": s.factuality,
                    "combined": s.combined,
                }
                for s in pseudo.scores
            ],
        }

    return stage


def build_correct_stage(strategy: CorrectionStrategy, want_report: bool) -> StageFn:
    def stage(pr: PipeRecord, counters: Counter) -> PipeRecord:
        example = _require_example(pr, "correct")
        reports = detect_hallucinations(example)
        corrected = correct(example, strategy)
        hallucinated = [r for r in reports if r.status == HALLUCINATED]
        counters["correct!hallucinated_mentions"] += len(hallucinated)
        if strategy is not CorrectionStrategy.REMOVE:
            counters["correct!replaced_mentions"] += sum(
                1 for r in hallucinated if r.replacement is not None
            )
        if strategy is not CorrectionStrategy.REPLACE:
            counters["correct!removed_mentions"] += sum(
                1
                for r in hallucinated
                if strategy is CorrectionStrategy.REMOVE or r.replacement is None
            )
        if corrected.edits:
            counters["correct!records_changed"] += 1

        spans = [example.summary.entity_char_span(m) for m in example.summary.entities]
        mapped = remap_spans(corrected.edits, spans)
        raw = corrected.text.encode("utf-8")
        entities = []
        for mention, span in zip(example.summary.entities, mapped):
            if span is None:
                continue
            s, e = span
            entities.append(
                {
                    "start": s,
                    "end": e,
                    "label": mention.label,
                    "surface": raw[s:e].decode("utf-8"),
                }
            )
        pr.extras["corrected"] = {"text": corrected.text, "entities": entities}
        pr.extras["edits"] = [
            {
                "kind": e.kind,
                "range": [e.start, e.end],
                "original": e.original_text,
                "new": e.new_text,
                "tokens": list(e.removed_token_indices),
            }
            for e in corrected.edits
        ]
        if want_report:
            pr.side["report_rows"] = [
                (
                    pr.doc_id,
                    r.mention.surface,
                    r.status,
                    r.replacement.surface if r.replacement else "",
                )
                for r in reports
            ]
        return pr

    return stage


def build_negatives_stage(
    mode: NegativeMode, k: int, base_seed: int, bank: Optional[EntityBank]
) -> StageFn:
    def stage(pr: PipeRecord, counters: Counter) -> dict:
        example = _require_example(pr, "negatives")
        seed = derive_seed(base_seed, pr.doc_id)
        try:
            negatives = generate_negatives(example, mode, k=k, seed=seed, bank=bank)
        except EmptyNegativeSetError as exc:
            raise RecordSkip("no_factual_entities") from exc
        if negatives.shortfall:
            counters["negatives!short_sets"] += 1
        counters["negatives!samples"] += len(negatives.samples)
        return {
            "doc_id": pr.doc_id,
            "mode": mode.value,
            "seed": seed,
            "negatives": [
                {
                    "text": s.text,
                    "span": list(s.span),
                    "original": s.original,
                    "replacement": s.replacement,
                }
                for s in negatives.samples
            ],
        }

    return stage


def build_connect_stage(config: ConnectorConfig) -> StageFn:
    def stage(pr: PipeRecord, counters: Counter) -> PipeRecord:
        doc = pr.document_side()
        if config.mask_token in doc.text:
            raise DataError(
                f"document {doc.doc_id!r} already contains the mask token"
            )
        try:
            pr.extras["connected_text"] = insert_mask(doc, config)
        except PositionOutOfRange as exc:
            raise DataError(str(exc)) from exc
        return pr

    return stage


def envelope_obj(pr: PipeRecord) -> dict:
    obj = record_to_obj(pr.record)
    for key in EXTRA_KEYS:
        if key in pr.extras:
            obj[key] = pr.extras[key]
    return obj


@dataclass
class StageReport:
    name: str
    records_in: int
    records_out: int
    skipped: int
    detail: dict

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "in": self.records_in,
            "out": self.records_out,
            "skipped": self.skipped,
            "detail": dict(sorted(self.detail.items())),
        }


@dataclass
class RunReport:
    stages: list[StageReport]
    wall_seconds: float

    def to_obj(self) -> dict:
        return {
            "stages": [s.to_obj() for s in self.stages],
            "wall_seconds": round(self.wall_seconds, 6),
        }

    def stage(self, name: str) -> StageReport:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def _ordered_parallel(fn, items: Iterable, workers: int) -> Iterator:
    """Map fn over items with a pool, yielding results in submit order.

    In-flight futures are capped at workers*4 so arbitrarily long corpora
    hold only a bounded window in memory.
    """
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    window = workers * 4
    pending: deque = deque()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for item in items:
            pending.append(pool.submit(fn, item))
            while len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def run_stages(
    records: Iterable[Union[PipeRecord, Exception]],
    stages: list[tuple[str, StageFn]],
    out: IO[str],
    workers: int = 1,
    on_error: str = "abort",
    side_hook: Optional[Callable[[dict], None]] = None,
) -> RunReport:
    """Drive records through the stage chain and write one JSON line each.

    in = out + skipped holds for every stage; hard errors either abort with
    the offending stage and doc_id attached or are counted as skips,
    depending on on_error.
    """
    if on_error not in ("skip", "abort"):
        raise UsageError(f"unknown on-error policy {on_error!r}")
    started = time.perf_counter()
    totals: Counter = Counter()

    def process(item):
        counters: Counter = Counter()
        if isinstance(item, Exception):
            counters["input!in"] += 1
            if on_error == "abort":
                raise item
            counters["input!skipped"] += 1
            counters["input!skip_error"] += 1
            return None, counters, {}
        counters["input!in"] += 1
        counters["input!out"] += 1
        current = item
        final: Optional[dict] = None
        for name, stage in stages:
            counters[f"{name}!in"] += 1
            try:
                result = stage(current, counters)
            except RecordSkip as skip:
                counters[f"{name}!skipped"] += 1
                counters[f"{name}!skip_{skip.reason}"] += 1
                return None, counters, current.side
            except (DataError, ScorerError) as exc:
                if on_error == "abort":
                    raise StageFailure(name, current.doc_id, exc) from exc
                counters[f"{name}!skipped"] += 1
                counters[f"{name}!skip_error"] += 1
                return None, counters, current.side
            counters[f"{name}!out"] += 1
            if isinstance(result, dict):
                final = result
                break
            current = result
        obj = final if final is not None else envelope_obj(current)
        return obj, counters, current.side

    for obj, counters, side in _ordered_parallel(process, records, workers):
        totals.update(counters)
        if side and side_hook is not None:
            side_hook(side)
        if obj is not None:
            out.write(dumps_obj(obj) + "\n")

    names = ["input"] + [name for name, _ in stages]
    reports = []
    for name in names:
        detail = {
            key.split("!", 1)[1]: count
            for key, count in totals.items()
            if key.startswith(name + "!")
            and key.split("!", 1)[1] not in ("in", "out", "skipped")
        }
        reports.append(
            StageReport(
                name,
                totals.get(f"{name}!in", 0),
                totals.get(f"{name}!out", 0),
                totals.get(f"{name}!skipped", 0),
                detail,
            )
        )
    return RunReport(reports, time.perf_counter() - started)


def corpus_stats(records: Iterable[Union[PipeRecord, Exception]]) -> dict:
    """Corpus-level counts: records, sentences, entities per label,
    hallucinated summary mentions. Both sides of a pair are counted."""
    records_n = documents = summaries = sentences = 0
    entities: Counter = Counter()
    hallucinated = 0
    for item in records:
        if isinstance(item, Exception):
            raise item
        records_n += 1
        documents += 1
        sides = [item.document_side()]
        if isinstance(item.record, SummaryExample):
            summaries += 1
            sides.append(item.record.summary)
            hallucinated += sum(
                1
                for r in detect_hallucinations(item.record)
                if r.status == HALLUCINATED
            )
        for side in sides:
            sentences += len(side.sentences)
            entities.update(m.label for m in side.entities)
    return {
        "records": records_n,
        "documents": documents,
        "summaries": summaries,
        "sentences": sentences,
        "entities": dict(sorted(entities.items())),
        "hallucinated_entities": hallucinated,
    }


def validate_stream(stream: Iterable[str], strict: bool, out: IO[str]) -> tuple[int, int]:
    """Report every violation; returns (records seen, records invalid)."""
    seen = 0
    invalid = 0
    for item in iter_pipe_records(stream, strict=strict):
        seen += 1
        if isinstance(item, MalformedLineError):
            invalid += 1
            out.write(f"line {item.line_no}: {item.field_path}: {item.message}\n")
        elif isinstance(item, RecordValidationError):
            invalid += 1
            for violation in item.violations:
                out.write(f"line {item.line_no} ({item.doc_id}): {violation}\n")
        elif isinstance(item, Exception):
            raise item
    return seen, invalid
