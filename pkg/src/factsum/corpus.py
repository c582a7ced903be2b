"""Annotated-corpus data model, line-delimited JSON serialization, and validation.

All character offsets in this schema are byte offsets into the UTF-8 encoding
of the record's text (end-exclusive). A token whose head index equals its own
index is a dependency root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union


class CorpusError(Exception):
    """Base class for corpus reading/validation failures."""


class MalformedLineError(CorpusError):
    """A line is not parseable into the record schema."""

    def __init__(self, line_no: int, field_path: str, message: str):
        super().__init__(f"line {line_no}: {field_path}: {message}")
        self.line_no = line_no
        self.field_path = field_path
        self.message = message


class RecordValidationError(CorpusError):
    """A parsed record violates schema invariants."""

    def __init__(self, line_no: int, doc_id: str, violations: list[str]):
        detail = "; ".join(violations)
        super().__init__(f"line {line_no}: record {doc_id!r} invalid: {detail}")
        self.line_no = line_no
        self.doc_id = doc_id
        self.violations = violations


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    start: int
    end: int
    head: int
    deprel: str


@dataclass(frozen=True)
class SentenceSpan:
    tok_start: int
    tok_end: int
    start: int
    end: int


@dataclass(frozen=True)
class EntityMention:
    tok_start: int
    tok_end: int
    label: str
    surface: str


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    text: str
    tokens: tuple[Token, ...]
    sentences: tuple[SentenceSpan, ...]
    entities: tuple[EntityMention, ...]

    def encoded(self) -> bytes:
        """UTF-8 bytes of ``text``, cached on first use (offsets index into this)."""
        raw = self.__dict__.get("_raw")
        if raw is None:
            raw = self.text.encode("utf-8")
            object.__setattr__(self, "_raw", raw)
        return raw

    def sentence_text(self, i: int) -> str:
        s = self.sentences[i]
        return self.encoded()[s.start : s.end].decode("utf-8")

    def entity_char_span(self, mention: EntityMention) -> tuple[int, int]:
        """Byte span covered by a mention's tokens."""
        return (self.tokens[mention.tok_start].start, self.tokens[mention.tok_end - 1].end)

    def sentence_entities(self, i: int) -> tuple[EntityMention, ...]:
        s = self.sentences[i]
        return tuple(e for e in self.entities if s.tok_start <= e.tok_start < s.tok_end)


@dataclass(frozen=True)
class SummaryExample:
    document: AnnotatedDocument
    summary: AnnotatedDocument


Record = Union[AnnotatedDocument, SummaryExample]


def normalize_surface(s: str) -> str:
    """Case-folded, whitespace-collapsed form used for entity comparisons."""
    return " ".join(s.split()).casefold()


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _validate_document(doc: AnnotatedDocument, prefix: str = "") -> list[str]:
    out: list[str] = []
    if not doc.doc_id:
        out.append(f"{prefix}doc_id empty")
    raw = doc.encoded()
    n_bytes = len(raw)
    n_tok = len(doc.tokens)

    for i, t in enumerate(doc.tokens):
        where = f"{prefix}token[{i}]"
        if t.index != i:
            out.append(f"{where}: index mismatch (got {t.index})")
        if not (0 <= t.start < t.end <= n_bytes):
            out.append(f"{where}: span out of bounds [{t.start},{t.end})")
            continue
        if i > 0 and t.start < doc.tokens[i - 1].end:
            out.append(f"{where}: token overlap with token[{i - 1}]")
        try:
            covered = raw[t.start : t.end].decode("utf-8")
        except UnicodeDecodeError:
            out.append(f"{where}: offset splits multi-byte character")
            continue
        if covered != t.text:
            out.append(f"{where}: token text mismatch ({t.text!r} vs {covered!r})")

    for i, t in enumerate(doc.tokens):
        if not (0 <= t.head < n_tok):
            out.append(f"{prefix}token[{i}]: head out of range ({t.head})")

    # A head walk from every token must terminate at a self-loop root.
    state = [0] * n_tok  # 0 unseen, 1 reaches root, 2 cyclic
    for i in range(n_tok):
        if state[i] or not (0 <= doc.tokens[i].head < n_tok):
            continue
        path = []
        cur = i
        while True:
            if state[cur]:
                verdict = state[cur]
                break
            path.append(cur)
            head = doc.tokens[cur].head
            if not (0 <= head < n_tok):
                verdict = 2
                break
            if head == cur:
                verdict = 1
                break
            if head in path:
                verdict = 2
                break
            cur = head
        for node in path:
            state[node] = verdict
    for i in range(n_tok):
        if state[i] == 2:
            out.append(f"{prefix}token[{i}]: head cycle")

    expected_start = 0
    for j, s in enumerate(doc.sentences):
        where = f"{prefix}sentence[{j}]"
        if s.tok_start != expected_start:
            out.append(f"{where}: sentence partition gap/overlap at token {expected_start}")
        if s.tok_start >= s.tok_end:
            out.append(f"{where}: sentence partition empty range")
        expected_start = s.tok_end
        if 0 <= s.tok_start < s.tok_end <= n_tok:
            tok_lo, tok_hi = doc.tokens[s.tok_start], doc.tokens[s.tok_end - 1]
            if s.start != tok_lo.start or s.end != tok_hi.end:
                out.append(f"{where}: sentence span alignment (chars [{s.start},{s.end}))")
        else:
            out.append(f"{where}: sentence token range out of bounds")
    if doc.tokens and expected_start != n_tok:
        out.append(f"{prefix}sentence partition incomplete: ends at {expected_start} of {n_tok}")

    spans = []
    for j, e in enumerate(doc.entities):
        where = f"{prefix}entity[{j}]"
        if not (0 <= e.tok_start < e.tok_end <= n_tok):
            out.append(f"{where}: entity token range out of bounds")
            continue
        spans.append((e.tok_start, e.tok_end, j))
        lo, hi = doc.tokens[e.tok_start].start, doc.tokens[e.tok_end - 1].end
        try:
            covered = raw[lo:hi].decode("utf-8")
        except UnicodeDecodeError:
            out.append(f"{where}: EntityMention alignment (offset splits character)")
            continue
        if covered != e.surface:
            out.append(f"{where}: EntityMention alignment ({e.surface!r} vs covered {covered!r})")
    spans.sort()
    for (a_lo, a_hi, a_j), (b_lo, b_hi, b_j) in zip(spans, spans[1:]):
        if b_lo < a_hi:
            out.append(f"{prefix}entity[{a_j}]/entity[{b_j}]: entity overlap")
    return out


def validate(record: Record) -> list[str]:
    """Return all invariant violations (empty list means the record is valid)."""
    if isinstance(record, SummaryExample):
        return _validate_document(record.document, "document: ") + _validate_document(
            record.summary, "summary: "
        )
    return _validate_document(record)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _FieldError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(message)
        self.path = path
        self.message = message


def _need(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise _FieldError(f"{path}.{key}", "missing key")
    val = obj[key]
    if kind is int:
        if not isinstance(val, int) or isinstance(val, bool):
            raise _FieldError(f"{path}.{key}", f"expected integer, got {type(val).__name__}")
    elif not isinstance(val, kind):
        raise _FieldError(f"{path}.{key}", f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def _check_keys(obj: dict, allowed: set[str], path: str, strict: bool):
    if strict:
        extra = set(obj) - allowed
        if extra:
            raise _FieldError(f"{path}.{sorted(extra)[0]}", "unknown key in strict mode")


def parse_document(obj, path: str = "$", strict: bool = True) -> AnnotatedDocument:
    if not isinstance(obj, dict):
        raise _FieldError(path, "expected object")
    _check_keys(obj, {"doc_id", "text", "tokens", "sentences", "entities"}, path, strict)
    doc_id = _need(obj, "doc_id", str, path)
    text = _need(obj, "text", str, path)

    tokens = []
    for i, t in enumerate(_need(obj, "tokens", list, path)):
        tp = f"{path}.tokens[{i}]"
        if not isinstance(t, dict):
            raise _FieldError(tp, "expected object")
        _check_keys(t, {"i", "text", "start", "end", "head", "deprel"}, tp, strict)
        tokens.append(
            Token(
                index=_need(t, "i", int, tp),
                text=_need(t, "text", str, tp),
                start=_need(t, "start", int, tp),
                end=_need(t, "end", int, tp),
                head=_need(t, "head", int, tp),
                deprel=_need(t, "deprel", str, tp),
            )
        )

    sentences = []
    for i, s in enumerate(_need(obj, "sentences", list, path)):
        sp = f"{path}.sentences[{i}]"
        if not isinstance(s, dict):
            raise _FieldError(sp, "expected object")
        _check_keys(s, {"tok_start", "tok_end", "start", "end"}, sp, strict)
        sentences.append(
            SentenceSpan(
                tok_start=_need(s, "tok_start", int, sp),
                tok_end=_need(s, "tok_end", int, sp),
                start=_need(s, "start", int, sp),
                end=_need(s, "end", int, sp),
            )
        )

    entities = []
    for i, e in enumerate(_need(obj, "entities", list, path)):
        ep = f"{path}.entities[{i}]"
        if not isinstance(e, dict):
            raise _FieldError(ep, "expected object")
        _check_keys(e, {"tok_start", "tok_end", "label", "surface"}, ep, strict)
        entities.append(
            EntityMention(
                tok_start=_need(e, "tok_start", int, ep),
                tok_end=_need(e, "tok_end", int, ep),
                label=_need(e, "label", str, ep),
                surface=_need(e, "surface", str, ep),
            )
        )
    return AnnotatedDocument(doc_id, text, tuple(tokens), tuple(sentences), tuple(entities))


def parse_record(obj, strict: bool = True) -> Record:
    """Parse a decoded JSON object into a document or document/summary pair."""
    if not isinstance(obj, dict):
        raise _FieldError("$", "expected object")
    if "document" in obj or "summary" in obj:
        _check_keys(obj, {"document", "summary"}, "$", strict)
        doc = parse_document(_need(obj, "document", dict, "$"), "$.document", strict)
        summ = parse_document(_need(obj, "summary", dict, "$"), "$.summary", strict)
        return SummaryExample(doc, summ)
    return parse_document(obj, "$", strict)


def read_corpus(
    source: Union[IO[bytes], Iterable[bytes]],
    strict: bool = True,
    validate_records: bool = True,
) -> Iterator[Record]:
    """Stream records from line-delimited JSON.

    Yields records in file order. Raises :class:`MalformedLineError` for
    unparseable lines (with line number and field path) and
    :class:`RecordValidationError` when a parsed record violates an invariant
    or reuses a doc_id seen earlier in the stream.
    """
    seen_ids: set[str] = set()
    for line_no, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLineError(line_no, "$", f"invalid JSON: {exc.msg}") from exc
        try:
            record = parse_record(obj, strict=strict)
        except _FieldError as exc:
            raise MalformedLineError(line_no, exc.path, exc.message) from exc
        doc_id = record.document.doc_id if isinstance(record, SummaryExample) else record.doc_id
        if validate_records:
            violations = validate(record)
            if doc_id in seen_ids:
                violations.append("doc_id duplicate within corpus")
            if violations:
                raise RecordValidationError(line_no, doc_id, violations)
        seen_ids.add(doc_id)
        yield record


# ---------------------------------------------------------------------------
# Serialization (canonical: fixed key order, no insignificant whitespace)
# ---------------------------------------------------------------------------

def document_to_obj(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "text": doc.text,
        "tokens": [
            {"i": t.index, "text": t.text, "start": t.start, "end": t.end,
             "head": t.head, "deprel": t.deprel}
            for t in doc.tokens
        ],
        "sentences": [
            {"tok_start": s.tok_start, "tok_end": s.tok_end, "start": s.start, "end": s.end}
            for s in doc.sentences
        ],
        "entities": [
            {"tok_start": e.tok_start, "tok_end": e.tok_end, "label": e.label,
             "surface": e.surface}
            for e in doc.entities
        ],
    }


def record_to_obj(record: Record) -> dict:
    if isinstance(record, SummaryExample):
        return {"document": document_to_obj(record.document),
                "summary": document_to_obj(record.summary)}
    return document_to_obj(record)


def dumps_record(record: Record) -> str:
    return json.dumps(record_to_obj(record), ensure_ascii=False, separators=(",", ":"))


def write_corpus(records: Iterable[Record], out: IO[bytes]) -> int:
    """Write records as canonical line-delimited JSON; returns line count."""
    n = 0
    for record in records:
        out.write(dumps_record(record).encode("utf-8"))
        out.write(b"\n")
        n += 1
    return n
