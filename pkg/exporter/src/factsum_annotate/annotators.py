"""Annotation backends that turn plain text into tokens, sentences, labeled
entities, and head/deprel arcs.

Two backends share one output shape: a self-contained rule annotator that
needs no model files, and a thin adapter over any installed statistical
model exposing the usual token/sentence/entity/arc attributes. Offsets here
are character offsets; the exporter converts them to byte offsets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ModelNotAvailable(Exception):
    """The requested annotator backend cannot be loaded."""


@dataclass(frozen=True)
class RawToken:
    text: str
    start: int
    end: int
    head: int  # document-wide token index; the root points at itself
    deprel: str


@dataclass(frozen=True)
class RawEntity:
    start: int  # char span; may fall inside tokens, the exporter expands it
    end: int
    label: str


@dataclass(frozen=True)
class Annotation:
    tokens: tuple[RawToken, ...]
    sentences: tuple[tuple[int, int], ...]  # token index ranges
    entities: tuple[RawEntity, ...]


BUILTIN_MODEL = "rule-en-lite"

_TOKEN_RE = re.compile(r"\w+(?:'\w+)?|[^\w\s]")
_TERMINATORS = frozenset({".", "!", "?"})
_DETERMINERS = frozenset({"the", "a", "an"})
_PREPOSITIONS = frozenset(
    {"in", "on", "at", "with", "of", "for", "from", "to", "by", "after", "before", "during"}
)
_TITLES = frozenset({"mr", "mrs", "ms", "dr", "coach", "president", "professor", "sir"})
_CLOSED_CLASS = _DETERMINERS | _PREPOSITIONS | _TITLES

_WEEKDAYS = frozenset(
    {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"}
)
_MONTHS = frozenset(
    {"January", "February", "March", "April", "May", "June", "July",
     "August", "September", "October", "November", "December"}
)
_RELATIVE_DAYS = frozenset({"today", "yesterday", "tomorrow"})

_GAZETTEER_ENTRIES = [
    ("GPE", ["Seattle", "Denver", "Porto", "Calgary", "London", "Paris", "Madrid",
             "Oslo", "Cairo", "Lagos", "Lima", "Quito", "New York", "San Marino"]),
    ("PERSON", ["Arteta", "Reyes", "Almeida", "Okafor", "Svensson", "Tanaka",
                "José Mora", "Grace Hopper", "Alan Turing"]),
    ("ORG", ["Arsenal", "Everton", "Braga", "Interpol", "Unesco",
             "Acme Corp", "United Nations"]),
]

# first token -> [(token tuple, label)], longest entries first
_GAZETTEER: dict[str, list[tuple[tuple[str, ...], str]]] = {}
for _label, _surfaces in _GAZETTEER_ENTRIES:
    for _surface in _surfaces:
        _parts = tuple(_surface.split())
        _GAZETTEER.setdefault(_parts[0], []).append((_parts, _label))
for _options in _GAZETTEER.values():
    _options.sort(key=lambda item: -len(item[0]))


def _is_word(text: str) -> bool:
    return bool(re.match(r"\w", text))


def _is_year(text: str) -> bool:
    return len(text) == 4 and text.isdigit() and 1900 <= int(text) <= 2099


def _is_cap(text: str) -> bool:
    return text[:1].isupper() and text.isalpha()


def _match_at(words: list[str], i: int) -> tuple[int, str] | None:
    """Longest entity match starting at token i, or None."""
    for parts, label in _GAZETTEER.get(words[i], ()):
        if tuple(words[i : i + len(parts)]) == parts:
            return len(parts), label
    if words[i] == "$" and i + 1 < len(words) and words[i + 1].isdigit():
        return 2, "MONEY"
    if words[i] in _MONTHS:
        if i + 1 < len(words) and words[i + 1].isdigit() and not _is_year(words[i + 1]):
            return 2, "DATE"
        return 1, "DATE"
    if words[i] in _WEEKDAYS or words[i] in _RELATIVE_DAYS or _is_year(words[i]):
        return 1, "DATE"
    if words[i].isdigit():
        return 1, "CARDINAL"
    if _is_cap(words[i]) and i > 0 and words[i - 1].casefold() in _TITLES:
        length = 2 if i + 1 < len(words) and _is_cap(words[i + 1]) else 1
        return length, "PERSON"
    return None


def _match_entities(words: list[str]) -> list[tuple[int, int, str]]:
    found = []
    i = 0
    while i < len(words):
        match = _match_at(words, i)
        if match:
            length, label = match
            found.append((i, i + length, label))
            i += length
        else:
            i += 1
    return found


def _split_sentences(words: list[str]) -> list[tuple[int, int]]:
    ranges = []
    start = 0
    for i, word in enumerate(words):
        if word in _TERMINATORS:
            ranges.append((start, i + 1))
            start = i + 1
    if start < len(words):
        ranges.append((start, len(words)))
    return ranges


def _object_after(j: int, end: int, words: list[str], ent_final: dict[int, int]) -> int | None:
    """First plausible object token after j, pushed to its entity's last token."""
    for k in range(j + 1, end):
        low = words[k].casefold()
        if not _is_word(words[k]) or low in _DETERMINERS or low in _PREPOSITIONS:
            continue
        return ent_final.get(k, k)
    return None


def _attach(
    words: list[str],
    sent_ranges: list[tuple[int, int]],
    entities: list[tuple[int, int, str]],
) -> tuple[list[int], list[str]]:
    """Shallow arcs: one root per sentence, everything reachable from it.

    The scheme only promises a valid tree (self-loop root, no cycles) with
    relations the downstream pruning rules understand: compound inside
    multi-token entities, prep/pobj around prepositions, det and punct.
    """
    heads = list(range(len(words)))
    rels = ["dep"] * len(words)
    ent_final = {}
    ent_member = set()
    for a, b, _label in entities:
        ent_member.update(range(a, b))
        for j in range(a, b - 1):
            ent_final[j] = b - 1

    for start, end in sent_ranges:
        root = next(
            (j for j in range(start, end)
             if _is_word(words[j]) and words[j].casefold() not in _CLOSED_CLASS
             and j not in ent_member),
            None,
        )
        if root is None:
            root = next((j for j in range(start, end) if _is_word(words[j])), start)
        for j in range(start, end):
            low = words[j].casefold()
            if j == root:
                heads[j], rels[j] = j, "root"
            elif j in ent_final:
                heads[j], rels[j] = ent_final[j], "compound"
            elif not _is_word(words[j]):
                heads[j], rels[j] = root, "punct"
            elif low in _DETERMINERS:
                target = _object_after(j, end, words, ent_final)
                heads[j], rels[j] = (target, "det") if target is not None else (root, "dep")
            elif low in _PREPOSITIONS:
                heads[j], rels[j] = root, "prep"
            else:
                heads[j], rels[j] = root, "dep"
        for j in range(start, end):
            if rels[j] != "prep":
                continue
            target = _object_after(j, end, words, ent_final)
            if target is not None and target != root and target != j:
                heads[target], rels[target] = j, "pobj"
    return heads, rels


class RuleAnnotator:
    """Deterministic regex tokenizer + terminator sentence splitter +
    gazetteer/pattern entity matcher + shallow arc attacher."""

    name = BUILTIN_MODEL

    def annotate(self, text: str) -> Annotation:
        spans = [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
        if not spans:
            return Annotation((), (), ())
        words = [w for w, _, _ in spans]
        sent_ranges = _split_sentences(words)
        entities = _match_entities(words)
        heads, rels = _attach(words, sent_ranges, entities)
        tokens = tuple(
            RawToken(word, start, end, heads[i], rels[i])
            for i, (word, start, end) in enumerate(spans)
        )
        raw_entities = tuple(
            RawEntity(spans[a][1], spans[b - 1][2], label) for a, b, label in entities
        )
        return Annotation(tokens, tuple(sent_ranges), raw_entities)


class StatisticalAnnotator:
    """Adapter over an installed pipeline object (tokens with .idx/.head/.dep_,
    .sents, .ents with char spans and .label_)."""

    def __init__(self, nlp, name: str):
        self._nlp = nlp
        self.name = name

    def annotate(self, text: str) -> Annotation:
        doc = self._nlp(text)
        tokens = tuple(
            RawToken(t.text, t.idx, t.idx + len(t.text), t.head.i, t.dep_) for t in doc
        )
        sentences = tuple((span.start, span.end) for span in doc.sents)
        entities = tuple(RawEntity(e.start_char, e.end_char, e.label_) for e in doc.ents)
        return Annotation(tokens, sentences, entities)


def load_annotator(name: str):
    """Resolve a model name to a ready annotator; fail before any input is read."""
    if name == BUILTIN_MODEL:
        return RuleAnnotator()
    try:
        import spacy
    except ImportError as exc:
        raise ModelNotAvailable(
            f"model {name!r} needs the spacy package (only {BUILTIN_MODEL!r} is built in): {exc}"
        ) from exc
    try:
        nlp = spacy.load(name)
    except Exception as exc:
        raise ModelNotAvailable(f"cannot load model {name!r}: {exc}") from exc
    return StatisticalAnnotator(nlp, name)
