"""Hallucination detection and correction tests."""

import random
import re

import pytest

from corpusgen import (
    coaching_example,
    cycling_example,
    doc_from_text,
    doc_from_words,
    planted_example,
    stocks_example,
    tap_water_example,
)
from factsum.corpus import SummaryExample, normalize_surface
from factsum.corrector import (
    FACTUAL,
    HALLUCINATED,
    CorrectionStrategy,
    apply_edits,
    correct,
    detect_hallucinations,
    find_replacement,
    remap_spans,
    remove_entity_with_deps,
)


def normalize_ws(text):
    """Whitespace-normalized comparison form: single spaces, none before
    sentence punctuation."""
    text = re.sub(r"\s+", " ", text).strip()
    return re.sub(r" ([.,;:!?])", r"\1", text)


# ---------------------------------------------------------------------------
# Detection
# ---------------------------------------------------------------------------

def test_detection_statuses():
    reports = detect_hallucinations(coaching_example())
    by_surface = {r.mention.surface: r for r in reports}
    assert by_surface["Arsenal"].status == FACTUAL
    assert by_surface["Mikel Arteta"].status == HALLUCINATED
    assert by_surface["Manchester City"].status == HALLUCINATED


def test_detection_ignores_labels():
    document = doc_from_words("d", [["Oslo", "hosted", "talks", "."]], [(0, 1, "GPE")])
    summary = doc_from_words("d", [["Oslo", "won", "."]], [(0, 1, "ORG")])
    reports = detect_hallucinations(SummaryExample(document, summary))
    assert reports[0].status == FACTUAL


def test_detection_normalizes_surfaces():
    document = doc_from_words("d", [["NEW", "YORK", "grew", "."]], [(0, 2, "GPE")])
    summary = doc_from_words("d", [["new", "york", "grew", "."]], [(0, 2, "GPE")])
    assert detect_hallucinations(SummaryExample(document, summary))[0].status == FACTUAL


def test_detection_empty_summary_entities():
    document = doc_from_words("d", [["Oslo", "hosted", "talks", "."]], [(0, 1, "GPE")])
    summary = doc_from_words("d", [["talks", "were", "held", "."]])
    assert detect_hallucinations(SummaryExample(document, summary)) == []


def test_replacement_attached_only_when_available():
    reports = detect_hallucinations(coaching_example())
    by_surface = {r.mention.surface: r for r in reports}
    assert by_surface["Mikel Arteta"].replacement.surface == "Arteta"
    assert by_surface["Manchester City"].replacement is None
    assert by_surface["Arsenal"].replacement is None


# ---------------------------------------------------------------------------
# Replacement lookup
# ---------------------------------------------------------------------------

def test_find_replacement_requires_label_match():
    doc = doc_from_words(
        "d",
        [["Laidlaw", "spoke", "to", "Laidlaw", "."]],
        [(0, 1, "ORG"), (3, 4, "PERSON")],
    )
    mention = doc_from_words(
        "s", [["Greg", "Laidlaw", "won", "."]], [(0, 2, "PERSON")]
    ).entities[0]
    found = find_replacement(mention, doc)
    assert found is not None and found.label == "PERSON"
    assert found.tok_start == 3


def test_find_replacement_prefers_more_words_then_earliest():
    doc = doc_from_words(
        "d",
        [["Jo", "Ann", "Lee", "met", "Lee", "and", "Jo", "Ann", "."]],
        [(0, 3, "PERSON"), (4, 5, "PERSON"), (6, 8, "PERSON")],
    )
    mention = doc_from_words(
        "s", [["Ms", "Jo", "Ann", "Lee", "Park", "spoke", "."]], [(0, 5, "PERSON")]
    ).entities[0]
    assert find_replacement(mention, doc).surface == "Jo Ann Lee"
    tie_doc = doc_from_words(
        "d2",
        [["Lee", "praised", "Lee", "Park", "."]],
        [(0, 1, "PERSON"), (2, 4, "PERSON")],
    )
    two_word = doc_from_words(
        "s2", [["Mr", "Lee", "Park", "spoke", "."]], [(0, 3, "PERSON")]
    ).entities[0]
    assert find_replacement(two_word, tie_doc).tok_start == 2


def test_find_replacement_requires_word_subset():
    doc = doc_from_words("d", [["Arsenal", "won", "."]], [(0, 1, "ORG")])
    mention = doc_from_words(
        "s", [["Manchester", "City", "lost", "."]], [(0, 2, "ORG")]
    ).entities[0]
    assert find_replacement(mention, doc) is None


# ---------------------------------------------------------------------------
# Dependency-pruned removal
# ---------------------------------------------------------------------------

def test_removal_absorbs_preposition():
    example = coaching_example()
    mention = example.summary.entities[2]  # Manchester City
    removed = remove_entity_with_deps(mention, example.summary)
    texts = [example.summary.tokens[i].text for i in sorted(removed)]
    assert texts == ["at", "Manchester", "City"]


def test_removal_spares_protected_children():
    example = coaching_example()
    mention = example.summary.entities[1]  # Mikel Arteta
    removed = remove_entity_with_deps(mention, example.summary)
    texts = [example.summary.tokens[i].text for i in sorted(removed)]
    assert texts == ["Mikel", "Arteta"]  # compound sibling "midfielder" stays


def test_removal_upward_needs_all_children():
    example = stocks_example()
    mention = example.summary.entities[2]  # feburary, sibling ## must block "tuesday"
    removed = remove_entity_with_deps(mention, example.summary)
    assert [example.summary.tokens[i].text for i in sorted(removed)] == ["feburary"]


def test_removal_climbs_preposition_chains():
    # removing "the net" climbs the bare chain of -> front -> in
    summary = doc_from_text(
        "chain",
        "It landed in front of the net.",
        [[
            ("It", 1, "nsubj"), ("landed", 1, "root"), ("in", 1, "prep"),
            ("front", 2, "pobj"), ("of", 3, "prep"), ("the", 6, "det"),
            ("net", 4, "pobj"), (".", 1, "punct"),
        ]],
        [(5, 7, "FAC")],
    )
    removed = remove_entity_with_deps(summary.entities[0], summary)
    assert [summary.tokens[i].text for i in sorted(removed)] == [
        "in", "front", "of", "the", "net",
    ]


def test_removal_downward_is_transitive():
    summary = doc_from_text(
        "down",
        "Crews met near the old bridge by the river.",
        [[
            ("Crews", 1, "nsubj"), ("met", 1, "root"), ("near", 1, "prep"),
            ("the", 5, "det"), ("old", 5, "amod"), ("bridge", 2, "pobj"),
            ("by", 5, "prep"), ("the", 8, "det"), ("river", 6, "pobj"),
            (".", 1, "punct"),
        ]],
        [(5, 6, "FAC")],
    )
    removed = remove_entity_with_deps(summary.entities[0], summary)
    assert [summary.tokens[i].text for i in sorted(removed)] == [
        "near", "the", "old", "bridge", "by", "the", "river",
    ]


def test_removal_closure_property():
    rng = random.Random(41)
    for i in range(100):
        example, _ = planted_example(rng, f"cl{i}")
        summary = example.summary
        children = {}
        for t in summary.tokens:
            if t.head != t.index:
                children.setdefault(t.head, set()).add(t.index)
        for mention in summary.entities:
            removed = remove_entity_with_deps(mention, summary)
            mention_tokens = set(range(mention.tok_start, mention.tok_end))
            for h in removed - mention_tokens:
                if summary.tokens[h].deprel in ("pobj", "prep"):
                    assert children.get(h, set()) <= removed


# ---------------------------------------------------------------------------
# Full correction strategies
# ---------------------------------------------------------------------------

def test_replace_strategy_output():
    got = correct(coaching_example(), CorrectionStrategy.REPLACE)
    assert normalize_ws(got.text) == (
        "Former Arsenal midfielder Arteta has taken up a coaching role at Manchester City."
    )
    assert [e.kind for e in got.edits] == ["replace"]


def test_remove_strategy_output():
    got = correct(coaching_example(), CorrectionStrategy.REMOVE)
    assert normalize_ws(got.text) == (
        "Former Arsenal midfielder has taken up a coaching role."
    )
    assert all(e.kind == "remove" for e in got.edits)


def test_combined_strategy_output():
    got = correct(coaching_example(), CorrectionStrategy.COMBINED)
    assert normalize_ws(got.text) == (
        "Former Arsenal midfielder Arteta has taken up a coaching role."
    )
    assert sorted(e.kind for e in got.edits) == ["remove", "replace"]


def test_remove_keeps_preexisting_space_before_period():
    got = correct(tap_water_example(), CorrectionStrategy.REMOVE)
    assert got.text == (
        "Tap water in homes has been declared safe to drink, after the discovery"
        " of a parasite at a treatment works left residents boiling water ."
    )


def test_remove_recapitalizes_exposed_sentence_start():
    got = correct(cycling_example(), CorrectionStrategy.REMOVE)
    assert got.text == (
        "Won her second Olympic silver of Rio 2016 by finishing second"
        " in the women's sprint."
    )


def test_remove_keeps_lowercase_sentence_start():
    got = correct(stocks_example(), CorrectionStrategy.REMOVE)
    assert got.text == "summary of stocks news on tuesday ##"


def test_factual_only_summary_untouched():
    document = doc_from_words("d", [["Oslo", "hosted", "talks", "."]], [(0, 1, "GPE")])
    summary = doc_from_words("d", [["Oslo", "talks", "held", "."]], [(0, 1, "GPE")])
    example = SummaryExample(document, summary)
    for strategy in CorrectionStrategy:
        got = correct(example, strategy)
        assert got.text == summary.text
        assert got.edits == ()


def test_replace_leaves_unreplaceable_intact():
    got = correct(coaching_example(), CorrectionStrategy.REPLACE)
    assert "Manchester City" in got.text


def test_edit_replay_matches_text():
    rng = random.Random(43)
    original = coaching_example().summary.text
    for strategy in CorrectionStrategy:
        got = correct(coaching_example(), strategy)
        assert apply_edits(original, list(got.edits)) == got.text
    for i in range(100):
        example, _ = planted_example(rng, f"replay{i}")
        for strategy in CorrectionStrategy:
            got = correct(example, strategy)
            assert apply_edits(example.summary.text, list(got.edits)) == got.text


def test_factual_mentions_never_edited():
    rng = random.Random(47)
    for i in range(100):
        example, _ = planted_example(rng, f"keep{i}")
        summary = example.summary
        factual = [
            summary.entity_char_span(r.mention)
            for r in detect_hallucinations(example)
            if r.status == FACTUAL
        ]
        for strategy in CorrectionStrategy:
            got = correct(example, strategy)
            for s, e in factual:
                for ed in got.edits:
                    assert ed.end <= s or ed.start >= e


def test_combined_leaves_no_hallucinations():
    rng = random.Random(53)
    checked = 0
    for i in range(200):
        example, planted = planted_example(rng, f"full{i}")
        assert planted >= 1
        got = correct(example, CorrectionStrategy.COMBINED)
        summary = example.summary
        spans = [summary.entity_char_span(m) for m in summary.entities]
        mapped = remap_spans(got.edits, spans)
        corrected_raw = got.text.encode("utf-8")
        known = {normalize_surface(e.surface) for e in example.document.entities}
        for span in mapped:
            if span is None:
                continue
            surface = corrected_raw[span[0] : span[1]].decode("utf-8")
            assert normalize_surface(surface) in known
            checked += 1
    assert checked > 100


def test_remap_spans_shift_and_drop():
    got = correct(coaching_example(), CorrectionStrategy.COMBINED)
    summary = coaching_example().summary
    spans = [summary.entity_char_span(m) for m in summary.entities]
    mapped = remap_spans(got.edits, spans)
    raw = got.text.encode("utf-8")
    assert raw[mapped[0][0] : mapped[0][1]].decode("utf-8") == "Arsenal"
    assert raw[mapped[1][0] : mapped[1][1]].decode("utf-8") == "Arteta"
    assert mapped[2] is None  # removed along with its preposition


def test_multisentence_summaries_corrected_independently():
    document = doc_from_words("d", [["Crews", "met", "."]])
    summary = doc_from_text(
        "d",
        "Rania spoke. Omar led the talks.",
        [
            [("Rania", 1, "nsubj"), ("spoke", 1, "root"), (".", 1, "punct")],
            [("Omar", 1, "nsubj"), ("led", 1, "root"), ("the", 3, "det"),
             ("talks", 1, "dobj"), (".", 1, "punct")],
        ],
        [(0, 1, "PERSON"), (3, 4, "PERSON")],
    )
    got = correct(SummaryExample(document, summary), CorrectionStrategy.REMOVE)
    assert got.text == "Spoke. Led the talks."
