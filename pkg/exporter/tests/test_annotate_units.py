"""Unit tests for the built-in rule annotator and document assembly."""

import pytest

from factsum import validate

from factsum_annotate import (
    Annotation,
    BUILTIN_MODEL,
    ModelNotAvailable,
    RawEntity,
    RawToken,
    RuleAnnotator,
    build_document,
    load_annotator,
)


@pytest.fixture(scope="module")
def annotator():
    return RuleAnnotator()


def test_token_char_offsets_slice_back(annotator):
    text = "A naïve café opened , saying don't stop ."
    ann = annotator.annotate(text)
    assert [t.text for t in ann.tokens] == [
        "A", "naïve", "café", "opened", ",", "saying", "don't", "stop", ".",
    ]
    for tok in ann.tokens:
        assert text[tok.start : tok.end] == tok.text


def test_sentences_partition_tokens(annotator):
    ann = annotator.annotate("One went home . Two stayed ! Did three leave ? tail words")
    assert ann.sentences == ((0, 4), (4, 7), (7, 11), (11, 13))


def test_empty_and_whitespace_only_text(annotator):
    assert annotator.annotate("") == Annotation((), (), ())
    assert annotator.annotate("   \n\t ") == Annotation((), (), ())


def entity_surfaces(annotator, text):
    ann = annotator.annotate(text)
    return [
        (text[e.start : e.end], e.label)
        for e in ann.entities
    ]


def test_gazetteer_prefers_longest_match(annotator):
    got = entity_surfaces(annotator, "They flew from New York to Porto .")
    assert got == [("New York", "GPE"), ("Porto", "GPE")]


def test_pattern_entities(annotator):
    got = entity_surfaces(
        annotator, "On March 5 the fee rose to $ 70 , then 12 more by 2019 ."
    )
    assert got == [
        ("March 5", "DATE"),
        ("$ 70", "MONEY"),
        ("12", "CARDINAL"),
        ("2019", "DATE"),
    ]


def test_title_introduces_person(annotator):
    assert entity_surfaces(annotator, "Coach Ana Quill spoke early today .") == [
        ("Ana Quill", "PERSON"),
        ("today", "DATE"),
    ]


def test_arcs_are_valid_trees_with_expected_relations(annotator):
    text = "Coach Almeida met José Mora in New York on Friday ."
    doc = build_document("arcs", text, annotator.annotate(text))
    assert validate(doc) == []
    rel = {t.text: t.deprel for t in doc.tokens}
    assert rel["met"] == "root"
    assert rel["in"] == "prep" and rel["York"] == "pobj"
    assert rel["New"] == "compound"
    assert rel["."] == "punct"


def test_determiner_attaches_to_following_object(annotator):
    text = "The report blamed the United Nations ."
    doc = build_document("det", text, annotator.annotate(text))
    assert validate(doc) == []
    by_text = {t.text: t for t in doc.tokens}
    assert by_text["The"].deprel == "det"
    assert doc.tokens[by_text["The"].head].text == "report"
    # the second determiner skips into the entity and lands on its last token
    assert doc.tokens[by_text["the"].head].text == "Nations"


def test_annotation_is_deterministic(annotator):
    text = "Reyes signed a deal with Braga for $ 40 on Friday ."
    assert annotator.annotate(text) == annotator.annotate(text)


def test_build_document_uses_byte_offsets():
    text = "José visited a café ."
    doc = build_document("bytes", text, RuleAnnotator().annotate(text))
    assert validate(doc) == []
    raw = text.encode("utf-8")
    for tok in doc.tokens:
        assert raw[tok.start : tok.end].decode("utf-8") == tok.text
    # é is two bytes, so byte ends outrun char ends
    assert doc.tokens[0].end == 5
    assert doc.text[:4] == "José"


def test_subtoken_entity_span_expands_to_covering_tokens():
    text = "Westbrook stadium"
    tokens = (
        RawToken("Westbrook", 0, 9, 1, "compound"),
        RawToken("stadium", 10, 17, 1, "root"),
    )
    ann = Annotation(tokens, ((0, 2),), (RawEntity(4, 12, "FAC"),))
    doc = build_document("sub", text, ann)
    assert validate(doc) == []
    assert len(doc.entities) == 1
    assert doc.entities[0].tok_start == 0 and doc.entities[0].tok_end == 2
    assert doc.entities[0].surface == "Westbrook stadium"


def test_overlapping_expansions_keep_earliest_then_longest():
    text = "alpha beta gamma"
    tokens = (
        RawToken("alpha", 0, 5, 0, "root"),
        RawToken("beta", 6, 10, 0, "dep"),
        RawToken("gamma", 11, 16, 0, "dep"),
    )
    ann = Annotation(
        tokens,
        ((0, 3),),
        (
            RawEntity(0, 8, "ORG"),   # expands over alpha beta
            RawEntity(7, 16, "GPE"),  # expands over beta gamma; collides
        ),
    )
    doc = build_document("overlap", text, ann)
    assert validate(doc) == []
    assert [(e.surface, e.label) for e in doc.entities] == [("alpha beta", "ORG")]


def test_entity_outside_tokens_is_dropped():
    text = "word   "
    ann = Annotation(
        (RawToken("word", 0, 4, 0, "root"),),
        ((0, 1),),
        (RawEntity(5, 6, "GPE"),),
    )
    doc = build_document("outside", text, ann)
    assert doc.entities == ()
    assert validate(doc) == []


def test_load_annotator_builtin_and_unknown():
    assert load_annotator(BUILTIN_MODEL).name == BUILTIN_MODEL
    with pytest.raises(ModelNotAvailable):
        load_annotator("no-such-model-anywhere")
