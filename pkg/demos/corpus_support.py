"""Tiny corpus builders shared by the demo scripts.

Real corpora come from an annotation exporter; demos hand-roll a few
documents so every script runs offline and deterministically.
"""

from factsum import AnnotatedDocument, EntityMention, SentenceSpan, SummaryExample, Token


def doc(doc_id, sentences, entities=(), deprels=None):
    """Build a document from sentence word lists.

    Words are joined with single spaces. The first token of each sentence is
    the root; all others attach to it. `entities` rows are
    (token_start, token_end, label) over document-wide token indices.
    `deprels` optionally overrides arcs: {token_index: (head_index, relation)}.
    """
    deprels = deprels or {}
    tokens, spans, text_parts = [], [], []
    offset = 0
    index = 0
    for words in sentences:
        sent_start_tok = index
        sent_start_byte = offset
        root = index
        for j, word in enumerate(words):
            raw = word.encode("utf-8")
            head, rel = (root, "dep") if j else (index, "root")
            if index in deprels:
                head, rel = deprels[index]
            tokens.append(Token(index, word, offset, offset + len(raw), head, rel))
            offset += len(raw) + 1
            index += 1
        offset -= 1  # no trailing space inside the sentence
        spans.append(SentenceSpan(sent_start_tok, index, sent_start_byte, offset))
        text_parts.append(" ".join(words))
        offset += 1  # the joining space between sentences
    text = " ".join(text_parts)
    mentions = tuple(
        EntityMention(a, b, label, " ".join(w.text for w in tokens[a:b]))
        for a, b, label in entities
    )
    return AnnotatedDocument(doc_id, text, tuple(tokens), tuple(spans), mentions)


def storm_report():
    """Three-sentence weather report; the odd sentence out names Calgary,
    which appears nowhere else in the document."""
    return doc(
        "storm-report",
        [
            "A heavy storm swept through Porto on Friday .".split(),
            "Porto crews said on Friday the storm had passed .".split(),
            "A heavy storm swept through Calgary and the storm had passed .".split(),
        ],
        [
            (5, 6, "GPE"), (7, 8, "DATE"),
            (9, 10, "GPE"), (13, 14, "DATE"),
            (24, 25, "GPE"),
        ],
    )


def transfer_example():
    """Document/summary pair whose summary names one entity the document
    supports partially (Ana Reyes vs Reyes) and one it does not (Leeds)."""
    document = doc(
        "transfer",
        [
            "Reyes , 29 , signed a new deal with Porto .".split(),
            "Reyes captained Porto last season .".split(),
        ],
        [(0, 1, "PERSON"), (9, 10, "ORG"), (11, 12, "PERSON"), (13, 14, "ORG")],
    )
    summary = doc(
        "transfer-summary",
        ["Striker Ana Reyes signed a new deal at Leeds .".split()],
        [(1, 3, "PERSON"), (8, 9, "ORG")],
        deprels={
            0: (2, "compound"),  # Striker -> Reyes
            1: (2, "compound"),  # Ana -> Reyes
            2: (3, "nsubj"),     # Reyes -> signed
            3: (3, "root"),
            4: (6, "det"),
            5: (6, "amod"),
            6: (3, "dobj"),      # deal -> signed
            7: (3, "prep"),      # at -> signed
            8: (7, "pobj"),      # Leeds -> at
            9: (3, "punct"),
        },
    )
    return SummaryExample(document, summary)
