"""Walkthrough: turning documents into masked pseudo-summary examples.

Each sentence is scored against the rest of its document; the winner is cut
out as the pseudo-summary and a mask token takes its place. A consistency
verdict keeps lexically central but entity-inventing sentences from winning.
"""

from factsum import (
    HeuristicEntityContainment,
    SelectionConfig,
    make_pseudo_example,
    reconstruct,
    score_sentences,
)

from corpus_support import storm_report


class AlwaysConsistent:
    """Stand-in verdict source that trusts every sentence."""

    def score(self, claim, context, key=None):
        return 1


def show_scores(label, scores):
    print(f"  {label}")
    for s in scores:
        verdict = "unscored" if s.factuality is None else str(s.factuality)
        print(
            f"    sentence {s.sentence_index}: lexical={s.rouge_f1:.4f}"
            f"  verdict={verdict}  combined={s.combined:.4f}"
        )


def main():
    document = storm_report()
    print("Document:")
    for i, span in enumerate(document.sentences):
        print(f"  [{i}] {document.sentence_text(i)}")

    config = SelectionConfig()  # unigram overlap, pool of 5, '<mask>'

    print("\nLexical scoring only (every verdict forced to 1):")
    trusting = score_sentences(document, config, AlwaysConsistent())
    show_scores("sentence 2 repeats the most vocabulary, so it wins:", trusting)

    print("\nWith entity-containment verdicts:")
    checked = score_sentences(document, config, HeuristicEntityContainment())
    show_scores("Calgary appears nowhere else, so sentence 2 is rejected:", checked)

    example = make_pseudo_example(document, config, HeuristicEntityContainment())
    print(f"\nSelected sentence index: {example.selected_index}")
    print(f"Pseudo-summary: {example.pseudo_summary}")
    print(f"Masked document: {example.pseudo_document}")

    rebuilt = reconstruct(example.pseudo_document, example.pseudo_summary, config.mask_token)
    print(f"\nSplice is reversible: reconstruct(...) == original -> {rebuilt == document.text}")


if __name__ == "__main__":
    main()
