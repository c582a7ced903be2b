"""Walkthrough: repairing a reference summary that misstates entities.

Detection compares summary entity surfaces against the document's. A
hallucinated mention is replaced when the document holds a shorter form of
the same name, and otherwise removed together with the words that hang off
it in the dependency parse.
"""

from factsum import (
    CorrectionStrategy,
    apply_edits,
    correct,
    detect_hallucinations,
    remap_spans,
)

from corpus_support import transfer_example


def main():
    example = transfer_example()
    print(f"Document: {example.document.text}")
    print(f"Summary:  {example.summary.text}")

    print("\nDetection:")
    for report in detect_hallucinations(example):
        line = f"  {report.mention.surface!r}: {report.status}"
        if report.replacement is not None:
            line += f" (document offers {report.replacement.surface!r})"
        print(line)

    print("\nStrategies:")
    for strategy in CorrectionStrategy:
        corrected = correct(example, strategy)
        print(f"  {strategy.name.lower():<8} -> {corrected.text}")

    corrected = correct(example, CorrectionStrategy.COMBINED)
    print("\nEdits from the combined strategy:")
    for edit in corrected.edits:
        print(
            f"  {edit.kind} bytes [{edit.start}:{edit.end}]"
            f" {edit.original_text!r} -> {edit.new_text!r}"
        )

    replayed = apply_edits(example.summary.text, list(corrected.edits))
    print(f"\nEdit replay reproduces the corrected text -> {replayed == corrected.text}")

    spans = [example.summary.entity_char_span(m) for m in example.summary.entities]
    print("\nEntity spans mapped through the edits (None = mention removed):")
    for mention, span in zip(example.summary.entities, remap_spans(corrected.edits, spans)):
        if span is None:
            print(f"  {mention.surface!r} -> None")
        else:
            piece = corrected.text.encode("utf-8")[span[0] : span[1]].decode("utf-8")
            print(f"  {mention.surface!r} -> {span} = {piece!r}")


if __name__ == "__main__":
    main()
