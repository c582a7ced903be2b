"""Walkthrough: the bundled overlap metrics.

The toolkit carries its own unigram/bigram/subsequence F1 implementation so
sentence selection never depends on an external package's tokenizer.
"""

from factsum import RougeVariant, rouge_l, rouge_n, rouge_score, rouge_tokenize


def show(tag, score):
    print(f"  {tag}: P={score.precision:.4f} R={score.recall:.4f} F1={score.f1:.4f}")


def main():
    print("Tokenization lowercases and splits on anything non-alphanumeric:")
    for text in ["The fire — quickly! — spread.", "naïve café no.2", "under_score"]:
        print(f"  {text!r} -> {rouge_tokenize(text)}")

    cand = "the storm hit the city of Porto"
    ref = "a heavy storm hit Porto"
    print(f"\nCandidate: {cand!r}\nReference: {ref!r}")
    show("unigram", rouge_n(cand, ref, 1))
    show("bigram ", rouge_n(cand, ref, 2))
    show("subseq ", rouge_l(cand, ref))

    print("\nRepeated words only count up to their multiplicity in the other side:")
    show("'the the the' vs 'the'", rouge_n("the the the", "the", 1))

    print("\nWord order matters to the subsequence variant, not to unigrams:")
    a, b = "one two three four", "four three two one"
    show("unigram", rouge_n(a, b, 1))
    show("subseq ", rouge_l(a, b))

    print("\nVariant dispatch mirrors the selection config:")
    for variant in RougeVariant:
        show(variant.name, rouge_score(cand, ref, variant))


if __name__ == "__main__":
    main()
