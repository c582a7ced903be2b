"""Walkthrough: entity-perturbed negatives and the loss that consumes them.

A factual summary entity is swapped for a same-category surface: one the
document also mentions (intrinsic error) or one it never mentions
(extrinsic error). The contrastive loss then pushes the model toward the
faithful summary and away from the perturbed ones.
"""

import numpy as np

from factsum import (
    EmptyNegativeSetError,
    NegativeMode,
    SummaryExample,
    combined_loss,
    generate_negatives,
    harvest_entity_bank,
    nt_xent_loss,
    nt_xent_loss_and_grads,
)

from corpus_support import doc, storm_report, transfer_example


def faithful_pair():
    document = doc(
        "signing",
        [
            "Reyes signed a new deal with Porto on Friday .".split(),
            "Coach Almeida praised the move .".split(),
            "Rivals Braga declined to comment .".split(),
        ],
        [
            (0, 1, "PERSON"), (6, 7, "ORG"), (8, 9, "DATE"),
            (11, 12, "PERSON"), (17, 18, "ORG"),
        ],
    )
    summary = doc(
        "signing-summary",
        ["Reyes signed a new deal with Porto .".split()],
        [(0, 1, "PERSON"), (6, 7, "ORG")],
    )
    return SummaryExample(document, summary)


def main():
    example = faithful_pair()
    print(f"Document: {example.document.text}")
    print(f"Summary:  {example.summary.text}")

    print("\nIntrinsic negatives (replacements drawn from this document):")
    intrinsic = generate_negatives(example, NegativeMode.INTRINSIC, k=5, seed=7)
    for sample in intrinsic.samples:
        print(f"  {sample.original!r} -> {sample.replacement!r}: {sample.text}")
    print(f"  shortfall: {intrinsic.shortfall}")

    bank = harvest_entity_bank(
        [
            example.document,
            storm_report(),
            doc("extra", ["Liga officials praised Braga .".split()],
                [(0, 1, "ORG"), (3, 4, "ORG")]),
        ]
    )
    print("\nExtrinsic negatives (corpus-wide bank minus this document's surfaces):")
    extrinsic = generate_negatives(example, NegativeMode.EXTRINSIC, k=5, seed=7, bank=bank)
    for sample in extrinsic.samples:
        print(f"  {sample.original!r} -> {sample.replacement!r}: {sample.text}")
    print(f"  shortfall: {extrinsic.shortfall} (the bank only offers so many unseen surfaces)")

    again = generate_negatives(example, NegativeMode.EXTRINSIC, k=5, seed=7, bank=bank)
    print(f"\nSame seed, same set -> {again == extrinsic}")

    # A summary with no document-supported entities has nothing safe to perturb.
    try:
        generate_negatives(transfer_example(), NegativeMode.INTRINSIC, k=5, seed=7)
    except EmptyNegativeSetError as exc:
        print(f"Unsupported-entity summary is rejected: {exc}")

    print("\nToy embeddings through the contrastive loss (temperature 0.05):")
    # At this temperature a cosine lead of a few hundredths already decides
    # the softmax, so give the positive only a slim lead over the negatives.
    rng = np.random.default_rng(0)
    document_vec = rng.normal(size=16)
    document_vec /= np.linalg.norm(document_vec)

    def with_cosine(target):
        r = rng.normal(size=16)
        r -= (r @ document_vec) * document_vec
        r /= np.linalg.norm(r)
        return target * document_vec + np.sqrt(1.0 - target * target) * r

    positive = with_cosine(0.80)
    negatives = [with_cosine(c) for c in (0.79, 0.77, 0.74, 0.70)[: len(extrinsic.samples)]]
    loss, grad_doc, grad_pos, _ = nt_xent_loss_and_grads(
        document_vec, positive, negatives, tau=0.05
    )
    print(f"  loss = {loss:.6f}")
    print(f"  ||grad wrt document|| = {np.linalg.norm(grad_doc):.6f}")

    step = 0.05
    nudged = positive - step * np.asarray(grad_pos)
    print(
        "  one gradient step on the positive lowers the loss to"
        f" {nt_xent_loss(document_vec, nudged, negatives, tau=0.05):.6f}"
    )

    print("\nTraining objective = generation loss + weight * contrastive loss:")
    print(f"  combined_loss(2.31, {loss:.4f}, lam=5) = {combined_loss(2.31, loss, 5.0):.4f}")


if __name__ == "__main__":
    main()
