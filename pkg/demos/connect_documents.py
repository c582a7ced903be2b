"""Walkthrough: carrying the pre-training mask token into downstream inputs.

Pre-training teaches the model to fill a masked sentence slot. Splicing the
same mask token into fine-tuning documents keeps that framing, and a sweep
over insertion positions picks the one a quality callback likes best.
"""

from factsum import ConnectorConfig, PositionOutOfRange, insert_mask, sweep_positions

from corpus_support import doc, storm_report


def main():
    report = storm_report()
    print(f"Original ({len(report.sentences)} sentences):")
    print(f"  {report.text}")

    print("\nMask spliced before each sentence in turn:")
    for position in (1, 2, 3):
        connected = insert_mask(report, ConnectorConfig(position=position))
        print(f"  position {position}: {connected}")

    try:
        insert_mask(report, ConnectorConfig(position=4))
    except PositionOutOfRange as exc:
        print(f"\nNo clamping past the end: {exc}")

    print("\nInsertion is a pure splice, so token counts grow by exactly one:")
    connected = insert_mask(report, ConnectorConfig())
    print(f"  before: {len(report.text.split())} words, after: {len(connected.split())}")

    # Toy reward: prefer the mask as close to the front as possible.
    def front_affinity(masked_texts):
        return -sum(text.index("<mask>") for text in masked_texts) / len(masked_texts)

    sample = [report, doc("two", ["Alpha beta gamma .".split(), "Delta epsilon .".split()])]
    result = sweep_positions(sample, [1, 2, 3], front_affinity)
    print("\nSweep under a front-of-document reward:")
    for row in result.rows:
        outcome = f"score {row.score:.2f}" if row.error is None else f"failed ({row.error})"
        print(f"  position {row.position}: {outcome}")
    print(f"  best position: {result.best_position}")
    print("  position 3 failed on the two-sentence document, and the sweep kept going.")


if __name__ == "__main__":
    main()
