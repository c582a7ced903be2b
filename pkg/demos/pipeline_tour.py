"""Walkthrough: the command-line pipeline over a small corpus on disk.

Every subcommand reads and writes line-delimited JSON, reports run counters
as JSON on stderr, and signals failures through exit codes (0 ok, 1 usage,
2 data, 3 scorer backend). Chain stages by piping, or fuse them with `run`.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from factsum import SummaryExample, dumps_record

from corpus_support import doc, storm_report, transfer_example


def run_cli(*args, stdin=None, expect=0):
    print(f"\n$ factsum {' '.join(args)}")
    proc = subprocess.run(
        [sys.executable, "-m", "factsum", *args],
        capture_output=True, text=True, input=stdin,
    )
    if proc.stdout:
        for line in proc.stdout.splitlines()[:6]:
            print(f"  out| {line[:160]}{'...' if len(line) > 160 else ''}")
    for line in proc.stderr.splitlines():
        print(f"  err| {line}")
    print(f"  exit code {proc.returncode}")
    assert proc.returncode == expect, f"expected exit {expect}, got {proc.returncode}"
    return proc


def build_corpus(path: Path):
    signing_doc = doc(
        "signing",
        [
            "Reyes signed a new deal with Porto on Friday .".split(),
            "Coach Almeida praised the move .".split(),
        ],
        [(0, 1, "PERSON"), (6, 7, "ORG"), (8, 9, "DATE"), (11, 12, "PERSON")],
    )
    signing_summary = doc(
        "signing-summary",
        ["Reyes signed a new deal with Porto .".split()],
        [(0, 1, "PERSON"), (6, 7, "ORG")],
    )
    records = [
        storm_report(),
        transfer_example(),
        SummaryExample(signing_doc, signing_summary),
    ]
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps_record(record) + "\n")


def main():
    workdir = Path(tempfile.mkdtemp(prefix="factsum-tour-"))
    corpus = workdir / "corpus.jsonl"
    build_corpus(corpus)
    print(f"Corpus with one document and two pairs at {corpus}")

    run_cli("validate", "--input", str(corpus))
    run_cli("stats", "--input", str(corpus))

    # Documents become masked pseudo-summary examples; pairs contribute
    # their document side.
    run_cli("pretrain-data", "--input", str(corpus), "--candidate-pool", "2")

    # The document-only record has no summary to repair; skip it instead of
    # aborting, and collect a detection report alongside.
    report = workdir / "detections.tsv"
    corrected = run_cli(
        "correct", "--input", str(corpus), "--strategy", "combined",
        "--on-error", "skip", "--report", str(report),
    )
    print("  detection report:")
    for line in report.read_text().splitlines():
        print(f"    {line}")
    print("  corrected summaries:")
    for line in corrected.stdout.splitlines():
        obj = json.loads(line)
        print(f"    {obj['document']['doc_id']}: {obj['corrected']['text']!r}")

    # Stage outputs stay valid stage inputs: pipe corrected pairs onward.
    connected = run_cli("connect", "--position", "1", stdin=corrected.stdout)
    print("  documents carrying the mask:")
    for line in connected.stdout.splitlines():
        obj = json.loads(line)
        print(f"    {obj['document']['doc_id']}: {obj['connected_text']!r}")

    # One pair has no document-supported summary entity, so it is skipped.
    run_cli(
        "negatives", "--input", str(corpus), "--mode", "intrinsic",
        "--seed", "11", "--on-error", "skip",
    )

    # `run` fuses a stage chain behind one config file.
    config = workdir / "chain.json"
    config.write_text(json.dumps({
        "stages": ["correct", "connect"],
        "on_error": "skip",
        "correct": {"strategy": "combined"},
        "connect": {"position": 1},
    }))
    run_cli("run", "--config", str(config), "--input", str(corpus))

    # Data problems surface as exit code 2 with a line-numbered message.
    run_cli("validate", "--input", "-", stdin='{"doc_id": "broken"}\n', expect=2)

    print("\nAll tour commands behaved as advertised.")


if __name__ == "__main__":
    main()
