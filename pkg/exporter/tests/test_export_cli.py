"""End-to-end tests for the factsum-annotate command line."""

import io
import json
import subprocess
import sys

import pytest

from factsum_annotate import Annotation, ExportAbort, RawToken, export_stream

MODEL = "rule-en-lite"


def run_cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "factsum_annotate", *args],
        capture_output=True, text=True, input=stdin,
    )


def write_raw(path, records):
    path.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records),
        encoding="utf-8",
    )


GOOD = [
    {"doc_id": "g1", "text": "Reyes visited Porto on Friday . The trip went well ."},
    {"doc_id": "g2", "text": "Braga praised the deal .", "summary": "Braga liked the deal ."},
]


def test_export_writes_records_and_report(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, GOOD)
    out = tmp_path / "annotated.jsonl"
    proc = run_cli("export", "--model", MODEL, "--input", str(raw), "--output", str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stderr.strip().splitlines()[-1])
    assert report == {"exported": 2, "skipped": 0, "skip_reasons": {}}
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["doc_id"] == "g1"
    # the record with a summary becomes a two-sided pair
    pair = json.loads(lines[1])
    assert set(pair) == {"document", "summary"}
    assert pair["document"]["doc_id"] == "g2"
    assert pair["summary"]["doc_id"] == "g2-summary"


def test_export_is_deterministic(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, GOOD)
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_cli("export", "--model", MODEL, "--input", str(raw), "--output", str(first))
    run_cli("export", "--model", MODEL, "--input", str(raw), "--output", str(second))
    assert first.read_bytes() == second.read_bytes()


def test_export_skips_unusable_records_with_logs(tmp_path):
    raw = tmp_path / "raw.jsonl"
    raw.write_text(
        "\n".join(
            [
                json.dumps(GOOD[0]),
                "{not json",
                json.dumps({"doc_id": "", "text": "x ."}),
                json.dumps({"doc_id": "ws", "text": "   "}),
                json.dumps(GOOD[0]),  # duplicate doc_id
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "annotated.jsonl"
    proc = run_cli("export", "--model", MODEL, "--input", str(raw), "--output", str(out))
    assert proc.returncode == 0
    report = json.loads(proc.stderr.strip().splitlines()[-1])
    assert report["exported"] == 1
    assert report["skipped"] == 4
    assert report["skip_reasons"] == {
        "bad-json": 1, "bad-record": 2, "duplicate-doc-id": 1,
    }
    assert "skipped line 2 (?): bad-json" in proc.stderr
    assert "skipped line 5 (g1): duplicate-doc-id" in proc.stderr
    assert len(out.read_text(encoding="utf-8").splitlines()) == 1


def test_pairs_flag_requires_summaries(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, GOOD)
    proc = run_cli("export", "--model", MODEL, "--input", str(raw), "--output", "-", "--pairs")
    assert proc.returncode == 0
    report = json.loads(proc.stderr.strip().splitlines()[-1])
    assert report["exported"] == 1
    assert report["skip_reasons"] == {"missing-summary": 1}
    assert set(json.loads(proc.stdout.strip())) == {"document", "summary"}


def test_unknown_model_is_a_startup_error(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, GOOD)
    proc = run_cli("export", "--model", "en_core_web_trf", "--input", str(raw), "--output", "-")
    assert proc.returncode == 3
    assert "en_core_web_trf" in proc.stderr
    assert proc.stdout == ""


def test_usage_errors(tmp_path):
    assert run_cli("export", "--input", "x", "--output", "y").returncode == 1
    assert run_cli("frobnicate").returncode == 1
    missing = run_cli("export", "--model", MODEL, "--input", str(tmp_path / "nope"), "--output", "-")
    assert missing.returncode == 1


def test_check_accepts_exported_output(tmp_path):
    raw = tmp_path / "raw.jsonl"
    write_raw(raw, GOOD)
    out = tmp_path / "annotated.jsonl"
    run_cli("export", "--model", MODEL, "--input", str(raw), "--output", str(out))
    proc = run_cli("check", "--input", str(out))
    assert proc.returncode == 0
    assert "checked 2 record(s): 0 invalid, 0 violation(s)" in proc.stdout


def test_check_reports_violations_and_exits_nonzero(tmp_path):
    out = tmp_path / "annotated.jsonl"
    run_cli(
        "export", "--model", MODEL,
        "--input", "-", "--output", str(out),
        stdin=json.dumps(GOOD[0]) + "\n",
    )
    good_line = out.read_text(encoding="utf-8").strip()
    broken = json.loads(good_line)
    broken["tokens"][0]["end"] = 2  # token text no longer matches its span
    bad = tmp_path / "bad.jsonl"
    bad.write_text(good_line + "\n" + json.dumps(broken) + "\n" + "{oops\n", encoding="utf-8")
    proc = run_cli("check", "--input", str(bad))
    assert proc.returncode == 2
    assert "token text mismatch" in proc.stdout
    assert "doc_id duplicate within corpus" in proc.stdout
    assert "invalid JSON" in proc.stdout
    assert "checked 3 record(s): 2 invalid," in proc.stdout


def test_export_self_check_aborts_on_invalid_annotation():
    class BrokenAnnotator:
        name = "broken"

        def annotate(self, text):
            token = RawToken(text[:1], 0, 1, 5, "dep")  # head out of range
            return Annotation((token,), ((0, 1),), ())

    out = io.StringIO()
    lines = [json.dumps({"doc_id": "b1", "text": "boom ."})]
    with pytest.raises(ExportAbort) as err:
        export_stream(BrokenAnnotator(), lines, out, log=io.StringIO())
    assert "b1" in str(err.value)
    assert out.getvalue() == ""
