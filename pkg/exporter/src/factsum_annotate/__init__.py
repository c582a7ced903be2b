"""Annotation exporter: converts raw text (and document/summary pairs) into
the annotated-corpus schema consumed by the factsum toolkit.

A deterministic rule-based annotator ships built in; any installed
statistical model with the usual token/sentence/entity/arc attributes can be
selected by name instead. Emitted records are validated before they are
written.
"""

from .annotators import (
    Annotation,
    BUILTIN_MODEL,
    ModelNotAvailable,
    RawEntity,
    RawToken,
    RuleAnnotator,
    StatisticalAnnotator,
    load_annotator,
)
from .exporter import (
    ExportAbort,
    ExportReport,
    annotate_record,
    build_document,
    check_stream,
    export_stream,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "BUILTIN_MODEL",
    "ExportAbort",
    "ExportReport",
    "ModelNotAvailable",
    "RawEntity",
    "RawToken",
    "RuleAnnotator",
    "StatisticalAnnotator",
    "annotate_record",
    "build_document",
    "check_stream",
    "export_stream",
    "load_annotator",
]
