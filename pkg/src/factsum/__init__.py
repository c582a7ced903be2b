"""Corpus transformations for factuality-aware summarization training data.

The package turns an annotated news-style corpus (tokens, sentence spans,
labeled entities, dependency arcs over UTF-8 byte offsets) into:

- masked pseudo-summary pre-training examples selected by a combination of
  lexical centrality and an entity-consistency verdict (``gsg``),
- reference summaries with unsupported entities replaced or pruned away
  along dependency arcs (``corrector``),
- entity-perturbed negative summaries plus the contrastive loss kernel that
  consumes them (``contrastor``, ``loss``),
- fine-tuning inputs carrying the pre-training mask token (``connector``).

``pipeline`` and ``cli`` wire these into deterministic, parallel,
line-delimited JSON streams.
"""

from .connector import ConnectorConfig, PositionOutOfRange, insert_mask, sweep_positions
from .contrastor import (
    EmptyNegativeSetError,
    EntityBank,
    EntityCategory,
    NegativeMode,
    NegativeSample,
    NegativeSet,
    categorize,
    generate_negatives,
    harvest_entity_bank,
)
from .corpus import (
    AnnotatedDocument,
    CorpusError,
    EntityMention,
    MalformedLineError,
    RecordValidationError,
    SentenceSpan,
    SummaryExample,
    Token,
    dumps_record,
    normalize_surface,
    parse_record,
    read_corpus,
    record_to_obj,
    validate,
    write_corpus,
)
from .corrector import (
    FACTUAL,
    HALLUCINATED,
    CorrectedSummary,
    CorrectionStrategy,
    Edit,
    HallucinationReport,
    apply_edits,
    correct,
    detect_hallucinations,
    find_replacement,
    remap_spans,
    remove_entity_with_deps,
)
from .gsg import (
    PseudoExample,
    SelectionConfig,
    SelectionScore,
    ShortDocumentError,
    build_pseudo_example,
    make_pseudo_example,
    reconstruct,
    score_sentences,
    select_gap_sentence,
)
from .loss import (
    LossConfig,
    combined_loss,
    cosine_sim,
    mean_pool,
    nt_xent_loss,
    nt_xent_loss_and_grads,
)
from .rouge import RougeScore, RougeVariant, rouge_l, rouge_n, rouge_score, rouge_tokenize
from .scorer import (
    HeuristicEntityContainment,
    RemoteBinding,
    RemoteConsistencyScorer,
    ScorerError,
    ScorerInput,
    ScorerProtocolError,
    ScorerTransportError,
    VerdictCache,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDocument",
    "ConnectorConfig",
    "CorpusError",
    "CorrectedSummary",
    "CorrectionStrategy",
    "Edit",
    "EmptyNegativeSetError",
    "EntityBank",
    "EntityCategory",
    "EntityMention",
    "FACTUAL",
    "HALLUCINATED",
    "HallucinationReport",
    "HeuristicEntityContainment",
    "LossConfig",
    "MalformedLineError",
    "NegativeMode",
    "NegativeSample",
    "NegativeSet",
    "PositionOutOfRange",
    "PseudoExample",
    "RecordValidationError",
    "RemoteBinding",
    "RemoteConsistencyScorer",
    "RougeScore",
    "RougeVariant",
    "ScorerError",
    "ScorerInput",
    "ScorerProtocolError",
    "ScorerTransportError",
    "SelectionConfig",
    "SelectionScore",
    "SentenceSpan",
    "ShortDocumentError",
    "SummaryExample",
    "Token",
    "VerdictCache",
    "apply_edits",
    "build_pseudo_example",
    "categorize",
    "combined_loss",
    "correct",
    "cosine_sim",
    "detect_hallucinations",
    "dumps_record",
    "find_replacement",
    "generate_negatives",
    "harvest_entity_bank",
    "insert_mask",
    "make_pseudo_example",
    "mean_pool",
    "normalize_surface",
    "nt_xent_loss",
    "nt_xent_loss_and_grads",
    "parse_record",
    "read_corpus",
    "reconstruct",
    "record_to_obj",
    "remap_spans",
    "remove_entity_with_deps",
    "rouge_l",
    "rouge_n",
    "rouge_score",
    "rouge_tokenize",
    "score_sentences",
    "select_gap_sentence",
    "sweep_positions",
    "validate",
    "write_corpus",
]
