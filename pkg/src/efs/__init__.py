"""Evaluation factsheets: a typed questionnaire for documenting how an
evaluation works, with parsers, validation, rendering, comparison,
storage, an HTTP service and a command line."""

from .analyze import CorpusStats, DiffEntry, DiffStatus, FactsheetDiff, corpus_stats, diff
from .card import Card, ImportReport, export_card, import_card, parse_card
from .catalog import (
    CATALOG,
    DIMENSIONS,
    MODEL_JUDGE_TOKENS,
    SECTION_NAMES,
    AnswerKind,
    Question,
    answer,
    answer_text,
    answer_tokens,
    applicable_ids,
    is_answered,
    is_applicable,
    map_vocab,
    with_answer,
    without_answer,
)
from .diagnostics import (
    Diagnostic,
    FactsheetParseError,
    ParseError,
    Severity,
    SourceSpan,
    sort_diagnostics,
)
from .model import (
    AlignmentDim,
    ContextDim,
    Factsheet,
    JudgeDetails,
    MethodDim,
    ScopeDim,
    SizeSpec,
    SplitSpec,
    StructureDim,
    TaggedText,
    VocabTerm,
    empty_factsheet,
    term,
)
from .render import RENDER_TARGETS, render, render_diagnostics
from .store import (
    ConflictError,
    FactsheetStore,
    InvalidIdError,
    NotFoundError,
    StorageError,
    StoreEntry,
    StoreListing,
    UnknownTokenError,
)
from .textfmt import (
    factsheet_from_dict,
    factsheet_to_dict,
    from_interchange,
    parse_canonical,
    serialize_canonical,
    skeleton_canonical,
    to_interchange,
)
from .validate import (
    CompletenessReport,
    DimensionScore,
    completeness,
    is_publishable,
    validate,
)
from .vocab import OTHER, VOCABULARIES, Vocabulary

__version__ = "0.1.0"
