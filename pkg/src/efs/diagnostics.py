"""Shared diagnostic types and the closed catalog of codes.

Every code any part of the toolkit can emit is registered here; tests
assert that nothing is reported under an unknown code.  Parse errors
(P/I/C prefixes) point into source text, validation findings (E/W/N)
point at catalog questions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"


_SEVERITY_RANK = {Severity.ERROR: 0, Severity.WARNING: 1, Severity.NOTE: 2}


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a finding in source text."""

    line: int
    column: int = 1
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError("SourceSpan: line and column are 1-based, length >= 0")


@dataclass(frozen=True)
class ParseError:
    code: str
    message: str
    span: SourceSpan | None = None

    def __str__(self) -> str:
        if self.span is None:
            return f"{self.code}: {self.message}"
        return f"{self.span.line}:{self.span.column}: {self.code}: {self.message}"


class FactsheetParseError(ValueError):
    """Raised when a document cannot be turned into a factsheet.

    Carries every error found before the first unrecoverable one.
    """

    def __init__(self, errors: list[ParseError]):
        self.errors = list(errors)
        head = "; ".join(str(e) for e in self.errors[:3])
        more = f" (+{len(self.errors) - 3} more)" if len(self.errors) > 3 else ""
        super().__init__(head + more)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    question_id: str | None = None
    span: SourceSpan | None = None


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Stable order: errors, then warnings, then notes; by code within."""
    return sorted(diags, key=lambda d: (_SEVERITY_RANK[d.severity], d.code,
                                        d.question_id or ""))


# Canonical text format parse errors.
PARSE_CODES = {
    "P001": "missing or malformed magic line",
    "P002": "unknown section header",
    "P003": "unknown key for this section",
    "P004": "malformed value",
    "P005": "value is not a canonical vocabulary token",
    "P006": "duplicate single-valued key",
}

# Interchange document errors.
INTERCHANGE_CODES = {
    "I001": "missing efs_version",
    "I002": "wrong shape for a known field",
}

# evaluationcard markup errors.
CARD_CODES = {
    "C001": "missing begin or end of the evaluationcard environment",
    "C002": "unbalanced braces",
    "C003": "malformed option list",
}

# Validation findings.  E-<section><nnn> for unanswered mandatory questions,
# E-x1xx for consistency errors, W- warnings, N- notes.
VALIDATION_CODES = {
    "E-C001": "title (C1) is mandatory and unanswered",
    "E-C003": "authors (C3) is mandatory and unanswered",
    "E-C004": "release date (C4) is mandatory and unanswered",
    "E-C007": "intended purposes (C7) is mandatory and unanswered",
    "E-S001": "capabilities tested (S1) is mandatory and unanswered",
    "E-S002": "model properties (S2) is mandatory and unanswered",
    "E-S003": "input modality (S3) is mandatory and unanswered",
    "E-S004": "output modality (S4) is mandatory and unanswered",
    "E-T001": "input sources (T1) is mandatory and unanswered",
    "E-T002": "output sources (T2) is mandatory and unanswered",
    "E-T005": "design (T5) is mandatory and unanswered",
    "E-M001": "judge types (M1) is mandatory and unanswered",
    "E-M003": "protocol (M3) is mandatory and unanswered",
    "E-M004": "model access (M4) is mandatory and unanswered",
    "E-M005": "held-out flag (M5) is mandatory and unanswered",
    "E-M101": "model-based judge declared but no judge model named",
    "E-M102": "held-out set declared but no details given",
    "W-C101": "release date is neither a year nor a full date",
    "W-T301": "size count disagrees with the declared category",
    "W-T302": "size is not documented",
    "W-A401": "robustness measures are not documented",
    "W-A402": "known limitations are not documented",
    "N-X001": "factsheet carries extension entries",
}

# Card import notes.
IMPORT_CODES = {
    "N-I001": "unknown command or option preserved as an extension",
    "N-I002": "text did not match the vocabulary and was mapped to 'other'",
    "N-I003": "closed-vocabulary value not recognized; question left unanswered",
    "N-I004": "split line not imported; preserved as an extension",
    "N-I005": "extra value for a single-valued question was dropped",
    "N-I006": "flag value not recognized; question left unanswered",
    "N-I007": "mandatory question not covered by the card",
}

ALL_CODES = {
    **PARSE_CODES,
    **INTERCHANGE_CODES,
    **CARD_CODES,
    **VALIDATION_CODES,
    **IMPORT_CODES,
}
