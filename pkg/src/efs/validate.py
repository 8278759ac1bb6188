"""Rule-based factsheet validation and completeness scoring.

Errors mean the sheet is not publishable: an applicable mandatory
question is unanswered, or two answers contradict each other.  Warnings
flag content worth a second look; notes are informational.  Completeness
counts answered questions per dimension over the applicable ones, so a
sheet is never penalized for questions its own answers rule out.
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass

from .catalog import (
    CATALOG,
    DIMENSIONS,
    MODEL_JUDGE_TOKENS,
    answer_tokens,
    is_answered,
    is_applicable,
)
from .diagnostics import Diagnostic, Severity, sort_diagnostics
from .model import Factsheet

_YEAR_RE = re.compile(r"^\d{4}$")
_FULL_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

# Count ranges implied by each size category; infinite has none.
_SIZE_RANGES = {
    "small": (0, 1_000),
    "medium": (1_000, 100_000),
    "large": (100_000, 1_000_000),
    "very_large": (1_000_000, None),
}


def _mandatory_code(question_id: str) -> str:
    return f"E-{question_id[0]}{int(question_id[1:]):03d}"


def _valid_release_date(value: str) -> bool:
    if _YEAR_RE.match(value):
        return True
    if not _FULL_DATE_RE.match(value):
        return False
    try:
        datetime.date.fromisoformat(value)
    except ValueError:
        return False
    return True


def validate(fs: Factsheet) -> list[Diagnostic]:
    """Every finding for the sheet, errors first, stable order."""
    out: list[Diagnostic] = []

    for qid in CATALOG.mandatory_ids():
        if is_applicable(fs, qid) and not is_answered(fs, qid):
            q = CATALOG[qid]
            out.append(Diagnostic(_mandatory_code(qid), Severity.ERROR,
                                  f"{q.prompt} ({qid}) is mandatory and unanswered",
                                  question_id=qid))

    if answer_tokens(fs, "M1") & MODEL_JUDGE_TOKENS:
        details = fs.method.judge_details
        if details is None or details.judge_model is None:
            out.append(Diagnostic("E-M101", Severity.ERROR,
                                  "a model-based judge is declared but no "
                                  "judge model is named", question_id="M2"))

    if fs.method.heldout is True and fs.method.heldout_details is None:
        out.append(Diagnostic("E-M102", Severity.ERROR,
                              "a held-out set is declared but no details "
                              "are given", question_id="M5"))

    date = fs.context.release_date
    if date is not None and not _valid_release_date(date):
        out.append(Diagnostic("W-C101", Severity.WARNING,
                              f"release date {date!r} is neither a year nor "
                              "a full YYYY-MM-DD date", question_id="C4"))

    size = fs.structure.size
    if size is None:
        out.append(Diagnostic("W-T302", Severity.WARNING,
                              "size is not documented", question_id="T3"))
    elif size.count is not None and size.category in _SIZE_RANGES:
        lo, hi = _SIZE_RANGES[size.category]
        if size.count < lo or (hi is not None and size.count >= hi):
            out.append(Diagnostic(
                "W-T301", Severity.WARNING,
                f"size count {size.count} is outside the "
                f"{size.category} range", question_id="T3"))

    if fs.alignment.robustness is None:
        out.append(Diagnostic("W-A401", Severity.WARNING,
                              "robustness measures are not documented",
                              question_id="A3"))
    if not fs.alignment.limitations:
        out.append(Diagnostic("W-A402", Severity.WARNING,
                              "known limitations are not documented",
                              question_id="A4"))

    if fs.extensions:
        keys = ", ".join(k for k, _ in fs.extensions)
        out.append(Diagnostic("N-X001", Severity.NOTE,
                              f"factsheet carries extension entries: {keys}",
                              question_id=None))

    return sort_diagnostics(out)


def is_publishable(fs: Factsheet) -> bool:
    """Publishable means no error findings; warnings and notes may stay."""
    return not any(d.severity == Severity.ERROR for d in validate(fs))


@dataclass(frozen=True)
class DimensionScore:
    dimension: str
    answered: int
    applicable: int

    @property
    def ratio(self) -> float:
        return self.answered / self.applicable if self.applicable else 0.0


@dataclass(frozen=True)
class CompletenessReport:
    scores: tuple[DimensionScore, ...]
    overall: float

    def score(self, dimension: str) -> DimensionScore:
        for s in self.scores:
            if s.dimension == dimension:
                return s
        raise KeyError(dimension)


def completeness(fs: Factsheet) -> CompletenessReport:
    """Answered over applicable per dimension; overall is their plain mean."""
    scores = []
    for dimension in DIMENSIONS:
        qids = [q.id for q in CATALOG.in_dimension(dimension)
                if is_applicable(fs, q.id)]
        answered = sum(1 for qid in qids if is_answered(fs, qid))
        scores.append(DimensionScore(dimension, answered, len(qids)))
    overall = sum(s.ratio for s in scores) / len(scores)
    return CompletenessReport(tuple(scores), overall)
