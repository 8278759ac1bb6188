"""Factsheet comparison and corpus coverage statistics.

Diffs compare answers structurally: vocabulary answers by token set,
lists by ordered equality, free text by exact string equality.  The
held-out detail rides with its flag so a detail change surfaces on M5.
Corpus statistics honor each sheet's own conditional state, so a sheet
whose judge-model question is hidden never counts against its fill rate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .catalog import (
    CATALOG,
    AnswerKind,
    answer,
    answer_text,
    answer_tokens,
    applicable_ids,
    detail_answer,
    detail_visible,
    is_answered,
)
from .model import Factsheet
from .vocab import VOCABULARIES


class DiffStatus(str, Enum):
    EQUAL = "equal"
    DIFFERS = "differs"
    LEFT_ONLY = "left_only"
    RIGHT_ONLY = "right_only"


@dataclass(frozen=True)
class DiffEntry:
    question_id: str
    status: DiffStatus
    left: str | None
    right: str | None


@dataclass(frozen=True)
class FactsheetDiff:
    """One entry per question applicable to either sheet, catalog order."""

    entries: tuple[DiffEntry, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, question_id: str) -> DiffEntry:
        for e in self.entries:
            if e.question_id == question_id:
                return e
        raise KeyError(question_id)

    def changed(self) -> tuple[DiffEntry, ...]:
        return tuple(e for e in self.entries if e.status != DiffStatus.EQUAL)


def _comparison_key(fs: Factsheet, question_id: str):
    if not is_answered(fs, question_id):
        return None
    q = CATALOG[question_id]
    if q.answer_kind == AnswerKind.ENUM_MANY:
        return frozenset(t.token for t in answer(fs, question_id))
    if q.answer_kind == AnswerKind.ENUM_ONE:
        return answer(fs, question_id).token
    value = answer(fs, question_id)
    if q.sub_answer is not None:
        detail = detail_answer(fs, question_id) if detail_visible(fs, question_id) else None
        return (value, detail)
    return value


def _entry_text(fs: Factsheet, question_id: str) -> str | None:
    text = answer_text(fs, question_id)
    if text is None:
        return None
    if detail_visible(fs, question_id):
        detail = detail_answer(fs, question_id)
        if detail is not None:
            return f"{text}; {detail}"
    return text


def diff(a: Factsheet, b: Factsheet) -> FactsheetDiff:
    ids = set(applicable_ids(a)) | set(applicable_ids(b))
    entries = []
    for q in CATALOG:
        if q.id not in ids:
            continue
        left_key = _comparison_key(a, q.id)
        right_key = _comparison_key(b, q.id)
        if left_key is None and right_key is None:
            status = DiffStatus.EQUAL
        elif right_key is None:
            status = DiffStatus.LEFT_ONLY
        elif left_key is None:
            status = DiffStatus.RIGHT_ONLY
        elif left_key == right_key:
            status = DiffStatus.EQUAL
        else:
            status = DiffStatus.DIFFERS
        entries.append(DiffEntry(q.id, status,
                                 _entry_text(a, q.id), _entry_text(b, q.id)))
    return FactsheetDiff(tuple(entries))


@dataclass(frozen=True)
class CorpusStats:
    """Coverage over a corpus; only ever-applicable questions have rates."""

    sheet_count: int
    fill_rates: dict[str, float]
    vocab_hists: dict[str, dict[str, int]]

    def fill_rate(self, question_id: str) -> float:
        CATALOG[question_id]
        return self.fill_rates[question_id]

    def vocab_hist(self, question_id: str) -> dict[str, int]:
        CATALOG[question_id]
        return dict(self.vocab_hists.get(question_id, {}))

    def to_dict(self) -> dict:
        return {
            "sheet_count": self.sheet_count,
            "fill_rate": dict(self.fill_rates),
            "vocab_hist": {qid: dict(hist) for qid, hist in self.vocab_hists.items()},
        }


def corpus_stats(sheets: list[Factsheet]) -> CorpusStats:
    applicable: Counter[str] = Counter()
    answered: Counter[str] = Counter()
    seen: dict[str, Counter[str]] = {}
    for fs in sheets:
        for qid in applicable_ids(fs):
            applicable[qid] += 1
            if is_answered(fs, qid):
                answered[qid] += 1
        for q in CATALOG:
            if q.vocabulary is None or not is_answered(fs, q.id):
                continue
            hist = seen.setdefault(q.id, Counter())
            for token in answer_tokens(fs, q.id):
                hist[token] += 1
    fill_rates = {q.id: answered[q.id] / applicable[q.id]
                  for q in CATALOG if applicable[q.id]}
    vocab_hists = {}
    for q in CATALOG:
        hist = seen.get(q.id)
        if not hist:
            continue
        order = [t for t in VOCABULARIES[q.vocabulary].all_tokens() if t in hist]
        vocab_hists[q.id] = {t: hist[t] for t in order}
    return CorpusStats(len(sheets), fill_rates, vocab_hists)
