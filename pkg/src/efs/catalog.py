"""The fixed questionnaire: 27 questions in five sections.

Question ids are section letter plus index (C1..C7, S1..S4, T1..T6,
M1..M5, A1..A5).  Fifteen questions are mandatory.  Exactly two
visibility predicates exist: M2 (judge details) only applies when M1
names a model-based judge, and the held-out details sub-answer of M5
only applies when the M5 flag is true.

This module also holds the generic answer plumbing used by validation,
rendering, diffing and corpus statistics: every question knows which
model attribute carries its answer, so access is uniform.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .model import (Factsheet, JudgeDetails, SizeSpec, SplitSpec, TaggedText,
                    VocabTerm, term)
from .vocab import OTHER, VOCABULARIES


class UnknownQuestionError(LookupError):
    pass


class KindMismatchError(TypeError):
    pass


class AnswerKind(str, Enum):
    TEXT = "text"
    LONG_TEXT = "long_text"
    URL = "url"
    DATE = "date"
    FLAG = "flag"
    ENUM_ONE = "enum_one"
    ENUM_MANY = "enum_many"
    TEXT_LIST = "text_list"
    SPLIT_LIST = "split_list"
    STEP_LIST = "step_list"
    STRUCTURED = "structured"


DIMENSIONS = ("context", "scope", "structure", "method", "alignment")

SECTION_NAMES = {
    "context": "Basic Information",
    "scope": "What Does It Evaluate",
    "structure": "How Is It Structured",
    "method": "How Does It Work",
    "alignment": "Quality & Reliability",
}

MODEL_JUDGE_TOKENS = frozenset({"model_expert", "model_llm"})


@dataclass(frozen=True)
class VisibleIf:
    """Predicate: the referenced answer, read as tokens, meets the set."""

    question_id: str
    contains_any: frozenset[str]


@dataclass(frozen=True)
class SubAnswer:
    """A dependent part of a question with its own visibility."""

    key: str
    attr: str
    prompt: str
    visible_if: VisibleIf


@dataclass(frozen=True)
class Question:
    id: str
    dimension: str
    attr: str
    prompt: str
    answer_kind: AnswerKind
    mandatory: bool
    vocabulary: str | None = None
    visible_if: VisibleIf | None = None
    sub_answer: SubAnswer | None = None

    @property
    def section(self) -> str:
        return SECTION_NAMES[self.dimension]


_K = AnswerKind

_QUESTIONS = (
    Question("C1", "context", "title", "Title", _K.TEXT, True),
    Question("C2", "context", "subtitle", "Subtitle", _K.LONG_TEXT, False),
    Question("C3", "context", "authors", "Authors or owners", _K.TEXT, True),
    Question("C4", "context", "release_date", "Release date", _K.DATE, True),
    Question("C5", "context", "paper_link", "Paper or documentation link", _K.URL, False),
    Question("C6", "context", "code_link", "Code or data link", _K.URL, False),
    Question("C7", "context", "purposes", "Intended purposes", _K.ENUM_MANY, True,
             vocabulary="purpose"),
    Question("S1", "scope", "capabilities", "Capabilities and principles tested",
             _K.TEXT_LIST, True),
    Question("S2", "scope", "model_properties", "Model properties measured",
             _K.ENUM_MANY, True, vocabulary="model_property"),
    Question("S3", "scope", "input_modality", "Input modality", _K.ENUM_MANY, True,
             vocabulary="modality"),
    Question("S4", "scope", "output_modality", "Output modality", _K.ENUM_MANY, True,
             vocabulary="modality"),
    Question("T1", "structure", "input_sources", "Input sources", _K.ENUM_MANY, True,
             vocabulary="input_source"),
    Question("T2", "structure", "output_sources", "Output label sources",
             _K.ENUM_MANY, True, vocabulary="output_source"),
    Question("T3", "structure", "size", "Size", _K.STRUCTURED, False),
    Question("T4", "structure", "splits", "Splits", _K.SPLIT_LIST, False),
    Question("T5", "structure", "design", "Design", _K.ENUM_ONE, True,
             vocabulary="design"),
    Question("T6", "structure", "dataset_refs", "Component datasets and references",
             _K.TEXT_LIST, False),
    Question("M1", "method", "judges", "Judge types", _K.ENUM_MANY, True,
             vocabulary="judge"),
    Question("M2", "method", "judge_details", "Judge details", _K.STRUCTURED, False,
             visible_if=VisibleIf("M1", MODEL_JUDGE_TOKENS)),
    Question("M3", "method", "protocol", "Evaluation protocol", _K.STEP_LIST, True),
    Question("M4", "method", "model_access", "Model access required", _K.ENUM_ONE, True,
             vocabulary="model_access"),
    Question("M5", "method", "heldout", "Held-out private test set", _K.FLAG, True,
             sub_answer=SubAnswer("heldout_details", "heldout_details",
                                  "Held-out set details",
                                  VisibleIf("M5", frozenset({"true"})))),
    Question("A1", "alignment", "validation", "Alignment validation", _K.STRUCTURED, False),
    Question("A2", "alignment", "baselines", "Baseline comparisons", _K.STRUCTURED, False),
    Question("A3", "alignment", "robustness", "Robustness measures", _K.STRUCTURED, False),
    Question("A4", "alignment", "limitations", "Known limitations", _K.TEXT_LIST, False),
    Question("A5", "alignment", "similar_evals", "Related evaluations", _K.TEXT_LIST, False),
)


@dataclass(frozen=True)
class QuestionCatalog:
    questions: tuple[Question, ...]

    def __len__(self) -> int:
        return len(self.questions)

    def __iter__(self):
        return iter(self.questions)

    def __getitem__(self, question_id: str) -> Question:
        q = self._index().get(question_id)
        if q is None:
            raise UnknownQuestionError(question_id)
        return q

    def get(self, question_id: str) -> Question | None:
        return self._index().get(question_id)

    def _index(self) -> dict[str, Question]:
        index = getattr(self, "_by_id", None)
        if index is None:
            index = {q.id: q for q in self.questions}
            object.__setattr__(self, "_by_id", index)
        return index

    def in_dimension(self, dimension: str) -> tuple[Question, ...]:
        return tuple(q for q in self.questions if q.dimension == dimension)

    def mandatory_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.questions if q.mandatory)

    def section_names(self) -> tuple[str, ...]:
        return tuple(SECTION_NAMES[d] for d in DIMENSIONS)


CATALOG = QuestionCatalog(_QUESTIONS)


def catalog() -> QuestionCatalog:
    """The questionnaire; identical on every call."""
    return CATALOG


# --- answer access -------------------------------------------------------

def answer(fs: Factsheet, question_id: str):
    """The raw model value behind a question, answered or not."""
    q = CATALOG[question_id]
    return getattr(getattr(fs, q.dimension), q.attr)


def is_answered(fs: Factsheet, question_id: str) -> bool:
    q = CATALOG[question_id]
    value = answer(fs, question_id)
    if q.answer_kind in (_K.ENUM_MANY, _K.TEXT_LIST, _K.SPLIT_LIST, _K.STEP_LIST):
        return len(value) > 0
    return value is not None


def answer_tokens(fs: Factsheet, question_id: str) -> frozenset[str]:
    """The answer viewed as a token set; empty when unanswered.

    Flags read as {"true"} or {"false"} so visibility predicates have a
    single shape.
    """
    q = CATALOG[question_id]
    value = answer(fs, question_id)
    if q.answer_kind == _K.ENUM_MANY:
        return frozenset(t.token for t in value)
    if q.answer_kind == _K.ENUM_ONE:
        return frozenset() if value is None else frozenset({value.token})
    if q.answer_kind == _K.FLAG:
        if value is None:
            return frozenset()
        return frozenset({"true" if value else "false"})
    return frozenset()


def _holds(fs: Factsheet, predicate: VisibleIf) -> bool:
    return bool(answer_tokens(fs, predicate.question_id) & predicate.contains_any)


def is_applicable(fs: Factsheet, question_id: str) -> bool:
    q = CATALOG[question_id]
    return q.visible_if is None or _holds(fs, q.visible_if)


def applicable_ids(fs: Factsheet) -> tuple[str, ...]:
    return tuple(q.id for q in CATALOG if is_applicable(fs, q.id))


def detail_visible(fs: Factsheet, question_id: str) -> bool:
    """Whether the question's sub-answer applies for this sheet."""
    q = CATALOG[question_id]
    return q.sub_answer is not None and _holds(fs, q.sub_answer.visible_if)


def detail_answer(fs: Factsheet, question_id: str):
    q = CATALOG[question_id]
    if q.sub_answer is None:
        return None
    return getattr(getattr(fs, q.dimension), q.sub_answer.attr)


def answer_text(fs: Factsheet, question_id: str) -> str | None:
    """One-line human form of the answer; None when unanswered."""
    q = CATALOG[question_id]
    if not is_answered(fs, question_id):
        return None
    value = answer(fs, question_id)
    kind = q.answer_kind
    if kind in (_K.TEXT, _K.LONG_TEXT, _K.URL, _K.DATE):
        return value
    if kind == _K.FLAG:
        return "Yes" if value else "No"
    if kind == _K.ENUM_ONE:
        return value.raw
    if kind == _K.ENUM_MANY:
        return "; ".join(t.raw for t in value)
    if kind in (_K.TEXT_LIST, _K.STEP_LIST):
        return "; ".join(value)
    if kind == _K.SPLIT_LIST:
        return "; ".join(f"{s.kind}: {s.description}" for s in value)
    if isinstance(value, SizeSpec):
        return value.raw
    if isinstance(value, JudgeDetails):
        parts = [(n, getattr(value, n)) for n in
                 ("judge_model", "prompting_strategy", "temperature", "agreement")]
        return "; ".join(f"{n}={v}" for n, v in parts if v is not None)
    if isinstance(value, TaggedText):
        if value.tags:
            return f"{value.text} [{', '.join(value.tags)}]".strip()
        return value.text
    raise AssertionError(f"unhandled answer kind {kind}")


def map_vocab(question_id: str, raw: str) -> tuple[VocabTerm, ...]:
    """Map free text onto a vocabulary question's canonical tokens.

    The text splits on ";" into segments; each segment keeps the longest
    matching trigger's token or falls back to ``other``.  Tokens keep
    first-occurrence order; segments mapping to the same token collapse
    into one term whose raw text joins theirs with "; ".  Nonempty input
    always yields at least one term.
    """
    q = CATALOG.get(question_id)
    if q is None:
        raise UnknownQuestionError(question_id)
    if q.answer_kind not in (_K.ENUM_ONE, _K.ENUM_MANY):
        raise KindMismatchError(f"{question_id} does not take vocabulary answers")
    voc = VOCABULARIES[q.vocabulary]
    collected: dict[str, list[str]] = {}
    for segment in raw.split(";"):
        segment = segment.strip()
        if not segment:
            continue
        token = voc.match(segment) or OTHER
        collected.setdefault(token, []).append(segment)
    return tuple(VocabTerm(token, "; ".join(raws)) for token, raws in collected.items())


def with_answer(fs: Factsheet, question_id: str, value) -> Factsheet:
    """Copy of ``fs`` with the question answered; values per answer kind.

    Vocabulary answers accept tokens (strings) or VocabTerm values; list
    answers accept any iterable of entries.
    """
    q = CATALOG[question_id]
    kind = q.answer_kind
    if kind in (_K.TEXT, _K.LONG_TEXT, _K.URL, _K.DATE):
        coerced = value
    elif kind == _K.FLAG:
        coerced = bool(value)
    elif kind == _K.ENUM_ONE:
        coerced = term(q.vocabulary, value) if isinstance(value, str) else value
    elif kind == _K.ENUM_MANY:
        coerced = tuple(term(q.vocabulary, v) if isinstance(v, str) else v
                        for v in value)
    elif kind in (_K.TEXT_LIST, _K.STEP_LIST):
        coerced = tuple(value)
    elif kind == _K.SPLIT_LIST:
        coerced = tuple(value)
    else:
        coerced = value
    dim = getattr(fs, q.dimension)
    return replace(fs, **{q.dimension: replace(dim, **{q.attr: coerced})})


def without_answer(fs: Factsheet, question_id: str) -> Factsheet:
    """Copy of ``fs`` with the question cleared."""
    q = CATALOG[question_id]
    kind = q.answer_kind
    if kind in (_K.ENUM_MANY, _K.TEXT_LIST, _K.SPLIT_LIST, _K.STEP_LIST):
        cleared = ()
    else:
        cleared = None
    dim = getattr(fs, q.dimension)
    return replace(fs, **{q.dimension: replace(dim, **{q.attr: cleared})})
