"""Typed factsheet model.

A factsheet documents one evaluation along five dimensions, each held by
its own frozen dataclass: context (what and who), scope (what it
evaluates), structure (how it is built), method (how it runs) and
alignment (how its quality is known).  Absent answers are ``None`` or
empty tuples; constructors reject malformed values so that every
instance in the program is valid by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .vocab import OTHER, VOCABULARIES

EFS_VERSION = "1.0"

_VERSION_RE = re.compile(r"^1\.\d+$")
_TOKEN_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_EXTENSION_KEY_RE = re.compile(r"^x-[a-z0-9][a-z0-9_-]*$")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def _check_text(value: str, where: str) -> None:
    _require(isinstance(value, str) and value.strip() != "",
             f"{where}: text must be a nonempty string")
    _require("\r" not in value, f"{where}: text must not contain carriage returns")


def _check_optional_text(value: str | None, where: str) -> None:
    if value is not None:
        _check_text(value, where)


def _check_text_tuple(values: tuple, where: str) -> None:
    _require(isinstance(values, tuple), f"{where}: expected a tuple")
    for v in values:
        _check_text(v, where)


def _check_terms(terms: tuple, vocab_name: str, where: str) -> None:
    _require(isinstance(terms, tuple), f"{where}: expected a tuple of terms")
    voc = VOCABULARIES[vocab_name]
    seen = set()
    for t in terms:
        _require(isinstance(t, VocabTerm), f"{where}: expected VocabTerm values")
        _require(t.token in voc,
                 f"{where}: token {t.token!r} is not in the {vocab_name} vocabulary")
        _require(t.token not in seen, f"{where}: duplicate token {t.token!r}")
        seen.add(t.token)


def _check_term(term_: "VocabTerm | None", vocab_name: str, where: str) -> None:
    if term_ is None:
        return
    _require(isinstance(term_, VocabTerm), f"{where}: expected a VocabTerm")
    _require(term_.token in VOCABULARIES[vocab_name],
             f"{where}: token {term_.token!r} is not in the {vocab_name} vocabulary")


def _check_tags(tags: tuple, vocab_name: str, where: str) -> None:
    _require(isinstance(tags, tuple), f"{where}: expected a tuple of tags")
    voc = VOCABULARIES[vocab_name]
    seen = set()
    for tag in tags:
        _require(isinstance(tag, str) and tag in voc.tokens,
                 f"{where}: tag {tag!r} is not in the {vocab_name} vocabulary")
        _require(tag not in seen, f"{where}: duplicate tag {tag!r}")
        seen.add(tag)


@dataclass(frozen=True)
class VocabTerm:
    """A vocabulary answer: canonical token plus the verbatim source text."""

    token: str
    raw: str

    def __post_init__(self) -> None:
        _require(isinstance(self.token, str) and bool(_TOKEN_RE.match(self.token)),
                 f"VocabTerm: malformed token {self.token!r}")
        _check_text(self.raw, "VocabTerm.raw")


def term(vocab_name: str, token: str) -> VocabTerm:
    """Native term for ``token``: its raw text is the display name."""
    voc = VOCABULARIES[vocab_name]
    _require(token in voc, f"{token!r} is not in the {vocab_name} vocabulary")
    return VocabTerm(token, voc.display_name(token))


@dataclass(frozen=True)
class SizeSpec:
    """Declared size: a closed category, an optional count, the source text."""

    category: str
    count: int | None
    raw: str

    def __post_init__(self) -> None:
        _require(self.category in VOCABULARIES["size_category"].tokens,
                 f"SizeSpec: unknown category {self.category!r}")
        _require(self.count is None or (isinstance(self.count, int)
                                        and not isinstance(self.count, bool)
                                        and self.count >= 0),
                 "SizeSpec: count must be a nonnegative integer or None")
        _check_text(self.raw, "SizeSpec.raw")


@dataclass(frozen=True)
class SplitSpec:
    kind: str
    description: str

    def __post_init__(self) -> None:
        _require(self.kind in VOCABULARIES["split_kind"].tokens,
                 f"SplitSpec: unknown kind {self.kind!r}")
        _check_text(self.description, "SplitSpec.description")
        _require("\n" not in self.description,
                 "SplitSpec.description: must be a single line")


@dataclass(frozen=True)
class JudgeDetails:
    """Detail block for model-based judges.  At least one field is set."""

    judge_model: str | None = None
    prompting_strategy: str | None = None
    temperature: str | None = None
    agreement: str | None = None

    def __post_init__(self) -> None:
        for name in ("judge_model", "prompting_strategy", "temperature", "agreement"):
            _check_optional_text(getattr(self, name), f"JudgeDetails.{name}")
        _require(any(getattr(self, n) is not None for n in
                     ("judge_model", "prompting_strategy", "temperature", "agreement")),
                 "JudgeDetails: at least one field must be set")


@dataclass(frozen=True)
class TaggedText:
    """Free text with optional closed-set tags; at least one part present."""

    text: str = ""
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _require(isinstance(self.text, str) and "\r" not in self.text,
                 "TaggedText: text must be a string without carriage returns")
        _require(self.text.strip() != "" or len(self.tags) > 0,
                 "TaggedText: text or tags must be present")


@dataclass(frozen=True)
class ContextDim:
    title: str | None = None
    subtitle: str | None = None
    authors: str | None = None
    release_date: str | None = None
    paper_link: str | None = None
    code_link: str | None = None
    purposes: tuple[VocabTerm, ...] = ()

    def __post_init__(self) -> None:
        for name in ("title", "subtitle", "authors", "release_date",
                     "paper_link", "code_link"):
            _check_optional_text(getattr(self, name), f"context.{name}")
        _check_terms(self.purposes, "purpose", "context.purposes")


@dataclass(frozen=True)
class ScopeDim:
    capabilities: tuple[str, ...] = ()
    model_properties: tuple[VocabTerm, ...] = ()
    input_modality: tuple[VocabTerm, ...] = ()
    output_modality: tuple[VocabTerm, ...] = ()

    def __post_init__(self) -> None:
        _check_text_tuple(self.capabilities, "scope.capabilities")
        _check_terms(self.model_properties, "model_property", "scope.model_properties")
        _check_terms(self.input_modality, "modality", "scope.input_modality")
        _check_terms(self.output_modality, "modality", "scope.output_modality")


@dataclass(frozen=True)
class StructureDim:
    input_sources: tuple[VocabTerm, ...] = ()
    output_sources: tuple[VocabTerm, ...] = ()
    size: SizeSpec | None = None
    splits: tuple[SplitSpec, ...] = ()
    design: VocabTerm | None = None
    dataset_refs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _check_terms(self.input_sources, "input_source", "structure.input_sources")
        _check_terms(self.output_sources, "output_source", "structure.output_sources")
        _require(self.size is None or isinstance(self.size, SizeSpec),
                 "structure.size: expected a SizeSpec or None")
        _require(isinstance(self.splits, tuple), "structure.splits: expected a tuple")
        kinds = set()
        for s in self.splits:
            _require(isinstance(s, SplitSpec), "structure.splits: expected SplitSpec values")
            _require(s.kind not in kinds,
                     f"structure.splits: duplicate split kind {s.kind!r}")
            kinds.add(s.kind)
        _check_term(self.design, "design", "structure.design")
        _check_text_tuple(self.dataset_refs, "structure.dataset_refs")


@dataclass(frozen=True)
class MethodDim:
    judges: tuple[VocabTerm, ...] = ()
    judge_details: JudgeDetails | None = None
    protocol: tuple[str, ...] = ()
    model_access: VocabTerm | None = None
    heldout: bool | None = None
    heldout_details: str | None = None

    def __post_init__(self) -> None:
        _check_terms(self.judges, "judge", "method.judges")
        _require(self.judge_details is None or isinstance(self.judge_details, JudgeDetails),
                 "method.judge_details: expected a JudgeDetails or None")
        _check_text_tuple(self.protocol, "method.protocol")
        _check_term(self.model_access, "model_access", "method.model_access")
        _require(self.heldout is None or isinstance(self.heldout, bool),
                 "method.heldout: expected a bool or None")
        _check_optional_text(self.heldout_details, "method.heldout_details")


@dataclass(frozen=True)
class AlignmentDim:
    validation: TaggedText | None = None
    baselines: TaggedText | None = None
    robustness: TaggedText | None = None
    limitations: tuple[str, ...] = ()
    similar_evals: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name, vocab_name in (("validation", "validation_tag"),
                                 ("baselines", "baseline_tag"),
                                 ("robustness", "robustness_tag")):
            value = getattr(self, name)
            _require(value is None or isinstance(value, TaggedText),
                     f"alignment.{name}: expected a TaggedText or None")
            if value is not None:
                _check_tags(value.tags, vocab_name, f"alignment.{name}.tags")
        _check_text_tuple(self.limitations, "alignment.limitations")
        _check_text_tuple(self.similar_evals, "alignment.similar_evals")


@dataclass(frozen=True)
class Factsheet:
    efs_version: str = EFS_VERSION
    context: ContextDim = field(default_factory=ContextDim)
    scope: ScopeDim = field(default_factory=ScopeDim)
    structure: StructureDim = field(default_factory=StructureDim)
    method: MethodDim = field(default_factory=MethodDim)
    alignment: AlignmentDim = field(default_factory=AlignmentDim)
    extensions: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        _require(bool(_VERSION_RE.match(self.efs_version)),
                 f"Factsheet: unsupported version {self.efs_version!r}")
        _require(isinstance(self.context, ContextDim), "Factsheet: bad context")
        _require(isinstance(self.scope, ScopeDim), "Factsheet: bad scope")
        _require(isinstance(self.structure, StructureDim), "Factsheet: bad structure")
        _require(isinstance(self.method, MethodDim), "Factsheet: bad method")
        _require(isinstance(self.alignment, AlignmentDim), "Factsheet: bad alignment")
        _require(isinstance(self.extensions, tuple), "Factsheet: extensions must be a tuple")
        seen = set()
        for pair in self.extensions:
            _require(isinstance(pair, tuple) and len(pair) == 2,
                     "Factsheet: extensions must be (key, value) pairs")
            key, value = pair
            _require(isinstance(key, str) and bool(_EXTENSION_KEY_RE.match(key)),
                     f"Factsheet: extension key {key!r} must match x-<name>")
            _require(isinstance(value, str) and "\r" not in value,
                     "Factsheet: extension values must be strings without carriage returns")
            _require(key not in seen, f"Factsheet: duplicate extension key {key!r}")
            seen.add(key)

    def extension_map(self) -> dict[str, str]:
        return dict(self.extensions)


def empty_factsheet() -> Factsheet:
    """A factsheet with no answers: the starting point for authoring."""
    return Factsheet()
