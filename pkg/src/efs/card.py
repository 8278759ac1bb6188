"""Import and export of ``evaluationcard`` markup.

A card is a LaTeX-like environment: an option list for the bibliographic
fields and one backslash command per documented answer, each taking one
balanced-brace argument.  ``parse_card`` lexes that shape, ``import_card``
maps the free-text values onto a factsheet through the controlled
vocabularies, and ``export_card`` writes a card back from a factsheet.

Only ``\\{``, ``\\}`` and ``\\\\`` are treated as escapes; any other
backslash sequence is author content and passes through verbatim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import CATALOG, MODEL_JUDGE_TOKENS, map_vocab
from .diagnostics import Diagnostic, FactsheetParseError, ParseError, Severity, SourceSpan
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
)
from .vocab import VOCABULARIES

_ENV = "evaluationcard"
_BEGIN = f"\\begin{{{_ENV}}}"
_END = f"\\end{{{_ENV}}}"

_OPTION_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9-]*")
_COMMAND_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")
_JUDGE_MODEL_RE = re.compile(r":\s*([^:()]+)\)")
_PROTOCOL_STEP_RE = re.compile(r"\s*\d+\)\s*")


@dataclass(frozen=True)
class CardOption:
    name: str
    value: str
    span: SourceSpan


@dataclass(frozen=True)
class CardCommand:
    name: str
    body: str
    span: SourceSpan


@dataclass(frozen=True)
class Card:
    options: tuple[CardOption, ...]
    commands: tuple[CardCommand, ...]

    def option(self, name: str) -> str | None:
        for opt in self.options:
            if opt.name == name:
                return opt.value
        return None


@dataclass(frozen=True)
class ImportReport:
    """Outcome of a card import: the factsheet plus mapping notes."""

    factsheet: Factsheet
    notes: tuple[Diagnostic, ...] = ()


def _span_at(text: str, pos: int) -> SourceSpan:
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return SourceSpan(line, column)


def _scan_braced(text: str, open_pos: int) -> int | None:
    """Index just past the brace matching ``text[open_pos] == '{'``."""
    depth = 0
    i = open_pos
    while i < len(text):
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


def parse_card(text: str) -> Card:
    """Lex card markup into options and commands; spans index into text."""
    errors: list[ParseError] = []

    begin = text.find(_BEGIN)
    if begin < 0:
        raise FactsheetParseError(
            [ParseError("C001", f"missing {_BEGIN}", SourceSpan(1, 1))])
    end = text.find(_END, begin)
    if end < 0:
        raise FactsheetParseError(
            [ParseError("C001", f"missing {_END}", _span_at(text, begin))])

    pos = begin + len(_BEGIN)
    while pos < end and text[pos].isspace():
        pos += 1

    options: list[CardOption] = []
    if pos < end and text[pos] == "[":
        close = _options_end(text, pos, end)
        if close is None:
            errors.append(ParseError("C003", "unterminated option list",
                                     _span_at(text, pos)))
            pos = end
        else:
            options = _parse_options(text, pos + 1, close - 1, errors)
            pos = close

    commands: list[CardCommand] = []
    while pos < end:
        bs = text.find("\\", pos, end)
        if bs < 0:
            break
        name_match = _COMMAND_NAME_RE.match(text, bs + 1)
        if name_match is None:
            pos = bs + 2  # an escape or stray backslash; skip its target too
            continue
        after = name_match.end()
        while after < end and text[after] in " \t":
            after += 1
        if after >= end or text[after] != "{":
            pos = after  # a bare word; not a command
            continue
        body_end = _scan_braced(text, after)
        if body_end is None or body_end > end:
            errors.append(ParseError(
                "C002", f"\\{name_match.group(0)}: unbalanced braces",
                _span_at(text, bs)))
            break
        commands.append(CardCommand(name_match.group(0),
                                    text[after + 1:body_end - 1],
                                    _span_at(text, bs)))
        pos = body_end

    if errors:
        raise FactsheetParseError(errors)
    return Card(tuple(options), tuple(commands))


def _options_end(text: str, open_pos: int, limit: int) -> int | None:
    """Index just past the ``]`` closing an option list, brace aware."""
    depth = 0
    i = open_pos + 1
    while i < limit:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
        elif c == "]" and depth == 0:
            return i + 1
        i += 1
    return None


def _parse_options(text: str, start: int, stop: int,
                   errors: list[ParseError]) -> list[CardOption]:
    out: list[CardOption] = []
    i = start
    while i < stop:
        if text[i].isspace() or text[i] == ",":
            i += 1
            continue
        name_match = _OPTION_NAME_RE.match(text, i)
        if name_match is None:
            errors.append(ParseError("C003", "expected an option name",
                                     _span_at(text, i)))
            return out
        name = name_match.group(0)
        i = name_match.end()
        while i < stop and text[i].isspace():
            i += 1
        if i >= stop or text[i] != "=":
            errors.append(ParseError("C003", f"option {name}: expected '='",
                                     _span_at(text, i if i < stop else stop - 1)))
            return out
        i += 1
        while i < stop and text[i].isspace():
            i += 1
        if i >= stop or text[i] != "{":
            errors.append(ParseError(
                "C003", f"option {name}: expected a braced value",
                _span_at(text, i if i < stop else stop - 1)))
            return out
        value_end = _scan_braced(text, i)
        if value_end is None or value_end > stop:
            errors.append(ParseError("C003", f"option {name}: unbalanced braces",
                                     _span_at(text, i)))
            return out
        out.append(CardOption(name, text[i + 1:value_end - 1],
                              _span_at(text, name_match.start())))
        i = value_end
    return out


def unescape(value: str) -> str:
    """Translate the three card escapes; leave other sequences alone."""
    out: list[str] = []
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\" and i + 1 < len(value) and value[i + 1] in "{}\\":
            out.append(value[i + 1])
            i += 2
            continue
        out.append(c)
        i += 1
    return "".join(out)


def escape(value: str) -> str:
    return (value.replace("\\", "\\\\")
            .replace("{", "\\{")
            .replace("}", "\\}"))


# ---------------------------------------------------------------------------
# Import

_OPTION_QUESTIONS = {
    "title": "C1",
    "subtitle": "C2",
    "authors": "C3",
    "date": "C4",
    "link": "C5",
    "code-link": "C6",
}

_COMMAND_QUESTIONS = {
    "Purpose": "C7",
    "PrinciplesTested": "S1",
    "FunctionalProps": "S2",
    "InputModality": "S3",
    "OutputModality": "S4",
    "InputSource": "T1",
    "OutputSource": "T2",
    "Size": "T3",
    "Splits": "T4",
    "Design": "T5",
    "Judge": "M1",
    "Protocol": "M3",
    "ModelAccess": "M4",
    "HasHeldout": "M5",
    "HeldoutDetails": "M5",
    "AlignmentValidation": "A1",
    "BaselineModels": "A2",
    "RobustnessMeasures": "A3",
    "KnownLimitations": "A4",
    "BenchmarksList": "A5",
}

# Scan longer category names first so "very large" never reads as "large".
_SIZE_KEYWORDS = ("infinite", "very large", "large", "medium", "small")
_SIZE_TOKENS = {"infinite": "infinite", "very large": "very_large",
                "large": "large", "medium": "medium", "small": "small"}
_COUNT_RE = re.compile(r"\d[\d,]*(?:\.\d+)?")
_MULTIPLIERS = (("million", 1e6), ("billion", 1e9), ("thousand", 1e3),
                ("M", 1e6), ("B", 1e9), ("K", 1e3), ("k", 1e3))

_SPLIT_KEYWORDS = (("finetune_dev", ("fine-tun", "development")),
                   ("validation", ("validation",)),
                   ("private_test", ("private", "hidden")),
                   ("test", ("test",)))


def _split_semicolons(body: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in body.split(";") if p.strip())


def _parse_size(body: str) -> SizeSpec | None:
    low = body.lower()
    for keyword in _SIZE_KEYWORDS:
        at = low.find(keyword)
        if at < 0:
            continue
        return SizeSpec(_SIZE_TOKENS[keyword],
                        _extract_count(body, at + len(keyword)), body)
    return None


def _extract_count(body: str, after: int) -> int | None:
    """First integer after the category word, skipping its parenthetical.

    The parenthetical restates the category bounds ("Large (>100K)"), so
    counting starts after it; "14 million" or "1.2M" style multipliers
    apply when they directly follow the number.
    """
    rest = body[after:]
    probe = rest.lstrip()
    if probe.startswith("("):
        close = probe.find(")")
        if close >= 0:
            rest = probe[close + 1:]
    m = _COUNT_RE.search(rest)
    if m is None:
        return None
    value = float(m.group(0).replace(",", ""))
    tail = rest[m.end():].lstrip()
    for word, factor in _MULTIPLIERS:
        if tail.startswith(word) and not tail[len(word):len(word) + 1].isalpha():
            value *= factor
            break
    return int(round(value))


def _parse_split_line(line: str) -> SplitSpec | None:
    head, sep, desc = line.partition(":")
    key = head.lower() if sep else line.lower()
    for kind, keywords in _SPLIT_KEYWORDS:
        if any(k in key for k in keywords):
            description = desc.strip() if sep else line.strip()
            if description:
                return SplitSpec(kind, description)
            return None
    return None


def _protocol_steps(body: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in _PROTOCOL_STEP_RE.split(body) if p.strip())


class _Importer:
    def __init__(self) -> None:
        self.notes: list[Diagnostic] = []
        self.extensions: list[tuple[str, str]] = []

    def note(self, code: str, message: str, qid: str | None,
             span: SourceSpan | None) -> None:
        self.notes.append(Diagnostic(code, Severity.NOTE, message,
                                     question_id=qid, span=span))

    def extend(self, key: str, value: str) -> None:
        held = dict(self.extensions)
        if key in held:  # second stash under one key keeps both texts
            self.extensions = [(k, v if k != key else v + "\n" + value)
                               for k, v in self.extensions]
        else:
            self.extensions.append((key, value))


def import_card(text: str) -> ImportReport:
    """Map card markup onto a factsheet.

    Free text goes through the vocabularies; whatever cannot be mapped is
    preserved under ``[x-extensions]`` and reported as a note, so the
    import never silently drops author content.
    """
    card = parse_card(text)
    imp = _Importer()

    fields: dict[str, object] = {}
    seen: set[str] = set()

    for opt in card.options:
        value = unescape(opt.value).strip()
        if opt.name not in _OPTION_QUESTIONS:
            imp.extend(f"x-{opt.name.lower()}", value)
            imp.note("N-I001", f"unknown option {opt.name!r} kept as an extension",
                     None, opt.span)
            continue
        if opt.name in seen:
            imp.note("N-I005", f"duplicate option {opt.name!r} dropped",
                     _OPTION_QUESTIONS[opt.name], opt.span)
            continue
        seen.add(opt.name)
        if value:
            fields[opt.name] = value

    for cmd in card.commands:
        body = unescape(cmd.body).strip()
        if cmd.name not in _COMMAND_QUESTIONS:
            imp.extend(f"x-{cmd.name.lower()}", body)
            imp.note("N-I001", f"unknown command \\{cmd.name} kept as an extension",
                     None, cmd.span)
            continue
        if cmd.name in seen:
            imp.note("N-I005", f"duplicate \\{cmd.name} dropped",
                     _COMMAND_QUESTIONS[cmd.name], cmd.span)
            continue
        seen.add(cmd.name)
        if body:
            _import_command(cmd.name, body, cmd.span, fields, imp)

    fs = _build(fields, imp)
    for qid in CATALOG.mandatory_ids():
        covered = {name for name, q in _OPTION_QUESTIONS.items() if q == qid}
        covered |= {name for name, q in _COMMAND_QUESTIONS.items() if q == qid}
        if not covered & seen:
            imp.note("N-I007", f"{qid} is mandatory but the card does not cover it",
                     qid, None)
    return ImportReport(fs, tuple(imp.notes))


def _import_vocab(qid: str, body: str, span: SourceSpan, imp: _Importer) -> tuple:
    terms = map_vocab(qid, body)
    unmatched = [t.raw for t in terms if t.token == "other"]
    if unmatched:
        imp.note("N-I002", "no vocabulary match for "
                 + "; ".join(repr(u) for u in unmatched), qid, span)
    return terms


def _import_command(name: str, body: str, span: SourceSpan,
                    fields: dict[str, object], imp: _Importer) -> None:
    qid = _COMMAND_QUESTIONS[name]
    if name in ("Purpose", "FunctionalProps", "InputModality", "OutputModality",
                "InputSource", "OutputSource", "Judge"):
        fields[name] = _import_vocab(qid, body, span, imp)
    elif name in ("PrinciplesTested", "KnownLimitations", "BenchmarksList"):
        fields[name] = _split_semicolons(body)
    elif name == "Size":
        size = _parse_size(body)
        if size is None:
            imp.extend("x-size", body)
            imp.note("N-I003", "no size category recognized", qid, span)
        else:
            fields[name] = size
    elif name == "Splits":
        splits: list[SplitSpec] = []
        leftovers: list[str] = []
        for line in (ln.strip() for ln in body.split("\n") if ln.strip()):
            parsed = _parse_split_line(line)
            if parsed is None or any(s.kind == parsed.kind for s in splits):
                leftovers.append(line)
            else:
                splits.append(parsed)
        if splits:
            fields[name] = tuple(splits)
        if leftovers:
            imp.extend("x-splits", "\n".join(leftovers))
            imp.note("N-I004", f"{len(leftovers)} split line(s) kept as an "
                     "extension", qid, span)
    elif name == "Design":
        token = VOCABULARIES["design"].match(body)
        if token is None:
            imp.extend("x-design", body)
            imp.note("N-I003", "no design category recognized", qid, span)
        else:
            fields[name] = VocabTerm(token, body)
    elif name == "Protocol":
        fields[name] = _protocol_steps(body)
    elif name == "ModelAccess":
        token = VOCABULARIES["model_access"].match(body)
        if token is None:
            imp.extend("x-modelaccess", body)
            imp.note("N-I003", "no access category recognized", qid, span)
        else:
            fields[name] = VocabTerm(token, body)
    elif name == "HasHeldout":
        flag = body.lower()
        if flag in ("true", "yes"):
            fields[name] = True
        elif flag in ("false", "no"):
            fields[name] = False
        else:
            imp.extend("x-hasheldout", body)
            imp.note("N-I006", f"M5: flag value {body!r} not recognized",
                     qid, span)
    elif name in ("AlignmentValidation", "BaselineModels", "RobustnessMeasures"):
        fields[name] = TaggedText(body)
    else:  # HeldoutDetails
        fields[name] = body


def _judge_details(terms: tuple[VocabTerm, ...]) -> JudgeDetails | None:
    for t in terms:
        if t.token not in MODEL_JUDGE_TOKENS:
            continue
        names = _JUDGE_MODEL_RE.findall(t.raw)
        if names and names[-1].strip():
            return JudgeDetails(judge_model=names[-1].strip())
    return None


def _build(fields: dict[str, object], imp: _Importer) -> Factsheet:
    get = fields.get
    judges = get("Judge", ())
    return Factsheet(
        context=ContextDim(
            title=get("title"),
            subtitle=get("subtitle"),
            authors=get("authors"),
            release_date=get("date"),
            paper_link=get("link"),
            code_link=get("code-link"),
            purposes=get("Purpose", ()),
        ),
        scope=ScopeDim(
            capabilities=get("PrinciplesTested", ()),
            model_properties=get("FunctionalProps", ()),
            input_modality=get("InputModality", ()),
            output_modality=get("OutputModality", ()),
        ),
        structure=StructureDim(
            input_sources=get("InputSource", ()),
            output_sources=get("OutputSource", ()),
            size=get("Size"),
            splits=get("Splits", ()),
            design=get("Design"),
            dataset_refs=(),
        ),
        method=MethodDim(
            judges=judges,
            judge_details=_judge_details(judges),
            protocol=get("Protocol", ()),
            model_access=get("ModelAccess"),
            heldout=get("HasHeldout"),
            heldout_details=get("HeldoutDetails"),
        ),
        alignment=AlignmentDim(
            validation=get("AlignmentValidation"),
            baselines=get("BaselineModels"),
            robustness=get("RobustnessMeasures"),
            limitations=get("KnownLimitations", ()),
            similar_evals=get("BenchmarksList", ()),
        ),
        extensions=tuple(imp.extensions),
    )


# ---------------------------------------------------------------------------
# Export

_EXPORT_OPTIONS = ("title", "subtitle", "authors", "link", "code-link", "date")

_EXPORT_COMMANDS = ("Purpose", "PrinciplesTested", "FunctionalProps",
                    "InputModality", "OutputModality", "InputSource",
                    "OutputSource", "Size", "Splits", "Design", "Judge",
                    "Protocol", "ModelAccess", "HasHeldout", "HeldoutDetails",
                    "AlignmentValidation", "BaselineModels",
                    "RobustnessMeasures", "KnownLimitations", "BenchmarksList")


def _join_terms(terms: tuple[VocabTerm, ...]) -> str | None:
    return "; ".join(t.raw for t in terms) if terms else None


def _join_texts(values: tuple[str, ...]) -> str | None:
    return "; ".join(values) if values else None


def _tagged_text(value: TaggedText | None) -> str | None:
    if value is None or not value.text.strip():
        return None
    return value.text


def _export_values(fs: Factsheet) -> dict[str, str | None]:
    split_kind = VOCABULARIES["split_kind"]
    splits = "\n".join(f"{split_kind.display_name(s.kind)}: {s.description}"
                       for s in fs.structure.splits) or None
    protocol = "\n".join(f"{i}) {step}"
                         for i, step in enumerate(fs.method.protocol, 1)) or None
    heldout = fs.method.heldout
    return {
        "title": fs.context.title,
        "subtitle": fs.context.subtitle,
        "authors": fs.context.authors,
        "link": fs.context.paper_link,
        "code-link": fs.context.code_link,
        "date": fs.context.release_date,
        "Purpose": _join_terms(fs.context.purposes),
        "PrinciplesTested": _join_texts(fs.scope.capabilities),
        "FunctionalProps": _join_terms(fs.scope.model_properties),
        "InputModality": _join_terms(fs.scope.input_modality),
        "OutputModality": _join_terms(fs.scope.output_modality),
        "InputSource": _join_terms(fs.structure.input_sources),
        "OutputSource": _join_terms(fs.structure.output_sources),
        "Size": fs.structure.size.raw if fs.structure.size else None,
        "Splits": splits,
        "Design": fs.structure.design.raw if fs.structure.design else None,
        "Judge": _join_terms(fs.method.judges),
        "Protocol": protocol,
        "ModelAccess": fs.method.model_access.raw if fs.method.model_access else None,
        "HasHeldout": None if heldout is None else ("true" if heldout else "false"),
        "HeldoutDetails": fs.method.heldout_details,
        "AlignmentValidation": _tagged_text(fs.alignment.validation),
        "BaselineModels": _tagged_text(fs.alignment.baselines),
        "RobustnessMeasures": _tagged_text(fs.alignment.robustness),
        "KnownLimitations": _join_texts(fs.alignment.limitations),
        "BenchmarksList": _join_texts(fs.alignment.similar_evals),
    }


def export_card(fs: Factsheet) -> str:
    """Card markup for a factsheet.  Extension entries are not exported;
    the card grammar has no home for them."""
    values = _export_values(fs)
    options = [(name, values[name]) for name in _EXPORT_OPTIONS
               if values[name] is not None]

    out: list[str] = []
    if options:
        out.append(_BEGIN + "[")
        for i, (name, value) in enumerate(options):
            comma = "," if i < len(options) - 1 else ""
            out.append(f"  {name}={{{escape(value)}}}{comma}")
        out.append("]")
    else:
        out.append(_BEGIN)
    out.append("")
    for name in _EXPORT_COMMANDS:
        value = values[name]
        if value is not None:
            out.append(f"  \\{name}{{{escape(value)}}}")
    out.append("")
    out.append(_END)
    return "\n".join(out) + "\n"
