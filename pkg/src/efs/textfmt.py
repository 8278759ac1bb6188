"""Canonical text format and JSON interchange for factsheets.

The text format is line oriented.  Line one is the magic ``#%EFS 1.0``;
after it come the five dimension sections plus an optional
``[x-extensions]`` section, each holding ``key = value`` lines.  Strings
are double quoted with ``\\"``, ``\\\\`` and ``\\n`` escapes or spelled
as raw-line blocks between ``\"\"\"`` fences.  Vocabulary answers are bare
tokens, with ``"other: <text>"`` as the quoted escape hatch of open
vocabularies.  Flags are bare ``true``/``false``; counts are bare
integers.

``serialize_canonical`` emits one fixed spelling per factsheet: keys in
catalog order, no comments, no blank lines, a single trailing newline.
``parse_canonical`` accepts that spelling plus comments, blank lines and
loose spacing, and reports every recoverable error before raising.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .diagnostics import FactsheetParseError, ParseError, SourceSpan
from .model import (
    AlignmentDim,
    ContextDim,
    EFS_VERSION,
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
from .vocab import OTHER, VOCABULARIES

_MAGIC_RE = re.compile(r"^#%EFS (\d+\.\d+)$")
_SECTION_RE = re.compile(r"^\[([^\[\]]+)\]$")
_KEY_LINE_RE = re.compile(r"^([A-Za-z0-9_-]+)[ \t]*=[ \t]*(.*)$")
_EXTENSION_KEY_RE = re.compile(r"^x-[a-z0-9][a-z0-9_-]*$")
_COUNT_RE = re.compile(r"^\d+$")
_BLOCK_FENCE = '"""'


@dataclass(frozen=True)
class _KeySpec:
    """Shape of one key: its value kind, arity and vocabulary."""

    name: str
    kind: str  # text | vocab | token | flag | count | split
    repeat: bool = False
    vocab: str | None = None


def _keys(*specs: _KeySpec) -> dict[str, _KeySpec]:
    return {s.name: s for s in specs}


_SECTION_KEYS: dict[str, dict[str, _KeySpec]] = {
    "context": _keys(
        _KeySpec("title", "text"),
        _KeySpec("subtitle", "text"),
        _KeySpec("authors", "text"),
        _KeySpec("release_date", "text"),
        _KeySpec("paper_link", "text"),
        _KeySpec("code_link", "text"),
        _KeySpec("purpose", "vocab", repeat=True, vocab="purpose"),
    ),
    "scope": _keys(
        _KeySpec("capability", "text", repeat=True),
        _KeySpec("model_property", "vocab", repeat=True, vocab="model_property"),
        _KeySpec("input_modality", "vocab", repeat=True, vocab="modality"),
        _KeySpec("output_modality", "vocab", repeat=True, vocab="modality"),
    ),
    "structure": _keys(
        _KeySpec("input_source", "vocab", repeat=True, vocab="input_source"),
        _KeySpec("output_source", "vocab", repeat=True, vocab="output_source"),
        _KeySpec("size_category", "token", vocab="size_category"),
        _KeySpec("size_count", "count"),
        _KeySpec("size_raw", "text"),
        _KeySpec("split", "split", repeat=True),
        _KeySpec("design", "token", vocab="design"),
        _KeySpec("dataset_ref", "text", repeat=True),
    ),
    "method": _keys(
        _KeySpec("judge", "vocab", repeat=True, vocab="judge"),
        _KeySpec("judge_model", "text"),
        _KeySpec("judge_prompting", "text"),
        _KeySpec("judge_temperature", "text"),
        _KeySpec("judge_agreement", "text"),
        _KeySpec("protocol", "text", repeat=True),
        _KeySpec("model_access", "token", vocab="model_access"),
        _KeySpec("heldout", "flag"),
        _KeySpec("heldout_details", "text"),
    ),
    "alignment": _keys(
        _KeySpec("validation", "text"),
        _KeySpec("validation_tag", "token", repeat=True, vocab="validation_tag"),
        _KeySpec("baselines", "text"),
        _KeySpec("baseline_tag", "token", repeat=True, vocab="baseline_tag"),
        _KeySpec("robustness", "text"),
        _KeySpec("robustness_tag", "token", repeat=True, vocab="robustness_tag"),
        _KeySpec("limitation", "text", repeat=True),
        _KeySpec("similar_eval", "text", repeat=True),
    ),
}

_SECTION_ORDER = ("context", "scope", "structure", "method", "alignment")
_EXT_SECTION = "x-extensions"


# ---------------------------------------------------------------------------
# Parsing


class _Scan:
    """Mutable parse state: collected values, spans and errors."""

    def __init__(self) -> None:
        self.scalars: dict[tuple[str, str], tuple[object, SourceSpan]] = {}
        self.lists: dict[tuple[str, str], list[tuple[object, SourceSpan]]] = {}
        self.extensions: list[tuple[str, str]] = []
        self.ext_keys: set[str] = set()
        self.errors: list[ParseError] = []
        self.version = EFS_VERSION

    def fail(self, code: str, message: str, span: SourceSpan) -> None:
        self.errors.append(ParseError(code, message, span))


def _lex_quoted(text: str, line: int, col: int) -> tuple[str | None, ParseError | None]:
    """Decode a double-quoted value starting at ``text[0] == '\"'``."""
    out: list[str] = []
    i = 1
    while i < len(text):
        c = text[i]
        if c == '"':
            if text[i + 1:].strip():
                return None, ParseError(
                    "P004", "unexpected text after closing quote",
                    SourceSpan(line, col + i + 1))
            return "".join(out), None
        if c == "\\":
            if i + 1 >= len(text):
                return None, ParseError("P004", "dangling escape at end of line",
                                        SourceSpan(line, col + i))
            nxt = text[i + 1]
            if nxt == '"':
                out.append('"')
            elif nxt == "\\":
                out.append("\\")
            elif nxt == "n":
                out.append("\n")
            else:
                return None, ParseError("P004", f"unknown escape \\{nxt}",
                                        SourceSpan(line, col + i, 2))
            i += 2
            continue
        out.append(c)
        i += 1
    return None, ParseError("P004", "unterminated string", SourceSpan(line, col))


def _split_lines(raw: str) -> list[str]:
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_other(content: str) -> str | None:
    """Extract the raw text of a quoted ``other: <text>`` value."""
    if not content.startswith("other:"):
        return None
    raw = content[len("other:"):]
    if raw.startswith(" "):
        raw = raw[1:]
    return raw if raw.strip() else None


def _vocab_value(spec: _KeySpec, value: str, line: int, col: int,
                 scan: _Scan) -> VocabTerm | None:
    voc = VOCABULARIES[spec.vocab or ""]
    if value.startswith('"'):
        content, err = _lex_quoted(value, line, col)
        if err is not None:
            scan.errors.append(err)
            return None
        raw = _parse_other(content or "")
        if raw is None or not voc.open:
            scan.fail("P005", f"{spec.name}: quoted values must be "
                      f"\"other: <text>\" on an open vocabulary",
                      SourceSpan(line, col, len(value)))
            return None
        return VocabTerm(OTHER, raw)
    if value == OTHER:
        scan.fail("P005", f"{spec.name}: bare 'other' needs its source text; "
                  "write \"other: <text>\"", SourceSpan(line, col, len(value)))
        return None
    if value not in voc.tokens:
        scan.fail("P005", f"{spec.name}: {value!r} is not a {voc.name} token",
                  SourceSpan(line, col, len(value)))
        return None
    return VocabTerm(value, voc.display_name(value))


def _token_value(spec: _KeySpec, value: str, line: int, col: int,
                 scan: _Scan) -> str | None:
    voc = VOCABULARIES[spec.vocab or ""]
    if value.startswith('"'):
        scan.fail("P005", f"{spec.name}: expected a bare {voc.name} token",
                  SourceSpan(line, col, len(value)))
        return None
    if value not in voc.tokens:
        scan.fail("P005", f"{spec.name}: {value!r} is not a {voc.name} token",
                  SourceSpan(line, col, len(value)))
        return None
    return value


def _split_value(value: str, line: int, col: int, scan: _Scan) -> SplitSpec | None:
    if not value.startswith('"'):
        scan.fail("P004", "split: expected a quoted \"<kind>: <description>\"",
                  SourceSpan(line, col, len(value)))
        return None
    content, err = _lex_quoted(value, line, col)
    if err is not None:
        scan.errors.append(err)
        return None
    head, sep, desc = (content or "").partition(":")
    if not sep:
        scan.fail("P004", "split: expected \"<kind>: <description>\"",
                  SourceSpan(line, col, len(value)))
        return None
    kind = head.strip()
    if desc.startswith(" "):
        desc = desc[1:]
    if kind not in VOCABULARIES["split_kind"].tokens:
        scan.fail("P005", f"split: {kind!r} is not a split kind",
                  SourceSpan(line, col, len(value)))
        return None
    if not desc.strip() or "\n" in desc:
        scan.fail("P004", "split: description must be nonempty single-line text",
                  SourceSpan(line, col, len(value)))
        return None
    return SplitSpec(kind, desc)


def _consume_block(lines: list[str], start: int, line_no: int,
                   scan: _Scan) -> tuple[str | None, int]:
    """Collect raw lines after a ``\"\"\"`` opener; returns (value, next index)."""
    body: list[str] = []
    i = start
    while i < len(lines):
        if lines[i].strip() == _BLOCK_FENCE:
            return "\n".join(body), i + 1
        body.append(lines[i])
        i += 1
    scan.fail("P004", "unterminated multiline block", SourceSpan(line_no, 1))
    return None, len(lines)


def parse_canonical(text: str) -> Factsheet:
    """Parse canonical text into a factsheet.

    Raises FactsheetParseError carrying every error found; recoverable
    problems do not stop the scan, so one pass reports them all.
    """
    scan = _Scan()
    lines = _split_lines(text)

    for idx, line in enumerate(lines):
        if "\r" in line:
            scan.fail("P004", "carriage return; the format is LF only",
                      SourceSpan(idx + 1, line.index("\r") + 1, 1))
            lines[idx] = line.replace("\r", "")

    if not lines:
        scan.fail("P001", "empty document; expected the #%EFS magic line",
                  SourceSpan(1, 1))
        raise FactsheetParseError(scan.errors)

    start = 0
    magic = _MAGIC_RE.match(lines[0])
    if magic is None:
        scan.fail("P001", "first line must be '#%EFS <version>'",
                  SourceSpan(1, 1, len(lines[0])))
        if lines[0].lstrip().startswith("#"):
            start = 1
    elif not magic.group(1).startswith("1."):
        scan.fail("P001", f"unsupported format version {magic.group(1)}",
                  SourceSpan(1, 1, len(lines[0])))
        start = 1
    else:
        scan.version = magic.group(1)
        start = 1

    section: str | None = None
    skipping = False
    i = start
    while i < len(lines):
        line_no = i + 1
        line = lines[i]
        i += 1
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue

        header = _SECTION_RE.match(stripped)
        if header is not None:
            name = header.group(1)
            if name in _SECTION_KEYS or name == _EXT_SECTION:
                section = name
                skipping = False
            else:
                scan.fail("P002", f"unknown section [{name}]",
                          SourceSpan(line_no, 1, len(stripped)))
                skipping = True
            continue

        key_match = _KEY_LINE_RE.match(stripped)
        if key_match is None:
            scan.fail("P004", "expected 'key = value' or a section header",
                      SourceSpan(line_no, 1, len(stripped)))
            continue
        if skipping:
            continue
        if section is None:
            scan.fail("P003", "key appears before any section header",
                      SourceSpan(line_no, 1, len(key_match.group(1))))
            continue

        key = key_match.group(1)
        value = key_match.group(2).strip()
        col = line.find(key_match.group(2)) + 1 if key_match.group(2) else len(line) + 1

        if section == _EXT_SECTION:
            if not _EXTENSION_KEY_RE.match(key):
                scan.fail("P003", f"extension keys must match x-<name>; got {key!r}",
                          SourceSpan(line_no, 1, len(key)))
                continue
            if value == _BLOCK_FENCE:
                block, i = _consume_block(lines, i, line_no, scan)
                if block is None:
                    break
                content: str | None = block
            elif value.startswith('"'):
                content, err = _lex_quoted(value, line_no, col)
                if err is not None:
                    scan.errors.append(err)
                    continue
            else:
                scan.fail("P004", "extension values must be quoted strings",
                          SourceSpan(line_no, col, len(value)))
                continue
            if key in scan.ext_keys:
                scan.fail("P006", f"duplicate extension key {key!r}",
                          SourceSpan(line_no, 1, len(key)))
                continue
            scan.ext_keys.add(key)
            scan.extensions.append((key, content or ""))
            continue

        spec = _SECTION_KEYS[section].get(key)
        if spec is None:
            scan.fail("P003", f"unknown key {key!r} in [{section}]",
                      SourceSpan(line_no, 1, len(key)))
            continue

        parsed: object | None
        if spec.kind == "text":
            if value == _BLOCK_FENCE:
                parsed, i = _consume_block(lines, i, line_no, scan)
                if parsed is None:
                    break
            elif value.startswith('"'):
                parsed, err = _lex_quoted(value, line_no, col)
                if err is not None:
                    scan.errors.append(err)
                    continue
            else:
                scan.fail("P004", f"{key}: expected a quoted string",
                          SourceSpan(line_no, col, len(value)))
                continue
            if parsed is not None and str(parsed).strip() == "":
                scan.fail("P004", f"{key}: text answers must be nonempty",
                          SourceSpan(line_no, col, len(value)))
                continue
        elif spec.kind == "vocab":
            parsed = _vocab_value(spec, value, line_no, col, scan)
            if parsed is None:
                continue
        elif spec.kind == "token":
            parsed = _token_value(spec, value, line_no, col, scan)
            if parsed is None:
                continue
        elif spec.kind == "flag":
            if value not in ("true", "false"):
                scan.fail("P004", f"{key}: expected bare true or false",
                          SourceSpan(line_no, col, len(value)))
                continue
            parsed = value == "true"
        elif spec.kind == "count":
            if not _COUNT_RE.match(value):
                scan.fail("P004", f"{key}: expected a bare nonnegative integer",
                          SourceSpan(line_no, col, len(value)))
                continue
            parsed = int(value)
        else:  # split
            parsed = _split_value(value, line_no, col, scan)
            if parsed is None:
                continue

        slot = (section, key)
        span = SourceSpan(line_no, col, len(value))
        if spec.repeat:
            scan.lists.setdefault(slot, []).append((parsed, span))
        else:
            if slot in scan.scalars:
                scan.fail("P006", f"duplicate key {key!r}",
                          SourceSpan(line_no, 1, len(key)))
                continue
            scan.scalars[slot] = (parsed, span)

    _check_split_kinds(scan)
    _check_size_shape(scan)
    if scan.errors:
        raise FactsheetParseError(scan.errors)
    return _assemble(scan)


def _check_split_kinds(scan: _Scan) -> None:
    seen: set[str] = set()
    for value, span in scan.lists.get(("structure", "split"), []):
        kind = value.kind  # type: ignore[union-attr]
        if kind in seen:
            scan.fail("P004", f"duplicate split kind {kind!r}", span)
        seen.add(kind)


def _check_size_shape(scan: _Scan) -> None:
    category = scan.scalars.get(("structure", "size_category"))
    for key in ("size_count", "size_raw"):
        entry = scan.scalars.get(("structure", key))
        if entry is not None and category is None:
            scan.fail("P004", f"{key} requires size_category", entry[1])


def _scalar(scan: _Scan, section: str, key: str) -> object | None:
    entry = scan.scalars.get((section, key))
    return entry[0] if entry is not None else None


def _texts(scan: _Scan, section: str, key: str) -> tuple[str, ...]:
    return tuple(str(v) for v, _ in scan.lists.get((section, key), []))


def _terms_from(scan: _Scan, section: str, key: str) -> tuple[VocabTerm, ...]:
    """Collected vocab terms with duplicates collapsed, keeping first."""
    out: list[VocabTerm] = []
    raws: dict[str, list[str]] = {}
    for value, _ in scan.lists.get((section, key), []):
        t = value  # type: ignore[assignment]
        if t.token in raws:
            if t.token == OTHER and t.raw not in raws[t.token]:
                raws[t.token].append(t.raw)
            continue
        raws[t.token] = [t.raw]
        out.append(t)
    return tuple(VocabTerm(t.token, "; ".join(raws[t.token])) for t in out)


def _tags_from(scan: _Scan, section: str, key: str) -> tuple[str, ...]:
    out: list[str] = []
    for value, _ in scan.lists.get((section, key), []):
        if value not in out:
            out.append(str(value))
    return tuple(out)


def _term_or_none(scan: _Scan, section: str, key: str,
                  vocab_name: str) -> VocabTerm | None:
    token = _scalar(scan, section, key)
    if token is None:
        return None
    return VocabTerm(str(token), VOCABULARIES[vocab_name].display_name(str(token)))


def _tagged(scan: _Scan, text_key: str, tag_key: str) -> TaggedText | None:
    text = _scalar(scan, "alignment", text_key)
    tags = _tags_from(scan, "alignment", tag_key)
    if text is None and not tags:
        return None
    return TaggedText(str(text) if text is not None else "", tags)


def _assemble(scan: _Scan) -> Factsheet:
    sc = scan
    category = _scalar(sc, "structure", "size_category")
    size = None
    if category is not None:
        raw = _scalar(sc, "structure", "size_raw")
        if raw is None:
            raw = VOCABULARIES["size_category"].display_name(str(category))
        count = _scalar(sc, "structure", "size_count")
        size = SizeSpec(str(category), count if count is None else int(count),  # type: ignore[arg-type]
                        str(raw))

    detail_fields = {
        "judge_model": _scalar(sc, "method", "judge_model"),
        "prompting_strategy": _scalar(sc, "method", "judge_prompting"),
        "temperature": _scalar(sc, "method", "judge_temperature"),
        "agreement": _scalar(sc, "method", "judge_agreement"),
    }
    details = None
    if any(v is not None for v in detail_fields.values()):
        details = JudgeDetails(**{k: (str(v) if v is not None else None)
                                  for k, v in detail_fields.items()})

    heldout = _scalar(sc, "method", "heldout")

    try:
        return Factsheet(
            efs_version=sc.version,
            context=ContextDim(
                title=_opt_str(_scalar(sc, "context", "title")),
                subtitle=_opt_str(_scalar(sc, "context", "subtitle")),
                authors=_opt_str(_scalar(sc, "context", "authors")),
                release_date=_opt_str(_scalar(sc, "context", "release_date")),
                paper_link=_opt_str(_scalar(sc, "context", "paper_link")),
                code_link=_opt_str(_scalar(sc, "context", "code_link")),
                purposes=_terms_from(sc, "context", "purpose"),
            ),
            scope=ScopeDim(
                capabilities=_texts(sc, "scope", "capability"),
                model_properties=_terms_from(sc, "scope", "model_property"),
                input_modality=_terms_from(sc, "scope", "input_modality"),
                output_modality=_terms_from(sc, "scope", "output_modality"),
            ),
            structure=StructureDim(
                input_sources=_terms_from(sc, "structure", "input_source"),
                output_sources=_terms_from(sc, "structure", "output_source"),
                size=size,
                splits=tuple(v for v, _ in sc.lists.get(("structure", "split"), [])),
                design=_term_or_none(sc, "structure", "design", "design"),
                dataset_refs=_texts(sc, "structure", "dataset_ref"),
            ),
            method=MethodDim(
                judges=_terms_from(sc, "method", "judge"),
                judge_details=details,
                protocol=_texts(sc, "method", "protocol"),
                model_access=_term_or_none(sc, "method", "model_access",
                                           "model_access"),
                heldout=bool(heldout) if heldout is not None else None,
                heldout_details=_opt_str(_scalar(sc, "method", "heldout_details")),
            ),
            alignment=AlignmentDim(
                validation=_tagged(sc, "validation", "validation_tag"),
                baselines=_tagged(sc, "baselines", "baseline_tag"),
                robustness=_tagged(sc, "robustness", "robustness_tag"),
                limitations=_texts(sc, "alignment", "limitation"),
                similar_evals=_texts(sc, "alignment", "similar_eval"),
            ),
            extensions=tuple(scan.extensions),
        )
    except ValueError as exc:
        raise FactsheetParseError(
            [ParseError("P004", str(exc), SourceSpan(1, 1))]) from exc


def _opt_str(value: object | None) -> str | None:
    return str(value) if value is not None else None


# ---------------------------------------------------------------------------
# Serialization


def _quote_inline(value: str) -> str:
    escaped = (value.replace("\\", "\\\\")
               .replace('"', '\\"')
               .replace("\n", "\\n"))
    return f'"{escaped}"'


def _emit_text(out: list[str], key: str, value: str | None) -> None:
    if value is None:
        return
    if "\n" in value and not any(ln.strip() == _BLOCK_FENCE
                                 for ln in value.split("\n")):
        out.append(f"{key} = {_BLOCK_FENCE}")
        out.extend(value.split("\n"))
        out.append(_BLOCK_FENCE)
    else:
        out.append(f"{key} = {_quote_inline(value)}")


def _emit_terms(out: list[str], key: str, terms: tuple[VocabTerm, ...]) -> None:
    for t in terms:
        if t.token == OTHER:
            out.append(f"{key} = {_quote_inline('other: ' + t.raw)}")
        else:
            out.append(f"{key} = {t.token}")


def _emit_token(out: list[str], key: str, term_: VocabTerm | None) -> None:
    if term_ is not None:
        out.append(f"{key} = {term_.token}")


def _emit_tagged(out: list[str], text_key: str, tag_key: str,
                 value: TaggedText | None) -> None:
    if value is None:
        return
    if value.text.strip():
        _emit_text(out, text_key, value.text)
    for tag in value.tags:
        out.append(f"{tag_key} = {tag}")


def serialize_canonical(fs: Factsheet) -> str:
    """The one canonical spelling of ``fs``: fixed order, trailing newline."""
    out = [f"#%EFS {fs.efs_version}"]

    out.append("[context]")
    c = fs.context
    _emit_text(out, "title", c.title)
    _emit_text(out, "subtitle", c.subtitle)
    _emit_text(out, "authors", c.authors)
    _emit_text(out, "release_date", c.release_date)
    _emit_text(out, "paper_link", c.paper_link)
    _emit_text(out, "code_link", c.code_link)
    _emit_terms(out, "purpose", c.purposes)

    out.append("[scope]")
    s = fs.scope
    for cap in s.capabilities:
        _emit_text(out, "capability", cap)
    _emit_terms(out, "model_property", s.model_properties)
    _emit_terms(out, "input_modality", s.input_modality)
    _emit_terms(out, "output_modality", s.output_modality)

    out.append("[structure]")
    t = fs.structure
    _emit_terms(out, "input_source", t.input_sources)
    _emit_terms(out, "output_source", t.output_sources)
    if t.size is not None:
        out.append(f"size_category = {t.size.category}")
        if t.size.count is not None:
            out.append(f"size_count = {t.size.count}")
        _emit_text(out, "size_raw", t.size.raw)
    for split in t.splits:
        out.append(f"split = {_quote_inline(f'{split.kind}: {split.description}')}")
    _emit_token(out, "design", t.design)
    for ref in t.dataset_refs:
        _emit_text(out, "dataset_ref", ref)

    out.append("[method]")
    m = fs.method
    _emit_terms(out, "judge", m.judges)
    if m.judge_details is not None:
        _emit_text(out, "judge_model", m.judge_details.judge_model)
        _emit_text(out, "judge_prompting", m.judge_details.prompting_strategy)
        _emit_text(out, "judge_temperature", m.judge_details.temperature)
        _emit_text(out, "judge_agreement", m.judge_details.agreement)
    for step in m.protocol:
        _emit_text(out, "protocol", step)
    _emit_token(out, "model_access", m.model_access)
    if m.heldout is not None:
        out.append(f"heldout = {'true' if m.heldout else 'false'}")
    _emit_text(out, "heldout_details", m.heldout_details)

    out.append("[alignment]")
    a = fs.alignment
    _emit_tagged(out, "validation", "validation_tag", a.validation)
    _emit_tagged(out, "baselines", "baseline_tag", a.baselines)
    _emit_tagged(out, "robustness", "robustness_tag", a.robustness)
    for lim in a.limitations:
        _emit_text(out, "limitation", lim)
    for sim in a.similar_evals:
        _emit_text(out, "similar_eval", sim)

    if fs.extensions:
        out.append(f"[{_EXT_SECTION}]")
        for key, value in fs.extensions:
            _emit_text(out, key, value)

    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# JSON interchange


def _term_dict(t: VocabTerm) -> dict:
    return {"token": t.token, "raw": t.raw}


def _tagged_dict(v: TaggedText | None) -> dict | None:
    if v is None:
        return None
    return {"text": v.text, "tags": list(v.tags)}


def factsheet_to_dict(fs: Factsheet) -> dict:
    """Plain-data mirror of a factsheet.  Every key is always present."""
    c, s, t, m, a = fs.context, fs.scope, fs.structure, fs.method, fs.alignment
    return {
        "efs_version": fs.efs_version,
        "context": {
            "title": c.title,
            "subtitle": c.subtitle,
            "authors": c.authors,
            "release_date": c.release_date,
            "paper_link": c.paper_link,
            "code_link": c.code_link,
            "purposes": [_term_dict(x) for x in c.purposes],
        },
        "scope": {
            "capabilities": list(s.capabilities),
            "model_properties": [_term_dict(x) for x in s.model_properties],
            "input_modality": [_term_dict(x) for x in s.input_modality],
            "output_modality": [_term_dict(x) for x in s.output_modality],
        },
        "structure": {
            "input_sources": [_term_dict(x) for x in t.input_sources],
            "output_sources": [_term_dict(x) for x in t.output_sources],
            "size": None if t.size is None else {
                "category": t.size.category,
                "count": t.size.count,
                "raw": t.size.raw,
            },
            "splits": [{"kind": x.kind, "description": x.description}
                       for x in t.splits],
            "design": None if t.design is None else _term_dict(t.design),
            "dataset_refs": list(t.dataset_refs),
        },
        "method": {
            "judges": [_term_dict(x) for x in m.judges],
            "judge_details": None if m.judge_details is None else {
                "judge_model": m.judge_details.judge_model,
                "prompting_strategy": m.judge_details.prompting_strategy,
                "temperature": m.judge_details.temperature,
                "agreement": m.judge_details.agreement,
            },
            "protocol": list(m.protocol),
            "model_access": None if m.model_access is None
            else _term_dict(m.model_access),
            "heldout": m.heldout,
            "heldout_details": m.heldout_details,
        },
        "alignment": {
            "validation": _tagged_dict(a.validation),
            "baselines": _tagged_dict(a.baselines),
            "robustness": _tagged_dict(a.robustness),
            "limitations": list(a.limitations),
            "similar_evals": list(a.similar_evals),
        },
        "extensions": dict(fs.extensions),
    }


def to_interchange(fs: Factsheet) -> str:
    return json.dumps(factsheet_to_dict(fs), indent=2, ensure_ascii=False) + "\n"


class _Reader:
    """Collects interchange shape errors while pulling typed fields."""

    def __init__(self) -> None:
        self.errors: list[ParseError] = []

    def fail(self, message: str) -> None:
        self.errors.append(ParseError("I002", message))

    def text(self, obj: dict, path: str, key: str) -> str | None:
        value = obj.get(key)
        if value is None:
            return None
        if not isinstance(value, str) or not value.strip() or "\r" in value:
            self.fail(f"{path}.{key}: expected a nonempty string or null")
            return None
        return value

    def text_list(self, obj: dict, path: str, key: str) -> tuple[str, ...]:
        value = obj.get(key)
        if value is None:
            return ()
        if not isinstance(value, list) or not all(
                isinstance(x, str) and x.strip() and "\r" not in x
                for x in value):
            self.fail(f"{path}.{key}: expected a list of nonempty strings")
            return ()
        return tuple(value)

    def terms(self, obj: dict, path: str, key: str,
              vocab_name: str) -> tuple[VocabTerm, ...]:
        value = obj.get(key)
        if value is None:
            return ()
        if not isinstance(value, list):
            self.fail(f"{path}.{key}: expected a list of terms")
            return ()
        out = []
        for entry in value:
            t = self.term(entry, f"{path}.{key}[]", vocab_name)
            if t is not None:
                out.append(t)
        tokens = [t.token for t in out]
        if len(set(tokens)) != len(tokens):
            self.fail(f"{path}.{key}: duplicate tokens")
            return ()
        return tuple(out)

    def term(self, entry: object, path: str,
             vocab_name: str) -> VocabTerm | None:
        if entry is None:
            return None
        voc = VOCABULARIES[vocab_name]
        if not isinstance(entry, dict) or not isinstance(entry.get("token"), str):
            self.fail(f"{path}: expected an object with a token")
            return None
        token = entry["token"]
        if token not in voc:
            self.fail(f"{path}: {token!r} is not a {vocab_name} token")
            return None
        raw = entry.get("raw")
        if raw is None:
            raw = voc.display_name(token)
        if not isinstance(raw, str) or not raw.strip() or "\r" in raw:
            self.fail(f"{path}: raw must be nonempty text")
            return None
        return VocabTerm(token, raw)

    def tagged(self, obj: dict, path: str, key: str,
               vocab_name: str) -> TaggedText | None:
        value = obj.get(key)
        if value is None:
            return None
        if not isinstance(value, dict):
            self.fail(f"{path}.{key}: expected an object or null")
            return None
        text = value.get("text", "")
        tags = value.get("tags", [])
        voc = VOCABULARIES[vocab_name]
        if not isinstance(text, str) or "\r" in text:
            self.fail(f"{path}.{key}.text: expected a string")
            return None
        if (not isinstance(tags, list)
                or not all(isinstance(x, str) and x in voc.tokens for x in tags)
                or len(set(tags)) != len(tags)):
            self.fail(f"{path}.{key}.tags: expected distinct {vocab_name} tokens")
            return None
        if not text.strip() and not tags:
            self.fail(f"{path}.{key}: needs text or tags; use null when absent")
            return None
        return TaggedText(text, tuple(tags))


def factsheet_from_dict(obj: object) -> Factsheet:
    """Inverse of factsheet_to_dict; absent optional keys read as empty."""
    if not isinstance(obj, dict):
        raise FactsheetParseError(
            [ParseError("I002", "interchange document must be a JSON object")])

    r = _Reader()
    version = obj.get("efs_version")
    if version is None:
        r.errors.append(ParseError("I001", "missing efs_version"))
        version = EFS_VERSION
    elif not isinstance(version, str):
        r.fail("efs_version: expected a string")
        version = EFS_VERSION

    def dim(key: str) -> dict:
        value = obj.get(key)
        if value is None:
            return {}
        if not isinstance(value, dict):
            r.fail(f"{key}: expected an object")
            return {}
        return value

    c, s, t, m, a = (dim(k) for k in
                     ("context", "scope", "structure", "method", "alignment"))

    size = None
    size_obj = t.get("size")
    if size_obj is not None:
        if (not isinstance(size_obj, dict)
                or not isinstance(size_obj.get("category"), str)
                or size_obj["category"] not in VOCABULARIES["size_category"].tokens):
            r.fail("structure.size: expected {category, count, raw}")
        else:
            count = size_obj.get("count")
            raw = size_obj.get("raw")
            if raw is None:
                raw = VOCABULARIES["size_category"].display_name(size_obj["category"])
            if count is not None and (not isinstance(count, int)
                                      or isinstance(count, bool) or count < 0):
                r.fail("structure.size.count: expected a nonnegative integer")
            elif not isinstance(raw, str) or not raw.strip():
                r.fail("structure.size.raw: expected nonempty text")
            else:
                size = SizeSpec(size_obj["category"], count, raw)

    splits: list[SplitSpec] = []
    splits_obj = t.get("splits")
    if splits_obj is not None:
        if not isinstance(splits_obj, list):
            r.fail("structure.splits: expected a list")
        else:
            kinds: set[str] = set()
            for entry in splits_obj:
                if (not isinstance(entry, dict)
                        or entry.get("kind") not in VOCABULARIES["split_kind"].tokens
                        or not isinstance(entry.get("description"), str)
                        or not entry["description"].strip()
                        or "\n" in entry["description"]
                        or "\r" in entry["description"]):
                    r.fail("structure.splits[]: expected {kind, description}")
                    continue
                if entry["kind"] in kinds:
                    r.fail(f"structure.splits[]: duplicate kind {entry['kind']!r}")
                    continue
                kinds.add(entry["kind"])
                splits.append(SplitSpec(entry["kind"], entry["description"]))

    details = None
    details_obj = m.get("judge_details")
    if details_obj is not None:
        if not isinstance(details_obj, dict):
            r.fail("method.judge_details: expected an object or null")
        else:
            fields = {name: r.text(details_obj, "method.judge_details", name)
                      for name in ("judge_model", "prompting_strategy",
                                   "temperature", "agreement")}
            if any(v is not None for v in fields.values()):
                details = JudgeDetails(**fields)
            else:
                r.fail("method.judge_details: needs at least one field; "
                       "use null when absent")

    heldout = m.get("heldout")
    if heldout is not None and not isinstance(heldout, bool):
        r.fail("method.heldout: expected true, false or null")
        heldout = None

    extensions: tuple[tuple[str, str], ...] = ()
    ext_obj = obj.get("extensions")
    if ext_obj is not None:
        if (not isinstance(ext_obj, dict)
                or not all(isinstance(k, str) and _EXTENSION_KEY_RE.match(k)
                           and isinstance(v, str) and "\r" not in v
                           for k, v in ext_obj.items())):
            r.fail("extensions: expected an object of x-<name> string entries")
        else:
            extensions = tuple(ext_obj.items())

    kwargs = dict(
        efs_version=version,
        context=ContextDim(
            title=r.text(c, "context", "title"),
            subtitle=r.text(c, "context", "subtitle"),
            authors=r.text(c, "context", "authors"),
            release_date=r.text(c, "context", "release_date"),
            paper_link=r.text(c, "context", "paper_link"),
            code_link=r.text(c, "context", "code_link"),
            purposes=r.terms(c, "context", "purposes", "purpose"),
        ),
        scope=ScopeDim(
            capabilities=r.text_list(s, "scope", "capabilities"),
            model_properties=r.terms(s, "scope", "model_properties",
                                     "model_property"),
            input_modality=r.terms(s, "scope", "input_modality", "modality"),
            output_modality=r.terms(s, "scope", "output_modality", "modality"),
        ),
        structure=StructureDim(
            input_sources=r.terms(t, "structure", "input_sources", "input_source"),
            output_sources=r.terms(t, "structure", "output_sources",
                                   "output_source"),
            size=size,
            splits=tuple(splits),
            design=r.term(t.get("design"), "structure.design", "design"),
            dataset_refs=r.text_list(t, "structure", "dataset_refs"),
        ),
        method=MethodDim(
            judges=r.terms(m, "method", "judges", "judge"),
            judge_details=details,
            protocol=r.text_list(m, "method", "protocol"),
            model_access=r.term(m.get("model_access"), "method.model_access",
                                "model_access"),
            heldout=heldout,
            heldout_details=r.text(m, "method", "heldout_details"),
        ),
        alignment=AlignmentDim(
            validation=r.tagged(a, "alignment", "validation", "validation_tag"),
            baselines=r.tagged(a, "alignment", "baselines", "baseline_tag"),
            robustness=r.tagged(a, "alignment", "robustness", "robustness_tag"),
            limitations=r.text_list(a, "alignment", "limitations"),
            similar_evals=r.text_list(a, "alignment", "similar_evals"),
        ),
        extensions=extensions,
    )
    if r.errors:
        raise FactsheetParseError(r.errors)
    try:
        return Factsheet(**kwargs)  # type: ignore[arg-type]
    except ValueError as exc:
        raise FactsheetParseError([ParseError("I002", str(exc))]) from exc


def from_interchange(text: str) -> Factsheet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FactsheetParseError(
            [ParseError("I002", f"not valid JSON: {exc.msg}",
                        SourceSpan(exc.lineno, exc.colno))]) from exc
    return factsheet_from_dict(obj)


# ---------------------------------------------------------------------------
# Skeleton


_SKELETON_GROUPS: dict[str, tuple[tuple[str, bool, tuple[str, ...]], ...]] = {
    "context": (
        ("Title", True, ("title",)),
        ("Subtitle", False, ("subtitle",)),
        ("Authors or owners", True, ("authors",)),
        ("Release date", True, ("release_date",)),
        ("Paper or documentation link", False, ("paper_link",)),
        ("Code or data link", False, ("code_link",)),
        ("Intended purposes", True, ("purpose",)),
    ),
    "scope": (
        ("Capabilities and principles tested", True, ("capability",)),
        ("Model properties measured", True, ("model_property",)),
        ("Input modality", True, ("input_modality",)),
        ("Output modality", True, ("output_modality",)),
    ),
    "structure": (
        ("Input sources", True, ("input_source",)),
        ("Output label sources", True, ("output_source",)),
        ("Size", False, ("size_category", "size_count", "size_raw")),
        ("Splits", False, ("split",)),
        ("Design", True, ("design",)),
        ("Component datasets and references", False, ("dataset_ref",)),
    ),
    "method": (
        ("Judge types", True, ("judge",)),
        ("Judge details", False, ("judge_model", "judge_prompting",
                                  "judge_temperature", "judge_agreement")),
        ("Evaluation protocol", True, ("protocol",)),
        ("Model access required", True, ("model_access",)),
        ("Held-out private test set", True, ("heldout",)),
        ("Held-out set details", False, ("heldout_details",)),
    ),
    "alignment": (
        ("Alignment validation", False, ("validation", "validation_tag")),
        ("Baseline comparisons", False, ("baselines", "baseline_tag")),
        ("Robustness measures", False, ("robustness", "robustness_tag")),
        ("Known limitations", False, ("limitation",)),
        ("Related evaluations", False, ("similar_eval",)),
    ),
}


def _skeleton_hint(spec: _KeySpec) -> list[str]:
    if spec.kind == "flag":
        return [f"# {spec.name} = true | false"]
    if spec.kind == "count":
        return [f"# {spec.name} = 1000"]
    if spec.kind == "split":
        return ['# split = "test: what this split holds"',
                "#   (kinds: finetune_dev | validation | test | private_test)"]
    if spec.kind in ("vocab", "token"):
        voc = VOCABULARIES[spec.vocab]
        lines = [f"# {spec.name} = {' | '.join(voc.tokens)}"]
        if voc.open:
            lines.append(f'# {spec.name} = "other: free text"')
        return lines
    return [f'# {spec.name} = "..."']


def skeleton_canonical() -> str:
    """A fully commented canonical template; parses to an empty sheet."""
    out = [
        "#%EFS 1.0",
        "# Factsheet skeleton.  Uncomment the lines you can answer.",
        '# Quoted values escape \\" \\\\ and \\n; long text may use',
        '# key = """ ... """ blocks.  Repeatable keys take one line each.',
    ]
    for section in _SECTION_ORDER:
        out.append("")
        out.append(f"[{section}]")
        for label, mandatory, keys in _SKELETON_GROUPS[section]:
            marker = ", mandatory" if mandatory else ""
            repeat = any(_SECTION_KEYS[section][k].repeat for k in keys)
            marker += ", repeatable" if repeat else ""
            out.append("")
            out.append(f"# {label}{marker and ' (' + marker.strip(', ') + ')'}")
            for key in keys:
                out.extend(_skeleton_hint(_SECTION_KEYS[section][key]))
    out += ["", f"[{_EXT_SECTION}]", "",
            '# Anything the questionnaire cannot hold, e.g.:',
            '# x-license = "CC BY 4.0"']
    return "\n".join(out) + "\n"
