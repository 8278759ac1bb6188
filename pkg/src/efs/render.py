"""Factsheet renderers.

Two document targets share one row model: a header (title, subtitle,
authors, date, links) followed by the five catalog sections, one row per
visible question.  Unanswered questions render an explicit "not
documented" row rather than disappearing; unanswered flags render "No".
The "card" and "canonical" targets delegate to their own serializers.
"""

from __future__ import annotations

import html

from .card import export_card
from .catalog import (
    CATALOG,
    DIMENSIONS,
    SECTION_NAMES,
    AnswerKind,
    answer_text,
    detail_answer,
    detail_visible,
    is_applicable,
)
from .diagnostics import Diagnostic
from .model import Factsheet
from .textfmt import serialize_canonical

RENDER_TARGETS = ("hypertext", "plainmark", "card", "canonical")

NOT_DOCUMENTED = "not documented"
UNTITLED = "Untitled evaluation"

_STYLE = """\
body { font-family: Georgia, serif; margin: 2rem auto; max-width: 46rem;
       line-height: 1.45; color: #1a1a1a; }
header { border-bottom: 2px solid #1a1a1a; margin-bottom: 1rem; }
header h1 { margin-bottom: 0.1rem; }
header .meta { color: #444; margin: 0.15rem 0; }
h2 { font-size: 1.05rem; text-transform: uppercase; letter-spacing: 0.04em;
     border-bottom: 1px solid #bbb; padding-bottom: 0.15rem; }
table { border-collapse: collapse; width: 100%; }
th { text-align: left; vertical-align: top; padding: 0.3rem 1rem 0.3rem 0;
     width: 14rem; font-weight: 600; }
td { padding: 0.3rem 0; vertical-align: top; }
tr + tr th, tr + tr td { border-top: 1px solid #e5e5e5; }
.missing { color: #8a8a8a; font-style: italic; }
.badge { font-size: 0.8rem; padding: 0.1rem 0.45rem; border-radius: 0.6rem;
         color: #fff; }
.badge.error { background: #b3261e; }
.badge.warning { background: #9a6b00; }
.badge.note { background: #3b5f8a; }
"""


def _rows(fs: Factsheet, dimension: str) -> list[tuple[str, str | None]]:
    "Label/answer pairs for one section; None answer means unanswered."
    rows: list[tuple[str, str | None]] = []
    for q in CATALOG:
        if q.dimension != dimension or not is_applicable(fs, q.id):
            continue
        text = answer_text(fs, q.id)
        if text is None and q.answer_kind == AnswerKind.FLAG:
            text = "No"
        rows.append((q.prompt, text))
        if detail_visible(fs, q.id):
            rows.append((q.sub_answer.prompt, detail_answer(fs, q.id)))
    return rows


def _flat(text: str) -> str:
    return " ".join(text.splitlines()) if "\n" in text else text


def _h(text: str) -> str:
    return html.escape(_flat(text), quote=True)


_MARKUP = set("\\`*_[]<>|#")


def _m(text: str) -> str:
    flat = _flat(text)
    return "".join("\\" + ch if ch in _MARKUP else ch for ch in flat)


def render(fs: Factsheet, target: str) -> str:
    if target == "canonical":
        return serialize_canonical(fs)
    if target == "card":
        return export_card(fs)
    if target == "hypertext":
        return _hypertext(fs)
    if target == "plainmark":
        return _plainmark(fs)
    raise ValueError(f"unknown render target: {target!r}")


def _hypertext(fs: Factsheet) -> str:
    ctx = fs.context
    title = ctx.title or UNTITLED
    out = [
        "<!doctype html>",
        '<html lang="en">',
        '<meta charset="utf-8">',
        f"<title>{_h(title)}</title>",
        "<style>",
        _STYLE.rstrip("\n"),
        "</style>",
        "<body>",
        "<article>",
        "<header>",
        f"<h1>{_h(title)}</h1>",
    ]
    if ctx.subtitle is not None:
        out.append(f'<p class="meta">{_h(ctx.subtitle)}</p>')
    byline = [v for v in (ctx.authors, ctx.release_date) if v is not None]
    if byline:
        out.append(f'<p class="meta">{_h(" · ".join(byline))}</p>')
    links = [("Paper", ctx.paper_link), ("Code", ctx.code_link)]
    anchors = [f'<a href="{_h(url)}">{name}</a>'
               for name, url in links if url is not None]
    if anchors:
        out.append(f'<p class="meta">{" · ".join(anchors)}</p>')
    out.append("</header>")
    for dimension in DIMENSIONS:
        out.append("<section>")
        out.append(f"<h2>{html.escape(SECTION_NAMES[dimension])}</h2>")
        out.append("<table>")
        for label, text in _rows(fs, dimension):
            cell = (f'<td class="missing">{NOT_DOCUMENTED}</td>'
                    if text is None else f"<td>{_h(text)}</td>")
            out.append(f'<tr><th scope="row">{html.escape(label)}</th>{cell}</tr>')
        out.append("</table>")
        out.append("</section>")
    out += ["</article>", "</body>", "</html>"]
    return "\n".join(out) + "\n"


def _plainmark(fs: Factsheet) -> str:
    ctx = fs.context
    out = [f"# {_m(ctx.title or UNTITLED)}", ""]
    if ctx.subtitle is not None:
        out += [_m(ctx.subtitle), ""]
    byline = [v for v in (ctx.authors, ctx.release_date) if v is not None]
    if byline:
        out += [_m(" · ".join(byline)), ""]
    links = [f"{name}: <{url}>" for name, url in
             [("Paper", ctx.paper_link), ("Code", ctx.code_link)]
             if url is not None]
    if links:
        out += [" · ".join(links), ""]
    for dimension in DIMENSIONS:
        out += [f"## {SECTION_NAMES[dimension]}", ""]
        for label, text in _rows(fs, dimension):
            out += [label, f": {NOT_DOCUMENTED if text is None else _m(text)}", ""]
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"


def render_diagnostics(diags: list[Diagnostic], target: str) -> str:
    if target == "hypertext":
        return _diag_hypertext(diags)
    if target == "plainmark":
        return _diag_plainmark(diags)
    raise ValueError(f"unknown diagnostics target: {target!r}")


def _diag_hypertext(diags: list[Diagnostic]) -> str:
    out = [
        "<!doctype html>",
        '<html lang="en">',
        '<meta charset="utf-8">',
        "<title>Validation findings</title>",
        "<style>",
        _STYLE.rstrip("\n"),
        "</style>",
        "<body>",
        "<h1>Validation findings</h1>",
    ]
    if not diags:
        out.append("<p>No findings.</p>")
    else:
        out.append("<table>")
        out.append("<tr><th>Code</th><th>Severity</th>"
                   "<th>Question</th><th>Message</th></tr>")
        for d in diags:
            badge = f'<span class="badge {d.severity.value}">{d.severity.value}</span>'
            qid = "" if d.question_id is None else html.escape(d.question_id)
            out.append(f"<tr><td>{html.escape(d.code)}</td><td>{badge}</td>"
                       f"<td>{qid}</td><td>{_h(d.message)}</td></tr>")
        out.append("</table>")
    out += ["</body>", "</html>"]
    return "\n".join(out) + "\n"


def _diag_plainmark(diags: list[Diagnostic]) -> str:
    out = ["# Validation findings", ""]
    if not diags:
        out.append("No findings.")
    else:
        out += ["| Code | Severity | Question | Message |",
                "| --- | --- | --- | --- |"]
        for d in diags:
            qid = "" if d.question_id is None else d.question_id
            out.append(f"| {d.code} | {d.severity.value} | {qid} | {_m(d.message)} |")
    return "\n".join(out) + "\n"
