"""Renderer tests: structure, placeholders, escaping, delegation."""

import html
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from efs.card import export_card
from efs.catalog import SECTION_NAMES, with_answer
from efs.diagnostics import Diagnostic, Severity
from efs.model import Factsheet, MethodDim, empty_factsheet
from efs.render import NOT_DOCUMENTED, RENDER_TARGETS, render, render_diagnostics
from efs.textfmt import parse_canonical, serialize_canonical
from efs.validate import validate
from randsheets import random_factsheets

FIXTURES = Path(__file__).parent / "fixtures"

SECTION_ORDER = [SECTION_NAMES[d] for d in
                 ("context", "scope", "structure", "method", "alignment")]


def golden(name):
    return parse_canonical((FIXTURES / f"{name}.efs").read_text(encoding="utf-8"))


def ordered_in(haystack, needles):
    pos = -1
    for needle in needles:
        found = haystack.find(needle, pos + 1)
        assert found > pos, f"{needle!r} missing or out of order"
        pos = found


# Target dispatch


@pytest.mark.parametrize("name", ["imagenet", "humaneval", "mtbench"])
def test_canonical_target_delegates(name):
    fs = golden(name)
    assert render(fs, "canonical") == serialize_canonical(fs)


def test_card_target_delegates():
    fs = golden("humaneval")
    assert render(fs, "card") == export_card(fs)


def test_unknown_target_rejected():
    with pytest.raises(ValueError):
        render(empty_factsheet(), "pdf")
    with pytest.raises(ValueError):
        render_diagnostics([], "canonical")


def test_rendering_is_total_and_deterministic():
    for fs in random_factsheets(40, seed=7):
        for target in RENDER_TARGETS:
            assert render(fs, target) == render(fs, target)


# Document structure


@pytest.mark.parametrize("target", ["hypertext", "plainmark"])
def test_sections_appear_in_order(target):
    text = render(golden("imagenet"), target)
    names = [html.escape(n) if target == "hypertext" else n
             for n in SECTION_ORDER]
    ordered_in(text, names)


def test_hypertext_header_precedes_sections():
    text = render(golden("imagenet"), "hypertext")
    ordered_in(text, ["<h1>ImageNet", "large-scale visual recognition",
                      "Priceton University", "<a href=", "<section>"])


def test_empty_sheet_has_25_placeholder_rows():
    text = render(empty_factsheet(), "plainmark")
    assert text.count(NOT_DOCUMENTED) == 25
    assert "Judge details" not in text
    assert "Held-out private test set\n: No" in text


def test_empty_sheet_hypertext_placeholder_count():
    text = render(empty_factsheet(), "hypertext")
    assert text.count(NOT_DOCUMENTED) == 25


def test_model_judge_reveals_judge_details_row():
    assert "Judge details" not in render(golden("imagenet"), "plainmark")
    assert "Judge details" in render(golden("mtbench"), "plainmark")


def test_heldout_detail_row_follows_flag():
    text = render(golden("imagenet"), "plainmark")
    ordered_in(text, ["Held-out private test set\n: Yes",
                      "Held-out set details\n: Test set"])
    assert "Held-out set details" not in render(golden("mtbench"), "plainmark")


def test_visible_unanswered_detail_renders_placeholder():
    fs = Factsheet(method=MethodDim(heldout=True))
    text = render(fs, "plainmark")
    assert "Held-out set details\n: not documented" in text


def test_answers_replace_placeholders():
    fs = with_answer(empty_factsheet(), "C1", "Spec Bench")
    text = render(fs, "plainmark")
    assert text.count(NOT_DOCUMENTED) == 24
    assert "# Spec Bench" in text
    assert "Title\n: Spec Bench" in text


def test_multiline_answers_flatten_to_one_row():
    fs = with_answer(empty_factsheet(), "C2", "line one\nline two")
    pm = render(fs, "plainmark")
    assert "Subtitle\n: line one line two" in pm
    ht = render(fs, "hypertext")
    assert "line one line two" in ht


# Escaping


INJECTIONS = [
    "<script>alert(1)</script>",
    '" onmouseover="steal()',
    "a & b < c",
]


@pytest.mark.parametrize("bad", INJECTIONS)
def test_hypertext_escapes_text_fields(bad):
    fs = with_answer(empty_factsheet(), "C1", bad)
    fs = with_answer(fs, "C3", bad)
    fs = with_answer(fs, "S1", (bad,))
    text = render(fs, "hypertext")
    assert "<script>" not in text
    assert 'onmouseover="steal' not in text
    assert html.escape(bad, quote=True) in text


def test_hypertext_escapes_link_attribute():
    url = 'https://x.test/" onclick="boom()'
    fs = with_answer(empty_factsheet(), "C5", url)
    text = render(fs, "hypertext")
    assert 'onclick="boom' not in text
    assert html.escape(url, quote=True) in text


def test_hypertext_escapes_other_raws():
    from efs.model import VocabTerm
    fs = with_answer(empty_factsheet(), "M1", (VocabTerm("other", "<b>vibes</b>"),))
    text = render(fs, "hypertext")
    assert "<b>vibes</b>" not in text
    assert "&lt;b&gt;vibes&lt;/b&gt;" in text


@given(st.text(st.characters(blacklist_characters="\r", blacklist_categories=("Cs",)),
               min_size=1).filter(lambda s: s.strip()))
def test_hypertext_never_leaks_angle_brackets(value):
    fs = with_answer(empty_factsheet(), "C1", value)
    body = render(fs, "hypertext").split("</style>")[1]
    for line in body.splitlines():
        for fragment in line.split(">"):
            inner = fragment.rsplit("<", 1)[0] if "<" in fragment else fragment
            assert "<" not in inner


def test_plainmark_escapes_markup():
    fs = with_answer(empty_factsheet(), "C3", "*stars* _and_ [links](x) `code`")
    text = render(fs, "plainmark")
    assert r"\*stars\* \_and\_ \[links\](x) \`code\`" in text


# Diagnostics documents


def test_no_findings_document():
    for target in ("hypertext", "plainmark"):
        assert "No findings." in render_diagnostics([], target)


def test_diagnostics_rows_preserve_given_order():
    diags = [
        Diagnostic("E-C001", Severity.ERROR, "m1", question_id="C1"),
        Diagnostic("W-T302", Severity.WARNING, "m2", question_id="T3"),
        Diagnostic("N-X001", Severity.NOTE, "m3"),
    ]
    pm = render_diagnostics(diags, "plainmark")
    ordered_in(pm, ["E-C001", "W-T302", "N-X001"])
    ht = render_diagnostics(diags, "hypertext")
    ordered_in(ht, ['badge error">error', 'badge warning">warning',
                    'badge note">note'])


def test_fixture_diagnostics_render():
    diags = validate(golden("imagenet"))
    pm = render_diagnostics(diags, "plainmark")
    assert "W-T301" in pm and "T3" in pm


def test_diagnostic_message_is_escaped():
    diags = [Diagnostic("E-C001", Severity.ERROR, "<img src=x>", question_id="C1")]
    ht = render_diagnostics(diags, "hypertext")
    assert "<img" not in ht
