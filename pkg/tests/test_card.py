"""Card markup parsing, import mapping and export tests."""

from pathlib import Path

import pytest
from hypothesis import given
import hypothesis.strategies as st

from efs.card import (
    escape,
    export_card,
    import_card,
    parse_card,
    unescape,
)
from efs.diagnostics import CARD_CODES, FactsheetParseError, IMPORT_CODES
from efs.textfmt import parse_canonical, serialize_canonical

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="module")
def imagenet():
    return import_card(fixture("imagenet.tex"))


@pytest.fixture(scope="module")
def humaneval():
    return import_card(fixture("humaneval.tex"))


@pytest.fixture(scope="module")
def mtbench():
    return import_card(fixture("mtbench.tex"))


# Lexing


def test_parse_card_fixture_shapes():
    assert len(parse_card(fixture("imagenet.tex")).commands) == 19
    assert len(parse_card(fixture("humaneval.tex")).commands) == 18
    assert len(parse_card(fixture("mtbench.tex")).commands) == 20


def test_parse_card_option_names():
    card = parse_card(fixture("mtbench.tex"))
    assert [o.name for o in card.options] == [
        "title", "subtitle", "authors", "link", "code-link", "date"]
    assert card.option("date") == "2023"


def test_parse_card_ignores_surrounding_text():
    doc = ("Some prose before.\n\\begin{evaluationcard}[title={T}]\n"
           "\\Purpose{Research}\n\\end{evaluationcard}\nAfter.")
    card = parse_card(doc)
    assert card.option("title") == "T"
    assert card.commands[0].name == "Purpose"


def test_parse_card_nested_and_escaped_braces():
    doc = ("\\begin{evaluationcard}\n"
           "\\Protocol{1) outer {inner} and \\{literal\\}}\n"
           "\\end{evaluationcard}")
    card = parse_card(doc)
    assert card.commands[0].body == "1) outer {inner} and \\{literal\\}"


@pytest.mark.parametrize("doc,code", [
    ("no card here", "C001"),
    ("\\begin{evaluationcard} \\Purpose{x}", "C001"),
    ("\\begin{evaluationcard}\n\\Purpose{open\n\\end{evaluationcard}", "C002"),
    ("\\begin{evaluationcard}[title]\n\\end{evaluationcard}", "C003"),
    ("\\begin{evaluationcard}[title=T]\n\\end{evaluationcard}", "C003"),
    ("\\begin{evaluationcard}[title={T}\n\\Purpose{x}\\end{evaluationcard}",
     "C003"),
])
def test_parse_card_errors(doc, code):
    with pytest.raises(FactsheetParseError) as exc:
        parse_card(doc)
    assert [e.code for e in exc.value.errors] == [code]
    assert set(e.code for e in exc.value.errors) <= set(CARD_CODES)


def test_unescape_translates_only_braces_and_backslash():
    assert unescape("a\\{b\\}c\\\\d") == "a{b}c\\d"
    assert unescape("50\\% and \\#tag") == "50\\% and \\#tag"


@given(st.text(max_size=80))
def test_escape_unescape_inverse(text):
    assert unescape(escape(text)) == text


# Fixture imports


def test_imagenet_context(imagenet):
    fs = imagenet.factsheet
    assert fs.context.title == "ImageNet"
    assert fs.context.authors == "Priceton University"
    assert fs.context.release_date == "2009"
    assert fs.context.paper_link == "https://ieeexplore.ieee.org/document/5206848"
    assert fs.context.code_link is None
    assert [t.token for t in fs.context.purposes] == ["research", "selection"]


def test_imagenet_scope(imagenet):
    fs = imagenet.factsheet
    assert fs.scope.capabilities == ("Object Recognition", "Visual Understanding")
    assert [t.token for t in fs.scope.model_properties] == ["performance"]
    assert [t.token for t in fs.scope.input_modality] == ["vision"]
    assert [t.token for t in fs.scope.output_modality] == ["structured"]


def test_imagenet_structure(imagenet):
    fs = imagenet.factsheet
    assert [t.token for t in fs.structure.input_sources] == ["existing_dataset"]
    assert [t.token for t in fs.structure.output_sources] == ["human_annotation"]
    assert fs.structure.size.category == "large"
    assert fs.structure.size.count == 14_000_000
    assert fs.structure.size.raw == "Large (>100K samples): 14 million images total"
    assert [(s.kind, s.description) for s in fs.structure.splits] == [
        ("finetune_dev", "1.2M images"),
        ("validation", "50K images"),
        ("test", "100K images (labels withheld on server)"),
    ]
    assert fs.structure.design.token == "static"


def test_imagenet_method(imagenet):
    fs = imagenet.factsheet
    assert [t.token for t in fs.method.judges] == ["auto_reference"]
    assert fs.method.judge_details is None
    assert len(fs.method.protocol) == 3
    assert fs.method.protocol[0] == "Model receives image"
    assert fs.method.model_access.token == "output_only"
    assert fs.method.heldout is True
    assert "labels withheld" in fs.method.heldout_details


def test_imagenet_alignment_and_notes(imagenet):
    fs = imagenet.factsheet
    assert "94.9\\%" in fs.alignment.validation.text
    assert fs.alignment.baselines is None
    assert len(fs.alignment.limitations) == 5
    assert len(fs.alignment.similar_evals) == 1
    assert fs.extensions == ()
    assert imagenet.notes == ()


def test_humaneval_values(humaneval):
    fs = humaneval.factsheet
    assert fs.context.authors == "OpenAI"
    assert fs.context.release_date == "2021"
    assert fs.context.code_link == "https://github.com/openai/human-eval"
    assert [t.token for t in fs.context.purposes] == ["research"]
    assert len(fs.scope.capabilities) == 3
    assert [t.token for t in fs.scope.model_properties] == ["performance"]
    assert "code generation" in fs.scope.model_properties[0].raw
    assert "Correctness" in fs.scope.model_properties[0].raw
    assert [t.token for t in fs.structure.input_sources] == ["new_dataset"]
    assert [t.token for t in fs.structure.output_sources] == ["programmatic"]
    assert fs.structure.size is None
    assert fs.structure.splits == ()
    assert [t.token for t in fs.method.judges] == ["auto_execution"]
    assert len(fs.method.protocol) == 3
    assert fs.method.heldout is False
    assert fs.method.heldout_details == "N/A - test cases are public"
    assert len(fs.alignment.limitations) == 6
    assert len(fs.alignment.similar_evals) == 2
    assert fs.extensions == ()
    assert humaneval.notes == ()


def test_mtbench_values(mtbench):
    fs = mtbench.factsheet
    assert fs.context.authors == "UC Berkeley"
    assert fs.context.release_date == "2023"
    assert fs.context.code_link.endswith("llm_judge\\#mt-bench/")
    assert fs.structure.size.category == "small"
    assert fs.structure.size.count == 80
    assert fs.structure.splits == ()
    assert fs.structure.design.token == "dynamic"
    assert [t.token for t in fs.method.judges] == ["model_llm"]
    assert fs.method.judge_details.judge_model == "GPT-4"
    assert fs.method.model_access.token == "output_only"
    assert fs.method.heldout is False
    assert len(fs.alignment.limitations) == 4
    assert fs.alignment.similar_evals == ("Chatbot Arena, AlpacaEval",)


def test_mtbench_splits_become_extension(mtbench):
    ext = mtbench.factsheet.extension_map()
    assert set(ext) == {"x-splits"}
    assert ext["x-splits"] == (
        "Each question has 2 turns\n"
        "Categories: writing, roleplay, reasoning, math, coding, "
        "extraction, STEM, humanities")
    assert [(n.code, n.question_id) for n in mtbench.notes] == [("N-I004", "T4")]


@pytest.mark.parametrize("name", ["imagenet", "humaneval", "mtbench"])
def test_fixture_matches_golden_sheet(name):
    fs = import_card(fixture(f"{name}.tex")).factsheet
    assert serialize_canonical(fs) == fixture(f"{name}.efs")


@pytest.mark.parametrize("name", ["imagenet", "humaneval", "mtbench"])
def test_golden_sheets_are_canonical(name):
    text = fixture(f"{name}.efs")
    assert serialize_canonical(parse_canonical(text)) == text


# Mapping behaviors


def card_with(body):
    return f"\\begin{{evaluationcard}}\n{body}\n\\end{{evaluationcard}}\n"


def test_size_count_multipliers():
    cases = {
        "Small (<1K samples): 80 questions": ("small", 80),
        "Large (>100K samples): 14 million images total": ("large", 14_000_000),
        "Medium: 1.2M images": ("medium", 1_200_000),
        "Medium (1K-100K): 50K prompts": ("medium", 50_000),
        "Very large: 2 billion tokens": ("very_large", 2_000_000_000),
        "large: 1,500 pairs": ("large", 1500),
        "Infinite (procedurally generated)": ("infinite", None),
        "Small set, uncounted": ("small", None),
    }
    for body, (category, count) in cases.items():
        fs = import_card(card_with(f"\\Size{{{body}}}")).factsheet
        assert fs.structure.size.category == category, body
        assert fs.structure.size.count == count, body
        assert fs.structure.size.raw == body


def test_size_without_category_is_preserved():
    report = import_card(card_with("\\Size{164 problems}"))
    assert report.factsheet.structure.size is None
    assert report.factsheet.extension_map()["x-size"] == "164 problems"
    assert [n.code for n in report.notes if n.code == "N-I003"] == ["N-I003"]


def test_split_kind_keywords():
    body = ("Fine-tuning pool: 10K\nValidation set: 1K\n"
            "Private leaderboard: 5K\nTest set: 2K")
    fs = import_card(card_with(f"\\Splits{{{body}}}")).factsheet
    assert [s.kind for s in fs.structure.splits] == [
        "finetune_dev", "validation", "private_test", "test"]


def test_duplicate_split_kinds_keep_first_rest_preserved():
    body = "Test set: first\nTest again: second"
    report = import_card(card_with(f"\\Splits{{{body}}}"))
    assert [s.description for s in report.factsheet.structure.splits] == ["first"]
    assert report.factsheet.extension_map()["x-splits"] == "Test again: second"
    assert any(n.code == "N-I004" for n in report.notes)


def test_protocol_without_numbering_is_one_step():
    fs = import_card(card_with("\\Protocol{just run it}")).factsheet
    assert fs.method.protocol == ("just run it",)


def test_judge_model_extraction_needs_model_judge():
    fs = import_card(card_with(
        "\\Judge{Automatic (Reference-based: BLEU)}")).factsheet
    assert fs.method.judge_details is None
    fs = import_card(card_with(
        "\\Judge{Model-based (LLM judge: GPT-4)}")).factsheet
    assert fs.method.judge_details.judge_model == "GPT-4"
    fs = import_card(card_with("\\Judge{Model-based judging}")).factsheet
    assert fs.method.judge_details is None


def test_unmapped_vocab_text_becomes_other():
    report = import_card(card_with("\\Judge{Tarot reading}"))
    judges = report.factsheet.method.judges
    assert [t.token for t in judges] == ["other"]
    assert judges[0].raw == "Tarot reading"
    assert any(n.code == "N-I002" and n.question_id == "M1"
               for n in report.notes)


def test_unknown_command_is_preserved():
    report = import_card(card_with("\\Funding{DARPA grant 42}"))
    assert report.factsheet.extension_map()["x-funding"] == "DARPA grant 42"
    assert any(n.code == "N-I001" for n in report.notes)


def test_duplicate_command_is_dropped_with_note():
    report = import_card(card_with("\\Design{Static}\n\\Design{Dynamic}"))
    assert report.factsheet.structure.design.token == "static"
    assert any(n.code == "N-I005" and n.question_id == "T5"
               for n in report.notes)


def test_unrecognized_flag_left_unanswered():
    report = import_card(card_with("\\HasHeldout{sort of}"))
    assert report.factsheet.method.heldout is None
    assert any(n.code == "N-I006" for n in report.notes)


def test_mandatory_gaps_are_noted():
    report = import_card("\\begin{evaluationcard}[title={T}]"
                         "\\end{evaluationcard}")
    gaps = {n.question_id for n in report.notes if n.code == "N-I007"}
    assert "C1" not in gaps
    assert gaps == {"C3", "C4", "C7", "S1", "S2", "S3", "S4",
                    "T1", "T2", "T5", "M1", "M3", "M4", "M5"}


def test_note_codes_stay_in_catalog(imagenet, humaneval, mtbench):
    for report in (imagenet, humaneval, mtbench):
        assert {n.code for n in report.notes} <= set(IMPORT_CODES)


# Export


@pytest.mark.parametrize("name", ["imagenet", "humaneval", "mtbench"])
def test_export_import_keeps_tokens(name):
    first = import_card(fixture(f"{name}.tex")).factsheet
    second = import_card(export_card(first)).factsheet
    assert tokens_of(first) == tokens_of(second)


def tokens_of(fs):
    return {
        "C7": {t.token for t in fs.context.purposes},
        "S2": {t.token for t in fs.scope.model_properties},
        "S3": {t.token for t in fs.scope.input_modality},
        "S4": {t.token for t in fs.scope.output_modality},
        "T1": {t.token for t in fs.structure.input_sources},
        "T2": {t.token for t in fs.structure.output_sources},
        "T3": fs.structure.size.category if fs.structure.size else None,
        "T4": {(s.kind, s.description) for s in fs.structure.splits},
        "T5": fs.structure.design.token if fs.structure.design else None,
        "M1": {t.token for t in fs.method.judges},
        "M4": fs.method.model_access.token if fs.method.model_access else None,
        "M5": fs.method.heldout,
    }


@pytest.mark.parametrize("name", ["imagenet", "humaneval", "mtbench"])
def test_export_import_keeps_text_answers(name):
    first = import_card(fixture(f"{name}.tex")).factsheet
    second = import_card(export_card(first)).factsheet
    assert second.context == first.context
    assert second.scope == first.scope
    assert second.method == first.method
    assert second.alignment == first.alignment


def test_export_skips_unanswered_and_extensions():
    report = import_card(fixture("mtbench.tex"))
    text = export_card(report.factsheet)
    assert "x-splits" not in text
    assert "\\Splits" not in text
    assert "\\BaselineModels" in text


def test_export_escapes_braces():
    fs = import_card(card_with("\\Purpose{research}")).factsheet
    fs2 = import_card(export_card(fs)).factsheet
    assert fs2.context.purposes == fs.context.purposes


def test_export_of_empty_sheet_is_minimal():
    from efs.model import empty_factsheet
    text = export_card(empty_factsheet())
    assert text.startswith("\\begin{evaluationcard}\n")
    assert "\\Purpose" not in text
    report = import_card(text)
    assert report.factsheet == empty_factsheet()
