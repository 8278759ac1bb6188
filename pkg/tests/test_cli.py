"""Command-line behavior: subcommands, exit codes, machine output."""

import json
from pathlib import Path

import pytest

from efs.analyze import corpus_stats
from efs.card import export_card
from efs.cli import build_parser, main
from efs.model import empty_factsheet
from efs.render import render
from efs.textfmt import parse_canonical, serialize_canonical

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("imagenet", "humaneval", "mtbench"):
        (tmp_path / f"{name}.efs").write_text(
            (FIXTURES / f"{name}.efs").read_text(encoding="utf-8"),
            encoding="utf-8")
    (tmp_path / "empty.efs").write_text(
        serialize_canonical(empty_factsheet()), encoding="utf-8")
    (tmp_path / "broken.efs").write_text("#%EFS 9.9\n", encoding="utf-8")
    return tmp_path


# new


def test_new_writes_parseable_skeleton(workdir, capsys):
    assert main(["new", "fresh-eval"]) == 0
    text = (workdir / "fresh-eval.efs").read_text(encoding="utf-8")
    assert parse_canonical(text) == empty_factsheet()
    assert "wrote fresh-eval.efs" in capsys.readouterr().err


def test_new_refuses_overwrite(workdir, capsys):
    main(["new", "twice"])
    assert main(["new", "twice"]) == 3
    assert "not overwriting" in capsys.readouterr().err


def test_new_rejects_bad_ids(workdir):
    assert main(["new", "Bad Id"]) == 3


# validate


def test_validate_clean_sheet_exits_zero(workdir, capsys):
    assert main(["validate", "imagenet.efs"]) == 0
    out = capsys.readouterr().out
    assert "W-T301" in out
    assert "publishable" in out


def test_validate_mandatory_gaps_exit_one(workdir):
    assert main(["validate", "empty.efs"]) == 1


def test_validate_parse_failure_exits_two(workdir, capsys):
    assert main(["validate", "broken.efs"]) == 2
    assert "P001" in capsys.readouterr().err


def test_validate_missing_file_exits_three(workdir):
    assert main(["validate", "nowhere.efs"]) == 3


def test_validate_worst_exit_wins(workdir):
    assert main(["validate", "imagenet.efs", "empty.efs"]) == 1
    assert main(["validate", "empty.efs", "broken.efs"]) == 2


def test_validate_json_is_one_document(workdir, capsys):
    assert main(["validate", "--format", "json",
                 "imagenet.efs", "empty.efs"]) == 1
    out = capsys.readouterr().out
    doc = json.loads(out)
    assert [r["path"] for r in doc["results"]] == ["imagenet.efs", "empty.efs"]
    assert doc["results"][0]["publishable"] is True
    assert doc["results"][1]["completeness"]["overall"] == 0.0
    codes = [d["code"] for d in doc["results"][0]["diagnostics"]]
    assert codes == ["W-T301"]


def test_validate_json_reports_parse_failures_in_band(workdir, capsys):
    assert main(["validate", "--format", "json", "broken.efs"]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert "P001" in doc["results"][0]["error"]


# render


def test_render_to_stdout(workdir, capsys):
    assert main(["render", "mtbench.efs", "--target", "plainmark"]) == 0
    fs = parse_canonical((workdir / "mtbench.efs").read_text(encoding="utf-8"))
    assert capsys.readouterr().out == render(fs, "plainmark")


def test_render_defaults_to_hypertext(workdir, capsys):
    assert main(["render", "imagenet.efs"]) == 0
    assert capsys.readouterr().out.startswith("<!doctype html>")


def test_render_to_file(workdir, capsys):
    assert main(["render", "imagenet.efs", "--target", "canonical",
                 "-o", "out.efs"]) == 0
    assert capsys.readouterr().out == ""
    assert (workdir / "out.efs").read_text(encoding="utf-8") == \
        (workdir / "imagenet.efs").read_text(encoding="utf-8")


def test_render_rejects_unknown_target(workdir, capsys):
    assert main(["render", "imagenet.efs", "--target", "pdf"]) == 3
    assert "invalid choice" in capsys.readouterr().err


# card import/export


def test_import_card_writes_canonical_file(workdir, capsys):
    tex = str(FIXTURES / "mtbench.tex")
    assert main(["import-card", tex, "-o", "imported.efs"]) == 0
    captured = capsys.readouterr()
    assert "N-I004" in captured.err
    assert captured.out == ""
    assert (workdir / "imported.efs").read_text(encoding="utf-8") == \
        (FIXTURES / "mtbench.efs").read_text(encoding="utf-8")


def test_import_card_stdout_and_json(workdir, capsys):
    tex = str(FIXTURES / "imagenet.tex")
    assert main(["import-card", tex]) == 0
    assert capsys.readouterr().out == \
        (FIXTURES / "imagenet.efs").read_text(encoding="utf-8")
    assert main(["import-card", tex, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["factsheet"]["context"]["title"] == "ImageNet"
    assert doc["notes"] == []


def test_import_card_parse_failure(workdir, capsys):
    (workdir / "junk.tex").write_text("no card", encoding="utf-8")
    assert main(["import-card", "junk.tex"]) == 2
    assert "C001" in capsys.readouterr().err


def test_export_card_roundtrip_source(workdir, capsys):
    assert main(["export-card", "humaneval.efs"]) == 0
    fs = parse_canonical((workdir / "humaneval.efs").read_text(encoding="utf-8"))
    assert capsys.readouterr().out == export_card(fs)


# diff and stats


def test_diff_prints_changed_questions(workdir, capsys):
    assert main(["diff", "humaneval.efs", "mtbench.efs"]) == 0
    out = capsys.readouterr().out
    assert "M1: differs" in out
    assert "- Automatic (Execution-based)" in out
    assert "+ Model-based (General LLM)" in out


def test_diff_identical_sheets(workdir, capsys):
    assert main(["diff", "imagenet.efs", "imagenet.efs"]) == 0
    assert "same answers" in capsys.readouterr().out


def test_diff_json_lists_every_entry(workdir, capsys):
    assert main(["diff", "--format", "json",
                 "humaneval.efs", "mtbench.efs"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["entries"]) == 27
    by_id = {e["question_id"]: e for e in doc["entries"]}
    assert by_id["M1"]["status"] == "differs"
    assert by_id["S3"]["status"] == "equal"


def test_stats_over_directory(workdir, capsys):
    corpus = workdir / "corpus"
    corpus.mkdir()
    for name in ("imagenet", "humaneval", "mtbench"):
        (corpus / f"{name}.efs").write_text(
            (workdir / f"{name}.efs").read_text(encoding="utf-8"),
            encoding="utf-8")
    assert main(["stats", str(corpus)]) == 0
    assert "sheets: 3" in capsys.readouterr().out
    assert main(["stats", "--format", "json", str(corpus)]) == 0
    doc = json.loads(capsys.readouterr().out)
    sheets = [parse_canonical((corpus / f"{n}.efs").read_text(encoding="utf-8"))
              for n in sorted(("imagenet", "humaneval", "mtbench"))]
    assert doc == corpus_stats(sheets).to_dict()
    assert doc["vocab_hist"]["M1"] == {
        "auto_reference": 1, "auto_execution": 1, "model_llm": 1}


def test_stats_requires_directory(workdir):
    assert main(["stats", "not-a-dir"]) == 3


# usage and serve


def test_usage_errors_exit_three(workdir, capsys):
    assert main([]) == 3
    assert main(["bogus"]) == 3
    assert "error" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "subcommand" in capsys.readouterr().out.lower() or True


def test_serve_needs_store(monkeypatch, capsys):
    monkeypatch.delenv("EFS_STORE_DIR", raising=False)
    assert main(["serve"]) == 3
    assert "EFS_STORE_DIR" in capsys.readouterr().err


def test_serve_store_defaults_from_environment(monkeypatch):
    monkeypatch.setenv("EFS_STORE_DIR", "/somewhere/sheets")
    args = build_parser().parse_args(["serve"])
    assert args.store == "/somewhere/sheets"
