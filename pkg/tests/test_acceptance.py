"""End-to-end acceptance checks, one printed PASS or FAIL line each.

Every test here restates a shipping requirement in executable form and
prints a single summary line; run ``pytest tests/test_acceptance.py -s``
to watch the lines as the suite executes.  The checks are intentionally
self-contained so a failure localizes without reading the unit suites.
"""

import functools
import random
import subprocess
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from efs.analyze import DiffStatus, corpus_stats, diff
from efs.card import import_card, export_card
from efs.catalog import (
    CATALOG,
    answer_tokens,
    applicable_ids,
    catalog,
    is_answered,
    with_answer,
)
from efs.diagnostics import Severity
from efs.model import (
    JudgeDetails,
    SizeSpec,
    SplitSpec,
    TaggedText,
    empty_factsheet,
    term,
)
from efs.service import create_app
from efs.store import FactsheetStore
from efs.textfmt import parse_canonical, serialize_canonical
from efs.validate import completeness, validate
from efs.vocab import VOCABULARIES
from randsheets import random_factsheets

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = ("imagenet", "humaneval", "mtbench")

SECTION_SIZES = [
    ("context", 7), ("scope", 4), ("structure", 6),
    ("method", 5), ("alignment", 5),
]

MANDATORY_ERROR_CODES = [
    "E-C001", "E-C003", "E-C004", "E-C007",
    "E-M001", "E-M003", "E-M004", "E-M005",
    "E-S001", "E-S002", "E-S003", "E-S004",
    "E-T001", "E-T002", "E-T005",
]


def criterion(label):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except BaseException:
                print(f"FAIL  {label}")
                raise
            print(f"PASS  {label}")
        return run
    return wrap


def golden_text(name):
    return (FIXTURES / f"{name}.efs").read_text(encoding="utf-8")


def golden(name):
    return parse_canonical(golden_text(name))


def imported(name):
    return import_card((FIXTURES / f"{name}.tex").read_text(encoding="utf-8"))


def error_codes(fs):
    return [d.code for d in validate(fs) if d.severity == Severity.ERROR]


def warning_codes(fs):
    return [d.code for d in validate(fs) if d.severity == Severity.WARNING]


def _random_answer(rng, qid):
    "A plausible answer of the right kind, randomized where it matters."
    q = CATALOG[qid]
    kind = q.answer_kind.value
    if kind == "enum_one":
        return term(q.vocabulary, rng.choice(VOCABULARIES[q.vocabulary].tokens))
    if kind == "enum_many":
        tokens = VOCABULARIES[q.vocabulary].tokens
        picks = rng.sample(tokens, k=rng.randint(1, min(3, len(tokens))))
        return tuple(term(q.vocabulary, t) for t in picks)
    if kind == "flag":
        return rng.random() < 0.5
    if kind == "structured":
        if qid == "T3":
            category = rng.choice(VOCABULARIES["size_category"].tokens)
            return SizeSpec(category, None, "about right")
        if qid == "M2":
            return JudgeDetails(judge_model="judge-1")
        return TaggedText(text="checked")
    if kind == "split_list":
        return (SplitSpec("test", "full set"),)
    if kind in ("text_list", "step_list"):
        return ("item",)
    if kind == "date":
        return "2020"
    if kind == "url":
        return "https://example.org"
    return "value"


@criterion("fixture fidelity")
def test_fixture_fidelity():
    imagenet = imported("imagenet").factsheet
    assert answer_tokens(imagenet, "C7") == {"research", "selection"}
    assert imagenet.method.heldout is True
    assert imagenet.structure.size.count == 14_000_000
    assert answer_tokens(imagenet, "M1") == {"auto_reference"}

    humaneval = imported("humaneval").factsheet
    assert answer_tokens(humaneval, "M1") == {"auto_execution"}
    assert humaneval.method.heldout is False
    assert humaneval.structure.size is None
    assert answer_tokens(humaneval, "T2") == {"programmatic"}

    mtbench = imported("mtbench").factsheet
    assert answer_tokens(mtbench, "M1") == {"model_llm"}
    assert mtbench.method.judge_details.judge_model == "GPT-4"
    assert answer_tokens(mtbench, "T5") == {"dynamic"}
    assert mtbench.structure.size.category == "small"
    assert mtbench.structure.size.count == 80
    assert mtbench.context.release_date == "2023"


@criterion("question catalog contract")
def test_catalog_contract():
    def check(questions, mandatory_of, predicate_count_of, dimension_of):
        assert len(questions) == 27
        assert sum(1 for q in questions if mandatory_of(q)) == 15
        assert sum(predicate_count_of(q) for q in questions) == 2
        sizes = []
        for q in questions:
            dim = dimension_of(q)
            if not sizes or sizes[-1][0] != dim:
                sizes.append([dim, 0])
            sizes[-1][1] += 1
        assert [tuple(row) for row in sizes] == SECTION_SIZES

    check(
        list(catalog()),
        lambda q: q.mandatory,
        lambda q: (q.visible_if is not None)
        + (q.sub_answer is not None and q.sub_answer.visible_if is not None),
        lambda q: q.dimension,
    )

    with tempfile.TemporaryDirectory() as root:
        client = TestClient(create_app(FactsheetStore(root)))
        doc = client.get("/api/v1/schema").json()
    check(
        doc["questions"],
        lambda q: q["mandatory"],
        lambda q: (q["visible_if"] is not None)
        + (q["sub_answer"] is not None
           and q["sub_answer"]["visible_if"] is not None),
        lambda q: q["dimension"],
    )
    assert list(doc["sections"]) == [d for d, _ in SECTION_SIZES]


@criterion("round trips")
def test_round_trips():
    sheets = random_factsheets(1000, seed=2219)
    mismatches = sum(
        1 for fs in sheets if parse_canonical(serialize_canonical(fs)) != fs
    )
    assert mismatches == 0

    goldens = sorted(FIXTURES.glob("*.efs"))
    assert goldens
    for path in goldens:
        text = path.read_text(encoding="utf-8")
        assert serialize_canonical(parse_canonical(text)) == text, path.name

    vocab_ids = [q.id for q in CATALOG if q.vocabulary is not None]
    for name in FIXTURE_NAMES:
        fs = golden(name)
        again = import_card(export_card(fs)).factsheet
        for qid in vocab_ids:
            assert answer_tokens(again, qid) == answer_tokens(fs, qid), (
                f"{name}:{qid}"
            )


@criterion("validator behavior")
def test_validator_behavior():
    imagenet = golden("imagenet")
    assert error_codes(imagenet) == []
    assert "W-T301" in warning_codes(imagenet)

    humaneval = golden("humaneval")
    assert error_codes(humaneval) == []
    assert "W-T302" in warning_codes(humaneval)

    assert error_codes(golden("mtbench")) == []

    assert error_codes(empty_factsheet()) == MANDATORY_ERROR_CODES

    model_judge = with_answer(
        empty_factsheet(), "M1", (term("judge", "model_llm"),)
    )
    assert "E-M101" in error_codes(model_judge)


@criterion("completeness properties")
def test_completeness_properties():
    rng = random.Random(97)
    trials = violations = 0
    for fs in random_factsheets(1000, seed=31):
        open_ids = [q for q in applicable_ids(fs) if not is_answered(fs, q)]
        if not open_ids:
            fs = empty_factsheet()
            open_ids = list(applicable_ids(fs))
        qid = rng.choice(open_ids)
        before = completeness(fs).overall
        after = completeness(
            with_answer(fs, qid, _random_answer(rng, qid))
        ).overall
        trials += 1
        violations += after < before
    assert trials == 1000
    assert violations == 0

    fs = empty_factsheet()
    fs = with_answer(fs, "M1", (term("judge", "auto_reference"),))
    fs = with_answer(fs, "M3", ("score outputs",))
    fs = with_answer(fs, "M4", term("model_access", "output_only"))
    fs = with_answer(fs, "M5", False)
    before = completeness(fs).score("method").ratio
    widened = with_answer(
        fs, "M1",
        (term("judge", "auto_reference"), term("judge", "model_llm")),
    )
    after = completeness(widened).score("method").ratio
    assert before == 1.0
    assert after < before


@criterion("corpus analytics")
def test_corpus_analytics():
    sheets = [golden(name) for name in FIXTURE_NAMES]
    stats = corpus_stats(sheets)
    assert stats.vocab_hist("M1") == {
        "auto_reference": 1, "auto_execution": 1, "model_llm": 1,
    }
    assert stats.fill_rate("T3") == 2 / 3

    delta = diff(golden("humaneval"), golden("mtbench"))
    assert delta.entry("M1").status == DiffStatus.DIFFERS


@criterion("end-to-end pipeline")
def test_end_to_end_pipeline():
    cli = [sys.executable, "-m", "efs.cli"]

    def run(*args, stdin=None):
        return subprocess.run(
            cli + list(args), cwd=tmp, input=stdin,
            capture_output=True, text=True,
        )

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        card = FIXTURES / "mtbench.tex"
        (tmp / "card.tex").write_text(
            card.read_text(encoding="utf-8"), encoding="utf-8"
        )

        step = run("import-card", "card.tex", "-o", "sheet.efs")
        assert step.returncode == 0, step.stderr
        assert (tmp / "sheet.efs").read_text(encoding="utf-8") == golden_text(
            "mtbench"
        )

        step = run("validate", "sheet.efs")
        assert step.returncode == 0, step.stderr

        step = run("render", "sheet.efs", "--target", "hypertext")
        assert step.returncode == 0, step.stderr
        for heading in ("Basic Information", "What Does It Evaluate",
                        "How Is It Structured", "How Does It Work",
                        "Quality &amp; Reliability"):
            assert heading in step.stdout, heading

        assert run("new", "blank").returncode == 0
        assert run("validate", "blank.efs").returncode == 1

        (tmp / "torn.efs").write_text("#%EFS 9.9\n", encoding="utf-8")
        assert run("validate", "torn.efs").returncode == 2

        assert run("render", "missing.efs").returncode == 3
        assert run("no-such-command").returncode == 3

    with tempfile.TemporaryDirectory() as root:
        client = TestClient(create_app(FactsheetStore(root)))
        body = golden_text("mtbench")

        created = client.put(
            "/api/v1/factsheets/mt-bench", content=body,
            headers={"content-type": "text/plain; charset=utf-8"},
        )
        assert created.status_code == 200
        assert created.headers["etag"] == '"1"'

        fetched = client.get("/api/v1/factsheets/mt-bench")
        assert fetched.status_code == 200
        assert fetched.headers["etag"] == '"1"'
        assert fetched.json()["revision"] == 1

        updated = client.put(
            "/api/v1/factsheets/mt-bench", content=body,
            headers={"content-type": "text/plain", "if-match": '"1"'},
        )
        assert updated.status_code == 200
        assert updated.json()["revision"] == 2

        stale = client.put(
            "/api/v1/factsheets/mt-bench", content=body,
            headers={"content-type": "text/plain", "if-match": '"1"'},
        )
        assert stale.status_code == 409
        assert stale.json()["code"] == "conflict"
