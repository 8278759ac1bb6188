"""Seeded random factsheets for round-trip and property tests.

Sheets stay inside the canonical domain: vocabulary answers built with
``term`` carry display-name raws, ``other`` answers carry free text, and
no string contains a carriage return.  Everything else is fair game,
including quotes, backslashes, hashes, brackets and newlines.
"""

from __future__ import annotations

import random

from efs.model import (
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
    term,
)
from efs.vocab import OTHER, VOCABULARIES

_WORDS = (
    "model", "prompt", "answer", "score", "sample", "task", "judge",
    "pass@1", "n=500", "50%", "a;b", "k: v", 'say "hi"', "back\\slash",
    "# not a comment", "[brackets]", "key = value", "   padded   ",
    "über", "naïve", "», «",
)


def _text(rng: random.Random, multiline: bool = False) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(1, 6))]
    if multiline and rng.random() < 0.4:
        cut = rng.randint(1, len(words))
        words.insert(cut, "\n")
        if rng.random() < 0.1:
            words.insert(rng.randint(0, len(words)), '\n"""\n')
    out = " ".join(words).replace(" \n ", "\n")
    return out if out.strip() else "x"


def _texts(rng: random.Random, hi: int = 3, multiline: bool = False) -> tuple[str, ...]:
    return tuple(_text(rng, multiline) for _ in range(rng.randint(0, hi)))


def _terms(rng: random.Random, vocab_name: str, hi: int = 3) -> tuple[VocabTerm, ...]:
    voc = VOCABULARIES[vocab_name]
    picks = rng.sample(voc.tokens, k=min(rng.randint(0, hi), len(voc.tokens)))
    out = [term(vocab_name, t) for t in picks]
    if voc.open and rng.random() < 0.3:
        out.append(VocabTerm(OTHER, _text(rng, multiline=True)))
    rng.shuffle(out)
    return tuple(out)


def _term_or_none(rng: random.Random, vocab_name: str) -> VocabTerm | None:
    voc = VOCABULARIES[vocab_name]
    if rng.random() < 0.4:
        return None
    return term(vocab_name, rng.choice(voc.tokens))


def _tagged(rng: random.Random, vocab_name: str) -> TaggedText | None:
    roll = rng.random()
    if roll < 0.35:
        return None
    tags = tuple(sorted(rng.sample(VOCABULARIES[vocab_name].tokens,
                                   k=rng.randint(0, 3))))
    if roll < 0.55 and tags:
        return TaggedText("", tags)
    return TaggedText(_text(rng, multiline=True), tags)


def _size(rng: random.Random) -> SizeSpec | None:
    if rng.random() < 0.4:
        return None
    category = rng.choice(VOCABULARIES["size_category"].tokens)
    count = rng.randrange(0, 10_000_000) if rng.random() < 0.7 else None
    return SizeSpec(category, count, _text(rng))


def _splits(rng: random.Random) -> tuple[SplitSpec, ...]:
    kinds = rng.sample(VOCABULARIES["split_kind"].tokens, k=rng.randint(0, 4))
    return tuple(SplitSpec(k, _text(rng).replace("\n", " ")) for k in kinds)


def _details(rng: random.Random) -> JudgeDetails | None:
    if rng.random() < 0.5:
        return None
    fields = {name: (_text(rng) if rng.random() < 0.5 else None)
              for name in ("judge_model", "prompting_strategy",
                           "temperature", "agreement")}
    if not any(fields.values()):
        fields["judge_model"] = _text(rng)
    return JudgeDetails(**fields)


def _extensions(rng: random.Random) -> tuple[tuple[str, str], ...]:
    n = rng.randint(0, 3)
    keys = rng.sample(("x-splits", "x-license", "x-notes", "x-size-2",
                       "x-official_name"), k=n)
    return tuple((k, _text(rng, multiline=True) if rng.random() < 0.8 else "")
                 for k in keys)


def random_factsheet(rng: random.Random) -> Factsheet:
    maybe = lambda p, make: make() if rng.random() < p else None
    heldout = rng.choice((None, True, False))
    return Factsheet(
        context=ContextDim(
            title=maybe(0.9, lambda: _text(rng)),
            subtitle=maybe(0.4, lambda: _text(rng)),
            authors=maybe(0.8, lambda: _text(rng)),
            release_date=maybe(0.8, lambda: rng.choice(
                ("2021", "2023-06-01", "spring 2019"))),
            paper_link=maybe(0.5, lambda: "https://example.org/" + str(rng.randint(1, 99))),
            code_link=maybe(0.5, lambda: "https://example.org/code"),
            purposes=_terms(rng, "purpose"),
        ),
        scope=ScopeDim(
            capabilities=_texts(rng, multiline=True),
            model_properties=_terms(rng, "model_property", hi=4),
            input_modality=_terms(rng, "modality"),
            output_modality=_terms(rng, "modality"),
        ),
        structure=StructureDim(
            input_sources=_terms(rng, "input_source"),
            output_sources=_terms(rng, "output_source"),
            size=_size(rng),
            splits=_splits(rng),
            design=_term_or_none(rng, "design"),
            dataset_refs=_texts(rng, hi=2),
        ),
        method=MethodDim(
            judges=_terms(rng, "judge"),
            judge_details=_details(rng),
            protocol=_texts(rng, hi=4, multiline=True),
            model_access=_term_or_none(rng, "model_access"),
            heldout=heldout,
            heldout_details=maybe(0.6, lambda: _text(rng)) if heldout else None,
        ),
        alignment=AlignmentDim(
            validation=_tagged(rng, "validation_tag"),
            baselines=_tagged(rng, "baseline_tag"),
            robustness=_tagged(rng, "robustness_tag"),
            limitations=_texts(rng, multiline=True),
            similar_evals=_texts(rng, hi=2),
        ),
        extensions=_extensions(rng),
    )


def random_factsheets(n: int, seed: int) -> list[Factsheet]:
    rng = random.Random(seed)
    return [random_factsheet(rng) for _ in range(n)]
