"""Controlled vocabularies for factsheet answers.

Each vocabulary declares its canonical tokens in a fixed order, a display
name per token, and a table of lowercase trigger substrings used to map
free text onto tokens.  Matching picks the longest trigger contained in
the text; ties fall back to declaration order.  Open vocabularies carry
an ``other`` escape token; closed vocabularies are exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

OTHER = "other"


@dataclass(frozen=True)
class Vocabulary:
    """A named set of canonical tokens with display names and triggers."""

    name: str
    open: bool
    tokens: tuple[str, ...]
    display: dict[str, str]
    triggers: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def all_tokens(self) -> tuple[str, ...]:
        """Tokens a value may legally carry, including ``other`` if open."""
        return self.tokens + (OTHER,) if self.open else self.tokens

    def __contains__(self, token: str) -> bool:
        return token in self.tokens or (self.open and token == OTHER)

    def display_name(self, token: str) -> str:
        return self.display.get(token, token)

    def match(self, text: str) -> str | None:
        """Best canonical token for ``text``, or None when nothing triggers.

        Longest trigger wins; on equal length the earlier-declared token
        keeps the match.
        """
        hay = text.lower()
        best: str | None = None
        best_len = 0
        for token in self.tokens:
            for trigger in self.triggers.get(token, ()):
                if len(trigger) > best_len and trigger in hay:
                    best = token
                    best_len = len(trigger)
        return best


def _voc(name: str, open_: bool, *entries: tuple) -> Vocabulary:
    tokens = tuple(e[0] for e in entries)
    display = {e[0]: e[1] for e in entries}
    triggers = {e[0]: tuple(e[2]) for e in entries if len(e) > 2 and e[2]}
    if open_:
        display[OTHER] = "Other"
    return Vocabulary(name, open_, tokens, display, triggers)


PURPOSE = _voc(
    "purpose",
    True,
    ("development", "Development", ("development", "training signal", "improve")),
    ("selection", "Model Selection", ("model selection", "selection", "ranking")),
    ("deployment", "Deployment", ("deployment", "production", "monitoring")),
    ("research", "Research", ("research",)),
)

MODEL_PROPERTY = _voc(
    "model_property",
    True,
    ("performance", "Performance",
     ("performance", "general capability", "correctness", "accuracy", "task success")),
    ("quality", "Quality",
     ("quality", "fluency", "coherence", "helpfulness", "factuality")),
    ("robustness", "Robustness",
     ("robustness", "distribution shift", "perturbation")),
    ("calibration", "Calibration", ("calibration", "confidence", "uncertainty")),
    ("adversarial_robustness", "Adversarial Robustness", ("adversarial",)),
    ("memorization", "Memorization", ("memorization", "memorisation", "verbatim recall")),
    ("fairness", "Fairness", ("fairness", "demographic", "equitable")),
    ("safety", "Safety", ("safety", "harmful", "toxic", "jailbreak")),
    ("leakage_contamination", "Leakage & Contamination", ("leakage", "contamination")),
    ("privacy", "Privacy", ("privacy", "personal data", "pii")),
    ("interpretability", "Interpretability",
     ("interpretability", "interpretable", "explainability", "explanation")),
    ("efficiency", "Efficiency", ("efficiency", "latency", "compute cost")),
    ("retrainability", "Retrainability", ("retrain",)),
    ("meta_learning", "Meta-Learning",
     ("meta-learning", "meta learning", "few-shot adaptation", "in-context learning")),
)

MODALITY = _voc(
    "modality",
    True,
    ("text", "Text", ("text",)),
    ("vision", "Vision", ("vision", "image", "visual", "picture")),
    ("audio", "Audio", ("audio", "speech", "sound")),
    ("video", "Video", ("video",)),
    ("code", "Code", ("code",)),
    ("structured", "Structured",
     ("structured", "class", "label", "tabular", "embedding", "action")),
    ("multimodal", "Multimodal", ("multimodal", "multi-modal", "interleaved")),
)

INPUT_SOURCE = _voc(
    "input_source",
    True,
    ("existing_dataset", "Existing dataset",
     ("existing dataset", "publicly available", "established benchmark", "existing")),
    ("new_dataset", "New dataset",
     ("new dataset", "released with", "purpose-built", "newly collected")),
    ("proprietary", "Proprietary", ("proprietary", "internal data")),
    ("synthetic", "Synthetic", ("synthetic", "procedurally generated", "simulated")),
    ("crowdsourced", "Crowdsourced", ("crowdsourc", "crowd workers")),
    ("expert_curated", "Expert-curated",
     ("expert-curated", "expert curated", "curated", "domain expert")),
    ("deployment_data", "Deployment data",
     ("deployment", "real-world usage", "production traffic", "user logs")),
)

OUTPUT_SOURCE = _voc(
    "output_source",
    True,
    ("human_annotation", "Human annotations",
     ("human annotat", "human-annotated", "human label", "manually labeled", "human rating")),
    ("inherited_labels", "Inherited labels",
     ("inherited", "pre-existing label", "original label")),
    ("programmatic", "Programmatic",
     ("programmat", "rule-based", "scripted")),
    ("execution_verified", "Execution-verified", ("execution", "runtime verification")),
    ("model_generated", "Model-generated",
     ("model-generated", "model generated", "llm-generated", "distillation")),
    ("reference_free", "Reference-free",
     ("reference-free", "reference free", "no ground truth")),
)

SIZE_CATEGORY = _voc(
    "size_category",
    False,
    ("small", "Small (<1K)", ("small",)),
    ("medium", "Medium (1K-100K)", ("medium",)),
    ("large", "Large (100K-1M)", ("large",)),
    ("very_large", "Very large (>1M)", ("very large", "very-large")),
    ("infinite", "Infinite", ("infinite", "unbounded")),
)

SPLIT_KIND = _voc(
    "split_kind",
    False,
    ("finetune_dev", "Fine-tuning/Development set", ("fine-tun", "development")),
    ("validation", "Validation set", ("validation",)),
    ("test", "Test set", ("test",)),
    ("private_test", "Private/Hidden test set", ("private", "hidden")),
)

DESIGN = _voc(
    "design",
    False,
    ("static", "Static", ("static",)),
    ("dynamic", "Dynamic", ("dynamic", "continuously updated", "live")),
    ("composite", "Composite", ("composite", "combination", "suite of")),
)

JUDGE = _voc(
    "judge",
    True,
    ("human_expert", "Human (Expert)", ("human expert", "expert annotator", "expert")),
    ("human_representative", "Human (Representative users)",
     ("representative", "human evaluation", "crowd", "end user")),
    ("auto_reference", "Automatic (Reference-based)",
     ("reference-based", "reference based", "ground truth comparison", "reference")),
    ("auto_reference_free", "Automatic (Reference-free)",
     ("reference-free", "reference free", "referenceless")),
    ("auto_execution", "Automatic (Execution-based)",
     ("execution", "unit test", "compile")),
    ("model_expert", "Model-based (Expert model)",
     ("expert model", "reward model", "fine-tuned judge", "classifier judge")),
    ("model_llm", "Model-based (General LLM)",
     ("llm judge", "model-based", "llm", "gpt", "language model judge")),
    ("hybrid", "Hybrid", ("hybrid", "mixed")),
)

MODEL_ACCESS = _voc(
    "model_access",
    False,
    ("output_only", "Output-only",
     ("output", "black-box", "black box", "api only", "query access")),
    ("partial", "Partial",
     ("partial", "logits", "probabilities", "intermediate", "grey-box", "gray-box")),
    ("full", "Full", ("full", "white-box", "white box", "weights")),
)

VALIDATION_TAG = _voc(
    "validation_tag",
    False,
    ("expert_review", "Expert review", ("expert review",)),
    ("pilot", "Pilot study", ("pilot",)),
    ("correlation", "Correlation analysis", ("correlation",)),
    ("ablation", "Ablation", ("ablation",)),
    ("construct_analysis", "Construct analysis", ("construct",)),
)

BASELINE_TAG = _voc(
    "baseline_tag",
    False,
    ("random", "Random baseline", ("random",)),
    ("heuristic", "Heuristic baseline", ("heuristic",)),
    ("prior_sota", "Prior state of the art", ("state of the art", "sota", "prior best")),
    ("human", "Human performance", ("human",)),
    ("specialized", "Specialized model", ("specialized", "specialised")),
)

ROBUSTNESS_TAG = _voc(
    "robustness_tag",
    False,
    ("input", "Input perturbation", ("input",)),
    ("output", "Output stability", ("output",)),
    ("procedure", "Procedure variation", ("procedure",)),
    ("judge", "Judge reliability", ("judge",)),
    ("statistical", "Statistical significance", ("statistical",)),
    ("confound", "Confound control", ("confound",)),
)

VOCABULARIES: dict[str, Vocabulary] = {
    v.name: v
    for v in (
        PURPOSE,
        MODEL_PROPERTY,
        MODALITY,
        INPUT_SOURCE,
        OUTPUT_SOURCE,
        SIZE_CATEGORY,
        SPLIT_KIND,
        DESIGN,
        JUDGE,
        MODEL_ACCESS,
        VALIDATION_TAG,
        BASELINE_TAG,
        ROBUSTNESS_TAG,
    )
}


def vocabulary(name: str) -> Vocabulary:
    return VOCABULARIES[name]
