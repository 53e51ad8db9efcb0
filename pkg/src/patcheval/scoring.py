"""Reasoning metrics and their validation against human labels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import (
    DimensionMismatch,
    EmptyInput,
    EmptyReference,
    UnlabeledRecord,
    ZeroVector,
)
from .gateway import Gateway, ModelHandle
from .prompts import TemplateSet, render_judge_verdict_prompt


@dataclass
class EvaluationRecord:
    """All automated outcomes for one candidate."""

    sample_id: str
    prompt_id: str
    generator: str
    status: str
    extraction_error: Optional[str] = None
    explanation_cs: dict[str, float] = field(default_factory=dict)
    judge_verdicts: dict[str, Optional[bool]] = field(default_factory=dict)
    code_embed_cs: Optional[float] = None
    rouge_l: Optional[float] = None
    external_metrics: dict[str, float] = field(default_factory=dict)
    human_label: Optional[str] = None  # "reasonable" | "unreasonable"
    human_correct: Optional[bool] = None


@dataclass
class ValidationResult:
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: dict[str, int]
    threshold: Optional[dict] = None
    degenerate: bool = False


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """dot(a, b) / (|a||b|), clamped to [-1, 1] against rounding."""
    if len(a) != len(b):
        raise DimensionMismatch(f"dimensions differ: {len(a)} vs {len(b)}")
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for a zero vector")
    return max(-1.0, min(1.0, dot / (na * nb)))


def parse_verdict(reply: str) -> Optional[bool]:
    """Strict first-line YES/NO parse; None when unparseable."""
    first = reply.strip().split("\n", 1)[0].strip().lower()
    token = first.split()[0].rstrip(".,:;!") if first else ""
    if token in ("yes", "no"):
        return token == "yes"
    return None


def judge_verdict(
    gateway: Gateway,
    judge: ModelHandle,
    description: str,
    explanation: str,
    ground_truth_explanation: str,
    templates: Optional[TemplateSet] = None,
) -> Optional[bool]:
    """Binary similarity verdict from a judge model.

    An unparseable reply is retried once; a second failure records the
    verdict as unavailable (None), which is excluded from rate denominators.
    """
    turns = render_judge_verdict_prompt(
        description, explanation, ground_truth_explanation, templates
    )
    for _ in range(2):
        reply = gateway.chat(judge, turns).text
        verdict = parse_verdict(reply)
        if verdict is not None:
            return verdict
    return None


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, 1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(reference: Sequence[str], candidate: Sequence[str]) -> dict[str, float]:
    """LCS-based ROUGE-L precision/recall/F1 over token sequences."""
    if not reference:
        raise EmptyReference("ROUGE-L needs a non-empty reference")
    lcs = lcs_length(reference, candidate)
    recall = lcs / len(reference)
    precision = lcs / len(candidate) if candidate else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return {"precision": precision, "recall": recall, "f1": f1}


def rouge_l_text(reference: str, candidate: str) -> dict[str, float]:
    return rouge_l(reference.split(), candidate.split())


def percentile_threshold(values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th order statistic."""
    if not values:
        raise EmptyInput("percentile of an empty list")
    if not 0 < pct < 100:
        raise ValueError("pct must be in (0, 100)")
    ordered = sorted(values)
    rank = math.ceil(pct / 100 * len(ordered))
    return ordered[rank - 1]


def validate_against_labels(
    records: Sequence[EvaluationRecord],
    selector: Callable[[EvaluationRecord], bool],
    threshold: Optional[dict] = None,
) -> ValidationResult:
    """Confusion-matrix scoring of a boolean predictor against human labels.

    Positive class is the "reasonable" label. Zero denominators yield 0
    with the degenerate flag set.
    """
    tp = fp = fn = tn = 0
    for rec in records:
        if rec.human_label not in ("reasonable", "unreasonable"):
            raise UnlabeledRecord(
                f"record {rec.sample_id}/{rec.prompt_id}/{rec.generator} has no label"
            )
        actual = rec.human_label == "reasonable"
        predicted = selector(rec)
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and actual:
            fn += 1
        else:
            tn += 1
    degenerate = False

    def ratio(num: int, den: int) -> float:
        nonlocal degenerate
        if den == 0:
            degenerate = True
            return 0.0
        return num / den

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = ratio_f1(precision, recall)
    accuracy = ratio(tp + tn, tp + fp + fn + tn)
    return ValidationResult(
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=accuracy,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        threshold=threshold,
        degenerate=degenerate,
    )


def ratio_f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def threshold_selector(
    metric: Callable[[EvaluationRecord], Optional[float]], threshold: float
) -> Callable[[EvaluationRecord], bool]:
    """Predictor flagging records whose metric exceeds the threshold."""

    def select(rec: EvaluationRecord) -> bool:
        value = metric(rec)
        return value is not None and value > threshold

    return select
