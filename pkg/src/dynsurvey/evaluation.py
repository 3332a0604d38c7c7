"""Per-step metric bundles and macro/micro aggregation.

Each step of a benchmark stream is scored against its ground-truth span
and scope. Embedding-backed metrics are absent (None) when no embedder
is configured or a value is undefined; absent values are excluded from
aggregation rather than treated as zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .benchmark import FRAMEWORK, StepResult
from .endpoints import TextEmbedder
from .errors import MetricUnavailableError
from .metrics import (
    DEFAULT_COHERENCE_WINDOW,
    DEFAULT_ROUGE_BETA,
    bert_similarity,
    bleu_4,
    delta_out,
    delta_tokens,
    document_token_stream,
    local_coherence,
    rouge_l,
    semantic_alignment,
    token_edit_script,
)

logger = logging.getLogger(__name__)

SCALAR_METRICS = (
    "bleu4", "rouge_l_f", "bert_sim", "semantic_align", "local_coherence",
    "delta_tokens", "delta_out",
)


@dataclass(frozen=True)
class StepEvaluation:
    """Metric bundle for one update step."""

    survey: str
    method: str
    paper_id: str
    out_of_scope: int  # y
    abstained: int     # a-hat
    delta_tokens: int
    delta_out: int
    bleu4: float | None = None
    rouge_l_f: float | None = None
    bert_sim: float | None = None
    semantic_align: float | None = None
    local_coherence: float | None = None
    routing_hit1: int | None = None
    routing_hit3: int | None = None


def _step_scope(result: StepResult) -> set[str]:
    """Scope regions an edit is allowed to touch.

    Framework steps use the routed scope; baseline steps use the
    ground-truth section. Out-of-scope baseline steps have an empty scope
    since no edit is appropriate at all.
    """
    if result.method == FRAMEWORK:
        scope = set()
        if result.routed_section:
            scope.add(f"section:{result.routed_section}")
        if result.routed_table:
            scope.add(f"table:{result.routed_table}")
        return scope
    if result.gt_span is not None:
        return {f"section:{result.gt_span.section_id}"}
    return set()


def evaluate_step(
    result: StepResult,
    survey: str,
    embedder: TextEmbedder | None = None,
    coherence_window: int = DEFAULT_COHERENCE_WINDOW,
    rouge_beta: float = DEFAULT_ROUGE_BETA,
) -> StepEvaluation:
    """Score one step: similarity, property quality, disruption, routing."""
    before_tokens, before_regions = document_token_stream(result.before)
    after_tokens, after_regions = document_token_stream(result.after)
    script = token_edit_script(before_tokens, after_tokens)
    d_tokens = delta_tokens(script)
    d_out = delta_out(script, _step_scope(result), before_regions, after_regions)

    update_text = " ".join(s.text for s in result.inserted)
    bleu = rouge = bert = align = coherence = None
    if result.gt_span is not None:
        reference = result.gt_span.text
        bleu = bleu_4(update_text, reference)
        rouge = rouge_l(update_text, reference, beta=rouge_beta)
        if embedder is not None and update_text:
            try:
                bert = bert_similarity(update_text, reference, embedder)
            except MetricUnavailableError as exc:
                logger.warning("similarity embedding unavailable for %s: %s",
                               result.paper_id, exc)
    if embedder is not None and result.inserted and result.paper_repr:
        try:
            align = semantic_alignment(
                [s.text for s in result.inserted], result.paper_repr, embedder)
            coherence = local_coherence(
                result.inserted, result.after, coherence_window, embedder)
        except MetricUnavailableError as exc:
            logger.warning("quality embeddings unavailable for %s: %s", result.paper_id, exc)

    hit1 = hit3 = None
    if result.gt_span is not None and not result.out_of_scope:
        target = result.gt_span.section_id
        ranked = list(result.ranked_sections)
        if result.method == FRAMEWORK:
            hit1 = int(bool(ranked) and ranked[0] == target)
            hit3 = int(target in ranked[:3])
    return StepEvaluation(
        survey=survey,
        method=result.method,
        paper_id=result.paper_id,
        out_of_scope=int(result.out_of_scope),
        abstained=int(result.abstained),
        delta_tokens=d_tokens,
        delta_out=d_out,
        bleu4=bleu,
        rouge_l_f=rouge,
        bert_sim=bert,
        semantic_align=align,
        local_coherence=coherence,
        routing_hit1=hit1,
        routing_hit3=hit3,
    )


def evaluate_stream(
    results: Sequence[StepResult],
    survey: str,
    embedder: TextEmbedder | None = None,
    coherence_window: int = DEFAULT_COHERENCE_WINDOW,
    rouge_beta: float = DEFAULT_ROUGE_BETA,
) -> list[StepEvaluation]:
    return [
        evaluate_step(r, survey, embedder=embedder,
                      coherence_window=coherence_window, rouge_beta=rouge_beta)
        for r in results
    ]


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    count: int


def summarize(values: Sequence[float]) -> MetricSummary | None:
    present = [v for v in values if v is not None]
    if not present:
        return None
    mean = sum(present) / len(present)
    variance = sum((v - mean) ** 2 for v in present) / len(present)
    return MetricSummary(mean=mean, std=math.sqrt(variance), count=len(present))


def _metric_values(evals: Sequence[StepEvaluation], metric: str) -> list[float]:
    return [getattr(e, metric) for e in evals if getattr(e, metric) is not None]


def _group_summary(evals: Sequence[StepEvaluation]) -> dict[str, MetricSummary | None]:
    summary: dict[str, MetricSummary | None] = {}
    for metric in SCALAR_METRICS:
        summary[metric] = summarize(_metric_values(evals, metric))
    hits = [(e.routing_hit1, e.routing_hit3) for e in evals
            if e.routing_hit1 is not None and e.routing_hit3 is not None]
    summary["routing_hit1"] = summarize([h1 for h1, _ in hits])
    summary["routing_hit3"] = summarize([h3 for _, h3 in hits])
    labels = [(e.out_of_scope, e.abstained) for e in evals]
    abstained = [pair for pair in labels if pair[1] == 1]
    out_of_scope = [pair for pair in labels if pair[0] == 1]
    true_positives = sum(1 for y, a in labels if y == 1 and a == 1)
    summary["abstention_precision"] = (
        MetricSummary(true_positives / len(abstained), 0.0, len(abstained))
        if abstained else None)
    summary["abstention_recall"] = (
        MetricSummary(true_positives / len(out_of_scope), 0.0, len(out_of_scope))
        if out_of_scope else None)
    return summary


REPORTED_METRICS = SCALAR_METRICS + (
    "routing_hit1", "routing_hit3", "abstention_precision", "abstention_recall",
)


def aggregate(
    evals: Sequence[StepEvaluation],
) -> dict[str, dict[str, dict[str, MetricSummary | None]]]:
    """Group per-step evaluations by method, then survey; add macro and micro.

    Per survey: plain means over steps. Macro: unweighted mean of the
    per-survey means. Micro: pooled mean over all steps. Metrics absent
    everywhere stay absent at every level.
    """
    methods = sorted({e.method for e in evals})
    report: dict[str, dict[str, dict[str, MetricSummary | None]]] = {}
    for method in methods:
        method_evals = [e for e in evals if e.method == method]
        surveys = sorted({e.survey for e in method_evals})
        groups: dict[str, dict[str, MetricSummary | None]] = {}
        for survey in surveys:
            groups[survey] = _group_summary([e for e in method_evals if e.survey == survey])
        macro: dict[str, MetricSummary | None] = {}
        for metric in REPORTED_METRICS:
            survey_means = [groups[s][metric].mean for s in surveys
                            if groups[s][metric] is not None]
            macro[metric] = summarize(survey_means)
        groups["macro"] = macro
        groups["micro"] = _group_summary(method_evals)
        report[method] = groups
    return report
