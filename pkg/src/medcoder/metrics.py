"""Multi-label coding metrics and evidence-span alignment statistics.

Precision = TP/(TP+FP), recall = TP/(TP+FN), F1 their harmonic mean; any
ratio with a zero denominator is 0. Micro-averaging pools counts across codes
before computing one score; macro-averaging computes per-code scores and
takes their unweighted means (so macro F1 is the mean of per-code F1 values,
not the harmonic mean of macro P and R).

Span-alignment statistics cover the population of code-level true positives
that carry gold evidence spans: coverage (any predicted span), per-predicted-
span max IoU hit rates (> 0 and > 0.5), mean of those IoUs, and character /
LCS F1 per true positive averaged unweighted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import fmean, pstdev
from typing import Mapping, Optional, Sequence

from .errors import EmptyAccumulator, EmptyInput, KeyMismatch
from .textutil import tokenize

Span = tuple[int, int]


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def f1_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass
class ConfusionCounts:
    per_code: dict[str, Counts] = field(default_factory=dict)

    def get(self, code: str) -> Counts:
        return self.per_code.setdefault(code, Counts())

    def merge(self, other: "ConfusionCounts") -> "ConfusionCounts":
        for code, c in other.per_code.items():
            mine = self.get(code)
            mine.tp += c.tp
            mine.fp += c.fp
            mine.fn += c.fn
        return self


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def accumulate(gold: set, pred: set, acc: ConfusionCounts) -> ConfusionCounts:
    """Add one encounter's code-set decisions into ``acc`` (in place)."""
    for code in pred:
        if code in gold:
            acc.get(code).tp += 1
        else:
            acc.get(code).fp += 1
    for code in gold - pred:
        acc.get(code).fn += 1
    return acc


def _prf_from(tp: int, fp: int, fn: int) -> PRF:
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    return PRF(p, r, f1_score(p, r))


def micro_prf(acc: ConfusionCounts) -> PRF:
    """Pool all TP/FP/FN across codes, then score once."""
    tp = sum(c.tp for c in acc.per_code.values())
    fp = sum(c.fp for c in acc.per_code.values())
    fn = sum(c.fn for c in acc.per_code.values())
    return _prf_from(tp, fp, fn)


def macro_prf(acc: ConfusionCounts) -> PRF:
    """Unweighted mean of per-code precision/recall/F1 over observed codes."""
    observed = [c for c in acc.per_code.values() if c.tp or c.fp or c.fn]
    if not observed:
        raise EmptyAccumulator("no codes with any counts")
    per = [_prf_from(c.tp, c.fp, c.fn) for c in observed]
    return PRF(
        fmean(x.precision for x in per),
        fmean(x.recall for x in per),
        fmean(x.f1 for x in per),
    )


# -- span metrics ------------------------------------------------------------


def span_iou(a: Span, b: Span) -> float:
    """Character intersection-over-union of two half-open spans."""
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return _ratio(inter, union)


def _merge_spans(spans: Sequence[Span]) -> list[Span]:
    merged: list[Span] = []
    for s, e in sorted(spans):
        if merged and s <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))
    return merged


def _covered(merged: Sequence[Span]) -> int:
    return sum(e - s for s, e in merged)


def _overlap(a: Sequence[Span], b: Sequence[Span]) -> int:
    total = 0
    i = j = 0
    while i < len(a) and j < len(b):
        s = max(a[i][0], b[j][0])
        e = min(a[i][1], b[j][1])
        if e > s:
            total += e - s
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return total


def char_f1(pred_spans: Sequence[Span], gold_spans: Sequence[Span]) -> float:
    """F1 over the character-position sets covered by each span list."""
    pred = _merge_spans(pred_spans)
    gold = _merge_spans(gold_spans)
    inter = _overlap(pred, gold)
    p = _ratio(inter, _covered(pred))
    r = _ratio(inter, _covered(gold))
    return f1_score(p, r)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l_f1(pred_text: str, gold_text: str) -> float:
    """F1 over the longest common subsequence of the two token sequences."""
    pred = tokenize(pred_text)
    gold = tokenize(gold_text)
    lcs = lcs_length(pred, gold)
    p = _ratio(lcs, len(pred))
    r = _ratio(lcs, len(gold))
    return f1_score(p, r)


# -- alignment report ---------------------------------------------------------


@dataclass(frozen=True)
class SpanAlignmentReport:
    coverage: float
    hit_rate_iou_gt0: float
    hit_rate_iou_gt50: float
    char_f1: float
    rouge_l_f1: float
    mean_span_iou: float

    def to_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "hit_rate_iou_gt0": self.hit_rate_iou_gt0,
            "hit_rate_iou_gt50": self.hit_rate_iou_gt50,
            "char_f1": self.char_f1,
            "rouge_l_f1": self.rouge_l_f1,
            "mean_span_iou": self.mean_span_iou,
        }


def span_alignment(
    preds: Mapping[str, Mapping[str, Sequence[Span]]],
    golds: Mapping[str, Mapping[str, Optional[Sequence[Span]]]],
    texts: Mapping[str, str],
) -> SpanAlignmentReport:
    """Alignment statistics between predicted and gold evidence spans.

    ``preds[encounter][code]`` / ``golds[encounter][code]`` are span lists;
    a gold value of None means the code has no annotated spans and is
    excluded from the population. All three mappings must share keys.
    """
    if set(preds) != set(golds) or not set(golds) <= set(texts):
        off = set(preds) ^ set(golds) or set(golds) - set(texts)
        raise KeyMismatch(f"encounter ids present on one side only: {sorted(off)}")

    n_tp = 0
    n_covered = 0
    per_span_ious: list[float] = []
    char_scores: list[float] = []
    rouge_scores: list[float] = []
    for enc_id in sorted(golds):
        text = texts[enc_id]
        for code, gold_spans in golds[enc_id].items():
            if gold_spans is None or code not in preds[enc_id]:
                continue
            pred_spans = list(preds[enc_id][code])
            gold_spans = list(gold_spans)
            n_tp += 1
            if pred_spans:
                n_covered += 1
                for ps in pred_spans:
                    per_span_ious.append(
                        max((span_iou(ps, gs) for gs in gold_spans), default=0.0)
                    )
            char_scores.append(char_f1(pred_spans, gold_spans))
            pred_text = " ".join(text[s:e] for s, e in sorted(pred_spans))
            gold_text = " ".join(text[s:e] for s, e in sorted(gold_spans))
            rouge_scores.append(rouge_l_f1(pred_text, gold_text))

    return SpanAlignmentReport(
        coverage=_ratio(n_covered, n_tp),
        hit_rate_iou_gt0=_ratio(sum(1 for x in per_span_ious if x > 0), len(per_span_ious)),
        hit_rate_iou_gt50=_ratio(
            sum(1 for x in per_span_ious if x > 0.5), len(per_span_ious)
        ),
        char_f1=fmean(char_scores) if char_scores else 0.0,
        rouge_l_f1=fmean(rouge_scores) if rouge_scores else 0.0,
        mean_span_iou=fmean(per_span_ious) if per_span_ious else 0.0,
    )


# -- multi-run statistics ------------------------------------------------------


@dataclass(frozen=True)
class RunStats:
    mean: float
    std: float  # population standard deviation
    n_runs: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}


def run_stats(values: Sequence[float]) -> RunStats:
    if not values:
        raise EmptyInput("run_stats over an empty series")
    return RunStats(
        mean=fmean(values),
        std=pstdev(values) if len(values) > 1 else 0.0,
        n_runs=len(values),
    )
