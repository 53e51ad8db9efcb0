"""Paired significance tests for comparing two prompt configurations.

Binary outcomes (compiled / plausible / judge verdict) use an exact
McNemar test on the discordant counts; continuous outcomes (explanation
cosine similarity) use the Wilcoxon signed-rank test with Cliff's delta,
the mean paired difference, and a seeded bootstrap percentile interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EmptyInput, UnmatchedRecords
from .scoring import EvaluationRecord

EXACT_WILCOXON_MAX_N = 20


@dataclass(frozen=True)
class PairedBinary:
    n11: int
    n10: int
    n01: int
    n00: int

    @property
    def a_successes(self) -> int:
        return self.n11 + self.n10

    @property
    def b_successes(self) -> int:
        return self.n11 + self.n01

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00


@dataclass
class McNemarResult:
    p: float
    odds_ratio: float
    discordant: tuple[int, int]
    or_flag: Optional[str] = None  # "infinite" | "undefined"


@dataclass
class ContinuousResult:
    p: float
    cliffs_delta: float
    mean_diff: float
    ci: tuple[float, float]
    mean_a: float
    mean_b: float
    degenerate: bool = False


@dataclass
class SignificanceReport:
    claim_id: str
    n_pairs: int
    binary: dict[str, McNemarResult] = field(default_factory=dict)
    binary_counts: dict[str, PairedBinary] = field(default_factory=dict)
    continuous: dict[str, ContinuousResult] = field(default_factory=dict)


def mcnemar_exact(pb: PairedBinary) -> McNemarResult:
    """Exact two-sided McNemar test on discordant counts b=n10, c=n01."""
    b, c = pb.n10, pb.n01
    n = b + c
    if n == 0:
        return McNemarResult(p=1.0, odds_ratio=float("nan"), discordant=(b, c), or_flag="undefined")
    k = min(b, c)
    tail = sum(math.comb(n, i) for i in range(k + 1)) / 2**n
    p = min(1.0, 2 * tail)
    if c == 0:
        return McNemarResult(p=p, odds_ratio=float("inf"), discordant=(b, c), or_flag="infinite")
    return McNemarResult(p=p, odds_ratio=b / c, discordant=(b, c))


def _ranks(values: Sequence[float]) -> list[float]:
    """Ranks of |values| with ties averaged."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def wilcoxon_signed_rank(diffs: Sequence[float]) -> dict:
    """Two-sided Wilcoxon signed-rank p-value.

    Zero differences are dropped and tied absolute values share averaged
    ranks. With n <= 20 remaining pairs the p-value is exact over all sign
    patterns of the observed ranks; larger n uses a normal approximation
    with tie and continuity corrections.
    """
    if not diffs:
        raise EmptyInput("wilcoxon on an empty list")
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return {"p": 1.0, "degenerate": True, "n": 0}
    n = len(nonzero)
    ranks = _ranks([abs(d) for d in nonzero])
    w_plus = sum(r for d, r in zip(nonzero, ranks) if d > 0)
    total = sum(ranks)
    center = total / 2

    if n <= EXACT_WILCOXON_MAX_N:
        # The null distribution of W+ is symmetric around total/2 because
        # flipping every sign maps W+ to total - W+.
        observed = abs(w_plus - center)
        count = 0
        for mask in range(2**n):
            w = sum(ranks[i] for i in range(n) if mask >> i & 1)
            if abs(w - center) >= observed - 1e-12:
                count += 1
        return {"p": count / 2**n, "degenerate": False, "n": n, "w": w_plus}

    # Normal approximation with tie correction.
    mu = n * (n + 1) / 4
    tie_term = 0.0
    seen: dict[float, int] = {}
    for d in nonzero:
        seen[abs(d)] = seen.get(abs(d), 0) + 1
    for t in seen.values():
        tie_term += t**3 - t
    sigma2 = n * (n + 1) * (2 * n + 1) / 24 - tie_term / 48
    sigma = math.sqrt(sigma2)
    if sigma == 0:
        return {"p": 1.0, "degenerate": True, "n": n, "w": w_plus}
    z = (abs(w_plus - mu) - 0.5) / sigma
    p = 2 * (1 - NormalDist().cdf(max(z, 0.0)))
    return {"p": min(1.0, p), "degenerate": False, "n": n, "w": w_plus}


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> float:
    """(#{a_i > b_j} - #{a_i < b_j}) / (|a| * |b|) over all cross pairs."""
    if not a or not b:
        raise EmptyInput("cliffs_delta on an empty list")
    gt = lt = 0
    for x in a:
        for y in b:
            if x > y:
                gt += 1
            elif x < y:
                lt += 1
    return (gt - lt) / (len(a) * len(b))


def bootstrap_ci(
    diffs: Sequence[float],
    resamples: int = 10_000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Seed-deterministic percentile interval of the resampled mean."""
    if not diffs:
        raise EmptyInput("bootstrap on an empty list")
    rng = np.random.default_rng(seed)
    arr = np.asarray(diffs, dtype=float)
    idx = rng.integers(0, len(arr), size=(resamples, len(arr)))
    means = arr[idx].mean(axis=1)
    alpha = (1 - level) / 2
    lo, hi = np.quantile(means, [alpha, 1 - alpha])
    return float(lo), float(hi)


# --- claim-level reporting ---------------------------------------------------


@dataclass(frozen=True)
class MetricSelector:
    """Named extractor over matched evaluation records."""

    name: str
    kind: str  # "binary" | "continuous"
    fn: Callable[[EvaluationRecord], Optional[float]]


def compiled_metric(rec: EvaluationRecord) -> float:
    return 1.0 if rec.status != "not_compilable" else 0.0


def plausible_metric(rec: EvaluationRecord) -> float:
    return 1.0 if rec.status == "plausible" else 0.0


def mean_cs_metric(rec: EvaluationRecord) -> Optional[float]:
    if not rec.explanation_cs:
        return None
    return sum(rec.explanation_cs.values()) / len(rec.explanation_cs)


def judge_metric(rec: EvaluationRecord) -> Optional[float]:
    verdicts = [v for v in rec.judge_verdicts.values() if v is not None]
    if not verdicts:
        return None
    return 1.0 if sum(verdicts) * 2 >= len(verdicts) else 0.0


DEFAULT_METRICS = (
    MetricSelector("C", "binary", compiled_metric),
    MetricSelector("T", "binary", plausible_metric),
    MetricSelector("CS", "continuous", mean_cs_metric),
    MetricSelector("J", "binary", judge_metric),
)


def _match(
    records_a: Sequence[EvaluationRecord], records_b: Sequence[EvaluationRecord]
) -> list[tuple[EvaluationRecord, EvaluationRecord]]:
    index_b = {(r.sample_id, r.generator): r for r in records_b}
    pairs = []
    for ra in records_a:
        key = (ra.sample_id, ra.generator)
        if key not in index_b:
            raise UnmatchedRecords(f"no matching record for {key}")
        pairs.append((ra, index_b[key]))
    if len(index_b) != len(pairs):
        raise UnmatchedRecords("record lists differ in matched keys")
    return pairs


def report_claim(
    claim_id: str,
    records_a: Sequence[EvaluationRecord],
    records_b: Sequence[EvaluationRecord],
    metrics: Sequence[MetricSelector] = DEFAULT_METRICS,
    bootstrap_resamples: int = 10_000,
    seed: int = 0,
) -> SignificanceReport:
    """Run all configured paired tests for one A-vs-B claim."""
    pairs = _match(records_a, records_b)
    report = SignificanceReport(claim_id=claim_id, n_pairs=len(pairs))
    for metric in metrics:
        values = [
            (metric.fn(ra), metric.fn(rb))
            for ra, rb in pairs
        ]
        values = [(va, vb) for va, vb in values if va is not None and vb is not None]
        if not values:
            continue
        if metric.kind == "binary":
            n11 = sum(1 for va, vb in values if va and vb)
            n10 = sum(1 for va, vb in values if va and not vb)
            n01 = sum(1 for va, vb in values if not va and vb)
            n00 = sum(1 for va, vb in values if not va and not vb)
            pb = PairedBinary(n11, n10, n01, n00)
            report.binary[metric.name] = mcnemar_exact(pb)
            report.binary_counts[metric.name] = pb
        else:
            a_vals = [va for va, _ in values]
            b_vals = [vb for _, vb in values]
            diffs = [va - vb for va, vb in values]
            wil = wilcoxon_signed_rank(diffs)
            report.continuous[metric.name] = ContinuousResult(
                p=wil["p"],
                cliffs_delta=cliffs_delta(a_vals, b_vals),
                mean_diff=sum(diffs) / len(diffs),
                ci=bootstrap_ci(diffs, resamples=bootstrap_resamples, seed=seed),
                mean_a=sum(a_vals) / len(a_vals),
                mean_b=sum(b_vals) / len(b_vals),
                degenerate=wil.get("degenerate", False),
            )
    return report


def format_binary_row(counts: PairedBinary, result: McNemarResult) -> str:
    """Render one binary comparison like "86/219 vs 85/219 (p=1.0000, OR=1.14)"."""
    if result.or_flag == "undefined":
        or_text = "OR=undef"
    elif result.or_flag == "infinite":
        or_text = "OR=inf"
    else:
        or_text = f"OR={result.odds_ratio:.2f}"
    return (
        f"{counts.a_successes}/{counts.total} vs {counts.b_successes}/{counts.total} "
        f"(p={result.p:.4f}, {or_text})"
    )


def format_continuous_row(result: ContinuousResult) -> str:
    return (
        f"{result.mean_a:.4f} vs {result.mean_b:.4f}; p={result.p:.4f}; "
        f"delta={result.cliffs_delta:+.3f}; diff={result.mean_diff:+.4f} "
        f"[{result.ci[0]:+.4f}, {result.ci[1]:+.4f}]"
    )
