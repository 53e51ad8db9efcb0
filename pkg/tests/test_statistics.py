import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from patcheval.errors import EmptyInput, UnmatchedRecords
from patcheval.scoring import EvaluationRecord
from patcheval.statistics import (
    DEFAULT_METRICS,
    PairedBinary,
    bootstrap_ci,
    cliffs_delta,
    compiled_metric,
    format_binary_row,
    format_continuous_row,
    judge_metric,
    mcnemar_exact,
    mean_cs_metric,
    plausible_metric,
    report_claim,
    wilcoxon_signed_rank,
)


# --- McNemar -------------------------------------------------------------------


def mcnemar_oracle(b: int, c: int) -> float:
    """Enumerate all 2^n outcomes of n fair coin flips; two-sided doubled tail."""
    n = b + c
    if n == 0:
        return 1.0
    m = min(b, c)
    hits = 0
    for bits in itertools.product((0, 1), repeat=n):
        if sum(bits) <= m:
            hits += 1
    return min(1.0, 2 * hits / 2**n)


def test_mcnemar_against_enumeration_oracle():
    for b in range(0, 13):
        for c in range(0, 13 - b):
            result = mcnemar_exact(PairedBinary(0, b, c, 0))
            assert result.p == pytest.approx(mcnemar_oracle(b, c), abs=1e-12), (b, c)


def test_mcnemar_symmetry_in_discordants():
    for b, c in [(3, 7), (0, 5), (6, 6), (1, 0)]:
        pa = mcnemar_exact(PairedBinary(2, b, c, 2))
        pb = mcnemar_exact(PairedBinary(2, c, b, 2))
        assert pa.p == pytest.approx(pb.p)


def test_mcnemar_ignores_concordant_counts():
    assert (
        mcnemar_exact(PairedBinary(100, 4, 9, 50)).p
        == mcnemar_exact(PairedBinary(0, 4, 9, 0)).p
    )


def test_mcnemar_odds_ratio_flags():
    assert mcnemar_exact(PairedBinary(1, 4, 2, 1)).odds_ratio == pytest.approx(2.0)
    inf = mcnemar_exact(PairedBinary(0, 3, 0, 0))
    assert inf.or_flag == "infinite" and math.isinf(inf.odds_ratio)
    undef = mcnemar_exact(PairedBinary(5, 0, 0, 5))
    assert undef.or_flag == "undefined" and undef.p == 1.0


def test_mcnemar_hand_value():
    # b=1, c=8: 2 * P[X <= 1 | Bin(9, 1/2)] = 2 * (1 + 9) / 512 = 0.0390625
    assert mcnemar_exact(PairedBinary(0, 1, 8, 0)).p == pytest.approx(0.0390625)


# --- Wilcoxon -------------------------------------------------------------------


def _ranks_oracle(values):
    """Tie-averaged ranks computed via a different formulation."""
    return [
        (sum(1 for v in values if v < x)
         + (sum(1 for v in values if v <= x) + 1)) / 2
        for x in values
    ]


def wilcoxon_oracle(diffs):
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return 1.0
    ranks = _ranks_oracle([abs(d) for d in nonzero])
    w_obs = sum(r for d, r in zip(nonzero, ranks) if d > 0)
    total = sum(ranks)
    count = 0
    n = len(nonzero)
    for signs in itertools.product((0, 1), repeat=n):
        w = sum(r for s, r in zip(signs, ranks) if s)
        if abs(w - total / 2) >= abs(w_obs - total / 2) - 1e-12:
            count += 1
    return count / 2**n


def test_wilcoxon_against_enumeration_oracle():
    rng = random.Random(17)
    for _ in range(60):
        n = rng.randint(1, 8)
        diffs = [rng.choice([-3, -2, -1, 0, 1, 2, 3]) for _ in range(n)]
        got = wilcoxon_signed_rank(diffs)["p"]
        assert got == pytest.approx(wilcoxon_oracle(diffs), abs=1e-12), diffs


def test_wilcoxon_hand_values():
    assert wilcoxon_signed_rank([1, 2, 3, 4, 5])["p"] == pytest.approx(0.0625)
    assert wilcoxon_signed_rank([1, -1])["p"] == pytest.approx(1.0)


def test_wilcoxon_drops_zeros():
    with_zeros = wilcoxon_signed_rank([0, 0, 1, 2, 3, 4, 5])
    assert with_zeros["n"] == 5
    assert with_zeros["p"] == pytest.approx(0.0625)
    degenerate = wilcoxon_signed_rank([0.0, 0.0])
    assert degenerate["degenerate"] and degenerate["p"] == 1.0


def test_wilcoxon_empty_input():
    with pytest.raises(EmptyInput):
        wilcoxon_signed_rank([])


def test_wilcoxon_normal_approximation_hand_computed():
    # 25 positive diffs with distinct magnitudes: W+ = 325, mu = 162.5,
    # sigma^2 = 25*26*51/24, z = (162.5 - 0.5) / sigma.
    diffs = list(range(1, 26))
    sigma = math.sqrt(25 * 26 * 51 / 24)
    z = (325 - 25 * 26 / 4 - 0.5) / sigma
    from statistics import NormalDist

    expected = 2 * (1 - NormalDist().cdf(z))
    assert wilcoxon_signed_rank(diffs)["p"] == pytest.approx(expected, abs=1e-12)


def test_wilcoxon_normal_approximation_tie_correction():
    # 30 equal-magnitude diffs, 29 positive: all |d| tied at rank 15.5,
    # tie term (30^3 - 30) / 48 reduces the variance.
    diffs = [1.0] * 29 + [-1.0]
    n = 30
    mu = n * (n + 1) / 4
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24 - (n**3 - n) / 48)
    w_plus = 29 * 15.5
    from statistics import NormalDist

    expected = 2 * (1 - NormalDist().cdf((abs(w_plus - mu) - 0.5) / sigma))
    assert wilcoxon_signed_rank(diffs)["p"] == pytest.approx(expected, abs=1e-12)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=8))
def test_wilcoxon_sign_flip_symmetry(diffs):
    a = wilcoxon_signed_rank(diffs)["p"]
    b = wilcoxon_signed_rank([-d for d in diffs])["p"]
    assert a == pytest.approx(b)


# --- Cliff's delta ---------------------------------------------------------------


def cliffs_oracle(a, b):
    """Counting formulation via sorted b and binary search."""
    import bisect

    sb = sorted(b)
    gt = sum(bisect.bisect_left(sb, x) for x in a)
    le = sum(bisect.bisect_right(sb, x) for x in a)
    lt = len(a) * len(b) - le
    return (gt - lt) / (len(a) * len(b))


def test_cliffs_delta_against_oracle_random():
    rng = random.Random(23)
    for _ in range(500):
        a = [rng.randint(-5, 5) for _ in range(rng.randint(1, 12))]
        b = [rng.randint(-5, 5) for _ in range(rng.randint(1, 12))]
        assert cliffs_delta(a, b) == pytest.approx(cliffs_oracle(a, b), abs=1e-12)


def test_cliffs_delta_hand_values():
    assert cliffs_delta([1, 2], [3, 4]) == -1.0
    assert cliffs_delta([3, 4], [1, 2]) == 1.0
    assert cliffs_delta([1, 2], [1, 2]) == 0.0


def test_cliffs_delta_empty():
    with pytest.raises(EmptyInput):
        cliffs_delta([], [1])


# --- bootstrap -------------------------------------------------------------------


def test_bootstrap_seed_determinism():
    diffs = [0.1, -0.2, 0.3, 0.05, -0.1, 0.2]
    ci1 = bootstrap_ci(diffs, resamples=2000, seed=42)
    ci2 = bootstrap_ci(diffs, resamples=2000, seed=42)
    assert ci1 == ci2
    ci3 = bootstrap_ci(diffs, resamples=2000, seed=43)
    assert ci1 != ci3


def test_bootstrap_degenerate_identical_samples():
    # Paired (v, v) comparisons have all-zero diffs: the CI collapses to 0.
    assert bootstrap_ci([0.0] * 10, resamples=500, seed=1) == (0.0, 0.0)


def test_bootstrap_contains_mean_for_tight_data():
    lo, hi = bootstrap_ci([1.0, 1.1, 0.9, 1.05, 0.95] * 4, resamples=2000, seed=0)
    assert lo <= 1.0 <= hi


def test_bootstrap_empty():
    with pytest.raises(EmptyInput):
        bootstrap_ci([])


# --- claim reporting --------------------------------------------------------------


def _rec(sample_id, prompt_id, status, cs=None, verdicts=None):
    return EvaluationRecord(
        sample_id=sample_id,
        prompt_id=prompt_id,
        generator="g",
        status=status,
        explanation_cs={"j": cs} if cs is not None else {},
        judge_verdicts=verdicts or {},
    )


def test_metric_selectors():
    rec = _rec("s", "P1", "plausible", cs=0.5, verdicts={"a": True, "b": None})
    assert compiled_metric(rec) == 1.0
    assert plausible_metric(rec) == 1.0
    assert mean_cs_metric(rec) == 0.5
    assert judge_metric(rec) == 1.0  # None verdicts excluded from the majority
    bare = _rec("s", "P1", "not_compilable")
    assert compiled_metric(bare) == 0.0
    assert mean_cs_metric(bare) is None
    assert judge_metric(bare) is None


def test_report_claim_binary_and_continuous():
    a = [
        _rec(f"s{i}", "P1", "plausible" if i < 6 else "not_plausible", cs=0.8)
        for i in range(10)
    ]
    b = [
        _rec(f"s{i}", "P2", "plausible" if i < 4 else "not_plausible", cs=0.6)
        for i in range(10)
    ]
    rep = report_claim("demo", a, b, bootstrap_resamples=500)
    assert rep.n_pairs == 10
    counts = rep.binary_counts["T"]
    assert counts.a_successes == 6 and counts.b_successes == 4
    cont = rep.continuous["CS"]
    assert cont.mean_diff == pytest.approx(0.2)
    assert cont.cliffs_delta == 1.0


def test_report_claim_unmatched():
    a = [_rec("s1", "P1", "plausible")]
    b = [_rec("s2", "P2", "plausible")]
    with pytest.raises(UnmatchedRecords):
        report_claim("demo", a, b)


def test_format_binary_row_pinned_style():
    counts = PairedBinary(n11=78, n10=8, n01=7, n00=126)
    row = format_binary_row(counts, mcnemar_exact(counts))
    assert row == "86/219 vs 85/219 (p=1.0000, OR=1.14)"


def test_format_binary_row_flags():
    inf = PairedBinary(0, 3, 0, 0)
    assert "OR=inf" in format_binary_row(inf, mcnemar_exact(inf))
    undef = PairedBinary(2, 0, 0, 2)
    assert "OR=undef" in format_binary_row(undef, mcnemar_exact(undef))


def test_format_continuous_row():
    rep = report_claim(
        "demo",
        [_rec(f"s{i}", "P1", "plausible", cs=0.8) for i in range(5)],
        [_rec(f"s{i}", "P2", "plausible", cs=0.6) for i in range(5)],
        bootstrap_resamples=200,
    )
    text = format_continuous_row(rep.continuous["CS"])
    assert text.startswith("0.8000 vs 0.6000;")
    assert "delta=+1.000" in text
