"""Heuristics, subset upper bound, and the benchmark harness."""

from __future__ import annotations

import math

import pytest

from lcslab import (
    ALGORITHMS,
    Alphabet,
    BudgetError,
    DatasetSpec,
    Sequence,
    benchmark,
    deposition_extension,
    generate,
    greedy,
    is_common_subsequence,
    lcs2,
    lcs_k,
    long_run,
    tournament,
    upper_bound,
)
from lcslab.heuristics import (
    report_csv_header,
    report_csv_row,
    report_json_dict,
    summary_csv_lines,
)

from oracles import lcs_brute


def seq(text: str, q: int = 2) -> Sequence:
    return Sequence.from_text(text, q)


def random_group(n, k, q, master_seed):
    ds = generate(DatasetSpec(Alphabet.uniform(q), seq_length=n, count=k, master_seed=master_seed))
    return list(ds.sequences)


# ---------------------------------------------------------------------------
# long_run


def test_long_run_examples():
    out = long_run([seq("0011"), seq("0101")])
    assert out.result.to_text() == "00"  # both symbols tie at 2; smaller wins
    assert out.valid
    out = long_run([seq("000"), seq("000")])
    assert out.result.to_text() == "000"
    out = long_run([seq("0"), seq("1")])
    assert out.length == 0 and out.valid
    out = long_run([seq("0110")])  # single sequence is allowed
    assert out.length == 2
    with pytest.raises(ValueError):
        long_run([])


def test_long_run_is_exact_within_family():
    for master in range(20):
        group = random_group(12, 3, 3, master)
        out = long_run(group)
        # no single-symbol common subsequence can be longer
        best = max(
            min(int((s.symbols == c).sum()) for s in group) for c in range(3)
        )
        assert out.length == best and out.valid


# ---------------------------------------------------------------------------
# greedy


def test_greedy_two_sequences_is_exact():
    for master in range(25):
        a, b = random_group(14, 2, 2, master)
        out = greedy([a, b])
        assert out.length == lcs2(a, b).length
        assert out.valid


def test_greedy_identical_inputs():
    s = seq("010011")
    out = greedy([s, s, s])
    assert out.result == s and out.valid


def test_greedy_triple_valid_and_bounded():
    for master in range(15):
        group = random_group(9, 3, 2, master)
        out = greedy(group)
        assert out.valid
        assert out.length <= lcs_k(group).length
    with pytest.raises(ValueError):
        greedy([seq("01")])


# ---------------------------------------------------------------------------
# tournament


def test_tournament_pair_is_exact():
    a, b = random_group(16, 2, 2, 5)
    assert tournament([a, b]).length == lcs2(a, b).length


def test_tournament_identical_inputs():
    s = seq("1100101")
    out = tournament([s] * 4)
    assert out.result == s


def test_tournament_odd_bracket_valid():
    for master in range(10):
        group = random_group(20, 5, 2, master)
        out = tournament(group)
        assert out.valid
        assert out.length <= lcs_k(group).length


# ---------------------------------------------------------------------------
# deposition_extension


def test_deposition_identical_inputs_recover_everything():
    s = seq("01101001")
    out = deposition_extension([s, s, s], window=2)
    assert out.result == s


def test_deposition_disjoint_symbols():
    out = deposition_extension([seq("0"), seq("1")], window=1)
    assert out.length == 0 and out.valid


def test_deposition_random_triples_valid():
    for master in range(12):
        group = random_group(30, 3, 2, master)
        out = deposition_extension(group, window=4)
        assert out.valid
        assert out.length <= lcs_k(group).length


def test_deposition_window_default_and_validation():
    group = random_group(10, 3, 6, 0)
    assert deposition_extension(group).valid  # default window = ceil(q/2)
    with pytest.raises(ValueError):
        deposition_extension(group, window=0)
    with pytest.raises(ValueError):
        deposition_extension([])


# ---------------------------------------------------------------------------
# upper bound


def test_upper_bound_two_sequences_is_exact():
    a, b = random_group(18, 2, 2, 3)
    res = upper_bound([a, b])
    assert res.length == lcs2(a, b).length
    assert res.selected_indices in ((0, 1), (1, 0))
    assert not res.truncated


def test_upper_bound_identical_inputs():
    s = seq("0101010101")
    assert upper_bound([s] * 5).length == 10


def test_upper_bound_dominates_lcs_k():
    for master in range(15):
        group = random_group(8, 4, 2, master)
        assert upper_bound(group).length >= lcs_k(group).length


def test_upper_bound_truncates_under_tiny_budget():
    group = random_group(40, 4, 4, 1)  # q=4 so up to four sequences get selected
    res = upper_bound(group, max_dp_seqs=4, cell_budget=50 * 50)
    assert res.truncated
    assert len(res.selected_indices) == 2  # fell back to a pairwise bound
    assert res.length >= lcs_k(group).length
    with pytest.raises(ValueError):
        upper_bound(group, max_dp_seqs=1)
    with pytest.raises(ValueError):
        upper_bound([seq("01")])


def test_upper_bound_respects_max_dp_seqs():
    group = random_group(10, 6, 2, 2)
    res = upper_bound(group, max_dp_seqs=3)
    assert len(res.selected_indices) <= 3


# ---------------------------------------------------------------------------
# fuzz: validity + bound sandwich (the large sweep lives in the acceptance run)


@pytest.mark.parametrize("q", [2, 4, 20])
def test_fuzz_validity_and_bounds(q):
    rounds = 60
    for master in range(rounds):
        k = 2 + master % 5
        n = 4 + (master * 7) % 40
        group = random_group(n, k, q, master + 1000 * q)
        ub = upper_bound(group)
        for algo, fn in (
            ("long_run", long_run),
            ("greedy", greedy),
            ("tournament", tournament),
            ("deposition_extension", deposition_extension),
        ):
            out = fn(group)
            assert out.valid, (algo, q, master)
            assert out.length <= ub.length, (algo, q, master)
        if (n + 1) ** k <= 1 << 22:
            truth = lcs_k(group).length
            assert ub.length >= truth


# ---------------------------------------------------------------------------
# benchmark harness


def small_dataset(n, count, q=2, master_seed=0):
    return generate(
        DatasetSpec(Alphabet.uniform(q), seq_length=n, count=count, master_seed=master_seed)
    )


def test_benchmark_identical_groups_all_ratios_one():
    base = seq("0110100110")
    rows = [base.symbols.tolist()] * 6
    import numpy as np

    from lcslab.seqgen import SequenceDataset

    matrix = np.array(rows, dtype=np.uint8)
    ds = SequenceDataset(
        spec=DatasetSpec(Alphabet.uniform(2), seq_length=10, count=6, master_seed=0),
        sequences=tuple(Sequence(row, 2) for row in matrix),
    )
    result = benchmark(ds, group_size=3)
    for report in result.reports:
        assert report.reference_length == 10
        # every sequence-preserving heuristic recovers the common sequence
        for name in ("greedy", "tournament", "deposition_extension"):
            assert report.ratios[name] == 1.0
        assert report.ratios["long_run"] == 2.0  # five 0s out of ten symbols
    for summary in result.summaries.values():
        assert summary.variance_ratio == 0.0
        assert summary.infinite_count == 0
        assert summary.mean_ratio == (2.0 if summary.algorithm == "long_run" else 1.0)


def test_benchmark_pairwise_exact_reference():
    ds = small_dataset(n=24, count=20, master_seed=9)
    result = benchmark(ds, group_size=2)
    assert len(result.reports) == 10
    for report in result.reports:
        assert report.reference_kind == "exact"
        # exact reference dominates every heuristic
        for name, ratio in report.ratios.items():
            assert ratio >= 1.0 or math.isinf(ratio), name
        # greedy on a pair is the exact pairwise LCS
        assert report.ratios["greedy"] == 1.0


def test_benchmark_upper_bound_reference_for_large_k():
    ds = small_dataset(n=50, count=10, master_seed=4)
    result = benchmark(ds, group_size=5, reference="upper_bound")
    assert all(r.reference_kind == "upper_bound" for r in result.reports)
    for report in result.reports:
        for outcome in report.outcomes:
            assert outcome.valid


def test_benchmark_validation_and_budget():
    ds = small_dataset(n=10, count=9, master_seed=0)
    with pytest.raises(ValueError):
        benchmark(ds, group_size=2)  # 9 does not divide by 2
    with pytest.raises(ValueError):
        benchmark(small_dataset(10, 8), group_size=2, algorithms=("nope",))
    big = small_dataset(n=200, count=8, master_seed=0)
    with pytest.raises(BudgetError):
        benchmark(big, group_size=4, reference="exact", cell_budget=10_000)
    with pytest.raises(ValueError):
        benchmark(small_dataset(10, 8), group_size=2, reference="guess")


def test_benchmark_deterministic():
    ds = small_dataset(n=16, count=12, master_seed=2)
    a = benchmark(ds, group_size=3)
    b = benchmark(ds, group_size=3)
    assert [r.ratios for r in a.reports] == [r.ratios for r in b.reports]
    assert [r.reference_length for r in a.reports] == [
        r.reference_length for r in b.reports
    ]


def test_benchmark_against_brute_force_reference():
    ds = small_dataset(n=7, count=6, master_seed=11)
    result = benchmark(ds, group_size=3)
    groups = [ds.sequences[i : i + 3] for i in range(0, 6, 3)]
    for report, group in zip(result.reports, groups):
        truth = lcs_brute([s.symbols.tolist() for s in group])
        assert report.reference_length == truth


# ---------------------------------------------------------------------------
# serialization


def test_report_serialization_shapes():
    ds = small_dataset(n=12, count=4, master_seed=6)
    result = benchmark(ds, group_size=2)
    header = report_csv_header()
    assert header.startswith("dataset_id,group_index,k,n,q,reference_kind,reference_length")
    for name in ALGORITHMS:
        assert f"{name}_length" in header and f"{name}_ratio" in header
    row = report_csv_row(result.reports[0])
    assert len(row.split(",")) == len(header.split(","))
    d = report_json_dict(result.reports[0])
    assert d["k"] == 2 and d["n"] == 12
    assert set(d["ratios"]) == set(ALGORITHMS)
    lines = summary_csv_lines(result)
    assert lines[0] == "algorithm,mean_ratio,variance_ratio,finite_count,infinite_count"
    assert len(lines) == 1 + len(ALGORITHMS)
