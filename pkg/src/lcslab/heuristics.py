"""Approximate multi-sequence LCS algorithms, an upper-bound construction, and
a performance-ratio benchmark harness.

Four heuristics, all deterministic (ties broken by smallest symbol index or
lowest sequence index, pairwise witnesses are the canonical backtrack of
``core.lcs2``):

* ``long_run`` — best single-symbol run: the symbol maximizing the minimum
  per-sequence count, repeated that many times.
* ``greedy`` — repeatedly replace the pair with the longest pairwise LCS by
  a witness of that LCS until one sequence remains.
* ``tournament`` — bracket reduction: each round replaces adjacent pairs by
  pairwise-LCS witnesses (odd leftover passes through).
* ``deposition_extension`` — deposit common symbols found within a sliding
  window across all sequences, then greedily re-insert extra matches into
  the gaps between deposited symbols.

``upper_bound`` picks a small subset of sequences (the heaviest holder of
each globally-frequent symbol) and returns their exact LCS length — an upper
bound for the whole set since dropping sequences can only lengthen an LCS.

Performance ratio of algorithm A on instance S: reference_length / |A(S)|,
following the |opt| / |approx| convention (>= 1.0 when the reference is exact;
+inf sentinel when A returns an empty sequence against a nonzero reference).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_CELL_BUDGET,
    Sequence,
    _check_alphabets,
    _wrap_witness,
    is_common_subsequence,
    lcs2,
    lcs_k,
)
from .errors import BudgetError

ALGORITHMS = ("long_run", "greedy", "tournament", "deposition_extension")


@dataclass(frozen=True)
class HeuristicOutcome:
    algorithm: str
    result: Sequence
    length: int
    valid: bool
    elapsed_seconds: float


@dataclass(frozen=True)
class UpperBoundResult:
    """Exact LCS length of a selected subset of the input sequences.

    ``truncated`` flags that the cell budget forced dropping below the
    requested subset size, loosening the bound."""

    length: int
    selected_indices: tuple
    truncated: bool


@dataclass(frozen=True)
class HeuristicReport:
    dataset_id: str
    group_index: int
    k: int
    n: int
    q: int
    reference_kind: str  # "exact" or "upper_bound"
    reference_length: int
    outcomes: tuple  # HeuristicOutcome per algorithm, input order
    ratios: dict  # algorithm -> reference_length / heuristic_length (may be inf)


@dataclass(frozen=True)
class RatioSummary:
    algorithm: str
    mean_ratio: float
    variance_ratio: float  # unbiased over finite ratios; 0.0 below 2 samples
    finite_count: int
    infinite_count: int


@dataclass(frozen=True)
class BenchmarkResult:
    reports: tuple
    summaries: dict  # algorithm -> RatioSummary


def _finish(algorithm: str, symbols, seqs, started: float) -> HeuristicOutcome:
    q = seqs[0].alphabet_size
    result = _wrap_witness(list(symbols), q)
    return HeuristicOutcome(
        algorithm=algorithm,
        result=result,
        length=len(result),
        valid=is_common_subsequence(result, seqs),
        elapsed_seconds=time.perf_counter() - started,
    )


# ---------------------------------------------------------------------------
# heuristics


def long_run(seqs) -> HeuristicOutcome:
    """Longest single-symbol common subsequence (exact within that family)."""
    started = time.perf_counter()
    seqs = list(seqs)
    if not seqs:
        raise ValueError("long_run needs at least one sequence")
    q = _check_alphabets(seqs)
    counts = np.vstack(
        [np.bincount(s.symbols, minlength=q).astype(np.int64) for s in seqs]
    )
    floor = counts.min(axis=0)
    best = int(np.argmax(floor))  # argmax takes the first maximum: smallest symbol
    return _finish("long_run", [best] * int(floor[best]), seqs, started)


def _pair_witness(a: Sequence, b: Sequence) -> Sequence:
    return lcs2(a, b, want_witness=True).witness


def greedy(seqs) -> HeuristicOutcome:
    """Best-pair-first reduction: merge the pair with the longest pairwise LCS."""
    started = time.perf_counter()
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ValueError("greedy needs at least two sequences")
    _check_alphabets(seqs)
    pool = list(seqs)
    while len(pool) > 1:
        best_len = -1
        best_pair = (0, 1)
        for i in range(len(pool)):
            for j in range(i + 1, len(pool)):
                length = lcs2(pool[i], pool[j]).length
                if length > best_len:  # strict: ties keep the lowest (i, j)
                    best_len = length
                    best_pair = (i, j)
        i, j = best_pair
        merged = _pair_witness(pool[i], pool[j])
        pool[i] = merged
        del pool[j]
    return _finish("greedy", pool[0].symbols.tolist(), seqs, started)


def tournament(seqs) -> HeuristicOutcome:
    """Bracket reduction by adjacent pairs; odd leftover passes through."""
    started = time.perf_counter()
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ValueError("tournament needs at least two sequences")
    _check_alphabets(seqs)
    pool = list(seqs)
    while len(pool) > 1:
        nxt = [
            _pair_witness(pool[i], pool[i + 1]) for i in range(0, len(pool) - 1, 2)
        ]
        if len(pool) % 2:
            nxt.append(pool[-1])
        pool = nxt
    return _finish("tournament", pool[0].symbols.tolist(), seqs, started)


def _first_occurrence(sym_list, c, lo, hi):
    for pos in range(lo, hi):
        if sym_list[pos] == c:
            return pos
    return -1


def _common_pick(sym_lists, cursors, limits, q):
    """Smallest-max-advance symbol present in [cursor, limit) of every sequence.

    Returns (symbol, positions) or (None, None)."""
    best_sym = None
    best_adv = None
    best_pos = None
    for c in range(q):
        positions = []
        advance = 0
        for syms, lo, hi in zip(sym_lists, cursors, limits):
            pos = _first_occurrence(syms, c, lo, hi)
            if pos < 0:
                positions = None
                break
            positions.append(pos)
            advance = max(advance, pos - lo + 1)
        if positions is not None and (best_adv is None or advance < best_adv):
            best_sym = c
            best_adv = advance
            best_pos = positions
    return best_sym, best_pos


def deposition_extension(seqs, window: int | None = None) -> HeuristicOutcome:
    """Two-phase heuristic: windowed deposition, then gap-filling extension.

    Deposition keeps one cursor per sequence and repeatedly looks for a symbol
    occurring within the next ``window`` unread positions of *every* sequence;
    it appends the one whose largest cursor advance is smallest (ties to the
    smaller symbol) and moves every cursor past that first occurrence.  When
    no symbol qualifies, all cursors skip ahead by ``window``.  Extension then
    revisits the m+1 gaps around the deposited symbols and greedily inserts
    further common symbols from the skipped regions, same pick rule, unbounded
    window — the result stays a common subsequence by construction.

    ``window`` defaults to max(2, ceil(q/2)).
    """
    started = time.perf_counter()
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ValueError("deposition_extension needs at least two sequences")
    q = _check_alphabets(seqs)
    if window is None:
        window = max(2, math.ceil(q / 2))
    if window < 1:
        raise ValueError("window must be >= 1")
    sym_lists = [s.symbols.tolist() for s in seqs]
    lengths = [len(s) for s in sym_lists]
    k = len(seqs)

    cursors = [0] * k
    deposited = []  # symbols
    match_pos = []  # per deposited symbol: positions in each sequence
    while all(cur < ln for cur, ln in zip(cursors, lengths)):
        limits = [min(cur + window, ln) for cur, ln in zip(cursors, lengths)]
        sym, positions = _common_pick(sym_lists, cursors, limits, q)
        if sym is None:
            cursors = [cur + window for cur in cursors]
            continue
        deposited.append(sym)
        match_pos.append(positions)
        cursors = [pos + 1 for pos in positions]

    # extension: fill the m+1 gaps delimited by the deposited matches
    m = len(deposited)
    out = []
    for gap in range(m + 1):
        lo = [0] * k if gap == 0 else [pos + 1 for pos in match_pos[gap - 1]]
        hi = lengths if gap == m else match_pos[gap]
        cur = list(lo)
        while True:
            sym, positions = _common_pick(sym_lists, cur, hi, q)
            if sym is None:
                break
            out.append(sym)
            cur = [pos + 1 for pos in positions]
        if gap < m:
            out.append(deposited[gap])
    return _finish("deposition_extension", out, seqs, started)


_HEURISTIC_FUNCS = {
    "long_run": long_run,
    "greedy": greedy,
    "tournament": tournament,
    "deposition_extension": deposition_extension,
}


# ---------------------------------------------------------------------------
# upper bound


def upper_bound(
    seqs, max_dp_seqs: int = 4, cell_budget: int = DEFAULT_CELL_BUDGET
) -> UpperBoundResult:
    """Exact LCS length of a chosen subset — an upper bound for the full set.

    Symbols are ranked by pooled frequency (ties to the smaller symbol); for
    each ranked symbol the not-yet-selected sequence holding the most of it is
    selected (ties to the lowest index), until min(q, max_dp_seqs, k)
    sequences are chosen.  If the k-way DP over the selection exceeds the cell
    budget, the latest selections are dropped (never below 2) and the result
    is flagged truncated.
    """
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ValueError("upper_bound needs at least two sequences")
    if max_dp_seqs < 2:
        raise ValueError("max_dp_seqs must be >= 2")
    q = _check_alphabets(seqs)
    k = len(seqs)
    counts = np.vstack(
        [np.bincount(s.symbols, minlength=q).astype(np.int64) for s in seqs]
    )
    pooled = counts.sum(axis=0)
    ranked = sorted(range(q), key=lambda c: (-int(pooled[c]), c))
    target = min(q, max_dp_seqs, k)
    selected: list = []
    for c in ranked:
        if len(selected) == target:
            break
        holder = -1
        holder_count = -1
        for i in range(k):
            if i in selected:
                continue
            if int(counts[i, c]) > holder_count:
                holder = i
                holder_count = int(counts[i, c])
        selected.append(holder)

    def cells(indices):
        total = 1
        for i in indices:
            total *= len(seqs[i]) + 1
        return total

    truncated = False
    while len(selected) > 2 and cells(selected) > cell_budget:
        selected.pop()  # drop the lowest-ranked symbol's holder first
        truncated = True
    chosen = [seqs[i] for i in selected]
    if len(chosen) == 2:
        length = lcs2(chosen[0], chosen[1]).length
    else:
        length = lcs_k(chosen, cell_budget=cell_budget).length
    return UpperBoundResult(length, tuple(selected), truncated)


# ---------------------------------------------------------------------------
# benchmark harness


def benchmark(
    dataset,
    group_size: int,
    algorithms=ALGORITHMS,
    reference: str = "exact",
    *,
    window: int | None = None,
    max_dp_seqs: int = 4,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    dataset_id: str | None = None,
) -> BenchmarkResult:
    """Partition a dataset into groups of ``group_size`` and score each
    algorithm's performance ratio against the reference per group.

    reference="exact" computes the true LCS per group (k > 2 checked against
    the cell budget before any work, raising BudgetError when infeasible);
    reference="upper_bound" uses the subset bound instead.
    """
    spec = dataset.spec
    if group_size < 2:
        raise ValueError("group_size must be >= 2")
    if spec.count % group_size:
        raise ValueError(
            f"dataset of {spec.count} sequences does not divide into groups of {group_size}"
        )
    algorithms = tuple(algorithms)
    unknown = [a for a in algorithms if a not in _HEURISTIC_FUNCS]
    if unknown:
        raise ValueError(f"unknown algorithms: {unknown}")
    if reference not in ("exact", "upper_bound"):
        raise ValueError("reference must be 'exact' or 'upper_bound'")
    n = spec.seq_length
    if reference == "exact" and group_size > 2:
        needed = (n + 1) ** group_size
        if needed > cell_budget:
            raise BudgetError(
                f"exact reference at k={group_size}, n={n} needs {needed} cells "
                f"but the budget is {cell_budget}; use reference='upper_bound'"
            )
    if dataset_id is None:
        dataset_id = (
            f"q{spec.alphabet.size}-n{n}-c{spec.count}-s{spec.master_seed}"
        )

    reports = []
    for g in range(spec.count // group_size):
        group = dataset.sequences[g * group_size : (g + 1) * group_size]
        if reference == "exact":
            if group_size == 2:
                ref_len = lcs2(group[0], group[1]).length
            else:
                ref_len = lcs_k(group, cell_budget=cell_budget).length
        else:
            ref_len = upper_bound(group, max_dp_seqs, cell_budget).length
        outcomes = []
        ratios = {}
        for name in algorithms:
            func = _HEURISTIC_FUNCS[name]
            outcome = func(group, window) if name == "deposition_extension" else func(group)
            outcomes.append(outcome)
            if outcome.length > 0:
                ratios[name] = ref_len / outcome.length
            elif ref_len == 0:
                ratios[name] = 1.0  # both empty: optimal
            else:
                ratios[name] = math.inf
        reports.append(
            HeuristicReport(
                dataset_id=dataset_id,
                group_index=g,
                k=group_size,
                n=n,
                q=spec.alphabet.size,
                reference_kind=reference,
                reference_length=ref_len,
                outcomes=tuple(outcomes),
                ratios=ratios,
            )
        )

    summaries = {}
    for name in algorithms:
        finite = [r.ratios[name] for r in reports if math.isfinite(r.ratios[name])]
        infinite = sum(1 for r in reports if math.isinf(r.ratios[name]))
        mean = sum(finite) / len(finite) if finite else math.nan
        if len(finite) >= 2:
            var = sum((x - mean) ** 2 for x in finite) / (len(finite) - 1)
        else:
            var = 0.0
        summaries[name] = RatioSummary(
            algorithm=name,
            mean_ratio=mean,
            variance_ratio=var,
            finite_count=len(finite),
            infinite_count=infinite,
        )
    return BenchmarkResult(reports=tuple(reports), summaries=summaries)


# ---------------------------------------------------------------------------
# serialization


def report_csv_header(algorithms=ALGORITHMS) -> str:
    cols = ["dataset_id", "group_index", "k", "n", "q", "reference_kind", "reference_length"]
    for name in algorithms:
        cols.append(f"{name}_length")
        cols.append(f"{name}_ratio")
    return ",".join(cols)


def report_csv_row(report: HeuristicReport) -> str:
    cols = [
        report.dataset_id,
        str(report.group_index),
        str(report.k),
        str(report.n),
        str(report.q),
        report.reference_kind,
        str(report.reference_length),
    ]
    for outcome in report.outcomes:
        cols.append(str(outcome.length))
        cols.append(repr(report.ratios[outcome.algorithm]))
    return ",".join(cols)


def report_json_dict(report: HeuristicReport) -> dict:
    return {
        "dataset_id": report.dataset_id,
        "group_index": report.group_index,
        "k": report.k,
        "n": report.n,
        "q": report.q,
        "reference_kind": report.reference_kind,
        "reference_length": report.reference_length,
        "outcomes": [
            {
                "algorithm": o.algorithm,
                "length": o.length,
                "valid": o.valid,
                "result": o.result.to_text(),
                "elapsed_seconds": o.elapsed_seconds,
            }
            for o in report.outcomes
        ],
        "ratios": {
            name: (value if math.isfinite(value) else "inf")
            for name, value in report.ratios.items()
        },
    }


def summary_csv_lines(result: BenchmarkResult) -> list:
    lines = ["algorithm,mean_ratio,variance_ratio,finite_count,infinite_count"]
    for name, s in result.summaries.items():
        lines.append(
            f"{name},{s.mean_ratio!r},{s.variance_ratio!r},{s.finite_count},{s.infinite_count}"
        )
    return lines
