"""Exact LCS-length distributions by exhaustive enumeration.

For pairs over the binary alphabet the n<=15 range is reachable because
(i) one pair of nested loops over 4^n is replaced by a vectorized
bit-parallel row update over all 2^n second sequences at once, and
(ii) the dihedral symmetries of the problem (complement, reversal, and
their composition act on both sequences simultaneously and preserve the
LCS length) cut the outer loop to canonical representatives only.

All moments are carried as exact ``fractions.Fraction`` values derived
from an integer histogram, so results are independent of enumeration
order and worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import BudgetError

DEFAULT_ENUM_BUDGET = 1 << 30


@dataclass(frozen=True)
class ExactResult:
    """Exact LCS-length distribution over all q^(kn) input tuples."""

    n: int
    k: int
    q: int
    histogram: dict  # length -> exact count, every key 0..n present
    mean_length: Fraction
    gamma: Fraction  # mean / n
    variance: Fraction  # population variance of the full distribution

    def total_tuples(self) -> int:
        return self.q ** (self.k * self.n)


def _stats_from_histogram(n: int, k: int, q: int, hist: dict) -> ExactResult:
    total = sum(hist.values())
    if total != q ** (k * n):
        raise AssertionError(
            f"histogram covers {total} tuples, expected {q ** (k * n)}"
        )
    s1 = sum(length * c for length, c in hist.items())
    s2 = sum(length * length * c for length, c in hist.items())
    mean = Fraction(s1, total)
    var = Fraction(s2, total) - mean * mean
    full = {length: hist.get(length, 0) for length in range(n + 1)}
    return ExactResult(
        n=n, k=k, q=q, histogram=full, mean_length=mean, gamma=mean / n, variance=var
    )


# ---------------------------------------------------------------------------
# pairs (k = 2)


def _pack_masks(q: int, n: int) -> np.ndarray:
    """(q^n, q) uint64 table: masks[s, c] has bit i set iff sequence s has symbol
    c at position i.  Sequence s is the base-q digit string of s, most significant
    digit first (lexicographic enumeration order)."""
    total = q**n
    seqs = np.empty((total, n), dtype=np.uint8)
    idx = np.arange(total)
    for pos in range(n - 1, -1, -1):
        seqs[:, pos] = idx % q
        idx //= q
    masks = np.zeros((total, q), dtype=np.uint64)
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    for c in range(q):
        masks[:, c] = (seqs == c) @ weights
    return masks


def _lcs_row_all_b(a_syms, masks: np.ndarray, n: int) -> np.ndarray:
    """LCS(a, b) for one fixed a against every b, bit-parallel over uint64 rows."""
    full = (np.uint64(1) << np.uint64(n)) - np.uint64(1)
    v = np.full(masks.shape[0], full, np.uint64)
    for c in a_syms:
        u = masks[:, c] & v
        v = ((v + u) | (v - u)) & full  # drop carries out of the n-bit window
    return np.uint64(n) - np.bitwise_count(v)


def _digits(code: int, q: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append(code % q)
        code //= q
    return tuple(reversed(out))


def _binary_orbit(code: int, n: int) -> set:
    """Images of a length-n binary string under {id, complement, reverse, both}."""
    full = (1 << n) - 1
    rev = int(f"{code:0{n}b}"[::-1], 2)
    return {code, code ^ full, rev, rev ^ full}


def _pair_histogram_chunk(masks, n, q, codes, weights) -> np.ndarray:
    hist = np.zeros(n + 1, dtype=np.int64)
    for code, w in zip(codes, weights):
        lengths = _lcs_row_all_b(_digits(int(code), q, n), masks, n)
        hist += w * np.bincount(lengths.astype(np.int64), minlength=n + 1)
    return hist


def exact_pair_stats(
    n: int,
    q: int = 2,
    *,
    use_symmetry: bool | None = None,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    workers: int = 1,
) -> ExactResult:
    """Exact distribution of LCS length over all q^(2n) ordered pairs.

    ``use_symmetry`` defaults to automatic: on for q == 2 (where the
    complement/reversal orbit argument applies), off otherwise.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if q < 2:
        raise ValueError("q must be >= 2")
    if n > 63:
        raise ValueError("bit-parallel enumeration supports n <= 63")
    if use_symmetry is None:
        use_symmetry = q == 2
    if use_symmetry and q != 2:
        raise ValueError("symmetry reduction is only implemented for q = 2")
    total_pairs = q ** (2 * n)
    cost = total_pairs // 4 if use_symmetry else total_pairs
    if cost > enum_budget:
        raise BudgetError(
            f"pair enumeration needs ~{cost} row updates but the budget is {enum_budget}"
        )
    masks = _pack_masks(q, n)
    if use_symmetry:
        codes, weights = [], []
        seen_total = 0
        for code in range(1 << n):
            orbit = _binary_orbit(code, n)
            if code == min(orbit):
                codes.append(code)
                weights.append(len(orbit))
                seen_total += len(orbit)
        assert seen_total == 1 << n
    else:
        codes = list(range(q**n))
        weights = [1] * len(codes)

    if workers > 1 and len(codes) > 1:
        chunks = np.array_split(np.arange(len(codes)), min(workers, len(codes)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                lambda ix: _pair_histogram_chunk(
                    masks, n, q, [codes[i] for i in ix], [weights[i] for i in ix]
                ),
                chunks,
            )
            hist_arr = sum(parts)
    else:
        hist_arr = _pair_histogram_chunk(masks, n, q, codes, weights)
    hist = {length: int(c) for length, c in enumerate(hist_arr)}
    return _stats_from_histogram(n, 2, q, hist)


# ---------------------------------------------------------------------------
# k >= 3 (and a generic fallback for k = 2)


def exact_k_stats(
    n: int, k: int, q: int = 2, *, enum_budget: int = DEFAULT_ENUM_BUDGET
) -> ExactResult:
    """Exact distribution over all q^(kn) k-tuples via the k-way DP kernel."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 2:
        raise ValueError("k must be >= 2")
    if q < 2:
        raise ValueError("q must be >= 2")
    if k == 2:
        return exact_pair_stats(n, q, use_symmetry=None, enum_budget=enum_budget)
    total = q ** (k * n)
    if total > enum_budget:
        raise BudgetError(
            f"enumerating {q}^({k}*{n}) = {total} tuples exceeds the budget of {enum_budget}"
        )
    per_seq = q**n
    hist = np.zeros(n + 1, dtype=np.int64)
    chunk = max(1, (1 << 20) // max(k * n, 1))
    # all k-tuples of sequence codes, decoded to digit matrices chunk by chunk
    for lo in range(0, total, chunk):
        hi = min(total, lo + chunk)
        flat = np.arange(lo, hi, dtype=np.int64)
        mat = np.empty((hi - lo, k, n), dtype=np.uint8)
        rem = flat.copy()
        for j in range(k - 1, -1, -1):
            code = rem % per_seq
            rem //= per_seq
            for pos in range(n - 1, -1, -1):
                mat[:, j, pos] = code % q
                code //= q
        lengths = _kernels.batch_lengths(mat)
        hist += np.bincount(lengths, minlength=n + 1)
    return _stats_from_histogram(n, k, q, {i: int(c) for i, c in enumerate(hist)})


# ---------------------------------------------------------------------------
# reporting helpers


def delta_concentration(result: ExactResult) -> float:
    """Probability mass in the window [n - 2*delta, n] with delta = n // 4 + 1.

    Chebyshev-style check that the distribution piles up near its upper end."""
    delta = result.n // 4 + 1
    lo = max(0, result.n - 2 * delta)
    total = result.total_tuples()
    mass = sum(c for length, c in result.histogram.items() if length >= lo)
    return float(Fraction(mass, total))


def format_fraction(x: Fraction, places: int = 12) -> str:
    """Render an exact fraction as a trimmed decimal, e.g. 9/8 -> '1.125'."""
    getcontext().prec = places + 24
    d = Decimal(x.numerator) / Decimal(x.denominator)
    s = format(d.quantize(Decimal(1).scaleb(-places)), "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


def result_json_dict(result: ExactResult) -> dict:
    return {
        "n": result.n,
        "k": result.k,
        "q": result.q,
        "mean_length": format_fraction(result.mean_length),
        "gamma": format_fraction(result.gamma),
        "variance": format_fraction(result.variance),
        "histogram": {str(length): c for length, c in result.histogram.items()},
    }


RESULT_CSV_HEADER = "n,k,q,mean_length,gamma,variance,histogram"


def result_csv_row(result: ExactResult) -> str:
    hist = ";".join(f"{length}:{c}" for length, c in sorted(result.histogram.items()))
    return ",".join(
        [
            str(result.n),
            str(result.k),
            str(result.q),
            format_fraction(result.mean_length),
            format_fraction(result.gamma),
            format_fraction(result.variance),
            hist,
        ]
    )
