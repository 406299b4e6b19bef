"""Monte Carlo estimation of LCS-length statistics, with deterministic parallelism.

Trial t draws its k sequences from the child streams (master_seed, t, 0..k-1)
— keyed by the *absolute* trial index — and all statistics are derived from an
exact integer histogram of trial outcomes.  Batches and workers only decide
which trials each thread computes, never what they produce, and histogram
merging is integer addition, so records are bit-identical for any worker
count or batch size.

Variance conventions: Monte Carlo records carry the unbiased sample variance
(divisor trials - 1); exact enumeration reports the population variance of the
full distribution.  ``compare_exact_vs_mc`` bridges the two with a grouped
protocol (many small datasets, disjoint pairs within each, per-dataset sample
variances averaged).  Records also carry a skewness statistic (g1) so the
normal-theory chi-square variance interval can be judged for validity.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats as _scipy_stats

from . import _kernels, rng
from .core import DEFAULT_CELL_BUDGET, _lcs2_length
from .errors import BudgetError
from .exact import ExactResult, exact_pair_stats
from .seqgen import Alphabet

_GEN_WORD_BUDGET = 1 << 23  # cap on the uint64 scratch block per generation chunk


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    k: int
    alphabet: Alphabet
    trials: int
    master_seed: int
    batch_size: int = 4096
    confidence_level: float = 0.95

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.trials < 2:
            raise ValueError("trials must be >= 2 (sample variance is undefined below)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence_level must be in (0, 1)")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class EstimateRecord:
    config: ExperimentConfig
    mean_length: float
    gamma_hat: float
    sample_variance: float
    skewness: float
    histogram: dict  # length -> count, zero-count lengths omitted
    mean_ci: tuple
    variance_ci: tuple
    wall_time_seconds: float


@dataclass(frozen=True)
class GroupedConfig:
    """Two-level sampling layout: ``datasets`` independent datasets of
    ``seqs_per_dataset`` sequences each, paired off consecutively within a
    dataset ((0,1), (2,3), ...)."""

    seqs_per_dataset: int = 256
    datasets: int = 1024
    master_seed: int = 0

    def __post_init__(self):
        if self.seqs_per_dataset < 4 or self.seqs_per_dataset % 2:
            raise ValueError("seqs_per_dataset must be even and >= 4")
        if self.datasets < 1:
            raise ValueError("datasets must be >= 1")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SweepCurve:
    parameter_name: str
    points: tuple  # ((parameter_value, EstimateRecord), ...)

    def __post_init__(self):
        values = [v for v, _ in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep parameter values must be strictly increasing")


# ---------------------------------------------------------------------------
# trial evaluation


def _pair_lengths_bits(a: np.ndarray, b: np.ndarray, q: int, n: int) -> np.ndarray:
    """LCS lengths for row-aligned pairs, one uint64 bit row per pair (n <= 63)."""
    count = a.shape[0]
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    masks = np.zeros((count, q), dtype=np.uint64)
    for c in range(q):
        masks[:, c] = ((b == c) * weights).sum(axis=1, dtype=np.uint64)
    full = (np.uint64(1) << np.uint64(n)) - np.uint64(1)
    v = np.full(count, full, dtype=np.uint64)
    rows = np.arange(count)
    for i in range(n):
        u = masks[rows, a[:, i]] & v
        v = ((v + u) | (v - u)) & full  # drop carries out of the n-bit window
    return (np.uint64(n) - np.bitwise_count(v)).astype(np.int64)


def _trial_symbols(
    master_seed: int, lo: int, hi: int, k: int, n: int, cum: np.ndarray
) -> np.ndarray:
    """Symbols for trials [lo, hi): shape (hi-lo, k, n) uint8."""
    trial_seeds = rng.stream_seed_np(
        np.uint64(master_seed), np.arange(lo, hi, dtype=np.uint64)
    )
    seq_seeds = rng.stream_seed_np(
        trial_seeds[:, None], np.arange(k, dtype=np.uint64)
    )
    return rng.symbols_np(seq_seeds, n, cum)


def _batch_histogram(
    config: ExperimentConfig, cum: np.ndarray, lo: int, hi: int
) -> np.ndarray:
    n, k, q = config.n, config.k, config.alphabet.size
    hist = np.zeros(n + 1, dtype=np.int64)
    # sub-chunk generation so the uint64 scratch block stays bounded at large n
    step = max(1, _GEN_WORD_BUDGET // max(k * n, 1))
    for a in range(lo, hi, step):
        b = min(hi, a + step)
        syms = _trial_symbols(config.master_seed, a, b, k, n, cum)
        if k == 2 and n <= 63:
            lengths = _pair_lengths_bits(syms[:, 0, :], syms[:, 1, :], q, n)
        elif k == 2:
            lengths = np.array(
                [_lcs2_length(syms[t, 0], syms[t, 1]) for t in range(b - a)],
                dtype=np.int64,
            )
        else:
            lengths = _kernels.batch_lengths(np.ascontiguousarray(syms))
        hist += np.bincount(lengths, minlength=n + 1)
    return hist


def _histogram_moments(hist: np.ndarray):
    """Exact raw moments S1, S2, S3 of the length distribution (Python ints)."""
    s1 = s2 = s3 = 0
    for length, c in enumerate(hist.tolist()):
        if c:
            s1 += length * c
            s2 += length * length * c
            s3 += length * length * length * c
    return s1, s2, s3


def _finalize_record(
    config: ExperimentConfig, hist: np.ndarray, wall: float
) -> EstimateRecord:
    trials = config.trials
    s1, s2, s3 = _histogram_moments(hist)
    mean = Fraction(s1, trials)
    m2 = Fraction(s2, trials) - mean * mean  # population second central moment
    sample_var = Fraction(trials * s2 - s1 * s1, trials * (trials - 1))
    if m2 > 0:
        m3 = Fraction(s3, trials) - 3 * mean * Fraction(s2, trials) + 2 * mean**3
        skew = float(m3) / float(m2) ** 1.5
    else:
        skew = 0.0
    mean_f = float(mean)
    var_f = float(sample_var)
    return EstimateRecord(
        config=config,
        mean_length=mean_f,
        gamma_hat=mean_f / config.n,
        sample_variance=var_f,
        skewness=skew,
        histogram={length: int(c) for length, c in enumerate(hist.tolist()) if c},
        mean_ci=mean_ci_t(trials, mean_f, var_f, config.confidence_level),
        variance_ci=variance_ci_chi2(trials, var_f, config.confidence_level),
        wall_time_seconds=wall,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> EstimateRecord:
    """Estimate the LCS-length distribution at (n, k, alphabet) from fresh draws."""
    started = time.perf_counter()
    n, k = config.n, config.k
    if k > 2:
        cells = (n + 1) ** k
        if cells > DEFAULT_CELL_BUDGET:
            raise BudgetError(
                f"k-way DP at k={k}, n={n} needs {cells} cells "
                f"but the budget is {DEFAULT_CELL_BUDGET}"
            )
    cum = config.alphabet.cumulative()
    edges = list(range(0, config.trials, config.batch_size)) + [config.trials]
    batches = list(zip(edges[:-1], edges[1:]))
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                lambda span: _batch_histogram(config, cum, span[0], span[1]), batches
            )
            hist = sum(parts, np.zeros(n + 1, dtype=np.int64))
    else:
        hist = np.zeros(n + 1, dtype=np.int64)
        for lo, hi in batches:
            hist += _batch_histogram(config, cum, lo, hi)
    return _finalize_record(config, hist, time.perf_counter() - started)


# ---------------------------------------------------------------------------
# confidence intervals


def mean_ci_t(trials: int, mean: float, sample_variance: float, level: float = 0.95):
    """Student-t interval: mean +- t_{(1+level)/2, trials-1} * sqrt(s^2/trials)."""
    if trials < 2:
        raise ValueError("t interval needs trials >= 2")
    tcrit = float(_scipy_stats.t.ppf((1.0 + level) / 2.0, trials - 1))
    half = tcrit * math.sqrt(sample_variance / trials)
    return (mean - half, mean + half)


def variance_ci_chi2(trials: int, sample_variance: float, level: float = 0.95):
    """Chi-square interval [(T-1)s^2/chi2_{(1+level)/2}, (T-1)s^2/chi2_{(1-level)/2}]."""
    if trials < 2:
        raise ValueError("chi-square interval needs trials >= 2")
    df = trials - 1
    hi_q = float(_scipy_stats.chi2.ppf((1.0 + level) / 2.0, df))
    lo_q = float(_scipy_stats.chi2.ppf((1.0 - level) / 2.0, df))
    return (df * sample_variance / hi_q, df * sample_variance / lo_q)


# ---------------------------------------------------------------------------
# exact-vs-MC reconciliation (grouped protocol)


def compare_exact_vs_mc(n: int, q: int = 2, mc: GroupedConfig | None = GroupedConfig()):
    """Absolute deviations (eps_gamma, eps_var) of grouped MC estimates from
    the exact enumeration values at (n, k=2, q).

    ``mc=None`` selects the exhaustive degenerate mode: the "sample" is the
    full population itself, so both deviations are exactly zero — an anchor
    for the protocol, not an estimate.
    """
    if n > 63:
        raise ValueError("comparison needs exact enumeration, so n <= 63")
    ref = exact_pair_stats(n, q)
    if mc is None:
        return (0.0, 0.0)
    pairs = mc.seqs_per_dataset // 2
    cum = Alphabet.uniform(q).cumulative()
    dataset_seeds = rng.stream_seed_np(
        np.uint64(mc.master_seed), np.arange(mc.datasets, dtype=np.uint64)
    )
    gamma_num = 0  # exact integer sum of lengths
    var_sum = 0.0
    # chunk over datasets to bound the uint64 scratch block
    step = max(1, _GEN_WORD_BUDGET // max(mc.seqs_per_dataset * n, 1))
    for lo in range(0, mc.datasets, step):
        hi = min(mc.datasets, lo + step)
        seq_seeds = rng.stream_seed_np(
            dataset_seeds[lo:hi, None],
            np.arange(mc.seqs_per_dataset, dtype=np.uint64),
        )
        syms = rng.symbols_np(seq_seeds, n, cum)  # (D, S, n)
        a = np.ascontiguousarray(syms[:, 0::2, :]).reshape(-1, n)
        b = np.ascontiguousarray(syms[:, 1::2, :]).reshape(-1, n)
        lengths = _pair_lengths_bits(a, b, q, n).reshape(hi - lo, pairs)
        gamma_num += int(lengths.sum())
        var_sum += float(lengths.var(axis=1, ddof=1, dtype=np.float64).sum())
    gamma_hat = gamma_num / (mc.datasets * pairs) / n
    var_hat = var_sum / mc.datasets
    return (abs(gamma_hat - float(ref.gamma)), abs(var_hat - float(ref.variance)))


# ---------------------------------------------------------------------------
# conjecture checks and sweeps


def gamma_predictor(k: int, q: int) -> float:
    """Closed-form guess 2 / (sqrt(q*k/2) + 1) for the limiting gamma."""
    if k < 2 or q < 2:
        raise ValueError("gamma_predictor needs k >= 2 and q >= 2")
    return 2.0 / (math.sqrt(q * k / 2.0) + 1.0)


def fit_variance_growth(records):
    """Least-squares fit of log(sample_variance) against log(n).

    Returns (exponent, coefficient, r_squared) for variance ~= coefficient *
    n**exponent.  Requires >= 3 records with distinct n sharing (k, q, probs).
    """
    records = list(records)
    if len(records) < 3:
        raise ValueError("need at least 3 records to fit a power law")
    keys = {(r.config.k, r.config.alphabet.size, r.config.alphabet.probs) for r in records}
    if len(keys) != 1:
        raise ValueError("records mix different (k, q, probs) settings")
    if len({r.config.n for r in records}) < 3:
        raise ValueError("need at least 3 distinct n values")
    if any(r.sample_variance <= 0 for r in records):
        raise ValueError("sample variances must be positive to fit a power law")
    x = np.log([r.config.n for r in records])
    y = np.log([r.sample_variance for r in records])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return (float(slope), float(np.exp(intercept)), r2)


def mainville_index(probs) -> int:
    """Greatest integer <= 1 / sum(p_i^2) — the effective-alphabet index."""
    probs = [float(p) for p in probs]
    if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
        raise ValueError("probs must be a probability vector")
    s = sum(p * p for p in probs)
    # the small bias keeps exact-integer boundaries (e.g. uniform q) from
    # rounding down through float error
    return int(1.0 / s + 1e-9)


def sweep_p(n: int, k: int, p_grid, trials: int, seed: int, workers: int = 1) -> SweepCurve:
    """gamma_hat over a grid of symbol skews p, binary alphabet probs (1-p, p).

    Point i runs at master seed fold(seed, i), so each point reproduces a
    standalone run_experiment at that derived seed.
    """
    grid = [float(p) for p in p_grid]
    if not grid:
        raise ValueError("empty p grid")
    for p in grid:
        if not 0.0 < p <= 0.5:
            raise ValueError(f"p={p} outside (0, 0.5]; skews above 0.5 mirror those below")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be strictly increasing")
    points = []
    for i, p in enumerate(grid):
        config = ExperimentConfig(
            n=n,
            k=k,
            alphabet=Alphabet(2, (1.0 - p, p)),
            trials=trials,
            master_seed=rng.stream_seed(seed, i),
        )
        points.append((p, run_experiment(config, workers=workers)))
    return SweepCurve("p", tuple(points))


def sweep_alphabet(
    n: int, k: int, q_list, trials: int, seed: int, workers: int = 1
) -> SweepCurve:
    """gamma_hat over uniform alphabets of increasing size q."""
    qs = [int(q) for q in q_list]
    if not qs:
        raise ValueError("empty q list")
    if any(q < 2 for q in qs):
        raise ValueError("alphabet sizes must be >= 2")
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q list must be strictly increasing")
    points = []
    for i, q in enumerate(qs):
        config = ExperimentConfig(
            n=n,
            k=k,
            alphabet=Alphabet.uniform(q),
            trials=trials,
            master_seed=rng.stream_seed(seed, i),
        )
        points.append((q, run_experiment(config, workers=workers)))
    return SweepCurve("q", tuple(points))


# ---------------------------------------------------------------------------
# serialization


RECORD_CSV_HEADER = (
    "n,k,q,probs,trials,seed,mean,gamma,variance,"
    "mean_ci_lo,mean_ci_hi,var_ci_lo,var_ci_hi"
)


def record_csv_row(record: EstimateRecord) -> str:
    c = record.config
    probs = ";".join(repr(p) for p in c.alphabet.probs)
    return ",".join(
        [
            str(c.n),
            str(c.k),
            str(c.alphabet.size),
            probs,
            str(c.trials),
            str(c.master_seed),
            repr(record.mean_length),
            repr(record.gamma_hat),
            repr(record.sample_variance),
            repr(record.mean_ci[0]),
            repr(record.mean_ci[1]),
            repr(record.variance_ci[0]),
            repr(record.variance_ci[1]),
        ]
    )


def record_json_dict(record: EstimateRecord) -> dict:
    c = record.config
    return {
        "n": c.n,
        "k": c.k,
        "q": c.alphabet.size,
        "probs": list(c.alphabet.probs),
        "trials": c.trials,
        "batch_size": c.batch_size,
        "seed": c.master_seed,
        "confidence_level": c.confidence_level,
        "mean_length": record.mean_length,
        "gamma_hat": record.gamma_hat,
        "sample_variance": record.sample_variance,
        "skewness": record.skewness,
        "mean_ci": list(record.mean_ci),
        "variance_ci": list(record.variance_ci),
        "histogram": {str(k_): v for k_, v in sorted(record.histogram.items())},
        "wall_time_seconds": record.wall_time_seconds,
    }


def curve_csv_lines(curve: SweepCurve, scaled: bool = False) -> list:
    """CSV rendering with the sweep parameter first; ``scaled`` appends the
    gamma_hat*sqrt(q) column used for alphabet sweeps."""
    header = curve.parameter_name + "," + RECORD_CSV_HEADER
    if scaled:
        header += ",gamma_sqrt_q"
    lines = [header]
    for value, record in curve.points:
        row = f"{value!r}," + record_csv_row(record)
        if scaled:
            row += f",{record.gamma_hat * math.sqrt(record.config.alphabet.size)!r}"
        lines.append(row)
    return lines
