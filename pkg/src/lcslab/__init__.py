"""lcslab — statistics of longest-common-subsequence lengths of random strings.

Exact distributions by exhaustive enumeration, deterministic Monte Carlo
estimation with reproducible parallelism, approximation heuristics with a
performance-ratio benchmark, and a CLI (``lcslab``) wrapping it all.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    DEFAULT_CELL_BUDGET,
    MAX_ALPHABET,
    SYMBOL_CHARS,
    LcsResult,
    Sequence,
    is_common_subsequence,
    lcs2,
    lcs_k,
)
from .errors import BudgetError, DataFormatError
from .estimator import (
    EstimateRecord,
    ExperimentConfig,
    GroupedConfig,
    SweepCurve,
    compare_exact_vs_mc,
    fit_variance_growth,
    gamma_predictor,
    mainville_index,
    mean_ci_t,
    run_experiment,
    sweep_alphabet,
    sweep_p,
    variance_ci_chi2,
)
from .exact import (
    ExactResult,
    delta_concentration,
    exact_k_stats,
    exact_pair_stats,
)
from .heuristics import (
    ALGORITHMS,
    BenchmarkResult,
    HeuristicOutcome,
    HeuristicReport,
    UpperBoundResult,
    benchmark,
    deposition_extension,
    greedy,
    long_run,
    tournament,
    upper_bound,
)
from .seqgen import (
    Alphabet,
    CompositionReport,
    CoverageReport,
    DatasetSpec,
    SequenceDataset,
    composition,
    coverage,
    enumerate_all,
    generate,
    read_dataset,
    write_dataset,
)

__all__ = [
    "__version__",
    "ALGORITHMS",
    "Alphabet",
    "BenchmarkResult",
    "BudgetError",
    "CompositionReport",
    "CoverageReport",
    "DataFormatError",
    "DatasetSpec",
    "DEFAULT_CELL_BUDGET",
    "EstimateRecord",
    "ExactResult",
    "ExperimentConfig",
    "GroupedConfig",
    "HeuristicOutcome",
    "HeuristicReport",
    "LcsResult",
    "MAX_ALPHABET",
    "Sequence",
    "SequenceDataset",
    "SweepCurve",
    "SYMBOL_CHARS",
    "UpperBoundResult",
    "benchmark",
    "compare_exact_vs_mc",
    "composition",
    "coverage",
    "delta_concentration",
    "deposition_extension",
    "enumerate_all",
    "exact_k_stats",
    "exact_pair_stats",
    "fit_variance_growth",
    "gamma_predictor",
    "generate",
    "greedy",
    "is_common_subsequence",
    "lcs2",
    "lcs_k",
    "long_run",
    "mainville_index",
    "mean_ci_t",
    "read_dataset",
    "run_experiment",
    "sweep_alphabet",
    "sweep_p",
    "tournament",
    "upper_bound",
    "variance_ci_chi2",
    "write_dataset",
]
