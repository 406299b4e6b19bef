"""Monte Carlo estimator: determinism, statistics, intervals, sweeps, fits."""

from __future__ import annotations

import math

import pytest

from lcslab import (
    Alphabet,
    BudgetError,
    EstimateRecord,
    ExperimentConfig,
    GroupedConfig,
    SweepCurve,
    compare_exact_vs_mc,
    exact_pair_stats,
    fit_variance_growth,
    gamma_predictor,
    mainville_index,
    mean_ci_t,
    run_experiment,
    sweep_alphabet,
    sweep_p,
    variance_ci_chi2,
)
from lcslab import rng
from lcslab.estimator import RECORD_CSV_HEADER, record_csv_row, record_json_dict


def config(n=10, k=2, q=2, trials=1000, seed=0, **kw):
    return ExperimentConfig(
        n=n, k=k, alphabet=Alphabet.uniform(q), trials=trials, master_seed=seed, **kw
    )


def strip_time(record: EstimateRecord) -> dict:
    # drop fields that vary without affecting the sampled statistics
    d = record_json_dict(record)
    d.pop("wall_time_seconds")
    d.pop("batch_size")
    return d


# ---------------------------------------------------------------------------
# config validation


def test_config_validation():
    with pytest.raises(ValueError):
        config(trials=1)  # sample variance undefined
    with pytest.raises(ValueError):
        config(k=1)
    with pytest.raises(ValueError):
        config(n=0)
    with pytest.raises(ValueError):
        config(confidence_level=1.0)


# ---------------------------------------------------------------------------
# run_experiment


def test_degenerate_probs_give_full_length():
    cfg = ExperimentConfig(
        n=7, k=3, alphabet=Alphabet(2, (1.0, 0.0)), trials=50, master_seed=1
    )
    record = run_experiment(cfg)
    assert record.mean_length == 7.0
    assert record.sample_variance == 0.0
    assert record.gamma_hat == 1.0
    assert record.histogram == {7: 50}
    assert record.mean_ci == (7.0, 7.0)
    assert record.variance_ci == (0.0, 0.0)
    assert record.skewness == 0.0


def test_gamma_hat_near_exact_n10():
    exact = float(exact_pair_stats(10).gamma)
    record = run_experiment(config(n=10, trials=100_000, seed=7))
    assert abs(record.gamma_hat - exact) < 0.01


def test_gamma_hat_long_sequences():
    record = run_experiment(config(n=1000, trials=256, seed=11))
    assert abs(record.gamma_hat - 0.806) <= 0.01


def test_histogram_mass_and_support():
    record = run_experiment(config(n=12, trials=5000, seed=3))
    assert sum(record.histogram.values()) == 5000
    assert all(0 <= length <= 12 for length in record.histogram)
    assert record.mean_ci[0] <= record.mean_length <= record.mean_ci[1]
    assert record.variance_ci[0] <= record.sample_variance <= record.variance_ci[1]
    assert 0.0 <= record.gamma_hat <= 1.0


def test_bit_identical_across_workers_and_batches():
    base = run_experiment(config(n=15, trials=10_000, seed=5))
    rebatched = run_experiment(config(n=15, trials=10_000, seed=5, batch_size=137))
    threaded = run_experiment(
        config(n=15, trials=10_000, seed=5, batch_size=512), workers=4
    )
    assert strip_time(base) == strip_time(rebatched) == strip_time(threaded)


def test_k3_path_deterministic_and_sane():
    base = run_experiment(config(n=8, k=3, trials=2000, seed=9))
    again = run_experiment(config(n=8, k=3, trials=2000, seed=9, batch_size=77), workers=3)
    assert strip_time(base) == strip_time(again)
    # three-way LCS is no longer than two-way on the same draws, statistically
    two = run_experiment(config(n=8, k=2, trials=2000, seed=9))
    assert base.mean_length < two.mean_length


def test_budget_refused_before_work():
    with pytest.raises(BudgetError):
        run_experiment(config(n=3000, k=3, trials=10))


def test_bigint_fallback_matches_bitparallel():
    # n=70 exercises the per-trial big-int path; cross-check against the
    # batched uint64 path at n=63 is impossible, so instead check that the
    # two code paths agree on identical symbol draws at the boundary by
    # comparing against core.lcs2 trial by trial
    from lcslab.core import Sequence, lcs2
    from lcslab.estimator import _trial_symbols

    cfg = config(n=70, trials=64, seed=21)
    cum = cfg.alphabet.cumulative()
    syms = _trial_symbols(cfg.master_seed, 0, 64, 2, 70, cum)
    expected = {}
    for t in range(64):
        a = Sequence(syms[t, 0].tolist(), 2)
        b = Sequence(syms[t, 1].tolist(), 2)
        expected[t] = lcs2(a, b).length
    record = run_experiment(cfg)
    hist = {}
    for length in expected.values():
        hist[length] = hist.get(length, 0) + 1
    assert record.histogram == hist


def test_estimator_consistency_small_n():
    exact = exact_pair_stats(8)
    bound = 3 * math.sqrt(float(exact.variance) / 100_000) / 8
    misses = 0
    for seed in range(10):
        record = run_experiment(config(n=8, trials=100_000, seed=seed))
        if abs(record.gamma_hat - float(exact.gamma)) >= bound:
            misses += 1
    assert misses <= 1


def test_mean_ci_width_scales_as_inverse_sqrt_trials():
    small = run_experiment(config(n=10, trials=100, seed=2))
    large = run_experiment(config(n=10, trials=10_000, seed=2))
    width_small = small.mean_ci[1] - small.mean_ci[0]
    width_large = large.mean_ci[1] - large.mean_ci[0]
    assert abs(width_small / width_large - 10.0) < 1.5  # within 15% of sqrt(100)


# ---------------------------------------------------------------------------
# confidence intervals


def test_mean_ci_t_two_samples():
    lo, hi = mean_ci_t(2, 1.0, 2.0, 0.95)  # samples {0, 2}
    assert abs((hi - lo) / 2 - 12.706204736432095) < 1e-9
    assert abs((hi + lo) / 2 - 1.0) < 1e-12


def test_mean_ci_t_constant_samples():
    assert mean_ci_t(10, 5.0, 0.0) == (5.0, 5.0)
    with pytest.raises(ValueError):
        mean_ci_t(1, 0.0, 0.0)


def test_variance_ci_chi2_known_quantiles():
    lo, hi = variance_ci_chi2(101, 1.0, 0.95)
    assert abs(lo - 100 / 129.5611971858366) < 1e-9
    assert abs(hi - 100 / 74.22192747492373) < 1e-9
    assert lo < 1.0 < hi
    assert variance_ci_chi2(10, 0.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        variance_ci_chi2(1, 1.0)


# ---------------------------------------------------------------------------
# exact-vs-MC reconciliation


def test_compare_exhaustive_mode_is_zero():
    assert compare_exact_vs_mc(4, mc=None) == (0.0, 0.0)


def test_compare_grouped_protocol_small():
    eps_gamma, eps_var = compare_exact_vs_mc(
        5, mc=GroupedConfig(seqs_per_dataset=64, datasets=128, master_seed=3)
    )
    assert eps_gamma < 0.05
    assert eps_var < 0.5


def test_grouped_config_validation():
    with pytest.raises(ValueError):
        GroupedConfig(seqs_per_dataset=5)
    with pytest.raises(ValueError):
        GroupedConfig(datasets=0)


# ---------------------------------------------------------------------------
# conjecture helpers


def test_gamma_predictor_values():
    assert abs(gamma_predictor(2, 2) - 0.8284271247461903) < 1e-12
    assert abs(gamma_predictor(2, 8) - 2 / (math.sqrt(8) + 1)) < 1e-12
    assert abs(gamma_predictor(2, 8) - 0.5224077499274843) < 1e-9


def test_gamma_predictor_monotone():
    for k in range(2, 7):
        for q in range(2, 8):
            assert gamma_predictor(k + 1, q) < gamma_predictor(k, q)
            assert gamma_predictor(k, q + 1) < gamma_predictor(k, q)
    with pytest.raises(ValueError):
        gamma_predictor(1, 2)


def _synthetic_record(n, variance, k=2, q=2):
    cfg = ExperimentConfig(
        n=n, k=k, alphabet=Alphabet.uniform(q), trials=100, master_seed=0
    )
    return EstimateRecord(
        config=cfg,
        mean_length=0.8 * n,
        gamma_hat=0.8,
        sample_variance=variance,
        skewness=0.0,
        histogram={},
        mean_ci=(0.0, 0.0),
        variance_ci=(0.0, 0.0),
        wall_time_seconds=0.0,
    )


def test_fit_variance_growth_exact_power_laws():
    records = [_synthetic_record(n, 4.0 * n * n) for n in (10, 100, 1000)]
    exponent, coefficient, r2 = fit_variance_growth(records)
    assert abs(exponent - 2.0) < 1e-9
    assert abs(coefficient - 4.0) < 1e-9
    assert abs(r2 - 1.0) < 1e-12
    exponent, _, _ = fit_variance_growth(
        [_synthetic_record(n, 3.0 * n) for n in (10, 100, 1000)]
    )
    assert abs(exponent - 1.0) < 1e-9


def test_fit_variance_growth_validation():
    records = [_synthetic_record(n, n) for n in (10, 100)]
    with pytest.raises(ValueError):
        fit_variance_growth(records)
    mixed = [_synthetic_record(n, n) for n in (10, 100)] + [
        _synthetic_record(1000, 1000.0, q=4)
    ]
    with pytest.raises(ValueError):
        fit_variance_growth(mixed)


def test_fit_variance_growth_published_large_n_rows():
    # variance column of the published large-n simulation runs; the growth
    # exponent comes out ~1.87 — below the conjectured n^2, reported not asserted
    table = {
        1000: 174.768, 1500: 311.617, 2000: 545.767, 2500: 845.373,
        3000: 1213.201, 3500: 1638.397, 4000: 2136.979, 4500: 2694.796,
        5000: 3323.126,
    }
    records = [_synthetic_record(n, v) for n, v in table.items()]
    exponent, coefficient, r2 = fit_variance_growth(records)
    assert 1.6 < exponent < 2.0
    assert 0.0001 < coefficient < 0.001
    assert r2 > 0.99


def test_mainville_index_values():
    assert mainville_index((0.5, 0.5)) == 2
    assert mainville_index((0.9, 0.1)) == 1
    for q in (2, 3, 7, 16, 64):
        assert mainville_index([1.0 / q] * q) == q
    with pytest.raises(ValueError):
        mainville_index((0.5, 0.6))


# ---------------------------------------------------------------------------
# sweeps


def test_sweep_p_grid_validation():
    with pytest.raises(ValueError):
        sweep_p(10, 2, [0.1, 0.7], 10, 0)
    with pytest.raises(ValueError):
        sweep_p(10, 2, [0.3, 0.2], 10, 0)
    with pytest.raises(ValueError):
        sweep_p(10, 2, [], 10, 0)
    with pytest.raises(ValueError):
        SweepCurve("p", ((0.2, None), (0.1, None)))


def test_sweep_p_point_reproduces_standalone_run():
    curve = sweep_p(12, 2, [0.25, 0.5], 500, seed=99)
    p, record = curve.points[1]
    assert p == 0.5
    standalone = run_experiment(
        ExperimentConfig(
            n=12, k=2, alphabet=Alphabet(2, (0.5, 0.5)), trials=500,
            master_seed=rng.stream_seed(99, 1),
        )
    )
    assert strip_time(record) == strip_time(standalone)


def test_sweep_p_skew_symmetry():
    # gamma depends on probs only through the multiset: (0.2, 0.8) vs (0.8, 0.2)
    a = run_experiment(
        ExperimentConfig(n=12, k=2, alphabet=Alphabet(2, (0.2, 0.8)), trials=20_000, master_seed=4)
    )
    b = run_experiment(
        ExperimentConfig(n=12, k=2, alphabet=Alphabet(2, (0.8, 0.2)), trials=20_000, master_seed=4)
    )
    assert abs(a.gamma_hat - b.gamma_hat) < 0.005


def test_sweep_alphabet_consistency_and_shape():
    curve = sweep_alphabet(20, 2, [2, 4, 8], 400, seed=13)
    values = [v for v, _ in curve.points]
    assert values == [2, 4, 8]
    gammas = [r.gamma_hat for _, r in curve.points]
    assert gammas[0] > gammas[1] > gammas[2]
    standalone = run_experiment(
        ExperimentConfig(
            n=20, k=2, alphabet=Alphabet.uniform(2), trials=400,
            master_seed=rng.stream_seed(13, 0),
        )
    )
    assert strip_time(curve.points[0][1]) == strip_time(standalone)
    with pytest.raises(ValueError):
        sweep_alphabet(10, 2, [4, 2], 10, 0)


# ---------------------------------------------------------------------------
# serialization


def test_record_csv_layout():
    record = run_experiment(config(n=6, trials=100, seed=1))
    row = record_csv_row(record)
    header_cols = RECORD_CSV_HEADER.split(",")
    cols = row.split(",")
    assert len(cols) == len(header_cols) == 13
    assert cols[0] == "6"
    assert cols[3] == "0.5;0.5"
    d = record_json_dict(record)
    assert d["trials"] == 100
    assert sum(d["histogram"].values()) == 100
