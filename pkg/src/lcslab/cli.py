"""Command-line front end.

Subcommands::

    lcslab exact    --n 2..12 --k 2 --q 2          exact enumeration tables
    lcslab simulate --n 1000 --trials 4096 ...      Monte Carlo experiments
    lcslab dataset  gen|analyze ...                 dataset files and reports
    lcslab bench    --dataset f --group-size 3 ...  heuristic benchmark
    lcslab sweep    p|alphabet ...                  parameter sweeps

Every command writes a RunManifest JSON next to its outputs; the manifest's
``config_digest`` hashes the fully-resolved numeric configuration (worker
count and output locations excluded, since they must not affect numbers).
Exit codes: 0 success, 2 usage error, 3 resource/budget refusal, 4 data
format error.  ``--workers`` (or the LCSLAB_WORKERS environment variable)
never changes any numeric output.  ``--config FILE`` splices ``key=value``
lines from FILE into the argument list at that position, so flags given
later still win.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetError, DataFormatError
from .estimator import (
    RECORD_CSV_HEADER,
    Alphabet,
    ExperimentConfig,
    curve_csv_lines,
    record_json_dict,
    run_experiment,
    sweep_alphabet,
    sweep_p,
)
from .exact import (
    RESULT_CSV_HEADER,
    exact_k_stats,
    exact_pair_stats,
    format_fraction,
    result_csv_row,
)
from .exact import DEFAULT_ENUM_BUDGET as _ENUM_BUDGET
from .core import DEFAULT_CELL_BUDGET as _CELL_BUDGET
from .heuristics import (
    ALGORITHMS,
    benchmark,
    report_csv_header,
    report_csv_row,
    report_json_dict,
    summary_csv_lines,
)
from .seqgen import (
    DatasetSpec,
    composition,
    coverage,
    generate,
    read_dataset,
    write_dataset,
)

_PRESETS = ("paper", "paper-large")


# ---------------------------------------------------------------------------
# argument plumbing


def _parse_int_list(text: str) -> list:
    """'2..12', '5', or '2,3,7' (commas may mix with ranges)."""
    out = []
    for token in text.split(","):
        token = token.strip()
        if ".." in token:
            lo, _, hi = token.partition("..")
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"empty range {token!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(token))
    if not out:
        raise ValueError("empty integer list")
    return out


def _parse_grid(text: str) -> list:
    """'0.05:0.5:0.05' (start:stop:step, inclusive) or '0.1,0.2,0.3'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid must be start:stop:step or a comma list")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(p) for p in text.split(",")]


def _parse_probs(text: str) -> tuple:
    return tuple(float(p) for p in text.split(","))


def _config_tokens(path: str) -> list:
    tokens = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DataFormatError(
                    f"{path}:{lineno}: expected key=value, got {line!r}"
                )
            tokens.append("--" + key.strip())
            value = value.strip()
            if value:
                tokens.append(value)
    return tokens


def _expand_config(argv: list) -> list:
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token == "--config":
            if i + 1 >= len(argv):
                raise ValueError("--config requires a file path")
            out.extend(_config_tokens(argv[i + 1]))
            i += 2
        elif token.startswith("--config="):
            out.extend(_config_tokens(token.split("=", 1)[1]))
            i += 1
        else:
            out.append(token)
            i += 1
    return out


def _resolve_workers(args) -> int:
    if args.workers is not None:
        if args.workers < 1:
            raise ValueError("--workers must be >= 1")
        return args.workers
    env = os.environ.get("LCSLAB_WORKERS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"LCSLAB_WORKERS must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError("LCSLAB_WORKERS must be >= 1")
        return value
    return 1


# ---------------------------------------------------------------------------
# manifest


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def config_digest(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _write_manifest(directory: Path, command: str, config: dict, outputs: list, started: str) -> Path:
    manifest = {
        "command": command,
        "config": config,
        "config_digest": config_digest(config),
        "tool_version": __version__,
        "outputs": sorted(outputs),
        "started": started,
        "finished": _utc_now(),
    }
    path = directory / f"{command.replace(' ', '-')}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _sanitize(obj):
    """Replace non-finite floats so the JSON stays strictly parseable."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# subcommands


def cmd_exact(args) -> int:
    started = _utc_now()
    workers = _resolve_workers(args)
    ns = _parse_int_list(args.n)
    use_symmetry = {"auto": None, "on": True, "off": False}[args.symmetry]
    if use_symmetry and args.k != 2:
        raise ValueError("symmetry reduction applies only to k=2")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    outputs = []
    for n in ns:
        if args.k == 2:
            result = exact_pair_stats(
                n, args.q, use_symmetry=use_symmetry,
                enum_budget=args.enum_budget, workers=workers,
            )
        else:
            result = exact_k_stats(n, args.k, args.q, enum_budget=args.enum_budget)
        rows.append(result_csv_row(result))
        hist_path = out_dir / f"exact_hist_n{n}.csv"
        total = result.total_tuples()
        with hist_path.open("w", encoding="utf-8") as f:
            f.write("length,count,probability\n")
            for length in range(n + 1):
                count = result.histogram[length]
                f.write(f"{length},{count},{format_fraction(Fraction(count, total))}\n")
        outputs.append(hist_path.name)
        print(
            f"n={n} mean={format_fraction(result.mean_length)} "
            f"gamma={format_fraction(result.gamma)} "
            f"variance={format_fraction(result.variance)}"
        )
    results_path = out_dir / "exact_results.csv"
    results_path.write_text(
        RESULT_CSV_HEADER + "\n" + "\n".join(rows) + "\n", encoding="utf-8"
    )
    outputs.append(results_path.name)
    config = {
        "n": ns,
        "k": args.k,
        "q": args.q,
        "symmetry": args.symmetry,
        "enum_budget": args.enum_budget,
    }
    _write_manifest(out_dir, "exact", config, outputs, started)
    return 0


def _paper_schedule() -> list:
    schedule = [(n, 1 << 17) for n in range(16, 26)]
    schedule += [(n, 1 << 14) for n in range(50, 501, 50)]
    schedule += [(n, 128) for n in range(1000, 5001, 500)]
    return schedule


def cmd_simulate(args) -> int:
    started = _utc_now()
    workers = _resolve_workers(args)
    if args.preset and args.n:
        raise ValueError("--preset and --n are mutually exclusive")
    if args.preset:
        if args.preset == "paper":
            schedule = _paper_schedule()
        else:
            print(
                "warning: preset paper-large runs n up to 100000 "
                "(128-bit rows x 10^5 positions); expect multiple hours",
                file=sys.stderr,
            )
            schedule = [(10_000, 100), (100_000, 100)]
    else:
        if not args.n:
            raise ValueError("either --n or --preset is required")
        if args.trials is None:
            raise ValueError("--trials is required with --n")
        schedule = [(n, args.trials) for n in _parse_int_list(args.n)]
    probs = _parse_probs(args.probs) if args.probs else None
    alphabet = Alphabet(args.q, probs) if probs else Alphabet.uniform(args.q)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "simulate_log.jsonl"
    # the same master seed serves every schedule point: sequence draws at
    # different n then share stream prefixes (common random numbers), which
    # makes cross-n comparisons less noisy
    with log_path.open("a", encoding="utf-8") as log:
        for n, trials in schedule:
            config = ExperimentConfig(
                n=n,
                k=args.k,
                alphabet=alphabet,
                trials=trials,
                master_seed=args.seed,
                batch_size=args.batch_size,
                confidence_level=args.confidence,
            )
            record = run_experiment(config, workers=workers)
            log.write(json.dumps(_sanitize(record_json_dict(record)), sort_keys=True) + "\n")
            print(
                f"n={n} trials={trials} gamma_hat={record.gamma_hat:.6f} "
                f"variance={record.sample_variance:.6f}"
            )
    # regenerate the summary CSV from the full log
    summary_path = out_dir / "simulate_summary.csv"
    with log_path.open("r", encoding="utf-8") as log, summary_path.open(
        "w", encoding="utf-8"
    ) as csv_out:
        csv_out.write(RECORD_CSV_HEADER + "\n")
        for line in log:
            d = json.loads(line)
            probs_field = ";".join(repr(float(p)) for p in d["probs"])
            csv_out.write(
                ",".join(
                    [
                        str(d["n"]),
                        str(d["k"]),
                        str(d["q"]),
                        probs_field,
                        str(d["trials"]),
                        str(d["seed"]),
                        repr(d["mean_length"]),
                        repr(d["gamma_hat"]),
                        repr(d["sample_variance"]),
                        repr(d["mean_ci"][0]),
                        repr(d["mean_ci"][1]),
                        repr(d["variance_ci"][0]),
                        repr(d["variance_ci"][1]),
                    ]
                )
                + "\n"
            )
    config = {
        "schedule": [[n, t] for n, t in schedule],
        "k": args.k,
        "q": args.q,
        "probs": list(alphabet.probs),
        "seed": args.seed,
        "batch_size": args.batch_size,
        "confidence": args.confidence,
    }
    _write_manifest(out_dir, "simulate", config, [log_path.name, summary_path.name], started)
    return 0


def cmd_dataset_gen(args) -> int:
    started = _utc_now()
    probs = _parse_probs(args.probs) if args.probs else None
    alphabet = Alphabet(args.q, probs) if probs else Alphabet.uniform(args.q)
    spec = DatasetSpec(alphabet, args.n, args.count, args.seed)
    dataset = generate(spec)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset, out_path)
    print(f"wrote {args.count} sequences to {out_path}")
    config = {
        "q": args.q,
        "n": args.n,
        "count": args.count,
        "seed": args.seed,
        "probs": list(alphabet.probs),
    }
    _write_manifest(out_path.parent, "dataset-gen", config, [out_path.name], started)
    return 0


def cmd_dataset_analyze(args) -> int:
    started = _utc_now()
    in_path = Path(args.input)
    dataset = read_dataset(in_path)
    cov = coverage(dataset)
    comp = composition(dataset)
    report = {
        "coverage": {
            "distinct_count": cov.distinct_count,
            "duplicate_count": cov.duplicate_count,
            "total_possible": cov.total_possible,
            "coverage_fraction": cov.coverage_fraction,
            "saturated": cov.saturated,
        },
        "composition": {
            "global_freq": list(comp.global_freq),
            "chi2_global": comp.chi2_global,
            "chi2_positions": comp.chi2_positions.tolist(),
            "chi2_positions_max": float(comp.chi2_positions.max()),
        },
    }
    out_path = Path(args.out) if args.out else in_path.with_suffix(in_path.suffix + ".analysis.json")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(
        json.dumps(_sanitize(report), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"coverage {cov.distinct_count}/{dataset.spec.count} distinct, "
        f"chi2_global={comp.chi2_global:.4f}"
    )
    config = {"input_header": in_path.read_text(encoding="utf-8").splitlines()[0]}
    _write_manifest(out_path.parent, "dataset-analyze", config, [out_path.name], started)
    return 0


def cmd_bench(args) -> int:
    started = _utc_now()
    if args.dataset:
        dataset = read_dataset(Path(args.dataset))
        dataset_id = Path(args.dataset).stem
    else:
        for flag, value in (("--q", args.q), ("--n", args.n), ("--count", args.count)):
            if value is None:
                raise ValueError(f"{flag} is required when no --dataset file is given")
        probs = _parse_probs(args.probs) if args.probs else None
        alphabet = Alphabet(args.q, probs) if probs else Alphabet.uniform(args.q)
        dataset = generate(DatasetSpec(alphabet, args.n, args.count, args.seed))
        dataset_id = None
    algorithms = tuple(args.algorithms.split(",")) if args.algorithms else ALGORITHMS
    reference = args.reference
    n = dataset.spec.seq_length
    if reference == "exact" and args.group_size > 2:
        needed = (n + 1) ** args.group_size
        if needed > args.cell_budget:
            print(
                f"warning: exact reference needs {needed} DP cells at "
                f"k={args.group_size}, n={n} (budget {args.cell_budget}); "
                "switching to the upper_bound reference",
                file=sys.stderr,
            )
            reference = "upper_bound"
    result = benchmark(
        dataset,
        args.group_size,
        algorithms,
        reference,
        window=args.window,
        max_dp_seqs=args.max_dp_seqs,
        cell_budget=args.cell_budget,
        dataset_id=dataset_id,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports_csv = out_dir / "bench_reports.csv"
    with reports_csv.open("w", encoding="utf-8") as f:
        f.write(report_csv_header(algorithms) + "\n")
        for report in result.reports:
            f.write(report_csv_row(report) + "\n")
    reports_jsonl = out_dir / "bench_reports.jsonl"
    with reports_jsonl.open("w", encoding="utf-8") as f:
        for report in result.reports:
            f.write(json.dumps(_sanitize(report_json_dict(report)), sort_keys=True) + "\n")
    summary_csv = out_dir / "bench_summary.csv"
    summary_csv.write_text("\n".join(summary_csv_lines(result)) + "\n", encoding="utf-8")
    for name, s in result.summaries.items():
        print(
            f"{name}: mean_ratio={s.mean_ratio:.4f} "
            f"({s.finite_count} finite, {s.infinite_count} infinite)"
        )
    config = {
        "dataset": {
            "q": dataset.spec.alphabet.size,
            "n": n,
            "count": dataset.spec.count,
            "seed": dataset.spec.master_seed,
            "probs": list(dataset.spec.alphabet.probs),
        },
        "group_size": args.group_size,
        "algorithms": list(algorithms),
        "reference": reference,
        "window": args.window,
        "max_dp_seqs": args.max_dp_seqs,
        "cell_budget": args.cell_budget,
    }
    _write_manifest(
        out_dir, "bench", config,
        [reports_csv.name, reports_jsonl.name, summary_csv.name], started,
    )
    return 0


def _write_curve(out_dir: Path, stem: str, curve, scaled: bool) -> list:
    outputs = []
    csv_path = out_dir / f"{stem}.csv"
    csv_path.write_text("\n".join(curve_csv_lines(curve, scaled=scaled)) + "\n", encoding="utf-8")
    outputs.append(csv_path.name)
    dat_path = out_dir / f"{stem}.dat"
    with dat_path.open("w", encoding="utf-8") as f:
        f.write(f"# {curve.parameter_name} gamma_hat\n")
        for value, record in curve.points:
            f.write(f"{value!r} {record.gamma_hat!r}\n")
    outputs.append(dat_path.name)
    if scaled:
        scaled_path = out_dir / f"{stem}_scaled.dat"
        with scaled_path.open("w", encoding="utf-8") as f:
            f.write(f"# {curve.parameter_name} gamma_hat*sqrt(q)\n")
            for value, record in curve.points:
                f.write(
                    f"{value!r} {record.gamma_hat * math.sqrt(record.config.alphabet.size)!r}\n"
                )
        outputs.append(scaled_path.name)
    return outputs


def cmd_sweep_p(args) -> int:
    started = _utc_now()
    workers = _resolve_workers(args)
    grid = _parse_grid(args.grid)
    curve = sweep_p(args.n, args.k, grid, args.trials, args.seed, workers=workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = _write_curve(out_dir, "sweep_p", curve, scaled=False)
    for value, record in curve.points:
        print(f"p={value} gamma_hat={record.gamma_hat:.6f}")
    config = {
        "sweep": "p", "n": args.n, "k": args.k, "grid": grid,
        "trials": args.trials, "seed": args.seed,
    }
    _write_manifest(out_dir, "sweep-p", config, outputs, started)
    return 0


def cmd_sweep_alphabet(args) -> int:
    started = _utc_now()
    workers = _resolve_workers(args)
    q_list = _parse_int_list(args.q)
    curve = sweep_alphabet(args.n, args.k, q_list, args.trials, args.seed, workers=workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = _write_curve(out_dir, "sweep_alphabet", curve, scaled=True)
    for value, record in curve.points:
        scaled = record.gamma_hat * math.sqrt(value)
        print(f"q={value} gamma_hat={record.gamma_hat:.6f} gamma*sqrt(q)={scaled:.6f}")
    config = {
        "sweep": "alphabet", "n": args.n, "k": args.k, "q_list": q_list,
        "trials": args.trials, "seed": args.seed,
    }
    _write_manifest(out_dir, "sweep-alphabet", config, outputs, started)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None,
                        help="thread count (default: LCSLAB_WORKERS or 1); never changes results")

    parser = argparse.ArgumentParser(
        prog="lcslab",
        description="Exact enumeration, Monte Carlo estimation, and heuristics "
                    "for longest-common-subsequence length statistics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact LCS-length distributions by enumeration")
    p.add_argument("--n", required=True, help="lengths, e.g. 2..12 or 5 or 2,4,8")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--symmetry", choices=("auto", "on", "off"), default="auto",
                   help="complement/reversal orbit reduction (k=2, q=2 only)")
    p.add_argument("--enum-budget", type=int, default=_ENUM_BUDGET)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimation runs")
    p.add_argument("--n", default=None, help="lengths, e.g. 1000 or 100,500,1000")
    p.add_argument("--preset", choices=_PRESETS, default=None,
                   help="named length/trials schedule (paper-large takes hours)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--probs", default=None, help="comma-separated symbol probabilities")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=4096)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dataset", help="dataset files: generation and analysis")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    g = dsub.add_parser("gen", parents=[common], help="generate a dataset file")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--probs", default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_dataset_gen)
    a = dsub.add_parser("analyze", parents=[common], help="coverage/composition report")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_dataset_analyze)

    p = sub.add_parser("bench", parents=[common], help="heuristic performance-ratio benchmark")
    p.add_argument("--dataset", default=None, help="dataset file (else generate inline)")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probs", default=None)
    p.add_argument("--group-size", type=int, required=True)
    p.add_argument("--algorithms", default=None,
                   help=f"comma list from {','.join(ALGORITHMS)} (default: all)")
    p.add_argument("--reference", choices=("exact", "upper_bound"), default="exact")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--max-dp-seqs", type=int, default=4)
    p.add_argument("--cell-budget", type=int, default=_CELL_BUDGET)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="parameter sweeps")
    ssub = p.add_subparsers(dest="sweep_command", required=True)
    sp = ssub.add_parser("p", parents=[common], help="symbol-skew sweep, binary alphabet")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--grid", required=True, help="start:stop:step or comma list, in (0, 0.5]")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_sweep_p)
    sa = ssub.add_parser("alphabet", parents=[common], help="uniform alphabet-size sweep")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--k", type=int, default=2)
    sa.add_argument("--q", required=True, help="sizes, e.g. 2,4,8,16")
    sa.add_argument("--trials", type=int, required=True)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--out-dir", default=".")
    sa.set_defaults(func=cmd_sweep_alphabet)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
        return args.func(args)
    except SystemExit as e:  # argparse throws on usage errors and --help
        code = e.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    except BudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except DataFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
