"""Deterministic random-sequence datasets, quality reports, and dataset files.

Sequence i of a dataset is drawn from the child stream (master_seed, i) — see
``lcslab.rng`` — so datasets are pure functions of their spec: regenerating
reproduces every sequence bit-exactly, and extending count from m to m+1
leaves the first m sequences unchanged.

The on-disk dataset format is UTF-8 text.  Line 1:

    #lcslab v1 q=<q> n=<n> count=<m> seed=<u64> probs=<comma-separated decimals>

followed by one sequence per line rendered via core.SYMBOL_CHARS ('0'-'9',
'a'-'z', 'A'-'Z', '+', '/'; supports q <= 64).  Parsers reject any symbol
character outside the declared alphabet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .core import MAX_ALPHABET, SYMBOL_CHARS, Sequence
from .errors import BudgetError, DataFormatError

DEFAULT_ENUM_BUDGET = 1 << 30

_CHAR_LOOKUP = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(SYMBOL_CHARS):
    _CHAR_LOOKUP[ord(_c)] = _i


@dataclass(frozen=True)
class Alphabet:
    """Symbol set of size q with a probability vector (uniform or skewed)."""

    size: int
    probs: tuple

    def __post_init__(self):
        if not 2 <= self.size <= MAX_ALPHABET:
            raise ValueError(f"alphabet size must be in [2, {MAX_ALPHABET}]")
        probs = tuple(float(p) for p in self.probs)
        if len(probs) != self.size:
            raise ValueError(f"need {self.size} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, q: int) -> "Alphabet":
        return cls(q, (1.0 / q,) * q)

    def cumulative(self) -> np.ndarray:
        cum = np.cumsum(np.asarray(self.probs, dtype=np.float64))
        cum[-1] = 1.0  # guard against float cumsum drift at the top end
        return cum


@dataclass(frozen=True)
class DatasetSpec:
    alphabet: Alphabet
    seq_length: int
    count: int
    master_seed: int

    def __post_init__(self):
        if self.seq_length < 1:
            raise ValueError("seq_length must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError("master_seed must be an unsigned 64-bit integer")


@dataclass
class SequenceDataset:
    spec: DatasetSpec
    sequences: list = field(repr=False)

    def matrix(self) -> np.ndarray:
        """(count, n) uint8 view of the dataset."""
        return np.vstack([s.symbols for s in self.sequences])


@dataclass(frozen=True)
class CoverageReport:
    distinct_count: int
    duplicate_count: int
    total_possible: int
    coverage_fraction: float
    saturated: bool  # q^n too large for an exact float fraction; fraction reported 0


@dataclass(frozen=True)
class CompositionReport:
    global_freq: tuple
    per_position_freq: np.ndarray
    chi2_global: float
    chi2_positions: np.ndarray


def generate(spec: DatasetSpec) -> SequenceDataset:
    """Generate the dataset for a spec (pure function; see module docstring)."""
    q = spec.alphabet.size
    n = spec.seq_length
    cum = spec.alphabet.cumulative()
    mat = np.empty((spec.count, n), dtype=np.uint8)
    # chunk so the intermediate u64 word block stays modest
    rows_per_chunk = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, spec.count, rows_per_chunk):
        hi = min(spec.count, lo + rows_per_chunk)
        seeds = rng.stream_seed_np(
            np.uint64(spec.master_seed), np.arange(lo, hi, dtype=np.uint64)
        )
        mat[lo:hi] = rng.symbols_np(seeds, n, cum)
    mat.flags.writeable = False
    sequences = [Sequence._wrap(row, q) for row in mat]
    return SequenceDataset(spec, sequences)


def enumerate_all(q: int, n: int, budget: int = DEFAULT_ENUM_BUDGET):
    """Yield all q^n sequences of length n in lexicographic order."""
    if not 2 <= q <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in [2, {MAX_ALPHABET}]")
    if n < 1:
        raise ValueError("n must be >= 1")
    total = q**n
    if total > budget:
        raise BudgetError(
            f"enumerating {q}^{n} = {total} sequences exceeds the budget of {budget}"
        )
    digits = np.zeros(n, dtype=np.uint8)
    while True:
        out = digits.copy()
        out.flags.writeable = False
        yield Sequence._wrap(out, q)
        j = n - 1
        while j >= 0 and digits[j] == q - 1:
            digits[j] = 0
            j -= 1
        if j < 0:
            return
        digits[j] += 1


def coverage(dataset: SequenceDataset) -> CoverageReport:
    """Distinct-sequence census against the q^n possibilities."""
    mat = dataset.matrix()
    distinct = int(np.unique(mat, axis=0).shape[0])
    q = dataset.spec.alphabet.size
    total = q ** dataset.spec.seq_length
    saturated = total > (1 << 53)
    fraction = 0.0 if saturated else distinct / total
    return CoverageReport(
        distinct_count=distinct,
        duplicate_count=dataset.spec.count - distinct,
        total_possible=total,
        coverage_fraction=fraction,
        saturated=saturated,
    )


def _pearson_chi2(counts: np.ndarray, probs: np.ndarray, total: int) -> float:
    expected = probs * total
    live = expected > 0
    if np.any(counts[~live] > 0):
        return math.inf  # observed mass on a zero-probability symbol
    dev = counts[live] - expected[live]
    return float(np.sum(dev * dev / expected[live]))


def composition(dataset: SequenceDataset) -> CompositionReport:
    """Pooled and per-position symbol frequencies with Pearson chi^2 statistics."""
    mat = dataset.matrix()
    q = dataset.spec.alphabet.size
    probs = np.asarray(dataset.spec.alphabet.probs, dtype=np.float64)
    count, n = mat.shape
    pooled = np.bincount(mat.reshape(-1), minlength=q).astype(np.float64)
    per_pos = np.zeros((n, q), dtype=np.float64)
    for j in range(n):
        per_pos[j] = np.bincount(mat[:, j], minlength=q)
    chi2_global = _pearson_chi2(pooled, probs, count * n)
    chi2_positions = np.array(
        [_pearson_chi2(per_pos[j], probs, count) for j in range(n)]
    )
    return CompositionReport(
        global_freq=tuple((pooled / (count * n)).tolist()),
        per_position_freq=per_pos / count,
        chi2_global=chi2_global,
        chi2_positions=chi2_positions,
    )


def write_dataset(dataset: SequenceDataset, path) -> None:
    spec = dataset.spec
    probs = ",".join(repr(p) for p in spec.alphabet.probs)
    header = (
        f"#lcslab v1 q={spec.alphabet.size} n={spec.seq_length} "
        f"count={spec.count} seed={spec.master_seed} probs={probs}"
    )
    with open(path, "w", encoding="utf-8") as f:
        f.write(header + "\n")
        for s in dataset.sequences:
            f.write(s.to_text() + "\n")


def read_dataset(path) -> SequenceDataset:
    """Parse a dataset file; malformed input raises DataFormatError naming the line."""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith("#lcslab v1 "):
        raise DataFormatError("line 1: expected '#lcslab v1' header")
    fields = {}
    for token in lines[0].split()[2:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise DataFormatError(f"line 1: malformed header token {token!r}")
        fields[key] = value
    missing = {"q", "n", "count", "seed", "probs"} - fields.keys()
    if missing:
        raise DataFormatError(f"line 1: header missing {sorted(missing)}")
    try:
        q = int(fields["q"])
        n = int(fields["n"])
        count = int(fields["count"])
        seed = int(fields["seed"])
        probs = tuple(float(p) for p in fields["probs"].split(","))
        alphabet = Alphabet(q, probs)
        spec = DatasetSpec(alphabet, n, count, seed)
    except ValueError as e:
        raise DataFormatError(f"line 1: {e}") from None
    body = lines[1:]
    if len(body) != count:
        raise DataFormatError(
            f"expected {count} sequence lines after the header, found {len(body)}"
        )
    sequences = []
    for lineno, line in enumerate(body, start=2):
        try:
            raw = np.frombuffer(line.encode("ascii"), dtype=np.uint8)
        except UnicodeEncodeError:
            raise DataFormatError(f"line {lineno}: non-ASCII character") from None
        if raw.shape[0] != n:
            raise DataFormatError(
                f"line {lineno}: expected {n} symbols, found {raw.shape[0]}"
            )
        syms = _CHAR_LOOKUP[raw]
        bad = np.nonzero(syms >= q)[0]
        if bad.size:
            raise DataFormatError(
                f"line {lineno}: symbol {line[int(bad[0])]!r} outside alphabet of size {q}"
            )
        syms.flags.writeable = False
        sequences.append(Sequence._wrap(syms, q))
    return SequenceDataset(spec, sequences)
