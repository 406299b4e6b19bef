"""Sequences over small integer alphabets, and exact LCS computation.

Symbols are unsigned integers in [0, q) with q up to 64; SYMBOL_CHARS maps them
to display characters ('0'-'9', 'a'-'z', 'A'-'Z', '+', '/') for text I/O.

Three exact algorithms live here:

* ``lcs2`` length-only: the bit-parallel row algorithm of Crochemore,
  Iliopoulos, Pinzon and Reid (2001).  One Python big-int holds a whole DP row
  as a bit vector, so memory is O(min(|a|,|b|)/64) words and the scan costs
  ~5 word operations per character of the longer input.
* ``lcs2`` witness: full-table backtrack with canonical tie-breaking (prefer a
  diagonal match move, then the move consuming from the first sequence) while
  the table fits in _CANONICAL_WITNESS_CELLS; above that, Hirschberg's
  divide-and-conquer on the middle row, which needs only linear memory.
* ``lcs_k``: the k-dimensional DP (jitted kernels in ``_kernels``), guarded by
  an explicit cell budget since the table has prod(len_i + 1) cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError

SYMBOL_CHARS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ+/"
MAX_ALPHABET = len(SYMBOL_CHARS)  # 64
_CHAR_TO_SYMBOL = {c: i for i, c in enumerate(SYMBOL_CHARS)}

DEFAULT_CELL_BUDGET = 1 << 26
_CANONICAL_WITNESS_CELLS = 1 << 24
_HIRSCHBERG_BASE_CELLS = 1 << 18


class Sequence:
    """Immutable sequence of symbol indices over an alphabet of a given size."""

    __slots__ = ("_symbols", "alphabet_size")

    def __init__(self, symbols, alphabet_size: int):
        if isinstance(symbols, str):
            raise TypeError("pass symbol indices, or use Sequence.from_text")
        q = int(alphabet_size)
        if not 2 <= q <= MAX_ALPHABET:
            raise ValueError(f"alphabet size must be in [2, {MAX_ALPHABET}], got {q}")
        arr = np.asarray(symbols, dtype=np.int64).reshape(-1)
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= q):
            raise ValueError(f"symbol index out of range for alphabet size {q}")
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        self._symbols = arr
        self.alphabet_size = q

    @classmethod
    def _wrap(cls, arr: np.ndarray, alphabet_size: int) -> "Sequence":
        # Internal fast path: arr must already be a validated read-only uint8 array.
        obj = object.__new__(cls)
        obj._symbols = arr
        obj.alphabet_size = alphabet_size
        return obj

    @classmethod
    def from_text(cls, text: str, alphabet_size: int | None = None) -> "Sequence":
        """Decode a string of display characters ('0110', 'acab', ...)."""
        try:
            idx = [_CHAR_TO_SYMBOL[c] for c in text]
        except KeyError as e:
            raise ValueError(f"character {e.args[0]!r} is not in the symbol table") from None
        if alphabet_size is None:
            alphabet_size = max(2, max(idx, default=1) + 1)
        return cls(idx, alphabet_size)

    def to_text(self) -> str:
        return "".join(SYMBOL_CHARS[i] for i in self._symbols.tolist())

    @property
    def symbols(self) -> np.ndarray:
        """Read-only uint8 array of symbol indices."""
        return self._symbols

    def __len__(self) -> int:
        return self._symbols.shape[0]

    def __iter__(self):
        return iter(self._symbols.tolist())

    def __getitem__(self, i: int) -> int:
        return int(self._symbols[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return (
            self.alphabet_size == other.alphabet_size
            and self._symbols.shape == other._symbols.shape
            and bool(np.all(self._symbols == other._symbols))
        )

    def __hash__(self) -> int:
        return hash((self.alphabet_size, self._symbols.tobytes()))

    def __repr__(self) -> str:
        return f"Sequence({self.to_text()!r}, alphabet_size={self.alphabet_size})"


@dataclass(frozen=True)
class LcsResult:
    """LCS length plus, when requested, one longest common subsequence."""

    length: int
    witness: Sequence | None = None


def _check_alphabets(seqs) -> int:
    q = seqs[0].alphabet_size
    for s in seqs[1:]:
        if s.alphabet_size != q:
            raise ValueError(
                f"alphabet size mismatch: {s.alphabet_size} vs {q}"
            )
    return q


def _symbol_masks(arr: np.ndarray) -> list:
    """Per-symbol occurrence bit masks of a sequence (bit j <-> position j)."""
    masks = [0] * MAX_ALPHABET
    bit = 1
    for c in arr.tolist():
        masks[c] |= bit
        bit <<= 1
    return masks


def _lcs2_length(x: np.ndarray, y: np.ndarray) -> int:
    """Bit-parallel LCS length. Masks are built over the shorter input."""
    if x.shape[0] < y.shape[0]:
        short, long_side = x, y
    else:
        short, long_side = y, x
    m = short.shape[0]
    if m == 0:
        return 0
    masks = _symbol_masks(short)
    full = (1 << m) - 1
    v = full
    for c in long_side.tolist():
        u = masks[c] & v
        if u:
            v = ((v + u) | (v - u)) & full
    # zero bits of v mark matched row positions
    return m - v.bit_count()


def _dp_table(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Full (|x|+1) x (|y|+1) length table, rows vectorized.

    Per row: base_j = max(L[i-1, j], diagonal+1 if match), then the in-row
    dependency L[i, j-1] collapses to a running maximum of base.
    """
    lx, ly = x.shape[0], y.shape[0]
    table = np.zeros((lx + 1, ly + 1), dtype=np.int32)
    for i in range(1, lx + 1):
        row = np.where(y == x[i - 1], table[i - 1, :-1] + 1, 0)
        np.maximum(row, table[i - 1, 1:], out=row)
        np.maximum.accumulate(row, out=row)
        table[i, 1:] = row
    return table


def _backtrack(table: np.ndarray, x: np.ndarray, y: np.ndarray) -> list:
    """Canonical witness: prefer the diagonal match move, then consume from x."""
    i, j = x.shape[0], y.shape[0]
    out = []
    while i > 0 and j > 0:
        if x[i - 1] == y[j - 1] and table[i, j] == table[i - 1, j - 1] + 1:
            out.append(int(x[i - 1]))
            i -= 1
            j -= 1
        elif table[i - 1, j] == table[i, j]:
            i -= 1
        else:
            j -= 1
    out.reverse()
    return out


def _lcs_last_row(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Last DP row of x vs y in O(|y|) memory."""
    prev = np.zeros(y.shape[0] + 1, dtype=np.int32)
    cur = np.empty_like(prev)
    for i in range(1, x.shape[0] + 1):
        row = np.where(y == x[i - 1], prev[:-1] + 1, 0)
        np.maximum(row, prev[1:], out=row)
        np.maximum.accumulate(row, out=row)
        cur[0] = 0
        cur[1:] = row
        prev, cur = cur, prev
    return prev


def _hirschberg(x: np.ndarray, y: np.ndarray, out: list) -> None:
    lx, ly = x.shape[0], y.shape[0]
    if lx == 0 or ly == 0:
        return
    if (lx + 1) * (ly + 1) <= _HIRSCHBERG_BASE_CELLS:
        out.extend(_backtrack(_dp_table(x, y), x, y))
        return
    h = lx // 2
    forward = _lcs_last_row(x[:h], y)
    backward = _lcs_last_row(x[h:][::-1], y[::-1])[::-1]
    j = int(np.argmax(forward + backward))  # first maximum: deterministic split
    _hirschberg(x[:h], y[:j], out)
    _hirschberg(x[h:], y[j:], out)


def _witness(x: np.ndarray, y: np.ndarray) -> list:
    if (x.shape[0] + 1) * (y.shape[0] + 1) <= _CANONICAL_WITNESS_CELLS:
        return _backtrack(_dp_table(x, y), x, y)
    out: list = []
    _hirschberg(x, y, out)
    return out


def _wrap_witness(symbols: list, q: int) -> Sequence:
    arr = np.asarray(symbols, dtype=np.uint8).reshape(-1)
    arr.flags.writeable = False
    return Sequence._wrap(arr, q)


def lcs2(a: Sequence, b: Sequence, want_witness: bool = False) -> LcsResult:
    """Exact LCS of two sequences; optionally reconstruct one witness."""
    q = _check_alphabets((a, b))
    if not want_witness:
        return LcsResult(_lcs2_length(a.symbols, b.symbols))
    sym = _witness(a.symbols, b.symbols)
    return LcsResult(len(sym), _wrap_witness(sym, q))


def lcs_k(seqs, cell_budget: int = DEFAULT_CELL_BUDGET) -> LcsResult:
    """Exact LCS length of k >= 2 sequences via k-dimensional DP (length only).

    Refuses with BudgetError when prod(len_i + 1) exceeds cell_budget.
    """
    seqs = list(seqs)
    if len(seqs) < 2:
        raise ValueError(f"lcs_k needs at least 2 sequences, got {len(seqs)}")
    _check_alphabets(seqs)
    cells = 1
    for s in seqs:
        cells *= len(s) + 1
    if cells > cell_budget:
        raise BudgetError(
            f"k-way DP needs {cells} cells but the budget is {cell_budget}"
        )
    if any(len(s) == 0 for s in seqs):
        return LcsResult(0)
    if len(seqs) == 2:
        return LcsResult(_lcs2_length(seqs[0].symbols, seqs[1].symbols))
    from . import _kernels

    return LcsResult(_kernels.lcs_k_length([s.symbols for s in seqs]))


def is_common_subsequence(cand: Sequence, seqs) -> bool:
    """True iff cand embeds left-to-right in every sequence (greedy scan)."""
    pattern = cand.symbols.tolist()
    for s in seqs:
        it = iter(s.symbols.tolist())
        # `c in it` advances the iterator past the first match
        if not all(c in it for c in pattern):
            return False
    return True
