"""Counter-based deterministic random number generation.

Every random draw in this package flows through one fixed scheme, so that any
result can be reproduced bit-for-bit on any machine from a 64-bit master seed:

* ``mix64`` is the SplitMix64 finalizer (Steele/Lea/Flood 2014), a bijection
  on 64-bit words.
* Word ``i`` (0-based) of the stream with seed ``s`` is
  ``mix64(s + (i+1)*GOLDEN) mod 2^64`` — pure counter indexing, no sequential
  state, so generation order and thread count cannot affect output.
* Child streams are derived by folding integer keys:
  ``fold(h, key) = mix64(h XOR mix64((key+1)*GOLDEN))``.
  ``stream_seed(master, k1, k2, ...)`` folds the keys left to right.  Trial t
  of an experiment uses keys (t,), sequence j within it appends (j,), sweep
  point i prepends (i,), and so on.
* A word becomes a symbol via ``u = (word >> 11) * 2^-53`` (a double in
  [0, 1)) followed by a right-bisect of the cumulative probability vector.
  The same path serves uniform and skewed alphabets.

The scalar (Python int) and vectorized (numpy uint64) implementations are
checked against each other in the test suite.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

_NP_GOLDEN = np.uint64(GOLDEN)
_NP_M1 = np.uint64(0xBF58476D1CE4E5B9)
_NP_M2 = np.uint64(0x94D049BB133111EB)
_NP_S30 = np.uint64(30)
_NP_S27 = np.uint64(27)
_NP_S31 = np.uint64(31)
_NP_S11 = np.uint64(11)
_NP_ONE = np.uint64(1)
_U53_INV = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a Python int (mod 2^64)."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix64_np(x: np.ndarray) -> np.ndarray:
    """Vectorized mix64; accepts and returns uint64 arrays."""
    x = x.astype(np.uint64, copy=True)
    x ^= x >> _NP_S30
    x *= _NP_M1
    x ^= x >> _NP_S27
    x *= _NP_M2
    x ^= x >> _NP_S31
    return x


def stream_seed(master: int, *keys: int) -> int:
    """Derive a child stream seed by folding integer keys into the master seed."""
    h = master & _MASK
    for k in keys:
        h = mix64(h ^ mix64(((k + 1) * GOLDEN) & _MASK))
    return h


def stream_seed_np(h, keys: np.ndarray) -> np.ndarray:
    """Vectorized fold of one key axis: h may be a scalar or a broadcastable array."""
    keys = keys.astype(np.uint64, copy=False)
    mixed = mix64_np((keys + _NP_ONE) * _NP_GOLDEN)
    return mix64_np(np.asarray(h, dtype=np.uint64) ^ mixed)


def stream_word(seed: int, i: int) -> int:
    """Word i (0-based) of the stream with the given seed."""
    return mix64((seed + (i + 1) * GOLDEN) & _MASK)


def uniform01_np(seeds: np.ndarray, n: int) -> np.ndarray:
    """The first n doubles in [0, 1) of each stream; shape = seeds.shape + (n,)."""
    counters = np.arange(1, n + 1, dtype=np.uint64) * _NP_GOLDEN
    words = mix64_np(seeds.astype(np.uint64)[..., None] + counters)
    return (words >> _NP_S11).astype(np.float64) * _U53_INV


def symbols_np(seeds: np.ndarray, n: int, cumulative: np.ndarray) -> np.ndarray:
    """Draw n symbols per stream against a cumulative probability vector.

    ``cumulative`` must be nondecreasing with last entry exactly 1.0 (see
    Alphabet.cumulative); the result dtype is uint8, valid for alphabets
    up to size 64.
    """
    u = uniform01_np(seeds, n)
    return np.searchsorted(cumulative, u, side="right").astype(np.uint8)
