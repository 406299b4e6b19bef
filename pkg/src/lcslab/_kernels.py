"""Jitted k-dimensional LCS dynamic programming kernels.

The recurrence is the standard one: if the k current symbols all agree, take
the all-minus-one diagonal plus 1, otherwise the max over the k drop-one
neighbors.  k = 3, 4, 5 get specialized rolling-layer kernels (two
(k-1)-dimensional int16 layers); any other k falls back to a generic flat-table
kernel with odometer indexing.  All kernels are nogil so callers can run
batches on a thread pool; cell budgets are enforced by the callers
(core.lcs_k), which keeps every table comfortably in memory.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _lcs3(s1, s2, s3):
    n1, n2, n3 = len(s1), len(s2), len(s3)
    prev = np.zeros((n2 + 1, n3 + 1), dtype=np.int16)
    curr = np.zeros((n2 + 1, n3 + 1), dtype=np.int16)
    for i1 in range(1, n1 + 1):
        c1 = s1[i1 - 1]
        for i2 in range(1, n2 + 1):
            e2 = s2[i2 - 1] == c1
            for i3 in range(1, n3 + 1):
                if e2 and s3[i3 - 1] == c1:
                    v = prev[i2 - 1, i3 - 1] + 1
                else:
                    v = prev[i2, i3]
                    if curr[i2 - 1, i3] > v:
                        v = curr[i2 - 1, i3]
                    if curr[i2, i3 - 1] > v:
                        v = curr[i2, i3 - 1]
                curr[i2, i3] = v
        prev, curr = curr, prev
    return prev[n2, n3]


@njit(cache=True, nogil=True)
def _lcs4(s1, s2, s3, s4):
    n1, n2, n3, n4 = len(s1), len(s2), len(s3), len(s4)
    prev = np.zeros((n2 + 1, n3 + 1, n4 + 1), dtype=np.int16)
    curr = np.zeros((n2 + 1, n3 + 1, n4 + 1), dtype=np.int16)
    for i1 in range(1, n1 + 1):
        c1 = s1[i1 - 1]
        for i2 in range(1, n2 + 1):
            e2 = s2[i2 - 1] == c1
            for i3 in range(1, n3 + 1):
                e3 = e2 and (s3[i3 - 1] == c1)
                for i4 in range(1, n4 + 1):
                    if e3 and s4[i4 - 1] == c1:
                        v = prev[i2 - 1, i3 - 1, i4 - 1] + 1
                    else:
                        v = prev[i2, i3, i4]
                        if curr[i2 - 1, i3, i4] > v:
                            v = curr[i2 - 1, i3, i4]
                        if curr[i2, i3 - 1, i4] > v:
                            v = curr[i2, i3 - 1, i4]
                        if curr[i2, i3, i4 - 1] > v:
                            v = curr[i2, i3, i4 - 1]
                    curr[i2, i3, i4] = v
        prev, curr = curr, prev
    return prev[n2, n3, n4]


@njit(cache=True, nogil=True)
def _lcs5(s1, s2, s3, s4, s5):
    n1, n2, n3, n4, n5 = len(s1), len(s2), len(s3), len(s4), len(s5)
    prev = np.zeros((n2 + 1, n3 + 1, n4 + 1, n5 + 1), dtype=np.int16)
    curr = np.zeros((n2 + 1, n3 + 1, n4 + 1, n5 + 1), dtype=np.int16)
    for i1 in range(1, n1 + 1):
        c1 = s1[i1 - 1]
        for i2 in range(1, n2 + 1):
            e2 = s2[i2 - 1] == c1
            for i3 in range(1, n3 + 1):
                e3 = e2 and (s3[i3 - 1] == c1)
                for i4 in range(1, n4 + 1):
                    e4 = e3 and (s4[i4 - 1] == c1)
                    for i5 in range(1, n5 + 1):
                        if e4 and s5[i5 - 1] == c1:
                            v = prev[i2 - 1, i3 - 1, i4 - 1, i5 - 1] + 1
                        else:
                            v = prev[i2, i3, i4, i5]
                            if curr[i2 - 1, i3, i4, i5] > v:
                                v = curr[i2 - 1, i3, i4, i5]
                            if curr[i2, i3 - 1, i4, i5] > v:
                                v = curr[i2, i3 - 1, i4, i5]
                            if curr[i2, i3, i4 - 1, i5] > v:
                                v = curr[i2, i3, i4 - 1, i5]
                            if curr[i2, i3, i4, i5 - 1] > v:
                                v = curr[i2, i3, i4, i5 - 1]
                        curr[i2, i3, i4, i5] = v
        prev, curr = curr, prev
    return prev[n2, n3, n4, n5]


@njit(cache=True, nogil=True)
def _lcs_flat(seqs, lens):
    """Generic k: full flat table, odometer-decoded multi-index per cell."""
    k = lens.shape[0]
    dims = np.empty(k, dtype=np.int64)
    total = np.int64(1)
    for j in range(k):
        dims[j] = lens[j] + 1
        total *= dims[j]
    strides = np.empty(k, dtype=np.int64)
    acc = np.int64(1)
    for j in range(k - 1, -1, -1):
        strides[j] = acc
        acc *= dims[j]
    diag = np.int64(0)
    for j in range(k):
        diag += strides[j]
    table = np.zeros(total, dtype=np.int16)
    idx = np.zeros(k, dtype=np.int64)
    zeros = k  # number of zero coordinates in idx
    for c in range(1, total):
        j = k - 1
        while True:
            idx[j] += 1
            if idx[j] == 1:
                zeros -= 1
            if idx[j] < dims[j]:
                break
            idx[j] = 0
            zeros += 1
            j -= 1
        if zeros > 0:
            continue  # boundary cell stays 0
        ch = seqs[0, idx[0] - 1]
        alleq = True
        for j in range(1, k):
            if seqs[j, idx[j] - 1] != ch:
                alleq = False
                break
        if alleq:
            table[c] = table[c - diag] + 1
        else:
            best = np.int16(0)
            for j in range(k):
                v = table[c - strides[j]]
                if v > best:
                    best = v
            table[c] = best
    return table[total - 1]


@njit(cache=True, nogil=True)
def _batch3(mat, out):
    for t in range(mat.shape[0]):
        out[t] = _lcs3(mat[t, 0], mat[t, 1], mat[t, 2])


@njit(cache=True, nogil=True)
def _batch4(mat, out):
    for t in range(mat.shape[0]):
        out[t] = _lcs4(mat[t, 0], mat[t, 1], mat[t, 2], mat[t, 3])


@njit(cache=True, nogil=True)
def _batch5(mat, out):
    for t in range(mat.shape[0]):
        out[t] = _lcs5(mat[t, 0], mat[t, 1], mat[t, 2], mat[t, 3], mat[t, 4])


def lcs_k_length(arrays) -> int:
    """Exact k-way LCS length of uint8 arrays (k >= 3; budget checked by caller)."""
    k = len(arrays)
    if k == 3:
        return int(_lcs3(arrays[0], arrays[1], arrays[2]))
    if k == 4:
        return int(_lcs4(arrays[0], arrays[1], arrays[2], arrays[3]))
    if k == 5:
        return int(_lcs5(arrays[0], arrays[1], arrays[2], arrays[3], arrays[4]))
    nmax = max(a.shape[0] for a in arrays)
    seqs = np.zeros((k, nmax), dtype=np.uint8)
    lens = np.empty(k, dtype=np.int64)
    for j, a in enumerate(arrays):
        seqs[j, : a.shape[0]] = a
        lens[j] = a.shape[0]
    return int(_lcs_flat(seqs, lens))


def batch_lengths(mat: np.ndarray) -> np.ndarray:
    """LCS lengths for a (trials, k, n) uint8 batch of equal-length tuples."""
    trials, k, _ = mat.shape
    out = np.empty(trials, dtype=np.int64)
    if k == 3:
        _batch3(mat, out)
    elif k == 4:
        _batch4(mat, out)
    elif k == 5:
        _batch5(mat, out)
    else:
        for t in range(trials):
            out[t] = lcs_k_length(list(mat[t]))
    return out
