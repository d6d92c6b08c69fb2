"""Suffix-array machinery over integer sequences.

Everything here works on plain integer arrays (letters are small signed
ints, separators large negative ints), so one implementation serves both
the piece analysis and the Dehn-scan index.  Construction is prefix
doubling on numpy lexsort: O(n log n) rounds of vectorized sorting, which
handles the ~8e5-symbol inputs produced by the block constructions in a
couple of seconds.
"""

from __future__ import annotations

import numpy as np

_HASH_BASE = np.uint64(0x9E3779B97F4A7C15)
_HASH_BASE_INV = np.uint64(pow(0x9E3779B97F4A7C15, -1, 1 << 64))
_U64 = np.uint64


def suffix_array(seq: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling; ``seq`` is any int array."""
    n = len(seq)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rank = np.unique(seq, return_inverse=True)[1].astype(np.int64)
    k = 1
    tmp = np.empty(n, dtype=np.int64)
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        tmp[sa[0]] = 0
        new_group = (rank[sa[1:]] != rank[sa[:-1]]) | (second[sa[1:]] != second[sa[:-1]])
        tmp[sa[1:]] = np.cumsum(new_group)
        rank, tmp = tmp.copy(), rank
        if rank[sa[-1]] == n - 1:
            return sa.astype(np.int64)
        k <<= 1


def lcp_array(seq, sa: np.ndarray) -> np.ndarray:
    """Kasai: lcp[i] = common prefix length of suffixes sa[i], sa[i+1]."""
    n = len(seq)
    if n <= 1:
        return np.zeros(max(n - 1, 0), dtype=np.int64)
    s = seq.tolist() if isinstance(seq, np.ndarray) else list(seq)
    sa_l = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa_l):
        rank[p] = i
    lcp = [0] * (n - 1)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa_l[r + 1]
        limit = n - (i if i > j else j)
        while h < limit and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return np.asarray(lcp, dtype=np.int64)


class SparseRMQ:
    """Static range-minimum over an int array; vectorized batch queries."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.int64)
        n = len(values)
        levels = max(1, n.bit_length())
        table = [values]
        size = 1
        while 2 * size <= n:
            prev = table[-1]
            table.append(np.minimum(prev[: n - 2 * size + 1], prev[size : n - size + 1]))
            size *= 2
        self._table = table
        self._n = n

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Elementwise min(values[lo..hi]) for inclusive index arrays, lo <= hi."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        length = hi - lo + 1
        j = np.floor(np.log2(length)).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for level in range(len(self._table)):
            mask = j == level
            if not mask.any():
                continue
            span = np.int64(1) << level
            tab = self._table[level]
            out[mask] = np.minimum(tab[lo[mask]], tab[hi[mask] - span + 1])
        return out


class PolyHash:
    """Position-independent rolling hash over an int sequence (mod 2^64).

    Window values are comparable across PolyHash instances, which is what
    the word-against-relator scans need.  Collisions are possible in
    principle; callers verify final matches letter-for-letter.
    """

    def __init__(self, seq):
        arr = np.asarray(list(seq), dtype=np.int64).astype(np.uint64)
        n = len(arr)
        self.n = n
        powers = np.empty(n + 1, dtype=_U64)
        powers[0] = _U64(1)
        if n:
            powers[1:] = np.cumprod(np.full(n, _HASH_BASE, dtype=_U64))
        inv_powers = np.empty(n + 1, dtype=_U64)
        inv_powers[0] = _U64(1)
        if n:
            inv_powers[1:] = np.cumprod(np.full(n, _HASH_BASE_INV, dtype=_U64))
        prefix = np.zeros(n + 1, dtype=_U64)
        if n:
            np.cumsum((arr + _U64(1)) * inv_powers[:n], out=prefix[1:], dtype=_U64)
        self._powers = powers
        self._prefix = prefix

    def window(self, start: int, length: int) -> int:
        """Hash of seq[start : start+length]; equal windows hash equal."""
        diff = (int(self._prefix[start + length]) - int(self._prefix[start])) & 0xFFFFFFFFFFFFFFFF
        return (diff * int(self._powers[start])) & 0xFFFFFFFFFFFFFFFF

    def window_array(self, length: int) -> np.ndarray:
        """Hashes of every window of the given length, index-aligned."""
        if length > self.n:
            return np.empty(0, dtype=_U64)
        diff = self._prefix[length:] - self._prefix[:-length] if length else self._prefix
        return diff * self._powers[: self.n - length + 1]

    def lce(self, i: int, other: "PolyHash", j: int, limit: int) -> int:
        """Longest common extension of self[i:] and other[j:], capped."""
        limit = min(limit, self.n - i, other.n - j)
        if limit <= 0 or self.window(i, 1) != other.window(j, 1):
            return 0
        lo, hi = 1, limit
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.window(i, mid) == other.window(j, mid):
                lo = mid
            else:
                hi = mid - 1
        return lo
