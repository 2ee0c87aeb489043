"""Exact binomials and colexicographic ranking of r-subsets of ``{0, ..., n-1}``.

A subset ``{a_1 < ... < a_r}`` has colex rank ``sum_i C(a_i, i)`` (1-based ``i``).
The rank does not depend on ``n``, which is what lets the tracker index j-sets
with a single flat table.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

VertexSet = tuple[int, ...]

# Ranks are stored in int64 tables, so that is the exact-integer width.
INT_LIMIT = 2**63 - 1


def binom(n: int, r: int) -> int:
    """C(n, r), zero when r > n. Raises OverflowError past the int64 range."""
    if n < 0 or r < 0:
        raise ValueError(f"binom needs non-negative arguments, got ({n}, {r})")
    value = math.comb(n, r)
    if value > INT_LIMIT:
        raise OverflowError(f"C({n}, {r}) does not fit in 64 bits")
    return value


@lru_cache(maxsize=64)
def binom_table(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Rows ``table[a][i] = C(a, i)`` for ``0 <= a <= n``, ``0 <= i <= r``."""
    return tuple(tuple(binom(a, i) for i in range(r + 1)) for a in range(n + 1))


def check_set(s: Sequence[int], n: int) -> VertexSet:
    s = tuple(int(v) for v in s)
    if not s:
        raise ValueError("vertex set must be non-empty")
    for a, b in zip(s, s[1:]):
        if a >= b:
            raise ValueError(f"vertex set {s} is not strictly increasing")
    if s[0] < 0 or s[-1] >= n:
        raise ValueError(f"vertex set {s} has a member outside [0, {n})")
    return s


def rank_set(s: Sequence[int], n: int) -> int:
    s = check_set(s, n)
    return sum(binom(a, i) for i, a in enumerate(s, start=1))


def unrank_set(rank: int, r: int, n: int) -> VertexSet:
    """Inverse of :func:`rank_set` by greedy largest-binomial decomposition."""
    if r < 1 or r > n:
        raise ValueError(f"subset size {r} invalid for n={n}")
    total = binom(n, r)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, {total}) for r={r}, n={n}")
    out = []
    a = n - 1
    for i in range(r, 0, -1):
        while binom(a, i) > rank:
            a -= 1
        out.append(a)
        rank -= binom(a, i)
        a -= 1
    return tuple(reversed(out))


def sub_sets(s: Sequence[int], r: int) -> list[VertexSet]:
    """All r-subsets of ``s`` in colex order."""
    s = tuple(s)
    if not 1 <= r <= len(s):
        raise ValueError(f"cannot take {r}-subsets of a {len(s)}-set")
    subs = list(combinations(s, r))
    subs.sort(key=lambda t: t[::-1])
    return subs


def colex_subsets(n: int, r: int) -> list[VertexSet]:
    """Every r-subset of ``range(n)`` in increasing colex rank."""
    return sorted(combinations(range(n), r), key=lambda t: t[::-1])


@lru_cache(maxsize=16)
def all_subsets_array(n: int, r: int) -> np.ndarray:
    """``(C(n,r), r)`` int64 array; row ``q`` holds the members of the rank-``q`` set."""
    arr = np.array(colex_subsets(n, r), dtype=np.int64).reshape(binom(n, r), r)
    arr.setflags(write=False)
    return arr


def rank_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized colex rank of each ascending row of an integer array."""
    rows = np.asarray(rows, dtype=np.int64)
    out = np.zeros(rows.shape[0], dtype=np.int64)
    if rows.size == 0:
        return out
    top = int(rows.max()) + 1
    for i in range(rows.shape[1]):
        lookup = np.array([binom(a, i + 1) for a in range(top)], dtype=np.int64)
        out += lookup[rows[:, i]]
    return out


@lru_cache(maxsize=16)
def subset_rank_table(n: int, k: int, j: int) -> np.ndarray:
    """``(C(n,k), C(k,j))`` table: row ``e`` lists the j-subset ranks of k-set ``e``.

    Columns follow the colex order of position subsets, so each row is the
    same sequence :func:`sub_sets` would produce.
    """
    edges = all_subsets_array(n, k)
    cols = [rank_rows(edges[:, list(pos)]) for pos in colex_subsets(k, j)]
    table = np.stack(cols, axis=1) if cols else np.zeros((len(edges), 0), dtype=np.int64)
    table.setflags(write=False)
    return table
