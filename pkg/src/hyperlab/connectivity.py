"""Incremental j-connectivity over ranked j-sets, plus a from-scratch oracle.

Two covered j-sets are in the same class when a walk of edges, consecutive
ones sharing at least j vertices, joins them. Inserting an edge merges all of
its C(k,j) j-subsets; edges sharing >= j vertices share a j-set, so the union
of those merges is exactly the walk relation.
"""

from __future__ import annotations

from array import array
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import binom_table, colex_subsets, rank_set, sub_sets, subset_rank_table
from .errors import check_table_size
from .model import Hypergraph, Params

Partition = list[tuple[int, ...]]


def canonical_partition(blocks: Iterable[Iterable[int]]) -> Partition:
    """Blocks with ascending members, ordered by smallest member."""
    out = [tuple(sorted(b)) for b in blocks]
    out.sort(key=lambda b: b[0] if b else -1)
    return out


def dump_partition(blocks: Partition) -> str:
    return "".join(" ".join(map(str, b)) + "\n" for b in blocks)


class JSetRanker:
    """Colex ranks of the j-subsets of a k-edge, using a cached binomial table."""

    def __init__(self, params: Params):
        self.k = params.k
        self.j = params.j
        self._table = binom_table(params.n, params.j)
        self._positions = colex_subsets(params.k, params.j)

    def __call__(self, edge: Sequence[int]) -> list[int]:
        B = self._table
        return [sum(B[edge[q]][i] for i, q in enumerate(pos, start=1)) for pos in self._positions]


class ComponentTracker:
    """Union-find over all C(n,j) j-sets with degree and coverage counters.

    Only covered j-sets (degree >= 1) count as components; isolated j-sets are
    tracked through ``isolated_count``. Inserting the same edge twice double
    counts degrees, so callers must feed distinct edges.
    """

    def __init__(self, params: Params, memcap: int | None = None):
        n_jsets = params.n_jsets
        check_table_size(n_jsets, f"j-set table C({params.n},{params.j})", memcap)
        self.params = params
        self.n_jsets = n_jsets
        self.parent = array("q", range(n_jsets))
        self.size = array("q", bytes(8 * n_jsets))
        self.degree = array("q", bytes(8 * n_jsets))
        self.covered_count = 0
        self.component_count = 0
        self.edges_inserted = 0
        self._largest = 0
        self._ranker = JSetRanker(params)

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def _union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        size = self.size
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        size[ra] += size[rb]
        self.component_count -= 1
        if size[ra] > self._largest:
            self._largest = size[ra]

    def insert_jsets(self, jranks: Sequence[int]) -> None:
        """Insert one edge given by the ranks of its j-subsets."""
        degree = self.degree
        for r in jranks:
            if degree[r] == 0:
                self.covered_count += 1
                self.component_count += 1
                self.size[r] = 1
                if self._largest == 0:
                    self._largest = 1
            degree[r] += 1
        first = jranks[0]
        for r in jranks[1:]:
            self._union(first, r)
        self.edges_inserted += 1

    def insert_edge(self, edge: Sequence[int]) -> None:
        if len(edge) != self.params.k:
            raise ValueError(f"edge {tuple(edge)} does not have k={self.params.k} vertices")
        edge = tuple(edge)
        if any(a >= b for a, b in zip(edge, edge[1:])) or edge[0] < 0 or edge[-1] >= self.params.n:
            raise ValueError(f"edge {edge} is not a canonical k-set over [0, {self.params.n})")
        self.insert_jsets(self._ranker(edge))

    def is_j_connected(self) -> bool:
        return self.covered_count == self.n_jsets and self.component_count == 1

    def isolated_count(self) -> int:
        return self.n_jsets - self.covered_count

    def largest_component_size(self) -> int:
        return self._largest

    def component_partition(self) -> Partition:
        blocks: dict[int, list[int]] = {}
        degree = self.degree
        for r in range(self.n_jsets):
            if degree[r]:
                blocks.setdefault(self.find(r), []).append(r)
        return canonical_partition(blocks.values())

    def largest_component(self) -> list[int]:
        """Ranks of the j-sets in a largest class (smallest root on ties)."""
        if not self.covered_count:
            return []
        degree, size = self.degree, self.size
        best = max(
            (r for r in range(self.n_jsets) if degree[r] and self.parent[r] == r),
            key=lambda r: (size[r], -r),
        )
        return [r for r in range(self.n_jsets) if degree[r] and self.find(r) == best]

    def degrees(self) -> np.ndarray:
        return np.frombuffer(self.degree, dtype=np.int64)

    def degree_histogram(self) -> dict[int, int]:
        return histogram(self.degrees())


def tracker_new(params: Params, memcap: int | None = None) -> ComponentTracker:
    return ComponentTracker(params, memcap)


def tracker_from(h: Hypergraph, memcap: int | None = None) -> ComponentTracker:
    t = ComponentTracker(h.params, memcap)
    for e in h.edge_sets():
        t.insert_edge(e)
    return t


def histogram(degrees: np.ndarray) -> dict[int, int]:
    """``{s: D_s}`` for every s from 0 to the maximum degree."""
    counts = np.bincount(np.asarray(degrees, dtype=np.int64))
    return {s: int(c) for s, c in enumerate(counts)}


def jset_degrees(params: Params, edge_ranks: np.ndarray, memcap: int | None = None) -> np.ndarray:
    """deg(J) for every j-set, from edge ranks, in one vectorized pass."""
    check_table_size(params.n_edges * params.jsets_per_edge, "edge-to-j-set table", memcap)
    table = subset_rank_table(params.n, params.k, params.j)
    idx = table[np.asarray(edge_ranks, dtype=np.int64)].ravel()
    return np.bincount(idx, minlength=params.n_jsets)


def j_size(h: Hypergraph) -> int:
    j, n = h.params.j, h.params.n
    return len({rank_set(J, n) for e in h.edge_sets() for J in sub_sets(e, j)})


def bfs_j_components(h: Hypergraph) -> Partition:
    """j-components computed straight from the walk definition.

    Edges are adjacent when they share at least j vertices; each covered j-set
    takes the class of any edge containing it. Quadratic in the edge count.
    """
    j, n = h.params.j, h.params.n
    edges = h.edge_sets()
    masks = [sum(1 << v for v in e) for e in edges]
    comp = [-1] * len(edges)
    n_comp = 0
    for start in range(len(edges)):
        if comp[start] >= 0:
            continue
        comp[start] = n_comp
        queue = deque([start])
        while queue:
            a = queue.popleft()
            ma = masks[a]
            for b in range(len(edges)):
                if comp[b] < 0 and (ma & masks[b]).bit_count() >= j:
                    comp[b] = n_comp
                    queue.append(b)
        n_comp += 1
    blocks: list[set[int]] = [set() for _ in range(n_comp)]
    for e, c in zip(edges, comp):
        for J in sub_sets(e, j):
            blocks[c].add(rank_set(J, n))
    return canonical_partition(blocks)
