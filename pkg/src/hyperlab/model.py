"""Random k-uniform hypergraph models: binomial, uniform and the edge-arrival process.

All randomness comes from ``numpy.random.Generator`` over PCG64, seeded with a
plain integer. Edges are handled as colex ranks of k-subsets of ``range(n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .combinatorics import VertexSet, binom, check_set, rank_set, unrank_set
from .errors import check_table_size

GENERATOR = "numpy.random.PCG64"
_BINOMIAL_BLOCK = 1 << 20


@dataclass(frozen=True)
class Params:
    n: int
    k: int
    j: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"edge size k must be >= 2, got {self.k}")
        if not 1 <= self.j <= self.k - 1:
            raise ValueError(f"order j must lie in [1, k-1] = [1, {self.k - 1}], got {self.j}")
        if self.n < self.k:
            raise ValueError(f"need n >= k, got n={self.n}, k={self.k}")

    @property
    def n_edges(self) -> int:
        """Number of k-sets, i.e. C(n, k)."""
        return binom(self.n, self.k)

    @property
    def n_jsets(self) -> int:
        return binom(self.n, self.j)

    @property
    def jsets_per_edge(self) -> int:
        return binom(self.k, self.j)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


@dataclass(frozen=True)
class Hypergraph:
    params: Params
    edges: frozenset[int]

    def __post_init__(self):
        total = self.params.n_edges
        for e in self.edges:
            if not 0 <= e < total:
                raise ValueError(f"edge rank {e} outside [0, {total})")

    @classmethod
    def from_edges(cls, params: Params, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        ranks = set()
        for e in edges:
            e = check_set(sorted(e), params.n)
            if len(e) != params.k:
                raise ValueError(f"edge {e} does not have {params.k} vertices")
            ranks.add(rank_set(e, params.n))
        return cls(params, frozenset(ranks))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_ranks(self) -> list[int]:
        return sorted(self.edges)

    def edge_sets(self) -> list[VertexSet]:
        """Edges as vertex tuples, in increasing rank."""
        n, k = self.params.n, self.params.k
        return [unrank_set(r, k, n) for r in self.edge_ranks()]

    def to_text(self) -> str:
        p = self.params
        lines = [f"{p.n} {p.k} {p.j} {self.m}"]
        lines += [" ".join(map(str, e)) for e in self.edge_sets()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty hypergraph text")
        try:
            n, k, j, m = (int(x) for x in lines[0].split())
        except ValueError:
            raise ValueError(f"bad header line {lines[0]!r}, expected 'n k j m'") from None
        body = lines[1:]
        if len(body) != m:
            raise ValueError(f"header announces {m} edges but {len(body)} follow")
        params = Params(n, k, j)
        hg = cls.from_edges(params, ([int(x) for x in ln.split()] for ln in body))
        if hg.m != m:
            raise ValueError("duplicate edges in hypergraph text")
        return hg


class EdgeStream:
    """The hypergraph process: one new edge per step, uniform among absent k-sets.

    Below half of C(n,k) emitted, ranks are drawn uniformly and rejected when
    already seen. From half onwards the unseen ranks are shuffled once and
    emitted in that order, so the stream can be exhausted cheaply at tiny n.
    """

    _CHUNK = 64

    def __init__(self, params: Params, seed: int):
        self.params = params
        self.seed = seed
        self.total = params.n_edges
        self.emitted = 0
        self._rng = make_rng(seed)
        self._seen: set[int] = set()
        self._buffer: list[int] = []
        self._tail: list[int] | None = None

    def next_rank(self) -> int:
        if self.emitted >= self.total:
            raise StopIteration
        if self._tail is None and 2 * self.emitted < self.total:
            seen = self._seen
            while True:
                if not self._buffer:
                    draws = self._rng.integers(0, self.total, size=self._CHUNK)
                    self._buffer = draws.tolist()[::-1]
                r = self._buffer.pop()
                if r not in seen:
                    break
        else:
            if self._tail is None:
                check_table_size(self.total, "stream shuffle")
                unseen = np.ones(self.total, dtype=bool)
                unseen[list(self._seen)] = False
                self._tail = self._rng.permutation(np.flatnonzero(unseen)).tolist()[::-1]
            r = self._tail.pop()
        self._seen.add(r)
        self.emitted += 1
        return r

    def ranks(self) -> Iterator[int]:
        while self.emitted < self.total:
            yield self.next_rank()

    def __iter__(self) -> "EdgeStream":
        return self

    def __next__(self) -> VertexSet:
        return unrank_set(self.next_rank(), self.params.k, self.params.n)


def edge_stream(params: Params, seed: int) -> EdgeStream:
    return EdgeStream(params, seed)


def uniform_ranks(params: Params, M: int, seed: int) -> list[int]:
    if not 0 <= M <= params.n_edges:
        raise ValueError(f"M={M} outside [0, C(n,k)] = [0, {params.n_edges}]")
    stream = EdgeStream(params, seed)
    return [stream.next_rank() for _ in range(M)]


def sample_uniform(params: Params, M: int, seed: int) -> Hypergraph:
    """H^k(n, M) as the length-M prefix of :class:`EdgeStream`."""
    return Hypergraph(params, frozenset(uniform_ranks(params, M, seed)))


def binomial_ranks(params: Params, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted ranks of the k-sets kept independently with probability ``p``."""
    p = check_probability(p)
    total = params.n_edges
    kept = []
    for start in range(0, total, _BINOMIAL_BLOCK):
        size = min(_BINOMIAL_BLOCK, total - start)
        kept.append(np.flatnonzero(rng.random(size) < p) + start)
    return np.concatenate(kept) if kept else np.zeros(0, dtype=np.int64)


def sample_binomial(params: Params, p: float, seed: int) -> Hypergraph:
    ranks = binomial_ranks(params, p, make_rng(seed))
    return Hypergraph(params, frozenset(ranks.tolist()))
