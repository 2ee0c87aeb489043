"""Monte Carlo experiments on the hypergraph models.

Trial ``t`` of any experiment is seeded with ``base_seed + t``; results are
folded in trial order, so running trials in worker processes changes nothing
but wall time.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable, Iterable, Literal, Sequence, TypeVar

import numpy as np

from .combinatorics import all_subsets_array, binom, rank_rows, subset_rank_table, unrank_set
from .connectivity import (
    ComponentTracker,
    bfs_j_components,
    dump_partition,
    histogram,
    jset_degrees,
    tracker_from,
)
from .errors import ResourceLimitError, check_table_size
from .model import (
    EdgeStream,
    Hypergraph,
    Params,
    binomial_ranks,
    check_probability,
    make_rng,
    sample_uniform,
    uniform_ranks,
)
from .statistics import (
    CnParameterization,
    Pmf,
    empirical_pmf,
    exact_expected_ds,
    limiting_lambda,
    mean_and_stderr,
    p_from_c,
    poisson,
    tv_distance,
    wilson_interval,
)

Model = Literal["binomial", "uniform"]
T = TypeVar("T")
R = TypeVar("R")


def _run(fn: Callable[[T], R], args: Sequence[T], workers: int = 1) -> list[R]:
    if workers <= 1 or len(args) < 2:
        return [fn(a) for a in args]
    chunk = max(1, len(args) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=chunk))


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")


# --- hitting times ---------------------------------------------------------


@dataclass(frozen=True)
class HittingRecord:
    tau_i: int
    tau_c: int
    seed: int

    def __post_init__(self):
        # a j-connected hypergraph has no isolated j-set, so this can never fail
        if not 1 <= self.tau_i <= self.tau_c:
            raise AssertionError(f"hitting-time order violated: {self}")

    @property
    def equal(self) -> bool:
        return self.tau_i == self.tau_c


@dataclass(frozen=True)
class CoincidenceEstimate:
    trials: int
    coincidences: int
    point: float
    ci_low: float
    ci_high: float


def run_hitting_trial(params: Params, seed: int, memcap: int | None = None) -> HittingRecord:
    """Drive one process until j-connected; record when isolation and disconnection end."""
    tracker = ComponentTracker(params, memcap)
    stream = EdgeStream(params, seed)
    table = _edge_table(params, memcap)
    n_jsets = tracker.n_jsets
    tau_i = 0
    step = 0
    while True:
        r = stream.next_rank()
        step += 1
        if table is not None:
            tracker.insert_jsets(table[r])
        else:
            tracker.insert_edge(_unrank(params, r))
        if not tau_i and tracker.covered_count == n_jsets:
            tau_i = step
        if tau_i and tracker.component_count == 1:
            return HittingRecord(tau_i, step, seed)


def hitting_trials(
    params: Params, trials: int, base_seed: int, workers: int = 1, memcap: int | None = None
) -> list[HittingRecord]:
    _check_trials(trials)
    fn = partial(_hitting_by_seed, params, memcap)
    return _run(fn, [base_seed + t for t in range(trials)], workers)


def _hitting_by_seed(params: Params, memcap: int | None, seed: int) -> HittingRecord:
    return run_hitting_trial(params, seed, memcap)


def summarize_coincidence(records: Sequence[HittingRecord]) -> CoincidenceEstimate:
    hits = sum(r.equal for r in records)
    lo, hi = wilson_interval(hits, len(records))
    return CoincidenceEstimate(len(records), hits, hits / len(records), lo, hi)


def estimate_coincidence(
    params: Params, trials: int, base_seed: int, workers: int = 1, memcap: int | None = None
) -> CoincidenceEstimate:
    return summarize_coincidence(hitting_trials(params, trials, base_seed, workers, memcap))


# --- degree counts ---------------------------------------------------------


@dataclass(frozen=True)
class DegreeCountSample:
    params: Params
    s: int
    c: float
    p: float
    observations: tuple[int, ...]
    mean: float
    stderr: float
    exact_expectation: float
    limit_lambda: float
    tv_to_poisson: float
    empirical: Pmf = field(repr=False)


def _degree_count_trial(params: Params, p: float, s: int, memcap: int | None, seed: int) -> int:
    ranks = binomial_ranks(params, p, make_rng(seed))
    return histogram(jset_degrees(params, ranks, memcap)).get(s, 0)


def sample_degree_counts(
    params: Params,
    cp: CnParameterization,
    trials: int,
    base_seed: int,
    workers: int = 1,
    p: float | None = None,
    memcap: int | None = None,
) -> DegreeCountSample:
    """D_s across ``trials`` binomial samples, compared with Po(E D_s).

    ``p`` overrides the probability derived from ``cp`` (``cp.c`` is still
    used for the limiting intensity).
    """
    _check_trials(trials)
    p = p_from_c(params, cp) if p is None else check_probability(p)
    fn = partial(_degree_count_trial, params, p, cp.s, memcap)
    obs = _run(fn, [base_seed + t for t in range(trials)], workers)
    mean, se = mean_and_stderr(obs)
    exact = exact_expected_ds(params, p, cp.s)
    emp = empirical_pmf(obs)
    tv = tv_distance(emp, poisson(exact, len(emp.weights) - 1))
    return DegreeCountSample(
        params, cp.s, cp.c, p, tuple(obs), mean, se, exact,
        limiting_lambda(params.j, cp.s, cp.c), tv, emp,
    )


# --- thresholds ------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    c: float
    trials: int
    frac_no_isolated: float
    frac_connected: float


def _edge_table(params: Params, memcap: int | None) -> list[list[int]] | None:
    """Per-edge j-subset ranks as nested lists, or None when the table is over the cap."""
    try:
        check_table_size(params.n_edges * params.jsets_per_edge, "edge-to-j-set table", memcap)
    except ResourceLimitError:
        return None
    return _edge_table_lists(params.n, params.k, params.j)


@lru_cache(maxsize=8)
def _edge_table_lists(n: int, k: int, j: int) -> list[list[int]]:
    return subset_rank_table(n, k, j).tolist()


def _unrank(params: Params, r: int) -> tuple[int, ...]:
    return unrank_set(r, params.k, params.n)


def matched_edge_count(params: Params, p: float) -> int:
    return round(p * params.n_edges)


def connectivity_trial(
    params: Params, p: float, model: Model, seed: int, memcap: int | None = None
) -> tuple[bool, bool]:
    """(no isolated j-set, j-connected) for one sample at density ``p``."""
    if model == "binomial":
        ranks = binomial_ranks(params, p, make_rng(seed)).tolist()
    elif model == "uniform":
        ranks = uniform_ranks(params, matched_edge_count(params, p), seed)
    else:
        raise ValueError(f"unknown model {model!r}")
    tracker = ComponentTracker(params, memcap)
    table = _edge_table(params, memcap)
    for r in ranks:
        if table is not None:
            tracker.insert_jsets(table[r])
        else:
            tracker.insert_edge(_unrank(params, r))
    return tracker.isolated_count() == 0, tracker.is_j_connected()


def _connectivity_by_seed(params, p, model, memcap, seed):
    return connectivity_trial(params, p, model, seed, memcap)


def _fractions(params, p, model, trials, base_seed, workers, memcap) -> tuple[float, float]:
    fn = partial(_connectivity_by_seed, params, p, model, memcap)
    outcomes = _run(fn, [base_seed + t for t in range(trials)], workers)
    no_iso = sum(a for a, _ in outcomes)
    conn = sum(b for _, b in outcomes)
    return no_iso / trials, conn / trials


def threshold_sweep(
    params: Params,
    c_values: Iterable[float],
    trials: int,
    base_seed: int,
    model: Model = "binomial",
    workers: int = 1,
    memcap: int | None = None,
) -> list[SweepRow]:
    _check_trials(trials)
    c_values = list(c_values)
    if not c_values:
        raise ValueError("threshold_sweep needs at least one c value")
    probs = [p_from_c(params, CnParameterization(0, c)) for c in c_values]
    rows = []
    for c, p in zip(c_values, probs):
        no_iso, conn = _fractions(params, p, model, trials, base_seed, workers, memcap)
        rows.append(SweepRow(c, trials, no_iso, conn))
    return rows


@dataclass(frozen=True)
class TransferReport:
    c: float
    p: float
    M: int
    trials: int
    binomial_no_isolated: float
    binomial_connected: float
    uniform_no_isolated: float
    uniform_connected: float

    @property
    def diff_no_isolated(self) -> float:
        return abs(self.binomial_no_isolated - self.uniform_no_isolated)

    @property
    def diff_connected(self) -> float:
        return abs(self.binomial_connected - self.uniform_connected)


def model_transfer_check(
    params: Params,
    c: float,
    trials: int,
    base_seed: int,
    workers: int = 1,
    memcap: int | None = None,
) -> TransferReport:
    """Connectivity fractions of H(n,p) and H(n,M) with M = round(p * C(n,k))."""
    _check_trials(trials)
    p = p_from_c(params, CnParameterization(0, c))
    b_iso, b_conn = _fractions(params, p, "binomial", trials, base_seed, workers, memcap)
    u_iso, u_conn = _fractions(params, p, "uniform", trials, base_seed, workers, memcap)
    return TransferReport(c, p, matched_edge_count(params, p), trials, b_iso, b_conn, u_iso, u_conn)


# --- well-constructed hypergraphs ------------------------------------------


@dataclass(frozen=True)
class WellConstructedCount:
    k: int
    j: int
    jsize: int
    count: int

    @property
    def bound(self) -> int:
        return 2 ** (self.k * self.jsize**2)


def canonical_form(edges: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Lexicographically least relabelled edge list over all admissible relabellings.

    Vertices are first split into classes by colour refinement; only
    relabellings that list the classes in colour order are tried. Colours are
    derived from isomorphism-invariant data, so the result is a complete
    invariant.
    """
    edges = [tuple(e) for e in edges]
    verts = sorted({v for e in edges for v in e})
    incident = {v: [e for e in edges if v in e] for v in verts}
    colour = {v: len(incident[v]) for v in verts}
    n_classes = len(set(colour.values()))
    while True:
        sig = {
            v: (colour[v], tuple(sorted(tuple(sorted(colour[u] for u in e if u != v)) for e in incident[v])))
            for v in verts
        }
        names = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        colour = {v: names[sig[v]] for v in verts}
        if len(names) == n_classes:
            break
        n_classes = len(names)
    cells = [[v for v in verts if colour[v] == c] for c in range(n_classes)]
    best = None
    for perms in itertools.product(*(itertools.permutations(cell) for cell in cells)):
        label = {v: i for i, v in enumerate(itertools.chain.from_iterable(perms))}
        form = tuple(sorted(tuple(sorted(label[v] for v in e)) for e in edges))
        if best is None or form < best:
            best = form
    return best if best is not None else ()


def _jsubsets(edge: Sequence[int], j: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(edge, j))


def enumerate_well_constructed(
    k: int, j: int, max_jsize: int, vertex_budget: int = 10
) -> list[WellConstructedCount]:
    """Isomorphism classes of well-constructed k-graphs, by j-size, up to ``max_jsize``.

    A well-constructed hypergraph grows from one j-set; every new edge contains
    an already covered j-set and at least one uncovered one. Each edge adds at
    least one j-set, so j-size ``s`` needs at most ``s - C(k,j) + 1`` edges and
    at most ``j + (k-j) * edges`` vertices; that vertex count must fit the budget.
    """
    Params(k, k, j)  # validates k and j
    per_edge = binom(k, j)
    max_edges = max(0, max_jsize - per_edge + 1)
    if j + (k - j) * max_edges > vertex_budget:
        raise ResourceLimitError(
            f"j-size {max_jsize} may need {j + (k - j) * max_edges} vertices, "
            f"above the budget of {vertex_budget}"
        )
    counts: dict[int, int] = {}
    if max_jsize < per_edge:
        return []
    first = tuple(range(k))
    seen = {canonical_form([first])}
    frontier = [[first]]
    counts[per_edge] = 1
    while frontier:
        nxt = []
        for edges in frontier:
            covered = {J for e in edges for J in _jsubsets(e, j)}
            v = max(max(e) for e in edges) + 1
            for t in range(k - j + 1):
                new = tuple(range(v, v + t))
                for old in itertools.combinations(range(v), k - t):
                    edge = old + new
                    subs = _jsubsets(edge, j)
                    fresh = sum(J not in covered for J in subs)
                    if fresh == 0 or fresh == len(subs):
                        continue
                    jsize = len(covered) + fresh
                    if jsize > max_jsize:
                        continue
                    grown = edges + [edge]
                    form = canonical_form(grown)
                    if form in seen:
                        continue
                    seen.add(form)
                    counts[jsize] = counts.get(jsize, 0) + 1
                    nxt.append(grown)
        frontier = nxt
    return [WellConstructedCount(k, j, s, counts[s]) for s in sorted(counts)]


# --- supercritical component -----------------------------------------------


@dataclass(frozen=True)
class SupercriticalReport:
    params: Params
    seed: int
    epsilon: float
    p_star: float
    edges: int
    largest_jsize: int
    coverage_min: int
    coverage_max: int
    coverage_mean: float


def p_star(params: Params, epsilon: float) -> float:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon={epsilon} must lie strictly between 0 and 1")
    p = (1 + epsilon) / ((params.jsets_per_edge - 1) * binom(params.n, params.k - params.j))
    return check_probability(p)


def supercritical_component(
    params: Params, epsilon: float, seed: int, memcap: int | None = None
) -> SupercriticalReport:
    """Largest j-component of H(n, p*) and how its j-sets spread over (j-1)-sets."""
    p = p_star(params, epsilon)
    ranks = binomial_ranks(params, p, make_rng(seed)).tolist()
    tracker = ComponentTracker(params, memcap)
    table = _edge_table(params, memcap)
    for r in ranks:
        if table is not None:
            tracker.insert_jsets(table[r])
        else:
            tracker.insert_edge(_unrank(params, r))
    largest = tracker.largest_component()
    n, j = params.n, params.j
    if j == 1:
        # the only 0-set is the empty set, lying in every j-set
        coverage = np.array([len(largest)])
    else:
        members = all_subsets_array(n, j)[np.array(largest, dtype=np.int64).reshape(-1)]
        coverage = np.zeros(binom(n, j - 1), dtype=np.int64)
        for drop in range(j):
            keep = [q for q in range(j) if q != drop]
            coverage += np.bincount(rank_rows(members[:, keep]), minlength=coverage.size)
    return SupercriticalReport(
        params, seed, epsilon, p, len(ranks), len(largest),
        int(coverage.min()), int(coverage.max()), float(coverage.mean()),
    )


# --- tracker versus oracle -------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    checked: int
    mismatch: str | None = None


def random_instance(rng: np.random.Generator, max_n: int, seed: int) -> Hypergraph:
    """k in {3,4}, any valid j, n in [k, max_n], M uniform in [0, C(n,k)]."""
    k = int(rng.integers(3, 5))
    if max_n < k:
        k = 3
    if max_n < k:
        raise ValueError(f"max_n={max_n} is below the smallest edge size 3")
    j = int(rng.integers(1, k))
    n = int(rng.integers(k, max_n + 1))
    params = Params(n, k, j)
    M = int(rng.integers(0, params.n_edges + 1))
    return sample_uniform(params, M, seed)


def oracle_check(instances: int, max_n: int, seed: int) -> OracleResult:
    """Compare tracker partitions with :func:`bfs_j_components`; stop at the first mismatch."""
    if instances < 1:
        raise ValueError("instances must be >= 1")
    rng = make_rng(seed)
    for i in range(instances):
        h = random_instance(rng, max_n, seed + i)
        got = tracker_from(h).component_partition()
        want = bfs_j_components(h)
        if got != want:
            detail = (
                "# hypergraph\n" + h.to_text()
                + "# tracker\n" + dump_partition(got)
                + "# oracle\n" + dump_partition(want)
            )
            return OracleResult(i + 1, detail)
    return OracleResult(instances)
