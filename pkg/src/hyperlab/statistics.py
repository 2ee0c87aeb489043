"""Closed forms for degree counts near the connectivity threshold, and pmf tools.

Logarithms are natural throughout. Products like ``(1-p)^C(n-j,k-j)`` are
accumulated as ``exp(sum of logs)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .combinatorics import binom
from .model import Params

MAX_DEGREE = 64
NORMALIZATION_TOL = 1e-9
# two-sided 95% standard normal quantile
Z95 = 1.959963984540054


@dataclass(frozen=True)
class CnParameterization:
    """Target degree ``s`` and additive shift ``c`` of the edge probability."""

    s: int
    c: float

    def __post_init__(self):
        if not 0 <= self.s <= MAX_DEGREE:
            raise ValueError(f"degree s={self.s} outside [0, {MAX_DEGREE}]")


@dataclass(frozen=True)
class Pmf:
    """Probabilities for 0..len(weights)-1 plus the mass lying beyond the last index."""

    weights: tuple[float, ...]
    tail: float = 0.0

    @property
    def total(self) -> float:
        return math.fsum(self.weights) + self.tail

    def check(self) -> "Pmf":
        if any(w < 0 for w in self.weights) or self.tail < 0:
            raise ValueError("pmf has negative mass")
        if abs(self.total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"pmf is not normalized (total mass {self.total!r})")
        return self

    def __getitem__(self, i: int) -> float:
        return self.weights[i] if 0 <= i < len(self.weights) else 0.0


def p_from_c(params: Params, cp: CnParameterization) -> float:
    n, k, j = params.n, params.k, params.j
    numer = j * math.log(n) + cp.s * math.log(math.log(n)) + cp.c
    p = numer / binom(n, k - j)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"c={cp.c} gives edge probability {p:.6g} outside [0, 1]")
    return p


def p_threshold(params: Params) -> float:
    return p_from_c(params, CnParameterization(0, 0.0))


def exact_expected_ds(params: Params, p: float, s: int) -> float:
    """E(D_s) under H^k(n,p): C(n,j) * C(D,s) * p^s * (1-p)^(D-s), D = C(n-j,k-j)."""
    n, k, j = params.n, params.k, params.j
    d = binom(n - j, k - j)
    if not 0 <= s <= d:
        raise ValueError(f"degree s={s} outside [0, C(n-j,k-j)] = [0, {d}]")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    # exact zeros, where a log would be -inf
    if p == 0.0:
        return float(binom(n, j)) if s == 0 else 0.0
    if p == 1.0:
        return float(binom(n, j)) if s == d else 0.0
    log_e = (
        math.log(binom(n, j))
        + math.log(math.comb(d, s))
        + s * math.log(p)
        + (d - s) * math.log1p(-p)
    )
    return math.exp(log_e)


def limiting_lambda(j: int, s: int, c: float) -> float:
    return j**s * math.exp(-c) / (math.factorial(j) * math.factorial(s))


def poisson_pmf(lam: float, i: int) -> float:
    if lam < 0 or i < 0:
        raise ValueError("poisson_pmf needs lam >= 0 and i >= 0")
    if lam == 0:
        return 1.0 if i == 0 else 0.0
    return math.exp(-lam + i * math.log(lam) - math.lgamma(i + 1))


def poisson(lam: float, upto: int) -> Pmf:
    """Po(lam) on 0..upto with the exact remaining tail mass."""
    weights = tuple(poisson_pmf(lam, i) for i in range(upto + 1))
    return Pmf(weights, max(0.0, 1.0 - math.fsum(weights)))


def empirical_pmf(samples: Iterable[int]) -> Pmf:
    counts = Counter(int(x) for x in samples)
    if not counts:
        raise ValueError("empirical_pmf needs at least one sample")
    if min(counts) < 0:
        raise ValueError("samples must be non-negative integers")
    total = sum(counts.values())
    return Pmf(tuple(counts.get(i, 0) / total for i in range(max(counts) + 1)))


def tv_distance(a: Pmf, b: Pmf) -> float:
    """Half the L1 distance; the two tails are compared as one lumped cell.

    A pmf with tail mass may only be compared against a pmf whose listed
    support is no longer than its own, since its tail spreads over unknown
    indices.
    """
    a.check()
    b.check()
    width = max(len(a.weights), len(b.weights))
    for x in (a, b):
        if x.tail > 0 and len(x.weights) < width:
            raise ValueError("cannot compare: a truncated pmf is shorter than the other support")
    diff = math.fsum(abs(a[i] - b[i]) for i in range(width)) + abs(a.tail - b.tail)
    return min(1.0, 0.5 * diff)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("wilson_interval needs trials >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # clamp so the interval always contains the point estimate despite rounding
    return min(phat, max(0.0, centre - half)), max(phat, min(1.0, centre + half))


def mean_and_stderr(xs: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    mean = math.fsum(xs) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)
