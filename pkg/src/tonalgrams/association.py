"""Contingency tables, Fisher's exact test and directional asymmetry for bigrams.

Bigram tokens here are all ordered pairs within ``<= t_limit`` skips.
For a type ``(x, y)``:

    a = tokens x -> y         b = tokens x -> (not y)
    c = tokens (not x) -> y   d = all other tokens
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .ngrams import count_skipgrams

DEFAULT_T_LIMIT = 5
FISHER_SLACK = 1e-12
SUM_CONVENTIONS = ("received", "absolute", "attractor")


class UndefinedMeasureError(ValueError):
    """The requested statistic is undefined for the given table."""


@dataclass(frozen=True)
class ContingencyTable:
    a: int
    b: int
    c: int
    d: int
    t_limit: int = DEFAULT_T_LIMIT

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError(f"contingency cells must be non-negative: {self}")

    @property
    def row1(self) -> int:
        return self.a + self.b

    @property
    def row2(self) -> int:
        return self.c + self.d

    @property
    def col1(self) -> int:
        return self.a + self.c

    @property
    def col2(self) -> int:
        return self.b + self.d

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.a, self.c, self.b, self.d, self.t_limit)


class BigramMarginals:
    """Token counts for all bigram types plus first/second-member totals."""

    def __init__(self, sequences: Iterable[Sequence[Hashable]], t_limit: int = DEFAULT_T_LIMIT):
        if t_limit < 0:
            raise ValueError(f"t_limit must be >= 0, got {t_limit}")
        self.t_limit = t_limit
        self.pairs: Counter = count_skipgrams(sequences, 2, t_limit).counts
        self.first: Counter = Counter()
        self.second: Counter = Counter()
        for (x, y), n in self.pairs.items():
            self.first[x] += n
            self.second[y] += n
        self.total = sum(self.pairs.values())

    def table(self, chord1, chord2) -> ContingencyTable:
        a = self.pairs.get((chord1, chord2), 0)
        b = self.first.get(chord1, 0) - a
        c = self.second.get(chord2, 0) - a
        return ContingencyTable(a, b, c, self.total - a - b - c, self.t_limit)


def contingency(sequences: Iterable[Sequence[Hashable]], chord1, chord2, t_limit: int = DEFAULT_T_LIMIT) -> ContingencyTable:
    return BigramMarginals(sequences, t_limit).table(chord1, chord2)


@lru_cache(maxsize=None)
def _log_factorial(n: int) -> float:
    return math.lgamma(n + 1)


def _log_hypergeom(x: int, row1: int, col1: int, total: int) -> float:
    """log P(a = x) for fixed margins."""
    lf = _log_factorial
    return (lf(row1) + lf(total - row1) + lf(col1) + lf(total - col1) - lf(total)
            - lf(x) - lf(row1 - x) - lf(col1 - x) - lf(total - row1 - col1 + x))


def fisher_exact(table: ContingencyTable) -> float:
    """Two-sided p-value: total probability of tables with the observed
    margins that are no more likely than the observed one."""
    n = table.total
    if n == 0:
        raise UndefinedMeasureError("Fisher's exact test is undefined for an all-zero table")
    r1, c1 = table.row1, table.col1
    lo, hi = max(0, r1 + c1 - n), min(r1, c1)
    if lo == hi:
        return 1.0
    logp = [_log_hypergeom(x, r1, c1, n) for x in range(lo, hi + 1)]
    peak = max(logp)
    obs = logp[table.a - lo]
    # relative slack on probabilities, applied in log space
    cut = obs + math.log1p(FISHER_SLACK)
    num = sum(math.exp(lp - peak) for lp in logp if lp <= cut)
    den = sum(math.exp(lp - peak) for lp in logp)
    return min(1.0, num / den)


def asym(table: ContingencyTable) -> float:
    """P(chord2 | chord1) - P(chord1 | chord2) = a/(a+b) - a/(a+c).

    Positive: chord2 is the attractor. Negative: chord1 is.
    """
    if table.row1 == 0 or table.col1 == 0:
        raise UndefinedMeasureError(f"asym undefined: a+b={table.row1}, a+c={table.col1}")
    return table.a / table.row1 - table.a / table.col1


@dataclass(frozen=True)
class AttractorStats:
    unigram: Hashable
    n_attractor: int
    n_types: int
    sum_asym: float

    @property
    def pct_attractor(self) -> float:
        return 100.0 * self.n_attractor / self.n_types if self.n_types else 0.0


def bigram_asymmetries(marg: BigramMarginals) -> dict[tuple, float]:
    return {typ: asym(marg.table(*typ)) for typ in sorted(marg.pairs)}


def attractor_table(
    sequences: Iterable[Sequence[Hashable]],
    t_limit: int = DEFAULT_T_LIMIT,
    sum_convention: str = "received",
) -> list[AttractorStats]:
    """Per unigram type: how many bigram types it attracts, and summed asymmetry.

    The attractor of ``(x, y)`` is ``y`` when asym > 0 and ``x`` when
    asym < 0. A self-pair ``(x, x)`` counts once toward ``x``'s types and
    is attracted by ``x`` whenever asym != 0.

    ``sum_convention`` selects how asymmetries are summed per unigram:

    received   +asym when the unigram is chord2, -asym when chord1
               (a self-pair contributes 0)
    absolute   |asym| over every type containing the unigram
    attractor  |asym| over the types the unigram attracts
    """
    if sum_convention not in SUM_CONVENTIONS:
        raise ValueError(f"sum_convention must be one of {SUM_CONVENTIONS}")
    marg = sequences if isinstance(sequences, BigramMarginals) else BigramMarginals(sequences, t_limit)
    n_attr: Counter = Counter()
    n_types: Counter = Counter()
    sums: dict = {}
    for (x, y), value in bigram_asymmetries(marg).items():
        members = {x, y}
        for u in members:
            n_types[u] += 1
            sums.setdefault(u, 0.0)
        winner = y if value > 0 else x if value < 0 else None
        if winner is not None:
            n_attr[winner] += 1
        if sum_convention == "received":
            if x != y:
                sums[y] += value
                sums[x] -= value
        elif sum_convention == "absolute":
            for u in members:
                sums[u] += abs(value)
        elif winner is not None:
            sums[winner] += abs(value)
    stats = [AttractorStats(u, n_attr[u], n_types[u], sums[u]) for u in n_types]
    stats.sort(key=lambda s: (-s.n_attractor, -s.sum_asym, s.unigram))
    return stats
