"""Contiguous and fixed-skip n-gram counting over per-movement sequences.

Sequences are lists of hashable, orderable symbols (normally
:class:`~tonalgrams.encoding.Csdc`). Tokens never cross movement
boundaries.

For ``n >= 3`` the skip budget ``t`` is a *total* across all gaps of a
token: indices ``i1 < ... < in`` qualify when ``(in - i1) - (n - 1) <= t``.
For bigrams this is simply ``gap <= t``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Sequence

DEFAULT_T_MAX = 10


@dataclass
class CountTable:
    counts: Counter
    n: int
    skips: int = 0  # 0 means contiguous; otherwise tokens within <= skips
    corpus_id: str = ""

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def ranked(self) -> list[tuple[tuple, int]]:
        """Entries sorted by count descending, then by type."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def merge(self, other: "CountTable") -> "CountTable":
        if (other.n, other.skips) != (self.n, self.skips):
            raise ValueError("cannot merge tables with different n or skip policy")
        return CountTable(self.counts + other.counts, self.n, self.skips, self.corpus_id)


def enumerate_skipgrams(sequence: Sequence[Hashable], n: int, t: int) -> Iterator[tuple[tuple, tuple[int, ...]]]:
    """Yield ``(type, indices)`` for every n-gram token within a total skip budget ``t``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    k = len(sequence)
    span = n - 1 + t  # max distance between first and last member
    for i in range(k - n + 1):
        last = min(k - 1, i + span)
        if n == 1:
            yield (sequence[i],), (i,)
            continue
        # choose the interior and final indices from the window after i
        for rest in combinations(range(i + 1, last + 1), n - 1):
            idx = (i,) + rest
            yield tuple(sequence[j] for j in idx), idx


def count_skipgrams(sequences: Iterable[Sequence[Hashable]], n: int, t: int, corpus_id: str = "") -> CountTable:
    counts: Counter = Counter()
    if n == 2:
        # fast path; same tokens as enumerate_skipgrams
        for seq in sequences:
            k = len(seq)
            for i in range(k - 1):
                first = seq[i]
                for j in range(i + 1, min(k, i + t + 2)):
                    counts[(first, seq[j])] += 1
    else:
        for seq in sequences:
            counts.update(typ for typ, _ in enumerate_skipgrams(seq, n, t))
    return CountTable(counts, n, t, corpus_id)


def count_contiguous(sequences: Iterable[Sequence[Hashable]], n: int, corpus_id: str = "") -> CountTable:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    counts: Counter = Counter()
    for seq in sequences:
        for i in range(len(seq) - n + 1):
            counts[tuple(seq[i:i + n])] += 1
    return CountTable(counts, n, 0, corpus_id)


def contiguous_token_total(lengths: Iterable[int], n: int) -> int:
    """Closed form: sum over movements of ``max(k - n + 1, 0)``."""
    return sum(max(k - n + 1, 0) for k in lengths)


def combination_bound(k: int, n: int) -> int:
    """Number of ways to choose ``n`` of ``k`` events (0 when ``n > k``)."""
    if k < 0 or n < 0:
        raise ValueError("k and n must be non-negative")
    return math.comb(k, n)


def skip_count_vectors(sequences: Iterable[Sequence[Hashable]], t_max: int = DEFAULT_T_MAX) -> dict[tuple, list[int]]:
    """Per bigram type, counts of tokens with *exactly* ``t`` intervening events, t = 0..t_max."""
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    vectors: dict[tuple, list[int]] = {}
    for seq in sequences:
        k = len(seq)
        for i in range(k - 1):
            first = seq[i]
            for j in range(i + 1, min(k, i + t_max + 2)):
                typ = (first, seq[j])
                vec = vectors.get(typ)
                if vec is None:
                    vec = vectors[typ] = [0] * (t_max + 1)
                vec[j - i - 1] += 1
    return dict(sorted(vectors.items()))


def merge_skip_vectors(parts: Iterable[dict[tuple, list[int]]]) -> dict[tuple, list[int]]:
    merged: dict[tuple, list[int]] = {}
    for part in parts:
        for typ, vec in part.items():
            cur = merged.get(typ)
            if cur is None:
                merged[typ] = list(vec)
            else:
                if len(cur) != len(vec):
                    raise ValueError("skip vectors disagree on t_max")
                for s, c in enumerate(vec):
                    cur[s] += c
    return dict(sorted(merged.items()))


def cumulative(vector: Sequence[int]) -> list[int]:
    """Tokens within ``<= t`` skips, from exact-skip counts."""
    out, run = [], 0
    for c in vector:
        run += c
        out.append(run)
    return out


def skip_token_total(lengths: Iterable[int], t_max: int) -> int:
    """Closed form for all bigram tokens with ``<= t_max`` skips."""
    return sum(max(k - 1 - t, 0) for k in lengths for t in range(t_max + 1))
