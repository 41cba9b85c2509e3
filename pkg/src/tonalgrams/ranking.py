"""Bigram filtering and ranking by count or by cubic trend across skips."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .encoding import Csdc
from .ngrams import CountTable

CRITERIA = ("monophony", "polyphony", "identity", "similarity")


@dataclass(frozen=True)
class ExclusionReport:
    chords: tuple[Csdc, Csdc]
    triggered: frozenset

    @property
    def excluded(self) -> bool:
        return bool(self.triggered)

    def flags_text(self) -> str:
        return "|".join(c for c in CRITERIA if c in self.triggered)


def exclusion_flags(a: Csdc, b: Csdc) -> ExclusionReport:
    """Which of the four exclusion criteria the progression ``a -> b`` meets.

    monophony: either chord has a single distinct degree.
    polyphony: neither chord has three or more distinct degrees.
    identity: both chords use the same set of degrees.
    similarity: same bass, and one upper set contains the other.
    """
    hit = set()
    if a.distinct_count == 1 or b.distinct_count == 1:
        hit.add("monophony")
    if a.distinct_count < 3 and b.distinct_count < 3:
        hit.add("polyphony")
    if a.degrees == b.degrees:
        hit.add("identity")
    if a.bass == b.bass:
        ua, ub = set(a.uppers), set(b.uppers)
        if ua <= ub or ub <= ua:
            hit.add("similarity")
    return ExclusionReport((a, b), frozenset(hit))


def is_excluded(typ: tuple) -> bool:
    return exclusion_flags(*typ).excluded


def rank_by_count(table: CountTable, apply_exclusion: bool = False) -> list[tuple[tuple, int]]:
    if table.n != 2:
        raise ValueError(f"expected a bigram table, got n={table.n}")
    return [(typ, c) for typ, c in table.ranked() if not (apply_exclusion and is_excluded(typ))]


def exclusion_summary(types: Iterable[tuple]) -> dict[str, float]:
    """Fractions of bigram types excluded and retained (both, since either may be meant)."""
    types = list(types)
    n_ex = sum(is_excluded(t) for t in types)
    total = len(types)
    return {
        "types": total,
        "excluded": n_ex,
        "excluded_fraction": n_ex / total if total else 0.0,
        "retained_fraction": (total - n_ex) / total if total else 0.0,
    }


@dataclass(frozen=True)
class CubicFit:
    beta3: float
    beta2: float
    beta1: float
    beta0: float
    residual_norm: float

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.beta3, self.beta2, self.beta1, self.beta0)

    def __call__(self, t: float) -> float:
        return ((self.beta3 * t + self.beta2) * t + self.beta1) * t + self.beta0


def _solve(mat: list[list[float]], rhs: list[float]) -> list[float]:
    """Gaussian elimination with partial pivoting."""
    n = len(rhs)
    a = [row[:] + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0.0:
            raise ValueError("singular normal equations")
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n + 1):
                    a[r][c] -= f * a[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / a[r][r]
    return x


def fit_cubic(counts: Sequence[float]) -> CubicFit:
    """Least-squares cubic through ``(t, counts[t])`` for t = 0..len-1.

    The normal equations are solved in the centred, scaled variable
    ``u = (t - c) / h`` (c = h = t_max / 2), which keeps them well
    conditioned, and the result is expanded back into powers of ``t``.
    """
    m = len(counts)
    if m < 4:
        raise ValueError(f"cubic fit is underdetermined with {m} points (need t_max >= 3)")
    c = h = (m - 1) / 2.0
    us = [(t - c) / h for t in range(m)]
    ys = [float(y) for y in counts]
    # moments sum u^p for p = 0..6
    mom = [sum(u ** p for u in us) for p in range(7)]
    gram = [[mom[i + j] for j in range(4)] for i in range(4)]
    rhs = [sum(y * u ** i for u, y in zip(us, ys)) for i in range(4)]
    g0, g1, g2, g3 = _solve(gram, rhs)  # y = g0 + g1 u + g2 u^2 + g3 u^3
    # expand u = (t - c) / h into powers of t
    b3 = g3 / h ** 3
    b2 = g2 / h ** 2 - 3 * g3 * c / h ** 3
    b1 = g1 / h - 2 * g2 * c / h ** 2 + 3 * g3 * c ** 2 / h ** 3
    b0 = g0 - g1 * c / h + g2 * c ** 2 / h ** 2 - g3 * c ** 3 / h ** 3
    resid = sum((y - (g0 + g1 * u + g2 * u * u + g3 * u ** 3)) ** 2 for u, y in zip(us, ys)) ** 0.5
    return CubicFit(b3, b2, b1, b0, resid)


# beta3 values are compared after rounding so that float noise between
# theoretically equal trends cannot override the documented tie-break.
# For integer counts and t_max = 10 exact beta3 values are multiples of
# 1/5148, so rounding never merges distinct values.
_BETA_SORT_DIGITS = 10


def rank_by_beta3(vectors: Mapping[tuple, Sequence[int]], apply_exclusion: bool = False) -> list[tuple[tuple, CubicFit]]:
    """Bigram types ordered by descending leading cubic coefficient, ties by type."""
    lengths = {len(v) for v in vectors.values()}
    if len(lengths) > 1:
        raise ValueError(f"skip vectors have differing lengths {sorted(lengths)}")
    fits = [
        (typ, fit_cubic(vec)) for typ, vec in vectors.items()
        if not (apply_exclusion and is_excluded(typ))
    ]
    fits.sort(key=lambda tf: (-round(tf[1].beta3, _BETA_SORT_DIGITS), tf[0]))
    return fits


def rank_frequency_series(distribution: Mapping) -> list[tuple[int, float]]:
    """``(rank, frequency)`` pairs, most frequent first, ranks from 1."""
    if not distribution:
        raise ValueError("empty distribution")
    freqs = sorted(distribution.values(), reverse=True)
    return [(r, f) for r, f in enumerate(freqs, start=1)]
