"""Chromatic scale degrees and scale-degree combinations (csdc).

A csdc is a bass degree plus up to three distinct upper degrees, sorted
ascending, with absent slots shown as ``_``. Doublings and permutations of
the upper voices collapse onto one token, so ``(0, 4, 4, 7)`` and
``(0, 7, 4, 0)`` (bottom to top) both become ``0,4,7,_``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Optional

from .corpus import KeySegment, Movement, Slice, full_expansion

UNDEFINED = None
UNDEFINED_TEXT = "_"
MAX_UPPERS = 3
# sort position of the undefined symbol: after every defined degree
_UNDEF_RANK = 12


class CapacityError(ValueError):
    """A slice has more distinct scale degrees than a csdc can hold."""


def map_to_csd(pitch: int, tonic: int) -> int:
    """Chromatic scale degree of ``pitch`` relative to ``tonic`` (0 = tonic, 7 = dominant)."""
    if not 0 <= tonic <= 11:
        raise ValueError(f"tonic must be in 0..11, got {tonic}")
    return (pitch % 12 - tonic) % 12


@functools.total_ordering
@dataclass(frozen=True)
class Csdc:
    bass: int
    uppers: tuple[int, ...] = ()

    def __post_init__(self):
        if self.bass is None or not 0 <= self.bass <= 11:
            raise ValueError(f"bass must be a defined degree in 0..11, got {self.bass!r}")
        up = self.uppers
        if len(up) > MAX_UPPERS:
            raise CapacityError(f"at most {MAX_UPPERS} upper degrees, got {len(up)}")
        if any(not 0 <= u <= 11 for u in up):
            raise ValueError(f"upper degrees must be in 0..11, got {up}")
        if any(a >= b for a, b in zip(up, up[1:])):
            raise ValueError(f"upper degrees must be strictly ascending, got {up}")
        if self.bass in up:
            raise ValueError(f"upper degrees may not double the bass, got {self}")

    @classmethod
    def from_slots(cls, slots) -> "Csdc":
        """Build from a 4-slot ``(bass, u1, u2, u3)`` tuple with ``None`` for undefined."""
        if len(slots) != 1 + MAX_UPPERS:
            raise ValueError(f"expected {1 + MAX_UPPERS} slots, got {len(slots)}")
        bass, *rest = slots
        defined = [u for u in rest if u is not UNDEFINED]
        if any(u is UNDEFINED for u in rest[: len(defined)]):
            raise ValueError("undefined slots must follow all defined slots")
        return cls(bass, tuple(defined))

    @property
    def slots(self) -> tuple[Optional[int], ...]:
        return (self.bass,) + self.uppers + (UNDEFINED,) * (MAX_UPPERS - len(self.uppers))

    @property
    def degrees(self) -> frozenset:
        return frozenset((self.bass,) + self.uppers)

    @property
    def distinct_count(self) -> int:
        return 1 + len(self.uppers)

    def sort_key(self) -> tuple[int, ...]:
        return tuple(_UNDEF_RANK if s is UNDEFINED else s for s in self.slots)

    def __lt__(self, other):
        if not isinstance(other, Csdc):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return ",".join(UNDEFINED_TEXT if s is UNDEFINED else str(s) for s in self.slots)


def parse_csdc(text: str) -> Csdc:
    """Inverse of ``str(csdc)``; accepts ``⊥`` as well as ``_``."""
    parts = [p.strip() for p in text.strip().strip("<>⟨⟩").split(",")]
    slots = [UNDEFINED if p in (UNDEFINED_TEXT, "⊥") else int(p) for p in parts]
    return Csdc.from_slots(slots)


def csdc_from_degrees(bass: int, uppers: Iterable[int]) -> Csdc:
    """Canonicalize: drop doublings of the bass and of each other, sort."""
    rest = sorted(set(uppers) - {bass})
    if len(rest) > MAX_UPPERS:
        raise CapacityError(
            f"{len(rest) + 1} distinct scale degrees sound together; a csdc holds at most {MAX_UPPERS + 1}"
        )
    return Csdc(bass, tuple(rest))


def build_csdc(slice_: Slice, key: KeySegment) -> Csdc:
    """Encode a slice relative to ``key``. The lowest sounding pitch is the bass."""
    if not slice_.sounding:
        raise ValueError(f"empty slice at onset {slice_.onset}")
    pitches = [p for _, p in slice_.sounding]
    low = min(pitches)
    degrees = [map_to_csd(p, key.tonic) for p in pitches]
    try:
        return csdc_from_degrees(map_to_csd(low, key.tonic), degrees)
    except CapacityError as exc:
        raise CapacityError(f"onset {slice_.onset}: {exc}") from None


def enumerate_vocabulary() -> Iterator[Csdc]:
    """Every canonical csdc, in sort order."""
    vocab = []
    for bass in range(12):
        others = [d for d in range(12) if d != bass]
        for j in range(MAX_UPPERS + 1):
            vocab.extend(Csdc(bass, ups) for ups in combinations(others, j))
    yield from sorted(vocab)


def csdc_vocabulary_bound() -> int:
    """Number of canonical csdc values: 12 basses times the upper subsets of size 0..3."""
    return 12 * sum(math.comb(11, j) for j in range(MAX_UPPERS + 1))


def raw_vocabulary_bound(parts: int = 4) -> int:
    """Unconstrained bound: each part is one of 12 degrees or undefined."""
    return 13 ** parts


@dataclass(frozen=True)
class ChordEvent:
    csdc: Csdc
    onset: Fraction
    duration: Fraction
    mode: str
    in_pivot: bool
    movement_id: str
    tonic: int = 0

    @property
    def distinct_degree_count(self) -> int:
        return self.csdc.distinct_count


def encode_movement(movement: Movement) -> list[ChordEvent]:
    events = []
    for sl in full_expansion(movement):
        key = movement.key_at(sl.onset)
        events.append(ChordEvent(
            csdc=build_csdc(sl, key),
            onset=sl.onset,
            duration=sl.duration,
            mode=key.mode,
            in_pivot=movement.in_pivot(sl.onset),
            movement_id=movement.id,
            tonic=key.tonic,
        ))
    return events


def unigram_distribution(
    events: Iterable[ChordEvent],
    mode: str | None = None,
    min_distinct: int = 1,
    weight: str = "duration",
    exclude_pivots: bool = False,
) -> dict[Csdc, float]:
    """Proportion of each csdc among the retained events.

    ``mode`` keeps only events in that mode (``None`` keeps all).
    ``weight`` is ``"duration"`` (rhythmic duration) or ``"count"``.
    Returns an empty dict when nothing survives the filters.
    """
    if not 1 <= min_distinct <= MAX_UPPERS + 1:
        raise ValueError(f"min_distinct must be in 1..{MAX_UPPERS + 1}, got {min_distinct}")
    if weight not in ("duration", "count"):
        raise ValueError(f"weight must be 'duration' or 'count', got {weight!r}")
    totals: dict[Csdc, Fraction] = {}
    for ev in events:
        if mode is not None and ev.mode != mode:
            continue
        if ev.distinct_degree_count < min_distinct:
            continue
        if exclude_pivots and ev.in_pivot:
            continue
        w = ev.duration if weight == "duration" else Fraction(1)
        totals[ev.csdc] = totals.get(ev.csdc, Fraction(0)) + w
    grand = sum(totals.values(), Fraction(0))
    if grand == 0:
        return {}
    return {c: float(v / grand) for c, v in sorted(totals.items())}
