"""Note-event and key-annotation ingestion, plus full expansion into slices.

Note files are tab-separated with a required ``#parts=<n>`` header::

    #parts=4
    # onset_num onset_den dur_num dur_den pitch part
    0	1	1	1	48	0
    0	1	1	2	64	1

Key files list one segment per row::

    # start_num start_den end_num end_den tonic mode pivot
    0	1	16	1	0	major	0

A compact form is also accepted where each rational occupies a single
column (``3/2`` or ``2``), i.e. ``onset dur pitch part`` and
``start end tonic mode pivot``. Serialization always writes the
canonical six/seven column form.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import BinaryIO, Iterable, Union

MODES = ("major", "minor")

Source = Union[bytes, str, BinaryIO, io.TextIOBase]


class CorpusError(ValueError):
    """Base class for ingestion failures."""


class ParseError(CorpusError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class CoverageError(CorpusError):
    """A note onset is not covered by any (non-pivot) key segment."""


class AnnotationError(CorpusError):
    """Key segments are inconsistent (e.g. overlapping non-pivot spans)."""


@dataclass(frozen=True, order=True)
class NoteEvent:
    onset: Fraction
    part: int
    pitch: int
    duration: Fraction

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"note duration must be > 0, got {self.duration}")
        if self.onset < 0:
            raise ValueError(f"note onset must be >= 0, got {self.onset}")

    @property
    def offset(self) -> Fraction:
        return self.onset + self.duration


@dataclass(frozen=True)
class KeySegment:
    start: Fraction
    end: Fraction
    tonic: int
    mode: str
    is_pivot: bool = False

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"key segment start {self.start} must precede end {self.end}")
        if not 0 <= self.tonic <= 11:
            raise ValueError(f"tonic must be in 0..11, got {self.tonic}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def covers(self, onset: Fraction) -> bool:
        return self.start <= onset < self.end


@dataclass(frozen=True)
class Movement:
    id: str
    part_count: int
    notes: tuple[NoteEvent, ...]
    keys: tuple[KeySegment, ...]

    def key_at(self, onset: Fraction) -> KeySegment:
        """The non-pivot segment governing ``onset``."""
        for seg in self.keys:
            if not seg.is_pivot and seg.covers(onset):
                return seg
        raise CoverageError(f"{self.id}: onset {onset} lies outside every key segment")

    def in_pivot(self, onset: Fraction) -> bool:
        return any(seg.is_pivot and seg.covers(onset) for seg in self.keys)


@dataclass(frozen=True)
class Slice:
    onset: Fraction
    duration: Fraction
    sounding: tuple[tuple[int, int], ...]  # (part, pitch), sorted


def _read_text(src: Source) -> str:
    if isinstance(src, bytes):
        return src.decode("utf-8")
    if isinstance(src, str):
        return src
    data = src.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _rational(num: str, den: str) -> Fraction:
    d = int(den)
    if d <= 0:
        raise ValueError(f"denominator must be positive, got {d}")
    return Fraction(int(num), d)


def _compact_rational(tok: str) -> Fraction:
    if "/" in tok:
        num, den = tok.split("/", 1)
        return _rational(num, den)
    return Fraction(int(tok))


def _rows(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _parse_parts_header(text: str, source: str | None) -> int:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip().replace(" ", "")
        if line.startswith("#parts="):
            try:
                n = int(line[len("#parts="):])
            except ValueError:
                raise ParseError(f"bad parts header {raw.strip()!r}", lineno, source) from None
            if n < 1:
                raise ParseError("part count must be >= 1", lineno, source)
            return n
    raise ParseError("missing '#parts=<n>' header", None, source)


def parse_notes(src: Source, source: str | None = None) -> tuple[int, list[NoteEvent]]:
    text = _read_text(src)
    parts = _parse_parts_header(text, source)
    notes = []
    for lineno, cols in _rows(text):
        try:
            if len(cols) == 6:
                onset = _rational(cols[0], cols[1])
                dur = _rational(cols[2], cols[3])
                pitch, part = int(cols[4]), int(cols[5])
            elif len(cols) == 4:
                onset = _compact_rational(cols[0])
                dur = _compact_rational(cols[1])
                pitch, part = int(cols[2]), int(cols[3])
            else:
                raise ValueError(f"expected 6 columns (or 4 in compact form), got {len(cols)}")
            if not 0 <= part < parts:
                raise ValueError(f"part {part} outside declared range 0..{parts - 1}")
            notes.append(NoteEvent(onset=onset, part=part, pitch=pitch, duration=dur))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno, source) from None
    return parts, notes


def parse_keys(src: Source, source: str | None = None) -> list[KeySegment]:
    text = _read_text(src)
    segs = []
    for lineno, cols in _rows(text):
        try:
            if len(cols) == 7:
                start = _rational(cols[0], cols[1])
                end = _rational(cols[2], cols[3])
                rest = cols[4:]
            elif len(cols) == 5:
                start = _compact_rational(cols[0])
                end = _compact_rational(cols[1])
                rest = cols[2:]
            else:
                raise ValueError(f"expected 7 columns (or 5 in compact form), got {len(cols)}")
            tonic, mode, pivot = int(rest[0]), rest[1], rest[2]
            if pivot not in ("0", "1"):
                raise ValueError(f"pivot flag must be 0 or 1, got {pivot!r}")
            segs.append(KeySegment(start, end, tonic, mode, pivot == "1"))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno, source) from None
    return segs


def validate_keys(keys: Iterable[KeySegment], notes: Iterable[NoteEvent], movement_id: str = "") -> None:
    plain = sorted((k for k in keys if not k.is_pivot), key=lambda k: (k.start, k.end))
    if not plain:
        raise AnnotationError(f"{movement_id}: no non-pivot key segment")
    for prev, cur in zip(plain, plain[1:]):
        if cur.start < prev.end:
            raise AnnotationError(
                f"{movement_id}: non-pivot key segments overlap "
                f"([{prev.start}, {prev.end}) and [{cur.start}, {cur.end}))"
            )
    for note in notes:
        if not any(k.covers(note.onset) for k in plain):
            raise CoverageError(f"{movement_id}: note onset {note.onset} lies outside every key segment")


def make_movement(movement_id: str, part_count: int, notes: Iterable[NoteEvent],
                  keys: Iterable[KeySegment]) -> Movement:
    notes = tuple(sorted(notes))
    keys = tuple(sorted(keys, key=lambda k: (k.start, k.is_pivot, k.end)))
    for n in notes:
        if not 0 <= n.part < part_count:
            raise CorpusError(f"{movement_id}: part {n.part} outside declared range")
    validate_keys(keys, notes, movement_id)
    return Movement(movement_id, part_count, notes, keys)


def parse_movement(note_file: Source, key_file: Source, movement_id: str = "movement") -> Movement:
    """Parse a note file and a key file into a validated :class:`Movement`."""
    parts, notes = parse_notes(note_file, source=f"{movement_id} notes")
    keys = parse_keys(key_file, source=f"{movement_id} keys")
    return make_movement(movement_id, parts, notes, keys)


def serialize_notes(movement: Movement) -> str:
    out = [f"#parts={movement.part_count}", "# onset_num\tonset_den\tdur_num\tdur_den\tpitch\tpart"]
    for n in movement.notes:
        out.append(
            f"{n.onset.numerator}\t{n.onset.denominator}\t"
            f"{n.duration.numerator}\t{n.duration.denominator}\t{n.pitch}\t{n.part}"
        )
    return "\n".join(out) + "\n"


def serialize_keys(movement: Movement) -> str:
    out = ["# start_num\tstart_den\tend_num\tend_den\ttonic\tmode\tpivot"]
    for k in movement.keys:
        out.append(
            f"{k.start.numerator}\t{k.start.denominator}\t{k.end.numerator}\t{k.end.denominator}\t"
            f"{k.tonic}\t{k.mode}\t{int(k.is_pivot)}"
        )
    return "\n".join(out) + "\n"


def write_movement(movement: Movement, note_path: Path, key_path: Path) -> None:
    Path(note_path).write_text(serialize_notes(movement), encoding="utf-8")
    Path(key_path).write_text(serialize_keys(movement), encoding="utf-8")


def full_expansion(movement: Movement) -> list[Slice]:
    """One slice per distinct onset; held notes are repeated in every slice they span.

    A slice lasts until the next onset. The final slice lasts until the
    latest note offset. Silence between notes is absorbed into the
    preceding slice, so slice durations always tile the span from the
    first onset to the last offset.
    """
    notes = movement.notes
    if not notes:
        return []
    onsets = sorted({n.onset for n in notes})
    end = max(n.offset for n in notes)
    # notes are sorted by onset; sweep with an active list
    slices = []
    active: list[NoteEvent] = []
    i = 0
    for j, onset in enumerate(onsets):
        while i < len(notes) and notes[i].onset == onset:
            active.append(notes[i])
            i += 1
        active = [n for n in active if n.offset > onset]
        nxt = onsets[j + 1] if j + 1 < len(onsets) else end
        sounding = tuple(sorted((n.part, n.pitch) for n in active))
        slices.append(Slice(onset, nxt - onset, sounding))
    return slices


def read_manifest(path: Path) -> list[tuple[str, Path, Path]]:
    """Return ``(movement_id, note_path, key_path)`` triples.

    Each non-comment line holds a note path and a key path separated by
    whitespace; relative paths resolve against the manifest's directory.
    The movement id is the note file name up to its first dot.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"manifest not found: {path}")
    base = path.parent
    entries = []
    for lineno, cols in _rows(path.read_text(encoding="utf-8")):
        if len(cols) != 2:
            raise ParseError("expected '<note file> <key file>'", lineno, str(path))
        notes, keys = (Path(c) if Path(c).is_absolute() else base / c for c in cols)
        entries.append((notes.name.split(".")[0], notes, keys))
    ids = [e[0] for e in entries]
    if len(set(ids)) != len(ids):
        raise ParseError("duplicate movement ids in manifest", None, str(path))
    return entries


def load_movement(movement_id: str, note_path: Path, key_path: Path) -> Movement:
    for p in (note_path, key_path):
        if not Path(p).is_file():
            raise CorpusError(f"{movement_id}: file not found: {p}")
    return parse_movement(Path(note_path).read_bytes(), Path(key_path).read_bytes(), movement_id)


def load_corpus(manifest: Path) -> list[Movement]:
    return [load_movement(*entry) for entry in read_manifest(manifest)]
