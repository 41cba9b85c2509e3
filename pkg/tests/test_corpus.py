import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tonalgrams.corpus import (
    AnnotationError, CoverageError, KeySegment, NoteEvent, ParseError, full_expansion, make_movement,
    parse_movement, read_manifest, serialize_keys, serialize_notes,
)

from oracles import expansion_oracle

NOTES_ONE = b"#parts=4\n0\t1\t1\t1\t60\t0\n"
KEYS_ONE = b"0\t1\t4\t1\t0\tmajor\t0\n"


def test_minimal_movement():
    mv = parse_movement(NOTES_ONE, KEYS_ONE)
    assert len(mv.notes) == 1 and len(mv.keys) == 1
    assert mv.notes[0] == NoteEvent(onset=Fraction(0), part=0, pitch=60, duration=Fraction(1))
    assert mv.part_count == 4


def test_compact_columns():
    mv = parse_movement(b"#parts=1\n0 1 60 0\n3/2 1/2 62 0\n", b"0 4 0 major 0\n")
    assert [n.onset for n in mv.notes] == [0, Fraction(3, 2)]
    assert mv.keys[0].end == 4


def test_coverage_error():
    with pytest.raises(CoverageError):
        parse_movement(b"#parts=1\n10\t1\t1\t1\t60\t0\n", b"0\t1\t8\t1\t0\tmajor\t0\n")


def test_pivot_does_not_cover():
    with pytest.raises(CoverageError):
        parse_movement(b"#parts=1\n5 1 60 0\n", b"0 4 0 major 0\n4 6 7 major 1\n")


def test_overlapping_segments():
    keys = b"0 4 0 major 0\n3 8 7 major 0\n"
    with pytest.raises(AnnotationError):
        parse_movement(b"#parts=1\n0 1 60 0\n", keys)


def test_pivot_may_straddle_boundary():
    keys = b"0 4 0 major 0\n4 8 7 major 0\n3 5 7 major 1\n"
    mv = parse_movement(b"#parts=1\n0 1 60 0\n4 1 62 0\n", keys)
    assert mv.in_pivot(Fraction(4)) and not mv.in_pivot(Fraction(0))
    assert mv.key_at(Fraction(4)).tonic == 7


@pytest.mark.parametrize("notes, line", [
    (b"#parts=2\n0\t1\t1\t1\t60\n", 2),
    (b"#parts=2\n# c\n0\t1\t0\t1\t60\t0\n", 3),
    (b"#parts=2\n0\t1\t1\t1\t60\t5\n", 2),
    (b"#parts=2\n0\t1\t1\t0\t60\t0\n", 2),
    (b"#parts=2\n0\t1\t1\t1\tC4\t0\n", 2),
])
def test_parse_error_line_numbers(notes, line):
    with pytest.raises(ParseError) as exc:
        parse_movement(notes, KEYS_ONE)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_missing_header():
    with pytest.raises(ParseError, match="parts"):
        parse_movement(b"0\t1\t1\t1\t60\t0\n", KEYS_ONE)


def test_bad_mode_and_pivot():
    with pytest.raises(ParseError):
        parse_movement(NOTES_ONE, b"0 4 0 dorian 0\n")
    with pytest.raises(ParseError):
        parse_movement(NOTES_ONE, b"0 4 0 major 2\n")


def _random_movement(rng: random.Random, n_notes=20, parts=4):
    notes = []
    for _ in range(n_notes):
        onset = Fraction(rng.randrange(0, 24), rng.choice((1, 2, 3, 4)))
        dur = Fraction(rng.randrange(1, 8), rng.choice((1, 2, 4)))
        notes.append(NoteEvent(onset=onset, part=rng.randrange(parts), pitch=rng.randrange(36, 84), duration=dur))
    end = max(n.onset for n in notes) + 1
    mid = Fraction(rng.randrange(1, 12))
    keys = [KeySegment(Fraction(0), mid, rng.randrange(12), "major"),
            KeySegment(mid, max(end, mid + 1), rng.randrange(12), "minor")]
    return make_movement("r", parts, notes, keys)


def test_round_trip_random():
    rng = random.Random(7)
    for _ in range(200):
        mv = _random_movement(rng)
        again = parse_movement(serialize_notes(mv).encode(), serialize_keys(mv).encode(), "r")
        assert again == mv
        assert serialize_notes(again) == serialize_notes(mv)


def test_expansion_coincident():
    mv = parse_movement(b"#parts=2\n0 2 60 0\n0 2 64 1\n", b"0 4 0 major 0\n")
    slices = full_expansion(mv)
    assert len(slices) == 1
    assert slices[0].sounding == ((0, 60), (1, 64))
    assert slices[0].duration == 2


def test_expansion_overlap():
    mv = parse_movement(b"#parts=2\n0 2 60 0\n1 1 64 1\n", b"0 4 0 major 0\n")
    slices = full_expansion(mv)
    assert [s.onset for s in slices] == [0, 1]
    assert slices[0].sounding == ((0, 60),)
    assert slices[1].sounding == ((0, 60), (1, 64))
    assert [s.duration for s in slices] == [1, 1]


def test_expansion_gap_absorbed():
    mv = parse_movement(b"#parts=1\n0 1 60 0\n3 1 62 0\n", b"0 8 0 major 0\n")
    slices = full_expansion(mv)
    assert [s.duration for s in slices] == [3, 1]


def test_expansion_matches_interval_oracle():
    rng = random.Random(11)
    for _ in range(300):
        mv = _random_movement(rng)
        slices = full_expansion(mv)
        expected = expansion_oracle(mv.notes)
        assert len(slices) == len({n.onset for n in mv.notes})
        assert [(s.onset, list(s.sounding)) for s in slices] == expected
        assert all(s.duration > 0 and s.sounding for s in slices)
        assert all(a.onset < b.onset for a, b in zip(slices, slices[1:]))
        first = min(n.onset for n in mv.notes)
        last = max(n.offset for n in mv.notes)
        assert sum(s.duration for s in slices) == last - first


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(1, 6), st.integers(0, 127), st.integers(0, 3)),
                min_size=1, max_size=25))
def test_expansion_property(rows):
    notes = [NoteEvent(onset=Fraction(o, 2), part=p, pitch=pi, duration=Fraction(d, 2)) for o, d, pi, p in rows]
    mv = make_movement("h", 4, notes, [KeySegment(Fraction(0), Fraction(100), 0, "major")])
    slices = full_expansion(mv)
    assert [(s.onset, list(s.sounding)) for s in slices] == expansion_oracle(mv.notes)


def test_manifest(tmp_path):
    (tmp_path / "a.notes.tsv").write_bytes(NOTES_ONE)
    (tmp_path / "a.keys.tsv").write_bytes(KEYS_ONE)
    (tmp_path / "m.txt").write_text("# corpus\na.notes.tsv\ta.keys.tsv\n")
    assert read_manifest(tmp_path / "m.txt") == [("a", tmp_path / "a.notes.tsv", tmp_path / "a.keys.tsv")]
