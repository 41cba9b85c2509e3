"""Seeded synthetic four-part corpora for tests and demos.

Each movement is a chain of tertian harmonies with a held bass, chord
tones in the upper parts and eighth-note embellishments in one upper part.
Halfway through it modulates to the dominant, with a pivot segment
straddling the boundary. Output is deterministic for a given seed.
"""
from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from .corpus import KeySegment, Movement, NoteEvent, make_movement, write_movement

SCALES = {"major": (0, 2, 4, 5, 7, 9, 11), "minor": (0, 2, 3, 5, 7, 8, 11)}

# harmonies as scale-degree sets, root first; grouped by function
_HARMONIES = {
    "major": {
        "T": [(0, 4, 7), (9, 0, 4)],
        "PD": [(5, 9, 0), (2, 5, 9), (2, 5, 9, 0)],
        "D": [(7, 11, 2), (7, 11, 2, 5), (11, 2, 5)],
    },
    "minor": {
        "T": [(0, 3, 7), (8, 0, 3)],
        "PD": [(5, 8, 0), (2, 5, 8)],
        "D": [(7, 11, 2), (7, 11, 2, 5), (11, 2, 5)],
    },
}
_NEXT = {"T": ["T", "PD", "PD", "D"], "PD": ["D", "D", "PD", "T"], "D": ["T", "T", "T", "D"]}
_RANGES = [(36, 52), (48, 64), (55, 69), (60, 79)]
EIGHTH = Fraction(1, 2)


def _place(pc: int, lo: int, hi: int, rng: random.Random) -> int:
    choices = [p for p in range(lo, hi + 1) if p % 12 == pc]
    return rng.choice(choices)


def _neighbor(pitch: int, tonic: int, scale, rng: random.Random) -> int:
    pcs = {(tonic + d) % 12 for d in scale}
    step = rng.choice((-1, 1))
    p = pitch + step
    while p % 12 not in pcs:
        p += step
    return p


def _phrase(rng: random.Random, tonic: int, mode: str, start: Fraction, target_slices: int):
    """Notes from ``start`` until roughly ``target_slices`` onsets are produced."""
    harmonies = _HARMONIES[mode]
    scale = SCALES[mode]
    notes = []
    t = start
    func = "T"
    onsets = set()
    while len(onsets) < target_slices:
        chord = rng.choice(harmonies[func])
        pcs = [(tonic + d) % 12 for d in chord]
        dur = Fraction(rng.choice((1, 2, 2, 3)))
        inversion = rng.choice((0, 0, 0, 1, 2))
        bass_pc = pcs[min(inversion, len(pcs) - 1)]
        notes.append(NoteEvent(onset=t, part=0, pitch=_place(bass_pc, *_RANGES[0], rng), duration=dur))
        onsets.add(t)
        active = rng.randrange(1, 4)
        for part in (1, 2, 3):
            if rng.random() < 0.06:
                continue  # rest
            pitch = _place(rng.choice(pcs), *_RANGES[part], rng)
            if part == active and dur > 1 and rng.random() < 0.7:
                # embellish: chord tone, neighbour/passing figures in eighths
                u = t
                cur = pitch
                while u < t + dur:
                    notes.append(NoteEvent(onset=u, part=part, pitch=cur, duration=EIGHTH))
                    onsets.add(u)
                    u += EIGHTH
                    cur = _neighbor(pitch, tonic, scale, rng) if cur == pitch else pitch
            else:
                notes.append(NoteEvent(onset=t, part=part, pitch=pitch, duration=dur))
        t += dur
        func = rng.choice(_NEXT[func])
    # cadence: dominant seventh to tonic
    for chord in (harmonies["D"][1], harmonies["T"][0]):
        pcs = [(tonic + d) % 12 for d in chord]
        notes.append(NoteEvent(onset=t, part=0, pitch=_place(pcs[0], *_RANGES[0], rng), duration=Fraction(2)))
        for part in (1, 2, 3):
            notes.append(NoteEvent(onset=t, part=part, pitch=_place(pcs[min(part, len(pcs) - 1)], *_RANGES[part], rng),
                                   duration=Fraction(2)))
        t += 2
    return notes, t


def generate_movement(movement_id: str, seed: int, slices: int = 200) -> Movement:
    rng = random.Random(seed)
    mode = "major" if rng.random() < 0.8 else "minor"
    tonic = rng.randrange(12)
    first, boundary = _phrase(rng, tonic, mode, Fraction(0), slices // 2 - 2)
    second_tonic = (tonic + 7) % 12
    second, end = _phrase(rng, second_tonic, "major", boundary, slices - slices // 2 - 2)
    pivot_start = max(Fraction(0), boundary - 2)
    keys = [
        KeySegment(Fraction(0), boundary, tonic, mode, False),
        KeySegment(boundary, end, second_tonic, "major", False),
        KeySegment(pivot_start, boundary + 2, second_tonic, "major", True),
    ]
    return make_movement(movement_id, 4, first + second, keys)


def generate_corpus(seed: int = 0, movements: int = 10, slices: int = 200) -> list[Movement]:
    rng = random.Random(seed)
    return [generate_movement(f"mvt{i:02d}", rng.randrange(2 ** 31), slices) for i in range(movements)]


def write_corpus(out_dir: Path, seed: int = 0, movements: int = 10, slices: int = 200) -> Path:
    """Write note/key files plus ``manifest.txt`` into ``out_dir``; return the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for mv in generate_corpus(seed, movements, slices):
        notes, keys = f"{mv.id}.notes.tsv", f"{mv.id}.keys.tsv"
        write_movement(mv, out_dir / notes, out_dir / keys)
        lines.append(f"{notes}\t{keys}")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest
