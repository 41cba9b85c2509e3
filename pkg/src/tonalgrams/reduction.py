"""Harmonic reduction by repeatedly linking the weakest chord to its stronger neighbour.

At each step the surviving chord with the least attractional force is
removed and linked to whichever adjacent survivor is stronger. Ties go to
the earliest chord (for removal) and to the left neighbour (for the
link). A chord at either end of the surviving sequence links to its only
neighbour.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .association import AttractorStats


@dataclass
class ForceRanking:
    """Attractional force per chord, with a fallback for unseen chords.

    ``refinement`` breaks ties in ``forces`` (e.g. summed asymmetry under
    an attractor count).
    """
    forces: Mapping[Hashable, float]
    fallback: float = 0.0
    refinement: Mapping[Hashable, float] = field(default_factory=dict)
    refinement_fallback: float = 0.0

    def force(self, chord) -> float:
        return self.forces.get(chord, self.fallback)

    def key(self, chord) -> tuple[float, float]:
        return (self.forces.get(chord, self.fallback),
                self.refinement.get(chord, self.refinement_fallback))

    @classmethod
    def from_attractors(cls, stats: Sequence[AttractorStats], source: str = "n_attractor") -> "ForceRanking":
        """Forces from attractor statistics.

        ``source`` is ``n_attractor`` (refined by ``sum_asym``),
        ``sum_asym`` or ``pct_attractor``. Unseen chords fall below every
        observed one.
        """
        if source == "n_attractor":
            forces = {s.unigram: float(s.n_attractor) for s in stats}
            refine = {s.unigram: s.sum_asym for s in stats}
        elif source == "sum_asym":
            forces, refine = {s.unigram: s.sum_asym for s in stats}, {}
        elif source == "pct_attractor":
            forces = {s.unigram: s.pct_attractor for s in stats}
            refine = {s.unigram: s.sum_asym for s in stats}
        else:
            raise ValueError(f"unknown force source {source!r}")
        lowest = min(forces.values(), default=0.0)
        fallback = min(lowest - 1.0, -1.0)
        rfall = min(refine.values(), default=0.0) - 1.0
        return cls(forces, fallback, refine, rfall)


@dataclass(frozen=True)
class Link:
    removed: int
    parent: int
    step: int


@dataclass
class ReductionTree:
    leaves: list
    links: list[Link]
    root: int

    def __len__(self):
        return len(self.leaves)


def reduce(sequence: Sequence, forces: ForceRanking, key=None) -> ReductionTree:
    """Build the reduction tree for ``sequence``.

    ``key`` maps an item to the chord looked up in ``forces``; by default
    items with a ``csdc`` attribute use it, others are used directly.
    """
    k = len(sequence)
    if k == 0:
        raise ValueError("cannot reduce an empty sequence")
    if key is None:
        key = lambda item: getattr(item, "csdc", item)
    strength = [forces.key(key(item)) for item in sequence]
    # doubly linked list of survivors
    left = list(range(-1, k - 1))
    right = list(range(1, k + 1))
    right[-1] = -1
    # global min among survivors with earliest index first is just this order
    order = sorted(range(k), key=lambda i: (strength[i], i))
    links = []
    for step, i in enumerate(order[:-1], start=1):
        lo, hi = left[i], right[i]
        if lo == -1:
            parent = hi
        elif hi == -1:
            parent = lo
        else:
            parent = hi if strength[hi] > strength[lo] else lo
        links.append(Link(i, parent, step))
        if lo != -1:
            right[lo] = hi
        if hi != -1:
            left[hi] = lo
    return ReductionTree(list(sequence), links, order[-1])


def surviving_indices(tree: ReductionTree, survivors: int) -> list[int]:
    k = len(tree.leaves)
    if not 1 <= survivors <= k:
        raise ValueError(f"survivors must be in 1..{k}, got {survivors}")
    gone = {link.removed for link in tree.links[: k - survivors]}
    return [i for i in range(k) if i not in gone]


def reduction_level(tree: ReductionTree, survivors: int) -> list:
    """The chords left after ``k - survivors`` removal steps, in temporal order."""
    return [tree.leaves[i] for i in surviving_indices(tree, survivors)]


def survivors_above(tree: ReductionTree, forces: ForceRanking, threshold: float, key=None) -> int:
    """Survivor count for a force cut-off: chords with force <= threshold are pruned
    (the root always survives)."""
    if key is None:
        key = lambda item: getattr(item, "csdc", item)
    strong = sum(forces.force(key(item)) > threshold for item in tree.leaves)
    return max(strong, 1)


def _label(item) -> str:
    return str(getattr(item, "csdc", item))


def export_tree(tree: ReductionTree, fmt: str = "dot", name: str = "reduction") -> bytes:
    """Render as a Graphviz digraph (``dot``) or a step log (``text``).

    Edges point from the removed chord to the chord it was linked to and
    carry the step number.
    """
    if fmt == "dot":
        out = [f'digraph "{name}" {{', "  rankdir=BT;"]
        for i, item in enumerate(tree.leaves):
            attrs = f'label="{i}: {_label(item)}"'
            if i == tree.root:
                attrs += ", shape=box"
            out.append(f"  n{i} [{attrs}];")
        for link in tree.links:
            out.append(f'  n{link.removed} -> n{link.parent} [label="{link.step}"];')
        out.append("}")
    elif fmt == "text":
        out = [f"# reduction {name}: {len(tree.leaves)} leaves, root {tree.root}"]
        for link in tree.links:
            out.append(
                f"step {link.step}: {link.removed} -> {link.parent}\t"
                f"{_label(tree.leaves[link.removed])} -> {_label(tree.leaves[link.parent])}"
            )
        out.append(f"root: {tree.root}\t{_label(tree.leaves[tree.root])}")
    else:
        raise ValueError(f"unknown tree format {fmt!r}")
    return ("\n".join(out) + "\n").encode("utf-8")


_STEP_RE = re.compile(r"^step (\d+): (\d+) -> (\d+)")
_ROOT_RE = re.compile(r"^root: (\d+)")


def parse_tree_text(data: bytes) -> tuple[list[Link], int]:
    """Recover ``(links, root)`` from :func:`export_tree` text output."""
    links, root = [], None
    for line in data.decode("utf-8").splitlines():
        if m := _STEP_RE.match(line):
            links.append(Link(int(m.group(2)), int(m.group(3)), int(m.group(1))))
        elif m := _ROOT_RE.match(line):
            root = int(m.group(1))
    if root is None:
        raise ValueError("no root line in tree text")
    return links, root
