"""Command-line front end.

Usage:
    tonalgrams fixtures --out data/ --seed 0
    tonalgrams encode --manifest data/manifest.txt --out events.csv
    tonalgrams rank --events events.csv --by beta3 --exclude --out rank.csv
    tonalgrams attractors --events events.csv --out attractors.csv
    tonalgrams reduce --events events.csv --forces attractors.csv --survivors 8 --format dot

Every stage reads either a corpus manifest (``--manifest``) or the CSV
written by ``encode`` (``--events``), and writes UTF-8 CSV (or DOT/text)
to ``--out`` or stdout. The default worker count comes from
``TONALGRAMS_WORKERS``.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import association, corpus, encoding, fixtures, ngrams, ranking, reduction
from .encoding import ChordEvent, parse_csdc

WORKERS_ENV = "TONALGRAMS_WORKERS"
EVENT_COLUMNS = ["movement_id", "index", "onset", "duration", "tonic", "mode", "in_pivot", "distinct", "csdc"]

_MODULE_NAMES = {
    "corpus": "corpus-io",
    "encoding": "tonal-encoding",
    "ngrams": "ngram-engine",
    "ranking": "pattern-ranking",
    "association": "association",
    "reduction": "reduction",
    "fixtures": "fixtures",
    "cli": "cli",
}
_COMMAND_MODULES = {
    "encode": "tonal-encoding", "unigrams": "tonal-encoding", "ngrams": "ngram-engine",
    "rank": "pattern-ranking", "assoc": "association", "attractors": "association",
    "reduce": "reduction", "fixtures": "fixtures",
}


class UsageError(ValueError):
    pass


def _pmap(func, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*items)))


def _encode_entry(movement_id, note_path, key_path) -> list[ChordEvent]:
    return encoding.encode_movement(corpus.load_movement(movement_id, note_path, key_path))


def _read_events(path: Path) -> list[list[ChordEvent]]:
    path = Path(path)
    if not path.is_file():
        raise corpus.CorpusError(f"events file not found: {path}")
    groups: dict[str, list[ChordEvent]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != EVENT_COLUMNS:
            raise corpus.ParseError(f"unexpected header {reader.fieldnames}", 1, str(path))
        for lineno, row in enumerate(reader, start=2):
            try:
                ev = ChordEvent(
                    csdc=parse_csdc(row["csdc"]),
                    onset=Fraction(row["onset"]),
                    duration=Fraction(row["duration"]),
                    mode=row["mode"],
                    in_pivot=row["in_pivot"] == "1",
                    movement_id=row["movement_id"],
                    tonic=int(row["tonic"]),
                )
            except (ValueError, ZeroDivisionError) as exc:
                raise corpus.ParseError(str(exc), lineno, str(path)) from None
            groups.setdefault(ev.movement_id, []).append(ev)
    return list(groups.values())


def load_events(args) -> list[list[ChordEvent]]:
    if getattr(args, "events", None):
        return _read_events(args.events)
    if getattr(args, "manifest", None):
        entries = corpus.read_manifest(args.manifest)
        return _pmap(_encode_entry, entries, args.workers)
    raise UsageError("one of --manifest or --events is required")


def _sequences(groups):
    return [[ev.csdc for ev in g] for g in groups]


def _skip_vectors(seq, t_max):
    return ngrams.skip_count_vectors([seq], t_max)


def _vectors(groups, t_max, workers):
    parts = _pmap(_skip_vectors, [(s, t_max) for s in _sequences(groups)], workers)
    return ngrams.merge_skip_vectors(parts)


def _fixed6(x: float) -> str:
    # round first so float noise around zero never prints as -0.000000
    return f"{round(x, 6) + 0.0:.6f}"


class _Output:
    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO(newline="")

    def csv(self):
        return csv.writer(self.buf, lineterminator="\n")

    def close(self):
        data = self.buf.getvalue()
        if self.path in (None, "-"):
            sys.stdout.write(data)
        else:
            Path(self.path).parent.mkdir(parents=True, exist_ok=True)
            Path(self.path).write_bytes(data.encode("utf-8"))


def cmd_encode(args) -> int:
    groups = load_events(args)
    out = _Output(args.out)
    w = out.csv()
    w.writerow(EVENT_COLUMNS)
    for g in groups:
        for i, ev in enumerate(g):
            w.writerow([ev.movement_id, i, str(ev.onset), str(ev.duration), ev.tonic, ev.mode,
                        int(ev.in_pivot), ev.distinct_degree_count, str(ev.csdc)])
    out.close()
    return 0


def cmd_unigrams(args) -> int:
    events = [ev for g in load_events(args) for ev in g]
    mode = None if args.mode == "all" else args.mode
    dist = encoding.unigram_distribution(events, mode, args.min_distinct, args.weight, args.exclude_pivots)
    out = _Output(args.out)
    w = out.csv()
    if args.rank_frequency:
        w.writerow(["rank", "frequency"])
        if dist:
            for r, f in ranking.rank_frequency_series(dist):
                w.writerow([r, f"{f:.12f}"])
    else:
        w.writerow(["rank", "csdc", "proportion"])
        ordered = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))
        for r, (c, p) in enumerate(ordered, start=1):
            w.writerow([r, str(c), f"{p:.12f}"])
    out.close()
    return 0


def cmd_ngrams(args) -> int:
    seqs = _sequences(load_events(args))
    out = _Output(args.out)
    w = out.csv()
    if args.vectors:
        vecs = ngrams.merge_skip_vectors(_pmap(_skip_vectors, [(s, args.t_max) for s in seqs], args.workers))
        w.writerow(["type"] + [f"t{t}" for t in range(args.t_max + 1)])
        for typ, vec in sorted(vecs.items(), key=lambda kv: (-sum(kv[1]), kv[0])):
            w.writerow([" -> ".join(map(str, typ))] + vec)
    else:
        table = ngrams.count_skipgrams(seqs, args.n, args.t) if args.t else ngrams.count_contiguous(seqs, args.n)
        w.writerow([f"type_member_{i}" for i in range(1, args.n + 1)] + ["count"])
        for typ, c in table.ranked():
            w.writerow([str(m) for m in typ] + [c])
    out.close()
    return 0


def cmd_rank(args) -> int:
    groups = load_events(args)
    out = _Output(args.out)
    w = out.csv()
    w.writerow(["rank", "score", "chord1", "chord2", "excluded_flags"])
    if args.by == "count":
        table = ngrams.count_skipgrams(_sequences(groups), 2, args.t)
        rows = [(typ, str(c)) for typ, c in ranking.rank_by_count(table, args.exclude)]
    else:
        vecs = _vectors(groups, args.t_max, args.workers)
        rows = [(typ, _fixed6(fit.beta3)) for typ, fit in ranking.rank_by_beta3(vecs, args.exclude)]
    if args.top:
        rows = rows[: args.top]
    for r, (typ, score) in enumerate(rows, start=1):
        w.writerow([r, score, str(typ[0]), str(typ[1]), ranking.exclusion_flags(*typ).flags_text()])
    out.close()
    return 0


def cmd_assoc(args) -> int:
    marg = association.BigramMarginals(_sequences(load_events(args)), args.t_limit)
    if args.chord1 or args.chord2:
        if not (args.chord1 and args.chord2):
            raise UsageError("--chord1 and --chord2 must be given together")
        types = [(parse_csdc(args.chord1), parse_csdc(args.chord2))]
    else:
        types = sorted(marg.pairs)
    out = _Output(args.out)
    w = out.csv()
    w.writerow(["chord1", "chord2", "a", "b", "c", "d", "p_value", "asym"])
    for x, y in types:
        tab = marg.table(x, y)
        p = association.fisher_exact(tab)
        try:
            s = _fixed6(association.asym(tab))
        except association.UndefinedMeasureError:
            s = ""
        w.writerow([str(x), str(y), tab.a, tab.b, tab.c, tab.d, f"{p:.6e}", s])
    out.close()
    return 0


ATTRACTOR_COLUMNS = ["rank", "n_attractor", "pct_attractor", "sum_asym", "csdc"]


def _attractor_rows(stats):
    for r, s in enumerate(stats, start=1):
        yield [r, s.n_attractor, f"{s.pct_attractor:.1f}", _fixed6(s.sum_asym), str(s.unigram)]


def cmd_attractors(args) -> int:
    stats = association.attractor_table(_sequences(load_events(args)), args.t_limit, args.sum_convention)
    out = _Output(args.out)
    w = out.csv()
    w.writerow(ATTRACTOR_COLUMNS)
    for row in _attractor_rows(stats):
        w.writerow(row)
    out.close()
    return 0


def _read_attractors(path: Path) -> list[association.AttractorStats]:
    path = Path(path)
    if not path.is_file():
        raise corpus.CorpusError(f"forces file not found: {path}")
    stats = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ATTRACTOR_COLUMNS:
            raise corpus.ParseError(f"unexpected header {reader.fieldnames}", 1, str(path))
        for lineno, row in enumerate(reader, start=2):
            try:
                n = int(row["n_attractor"])
                pct = float(row["pct_attractor"])
                n_types = round(100.0 * n / pct) if pct else 0
                stats.append(association.AttractorStats(parse_csdc(row["csdc"]), n, n_types, float(row["sum_asym"])))
            except (ValueError, ZeroDivisionError) as exc:
                raise corpus.ParseError(str(exc), lineno, str(path)) from None
    return stats


def cmd_reduce(args) -> int:
    groups = load_events(args)
    if args.movement:
        groups = [g for g in groups if g and g[0].movement_id == args.movement]
        if not groups:
            raise UsageError(f"movement {args.movement!r} not in corpus")
    if args.forces:
        stats = _read_attractors(args.forces)
    else:
        stats = association.attractor_table(_sequences(groups), args.t_limit)
    forces = reduction.ForceRanking.from_attractors(stats, args.force_source)
    out = _Output(args.out)
    if args.format == "csv":
        w = out.csv()
        w.writerow(["movement_id", "index", "onset", "csdc"])
    for g in groups:
        if not g:
            continue
        tree = reduction.reduce(g, forces)
        mid = g[0].movement_id
        if args.format == "csv":
            if args.threshold is not None:
                keep = reduction.survivors_above(tree, forces, args.threshold)
            else:
                keep = min(args.survivors, len(g))
            for i in reduction.surviving_indices(tree, keep):
                ev = g[i]
                w.writerow([mid, i, str(ev.onset), str(ev.csdc)])
        else:
            out.buf.write(reduction.export_tree(tree, args.format, mid).decode("utf-8"))
    out.close()
    return 0


def cmd_fixtures(args) -> int:
    manifest = fixtures.write_corpus(Path(args.out), args.seed, args.movements, args.slices)
    print(manifest)
    return 0


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tonalgrams", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--manifest", type=Path, help="corpus manifest (note/key file pairs)")
        src.add_argument("--events", type=Path, help="CSV written by 'encode'")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--workers", type=_positive, default=_default_workers(),
                       help=f"worker processes (default from ${WORKERS_ENV}, else 1)")
        p.set_defaults(func=func)
        return p

    stage("encode", cmd_encode, "write one csdc event per slice")

    p = stage("unigrams", cmd_unigrams, "csdc proportions")
    p.add_argument("--mode", choices=["all", "major", "minor"], default="all")
    p.add_argument("--min-distinct", type=int, choices=range(1, 5), default=1, metavar="{1..4}")
    p.add_argument("--weight", choices=["duration", "count"], default="duration")
    p.add_argument("--exclude-pivots", action="store_true")
    p.add_argument("--rank-frequency", action="store_true", help="emit (rank, frequency) pairs")

    p = stage("ngrams", cmd_ngrams, "n-gram counts (contiguous or within t skips)")
    p.add_argument("--n", type=_positive, default=2)
    p.add_argument("--t", type=_nonneg, default=0, help="total skip budget (0 = contiguous)")
    p.add_argument("--vectors", action="store_true", help="per-skip bigram count vectors")
    p.add_argument("--t-max", type=_nonneg, default=ngrams.DEFAULT_T_MAX)

    p = stage("rank", cmd_rank, "rank bigram types")
    p.add_argument("--by", choices=["count", "beta3"], default="count")
    p.add_argument("--exclude", action="store_true", help="drop types meeting any exclusion criterion")
    p.add_argument("--t", type=_nonneg, default=0, help="skip budget for count ranking")
    p.add_argument("--t-max", type=int, default=ngrams.DEFAULT_T_MAX, help="largest skip for beta3 ranking")
    p.add_argument("--top", type=_nonneg, default=0, help="keep only the first N rows (0 = all)")

    p = stage("assoc", cmd_assoc, "contingency tables, Fisher p-values and asym")
    p.add_argument("--t-limit", type=_nonneg, default=association.DEFAULT_T_LIMIT)
    p.add_argument("--chord1")
    p.add_argument("--chord2")

    p = stage("attractors", cmd_attractors, "per-csdc attractor statistics")
    p.add_argument("--t-limit", type=_nonneg, default=association.DEFAULT_T_LIMIT)
    p.add_argument("--sum-convention", choices=association.SUM_CONVENTIONS, default="received")

    p = stage("reduce", cmd_reduce, "harmonic reduction trees and levels")
    p.add_argument("--forces", type=Path, help="CSV written by 'attractors' (default: computed)")
    p.add_argument("--force-source", choices=["n_attractor", "sum_asym", "pct_attractor"], default="n_attractor")
    p.add_argument("--t-limit", type=_nonneg, default=association.DEFAULT_T_LIMIT)
    p.add_argument("--format", choices=["csv", "dot", "text"], default="csv")
    lvl = p.add_mutually_exclusive_group()
    lvl.add_argument("--survivors", type=_positive, default=1)
    lvl.add_argument("--threshold", type=float, help="prune chords with force <= threshold")
    p.add_argument("--movement", help="only this movement id")

    p = sub.add_parser("fixtures", help="write a seeded synthetic corpus")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--movements", type=_positive, default=10)
    p.add_argument("--slices", type=_positive, default=200)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rank" and args.by == "beta3" and args.t_max < 3:
        parser.error("--t-max must be >= 3 for beta3 ranking")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        mod = type(exc).__module__.rsplit(".", 1)[-1]
        name = _MODULE_NAMES.get(mod) or _COMMAND_MODULES[args.command]
        print(f"tonalgrams {args.command}: [{name}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
