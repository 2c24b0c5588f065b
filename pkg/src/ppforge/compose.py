"""Compositional prime path generation.

The graph is split into strongly connected components.  Prime paths are
generated separately inside every nontrivial component and on the component
graph, short fragments are extracted from the per-component results, and the
fragments are stitched back together into the four classes:

complete  Start to End
internal  cyclic, or confined to one component
exit      ends at End, starts inside a component
entry     everything else (starts at Start or inside a component, ends
          inside a later component)
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cfg import Cfg, max_outdegree, normalize_outdegree
from .oracle import maximal
from .scc import (SccDecomposition, build_ccfg, entry_exit_vertices, scc_subgraph, tarjan_scc)
from .vertexgen import Schedule, VertexGenerator, finalize_pps, is_prime_path

Path = tuple[int, ...]
PathSet = set[Path]
CLASSES = ("complete", "internal", "exit", "entry")


def _cyclic(p: Path) -> bool:
    return len(p) >= 2 and p[0] == p[-1]


@dataclass
class PpReport:
    graph: Cfg
    complete: PathSet
    internal: dict[int, PathSet]
    exit: PathSet
    entry: PathSet
    scc_names: dict[int, str] = field(default_factory=dict)
    multi_entry: list[int] = field(default_factory=list)
    store_bytes: int = 0
    rounds: int = 0

    @property
    def total(self) -> int:
        return len(self.complete) + sum(map(len, self.internal.values())) + len(self.exit) + len(self.entry)

    def internal_all(self) -> PathSet:
        out: PathSet = set()
        for ps in self.internal.values():
            out |= ps
        return out

    def all_pps(self) -> PathSet:
        return self.complete | self.internal_all() | self.exit | self.entry

    def by_class(self) -> dict[str, PathSet]:
        return {"complete": self.complete, "internal": self.internal_all(),
                "exit": self.exit, "entry": self.entry}

    def counts(self) -> dict[str, int]:
        out = {k: len(v) for k, v in self.by_class().items()}
        out["total"] = self.total
        return out

    def payload(self) -> dict:
        """JSON-ready body with names and a stable ordering."""
        g = self.graph

        def fmt(ps: Iterable[Path]) -> list[list[str]]:
            return [g.label(p) for p in sorted(ps)]

        return {
            "complete": fmt(self.complete),
            "internal": {self.scc_names[c].lower(): fmt(ps) for c, ps in sorted(self.internal.items())},
            "exit": fmt(self.exit),
            "entry": fmt(self.entry),
            "total": self.total,
            "multi_entry_sccs": [self.scc_names[c] for c in self.multi_entry],
        }


# -------------------------------------------------------------- extraction

def _subpaths(paths: Iterable[Path]) -> set[Path]:
    """Every acyclic contiguous subpath of the given paths."""
    out: set[Path] = set()
    for p in paths:
        n = len(p)
        for i in range(n):
            for j in range(i + 1, n + 1):
                s = p[i:j]
                if not _cyclic(s):
                    out.add(s)
    return out


def _arcs_of(paths: Iterable[Path]) -> tuple[dict[int, set[int]], dict[int, set[int]]]:
    succ: dict[int, set[int]] = defaultdict(set)
    pred: dict[int, set[int]] = defaultdict(set)
    for p in paths:
        for a, b in zip(p, p[1:]):
            succ[a].add(b)
            pred[b].add(a)
    return succ, pred


def extract_entry_exit_paths(internal: Iterable[Path], v_en: int, v_ex: int) -> PathSet:
    """Acyclic stretches of the component's paths that run from ``v_en`` to ``v_ex``.

    All of them are kept, not only the longest: each one joins the outside
    world differently.  With ``v_en == v_ex`` this is just ``(v_en,)``.
    """
    if v_en == v_ex:
        return {(v_en,)}
    return {s for s in _subpaths(internal) if s[0] == v_en and s[-1] == v_ex}


def extract_exit_paths(internal: Iterable[Path], exits: Iterable[int],
                       entries: Iterable[int] = ()) -> PathSet:
    """Stretches from a non-entry vertex to an exit vertex that cannot be
    extended backwards inside the component: every in-component predecessor
    of the first vertex already lies on the stretch."""
    internal = list(internal)
    exits, entries = set(exits), set(entries)
    if not exits:
        return set()
    _, pred = _arcs_of(internal)
    out = set()
    for s in _subpaths(internal):
        if s[-1] in exits and s[0] not in entries and pred[s[0]] <= set(s):
            out.add(s)
    return out


def extract_entry_paths(internal: Iterable[Path], entries: Iterable[int],
                        exits: Iterable[int] = ()) -> PathSet:
    """Stretches from an entry vertex to a non-exit vertex that cannot be
    extended forwards inside the component."""
    internal = list(internal)
    entries, exits = set(entries), set(exits)
    if not entries:
        return set()
    succ, _ = _arcs_of(internal)
    out = set()
    for s in _subpaths(internal):
        if s[0] in entries and s[-1] not in exits and succ[s[-1]] <= set(s):
            out.add(s)
    return out


# ----------------------------------------------------------------- merging

def merge_complete_pps(ccfg_pps: Iterable[Path], ee_paths: Mapping[int, Iterable[Path]],
                       g: Cfg, d: SccDecomposition) -> PathSet:
    """Replace every component on a component-graph path by each compatible
    entry-exit stretch.  ``ccfg_pps`` are sequences of component ids; only
    Start-to-End ones are used."""
    start_c, end_c = d.scc_of[g.start], d.scc_of[g.end]
    options = {c: sorted(ee_paths.get(c, ())) for c in d.nontrivial}
    arcs = g.arc_set
    out: PathSet = set()
    for cp in ccfg_pps:
        if cp[0] != start_c or cp[-1] != end_c:
            continue
        parts = [options[c] if d.is_nontrivial(c) else [d.members[c]] for c in cp]

        def walk(k: int, acc: Path):
            if k == len(parts):
                out.add(acc)
                return
            for opt in parts[k]:
                if not acc or (acc[-1], opt[0]) in arcs:
                    walk(k + 1, acc + tuple(opt))

        walk(0, ())
    return out


def merge_exit_pps(complete: Iterable[Path], exit_paths: Mapping[int, Iterable[Path]],
                   g: Cfg, d: SccDecomposition) -> PathSet:
    """For each complete path and each component it crosses, glue every exit
    stretch ending where the path leaves the component onto the rest of the
    path."""
    by_last: dict[int, list[Path]] = defaultdict(list)
    for ps in exit_paths.values():
        for p in ps:
            by_last[p[-1]].append(p)
    out: PathSet = set()
    for cp in complete:
        last_in: dict[int, int] = {}
        for k, v in enumerate(cp):
            if d.is_nontrivial(d.scc_of[v]):
                last_in[d.scc_of[v]] = k
        for k in last_in.values():
            tail = cp[k + 1:]
            for ep in by_last.get(cp[k], ()):
                out.add(ep + tail)
    return {p for p in out if is_prime_path(g, p)}


def merge_entry_pps(complete_and_exit: Iterable[Path], entry_paths: Mapping[int, Iterable[Path]],
                    g: Cfg, d: SccDecomposition) -> PathSet:
    """For each input path and each component it enters after its first
    vertex, glue every entry stretch starting at the entry vertex onto the
    path's head."""
    by_first: dict[int, list[Path]] = defaultdict(list)
    for ps in entry_paths.values():
        for p in ps:
            by_first[p[0]].append(p)
    out: PathSet = set()
    for p in complete_and_exit:
        first_in: dict[int, int] = {}
        for k, v in enumerate(p):
            c = d.scc_of[v]
            if d.is_nontrivial(c) and c not in first_in:
                first_in[c] = k
        for c, k in first_in.items():
            if k == 0:
                continue
            head = p[:k]
            for ep in by_first.get(p[k], ()):
                out.add(head + ep)
    return {p for p in out if is_prime_path(g, p)}


# ---------------------------------------------------------------- pipelines

def _normalized(g: Cfg) -> Cfg:
    return g if max_outdegree(g) <= 2 else normalize_outdegree(g)[0]


def _scc_names(d: SccDecomposition) -> dict[int, str]:
    return {c: d.name(c) for c in d.nontrivial}


def generate_pps_compositional(g: Cfg, sched: Schedule = Schedule(), monitor=None) -> PpReport:
    g = _normalized(g)
    d = tarjan_scc(g)
    stats = {"bytes": 0, "rounds": 0}

    def run(sub: Cfg) -> set[Path]:
        gen = VertexGenerator(sub, monitor)
        store = gen.run(sched)
        stats["bytes"] += store.stats().peak_bytes
        stats["rounds"] = max(stats["rounds"], gen.rounds)
        return finalize_pps(store, sub)

    internal: dict[int, PathSet] = {}
    ee: dict[int, PathSet] = {}
    exit_frag: dict[int, PathSet] = {}
    entry_frag: dict[int, PathSet] = {}
    multi = []
    for c in d.nontrivial:
        sub, mem = scc_subgraph(g, d, c)
        raw = {tuple(mem[v] for v in p) for p in run(sub)}
        entries, exits = entry_exit_vertices(g, d, c)
        if len(entries) > 1:
            multi.append(c)
        internal[c] = {p for p in raw if _cyclic(p) or (p[0] not in entries and p[-1] not in exits)}
        ee[c] = set()
        for en in entries:
            for ex in exits:
                ee[c] |= extract_entry_exit_paths(raw, en, ex)
        exit_frag[c] = extract_exit_paths(raw, exits, entries)
        entry_frag[c] = extract_entry_paths(raw, entries, exits)

    cc = build_ccfg(g, d)
    cgraph = cc.graph
    cnorm = _normalized(cgraph)
    k = len(cgraph)
    comp_paths = set()
    for p in run(cnorm):
        comp_paths.add(tuple(cc.comp_of_vertex[v] for v in p if v < k))
    comp_paths = maximal(comp_paths)

    complete = merge_complete_pps(comp_paths, ee, g, d)
    exits = merge_exit_pps(complete, exit_frag, g, d)
    entries = merge_entry_pps(complete | exits, entry_frag, g, d)
    return PpReport(g, complete, internal, exits, entries, _scc_names(d), multi,
                    stats["bytes"], stats["rounds"])


def classify_pps(g: Cfg, pps: Iterable[Path], d: SccDecomposition) -> PpReport:
    """Sort a flat PP set into the four classes."""
    complete, exits, entries = set(), set(), set()
    internal: dict[int, PathSet] = {c: set() for c in d.nontrivial}
    for p in pps:
        c0 = d.scc_of[p[0]]
        if _cyclic(p) or (d.is_nontrivial(c0) and all(d.scc_of[v] == c0 for v in p)):
            internal[c0].add(p)
        elif p[-1] == g.end:
            (complete if p[0] == g.start else exits).add(p)
        else:
            entries.add(p)
    multi = [c for c in d.nontrivial if len(entry_exit_vertices(g, d, c)[0]) > 1]
    return PpReport(g, complete, internal, exits, entries, _scc_names(d), multi)


def generate_pps_direct(g: Cfg, sched: Schedule = Schedule(), monitor=None) -> PpReport:
    g = _normalized(g)
    gen = VertexGenerator(g, monitor)
    store = gen.run(sched)
    rep = classify_pps(g, finalize_pps(store, g), tarjan_scc(g))
    rep.store_bytes = store.stats().peak_bytes
    rep.rounds = gen.rounds
    return rep


def generate_report(g: Cfg, mode: str = "compositional", sched: Schedule = Schedule(),
                    monitor=None) -> PpReport:
    if mode == "compositional":
        return generate_pps_compositional(g, sched, monitor)
    if mode == "direct":
        return generate_pps_direct(g, sched, monitor)
    raise ValueError(f"unknown mode {mode!r}")


def erase_synthetic(report: PpReport, original: Cfg) -> PpReport:
    """Drop the intermediate vertices added by out-degree normalization and
    reclassify against the original graph."""
    k = len(original)
    erased = {tuple(v for v in p if v < k) for p in report.all_pps()}
    rep = classify_pps(original, maximal(erased), tarjan_scc(original))
    rep.store_bytes, rep.rounds = report.store_bytes, report.rounds
    return rep
