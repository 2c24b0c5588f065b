"""Structural complexity metrics: sizes, cyclomatic complexity, Npath."""
from __future__ import annotations

import sys
from dataclasses import dataclass

from .cfg import Cfg
from .scc import tarjan_scc

NPATH_SEMANTICS = "Start-to-End walks using every arc at most once"


class NpathStateCap(RuntimeError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    nodes: int
    edges: int
    scc_count: int
    scc_nodes: int
    scc_edges: int
    cyclomatic: int
    npath: int
    pp_count: int | None = None

    def as_row(self) -> dict:
        row = dict(self.__dict__)
        row["npath_semantics"] = NPATH_SEMANTICS
        return row


def weak_components(g: Cfg) -> int:
    parent = list(range(len(g)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.arcs:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(len(g))})


def cyclomatic(g: Cfg) -> int:
    return len(g.arcs) - len(g) + 2 * weak_components(g)


def npath(g: Cfg, state_cap: int = 5_000_000) -> int:
    """Count Start-to-End walks that use each arc at most once.

    Memoized on (vertex, arcs already used inside the vertex's component).
    Arcs outside cycles can never be reused, and once a walk leaves a
    component it cannot return, so the used set only needs to remember arcs
    of the current component and resets on leaving it.
    """
    d = tarjan_scc(g)
    cyc_arcs = [(a, b) for a, b in g.arcs if d.scc_of[a] == d.scc_of[b]]
    bit = {arc: 1 << i for i, arc in enumerate(cyc_arcs)}
    memo: dict[tuple[int, int], int] = {}
    end = g.end
    scc_of = d.scc_of

    def count(v: int, used: int) -> int:
        if v == end:
            return 1
        key = (v, used)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) >= state_cap:
            raise NpathStateCap(f"more than {state_cap} memo states")
        total = 0
        for w in g.succ[v]:
            if scc_of[w] == scc_of[v]:
                b = bit[(v, w)]
                if used & b:
                    continue
                total += count(w, used | b)
            else:
                total += count(w, 0)
        memo[key] = total
        return total

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * len(g.arcs) + 1000))
    try:
        return count(g.start, 0)
    finally:
        sys.setrecursionlimit(old)


def pp_count(g: Cfg) -> int:
    from .compose import generate_pps_compositional
    return generate_pps_compositional(g).total


def metrics_report(g: Cfg, pps: int | None = None, npath_cap: int = 5_000_000) -> MetricsReport:
    d = tarjan_scc(g)
    members = [v for c in d.nontrivial for v in d.members[c]]
    inside = sum(1 for a, b in g.arcs if d.scc_of[a] == d.scc_of[b])
    return MetricsReport(
        nodes=len(g),
        edges=len(g.arcs),
        scc_count=len(d.nontrivial),
        scc_nodes=len(members),
        scc_edges=inside,
        cyclomatic=cyclomatic(g),
        npath=npath(g, npath_cap),
        pp_count=pps,
    )
