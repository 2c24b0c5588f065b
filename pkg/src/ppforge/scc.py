"""Strongly connected components, the component graph and reachability."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .cfg import Cfg


@dataclass(frozen=True)
class SccDecomposition:
    scc_of: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    nontrivial: tuple[int, ...]

    @cached_property
    def nontrivial_set(self) -> frozenset[int]:
        return frozenset(self.nontrivial)

    def is_nontrivial(self, c: int) -> bool:
        return c in self.nontrivial_set

    def name(self, c: int) -> str:
        """Display name of a nontrivial component: SCC1, SCC2, ... in discovery order."""
        return f"SCC{self.nontrivial.index(c) + 1}"


def tarjan_scc(g: Cfg) -> SccDecomposition:
    """Iterative Tarjan.  Component ids follow the order in which a DFS from
    Start (then from any unvisited vertex, lowest id first) first discovers
    the component's root, so ids are deterministic for a given Cfg."""
    n = len(g)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[tuple[int, list[int]]] = []
    counter = 0
    order = [g.start] + [v for v in range(n) if v != g.start]
    for root in order:
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = g.succ[v]
            if i < len(succ):
                work.append((v, i + 1))
                w = succ[i]
                if index[w] < 0:
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append((index[v], sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    # Tarjan emits components in reverse topological order; renumber by
    # discovery index of the root so ids read naturally from Start.
    comps.sort()
    scc_of = [0] * n
    members = []
    nontrivial = []
    for cid, (_, comp) in enumerate(comps):
        members.append(tuple(comp))
        for v in comp:
            scc_of[v] = cid
        if len(comp) > 1 or (comp[0], comp[0]) in g.arc_set:
            nontrivial.append(cid)
    return SccDecomposition(tuple(scc_of), tuple(members), tuple(nontrivial))


@dataclass(frozen=True)
class Ccfg:
    """Component graph.  ``graph`` vertex i is component ``comp_of_vertex[i]``."""

    graph: Cfg
    comp_of_vertex: tuple[int, ...]
    vertex_of_comp: dict[int, int]


def build_ccfg(g: Cfg, d: SccDecomposition) -> Ccfg:
    names = []
    comps = []
    for c, mem in enumerate(d.members):
        names.append(d.name(c) if d.is_nontrivial(c) else g.names[mem[0]])
        comps.append(c)
    arcs = []
    seen = set()
    for a, b in g.arcs:
        ca, cb = d.scc_of[a], d.scc_of[b]
        if ca != cb and (ca, cb) not in seen:
            seen.add((ca, cb))
            arcs.append((ca, cb))
    graph = Cfg(tuple(names), tuple(arcs), d.scc_of[g.start], d.scc_of[g.end],
                frozenset(d.scc_of[v] for v in g.synthetic))
    return Ccfg(graph, tuple(comps), {c: i for i, c in enumerate(comps)})


def entry_exit_vertices(g: Cfg, d: SccDecomposition, c: int) -> tuple[frozenset[int], frozenset[int]]:
    entries, exits = set(), set()
    for a, b in g.arcs:
        ca, cb = d.scc_of[a], d.scc_of[b]
        if ca == cb:
            continue
        if cb == c:
            entries.add(b)
        if ca == c:
            exits.add(a)
    return frozenset(entries), frozenset(exits)


def backward_reachable(g: Cfg, v: int) -> frozenset[int]:
    """Vertices other than ``v`` with a directed path into ``v``."""
    seen = {v}
    todo = deque([v])
    out = set()
    while todo:
        x = todo.popleft()
        for u in g.pred[x]:
            if u not in seen:
                seen.add(u)
                out.add(u)
                todo.append(u)
    return frozenset(out)


def all_backward_reachable(g: Cfg) -> list[frozenset[int]]:
    return [backward_reachable(g, v) for v in range(len(g))]


def topological_order(g: Cfg) -> list[int] | None:
    """Kahn's algorithm; None if ``g`` has a cycle."""
    indeg = [len(p) for p in g.pred]
    todo = deque(v for v in range(len(g)) if indeg[v] == 0)
    out = []
    while todo:
        v = todo.popleft()
        out.append(v)
        for w in g.succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                todo.append(w)
    return out if len(out) == len(g) else None


def scc_subgraph(g: Cfg, d: SccDecomposition, c: int) -> tuple[Cfg, tuple[int, ...]]:
    """Induced subgraph on one component.  Returns it with the local->global
    id map.  Start/end are placeholders (the first member); the subgraph is
    only used as a plain digraph."""
    mem = d.members[c]
    local = {v: i for i, v in enumerate(mem)}
    arcs = tuple((local[a], local[b]) for a, b in g.arcs if a in local and b in local)
    sub = Cfg(tuple(g.names[v] for v in mem), arcs, 0, 0,
              frozenset(local[v] for v in mem if v in g.synthetic))
    return sub, mem
