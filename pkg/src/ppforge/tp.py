"""Test paths: Start-to-End walks that tour every prime path."""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cfg import Cfg

Path = tuple[int, ...]


class UnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class TestPath:
    __test__ = False  # not a pytest class

    walk: Path
    covered: frozenset[int] = field(default_factory=frozenset)


def shortest_walk(g: Cfg, a: int, b: int) -> Path:
    """Fewest-arc walk from ``a`` to ``b``; ties go to lower successor ids."""
    if a == b:
        return (a,)
    parent = {a: a}
    todo = deque([a])
    while todo:
        v = todo.popleft()
        for w in sorted(g.succ[v]):
            if w in parent:
                continue
            parent[w] = v
            if w == b:
                out = [b]
                while out[-1] != a:
                    out.append(parent[out[-1]])
                return tuple(reversed(out))
            todo.append(w)
    raise UnreachableError(f"{g.names[b]} is not reachable from {g.names[a]}")


def pp_order(pps: Iterable[Path]) -> list[Path]:
    """Canonical PP numbering: the id of a PP is its index in sorted order."""
    return sorted(set(pps))


def _contained(walk: Sequence[int], by_first: dict[int, list[tuple[int, Path]]]) -> set[int]:
    found = set()
    n = len(walk)
    for i, v in enumerate(walk):
        for pid, p in by_first.get(v, ()):
            if i + len(p) <= n and tuple(walk[i:i + len(p)]) == p:
                found.add(pid)
    return found


def _index(ordered: Sequence[Path]) -> dict[int, list[tuple[int, Path]]]:
    by_first: dict[int, list[tuple[int, Path]]] = defaultdict(list)
    for pid, p in enumerate(ordered):
        by_first[p[0]].append((pid, p))
    return by_first


def generate_test_paths(g: Cfg, pps: Iterable[Path]) -> list[TestPath]:
    """Greedy cover: repeatedly take the longest uncovered PP (ties broken
    lexicographically), wrap it in the shortest walk from Start and to End,
    and mark everything the walk tours as covered."""
    ordered = pp_order(pps)
    by_first = _index(ordered)
    ids = {p: i for i, p in enumerate(ordered)}
    covered: set[int] = set()
    out = []
    for p in sorted(ordered, key=lambda q: (-len(q), q)):
        if ids[p] in covered:
            continue
        head = shortest_walk(g, g.start, p[0])
        tail = shortest_walk(g, p[-1], g.end)
        walk = head[:-1] + p + tail[1:]
        toured = _contained(walk, by_first)
        covered |= toured
        out.append(TestPath(walk, frozenset(toured)))
    return out


@dataclass
class CoverageReport:
    covering: dict[int, list[int]]
    uncovered: list[int]
    invalid: list[int]
    coverage: float

    @property
    def complete(self) -> bool:
        return not self.uncovered and not self.invalid


def walk_is_valid(g: Cfg, walk: Sequence[int]) -> bool:
    return bool(walk) and walk[0] == g.start and walk[-1] == g.end and g.has_path(walk)


def verify_coverage(g: Cfg, tps: Sequence[TestPath], pps: Iterable[Path]) -> CoverageReport:
    """Recheck every walk against ``g`` and recompute coverage from scratch;
    the ``covered`` sets carried by the test paths are not trusted."""
    ordered = pp_order(pps)
    by_first = _index(ordered)
    covering: dict[int, list[int]] = {i: [] for i in range(len(ordered))}
    invalid = []
    for t, tp in enumerate(tps):
        if not walk_is_valid(g, tp.walk):
            invalid.append(t)
            continue
        for pid in _contained(tp.walk, by_first):
            covering[pid].append(t)
    uncovered = [i for i, ts in covering.items() if not ts]
    cov = 1.0 if not ordered else (len(ordered) - len(uncovered)) / len(ordered)
    return CoverageReport(covering, uncovered, invalid, cov)


def tp_payload(g: Cfg, tps: Sequence[TestPath], pps: Iterable[Path]) -> dict:
    ordered = pp_order(pps)
    rep = verify_coverage(g, tps, ordered)
    return {
        "test_paths": [{"walk": g.label(t.walk), "covers": sorted(t.covered)} for t in tps],
        "coverage": rep.coverage,
        "prime_paths": [g.label(p) for p in ordered],
    }
