"""Brute-force reference enumeration of simple paths and prime paths.

Deliberately exponential and deliberately simple: it shares no code with the
vertex-worker generator so the two can check each other.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable

from .cfg import Cfg

Path = tuple[int, ...]


@dataclass(frozen=True)
class OracleLimits:
    max_vertices: int = 14
    max_paths: int = 2_000_000
    time_budget: float = 60.0


class OracleLimitExceeded(RuntimeError):
    """Raised instead of returning a truncated answer; ``partial`` holds what
    was enumerated before the limit tripped."""

    def __init__(self, reason: str, partial: set[Path]):
        self.reason = reason
        self.partial = partial
        super().__init__(f"oracle limit exceeded: {reason} ({len(partial)} paths so far)")


def enumerate_simple_paths(g: Cfg, lim: OracleLimits = OracleLimits()) -> set[Path]:
    if len(g) > lim.max_vertices:
        raise OracleLimitExceeded(f"{len(g)} vertices > {lim.max_vertices}", set())
    deadline = time.monotonic() + lim.time_budget
    out: set[Path] = set()
    succ = g.succ

    def guard():
        if len(out) > lim.max_paths:
            raise OracleLimitExceeded(f"more than {lim.max_paths} paths", out)
        if time.monotonic() > deadline:
            raise OracleLimitExceeded(f"time budget {lim.time_budget}s", out)

    for first in range(len(g)):
        path = [first]
        on_path = {first}
        out.add((first,))
        # explicit stack of successor iterators
        stack = [iter(succ[first])]
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if w == first:
                out.add(tuple(path) + (first,))
                continue
            if w in on_path:
                continue
            path.append(w)
            on_path.add(w)
            out.add(tuple(path))
            stack.append(iter(succ[w]))
            if len(out) & 0xFFF == 0:
                guard()
        guard()
    return out


def maximal(paths: Iterable[Path]) -> set[Path]:
    """Keep paths that are not a proper contiguous subpath of another."""
    paths = set(paths)
    inner: set[Path] = set()
    for p in paths:
        n = len(p)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if j - i < n:
                    inner.add(p[i:j])
    return paths - inner


def oracle_pps(g: Cfg, lim: OracleLimits = OracleLimits()) -> set[Path]:
    return maximal(enumerate_simple_paths(g, lim))


def classify_by_definition(g: Cfg, pps: Iterable[Path], scc_of, nontrivial) -> dict[str, set[Path]]:
    """Split PPs into complete / internal / exit / entry by where they start and end.

    A cyclic path, or one that stays inside one nontrivial component, is
    internal.  Of the rest: Start to End is complete, anything ending at End
    is an exit PP and everything else is an entry PP.
    """
    out: dict[str, set[Path]] = {"complete": set(), "internal": set(), "exit": set(), "entry": set()}
    for p in pps:
        comps = {scc_of[v] for v in p}
        if (len(p) > 1 and p[0] == p[-1]) or (len(comps) == 1 and next(iter(comps)) in nontrivial):
            out["internal"].add(p)
        elif p[0] == g.start and p[-1] == g.end:
            out["complete"].add(p)
        elif p[-1] == g.end:
            out["exit"].add(p)
        else:
            out["entry"].add(p)
    return out
