"""Synthetic control-flow graphs for benchmarks and fuzzing.

Family wiring (all graphs have a single Start and End and out-degree <= 2):

sequential-if     K if-then blocks in a row: c_i -> t_i -> c_{i+1} and
                  c_i -> c_{i+1}.
nested-if         K conditions nested in the then-branch: c_i -> c_{i+1},
                  every c_i -> j, innermost c_K -> t -> j, then j -> End.
sequential-loops  K while loops in a row, each a header h_i with an N-vertex
                  body chain back to h_i; h_i also falls through to h_{i+1}.
nested-loops      K loops nested inside each other.  Level i is a header h_i
                  and an N-vertex body ending in the next header; each inner
                  header exits through latch l_{i-1} back to h_{i-1}.
single-loop       one K-vertex cycle v_1..v_K entered and left at v_1.
mixed-random      K while loops in a row with random structured bodies of N
                  statements (if-then, if-else, inner loops) and a few
                  diamonds between loops.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .cfg import Cfg, make_cfg, validate_cfg

FAMILIES = ("nested-if", "sequential-if", "sequential-loops", "nested-loops", "single-loop", "mixed-random")


@dataclass(frozen=True)
class BenchSpec:
    family: str
    K: int = 1
    N: int = 1
    seed: int = 0


class _Builder:
    def __init__(self):
        self.names: list[str] = ["Start"]
        self.arcs: list[tuple[str, str]] = []

    def add(self, name: str) -> str:
        self.names.append(name)
        return name

    def arc(self, a: str, b: str) -> None:
        self.arcs.append((a, b))

    def finish(self, last: str | list[str]) -> Cfg:
        self.names.append("End")
        for v in [last] if isinstance(last, str) else last:
            self.arc(v, "End")
        return make_cfg(self.names, self.arcs, "Start", "End")


def gen_family(spec: BenchSpec) -> Cfg:
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}")
    if spec.K < 1 or spec.N < 1:
        raise ValueError("K and N must be at least 1")
    return globals()["_gen_" + spec.family.replace("-", "_")](spec)


def _gen_sequential_if(spec: BenchSpec) -> Cfg:
    b = _Builder()
    conds = [b.add(f"c{i}") for i in range(1, spec.K + 1)]
    thens = [b.add(f"t{i}") for i in range(1, spec.K + 1)]
    b.arc("Start", conds[0])
    for i, (c, t) in enumerate(zip(conds, thens)):
        nxt = conds[i + 1] if i + 1 < spec.K else "End"
        b.arc(c, t)
        b.arc(c, nxt)
        b.arc(t, nxt)
    b.names.append("End")
    return make_cfg(b.names, b.arcs, "Start", "End")


def _gen_nested_if(spec: BenchSpec) -> Cfg:
    b = _Builder()
    conds = [b.add(f"c{i}") for i in range(1, spec.K + 1)]
    t, j = b.add("t"), b.add("j")
    b.arc("Start", conds[0])
    for a, nxt in zip(conds, conds[1:]):
        b.arc(a, nxt)
        b.arc(a, j)
    b.arc(conds[-1], t)
    b.arc(conds[-1], j)
    b.arc(t, j)
    return b.finish(j)


def _gen_sequential_loops(spec: BenchSpec) -> Cfg:
    b = _Builder()
    prev = "Start"
    for i in range(1, spec.K + 1):
        h = b.add(f"h{i}")
        b.arc(prev, h)
        body = [b.add(f"b{i}_{k}") for k in range(1, spec.N + 1)]
        b.arc(h, body[0])
        for x, y in zip(body, body[1:]):
            b.arc(x, y)
        b.arc(body[-1], h)
        prev = h
    return b.finish(prev)


def _gen_nested_loops(spec: BenchSpec) -> Cfg:
    b = _Builder()
    heads = [b.add(f"h{i}") for i in range(1, spec.K + 1)]
    latches = [b.add(f"l{i}") for i in range(1, spec.K)]
    b.arc("Start", heads[0])
    for i, h in enumerate(heads):
        body = [b.add(f"b{i + 1}_{k}") for k in range(1, spec.N + 1)]
        b.arc(h, body[0])
        for x, y in zip(body, body[1:]):
            b.arc(x, y)
        b.arc(body[-1], heads[i + 1] if i + 1 < spec.K else h)
        if i > 0:
            b.arc(h, latches[i - 1])
            b.arc(latches[i - 1], heads[i - 1])
    return b.finish(heads[0])


def _gen_single_loop(spec: BenchSpec) -> Cfg:
    b = _Builder()
    vs = [b.add(f"v{i}") for i in range(1, spec.K + 1)]
    b.arc("Start", vs[0])
    for x, y in zip(vs, vs[1:]):
        b.arc(x, y)
    b.arc(vs[-1], vs[0])
    return b.finish(vs[0])


def _gen_mixed_random(spec: BenchSpec) -> Cfg:
    rng = random.Random(spec.seed)
    b = _Builder()
    counter = [0]

    def fresh(tag: str) -> str:
        counter[0] += 1
        return b.add(f"{tag}{counter[0]}")

    def stmt(entry: str, depth: int) -> str:
        """Append one statement after ``entry``; return its exit vertex."""
        r = rng.random()
        if depth >= 2 or r < 0.45:
            v = fresh("s")
            b.arc(entry, v)
            return v
        if r < 0.65:  # if-then
            c, t, j = fresh("c"), fresh("t"), fresh("j")
            b.arc(entry, c)
            b.arc(c, t)
            b.arc(c, j)
            b.arc(t, j)
            return j
        if r < 0.85:  # if-else
            c, t, e, j = fresh("c"), fresh("t"), fresh("e"), fresh("j")
            b.arc(entry, c)
            b.arc(c, t)
            b.arc(c, e)
            b.arc(t, j)
            b.arc(e, j)
            return j
        return loop(entry, 2, depth + 1)

    def loop(entry: str, body_len: int, depth: int) -> str:
        h = fresh("h")
        b.arc(entry, h)
        cur = h
        for _ in range(body_len):
            cur = stmt(cur, depth)
        b.arc(cur, h)
        x = fresh("x")
        b.arc(h, x)
        return x

    cur = "Start"
    diamonds = 0
    for _ in range(spec.K):
        if diamonds < 8 and rng.random() < 0.5:
            diamonds += 1
            c, t, j = fresh("c"), fresh("t"), fresh("j")
            b.arc(cur, c)
            b.arc(c, t)
            b.arc(c, j)
            b.arc(t, j)
            cur = j
        cur = loop(cur, spec.N, 0)
    return b.finish(cur)


def gen_random_cfg(v_count: int, loop_bias: float = 0.3, seed: int = 0,
                   max_tries: int = 100) -> Cfg:
    """Random CFG on ``v_count`` vertices, out-degree <= 2, vertex 0 is
    Start and the last vertex End.  ``loop_bias`` is the chance that a vertex
    gets a back arc; 0 gives a DAG."""
    if v_count < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    for _ in range(max_tries):
        g = _random_attempt(v_count, loop_bias, rng)
        if not validate_cfg(g):
            return g
    raise RuntimeError("could not generate a valid CFG")


def _random_attempt(n: int, loop_bias: float, rng: random.Random) -> Cfg:
    end = n - 1
    succ: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        open_ = [u for u in range(v) if len(succ[u]) < 2]
        succ[rng.choice(open_)].append(v)
    for v in range(n - 1):
        if not succ[v]:
            succ[v].append(rng.randrange(v + 1, n))
    for v in range(1, n - 1):
        if len(succ[v]) >= 2:
            continue
        if rng.random() < loop_bias:
            w = rng.randint(1, v)
        elif rng.random() < 0.3:
            w = rng.randrange(v + 1, n)
        else:
            continue
        if w not in succ[v]:
            succ[v].append(w)
    names = ["Start"] + [str(i) for i in range(1, end)] + ["End"]
    arcs = [(names[a], names[b]) for a in range(n) for b in succ[a]]
    return make_cfg(names, arcs, "Start", "End")
