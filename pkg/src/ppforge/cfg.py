"""Control-flow graph model, parsing, validation and CSR layout."""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

SYNTHETIC_END = "<end>"


class CfgParseError(ValueError):
    """Malformed graph description. ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(message + where)


class InvalidCfg(ValueError):
    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class Cfg:
    """A control-flow graph over dense vertex ids ``0..len(names)-1``.

    Arc order is significant: the first arc out of a vertex is its left
    successor, the second its right successor.
    """

    names: tuple[str, ...]
    arcs: tuple[tuple[int, int], ...]
    start: int
    end: int
    synthetic: frozenset[int] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.names)

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.names]
        for a, b in self.arcs:
            out[a].append(b)
        return tuple(tuple(s) for s in out)

    @cached_property
    def pred(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.names]
        for a, b in self.arcs:
            inc[b].append(a)
        return tuple(tuple(p) for p in inc)

    @cached_property
    def arc_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.arcs)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def vid(self, name: str) -> int:
        return self.index[name]

    def ids(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index[n] for n in names)

    def label(self, path: Iterable[int]) -> list[str]:
        return [self.names[v] for v in path]

    def has_path(self, path: Sequence[int]) -> bool:
        arcs = self.arc_set
        return all((a, b) in arcs for a, b in zip(path, path[1:]))

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": n} for n in self.names],
            "arcs": [[self.names[a], self.names[b]] for a, b in self.arcs],
            "start": self.names[self.start],
            "ends": [self.names[self.end]],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1) + "\n"


def make_cfg(names: Sequence[str], arcs: Iterable[tuple[str, str]], start: str,
             end: str) -> Cfg:
    """Build a Cfg from display names; handy in tests and generators."""
    idx = {n: i for i, n in enumerate(names)}
    return Cfg(tuple(names), tuple((idx[a], idx[b]) for a, b in arcs), idx[start], idx[end])


# ---------------------------------------------------------------- parsing

def parse_cfg(text: str, format: str = "auto") -> Cfg:
    """Parse an edge-list JSON document or a DOT subset into a Cfg.

    Several declared end vertices are merged into one synthetic end vertex
    reached by an extra arc from each of them.
    """
    if format == "auto":
        format = "dot-subset" if text.lstrip().startswith(("digraph", "strict", "//")) else "edge-list-json"
    if format in ("edge-list-json", "json"):
        vertices, arcs, start, ends = _parse_json(text)
    elif format in ("dot-subset", "dot"):
        vertices, arcs, start, ends = _parse_dot(text)
    else:
        raise ValueError(f"unknown format {format!r}")
    return _assemble(vertices, arcs, start, ends)


def _parse_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CfgParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise CfgParseError("top-level value must be an object")
    vertices = []
    for item in doc.get("vertices", []):
        if isinstance(item, dict) and "id" in item:
            vertices.append(str(item["id"]))
        elif isinstance(item, (str, int)):
            vertices.append(str(item))
        else:
            raise CfgParseError(f"bad vertex entry {item!r}")
    arcs = []
    for item in doc.get("arcs", []):
        if not (isinstance(item, list) and len(item) == 2):
            raise CfgParseError(f"bad arc entry {item!r}")
        arcs.append((str(item[0]), str(item[1])))
    start = doc.get("start")
    ends = doc.get("ends", doc.get("end"))
    if isinstance(ends, (str, int)):
        ends = [ends]
    return vertices, arcs, None if start is None else str(start), [str(e) for e in ends or []]


_DOT_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<arrow>->)
  | (?P<punct>[{}\[\];,=])
  | (?P<id>[A-Za-z0-9_.]+|"(?:[^"\\]|\\.)*")
""", re.VERBOSE | re.DOTALL)


def _dot_tokens(text: str):
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _DOT_TOKEN.match(text, pos)
        if not m:
            raise CfgParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "id" and value.startswith('"'):
                value = bytes(value[1:-1], "utf-8").decode("unicode_escape")
            yield kind, value, line, m.start() - line_start + 1
        nl = value.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = m.start() + value.rfind("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


def _parse_dot(text: str):
    toks = list(_dot_tokens(text))
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, value=None):
        nonlocal i
        tok = toks[i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise CfgParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        i += 1
        return tok

    if peek()[1] == "strict":
        take()
    take("id", "digraph")
    if peek()[0] == "id":
        take()
    take("punct", "{")
    vertices: list[str] = []
    seen: set[str] = set()
    arcs: list[tuple[str, str]] = []
    start = None
    ends: list[str] = []

    def declare(name):
        if name not in seen:
            seen.add(name)
            vertices.append(name)

    def attrs():
        out = {}
        if peek()[1] != "[":
            return out
        take("punct", "[")
        while peek()[1] != "]":
            key = take("id")[1]
            take("punct", "=")
            out[key] = take("id")[1]
            if peek()[1] in (",", ";"):
                take()
        take("punct", "]")
        return out

    while peek()[1] != "}":
        if peek()[0] == "eof":
            tok = peek()
            raise CfgParseError("missing closing '}'", tok[2], tok[3])
        tok = take("id")
        if tok[1] in ("subgraph", "graph", "node", "edge"):
            raise CfgParseError(f"unsupported statement {tok[1]!r}", tok[2], tok[3])
        chain = [tok[1]]
        while peek()[0] == "arrow":
            take("arrow")
            chain.append(take("id")[1])
        a = attrs()
        for name in chain:
            declare(name)
        if len(chain) == 1:
            role = a.get("role")
            if role == "start":
                if start is not None and start != chain[0]:
                    raise CfgParseError("more than one start vertex", tok[2], tok[3])
                start = chain[0]
            elif role == "end":
                ends.append(chain[0])
            elif role is not None:
                raise CfgParseError(f"unknown role {role!r}", tok[2], tok[3])
        else:
            arcs.extend(zip(chain, chain[1:]))
        if peek()[1] == ";":
            take()
    take("punct", "}")
    if peek()[0] != "eof":
        tok = peek()
        raise CfgParseError("trailing input after graph", tok[2], tok[3])
    return vertices, arcs, start, ends


def _assemble(vertices, arcs, start, ends) -> Cfg:
    if not vertices:
        raise CfgParseError("graph has no vertices")
    if len(set(vertices)) != len(vertices):
        raise CfgParseError("duplicate vertex id")
    idx = {n: i for i, n in enumerate(vertices)}
    if start is None:
        raise CfgParseError("no start vertex")
    if not ends:
        raise CfgParseError("no end vertex")
    for name in [start, *ends]:
        if name not in idx:
            raise CfgParseError(f"start/end vertex {name!r} is not declared")
    seen = set()
    dense = []
    for a, b in arcs:
        for name in (a, b):
            if name not in idx:
                raise CfgParseError(f"arc {a}->{b} uses undeclared vertex {name!r}")
        arc = (idx[a], idx[b])
        if arc in seen:
            raise CfgParseError(f"duplicate arc {a}->{b}")
        seen.add(arc)
        dense.append(arc)
    names = list(vertices)
    synthetic = set()
    ends = list(dict.fromkeys(ends))
    if len(ends) == 1:
        end = idx[ends[0]]
    else:
        end = len(names)
        names.append(SYNTHETIC_END)
        synthetic.add(end)
        dense.extend((idx[e], end) for e in ends)
    return Cfg(tuple(names), tuple(dense), idx[start], end, frozenset(synthetic))


# ------------------------------------------------------------- validation

def validate_cfg(g: Cfg) -> list[str]:
    """Return human-readable violations; an empty list means well-formed."""
    out = []
    indeg = len(g.pred[g.start])
    if indeg:
        out.append(f"start has in-degree {indeg}")
    outdeg = len(g.succ[g.end])
    if outdeg:
        out.append(f"end has out-degree {outdeg}")
    if len(set(g.arcs)) != len(g.arcs):
        out.append("duplicate arcs")
    for v in (g.start, g.end):
        if (v, v) in g.arc_set:
            out.append(f"self-loop at {g.names[v]}")
    fwd = _reach(g.start, g.succ)
    back = _reach(g.end, g.pred)
    for v in range(len(g)):
        if v not in fwd:
            out.append(f"{g.names[v]} unreachable from start")
        if v not in back:
            out.append(f"{g.names[v]} cannot reach end")
    return out


def _reach(src: int, adj) -> set[int]:
    seen = {src}
    todo = deque([src])
    while todo:
        v = todo.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def require_valid(g: Cfg) -> None:
    diags = validate_cfg(g)
    if diags:
        raise InvalidCfg(diags)


# ----------------------------------------------------------- normalization

def max_outdegree(g: Cfg) -> int:
    return max((len(s) for s in g.succ), default=0)


def normalize_outdegree(g: Cfg) -> tuple[Cfg, dict[int, int]]:
    """Split every branch wider than two into a chain of binary branches.

    ``v -> a, b, c`` becomes ``v -> a, v -> m1, m1 -> b, m1 -> c``.  Original
    ids are kept, so the returned old->new mapping is the identity; the fresh
    vertices are appended and tagged synthetic.
    """
    names = list(g.names)
    synthetic = set(g.synthetic)
    arcs: list[tuple[int, int]] = []
    for v in range(len(g)):
        succ = list(g.succ[v])
        src = v
        while len(succ) > 2:
            arcs.append((src, succ.pop(0)))
            m = len(names)
            names.append(f"{g.names[v]}~{m - len(g) + 1}")
            synthetic.add(m)
            arcs.append((src, m))
            src = m
        arcs.extend((src, w) for w in succ)
    if len(names) == len(g):
        return g, {v: v for v in range(len(g))}
    out = Cfg(tuple(names), tuple(arcs), g.start, g.end, frozenset(synthetic))
    return out, {v: v for v in range(len(g))}


def erase_synthetic(path: Sequence[int], synthetic: frozenset[int] | set[int]) -> tuple[int, ...]:
    return tuple(v for v in path if v not in synthetic)


# -------------------------------------------------------------------- CSR

@dataclass(frozen=True)
class CsrGraph:
    """Predecessor- and successor-oriented compressed adjacency.

    The predecessor block of ``v`` is ``pred_list[pred_index[v]:pred_index[v+1]]``
    and starts with ``v`` itself, followed by its predecessors.  Worker ``t``
    owns vertex ``worker_vertex[t]``.
    """

    n: int
    pred_index: tuple[int, ...]
    pred_list: tuple[int, ...]
    succ_index: tuple[int, ...]
    succ_list: tuple[int, ...]
    worker_vertex: tuple[int, ...]

    @classmethod
    def from_arcs(cls, n: int, arcs: Sequence[tuple[int, int]]) -> "CsrGraph":
        preds: list[list[int]] = [[] for _ in range(n)]
        succs: list[list[int]] = [[] for _ in range(n)]
        for a, b in arcs:
            succs[a].append(b)
            preds[b].append(a)
        pred_index, pred_list = [0], []
        for v in range(n):
            pred_list.append(v)
            pred_list.extend(preds[v])
            pred_index.append(len(pred_list))
        succ_index, succ_list = [0], []
        for v in range(n):
            succ_list.extend(succs[v])
            succ_index.append(len(succ_list))
        return cls(n, tuple(pred_index), tuple(pred_list), tuple(succ_index),
                   tuple(succ_list), tuple(range(n)))

    def preds(self, v: int) -> tuple[int, ...]:
        return self.pred_list[self.pred_index[v] + 1:self.pred_index[v + 1]]

    def pred_block(self, v: int) -> tuple[int, ...]:
        return self.pred_list[self.pred_index[v]:self.pred_index[v + 1]]

    def succs(self, v: int) -> tuple[int, ...]:
        return self.succ_list[self.succ_index[v]:self.succ_index[v + 1]]

    def arcs(self) -> set[tuple[int, int]]:
        return {(u, v) for v in range(self.n) for u in self.preds(v)}


def build_csr(g: Cfg) -> CsrGraph:
    return CsrGraph.from_arcs(len(g), g.arcs)
