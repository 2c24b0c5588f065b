import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ppforge.benchgen import gen_random_cfg
from ppforge.cfg import make_cfg
from ppforge.scc import (backward_reachable, build_ccfg, entry_exit_vertices, tarjan_scc,
                         topological_order)


def _reach(g):
    reach = []
    for v in range(len(g)):
        seen, todo = {v}, [v]
        while todo:
            x = todo.pop()
            for w in g.succ[x]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        reach.append(seen)
    return reach


def test_binsearch_scc(binsearch):
    d = tarjan_scc(binsearch)
    assert len(d.nontrivial) == 1
    c = d.nontrivial[0]
    assert sorted(binsearch.label(d.members[c])) == sorted("234568")
    assert all(len(d.members[k]) == 1 for k in range(len(d.members)) if k != c)
    assert d.name(c) == "SCC1"


def test_dag_has_only_singletons():
    g = make_cfg(list("sabe"), [("s", "a"), ("s", "b"), ("a", "e"), ("b", "e")], "s", "e")
    d = tarjan_scc(g)
    assert d.nontrivial == () and len(d.members) == 4


def test_self_loop_counts_as_nontrivial():
    g = make_cfg(list("sae"), [("s", "a"), ("a", "a"), ("a", "e")], "s", "e")
    d = tarjan_scc(g)
    assert [d.members[c] for c in d.nontrivial] == [(1,)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.floats(0, 1))
def test_partition_is_mutual_reachability(seed, bias):
    g = gen_random_cfg(30, bias, seed)
    d = tarjan_scc(g)
    reach = _reach(g)
    for u, v in itertools.combinations(range(len(g)), 2):
        assert (d.scc_of[u] == d.scc_of[v]) == (v in reach[u] and u in reach[v])
    assert sorted(v for m in d.members for v in m) == list(range(len(g)))


def test_ccfg_binsearch(binsearch):
    d = tarjan_scc(binsearch)
    cc = build_ccfg(binsearch, d).graph
    assert sorted(cc.names) == sorted(["Start", "1", "SCC1", "7", "9", "End"])
    arcs = {(cc.names[a], cc.names[b]) for a, b in cc.arcs}
    assert arcs == {("Start", "1"), ("1", "SCC1"), ("SCC1", "9"), ("SCC1", "7"), ("9", "End"),
                    ("7", "End")}


def test_ccfg_of_dag_is_isomorphic():
    g = make_cfg(list("sabe"), [("s", "a"), ("s", "b"), ("a", "e"), ("b", "e")], "s", "e")
    cc = build_ccfg(g, tarjan_scc(g)).graph
    assert {(cc.names[a], cc.names[b]) for a, b in cc.arcs} == {(g.names[a], g.names[b]) for a, b in g.arcs}


def test_ccfg_of_attached_triangle():
    g = make_cfg(["S", "a", "b", "c", "E"],
                 [("S", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "E")], "S", "E")
    cc = build_ccfg(g, tarjan_scc(g)).graph
    assert cc.names == ("S", "SCC1", "E")
    assert set(cc.arcs) == {(0, 1), (1, 2)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.floats(0, 1))
def test_ccfg_is_acyclic(seed, bias):
    g = gen_random_cfg(25, bias, seed)
    cc = build_ccfg(g, tarjan_scc(g)).graph
    assert topological_order(cc) is not None


def test_binsearch_entries_exits(binsearch):
    d = tarjan_scc(binsearch)
    en, ex = entry_exit_vertices(binsearch, d, d.nontrivial[0])
    assert binsearch.label(sorted(en)) == ["2"]
    assert binsearch.label(sorted(ex)) == ["2", "5"]


def test_whole_graph_scc_has_no_entries_or_exits():
    g = make_cfg(list("abc"), [("a", "b"), ("b", "c"), ("c", "a")], "a", "a")
    d = tarjan_scc(g)
    assert entry_exit_vertices(g, d, 0) == (frozenset(), frozenset())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.floats(0, 1))
def test_entries_exits_match_arc_scan(seed, bias):
    g = gen_random_cfg(20, bias, seed)
    d = tarjan_scc(g)
    for c in range(len(d.members)):
        mem = set(d.members[c])
        en, ex = entry_exit_vertices(g, d, c)
        assert en == {b for a, b in g.arcs if b in mem and a not in mem}
        assert ex == {a for a, b in g.arcs if a in mem and b not in mem}
        assert en | ex <= mem


def test_backward_reachable_binsearch(binsearch):
    got = backward_reachable(binsearch, binsearch.vid("9"))
    assert sorted(binsearch.label(got)) == sorted(["Start", "1", "2", "3", "4", "5", "6", "8"])
    assert backward_reachable(binsearch, binsearch.start) == frozenset()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.floats(0, 1))
def test_backward_reachable_is_transposed_reach(seed, bias):
    g = gen_random_cfg(20, bias, seed)
    reach = _reach(g)
    for v in range(len(g)):
        back = backward_reachable(g, v)
        assert v not in back
        assert back == {u for u in range(len(g)) if u != v and v in reach[u]}
