import pytest
from hypothesis import given, settings, strategies as st

from conftest import COMPLETE, ENTRY, EXIT, INTERNAL, named
from ppforge.benchgen import BenchSpec, gen_family, gen_random_cfg
from ppforge.cfg import make_cfg, parse_cfg
from ppforge.compose import (erase_synthetic, extract_entry_exit_paths, extract_entry_paths,
                             extract_exit_paths, generate_pps_compositional,
                             generate_pps_direct, generate_report, merge_complete_pps,
                             merge_entry_pps, merge_exit_pps)
from ppforge.oracle import classify_by_definition, enumerate_simple_paths, oracle_pps
from ppforge.scc import build_ccfg, entry_exit_vertices, scc_subgraph, tarjan_scc
from ppforge.vertexgen import Schedule, generate_pps


def _stages(g):
    d = tarjan_scc(g)
    c = d.nontrivial[0]
    sub, mem = scc_subgraph(g, d, c)
    raw = {tuple(mem[v] for v in p) for p in generate_pps(sub)}
    en, ex = entry_exit_vertices(g, d, c)
    return d, c, raw, en, ex


def _ids(g, *paths):
    return {g.ids(p.split()) for p in paths}


def test_binsearch_entry_exit_paths(binsearch):
    _, _, raw, en, ex = _stages(binsearch)
    got = set()
    for a in en:
        for b in ex:
            got |= extract_entry_exit_paths(raw, a, b)
    assert got == _ids(binsearch, "2", "2 3 5")


def test_binsearch_exit_paths(binsearch):
    _, _, raw, en, ex = _stages(binsearch)
    assert extract_exit_paths(raw, ex, en) == _ids(binsearch, "3 5 6 8 2", "3 4 8 2",
                                                   "4 8 2 3 5", "6 8 2 3 5")


def test_binsearch_entry_paths(binsearch):
    _, _, raw, en, ex = _stages(binsearch)
    assert extract_entry_paths(raw, en, ex) == _ids(binsearch, "2 3 4 8", "2 3 5 6 8")


def test_entry_equals_exit_gives_singleton():
    assert extract_entry_exit_paths({(0, 1, 0)}, 0, 0) == {(0,)}


def test_empty_borders():
    assert extract_exit_paths({(0, 1, 0)}, ()) == set()
    assert extract_entry_paths({(0, 1, 0)}, ()) == set()


def test_two_cycle_exit_paths():
    # entry a, exit b: the only non-entry start is b, and b's in-component
    # predecessor a is not on <b>, so the stretch can be extended backwards
    assert extract_exit_paths({(0, 1, 0), (1, 0, 1)}, {1}, {0}) == set()


def test_binsearch_merging(binsearch):
    d, c, raw, en, ex = _stages(binsearch)
    cc = build_ccfg(binsearch, d)
    ccfg_pps = {tuple(cc.comp_of_vertex[v] for v in p) for p in generate_pps(cc.graph)}
    ee = {c: {p for a in en for b in ex for p in extract_entry_exit_paths(raw, a, b)}}
    complete = merge_complete_pps(ccfg_pps, ee, binsearch, d)
    assert named(binsearch, complete) == COMPLETE
    exits = merge_exit_pps(complete, {c: extract_exit_paths(raw, ex, en)}, binsearch, d)
    assert named(binsearch, exits) == EXIT
    entries = merge_entry_pps(complete | exits, {c: extract_entry_paths(raw, en, ex)}, binsearch, d)
    assert named(binsearch, entries) == ENTRY


def test_merging_without_components():
    g = make_cfg(list("sabe"), [("s", "a"), ("s", "b"), ("a", "e"), ("b", "e")], "s", "e")
    d = tarjan_scc(g)
    comp = {tuple(d.scc_of[v] for v in p) for p in oracle_pps(g)}
    assert merge_complete_pps(comp, {}, g, d) == oracle_pps(g)
    assert merge_exit_pps(oracle_pps(g), {}, g, d) == set()
    assert merge_entry_pps(oracle_pps(g), {}, g, d) == set()


@pytest.mark.parametrize("mode", ["compositional", "direct"])
def test_binsearch_report(binsearch, mode):
    rep = generate_report(binsearch, mode)
    assert rep.counts() == {"complete": 2, "internal": 11, "exit": 4, "entry": 2, "total": 19}
    assert named(binsearch, rep.internal_all()) == INTERNAL
    assert named(binsearch, rep.entry) == ENTRY
    assert rep.multi_entry == []


def test_payload_shape(binsearch):
    body = generate_pps_compositional(binsearch).payload()
    assert body["complete"] == [["Start", "1", "2", "3", "5", "7", "End"], ["Start", "1", "2", "9", "End"]]
    assert list(body["internal"]) == ["scc1"] and len(body["internal"]["scc1"]) == 11
    assert body["total"] == 19


def test_acyclic_cfg_is_all_complete():
    g = gen_family(BenchSpec("sequential-if", 3))
    rep = generate_pps_compositional(g)
    assert rep.internal_all() == rep.exit == rep.entry == set()
    assert rep.complete == oracle_pps(g)
    assert generate_pps_direct(g).all_pps() == rep.all_pps()


def test_single_loop_modes_agree():
    g = gen_family(BenchSpec("single-loop", 5))
    assert generate_pps_direct(g).by_class() == generate_pps_compositional(g).by_class()


def test_transit_paths_are_entry_paths():
    g = gen_family(BenchSpec("sequential-loops", 2, 2))
    rep = generate_pps_compositional(g)
    assert rep.counts() == {"complete": 1, "internal": 6, "exit": 2, "entry": 3, "total": 12}
    assert named(g, rep.entry) == {("Start", "h1", "b1_1", "b1_2"),
                                   ("Start", "h1", "h2", "b2_1", "b2_2"),
                                   ("b1_1", "b1_2", "h1", "h2", "b2_1", "b2_2")}


def test_multi_entry_flagged():
    g = make_cfg(["S", "c", "a", "b", "E"],
                 [("S", "c"), ("c", "a"), ("c", "b"), ("a", "b"), ("b", "a"), ("b", "E")], "S", "E")
    rep = generate_pps_compositional(g)
    assert rep.payload()["multi_entry_sccs"] == ["SCC1"]
    assert rep.all_pps() == oracle_pps(g)


def test_wide_branching_is_normalized_and_erased():
    g = parse_cfg('{"vertices":[{"id":"S"},{"id":"a"},{"id":"b"},{"id":"c"},{"id":"E"}],'
                  '"arcs":[["S","a"],["S","b"],["S","c"],["a","E"],["b","E"],["c","E"],["c","a"]],'
                  '"start":"S","ends":["E"]}')
    rep = generate_pps_compositional(g)
    assert len(rep.graph) > len(g)
    back = erase_synthetic(rep, g)
    assert back.all_pps() == oracle_pps(g)


def _random(n, bias, seed):
    return gen_random_cfg(n, bias, seed)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.floats(0, 0.7), st.integers(0, 10**6))
def test_pipelines_match_oracle(n, bias, seed):
    g = _random(n, bias, seed)
    ref = oracle_pps(g)
    comp = generate_pps_compositional(g)
    assert comp.all_pps() == ref
    assert generate_pps_direct(g).all_pps() == ref
    d = tarjan_scc(g)
    cls = classify_by_definition(g, ref, d.scc_of, d.nontrivial_set)
    assert comp.complete == cls["complete"]
    assert comp.internal_all() == cls["internal"]
    assert comp.exit == cls["exit"]
    assert comp.entry == cls["entry"]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.floats(0, 0.7), st.integers(0, 10**6))
def test_classes_are_sound(n, bias, seed):
    g = _random(n, bias, seed)
    rep = generate_pps_compositional(g)
    d = tarjan_scc(g)
    classes = list(rep.by_class().values())
    assert sum(map(len, classes)) == len(rep.all_pps())
    for p in rep.complete:
        assert p[0] == g.start and p[-1] == g.end
    for c, ps in rep.internal.items():
        assert all(d.scc_of[v] == c for p in ps for v in p)
    for p in rep.exit:
        assert p[-1] == g.end and p[0] != g.start
    for p in rep.entry:
        assert p[-1] != g.end
        assert p[0] == g.start or d.is_nontrivial(d.scc_of[p[0]])
    for p in rep.all_pps():
        assert all((a, b) in g.arc_set for a, b in zip(p, p[1:]))


def _scc_oracle(g, d, c):
    """Acyclic simple paths of the component, found by brute force."""
    sub, mem = scc_subgraph(g, d, c)
    paths = {tuple(mem[v] for v in p) for p in enumerate_simple_paths(sub)}
    return {p for p in paths if not (len(p) > 1 and p[0] == p[-1])}


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.floats(0.2, 0.8), st.integers(0, 10**6))
def test_extraction_matches_brute_force(n, bias, seed):
    g = _random(n, bias, seed)
    d = tarjan_scc(g)
    for c in d.nontrivial:
        sub, mem = scc_subgraph(g, d, c)
        raw = {tuple(mem[v] for v in p) for p in generate_pps(sub)}
        en, ex = entry_exit_vertices(g, d, c)
        simple = _scc_oracle(g, d, c)
        inner_pred = {v: {u for u in g.pred[v] if d.scc_of[u] == c} for v in d.members[c]}
        inner_succ = {v: {w for w in g.succ[v] if d.scc_of[w] == c} for v in d.members[c]}
        for a in en:
            for b in ex:
                want = {(a,)} if a == b else {p for p in simple if p[0] == a and p[-1] == b}
                assert extract_entry_exit_paths(raw, a, b) == want
        assert extract_exit_paths(raw, ex, en) == {
            p for p in simple if p[-1] in ex and p[0] not in en and inner_pred[p[0]] <= set(p)}
        assert extract_entry_paths(raw, en, ex) == {
            p for p in simple if p[0] in en and p[-1] not in ex and inner_succ[p[-1]] <= set(p)}


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 12), st.floats(0.2, 0.7), st.integers(0, 10**6), st.integers(1, 4))
def test_parallel_compositional(n, bias, seed, workers):
    g = _random(n, bias, seed)
    a = generate_pps_compositional(g).by_class()
    b = generate_pps_compositional(g, Schedule("parallel", workers=workers)).by_class()
    assert a == b
