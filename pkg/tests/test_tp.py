import pytest
from hypothesis import given, settings, strategies as st

from ppforge.benchgen import gen_random_cfg
from ppforge.cfg import make_cfg
from ppforge.compose import generate_pps_compositional
from ppforge.oracle import oracle_pps
from ppforge.tp import (TestPath, UnreachableError, generate_test_paths, pp_order, shortest_walk,
                        tp_payload, verify_coverage, walk_is_valid)


def _tp(g, *names):
    return g.label(generate_test_paths(g, [g.ids(names)])[0].walk)


def test_shortest_walk_start_to_8(binsearch):
    w = shortest_walk(binsearch, binsearch.start, binsearch.vid("8"))
    assert binsearch.label(w) == ["Start", "1", "2", "3", "4", "8"]


def test_shortest_walk_to_self(binsearch):
    assert shortest_walk(binsearch, 3, 3) == (3,)


def test_shortest_walk_unreachable(binsearch):
    with pytest.raises(UnreachableError):
        shortest_walk(binsearch, binsearch.end, binsearch.start)


def test_complete_pp_is_its_own_tp(binsearch):
    assert _tp(binsearch, "Start", "1", "2", "9", "End") == ["Start", "1", "2", "9", "End"]


def test_cyclic_pp_is_wrapped(binsearch):
    assert _tp(binsearch, "8", "2", "3", "4", "8") == \
        ["Start", "1", "2", "3", "4", "8", "2", "3", "4", "8", "2", "9", "End"]


def test_binsearch_full_cover(binsearch):
    pps = generate_pps_compositional(binsearch).all_pps()
    tps = generate_test_paths(binsearch, pps)
    assert len(tps) <= 19
    rep = verify_coverage(binsearch, tps, pps)
    assert rep.coverage == 1.0 and rep.complete and rep.invalid == []


def test_no_test_paths_means_no_coverage(binsearch):
    rep = verify_coverage(binsearch, [], oracle_pps(binsearch))
    assert rep.coverage == 0.0 and len(rep.uncovered) == 19


def test_non_arc_step_flagged(binsearch):
    bad = TestPath(binsearch.ids(["Start", "1", "9", "End"]))
    assert verify_coverage(binsearch, [bad], oracle_pps(binsearch)).invalid == [0]


def test_line_graph_one_tp():
    g = make_cfg(list("sabe"), [("s", "a"), ("a", "b"), ("b", "e")], "s", "e")
    assert len(generate_test_paths(g, oracle_pps(g))) == 1


def test_payload(binsearch):
    pps = oracle_pps(binsearch)
    body = tp_payload(binsearch, generate_test_paths(binsearch, pps), pps)
    assert body["coverage"] == 1.0 and len(body["prime_paths"]) == 19
    assert all(w["walk"][0] == "Start" for w in body["test_paths"])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.floats(0, 0.7), st.integers(0, 10**6))
def test_random_full_coverage(n, bias, seed):
    g = gen_random_cfg(n, bias, seed)
    pps = oracle_pps(g)
    tps = generate_test_paths(g, pps)
    ordered = pp_order(pps)
    for tp in tps:
        assert walk_is_valid(g, tp.walk)
        for pid in tp.covered:
            p = ordered[pid]
            assert any(tp.walk[i:i + len(p)] == p for i in range(len(tp.walk)))
    assert verify_coverage(g, tps, pps).coverage == 1.0
    assert generate_test_paths(g, list(reversed(ordered))) == tps
