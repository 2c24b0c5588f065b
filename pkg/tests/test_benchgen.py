import pytest
from hypothesis import given, settings, strategies as st

from ppforge.benchgen import FAMILIES, BenchSpec, gen_family, gen_random_cfg
from ppforge.cfg import max_outdegree, validate_cfg
from ppforge.metrics import cyclomatic, npath
from ppforge.oracle import OracleLimitExceeded, OracleLimits, oracle_pps
from ppforge.scc import tarjan_scc
from ppforge.vertexgen import generate_pps


def test_single_loop_three_cycles():
    g = gen_family(BenchSpec("single-loop", 3))
    pps = oracle_pps(g)
    assert sum(1 for p in pps if p[0] == p[-1]) == 3 and len(pps) == 6


def test_sequential_if_metrics():
    g = gen_family(BenchSpec("sequential-if", 3))
    assert npath(g) == 8 and cyclomatic(g) == 4


def test_sequential_loops_two_sccs():
    assert len(tarjan_scc(gen_family(BenchSpec("sequential-loops", 2, 2))).nontrivial) == 2


@pytest.mark.parametrize("K,N", [(1, 1), (2, 2), (3, 1), (4, 2)])
def test_sequential_loops_count_formula(K, N):
    g = gen_family(BenchSpec("sequential-loops", K, N))
    assert len(oracle_pps(g)) == 1 + K * (N + 1) + 2 * K + K * (K - 1) // 2


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("K", [1, 2, 3, 4])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_families_valid_and_match_oracle(family, K, N):
    g = gen_family(BenchSpec(family, K, N, seed=K * 7 + N))
    assert validate_cfg(g) == [] and max_outdegree(g) <= 2
    try:
        ref = oracle_pps(g, OracleLimits(max_vertices=40, time_budget=5))
    except OracleLimitExceeded:
        pytest.skip("beyond oracle limits")
    assert generate_pps(g) == ref


@pytest.mark.parametrize("family", FAMILIES)
def test_byte_stable(family):
    a = gen_family(BenchSpec(family, 3, 2, seed=5)).dumps()
    assert a == gen_family(BenchSpec(family, 3, 2, seed=5)).dumps()


@pytest.mark.parametrize("spec", [BenchSpec("nested-if", 0), BenchSpec("single-loop", 2, 0),
                                  BenchSpec("spiral", 2)])
def test_bad_parameters(spec):
    with pytest.raises(ValueError):
        gen_family(spec)


def test_random_deterministic():
    assert gen_random_cfg(10, seed=7) == gen_random_cfg(10, seed=7)


def test_random_needs_two_vertices():
    with pytest.raises(ValueError):
        gen_random_cfg(1)


def test_thousand_random_graphs_validate():
    for seed in range(1000):
        g = gen_random_cfg(12, 0.3, seed)
        assert validate_cfg(g) == [] and max_outdegree(g) <= 2


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_zero_bias_is_acyclic(n, seed):
    assert tarjan_scc(gen_random_cfg(n, 0.0, seed)).nontrivial == ()
