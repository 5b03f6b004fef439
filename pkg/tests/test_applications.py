import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partoracle.applications import (
    BudgetError,
    approx_config,
    approx_opt,
    exact_small_solver,
    is_planar_exact,
    test_planarity as planarity_tester,
    tester_config,
    verify_witness,
)
from partoracle.generators import grid, random_triangulation
from partoracle.graph import BoundedDegreeGraph
from partoracle.oracle import PartitionOracle


def complete(n):
    return {v: [u for u in range(n) if u != v] for v in range(n)}


def brute_force(adj, problem):
    vs = sorted(adj)
    sizes = [len(s) for r in range(len(vs) + 1) for s in itertools.combinations(vs, r) if verify_witness(adj, problem, s)]
    return max(sizes) if problem == "MIS" else min(sizes)


TRIANGLE = complete(3)
STAR = {0: [1, 2, 3, 4], 1: [0], 2: [0], 3: [0], 4: [0]}
EMPTY5 = {v: [] for v in range(5)}


@pytest.mark.parametrize(
    "adj,expected",
    [
        (TRIANGLE, {"VC": 2, "MIS": 1, "DS": 1}),
        (STAR, {"VC": 1, "MIS": 4, "DS": 1}),
        (EMPTY5, {"VC": 0, "MIS": 5, "DS": 5}),
    ],
)
def test_exact_solver_examples(adj, expected):
    for p, want in expected.items():
        sol = exact_small_solver(adj, p)
        assert sol.size == want == brute_force(adj, p)
        assert verify_witness(adj, p, sol.witness)


def test_star_witnesses():
    assert exact_small_solver(STAR, "VC").witness == {0}
    assert exact_small_solver(STAR, "MIS").witness == {1, 2, 3, 4}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 11), st.integers(0, 1 << 20), st.sampled_from(["VC", "MIS", "DS"]))
def test_exact_solver_matches_enumeration(n, seed, problem):
    g = random_triangulation(n, 5, seed)
    sol = exact_small_solver(g, problem)
    assert verify_witness(g, problem, sol.witness)
    adj = {v: list(nb) for v, nb in enumerate(g.adjacency())}
    assert sol.size == brute_force(adj, problem)


def test_solver_budget_and_problem_checks():
    with pytest.raises(BudgetError):
        exact_small_solver(grid(10, 10), "VC", max_vertices=50)
    with pytest.raises(ValueError):
        exact_small_solver(TRIANGLE, "TSP")
    with pytest.raises(ValueError):
        verify_witness(TRIANGLE, "TSP", [])


@pytest.mark.parametrize(
    "adj,planar",
    [(complete(4), True), (complete(5), False), ({**{a: [3, 4, 5] for a in range(3)}, **{b: [0, 1, 2] for b in range(3, 6)}}, False)],
)
def test_planarity_examples(adj, planar):
    assert is_planar_exact(adj) is planar


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 40), st.integers(0, 1 << 20))
def test_planarity_agrees_with_networkx(n, seed):
    g = nx.gnm_random_graph(n, int(1.8 * n), seed=seed)
    adj = {v: list(g[v]) for v in g}
    assert is_planar_exact(adj) == nx.check_planarity(g)[0]


def test_triangulations_are_planar():
    for seed in range(5):
        assert is_planar_exact(random_triangulation(300, 8, seed))


def test_tester_accepts_edgeless():
    g = BoundedDegreeGraph(50, 3)
    o = PartitionOracle.for_graph(g, tester_config(0.3, 3))
    v = planarity_tester(o, 0.3)
    assert v.accepted and v.evidence["cut_estimate"] == 0


def test_tester_accepts_disjoint_planar_blobs():
    # disjoint K4s: every part is a K4 (or a piece of one), true cut 0
    edges = [(4 * b + i, 4 * b + j) for b in range(25) for i, j in itertools.combinations(range(4), 2)]
    g = BoundedDegreeGraph(100, 3, edges)
    for seed in range(5):
        o = PartitionOracle.for_graph(g, tester_config(0.2, 3, seed=seed))
        assert planarity_tester(o, 0.2, seed=seed).accepted


def test_tester_rejects_k5_blobs():
    edges = [(5 * b + i, 5 * b + j) for b in range(20) for i, j in itertools.combinations(range(5), 2)]
    g = BoundedDegreeGraph(100, 4, edges)
    o = PartitionOracle.for_graph(g, tester_config(0.2, 4, seed=1))
    v = planarity_tester(o, 0.2, seed=1)
    assert not v.accepted and "nonplanar_part" in v.evidence["reasons"]


def test_tester_requires_matching_config():
    g = grid(5, 5)
    with pytest.raises(ValueError):
        planarity_tester(PartitionOracle.for_graph(g, tester_config(0.3, 4)), 0.1)


def test_approx_edgeless():
    g = BoundedDegreeGraph(30, 2)
    o = PartitionOracle.for_graph(g, approx_config(0.25, 2))
    assert approx_opt(o, "VC", 0.25).estimate == 0
    assert approx_opt(o, "MIS", 0.25).estimate == pytest.approx(30)


def test_approx_rejects_bad_problem_and_config():
    g = grid(4, 4)
    o = PartitionOracle.for_graph(g, approx_config(0.25, 4))
    with pytest.raises(ValueError):
        approx_opt(o, "TSP", 0.25)
    with pytest.raises(ValueError):
        approx_opt(o, "VC", 0.5)


def test_approx_deterministic_and_close():
    g = random_triangulation(60, 6, 3)
    o = PartitionOracle.for_graph(g, approx_config(0.25, g.d, seed=1))
    for p in ("VC", "MIS", "DS"):
        a = approx_opt(o, p, 0.25, seed=4)
        b = approx_opt(o, p, 0.25, seed=4)
        assert a.estimate == b.estimate
        assert abs(a.estimate - exact_small_solver(g, p).size) <= 0.25 * g.n
        assert a.sample_size == 256


def test_approx_with_small_parts():
    # force many parts so the estimator actually averages over part densities
    from partoracle.config import RunConfig

    g = grid(10, 10)
    eps = 0.25
    base = approx_config(eps, 4)
    cfg = RunConfig.create(base.epsilon, 4, seed=0, k=6, k_final=18, ell=base.ell)
    o = PartitionOracle.for_graph(g, cfg)
    for p in ("VC", "MIS", "DS"):
        est = approx_opt(o, p, eps, budget=2000, seed=1).estimate
        assert abs(est - exact_small_solver(g, p).size) <= 0.5 * g.n
