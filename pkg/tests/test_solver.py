"""Local search: clause ordering, the three solver variants, verification."""

import pytest

from satbec.builder import BuilderConfig, build_graph
from satbec.cnf import Assignment, evaluate, formula_sha256, generate_random, parse_dimacs
from satbec.graph import MODE_S2GPA, ClauseGraph, GraphEdge, GraphNode
from satbec.metrics import FitnessRecord
from satbec.solver import (
    DEFAULT_BUDGET,
    DESK_BUDGET,
    FLIP_PROBABILITIES,
    A_BETTER,
    B_BETTER,
    TIE,
    ClauseOrder,
    SolverResult,
    chainsat,
    clause_order,
    compare,
    default_flip_probabilities,
    lc_chainsat,
    nlc_chainsat,
    verify_result,
)


def order_graph(formula, energies, connectivities):
    g = ClauseGraph(
        mode=MODE_S2GPA,
        temperature=1.0,
        theta=0.33,
        rho=1,
        seed=0,
        first_clause_rule="random",
        n=formula.n,
        k=formula.k,
        formula_sha256=formula_sha256(formula),
    )
    for clause, (e, c) in enumerate(zip(energies, connectivities)):
        g.nodes.append(
            GraphNode(
                clause=clause,
                fitness=FitnessRecord(raw=1, normalized=1.0, energy=e),
                connectivity=c,
            )
        )
    for clause in range(1, len(energies)):
        g.edges[(clause - 1, clause)] = GraphEdge(u=clause - 1, v=clause, weight=0.5)
    return g


def small_formula(m, seed=0, n=9):
    return generate_random(seed, 3, n, m)


def test_default_flip_probabilities():
    assert FLIP_PROBABILITIES == {3: 0.005, 4: 0.0001, 5: 0.0002}
    assert default_flip_probabilities(3) == (0.005, 0.005)
    with pytest.raises(ValueError):
        default_flip_probabilities(6)


def test_budget_constants():
    assert DEFAULT_BUDGET == 1_000_000
    assert DESK_BUDGET == 10_000


def test_clause_order_by_energy_then_connectivity():
    f = small_formula(3)
    g = order_graph(f, [0.0, 0.7, 0.3], [1.0, 1.0, 1.0])
    assert clause_order(f, g, seed=0).rank == (0, 2, 1)
    # same energy level: higher connectivity first
    g = order_graph(f, [0.0, 0.0, 0.5], [2.0, 5.0, 1.0])
    assert clause_order(f, g, seed=0).rank == (1, 0, 2)


def test_clause_order_final_ties_are_seeded_random():
    f = small_formula(2)
    g = order_graph(f, [0.2, 0.2], [3.0, 3.0])
    firsts = [clause_order(f, g, seed=s).rank[0] for s in range(200)]
    zero_first = firsts.count(0)
    assert 60 < zero_first < 140  # both orders occur, roughly balanced
    assert clause_order(f, g, seed=7).rank == clause_order(f, g, seed=7).rank


def test_clause_order_checks_graph_matches_formula():
    f3 = small_formula(3)
    # graph from a different instance
    with pytest.raises(ValueError):
        clause_order(f3, order_graph(small_formula(3, seed=1), [0.0] * 3, [1.0] * 3), seed=0)
    # right hash, wrong node count
    with pytest.raises(ValueError):
        clause_order(f3, order_graph(f3, [0.0, 0.1], [1.0, 1.0]), seed=0)


def test_clause_order_positions_invert_rank():
    order = ClauseOrder(rank=(2, 0, 1))
    assert order.positions() == [1, 2, 0]


def test_chainsat_solves_a_loose_instance():
    f = small_formula(18, seed=3, n=12)  # alpha 1.5, satisfiable in practice
    result = chainsat(f, budget=DESK_BUDGET, seed=1)
    assert result.solved
    assert result.satisfied_clauses == f.m
    assert verify_result(f, result)
    assert result.formula_sha256 == formula_sha256(f)
    assert result.flips <= result.evaluations <= DESK_BUDGET


def test_chainsat_trajectory_is_monotone():
    for seed in range(5):
        f = generate_random(seed, 3, 20, 85)  # alpha 4.25
        result = chainsat(f, budget=2000, seed=seed, record_trajectory=True)
        trajectory = result.unsat_trajectory
        assert trajectory is not None
        assert all(b <= a for a, b in zip(trajectory, trajectory[1:]))
        assert trajectory[-1] == f.m - result.satisfied_clauses


def test_chainsat_zero_budget_does_nothing():
    f = small_formula(10)
    result = chainsat(f, budget=0, seed=0)
    assert result.evaluations == 0
    assert result.flips == 0
    satisfied, _ = evaluate(f, Assignment(result.assignment))
    assert result.satisfied_clauses == satisfied
    with pytest.raises(ValueError):
        chainsat(f, budget=-1)


def test_chainsat_is_seed_deterministic():
    f = generate_random(5, 3, 15, 60)
    a = chainsat(f, budget=3000, seed=9)
    b = chainsat(f, budget=3000, seed=9)
    assert a == b
    c = chainsat(f, budget=3000, seed=10)
    assert a != c


def test_ordered_variants_run_and_verify():
    f = generate_random(6, 3, 25, 100)
    g = build_graph(f, BuilderConfig(mode=MODE_S2GPA, seed=2))
    order = clause_order(f, g, seed=3)
    for solve in (lc_chainsat, nlc_chainsat):
        result = solve(f, order, budget=DESK_BUDGET, seed=4)
        assert verify_result(f, result)
        again = solve(f, order, budget=DESK_BUDGET, seed=4)
        assert result == again


def test_ordered_variants_trajectories_monotone():
    f = generate_random(7, 3, 20, 85)
    g = build_graph(f, BuilderConfig(mode=MODE_S2GPA, seed=0))
    order = clause_order(f, g, seed=0)
    for solve in (lc_chainsat, nlc_chainsat):
        result = solve(f, order, budget=2000, seed=11, record_trajectory=True)
        trajectory = result.unsat_trajectory
        assert all(b <= a for a, b in zip(trajectory, trajectory[1:]))


def test_empty_formula_is_solved():
    f = parse_dimacs("p cnf 3 0\n")
    result = chainsat(f, p1=0.5, p2=0.5, budget=100, seed=0)
    assert result.solved and result.evaluations == 0


def test_solver_requires_probabilities_for_unusual_k():
    f = generate_random(8, 6, 12, 10)
    with pytest.raises(ValueError):
        chainsat(f, budget=100, seed=0)
    result = chainsat(f, p1=0.01, p2=0.01, budget=100, seed=0)
    assert verify_result(f, result)


def result_with(solved, satisfied, flips, digest="d" * 64):
    return SolverResult(
        solved=solved,
        satisfied_clauses=satisfied,
        flips=flips,
        evaluations=flips,
        assignment=(True,),
        formula_sha256=digest,
    )


def test_compare_rule_order():
    base = [result_with(False, 90, 500), result_with(True, 100, 400)]
    more_solved = [result_with(True, 90, 500), result_with(True, 100, 400)]
    assert compare(more_solved, base) == A_BETTER
    assert compare(base, more_solved) == B_BETTER
    # solved counts equal: satisfied total decides
    better_maxsat = [result_with(False, 95, 500), result_with(True, 100, 400)]
    assert compare(better_maxsat, base) == A_BETTER
    # solved and satisfied equal: fewer flips decides
    fewer_flips = [result_with(False, 90, 100), result_with(True, 100, 400)]
    assert compare(fewer_flips, base) == A_BETTER
    assert compare(base, base) == TIE


def test_compare_rejects_mismatched_sets():
    with pytest.raises(ValueError):
        compare([], [])
    a = [result_with(True, 10, 1)]
    with pytest.raises(ValueError):
        compare(a, a + a)
    with pytest.raises(ValueError):
        compare(a, [result_with(True, 10, 1, digest="e" * 64)])


def test_verify_result_catches_tampering():
    f = small_formula(18, seed=3, n=12)
    result = chainsat(f, budget=DESK_BUDGET, seed=1)
    assert result.solved
    broken = SolverResult(
        solved=result.solved,
        satisfied_clauses=result.satisfied_clauses - 1,
        flips=result.flips,
        evaluations=result.evaluations,
        assignment=result.assignment,
        formula_sha256=result.formula_sha256,
    )
    assert not verify_result(f, broken)
