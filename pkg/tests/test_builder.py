"""Network construction: config validation, attachment machinery, both modes."""

import numpy as np
import pytest

from conftest import formula_from_signed
from satbec.builder import (
    BuildState,
    BuilderConfig,
    attachment_probabilities,
    build_graph,
    build_s2g,
    build_s2g_pa,
    find_closest_clause,
    preferential_draw,
    select_first_clause,
    update_fitness,
)
from satbec.cnf import generate_random
from satbec.graph import MODE_S2G, MODE_S2GPA, graph_to_json
from satbec.seeding import derive_rng


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mode": "ring"},
        {"temperature": 0.0},
        {"theta": 0.0},
        {"theta": 1.0},
        {"rho": 0},
        {"rho": 1.5},
        {"seed": -1},
        {"first_clause_rule": "latest"},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        BuilderConfig(**kwargs)


def test_mode_specific_entry_points_check_mode():
    f = generate_random(0, 3, 10, 20)
    with pytest.raises(ValueError):
        build_s2g(f, BuilderConfig(mode=MODE_S2GPA))
    with pytest.raises(ValueError):
        build_s2g_pa(f, BuilderConfig(mode=MODE_S2G))


def test_build_needs_two_clauses():
    with pytest.raises(ValueError):
        build_graph(generate_random(0, 3, 10, 1), BuilderConfig())


def test_two_clause_build_is_one_forced_edge():
    f = generate_random(1, 3, 10, 2)
    g = build_graph(f, BuilderConfig(mode=MODE_S2G, seed=0))
    assert g.m == 2
    (edge,) = g.edges.values()
    assert edge.weight == 1.0
    assert edge.multiplicity == 1
    assert sorted(n.connectivity for n in g.nodes) == [1.0, 1.0]

    g = build_graph(f, BuilderConfig(mode=MODE_S2GPA, theta=0.33, seed=0))
    first, second = g.nodes
    assert (first.in_events, first.out_events) == (1, 0)
    assert (second.in_events, second.out_events) == (0, 1)
    assert first.connectivity == 1.0
    assert second.connectivity == pytest.approx(0.33)


def test_select_first_clause_fittest_rule(sample10):
    # clause 0 has the unique maximal global fitness in this sample
    rng = derive_rng(0)
    cfg = BuilderConfig(first_clause_rule="fittest")
    picks = {select_first_clause(sample10, cfg, rng) for _ in range(20)}
    assert picks == {0}


def test_select_first_clause_fittest_ties_uniform():
    # two disjoint-literal clauses with equal fitness
    f = formula_from_signed([(1, 2, 3), (4, 5, 6)], 6)
    rng = derive_rng(1)
    cfg = BuilderConfig(first_clause_rule="fittest")
    picks = [select_first_clause(f, cfg, rng) for _ in range(400)]
    assert 120 < sum(picks) < 280  # both sides drawn, roughly even


def test_select_first_clause_random_covers_all():
    f = generate_random(2, 3, 10, 6)
    rng = derive_rng(2)
    cfg = BuilderConfig(first_clause_rule="random")
    picks = {select_first_clause(f, cfg, rng) for _ in range(300)}
    assert picks == set(range(6))


def test_find_closest_clause_minimizes_distance():
    f = formula_from_signed([(1, 2, 3), (1, 2, 4), (7, 8, 9), (1, 5, 6)], 9)
    rng = derive_rng(3)
    assert find_closest_clause(f, [0], 0, rng) == 1
    # among 2 and 3, clause 3 shares one literal with clause 0
    assert find_closest_clause(f, [0, 1], 0, rng) == 3


def test_find_closest_clause_ties_uniform():
    f = formula_from_signed([(1, 2, 3), (1, 2, 4), (1, 2, 5), (7, 8, 9)], 9)
    rng = derive_rng(4)
    picks = [find_closest_clause(f, [0], 0, rng) for _ in range(400)]
    assert set(picks) == {1, 2}
    assert 120 < sum(1 for p in picks if p == 1) < 280


def test_find_closest_clause_exhausted():
    f = formula_from_signed([(1, 2, 3), (1, 2, 4)], 4)
    with pytest.raises(ValueError):
        find_closest_clause(f, [0, 1], 0, derive_rng(5))


def test_update_fitness_incumbent_rule():
    f = formula_from_signed([(1, 2, 3), (4, 5, 6), (4, 5, 6)], 6)
    state = BuildState(f, BuilderConfig())
    state.add_clause(0)
    update_fitness(state)
    assert state.fittest == 0
    state.add_clause(1)
    update_fitness(state)
    assert state.fittest == 0  # tie at 3: incumbent stays
    state.add_clause(2)
    update_fitness(state)
    assert state.fittest == 1  # clauses 1, 2 jump to 6: lowest index wins
    assert state.fitness[list(state.order)].tolist() == [3, 6, 6]
    assert state.normalized[0] == pytest.approx(0.5)
    assert state.energy[1] == 0.0


def test_attachment_probabilities_proportional_to_conn_times_fitness():
    # equal fitness, connectivity 2 vs 6
    f = formula_from_signed([(1, 2, 3), (4, 5, 6)], 6)
    state = BuildState(f, BuilderConfig())
    state.add_clause(0)
    state.add_clause(1)
    update_fitness(state)
    state.conn[0], state.conn[1] = 2.0, 6.0
    pi = attachment_probabilities(state)
    assert pi == pytest.approx([0.25, 0.75])
    assert pi.sum() == pytest.approx(1.0)


def test_attachment_probabilities_need_an_edge():
    f = formula_from_signed([(1, 2, 3), (4, 5, 6)], 6)
    state = BuildState(f, BuilderConfig())
    state.add_clause(0)
    update_fitness(state)
    with pytest.raises(RuntimeError):
        attachment_probabilities(state)


def test_preferential_draw_frequencies():
    cumulative = np.array([0.25, 1.0])
    rng = derive_rng(6)
    draws = [preferential_draw(cumulative, rng) for _ in range(10_000)]
    assert set(draws) == {0, 1}
    second = sum(draws)
    assert 7200 < second < 7800  # binomial(1e4, 0.75), +-3 sigma is ~130
    # same seed, same stream
    rng = derive_rng(6)
    assert [preferential_draw(cumulative, rng) for _ in range(10_000)] == draws


def test_preferential_draw_rounds_into_last_bin():
    # cumulative that falls short of 1.0 still lands in range
    cumulative = np.array([0.3, 0.99])
    rng = derive_rng(7)
    assert all(preferential_draw(cumulative, rng) in (0, 1) for _ in range(2000))


def hook_recorder():
    calls = []

    def hook(state, pi):
        calls.append(
            {
                "added": len(state.order),
                "pi_sum": float(np.sum(pi)),
                "conn": state.conn.copy(),
                "in_events": state.in_events.copy(),
                "out_events": state.out_events.copy(),
            }
        )

    return calls, hook


def test_s2g_probabilities_normalize_and_degrees_integral():
    f = generate_random(8, 3, 20, 60)
    calls, hook = hook_recorder()
    g = build_graph(f, BuilderConfig(mode=MODE_S2G, seed=9), iteration_hook=hook)
    assert len(calls) == f.m - 1  # forced step plus one per later joiner
    assert all(abs(c["pi_sum"] - 1.0) < 1e-9 for c in calls)
    for node in g.nodes:
        assert node.connectivity == node.in_events + node.out_events
        assert node.connectivity == float(g.simple_degree(node.clause))
    for edge in g.edges.values():
        assert 0.0 < edge.weight <= 1.0
        assert edge.multiplicity == 1


def test_s2g_pa_is_a_tree_at_rho_one():
    f = generate_random(10, 3, 25, 75)
    g = build_graph(f, BuilderConfig(mode=MODE_S2GPA, theta=0.33, rho=1, seed=11))
    assert len(g.edges) == f.m - 1
    assert len(g.connected_components()) == 1
    first = g.nodes[0].clause
    for node in g.nodes:
        expected = 0 if node.clause == first else 1
        assert node.out_events == expected
    # connectivity bookkeeping: k = theta * out + in, exactly
    for node in g.nodes:
        assert node.connectivity == pytest.approx(0.33 * node.out_events + node.in_events, abs=1e-12)


def test_s2g_pa_rho_three_draw_counts():
    f = generate_random(12, 3, 15, 45)
    g = build_graph(f, BuilderConfig(mode=MODE_S2GPA, theta=0.5, rho=3, seed=13))
    first = g.nodes[0].clause
    second = g.nodes[1].clause
    for node in g.nodes:
        if node.clause == first:
            assert node.out_events == 0
        elif node.clause == second:
            assert node.out_events == 1  # forced edge only
        else:
            assert node.out_events == 3
    # multiplicities absorb repeated draws; total events still match
    link_events = sum(e.multiplicity for e in g.edges.values())
    assert link_events == 1 + 3 * (f.m - 2)


def test_s2g_pa_simple_out_degree_within_rho():
    f = generate_random(14, 3, 15, 45)
    rho = 2
    calls, hook = hook_recorder()
    g = build_graph(
        f, BuilderConfig(mode=MODE_S2GPA, theta=0.4, rho=rho, seed=15), iteration_hook=hook
    )
    assert all(abs(c["pi_sum"] - 1.0) < 1e-9 for c in calls)
    insertion = {clause: rank for rank, clause in enumerate(g.insertion_order)}
    out_neighbors = {clause: set() for clause in insertion}
    for e in g.edges.values():
        junior = e.u if insertion[e.u] > insertion[e.v] else e.v
        senior = e.v if junior == e.u else e.u
        out_neighbors[junior].add(senior)
    for node in g.nodes[1:]:
        assert 1 <= len(out_neighbors[node.clause]) <= max(rho, 1)


def test_builds_are_seed_deterministic():
    f = generate_random(16, 3, 20, 60)
    for mode in (MODE_S2G, MODE_S2GPA):
        a = build_graph(f, BuilderConfig(mode=mode, seed=21))
        b = build_graph(f, BuilderConfig(mode=mode, seed=21))
        c = build_graph(f, BuilderConfig(mode=mode, seed=22))
        assert graph_to_json(a) == graph_to_json(b)
        assert graph_to_json(a) != graph_to_json(c)


def test_graph_records_build_parameters(sample20):
    g = build_graph(sample20, BuilderConfig(mode=MODE_S2GPA, theta=0.33, rho=2, seed=5))
    assert g.mode == MODE_S2GPA
    assert (g.theta, g.rho, g.seed) == (0.33, 2, 5)
    assert g.n == 20 and g.k == 3 and g.m == 20
    s2g = build_graph(sample20, BuilderConfig(mode=MODE_S2G, seed=5))
    assert s2g.theta is None and s2g.rho is None
