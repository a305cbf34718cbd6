"""Clause-network construction.

Both build modes grow a network over the clauses of one formula:

* seed: one clause enters first (uniformly at random, or the globally
  fittest one when configured for a deliberate head start);
* forced edge: the unadded clause closest to the seed joins and links to it
  with probability 1;
* growth: each remaining step moves the unadded clause closest to the
  current locally-fittest clause into the network, then links it to existing
  nodes.  Plain mode runs one independent Bernoulli trial per existing node
  at that node's attachment probability, so a newcomer may gain several edges
  or stay isolated.  Preferential mode performs exactly ``rho`` draws from
  the cumulative attachment distribution; each draw adds 1 to the chosen
  node's connectivity and ``theta`` to the newcomer's.

Attachment probability of an existing node is proportional to
connectivity x local fitness, normalized over the existing nodes.  Local
frequencies, fitness, the fittest index, normalized fitness, and energies are
recomputed from scratch at the end of every step; the probabilities used
while linking a newcomer therefore reflect the state before it joined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import Formula, clause_code_array, formula_sha256
from .graph import (
    MODE_S2G,
    MODE_S2GPA,
    MODES,
    ClauseGraph,
    GraphEdge,
    GraphNode,
)
from .metrics import FitnessRecord, clause_distance
from .seeding import derive_rng

FIRST_RANDOM = "random"
FIRST_FITTEST = "fittest"
FIRST_CLAUSE_RULES = (FIRST_RANDOM, FIRST_FITTEST)

DEFAULT_THETA = 0.33
DEFAULT_RHO = 1


@dataclass(frozen=True)
class BuilderConfig:
    mode: str = MODE_S2G
    temperature: float = 1.0
    theta: float = DEFAULT_THETA
    rho: int = DEFAULT_RHO
    seed: int = 0
    first_clause_rule: str = FIRST_RANDOM

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly between 0 and 1")
        if int(self.rho) != self.rho or self.rho < 1:
            raise ValueError("rho must be an integer >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.first_clause_rule not in FIRST_CLAUSE_RULES:
            raise ValueError(f"unknown first-clause rule {self.first_clause_rule!r}")


def _distance_matrix(formula: Formula, codes: np.ndarray) -> np.ndarray:
    """Pairwise clause distances.  The vectorized path assumes no repeated
    variables inside a clause; formulas flagged by the parser fall back to the
    exact multiset computation."""
    m, k = codes.shape
    if formula.duplicate_vars:
        dist = np.zeros((m, m), dtype=np.int16)
        for i in range(m):
            for j in range(i + 1, m):
                d = clause_distance(formula.clauses[i], formula.clauses[j])
                dist[i, j] = dist[j, i] = d
        return dist
    inter = np.zeros((m, m), dtype=np.int16)
    for p in range(k):
        for q in range(k):
            inter += codes[:, p, None] == codes[None, :, q]
    return (k - inter).astype(np.int16)


class BuildState:
    """Mutable construction state; arrays are indexed by clause index."""

    def __init__(self, formula: Formula, cfg: BuilderConfig):
        if formula.m < 1:
            raise ValueError("formula has no clauses")
        if formula.k < 1:
            raise ValueError("clauses must have at least one literal")
        self.formula = formula
        self.cfg = cfg
        self.rng = derive_rng(cfg.seed)
        self.codes = clause_code_array(formula)
        self.dist = _distance_matrix(formula, self.codes)
        m = formula.m
        self.order: list[int] = []
        self.added = np.zeros(m, dtype=bool)
        self.freq = np.zeros(2 * formula.n, dtype=np.int64)
        self.fitness = np.zeros(m, dtype=np.int64)
        self.normalized = np.zeros(m, dtype=float)
        self.energy = np.zeros(m, dtype=float)
        self.conn = np.zeros(m, dtype=float)
        self.in_events = np.zeros(m, dtype=np.int64)
        self.out_events = np.zeros(m, dtype=np.int64)
        self.fittest = -1
        self.edges: dict[tuple[int, int], list] = {}

    def order_array(self) -> np.ndarray:
        return np.asarray(self.order, dtype=np.int64)

    def add_clause(self, clause: int):
        if self.added[clause]:
            raise ValueError(f"clause {clause} already added")
        self.order.append(clause)
        self.added[clause] = True

    def link(self, newcomer: int, target: int, weight: float):
        """Record one link event from the newcomer to an existing node."""
        key = (newcomer, target) if newcomer < target else (target, newcomer)
        entry = self.edges.get(key)
        if entry is None:
            self.edges[key] = [float(weight), 1]
        else:
            entry[1] += 1  # repeated pair: keep first weight, bump multiplicity
        self.out_events[newcomer] += 1
        self.in_events[target] += 1
        if self.cfg.mode == MODE_S2G:
            # repeated pairs cannot arise here, so this stays the plain degree
            self.conn[newcomer] += 1.0
            self.conn[target] += 1.0
        else:
            self.conn[newcomer] += self.cfg.theta
            self.conn[target] += 1.0


def select_first_clause(
    formula: Formula, cfg: BuilderConfig, rng: np.random.Generator
) -> int:
    if formula.m == 0:
        raise ValueError("formula has no clauses")
    if cfg.first_clause_rule == FIRST_RANDOM:
        return int(rng.integers(formula.m))
    codes = clause_code_array(formula)
    freq = np.bincount(codes.ravel(), minlength=2 * formula.n)
    fits = freq[codes].sum(axis=1)
    ties = np.flatnonzero(fits == fits.max())
    return int(ties[rng.integers(len(ties))])


def find_closest_clause(
    formula: Formula,
    added,
    t: int,
    rng: np.random.Generator,
    distances: np.ndarray | None = None,
) -> int:
    """Unadded clause with minimal distance to clause ``t``; ties uniform.

    ``distances`` may carry a precomputed row of distances from every clause
    to ``t``; otherwise distances are computed on the fly.
    """
    mask = np.ones(formula.m, dtype=bool)
    mask[list(added)] = False
    candidates = np.flatnonzero(mask)
    if len(candidates) == 0:
        raise ValueError("all clauses already added")
    if distances is None:
        target = formula.clauses[t]
        dvals = np.array(
            [clause_distance(formula.clauses[c], target) for c in candidates]
        )
    else:
        dvals = np.asarray(distances)[candidates]
    ties = candidates[dvals == dvals.min()]
    return int(ties[rng.integers(len(ties))])


def update_fitness(state: BuildState) -> BuildState:
    """Recompute local frequencies, fitness, fittest index, normalized
    fitness, and energies over the added clauses.

    The fittest index keeps the incumbent on ties; otherwise the lowest
    clause index among the maximizers wins.
    """
    order = state.order_array()
    if len(order) == 0:
        raise ValueError("no clauses added yet")
    added_codes = state.codes[order]
    state.freq = np.bincount(added_codes.ravel(), minlength=2 * state.formula.n)
    fits = state.freq[added_codes].sum(axis=1)
    state.fitness[order] = fits
    best = int(fits.max())
    if state.fittest < 0 or state.fitness[state.fittest] != best:
        state.fittest = int(order[fits == best].min())
    state.normalized[order] = fits / best
    state.energy[order] = -state.cfg.temperature * np.log(state.normalized[order]) + 0.0
    return state


def attachment_probabilities(state: BuildState) -> np.ndarray:
    """Per existing node, connectivity x fitness normalized to sum 1.

    Aligned with the insertion order.  Undefined until at least one link
    exists (the forced first edge guarantees that from step two on).
    """
    order = state.order_array()
    weights = state.conn[order] * state.fitness[order]
    total = weights.sum()
    if not total > 0:
        raise RuntimeError("attachment probabilities undefined before the first edge")
    return weights / total


def preferential_draw(cumulative: np.ndarray, rng: np.random.Generator) -> int:
    """Sample x in (0, 1] and return the first index whose cumulative
    probability reaches x."""
    x = 1.0 - rng.random()
    return min(int(np.searchsorted(cumulative, x, side="left")), len(cumulative) - 1)


def _freeze(state: BuildState) -> ClauseGraph:
    cfg = state.cfg
    preferential = cfg.mode == MODE_S2GPA
    graph = ClauseGraph(
        mode=cfg.mode,
        temperature=cfg.temperature,
        theta=cfg.theta if preferential else None,
        rho=cfg.rho if preferential else None,
        seed=cfg.seed,
        first_clause_rule=cfg.first_clause_rule,
        n=state.formula.n,
        k=state.formula.k,
        formula_sha256=formula_sha256(state.formula),
    )
    for clause in state.order:
        graph.nodes.append(
            GraphNode(
                clause=clause,
                fitness=FitnessRecord(
                    raw=int(state.fitness[clause]),
                    normalized=float(state.normalized[clause]),
                    energy=float(state.energy[clause]),
                ),
                connectivity=float(state.conn[clause]),
                in_events=int(state.in_events[clause]),
                out_events=int(state.out_events[clause]),
            )
        )
    for (u, v), (weight, multiplicity) in state.edges.items():
        graph.edges[(u, v)] = GraphEdge(u=u, v=v, weight=weight, multiplicity=multiplicity)
    return graph


def _build(formula: Formula, cfg: BuilderConfig, iteration_hook) -> ClauseGraph:
    if formula.m < 2:
        raise ValueError("need at least 2 clauses to build a network")
    state = BuildState(formula, cfg)
    rng = state.rng

    first = select_first_clause(formula, cfg, rng)
    state.add_clause(first)
    update_fitness(state)

    # forced first edge: the lone existing node attaches with probability 1
    second = find_closest_clause(
        formula, state.order, state.fittest, rng, distances=state.dist[state.fittest]
    )
    pi = np.array([1.0])
    state.add_clause(second)
    state.link(second, first, 1.0)
    update_fitness(state)
    if iteration_hook is not None:
        iteration_hook(state, pi)

    while len(state.order) < formula.m:
        target = state.fittest
        newcomer = find_closest_clause(
            formula, state.order, target, rng, distances=state.dist[target]
        )
        existing = state.order_array()
        pi = attachment_probabilities(state)
        state.add_clause(newcomer)
        if cfg.mode == MODE_S2G:
            draws = rng.random(len(existing))
            for j in np.flatnonzero(draws < pi):
                state.link(newcomer, int(existing[j]), float(pi[j]))
        else:
            cumulative = np.cumsum(pi)
            for _ in range(cfg.rho):
                j = preferential_draw(cumulative, rng)
                state.link(newcomer, int(existing[j]), float(pi[j]))
        update_fitness(state)
        if iteration_hook is not None:
            iteration_hook(state, pi)
    return _freeze(state)


def build_s2g(formula: Formula, cfg: BuilderConfig | None = None, iteration_hook=None) -> ClauseGraph:
    """Plain mode: per-node Bernoulli attachment, integer connectivity,
    isolated nodes possible."""
    cfg = cfg or BuilderConfig(mode=MODE_S2G)
    if cfg.mode != MODE_S2G:
        raise ValueError(f"config mode is {cfg.mode!r}, expected {MODE_S2G!r}")
    return _build(formula, cfg, iteration_hook)


def build_s2g_pa(formula: Formula, cfg: BuilderConfig | None = None, iteration_hook=None) -> ClauseGraph:
    """Preferential mode: rho cumulative draws per step, theta-weighted
    connectivity, single connected component."""
    cfg = cfg or BuilderConfig(mode=MODE_S2GPA)
    if cfg.mode != MODE_S2GPA:
        raise ValueError(f"config mode is {cfg.mode!r}, expected {MODE_S2GPA!r}")
    return _build(formula, cfg, iteration_hook)


def build_graph(formula: Formula, cfg: BuilderConfig, iteration_hook=None) -> ClauseGraph:
    """Dispatch on ``cfg.mode``."""
    if cfg.mode == MODE_S2G:
        return build_s2g(formula, cfg, iteration_hook)
    return build_s2g_pa(formula, cfg, iteration_hook)
