"""Circumspect local search with optional network-derived clause ordering.

The base algorithm keeps a running assignment and never accepts a flip that
increases the number of unsatisfied clauses: zero-cost flips are taken
always, strictly improving flips with a small probability p1, and otherwise,
with probability 1 - p2, the walk hands the token to a neighboring variable
chosen from a clause that the current variable alone satisfies (a chain
step).

The ordered variants replace the two uniform clause picks with a
heaviest-first rule.  Clause weight comes from a built network: lower energy
is heavier, higher connectivity breaks energy ties, and residual ties are
settled by a seeded shuffle.  Each pick marks its clause as visited in a bit
array (one shared array, or two separate ones for the unsat-pick and
chain-pick roles); among eligible clauses only unvisited ones are ranked,
and when all are visited the pick falls back to uniform random.  Bits are
never cleared during a run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from heapq import heappop, heappush

from .cnf import Assignment, Formula, evaluate, formula_sha256
from .graph import ClauseGraph
from .metrics import group_energy_levels

DEFAULT_BUDGET = 1_000_000
DESK_BUDGET = 10_000

# circumspection defaults by clause length
FLIP_PROBABILITIES = {3: 0.005, 4: 0.0001, 5: 0.0002}

A_BETTER = "a_better"
B_BETTER = "b_better"
TIE = "tie"


def default_flip_probabilities(k: int) -> tuple[float, float]:
    try:
        p = FLIP_PROBABILITIES[k]
    except KeyError:
        raise ValueError(
            f"no default flip probabilities for k={k}; pass p1 and p2 explicitly"
        ) from None
    return p, p


@dataclass(frozen=True)
class ClauseOrder:
    """Clause indices, heaviest first."""

    rank: tuple[int, ...]

    def positions(self) -> list[int]:
        pos = [0] * len(self.rank)
        for position, clause in enumerate(self.rank):
            pos[clause] = position
        return pos


def clause_order(formula: Formula, graph: ClauseGraph, seed: int) -> ClauseOrder:
    """Weight order: energy level ascending, connectivity descending, then a
    seeded random shuffle for full ties."""
    if graph.formula_sha256 != formula_sha256(formula):
        raise ValueError("graph was not built from this formula")
    if graph.m != formula.m:
        raise ValueError("graph node count does not match formula")
    m = formula.m
    energies = [0.0] * m
    conn = [0.0] * m
    for node in graph.nodes:
        energies[node.clause] = node.fitness.energy
        conn[node.clause] = node.connectivity
    level = [0] * m
    for level_index, members in enumerate(group_energy_levels(energies)):
        for clause in members:
            level[clause] = level_index
    rng = random.Random(seed)
    tie = [rng.random() for _ in range(m)]
    rank = sorted(range(m), key=lambda c: (level[c], -conn[c], tie[c]))
    return ClauseOrder(rank=tuple(rank))


@dataclass(frozen=True)
class SolverResult:
    solved: bool
    satisfied_clauses: int
    flips: int
    evaluations: int
    assignment: tuple[bool, ...]
    formula_sha256: str
    unsat_trajectory: tuple[int, ...] | None = None


class _Engine:
    """Assignment state with incremental satisfied-literal bookkeeping."""

    def __init__(self, formula: Formula, rng: random.Random):
        n, m = formula.n, formula.m
        self.formula = formula
        # index 0 unused so variables index directly
        self.assign = [False] + [rng.random() < 0.5 for _ in range(n)]
        self.occ: list[list[int]] = [[] for _ in range(2 * n)]
        self.clause_vars: list[tuple[int, ...]] = []
        for c, clause in enumerate(formula.clauses):
            self.clause_vars.append(clause.variables())
            for lit in clause.literals:
                self.occ[2 * (lit.variable - 1) + (1 if lit.negated else 0)].append(c)
        assign = self.assign
        self.num_true = [
            sum(1 for lit in clause.literals if assign[lit.variable] != lit.negated)
            for clause in formula.clauses
        ]
        self.unsat: list[int] = []
        self.pos = [-1] * m
        for c, nt in enumerate(self.num_true):
            if nt == 0:
                self.pos[c] = len(self.unsat)
                self.unsat.append(c)
        self.on_become_unsat = None

    def _true_code(self, v: int) -> int:
        base = 2 * (v - 1)
        return base if self.assign[v] else base + 1

    def delta_e(self, v: int) -> int:
        """Change in the unsatisfied-clause count if v were flipped."""
        tc = self._true_code(v)
        nt = self.num_true
        breaks = 0
        for c in self.occ[tc]:
            if nt[c] == 1:
                breaks += 1
        makes = 0
        for c in self.occ[tc ^ 1]:
            if nt[c] == 0:
                makes += 1
        return breaks - makes

    def critical_clauses(self, v: int) -> list[int]:
        """Clauses currently satisfied by v alone."""
        nt = self.num_true
        return [c for c in self.occ[self._true_code(v)] if nt[c] == 1]

    def flip(self, v: int):
        tc = self._true_code(v)
        nt = self.num_true
        pos = self.pos
        unsat = self.unsat
        callback = self.on_become_unsat
        for c in self.occ[tc]:
            x = nt[c] - 1
            nt[c] = x
            if x == 0:
                pos[c] = len(unsat)
                unsat.append(c)
                if callback is not None:
                    callback(c)
        for c in self.occ[tc ^ 1]:
            if nt[c] == 0:
                i = pos[c]
                last = unsat[-1]
                unsat[i] = last
                pos[last] = i
                unsat.pop()
                pos[c] = -1
            nt[c] += 1
        self.assign[v] = not self.assign[v]


class _UniformSelector:
    def __init__(self, engine: _Engine):
        pass

    def pick_unsat(self, engine: _Engine, rng: random.Random) -> int:
        unsat = engine.unsat
        return unsat[rng.randrange(len(unsat))]

    def pick_critical(self, engine, critical: list[int], rng: random.Random) -> int:
        return critical[rng.randrange(len(critical))]


class _OrderedSelector:
    """Heaviest-unvisited clause picks backed by a lazy-deletion heap."""

    def __init__(self, engine: _Engine, order: ClauseOrder, shared_bits: bool):
        m = engine.formula.m
        if len(order.rank) != m:
            raise ValueError("clause order length does not match formula")
        self.rank_pos = order.positions()
        self.unsat_bits = bytearray(m)
        self.sat_bits = self.unsat_bits if shared_bits else bytearray(m)
        self.heap: list[tuple[int, int]] = []
        engine.on_become_unsat = self._on_unsat
        for c in engine.unsat:
            self._on_unsat(c)

    def _on_unsat(self, c: int):
        if not self.unsat_bits[c]:
            heappush(self.heap, (self.rank_pos[c], c))

    def pick_unsat(self, engine: _Engine, rng: random.Random) -> int:
        heap = self.heap
        bits = self.unsat_bits
        pos = engine.pos
        while heap:
            _, c = heappop(heap)
            if not bits[c] and pos[c] >= 0:
                bits[c] = 1
                return c
        unsat = engine.unsat
        return unsat[rng.randrange(len(unsat))]

    def pick_critical(self, engine, critical: list[int], rng: random.Random) -> int:
        bits = self.sat_bits
        rank_pos = self.rank_pos
        best = -1
        best_rank = len(rank_pos) + 1
        for c in critical:
            if not bits[c] and rank_pos[c] < best_rank:
                best_rank = rank_pos[c]
                best = c
        if best >= 0:
            bits[best] = 1
            return best
        return critical[rng.randrange(len(critical))]


def _resolve_probabilities(formula, p1, p2):
    if p1 is None or p2 is None:
        d1, d2 = default_flip_probabilities(formula.k)
        p1 = d1 if p1 is None else p1
        p2 = d2 if p2 is None else p2
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise ValueError("p1 and p2 must lie in [0, 1]")
    return p1, p2


def _run(formula, p1, p2, budget, seed, selector_factory, record_trajectory):
    if budget < 0:
        raise ValueError("budget must be non-negative")
    digest = formula_sha256(formula)
    if formula.m == 0:
        return SolverResult(
            solved=True,
            satisfied_clauses=0,
            flips=0,
            evaluations=0,
            assignment=(),
            formula_sha256=digest,
            unsat_trajectory=(0,) if record_trajectory else None,
        )
    p1, p2 = _resolve_probabilities(formula, p1, p2)
    rng = random.Random(seed)
    engine = _Engine(formula, rng)
    selector = selector_factory(engine)
    trajectory = [len(engine.unsat)] if record_trajectory else None
    k = formula.k
    clause_vars = engine.clause_vars
    unsat = engine.unsat
    evaluations = 0
    flips = 0
    chaining = False
    v = 0
    while unsat and evaluations < budget:
        evaluations += 1
        if not chaining:
            c = selector.pick_unsat(engine, rng)
            v = clause_vars[c][rng.randrange(k)]
        de = engine.delta_e(v)
        chaining = False
        if de == 0:
            engine.flip(v)
            flips += 1
            if trajectory is not None:
                trajectory.append(len(unsat))
        elif de < 0:
            if rng.random() < p1:
                engine.flip(v)
                flips += 1
                if trajectory is not None:
                    trajectory.append(len(unsat))
        elif rng.random() < 1.0 - p2:
            critical = engine.critical_clauses(v)
            if critical:
                c2 = selector.pick_critical(engine, critical, rng)
                others = [w for w in clause_vars[c2] if w != v]
                if others:
                    v = others[rng.randrange(len(others))]
                    chaining = True
            # no handoff available: stay unchained, the cycle still counts
    return SolverResult(
        solved=not unsat,
        satisfied_clauses=formula.m - len(unsat),
        flips=flips,
        evaluations=evaluations,
        assignment=tuple(engine.assign[1:]),
        formula_sha256=digest,
        unsat_trajectory=tuple(trajectory) if trajectory is not None else None,
    )


def chainsat(
    formula: Formula,
    p1: float | None = None,
    p2: float | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    record_trajectory: bool = False,
) -> SolverResult:
    """Base algorithm: uniform random clause picks."""
    return _run(formula, p1, p2, budget, seed, _UniformSelector, record_trajectory)


def lc_chainsat(
    formula: Formula,
    order: ClauseOrder,
    p1: float | None = None,
    p2: float | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    record_trajectory: bool = False,
) -> SolverResult:
    """Ordered picks with one visited-bit array shared by both pick sites."""
    return _run(
        formula,
        p1,
        p2,
        budget,
        seed,
        lambda engine: _OrderedSelector(engine, order, shared_bits=True),
        record_trajectory,
    )


def nlc_chainsat(
    formula: Formula,
    order: ClauseOrder,
    p1: float | None = None,
    p2: float | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    record_trajectory: bool = False,
) -> SolverResult:
    """Ordered picks with separate visited-bit arrays per pick site."""
    return _run(
        formula,
        p1,
        p2,
        budget,
        seed,
        lambda engine: _OrderedSelector(engine, order, shared_bits=False),
        record_trajectory,
    )


def verify_result(formula: Formula, result: SolverResult) -> bool:
    """Independent check: re-evaluate the final assignment clause by clause."""
    satisfied, unsat = evaluate(formula, Assignment(result.assignment))
    return result.solved == (not unsat) and satisfied == result.satisfied_clauses


def compare(a, b) -> str:
    """Lexicographic verdict over two result sets on the same instances:
    more solved wins, then more clauses satisfied on average, then fewer
    flips; otherwise a tie."""
    a = list(a)
    b = list(b)
    if not a or len(a) != len(b):
        raise ValueError("result sets must be non-empty and the same length")
    for ra, rb in zip(a, b):
        if ra.formula_sha256 != rb.formula_sha256:
            raise ValueError("result sets cover different instances")
    solved_a = sum(1 for r in a if r.solved)
    solved_b = sum(1 for r in b if r.solved)
    if solved_a != solved_b:
        return A_BETTER if solved_a > solved_b else B_BETTER
    satisfied_a = sum(r.satisfied_clauses for r in a)
    satisfied_b = sum(r.satisfied_clauses for r in b)
    if satisfied_a != satisfied_b:
        return A_BETTER if satisfied_a > satisfied_b else B_BETTER
    flips_a = sum(r.flips for r in a)
    flips_b = sum(r.flips for r in b)
    if flips_a != flips_b:
        return A_BETTER if flips_a < flips_b else B_BETTER
    return TIE
