"""Clause network model and its particle-spectrum view.

Nodes are clauses of one formula, added in a recorded insertion order.  Each
node carries the clause's final fitness record plus a real-valued
connectivity.  Edges are simple; repeated link events between the same pair
raise a multiplicity counter and keep the weight of the first event.  Every
link event deposits one particle on each endpoint, so a node's particle count
is its total number of endpoint events and the graph conserves
2 x (link events) particles overall.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .metrics import ENERGY_LEVEL_TOL, FitnessRecord, group_energy_levels

MODE_S2G = "s2g"
MODE_S2GPA = "s2gpa"
MODES = (MODE_S2G, MODE_S2GPA)


@dataclass
class GraphNode:
    clause: int
    fitness: FitnessRecord
    connectivity: float
    in_events: int = 0
    out_events: int = 0

    @property
    def particles(self) -> int:
        return self.in_events + self.out_events


@dataclass(frozen=True)
class GraphEdge:
    u: int
    v: int
    weight: float
    multiplicity: int = 1


@dataclass
class ClauseGraph:
    mode: str
    temperature: float
    theta: float | None
    rho: int | None
    seed: int
    first_clause_rule: str
    n: int
    k: int
    formula_sha256: str
    nodes: list[GraphNode] = field(default_factory=list)
    edges: dict[tuple[int, int], GraphEdge] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.nodes)

    @property
    def insertion_order(self) -> list[int]:
        return [node.clause for node in self.nodes]

    def node_for(self, clause: int) -> GraphNode:
        for node in self.nodes:
            if node.clause == clause:
                return node
        raise KeyError(f"clause {clause} not in graph")

    @property
    def link_events(self) -> int:
        return sum(edge.multiplicity for edge in self.edges.values())

    @property
    def total_particles(self) -> int:
        return sum(node.particles for node in self.nodes)

    def simple_degree(self, clause: int) -> int:
        return sum(1 for (u, v) in self.edges if clause in (u, v))

    def neighbors(self, clause: int) -> list[int]:
        out = []
        for u, v in self.edges:
            if u == clause:
                out.append(v)
            elif v == clause:
                out.append(u)
        return sorted(out)

    def connected_components(self) -> list[set[int]]:
        adjacency: dict[int, list[int]] = {node.clause: [] for node in self.nodes}
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen: set[int] = set()
        components = []
        for start in adjacency:
            if start in seen:
                continue
            stack = [start]
            component = set()
            while stack:
                cur = stack.pop()
                if cur in component:
                    continue
                component.add(cur)
                stack.extend(nb for nb in adjacency[cur] if nb not in component)
            seen |= component
            components.append(component)
        return components


@dataclass(frozen=True)
class EnergyState:
    """One degeneration state: a node and the particles it holds."""

    clause: int
    particles: int


@dataclass(frozen=True)
class EnergyLevel:
    energy: float
    states: tuple[EnergyState, ...]

    @property
    def particles(self) -> int:
        return sum(state.particles for state in self.states)


@dataclass(frozen=True)
class EnergySpectrum:
    levels: tuple[EnergyLevel, ...]

    @property
    def total_particles(self) -> int:
        return sum(level.particles for level in self.levels)


def particle_spectrum(graph: ClauseGraph, tol: float = ENERGY_LEVEL_TOL) -> EnergySpectrum:
    """Group nodes into energy levels (ascending) with their particle loads."""
    energies = [node.fitness.energy for node in graph.nodes]
    levels = []
    for members in group_energy_levels(energies, tol):
        states = tuple(
            EnergyState(clause=graph.nodes[i].clause, particles=graph.nodes[i].particles)
            for i in sorted(members, key=lambda i: graph.nodes[i].clause)
        )
        levels.append(EnergyLevel(energy=min(energies[i] for i in members), states=states))
    return EnergySpectrum(levels=tuple(levels))


def export_dot(graph: ClauseGraph) -> str:
    """Undirected DOT text; node labels carry clause index and energy, edge
    labels carry the establishing weight."""
    lines = ["graph clause_network {"]
    for node in graph.nodes:
        lines.append(f'  c{node.clause} [label="C{node.clause} E={node.fitness.energy!r}"];')
    for key in sorted(graph.edges):
        edge = graph.edges[key]
        label = f"{edge.weight!r}"
        if edge.multiplicity > 1:
            label += f" x{edge.multiplicity}"
        lines.append(f'  c{edge.u} -- c{edge.v} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(graph: ClauseGraph) -> str:
    """Stable-order JSON dump; identical graphs serialize byte-identically."""
    payload = {
        "mode": graph.mode,
        "temperature": graph.temperature,
        "theta": graph.theta,
        "rho": graph.rho,
        "seed": graph.seed,
        "first_clause_rule": graph.first_clause_rule,
        "n": graph.n,
        "k": graph.k,
        "m": graph.m,
        "formula_sha256": graph.formula_sha256,
        "insertion_order": graph.insertion_order,
        "nodes": [
            {
                "clause": node.clause,
                "raw_fitness": node.fitness.raw,
                "normalized_fitness": node.fitness.normalized,
                "energy": node.fitness.energy,
                "connectivity": node.connectivity,
                "in_events": node.in_events,
                "out_events": node.out_events,
                "particles": node.particles,
            }
            for node in graph.nodes
        ],
        "edges": [
            {
                "u": edge.u,
                "v": edge.v,
                "weight": edge.weight,
                "multiplicity": edge.multiplicity,
            }
            for key, edge in sorted(graph.edges.items())
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def graph_from_json(text: str) -> ClauseGraph:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid graph JSON: {exc}") from None
    try:
        graph = ClauseGraph(
            mode=payload["mode"],
            temperature=payload["temperature"],
            theta=payload["theta"],
            rho=payload["rho"],
            seed=payload["seed"],
            first_clause_rule=payload["first_clause_rule"],
            n=payload["n"],
            k=payload["k"],
            formula_sha256=payload["formula_sha256"],
        )
        for entry in payload["nodes"]:
            graph.nodes.append(
                GraphNode(
                    clause=entry["clause"],
                    fitness=FitnessRecord(
                        raw=entry["raw_fitness"],
                        normalized=entry["normalized_fitness"],
                        energy=entry["energy"],
                    ),
                    connectivity=entry["connectivity"],
                    in_events=entry["in_events"],
                    out_events=entry["out_events"],
                )
            )
        for entry in payload["edges"]:
            edge = GraphEdge(
                u=entry["u"],
                v=entry["v"],
                weight=entry["weight"],
                multiplicity=entry["multiplicity"],
            )
            graph.edges[(edge.u, edge.v)] = edge
        declared_m = payload["m"]
        declared_order = payload["insertion_order"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"graph JSON missing or malformed field: {exc}") from None
    if graph.mode not in MODES:
        raise ValueError(f"unknown graph mode {graph.mode!r}")
    if declared_m != graph.m or declared_order != graph.insertion_order:
        raise ValueError("graph JSON is inconsistent with its node list")
    return graph
