"""satbec: clause networks from k-SAT formulas, condensation-phase
analysis, and energy-ordered circumspect local search."""

__version__ = "0.1.0"

from .analysis import Phase, PhaseLabel, classify, fraction_winner, nonwinner_stats, winner
from .builder import (
    BuilderConfig,
    BuildState,
    attachment_probabilities,
    build_graph,
    build_s2g,
    build_s2g_pa,
    find_closest_clause,
    select_first_clause,
    update_fitness,
)
from .solver import (
    ClauseOrder,
    SolverResult,
    chainsat,
    clause_order,
    compare,
    lc_chainsat,
    nlc_chainsat,
)
from .cnf import (
    Assignment,
    Clause,
    DimacsError,
    Formula,
    Literal,
    evaluate,
    formula_sha256,
    generate_random,
    parse_dimacs,
    serialize_dimacs,
)
from .graph import (
    ClauseGraph,
    EnergyLevel,
    EnergySpectrum,
    EnergyState,
    GraphEdge,
    GraphNode,
    export_dot,
    graph_from_json,
    graph_to_json,
    particle_spectrum,
)
from .metrics import (
    FitnessRecord,
    FrequencyTable,
    clause_distance,
    clause_fitness,
    energy,
    literal_frequency,
)

__all__ = [name for name in dir() if not name.startswith("_")]
