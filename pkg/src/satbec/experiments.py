"""Desk-scale experiment harnesses: phase sweeps over (n, alpha) grids,
polynomial transition localization, and solver benchmarks.

All sampling is addressed by (root seed, grid indices), so results do not
depend on iteration order or worker count; see ``seeding`` for the layout.
"""

from __future__ import annotations

import io
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import solver
from .analysis import Phase, classify, nonwinner_stats
from .builder import BuilderConfig, build_graph
from .cnf import Formula, generate_random
from .graph import MODE_S2G, MODE_S2GPA, ClauseGraph
from .seeding import TAG_BUILD, TAG_GENERATE, TAG_ORDER, TAG_SOLVE, derive_seed

# accepted satisfiability thresholds for uniform random k-SAT
SAT_THRESHOLD = {3: 4.256, 4: 9.931, 5: 21.117}


def clause_count(n: int, alpha: float) -> int:
    """m = round(alpha * n), banker's rounding on .5 ties."""
    return round(alpha * n)


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...]
    alphas: tuple[float, ...]
    instances: int = 30
    graphs_per_instance: int = 10
    k: int = 3
    mode: str = MODE_S2GPA
    theta: float = 0.33
    rho: int = 1
    temperature: float = 1.0
    first_clause_rule: str = "random"
    seed_root: int = 0

    def __post_init__(self):
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("n_values must be positive")
        if not self.alphas or any(a <= 0 for a in self.alphas):
            raise ValueError("alphas must be positive")
        if list(self.alphas) != sorted(self.alphas):
            raise ValueError("alphas must be ascending")
        if self.instances < 1 or self.graphs_per_instance < 1:
            raise ValueError("instances and graphs_per_instance must be >= 1")
        if self.seed_root < 0:
            raise ValueError("seed_root must be non-negative")

    def builder_config(self, seed: int) -> BuilderConfig:
        return BuilderConfig(
            mode=self.mode,
            temperature=self.temperature,
            theta=self.theta,
            rho=self.rho,
            seed=seed,
            first_clause_rule=self.first_clause_rule,
        )


@dataclass(frozen=True)
class GraphSample:
    """Classification summary of one built graph."""

    n: int
    alpha: float
    instance: int
    graph: int
    fraction_winner: float
    label: str
    nonwinner_mean: float
    nonwinner_std: float


@dataclass(frozen=True)
class SweepRecord:
    n: int
    alpha: float
    mean_fraction_winner: float
    pct_full_bec: float
    pct_partial_bec: float
    pct_fgr: float
    nonwinner_mean: float
    nonwinner_std: float
    samples: int


def sample_formula(cfg: SweepConfig, n_index: int, alpha_index: int, instance: int) -> Formula:
    n = cfg.n_values[n_index]
    m = clause_count(n, cfg.alphas[alpha_index])
    seed = derive_seed(cfg.seed_root, TAG_GENERATE, n_index, alpha_index, instance)
    return generate_random(seed, cfg.k, n, m)


def build_sample_graph(
    cfg: SweepConfig,
    n_index: int,
    alpha_index: int,
    instance: int,
    graph_index: int,
    formula: Formula | None = None,
) -> ClauseGraph:
    if formula is None:
        formula = sample_formula(cfg, n_index, alpha_index, instance)
    seed = derive_seed(cfg.seed_root, TAG_BUILD, n_index, alpha_index, instance, graph_index)
    return build_graph(formula, cfg.builder_config(seed))


def run_grid_point(cfg: SweepConfig, n_index: int, alpha_index: int) -> list[GraphSample]:
    """All samples for one grid point, in (instance, graph) order."""
    n = cfg.n_values[n_index]
    alpha = cfg.alphas[alpha_index]
    samples = []
    for instance in range(cfg.instances):
        formula = sample_formula(cfg, n_index, alpha_index, instance)
        for graph_index in range(cfg.graphs_per_instance):
            graph = build_sample_graph(
                cfg, n_index, alpha_index, instance, graph_index, formula=formula
            )
            label = classify(graph)
            mean, std = nonwinner_stats(graph)
            samples.append(
                GraphSample(
                    n=n,
                    alpha=alpha,
                    instance=instance,
                    graph=graph_index,
                    fraction_winner=label.fraction_winner,
                    label=label.label.value,
                    nonwinner_mean=mean,
                    nonwinner_std=std,
                )
            )
    return samples


def aggregate_samples(samples: list[GraphSample]) -> SweepRecord:
    if not samples:
        raise ValueError("no samples to aggregate")
    count = len(samples)
    fractions = [s.fraction_winner for s in samples]
    labels = [s.label for s in samples]
    return SweepRecord(
        n=samples[0].n,
        alpha=samples[0].alpha,
        mean_fraction_winner=float(np.mean(fractions)),
        pct_full_bec=100.0 * labels.count(Phase.FULL_BEC.value) / count,
        pct_partial_bec=100.0 * labels.count(Phase.PARTIAL_BEC.value) / count,
        pct_fgr=100.0 * labels.count(Phase.FIT_GET_RICH.value) / count,
        nonwinner_mean=float(np.mean([s.nonwinner_mean for s in samples])),
        nonwinner_std=float(np.mean([s.nonwinner_std for s in samples])),
        samples=count,
    )


def _sweep_task(args) -> tuple[tuple[int, int], list[GraphSample]]:
    cfg, n_index, alpha_index = args
    return (n_index, alpha_index), run_grid_point(cfg, n_index, alpha_index)


def sweep(cfg: SweepConfig, jobs: int = 1) -> list[SweepRecord]:
    """One record per (n, alpha) grid point, n-major order.

    ``jobs`` > 1 distributes grid points over processes; the output is
    independent of the worker count.
    """
    tasks = [
        (cfg, n_index, alpha_index)
        for n_index in range(len(cfg.n_values))
        for alpha_index in range(len(cfg.alphas))
    ]
    by_point: dict[tuple[int, int], list[GraphSample]] = {}
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, samples in pool.map(_sweep_task, tasks):
                by_point[key] = samples
    else:
        for task in tasks:
            key, samples = _sweep_task(task)
            by_point[key] = samples
    return [aggregate_samples(by_point[key]) for key in sorted(by_point)]


SWEEP_CSV_COLUMNS = (
    "n",
    "alpha",
    "mean_fraction_winner",
    "pct_full_bec",
    "pct_partial_bec",
    "pct_fgr",
    "nonwinner_mean",
    "nonwinner_std",
    "samples",
)


def sweep_records_to_csv(records) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.n,
                repr(float(r.alpha)),
                repr(r.mean_fraction_winner),
                repr(r.pct_full_bec),
                repr(r.pct_partial_bec),
                repr(r.pct_fgr),
                repr(r.nonwinner_mean),
                repr(r.nonwinner_std),
                r.samples,
            ]
        )
    return out.getvalue()


@dataclass(frozen=True)
class PolyFit:
    coefficients: tuple[float, ...]  # c0..c6, y = sum c_j * alpha**j
    residual: float

    def __call__(self, alpha: float) -> float:
        return float(np.polynomial.polynomial.polyval(alpha, self.coefficients))


def polyfit6(points) -> PolyFit:
    """Degree-6 least-squares fit of (alpha, y) points.

    Solved by QR/SVD least squares on a column-scaled Vandermonde matrix;
    plain normal equations lose ~12 digits of conditioning here and miss the
    exact-recovery tolerance, so they are not used.
    """
    pts = [(float(a), float(y)) for a, y in points]
    alphas = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if len(set(alphas.tolist())) < 7:
        raise ValueError("need at least 7 distinct abscissae for a degree-6 fit")
    vander = np.vander(alphas, 7, increasing=True)
    scale = np.linalg.norm(vander, axis=0)
    coeffs, _, _, _ = np.linalg.lstsq(vander / scale, ys, rcond=None)
    coeffs = coeffs / scale
    residual = float(np.sum((vander @ coeffs - ys) ** 2))
    return PolyFit(coefficients=tuple(float(c) for c in coeffs), residual=residual)


def second_derivative(fit: PolyFit, alpha: float) -> float:
    """Analytic second derivative of the fitted polynomial at alpha."""
    c = fit.coefficients
    return float(sum(j * (j - 1) * c[j] * alpha ** (j - 2) for j in range(2, len(c))))


def second_derivative_peak(fit: PolyFit, lo: float, hi: float, samples: int = 2001) -> float:
    """Location of the highest interior local maximum of the fitted curve's
    second derivative on [lo, hi].

    Degree-6 fits can swing wildly at the window edges, so boundary argmaxes
    are only returned when no interior local maximum exists.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    grid = np.linspace(lo, hi, samples)
    values = np.array([second_derivative(fit, a) for a in grid])
    interior = [
        i
        for i in range(1, samples - 1)
        if values[i] >= values[i - 1] and values[i] >= values[i + 1]
    ]
    if interior:
        best = max(interior, key=lambda i: values[i])
        return float(grid[best])
    return float(grid[int(np.argmax(values))])


@dataclass(frozen=True)
class BenchConfig:
    k: int = 3
    n_values: tuple[int, ...] = (25, 50)
    alphas: tuple[float, ...] = ()
    instances: int = 30
    budget: int = solver.DESK_BUDGET
    p1: float | None = None
    p2: float | None = None
    solvers: tuple[str, ...] = ("chainsat", "lc", "nlc")
    graph_mode: str = MODE_S2G
    theta: float = 0.33
    rho: int = 1
    temperature: float = 1.0
    first_clause_rule: str = "random"
    seed_root: int = 0

    def __post_init__(self):
        known = {"chainsat", "lc", "nlc"}
        if not self.solvers or any(s not in known for s in self.solvers):
            raise ValueError(f"solvers must be drawn from {sorted(known)}")
        if len(set(self.solvers)) != len(self.solvers):
            raise ValueError("duplicate solver names")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")

    def resolved_alphas(self) -> tuple[float, ...]:
        if self.alphas:
            return self.alphas
        return default_alpha_grid(self.k)


def default_alpha_grid(k: int, points: int = 8) -> tuple[float, ...]:
    """Evenly spaced alphas spanning [threshold - 2, threshold + 1]."""
    try:
        threshold = SAT_THRESHOLD[k]
    except KeyError:
        raise ValueError(f"no accepted threshold for k={k}; pass alphas explicitly") from None
    return tuple(float(a) for a in np.linspace(threshold - 2.0, threshold + 1.0, points))


@dataclass(frozen=True)
class SolverSummary:
    solver: str
    solved: int
    satisfied_mean: float
    flips_total: int


@dataclass(frozen=True)
class GroupVerdict:
    n: int
    alpha: float
    solver_a: str
    solver_b: str
    verdict: str


@dataclass(frozen=True)
class BenchReport:
    summaries: tuple[SolverSummary, ...]
    verdicts: tuple[GroupVerdict, ...]
    # per solver, results in (n_index, alpha_index, instance) order
    results: dict


def _bench_group(args):
    cfg, n_index, alpha_index = args
    n = cfg.n_values[n_index]
    alphas = cfg.resolved_alphas()
    alpha = alphas[alpha_index]
    m = clause_count(n, alpha)
    needs_graph = any(s in ("lc", "nlc") for s in cfg.solvers)
    group: dict[str, list[solver.SolverResult]] = {s: [] for s in cfg.solvers}
    for instance in range(cfg.instances):
        fseed = derive_seed(cfg.seed_root, TAG_GENERATE, n_index, alpha_index, instance)
        formula = generate_random(fseed, cfg.k, n, m)
        order = None
        if needs_graph:
            gseed = derive_seed(cfg.seed_root, TAG_BUILD, n_index, alpha_index, instance, 0)
            graph = build_graph(
                formula,
                BuilderConfig(
                    mode=cfg.graph_mode,
                    temperature=cfg.temperature,
                    theta=cfg.theta,
                    rho=cfg.rho,
                    seed=gseed,
                    first_clause_rule=cfg.first_clause_rule,
                ),
            )
            oseed = derive_seed(cfg.seed_root, TAG_ORDER, n_index, alpha_index, instance)
            order = solver.clause_order(formula, graph, oseed)
        for solver_index, name in enumerate(cfg.solvers):
            sseed = derive_seed(
                cfg.seed_root, TAG_SOLVE, n_index, alpha_index, instance, solver_index
            )
            if name == "chainsat":
                result = solver.chainsat(formula, cfg.p1, cfg.p2, cfg.budget, sseed)
            elif name == "lc":
                result = solver.lc_chainsat(formula, order, cfg.p1, cfg.p2, cfg.budget, sseed)
            else:
                result = solver.nlc_chainsat(formula, order, cfg.p1, cfg.p2, cfg.budget, sseed)
            group[name].append(result)
    return (n_index, alpha_index), group


def benchmark(cfg: BenchConfig, jobs: int = 1) -> BenchReport:
    """Run every configured solver over the instance grid and compare each
    one against the first-listed solver per (n, alpha) group."""
    alphas = cfg.resolved_alphas()
    tasks = [
        (cfg, n_index, alpha_index)
        for n_index in range(len(cfg.n_values))
        for alpha_index in range(len(alphas))
    ]
    groups: dict[tuple[int, int], dict[str, list[solver.SolverResult]]] = {}
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, group in pool.map(_bench_group, tasks):
                groups[key] = group
    else:
        for task in tasks:
            key, group = _bench_group(task)
            groups[key] = group

    results: dict[str, list[solver.SolverResult]] = {s: [] for s in cfg.solvers}
    for key in sorted(groups):
        for name in cfg.solvers:
            results[name].extend(groups[key][name])

    summaries = []
    for name in cfg.solvers:
        runs = results[name]
        summaries.append(
            SolverSummary(
                solver=name,
                solved=sum(1 for r in runs if r.solved),
                satisfied_mean=float(np.mean([r.satisfied_clauses for r in runs])),
                flips_total=sum(r.flips for r in runs),
            )
        )

    verdicts = []
    baseline = cfg.solvers[0]
    for key in sorted(groups):
        n_index, alpha_index = key
        for name in cfg.solvers[1:]:
            verdicts.append(
                GroupVerdict(
                    n=cfg.n_values[n_index],
                    alpha=alphas[alpha_index],
                    solver_a=name,
                    solver_b=baseline,
                    verdict=solver.compare(groups[key][name], groups[key][baseline]),
                )
            )
    return BenchReport(
        summaries=tuple(summaries),
        verdicts=tuple(verdicts),
        results={name: tuple(runs) for name, runs in results.items()},
    )


BENCH_CSV_COLUMNS = ("row", "solver", "solved", "maxsat", "flips", "n", "alpha", "verdict")


def bench_report_to_csv(report: BenchReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_CSV_COLUMNS)
    for s in report.summaries:
        writer.writerow(
            ["result", s.solver, s.solved, repr(s.satisfied_mean), s.flips_total, "", "", ""]
        )
    for v in report.verdicts:
        writer.writerow(
            ["verdict", f"{v.solver_a}-vs-{v.solver_b}", "", "", "", v.n, repr(float(v.alpha)), v.verdict]
        )
    return out.getvalue()
