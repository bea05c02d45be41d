"""Pipeline runner plus a reproducible random-search tuning harness.

Reproducibility contract: every trial gets its own `random.Random` seeded by
splitmix64(campaign_seed XOR golden-ratio-scrambled trial index). Draws
happen in a fixed order (alpha, beta, p, radius_coeff, solver), so results
are identical no matter how trials are scheduled across processes.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .coarsening import CoarseningParams, coarsen
from .evaluation import DEFAULT_WEIGHTS, Metrics, evaluate, objective_score
from .graph import Graph
from .heuristics import Solution, greedy_solve, savings_solve
from .inflation import inflate, light_postprocess
from .instances import Instance

SOLVERS = {"greedy": greedy_solve, "savings": savings_solve}


@dataclass(frozen=True)
class SearchSpace:
    alphas: tuple[float, ...] = (0.1, 0.5, 0.9)
    betas: tuple[float, ...] = (0.1, 0.5, 0.9)
    ps: tuple[float, ...] = (0.3, 0.5, 0.7)
    radius_coeffs: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)
    solvers: tuple[str, ...] = ("greedy", "savings")


@dataclass(frozen=True)
class TrialResult:
    trial: int
    alpha: float | None
    beta: float | None
    p: float | None
    radius_coeff: float | None
    propagation: str | None
    solver: str
    coarse_metrics: Metrics | None
    metrics: Metrics
    score: float
    coarsen_ms: float = 0.0
    solve_ms: float = 0.0
    inflate_ms: float = 0.0

    def params_doc(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "p": self.p,
                "radius_coeff": self.radius_coeff, "propagation": self.propagation,
                "solver": self.solver}


@dataclass
class PipelineResult:
    solution: Solution              # inflated + postprocessed, on the original graph
    coarse_solution: Solution
    coarse_graph: Graph
    coarse_metrics: Metrics
    metrics: Metrics
    score: float
    timings: dict = field(default_factory=dict)


def run_pipeline(instance: Instance, params: CoarseningParams, solver: str,
                 weights=DEFAULT_WEIGHTS) -> PipelineResult:
    """coarsen -> solve on the small graph -> inflate -> light repairs -> score."""
    solve_fn = SOLVERS[solver]
    graph = Graph.from_instance(instance)
    t0 = time.perf_counter()
    coarse_graph, history = coarsen(graph, params)
    t1 = time.perf_counter()
    coarse_solution = solve_fn(coarse_graph, instance.capacity)
    t2 = time.perf_counter()
    full = inflate(coarse_solution, history, graph)
    full = light_postprocess(full, graph, instance.capacity)
    t3 = time.perf_counter()
    coarse_metrics = evaluate(coarse_solution, coarse_graph, instance.capacity)
    metrics = evaluate(full, graph, instance.capacity)
    return PipelineResult(
        solution=full, coarse_solution=coarse_solution, coarse_graph=coarse_graph,
        coarse_metrics=coarse_metrics, metrics=metrics,
        score=objective_score(metrics, weights),
        timings={"coarsen_ms": (t1 - t0) * 1e3, "solve_ms": (t2 - t1) * 1e3,
                 "inflate_ms": (t3 - t2) * 1e3})


def solve_baseline(instance: Instance, solver: str) -> tuple[Solution, Metrics, float, dict]:
    solve_fn = SOLVERS[solver]
    graph = Graph.from_instance(instance)
    t0 = time.perf_counter()
    solution = solve_fn(graph, instance.capacity)
    solve_ms = (time.perf_counter() - t0) * 1e3
    metrics = evaluate(solution, graph, instance.capacity)
    return solution, metrics, objective_score(metrics), {"solve_ms": solve_ms}


def run_baseline(instance: Instance, solver: str) -> TrialResult:
    """Solve the uncoarsened instance directly; fills only the final metrics."""
    _, metrics, score, timings = solve_baseline(instance, solver)
    return TrialResult(trial=-1, alpha=None, beta=None, p=None, radius_coeff=None,
                       propagation=None, solver=solver, coarse_metrics=None,
                       metrics=metrics, score=score,
                       solve_ms=timings["solve_ms"])


# ---------------------------------------------------------------------------
# seeded search

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def trial_seed(seed: int, index: int) -> int:
    """Stable per-trial seed; independent of execution order."""
    return _splitmix64((seed & _MASK) ^ _splitmix64(index))


def sample_params(space: SearchSpace, rng: random.Random,
                  propagation: str = "relaxed") -> tuple[CoarseningParams, str]:
    """Draw one configuration. Order of draws is part of the contract."""
    alpha = rng.choice(space.alphas)
    beta = rng.choice(space.betas)
    p = rng.choice(space.ps)
    radius_coeff = rng.choice(space.radius_coeffs)
    solver = rng.choice(space.solvers)
    return CoarseningParams(alpha=alpha, beta=beta, p_target=p,
                            radius_coeff=radius_coeff, propagation=propagation), solver


def run_trial(instance: Instance, space: SearchSpace, seed: int, index: int,
              propagation: str = "relaxed") -> TrialResult:
    rng = random.Random(trial_seed(seed, index))
    params, solver = sample_params(space, rng, propagation)
    out = run_pipeline(instance, params, solver)
    return TrialResult(trial=index, alpha=params.alpha, beta=params.beta,
                       p=params.p_target, radius_coeff=params.radius_coeff,
                       propagation=params.propagation, solver=solver,
                       coarse_metrics=out.coarse_metrics, metrics=out.metrics,
                       score=out.score, coarsen_ms=out.timings["coarsen_ms"],
                       solve_ms=out.timings["solve_ms"],
                       inflate_ms=out.timings["inflate_ms"])


def random_search(instance: Instance, space: SearchSpace, n_trials: int, seed: int,
                  propagation: str = "relaxed", jobs: int = 1):
    """Run n_trials sampled configurations; returns (best, all_trials).

    Best is the lowest objective score, ties going to the earlier trial.
    Identical output for any `jobs` value.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_trial, [instance] * n_trials,
                                    [space] * n_trials, [seed] * n_trials,
                                    range(n_trials), [propagation] * n_trials))
    else:
        results = [run_trial(instance, space, seed, i, propagation)
                   for i in range(n_trials)]
    best = min(results, key=lambda r: (r.score, r.trial))
    return best, results
