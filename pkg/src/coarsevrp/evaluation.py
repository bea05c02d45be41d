"""Solution metrics and the penalized objective used to compare trials."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, recompute_schedule
from .heuristics import Solution


@dataclass(frozen=True)
class Metrics:
    total_distance: float
    num_vehicles: int
    total_duration: float
    tw_violations: int
    capacity_violations: int
    feasible: bool


@dataclass(frozen=True)
class PenaltyWeights:
    lambda_vehicles: float = 1000.0
    lambda_capacity: float = 1000.0
    lambda_time: float = 1000.0


DEFAULT_WEIGHTS = PenaltyWeights()


def evaluate(solution: Solution, graph: Graph, capacity: float) -> Metrics:
    """Recompute every route from scratch and aggregate.

    Duration counts travel + waiting + service from the depot departure to
    the return. A vehicle is counted per route that serves at least one
    customer. Violation counts are per late stop / per over-capacity route.
    """
    distance = 0.0
    duration = 0.0
    vehicles = 0
    late = 0
    over = 0
    for r in solution.routes:
        route = recompute_schedule(r.stops, graph, capacity)
        if route.customer_stops:
            vehicles += 1
        distance += route.distance(graph)
        duration += route.duration
        late += route.tw_violations
        over += 1 if route.over_capacity else 0
    return Metrics(distance, vehicles, duration, late, over,
                   feasible=(late == 0 and over == 0))


def objective_score(metrics: Metrics, weights: PenaltyWeights = DEFAULT_WEIGHTS) -> float:
    """Distance plus a per-vehicle cost plus flat penalties.

    Capacity and time-window penalties are flags, not counts: one violation
    costs the same as ten. An empty solution scores 0.
    """
    return (metrics.total_distance
            + weights.lambda_vehicles * metrics.num_vehicles
            + weights.lambda_capacity * (1 if metrics.capacity_violations > 0 else 0)
            + weights.lambda_time * (1 if metrics.tw_violations > 0 else 0))
