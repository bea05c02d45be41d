"""Expand coarse solutions back onto the original graph, then patch them up."""

from __future__ import annotations

from .coarsening import MergeHistory
from .graph import DEPOT_ID, Graph, recompute_schedule
from .heuristics import Solution


class InflationError(ValueError):
    """A route references a super-node the merge history cannot expand."""


def inflate(solution: Solution, history: MergeHistory, original: Graph) -> Solution:
    """Replay the merge history newest-first, substituting each super-node
    in place with its two children in their recorded service order, then
    rebuild all schedules on the original graph's travel times.

    Route count and stop order are preserved; records whose super-node never
    appears in any route are simply skipped.
    """
    stop_lists = [list(r.stops) for r in solution.routes]
    for rec in history.newest_first():
        for stops in stop_lists:
            for pos in range(len(stops) - 1, -1, -1):
                if stops[pos] == rec.super_id:
                    stops[pos:pos + 1] = list(rec.order)
    known = {DEPOT_ID, *original.customer_ids()}
    for stops in stop_lists:
        for s in stops:
            if s not in known:
                raise InflationError(f"node {s} not expandable from the merge history")
    routes = [recompute_schedule(stops, original) for stops in stop_lists]
    return Solution(routes, solution.solver, original.name, solution.flagged_routes)


def light_postprocess(solution: Solution, graph: Graph, capacity: float) -> Solution:
    """Cheap repairs after inflation, applied until nothing changes.

    (a) adjacent swap: exchanging a late stop with its predecessor is kept
        when it strictly lowers the route's violation count and leaves both
        swapped stops on time;
    (b) capacity split: a route over capacity repeatedly moves its last
        customer into a fresh singleton route.

    Idempotent: running it on its own output is a no-op.
    """
    stop_lists = [list(r.stops) for r in solution.routes]
    changed = True
    while changed:
        changed = False
        for stops in stop_lists:
            route = recompute_schedule(stops, graph)
            for pos in route.late_stops:
                if pos < 2 or pos >= len(stops) - 1:
                    continue  # only interior customer pairs can swap
                trial = stops[:]
                trial[pos - 1], trial[pos] = trial[pos], trial[pos - 1]
                swapped = recompute_schedule(trial, graph)
                if (swapped.tw_violations < route.tw_violations
                        and pos not in swapped.late_stops
                        and pos - 1 not in swapped.late_stops):
                    stops[:] = trial
                    changed = True
                    break
        new_routes = []
        for stops in stop_lists:
            route = recompute_schedule(stops, graph, capacity)
            while route.over_capacity and len(route.customer_stops) > 1:
                last = stops[-2]
                del stops[-2]
                new_routes.append([DEPOT_ID, last, DEPOT_ID])
                route = recompute_schedule(stops, graph, capacity)
                changed = True
        stop_lists.extend(new_routes)
    routes = [recompute_schedule(stops, graph, capacity) for stops in stop_lists]
    return Solution(routes, solution.solver, solution.source_graph,
                    solution.flagged_routes)
