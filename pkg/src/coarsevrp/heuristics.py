"""Constructive route builders and a small exact oracle.

Both heuristics work on any Graph (original or coarsened) and only need the
vehicle capacity; they never assume Euclidean travel times, so they run
unchanged on coarse graphs with worst-case super-node times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .graph import DEPOT_ID, Graph, Route, recompute_schedule
from .instances import Instance


@dataclass
class Solution:
    routes: list[Route]
    solver: str
    source_graph: str
    flagged_routes: tuple[int, ...] = ()   # indices of fallback routes (unservable even alone)

    @property
    def customer_stops(self) -> list[int]:
        out = []
        for r in self.routes:
            out.extend(r.customer_stops)
        return out


def _route(stops, graph, capacity) -> Route:
    return recompute_schedule(stops, graph, capacity)


def greedy_solve(graph: Graph, capacity: float) -> Solution:
    """Nearest-feasible-neighbour construction.

    Extends the current route with the closest unrouted node that fits the
    remaining capacity, can be served by its due time, and still allows the
    return to the depot; ties go to the lower id. When nothing fits, the
    route is closed and a fresh one opened. Nodes infeasible even on a fresh
    route become flagged singleton routes so nothing is silently dropped.
    """
    depot = graph.depot
    unrouted = graph.customer_ids()
    routes: list[Route] = []
    flagged: list[int] = []
    while unrouted:
        stops = [DEPOT_ID]
        time = 0.0
        load = 0.0
        while True:
            best = None
            best_key = None
            for c in unrouted:
                node = graph.node(c)
                if load + node.demand > capacity:
                    continue
                arrival = time + graph.tau(stops[-1], c)
                start = max(arrival, node.ready)
                if start > node.due:
                    continue
                if start + node.service + graph.tau(c, DEPOT_ID) > depot.due:
                    continue
                key = graph.tau(stops[-1], c)
                if best_key is None or key < best_key:
                    best, best_key = c, key
            if best is None:
                break
            node = graph.node(best)
            time = max(time + graph.tau(stops[-1], best), node.ready) + node.service
            load += node.demand
            stops.append(best)
            unrouted.remove(best)
        if len(stops) == 1:
            # nothing fits even a fresh vehicle: emit the rest as flagged singletons
            for c in unrouted:
                flagged.append(len(routes))
                routes.append(_route([DEPOT_ID, c, DEPOT_ID], graph, capacity))
            break
        routes.append(_route(stops + [DEPOT_ID], graph, capacity))
    return Solution(routes, "greedy", graph.name, tuple(flagged))


def savings_value(graph: Graph, i: int, j: int) -> float:
    """Distance saved by chaining i and j instead of two depot round trips."""
    return graph.tau(DEPOT_ID, i) + graph.tau(DEPOT_ID, j) - graph.tau(i, j)


def savings_solve(graph: Graph, capacity: float) -> Solution:
    """Parallel savings construction adapted to time windows.

    Starts from one round trip per node and repeatedly merges the pair with
    the highest savings value, but only end-to-start (the route ending at i
    is chained before the route starting at j, or the mirror image — no
    reversals), and only when the merged route fits capacity and introduces
    no new time-window violation.
    """
    ids = graph.customer_ids()
    routes = {k: [c] for k, c in enumerate(ids)}        # interior stops only
    route_of = {c: k for k, c in enumerate(ids)}
    loads = {k: graph.node(c).demand for k, c in enumerate(ids)}
    viols = {k: _route([DEPOT_ID, c, DEPOT_ID], graph, capacity).tw_violations
             for k, c in enumerate(ids)}
    pairs = [(-savings_value(graph, i, j), i, j) for i, j in combinations(ids, 2)]
    pairs.sort()
    for neg, i, j in pairs:
        ri, rj = route_of[i], route_of[j]
        if ri == rj:
            continue
        if loads[ri] + loads[rj] > capacity:
            continue
        if routes[ri][-1] == i and routes[rj][0] == j:
            front, back = ri, rj
        elif routes[rj][-1] == j and routes[ri][0] == i:
            front, back = rj, ri
        else:
            continue
        merged = routes[front] + routes[back]
        trial = _route([DEPOT_ID, *merged, DEPOT_ID], graph, capacity)
        if trial.tw_violations > viols[front] + viols[back]:
            continue
        routes[front] = merged
        loads[front] += loads[back]
        viols[front] = trial.tw_violations
        for c in routes[back]:
            route_of[c] = front
        del routes[back], loads[back], viols[back]
    final = [_route([DEPOT_ID, *routes[k], DEPOT_ID], graph, capacity)
             for k in sorted(routes)]
    return Solution(final, "savings", graph.name)


# ---------------------------------------------------------------------------
# exact oracle for tiny instances

def brute_force_optimal(instance: Instance, max_customers: int = 9) -> Solution | None:
    """Exhaustive minimum-distance solution with hard feasibility.

    Enumerates, per customer subset, the cheapest service order that respects
    every time window (depot return included) and the capacity, then picks
    the cheapest partition of all customers into such routes by dynamic
    programming over subsets. Returns None when no fully feasible solution
    exists. Deliberately refuses more than `max_customers` customers.

    The time simulation here is intentionally written out rather than shared
    with the Route machinery, so it can serve as an independent check.
    """
    n = len(instance.customers)
    if n > max_customers:
        raise ValueError(f"brute force capped at {max_customers} customers, got {n}")
    if n == 0:
        return Solution([], "brute-force", instance.name)
    pts = [instance.depot, *instance.customers]
    dist = [[math.hypot(a.x - b.x, a.y - b.y) for b in pts] for a in pts]
    ready = [c.ready for c in pts]
    due = [c.due for c in pts]
    serv = [c.service for c in pts]
    demand = [c.demand for c in pts]

    best_route: dict[int, tuple[float, tuple[int, ...]]] = {}

    def explore(mask_left, last, time, cost, path, best):
        # best is a 1-element list holding (cost, path) found so far for this subset
        if cost >= best[0][0]:
            return
        if mask_left == 0:
            t = time + dist[last][0]
            start = max(t, ready[0])
            if start <= due[0] and cost + dist[last][0] < best[0][0]:
                best[0] = (cost + dist[last][0], path)
            return
        m = mask_left
        while m:
            low = m & -m
            c = low.bit_length()   # customer ids are 1-based; bit k-1 <-> id k
            m ^= low
            t = time + dist[last][c]
            start = max(t, ready[c])
            if start > due[c]:
                continue
            explore(mask_left ^ low, c, start + serv[c], cost + dist[last][c],
                    path + (c,), best)

    full = (1 << n) - 1
    for mask in range(1, full + 1):
        total = sum(demand[k + 1] for k in range(n) if mask >> k & 1)
        if total > instance.capacity:
            continue
        best = [(math.inf, ())]
        explore(mask, 0, 0.0, 0.0, (), best)
        if best[0][0] < math.inf:
            best_route[mask] = best[0]

    INF = math.inf
    part_cost = [INF] * (full + 1)
    part_pick = [0] * (full + 1)
    part_cost[0] = 0.0
    for mask in range(1, full + 1):
        low = mask & -mask
        sub = mask
        while sub:
            if sub & low and sub in best_route:
                rest = part_cost[mask ^ sub]
                cand = best_route[sub][0] + rest
                if cand < part_cost[mask]:
                    part_cost[mask] = cand
                    part_pick[mask] = sub
            sub = (sub - 1) & mask
    if part_cost[full] == INF:
        return None

    graph = Graph.from_instance(instance)
    stops_lists = []
    mask = full
    while mask:
        sub = part_pick[mask]
        stops_lists.append([DEPOT_ID, *best_route[sub][1], DEPOT_ID])
        mask ^= sub
    stops_lists.reverse()
    routes = [recompute_schedule(s, graph, instance.capacity) for s in stops_lists]
    return Solution(routes, "brute-force", instance.name)
