"""Routing graph with time-window node attributes and forward schedule simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .instances import Instance

DEPOT_ID = 0


@dataclass(frozen=True)
class CoarseNode:
    id: int
    kind: str           # "depot" | "customer" | "supernode"
    x: float
    y: float
    demand: float
    service: float
    ready: float
    due: float
    nominal_t: float
    members: tuple[int, ...]

    @property
    def window(self) -> tuple[float, float]:
        return (self.ready, self.due)


def travel_time(a, b) -> float:
    """Euclidean travel time between two point-like objects (unit speed)."""
    return math.hypot(a.x - b.x, a.y - b.y)


def nominal_visit_time(node, policy: str = "midpoint") -> float:
    """Representative service-start time used by the temporal distance.

    midpoint: halfway between the earliest start and the latest start that
    still finishes by the deadline, i.e. (ready + (due - service)) / 2.
    earliest: just the window open.
    """
    if policy == "midpoint":
        return (node.ready + (node.due - node.service)) / 2.0
    if policy == "earliest":
        return node.ready
    raise ValueError(f"unknown nominal time policy: {policy!r}")


def _tau_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Graph:
    """Depot plus customer/super nodes with an explicit symmetric travel-time store.

    Travel times are kept per pair rather than derived from coordinates because
    coarsening may install non-Euclidean (worst-case) times for super-nodes.
    """

    def __init__(self, depot: CoarseNode, nodes: dict[int, CoarseNode],
                 tau: dict[tuple[int, int], float], name: str = "graph"):
        if depot.id != DEPOT_ID:
            raise ValueError("depot id must be 0")
        self.depot = depot
        self._nodes = dict(nodes)
        self._tau = tau
        self.name = name

    @classmethod
    def from_instance(cls, instance: Instance, nominal_policy: str = "midpoint") -> "Graph":
        d = instance.depot
        depot = CoarseNode(d.id, "depot", d.x, d.y, 0.0, 0.0, d.ready, d.due,
                           nominal_visit_time(d, nominal_policy), (d.id,))
        nodes = {}
        for c in instance.customers:
            nodes[c.id] = CoarseNode(c.id, "customer", c.x, c.y, c.demand, c.service,
                                     c.ready, c.due, nominal_visit_time(c, nominal_policy),
                                     (c.id,))
        everything = [depot, *nodes.values()]
        tau = {}
        for i, a in enumerate(everything):
            for b in everything[i + 1:]:
                tau[_tau_key(a.id, b.id)] = travel_time(a, b)
        return cls(depot, nodes, tau, name=instance.name)

    def node(self, nid: int) -> CoarseNode:
        if nid == DEPOT_ID:
            return self.depot
        return self._nodes[nid]

    @property
    def customers(self) -> tuple[CoarseNode, ...]:
        return tuple(self._nodes.values())

    def customer_ids(self) -> list[int]:
        return sorted(self._nodes)

    @property
    def customer_count(self) -> int:
        return len(self._nodes)

    def tau(self, a: int, b: int) -> float:
        if a == b:
            return 0.0
        return self._tau[_tau_key(a, b)]

    def extent(self) -> float:
        """Largest bounding-box dimension over every node, depot included."""
        xs = [self.depot.x] + [n.x for n in self._nodes.values()]
        ys = [self.depot.y] + [n.y for n in self._nodes.values()]
        return max(max(xs) - min(xs), max(ys) - min(ys))

    def member_ids(self) -> list[int]:
        out = []
        for n in self._nodes.values():
            out.extend(n.members)
        return sorted(out)


@dataclass(frozen=True)
class StopTiming:
    arrival: float
    wait: float
    service_start: float
    departure: float


@dataclass
class Route:
    stops: list[int]                       # depot ... depot
    schedule: list[StopTiming] = field(default_factory=list)
    load: float = 0.0
    late_stops: tuple[int, ...] = ()       # positions where service_start > due
    over_capacity: bool = False

    @property
    def tw_violations(self) -> int:
        return len(self.late_stops)

    @property
    def customer_stops(self) -> list[int]:
        return [s for s in self.stops if s != DEPOT_ID]

    @property
    def duration(self) -> float:
        return self.schedule[-1].departure - self.schedule[0].departure if self.schedule else 0.0

    def distance(self, graph: Graph) -> float:
        return sum(graph.tau(a, b) for a, b in zip(self.stops, self.stops[1:]))


def recompute_schedule(stops, graph: Graph, capacity: float | None = None) -> Route:
    """Forward-simulate a depot-to-depot stop sequence.

    The vehicle departs the depot at time 0. At each stop: wait if early
    (wait = max(0, ready - arrival)), then service_start = arrival + wait and
    departure = service_start + service. A stop is late when its
    service_start exceeds its due time; late stops are recorded, never
    rejected. With a capacity, the route is additionally flagged when total
    demand exceeds it.
    """
    stops = list(stops)
    if len(stops) < 2 or stops[0] != DEPOT_ID or stops[-1] != DEPOT_ID:
        raise ValueError("a route must start and end at the depot")
    schedule = [StopTiming(0.0, 0.0, 0.0, 0.0)]
    late = []
    load = 0.0
    t = 0.0
    for pos in range(1, len(stops)):
        node = graph.node(stops[pos])
        arrival = t + graph.tau(stops[pos - 1], stops[pos])
        wait = max(0.0, node.ready - arrival)
        service_start = arrival + wait
        departure = service_start + node.service
        schedule.append(StopTiming(arrival, wait, service_start, departure))
        if service_start > node.due:
            late.append(pos)
        load += node.demand
        t = departure
    over = capacity is not None and load > capacity
    return Route(stops, schedule, load, tuple(late), over)
