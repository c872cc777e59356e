"""Road + transit network with travel-time queries for cars and public transit.

The road network is a strongly connected weighted digraph with integer edge
weights in seconds.  Public transit is layered on top as ordered station
sequences (lines); each hop between consecutive stations of a line costs a
mode-dependent multiple of the car travel time on that hop, which folds
service/waiting time into the cost.  Access and egress legs between an
arbitrary location and a boarding/alighting station are priced at the bus
multiplier times the car time.
"""
from __future__ import annotations

import heapq
import json
import math
import random
import threading
from dataclasses import dataclass, field
from enum import Enum


class NetworkError(Exception):
    """Malformed network or query against an unknown location."""


class UnknownLocationError(NetworkError):
    pass


class Mode(str, Enum):
    TRAIN = "train"
    BUS = "bus"


@dataclass(frozen=True)
class Location:
    id: str
    x: float
    y: float


@dataclass(frozen=True)
class Station:
    location: str  # location id
    mode: Mode


class TransitNetwork:
    """Immutable after construction; queries are memoized and thread-safe."""

    def __init__(
        self,
        locations: list[Location],
        stations: list[Station],
        road_edges: list[tuple[str, str, int]],
        transit_lines: list[tuple[Mode, list[str]]],
        train_factor: float = 1.15,
        bus_factor: float = 2.0,
    ):
        self.locations: dict[str, Location] = {}
        for loc in locations:
            if loc.id in self.locations:
                raise NetworkError(f"duplicate location id {loc.id!r}")
            if not (math.isfinite(loc.x) and math.isfinite(loc.y)):
                raise NetworkError(f"non-finite coords for location {loc.id!r}")
            self.locations[loc.id] = loc

        self.stations: dict[str, Station] = {}
        for st in stations:
            if st.location not in self.locations:
                raise NetworkError(f"station at unknown location {st.location!r}")
            if st.location in self.stations:
                raise NetworkError(f"duplicate station at location {st.location!r}")
            self.stations[st.location] = st
        if not any(s.mode is Mode.TRAIN for s in self.stations.values()):
            raise NetworkError("network needs at least one train station")

        if train_factor < 1:
            raise NetworkError("train factor must be >= 1")
        if bus_factor < train_factor:
            raise NetworkError("bus factor must be >= train factor")
        self.train_factor = train_factor
        self.bus_factor = bus_factor

        self._adj: dict[str, list[tuple[str, int]]] = {u: [] for u in self.locations}
        self._radj: dict[str, list[tuple[str, int]]] = {u: [] for u in self.locations}
        for idx, (u, v, w) in enumerate(road_edges):
            if u not in self.locations or v not in self.locations:
                raise NetworkError(f"road edge #{idx} ({u!r} -> {v!r}) references unknown location")
            if not isinstance(w, int) or w <= 0:
                raise NetworkError(f"road edge #{idx} ({u!r} -> {v!r}) weight must be a positive integer")
            self._adj[u].append((v, w))
            self._radj[v].append((u, w))
        self.road_edges = list(road_edges)

        self.transit_lines: list[tuple[Mode, list[str]]] = []
        for lidx, (mode, seq) in enumerate(transit_lines):
            mode = Mode(mode)
            if len(seq) < 2:
                raise NetworkError(f"transit line #{lidx} needs at least two stations")
            for s in seq:
                if s not in self.stations:
                    raise NetworkError(f"transit line #{lidx} references non-station location {s!r}")
            self.transit_lines.append((mode, list(seq)))

        self._check_strong_connectivity()

        self._lock = threading.Lock()
        self._fwd: dict[str, dict[str, int]] = {}
        self._rev: dict[str, dict[str, int]] = {}
        self._transit_fwd: dict[str, dict[str, float]] = {}
        self._best_transit: dict[tuple[str, str], float] = {}
        self._station_adj = self._build_station_graph()

    # -- construction helpers -------------------------------------------------

    def _check_strong_connectivity(self) -> None:
        nodes = set(self.locations)
        if not nodes:
            raise NetworkError("empty network")
        start = next(iter(nodes))
        for adj, label in ((self._adj, "forward"), (self._radj, "reverse")):
            seen = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for v, _ in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            if seen != nodes:
                missing = sorted(nodes - seen)[:5]
                raise NetworkError(
                    f"road graph not strongly connected ({label} search misses {missing})"
                )

    def _build_station_graph(self) -> dict[str, list[tuple[str, float]]]:
        adj: dict[str, list[tuple[str, float]]] = {s: [] for s in self.stations}
        for mode, seq in self.transit_lines:
            factor = self.train_factor if mode is Mode.TRAIN else self.bus_factor
            for a, b in zip(seq, seq[1:]):
                for u, v in ((a, b), (b, a)):
                    adj[u].append((v, factor * self.car_time(u, v)))
        return adj

    # -- queries --------------------------------------------------------------

    def _require(self, u: str) -> None:
        if u not in self.locations:
            raise UnknownLocationError(f"unknown location {u!r}")

    def _sssp(self, source: str, adj: dict[str, list[tuple[str, int]]]) -> dict[str, int]:
        dist = {source: 0}
        pq = [(0, source)]
        while pq:
            d, u = heapq.heappop(pq)
            if d > dist.get(u, math.inf):
                continue
            for v, w in adj[u]:
                nd = d + w
                if nd < dist.get(v, math.inf):
                    dist[v] = nd
                    heapq.heappush(pq, (nd, v))
        return dist

    def car_times_from(self, u: str) -> dict[str, int]:
        """Shortest car times from u to every location (memoized)."""
        self._require(u)
        tree = self._fwd.get(u)
        if tree is None:
            tree = self._sssp(u, self._adj)
            with self._lock:
                self._fwd.setdefault(u, tree)
        return tree

    def car_times_to(self, v: str) -> dict[str, int]:
        """Shortest car times from every location to v (memoized)."""
        self._require(v)
        tree = self._rev.get(v)
        if tree is None:
            tree = self._sssp(v, self._radj)
            with self._lock:
                self._rev.setdefault(v, tree)
        return tree

    def car_time(self, u: str, v: str) -> int:
        return self.car_times_from(u)[v]

    def transit_times_from(self, s: str) -> dict[str, float]:
        if s not in self.stations:
            raise UnknownLocationError(f"{s!r} is not a station")
        tree = self._transit_fwd.get(s)
        if tree is None:
            dist: dict[str, float] = {s: 0.0}
            pq: list[tuple[float, str]] = [(0.0, s)]
            while pq:
                d, u = heapq.heappop(pq)
                if d > dist.get(u, math.inf):
                    continue
                for v, w in self._station_adj[u]:
                    nd = d + w
                    if nd < dist.get(v, math.inf):
                        dist[v] = nd
                        heapq.heappush(pq, (nd, v))
            tree = dist
            with self._lock:
                self._transit_fwd.setdefault(s, tree)
        return tree

    def transit_time(self, s1: str, s2: str) -> float:
        """Station-to-station travel time over the transit-line graph."""
        tree = self.transit_times_from(s1)
        if s2 not in self.stations:
            raise UnknownLocationError(f"{s2!r} is not a station")
        if s2 not in tree:
            raise NetworkError(f"station {s2!r} unreachable from {s1!r} by transit")
        return tree[s2]

    def best_transit_route_time(self, o: str, d: str) -> float:
        """Fastest pure-transit route time from o to d.

        Minimizes over boarding/alighting station pairs; access and egress
        legs cost bus_factor times the car time.
        """
        self._require(o)
        self._require(d)
        key = (o, d)
        cached = self._best_transit.get(key)
        if cached is not None:
            return cached
        from_o = self.car_times_from(o)
        to_d = self.car_times_to(d)
        best = math.inf
        for s in self.stations:
            access = self.bus_factor * from_o[s]
            if access >= best:
                continue
            transit = self.transit_times_from(s)
            for s2 in self.stations:
                total = access + transit[s2] + self.bus_factor * to_d[s2]
                if total < best:
                    best = total
        with self._lock:
            self._best_transit.setdefault(key, best)
        return best

    # -- serialization --------------------------------------------------------

    SCHEMA_VERSION = 1

    def to_json(self) -> dict:
        return {
            "version": self.SCHEMA_VERSION,
            "locations": [
                {"id": l.id, "x": l.x, "y": l.y} for l in self.locations.values()
            ],
            "stations": [
                {"location": s.location, "mode": s.mode.value}
                for s in self.stations.values()
            ],
            "road_edges": [
                {"from": u, "to": v, "seconds": w} for u, v, w in self.road_edges
            ],
            "transit_lines": [
                {"mode": mode.value, "stations": seq} for mode, seq in self.transit_lines
            ],
            "multipliers": {"train": self.train_factor, "bus": self.bus_factor},
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> "TransitNetwork":
        if not isinstance(doc, dict):
            raise NetworkError("network document must be a JSON object")
        version = doc.get("version")
        if version != cls.SCHEMA_VERSION:
            raise NetworkError(f"unsupported network schema version {version!r}")
        try:
            locations = [
                Location(str(e["id"]), float(e["x"]), float(e["y"]))
                for e in doc["locations"]
            ]
            stations = [Station(str(e["location"]), Mode(e["mode"])) for e in doc["stations"]]
            edges = [
                (str(e["from"]), str(e["to"]), e["seconds"]) for e in doc["road_edges"]
            ]
            lines = [
                (Mode(e["mode"]), [str(s) for s in e["stations"]])
                for e in doc["transit_lines"]
            ]
            mult = doc.get("multipliers", {})
            return cls(
                locations,
                stations,
                edges,
                lines,
                train_factor=float(mult.get("train", 1.15)),
                bus_factor=float(mult.get("bus", 2.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"malformed network document: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "TransitNetwork":
        with open(path) as fh:
            doc = json.load(fh)
        return cls.from_json(doc)


# -- synthetic city ----------------------------------------------------------

class AreaKind(str, Enum):
    COMMUNITY = "community"
    DOWNTOWN = "downtown"
    AIRPORT = "airport"


@dataclass(frozen=True)
class Area:
    name: str
    kind: AreaKind
    center: str  # location id of the area's center
    points: tuple[str, ...]  # all location ids belonging to the area
    station: str  # location id of the area's station


@dataclass
class City:
    """Synthetic hub-and-spoke city: a transit network plus its area layout."""

    net: TransitNetwork
    areas: dict[str, Area]
    seed: int

    def areas_of_kind(self, kind: AreaKind) -> list[str]:
        return [a.name for a in self.areas.values() if a.kind is kind]

    def area_of(self, loc_id: str) -> str:
        return self._loc_area[loc_id]

    def __post_init__(self):
        self._loc_area = {
            p: a.name for a in self.areas.values() for p in a.points
        }

    def adjacent(self, area_a: str, area_b: str, threshold: int = 600) -> bool:
        """Same area, or area centers within `threshold` seconds by car."""
        if area_a == area_b:
            return True
        ca = self.areas[area_a].center
        cb = self.areas[area_b].center
        return self.net.car_time(ca, cb) < threshold


def _quantize(seconds: float) -> int:
    # Road weights are multiples of 20 s so that the 1.15 train multiplier
    # yields whole-second transit hop costs.
    return max(20, 20 * round(seconds / 20))


def build_city(
    seed: int,
    communities: int = 12,
    points_per_area: int = 5,
    ring_radius: float = 10_000.0,
    speed: float = 10.0,
) -> City:
    """Generate a hub-and-spoke city: downtown core, a ring of communities,
    two airports, train lines through downtown and bus feeders.
    """
    rng = random.Random(seed)
    locations: list[Location] = []
    areas: dict[str, Area] = {}

    def add_area(name: str, kind: AreaKind, cx: float, cy: float, spread: float) -> None:
        center_id = f"{name}:c"
        locations.append(Location(center_id, cx, cy))
        pts = [center_id]
        for k in range(points_per_area):
            px = cx + rng.uniform(-spread, spread)
            py = cy + rng.uniform(-spread, spread)
            pid = f"{name}:p{k}"
            locations.append(Location(pid, px, py))
            pts.append(pid)
        areas[name] = Area(name, kind, center_id, tuple(pts), center_id)

    add_area("DT", AreaKind.DOWNTOWN, 0.0, 0.0, 1200.0)
    for i in range(communities):
        ang = 2 * math.pi * i / communities
        add_area(
            f"C{i:02d}",
            AreaKind.COMMUNITY,
            ring_radius * math.cos(ang),
            ring_radius * math.sin(ang),
            1500.0,
        )
    add_area("AP0", AreaKind.AIRPORT, 1.9 * ring_radius, 0.0, 800.0)
    add_area("AP1", AreaKind.AIRPORT, -1.9 * ring_radius, 0.0, 800.0)

    coords = {l.id: (l.x, l.y) for l in locations}

    edges: list[tuple[str, str, int]] = []

    def connect(u: str, v: str) -> None:
        (ux, uy), (vx, vy) = coords[u], coords[v]
        w = _quantize(math.hypot(ux - vx, uy - vy) / speed)
        edges.append((u, v, w))
        edges.append((v, u, w))

    for area in areas.values():
        for p in area.points:
            if p != area.center:
                connect(area.center, p)

    comm = [f"C{i:02d}" for i in range(communities)]
    for i in range(communities):
        connect(areas[comm[i]].center, areas[comm[(i + 1) % communities]].center)
        connect(areas[comm[i]].center, areas["DT"].center)
    # airports hook into the ring communities nearest to them and downtown
    for ap in ("AP0", "AP1"):
        apc = areas[ap].center
        nearest = sorted(
            comm,
            key=lambda c: math.dist(coords[areas[c].center], coords[apc]),
        )[:2]
        for c in nearest:
            connect(areas[c].center, apc)
        connect(areas["DT"].center, apc)

    # stations: trains at downtown, airports and the four axis communities;
    # a bus stop at every other community
    train_areas = ["DT", "AP0", "AP1"] + [
        comm[(i * communities) // 4] for i in range(4)
    ]
    stations: list[Station] = []
    station_mode: dict[str, Mode] = {}
    for name, area in areas.items():
        mode = Mode.TRAIN if name in train_areas else Mode.BUS
        stations.append(Station(area.station, mode))
        station_mode[name] = mode

    lines: list[tuple[Mode, list[str]]] = []
    # east-west trunk through downtown, plus a ring segment between hubs
    hubs = [a for a in train_areas if a.startswith("C")]
    lines.append(
        (Mode.TRAIN, [areas["AP1"].station, areas[hubs[2]].station, areas["DT"].station,
                      areas[hubs[0]].station, areas["AP0"].station])
    )
    lines.append(
        (Mode.TRAIN, [areas[hubs[1]].station, areas["DT"].station, areas[hubs[3]].station])
    )
    # bus feeders from each bus community to its nearest train hub
    for name, area in areas.items():
        if station_mode[name] is Mode.BUS:
            nearest_hub = min(
                train_areas,
                key=lambda h: math.dist(coords[areas[h].center], coords[area.center]),
            )
            lines.append((Mode.BUS, [area.station, areas[nearest_hub].station]))

    net = TransitNetwork(locations, stations, edges, lines)
    return City(net=net, areas=areas, seed=seed)
