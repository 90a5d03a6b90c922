"""Corridor model: route polyline, speed-limit segments, stops and signals.

A route is either derived from a cleaned GPS trace (polyline simplification +
percentile speed limits) or loaded from a declarative line-oriented file:

    # comment
    length_m 14000
    segment 0 1500 10.0
    stop stop1 300 0
    signal 1200 100 30 55
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, OutOfRoute, RouteTooShort
from .trace_ingest import TripTrace, haversine_m


@dataclass(frozen=True)
class ContainerStop:
    id: str
    position_m: float
    dwell_s: float = 0.0


@dataclass(frozen=True)
class SignalHead:
    position_m: float
    cycle_s: float
    green_s: float
    offset_s: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.green_s <= self.cycle_s:
            raise ConfigError(f"signal needs 0 < green <= cycle, got {self.green_s}/{self.cycle_s}")


def signal_is_green(signal: SignalHead, t: float) -> bool:
    """Fixed two-phase cycle: green iff ((t + offset) mod cycle) < green."""
    return (t + signal.offset_s) % signal.cycle_s < signal.green_s


@dataclass
class Route:
    segments: list[tuple[float, float, float]]  # (start_m, end_m, limit_mps)
    stops: list[ContainerStop] = field(default_factory=list)
    signals: list[SignalHead] = field(default_factory=list)
    points: Optional[list[tuple[float, float, float]]] = None  # lat, lon, height
    cum_dist: Optional[list[float]] = None

    def __post_init__(self):
        if not self.segments:
            raise ConfigError("route needs at least one segment")
        self.segments.sort(key=lambda s: s[0])
        prev_end = 0.0
        for start, end, limit in self.segments:
            if abs(start - prev_end) > 1e-9:
                raise ConfigError(f"segments must tile [0, length]: hole at {start}")
            if end <= start:
                raise ConfigError(f"empty segment at {start}")
            if limit <= 0.0:
                raise ConfigError(f"non-positive speed limit at {start}")
            prev_end = end
        if self.length <= 0.0:
            raise ConfigError("route length must be positive")
        for stop in self.stops:
            if not 0.0 <= stop.position_m <= self.length or stop.dwell_s < 0.0:
                raise ConfigError(f"stop {stop.id} outside route or negative dwell")
        self.stops.sort(key=lambda s: s.position_m)
        self.signals.sort(key=lambda s: s.position_m)

    @property
    def length(self) -> float:
        return self.segments[-1][1]


def limit_at(route: Route, s: float) -> float:
    """Speed limit of the segment containing s; boundaries belong to the
    following segment, s == length belongs to the last one."""
    if s < 0.0 or s > route.length:
        raise OutOfRoute(f"s={s} outside [0, {route.length}]")
    if s == route.length:
        return route.segments[-1][2]
    for start, end, limit in route.segments:
        if start <= s < end:
            return limit
    raise OutOfRoute(f"s={s} not covered")  # unreachable on a valid route


def _project_local(points: Sequence[tuple[float, float]]) -> np.ndarray:
    """Equirectangular projection to local meters around the trace centroid."""
    lats = np.array([p[0] for p in points])
    lons = np.array([p[1] for p in points])
    lat0 = float(lats.mean())
    m_per_deg = math.pi / 180.0 * 6_371_000.0
    x = (lons - lons.mean()) * m_per_deg * math.cos(math.radians(lat0))
    y = (lats - lats.mean()) * m_per_deg
    return np.column_stack([x, y])


def _douglas_peucker(xy: np.ndarray, epsilon: float) -> list[int]:
    """Indices of the simplified polyline (iterative stack form)."""
    n = len(xy)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        seg = xy[j] - xy[i]
        seg_len = np.hypot(*seg)
        pts = xy[i + 1 : j] - xy[i]
        if seg_len < 1e-12:
            dist = np.hypot(pts[:, 0], pts[:, 1])
        else:
            dist = np.abs(pts[:, 0] * seg[1] - pts[:, 1] * seg[0]) / seg_len
        k = int(np.argmax(dist))
        if dist[k] > epsilon:
            mid = i + 1 + k
            keep[mid] = True
            stack.append((i, mid))
            stack.append((mid, j))
    return [int(i) for i in np.flatnonzero(keep)]


def _round_up_5kmh(speed_kmh: float) -> float:
    return 5.0 * math.ceil(speed_kmh / 5.0 - 1e-9)


def route_from_trace(trace: TripTrace, epsilon_m: float = 5.0) -> Route:
    """Build a route from a cleaned trace.

    The polyline is reduced with a Douglas-Peucker pass at tolerance
    epsilon_m; each remaining leg becomes a segment whose speed limit is the
    95th percentile of the recorded speeds on that leg, rounded up to the
    next 5 km/h step. Adjacent legs with equal limits are merged.
    """
    rows = trace.rows
    if len(rows) < 2:
        raise RouteTooShort("trace needs at least 2 rows")
    xy = _project_local([(r.lat, r.lon) for r in rows])
    kept = _douglas_peucker(xy, epsilon_m)

    cum = [0.0]
    for a, b in zip(kept, kept[1:]):
        leg = haversine_m((rows[a].lat, rows[a].lon), (rows[b].lat, rows[b].lon))
        cum.append(cum[-1] + leg)
    if cum[-1] < 100.0:
        raise RouteTooShort(f"route length {cum[-1]:.1f} m < 100 m")

    segments: list[tuple[float, float, float]] = []
    for (a, b), start, end in zip(zip(kept, kept[1:]), cum, cum[1:]):
        if end - start < 1e-9:
            continue
        speeds = [rows[i].speed_kmh for i in range(a, b + 1)]
        p95 = float(np.percentile(speeds, 95))
        limit = max(5.0, _round_up_5kmh(p95)) / 3.6
        if segments and abs(segments[-1][2] - limit) < 1e-12:
            segments[-1] = (segments[-1][0], end, limit)
        else:
            segments.append((start, end, limit))

    points = [(rows[i].lat, rows[i].lon, rows[i].height_m) for i in kept]
    return Route(segments=segments, points=points, cum_dist=cum)


def load_route(text: str) -> Route:
    """Parse the declarative route file format."""
    length = None
    segments: list[tuple[float, float, float]] = []
    stops: list[ContainerStop] = []
    signals: list[SignalHead] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            kind = parts[0]
            if kind == "length_m":
                length = float(parts[1])
            elif kind == "segment":
                segments.append((float(parts[1]), float(parts[2]), float(parts[3])))
            elif kind == "stop":
                stops.append(ContainerStop(parts[1], float(parts[2]), float(parts[3])))
            elif kind == "signal":
                signals.append(
                    SignalHead(float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4]))
                )
            else:
                raise ConfigError(f"route file line {lineno}: unknown directive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"route file line {lineno}: {exc}") from exc
    if not segments:
        raise ConfigError("route file declares no segments")
    route = Route(segments=segments, stops=stops, signals=signals)
    if length is not None and abs(route.length - length) > 1e-6:
        raise ConfigError(f"declared length {length} != segment tiling {route.length}")
    return route


def dump_route(route: Route) -> str:
    lines = [f"length_m {route.length:g}"]
    for start, end, limit in route.segments:
        lines.append(f"segment {start:g} {end:g} {limit:g}")
    for stop in route.stops:
        lines.append(f"stop {stop.id} {stop.position_m:g} {stop.dwell_s:g}")
    for sig in route.signals:
        lines.append(f"signal {sig.position_m:g} {sig.cycle_s:g} {sig.green_s:g} {sig.offset_s:g}")
    return "\n".join(lines) + "\n"
