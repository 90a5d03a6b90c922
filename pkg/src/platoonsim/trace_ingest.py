"""Parsing and cleaning of per-second GPS delivery-trip logs.

The canonical file format is comma-separated text with a header row:

    day,date,time,lat,lat_hem,lon,lon_hem,height_m,speed_kmh,heading_deg,vox

A 9-column variant with the hemisphere letter folded into the coordinate
field ("48.3069 n") is accepted as well, as are tagged day/date/time values
("T:Monday", "Y:2020 M:06 D:15", "H:11 M:02 S:07").
"""

from __future__ import annotations

import datetime as dt
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import EmptyTrace

EARTH_RADIUS_M = 6_371_000.0

CANONICAL_HEADER = (
    "day,date,time,lat,lat_hem,lon,lon_hem,height_m,speed_kmh,heading_deg,vox"
)
COMPACT_HEADER = "day,date,time,lat,lon,height_m,speed_kmh,heading_deg,vox"


@dataclass(frozen=True)
class TraceRow:
    day: str
    date: dt.date
    time: dt.time
    lat: float
    lon: float
    height_m: float
    speed_kmh: float
    heading_deg: float
    vox: str = ""

    def timestamp(self) -> dt.datetime:
        return dt.datetime.combine(self.date, self.time)


@dataclass(frozen=True)
class RowError:
    line: int
    field: str
    reason: str = ""

    def __str__(self) -> str:
        msg = f"line {self.line}: bad field '{self.field}'"
        return f"{msg} ({self.reason})" if self.reason else msg


@dataclass
class TripTrace:
    trip_id: str
    rows: list[TraceRow]
    gaps: list[tuple[int, int]] = field(default_factory=list)
    rejects: list[RowError] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)


def haversine_m(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in meters between two (lat, lon) pairs."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


_DATE_TAGGED = re.compile(r"Y:\s*(\d{4})\s+M:\s*(\d{1,2})\s+D:\s*(\d{1,2})")
_TIME_TAGGED = re.compile(r"H:\s*(\d{1,2})\s+M:\s*(\d{1,2})\s+S:\s*(\d{1,2})")


def _parse_day(raw: str) -> str:
    raw = raw.strip()
    if raw.upper().startswith("T:"):
        raw = raw[2:].strip()
    return raw


def _parse_date(raw: str) -> dt.date:
    raw = raw.strip()
    m = _DATE_TAGGED.search(raw)
    if m:
        return dt.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    return dt.date.fromisoformat(raw)


def _parse_time(raw: str) -> dt.time:
    raw = raw.strip()
    m = _TIME_TAGGED.search(raw)
    if m:
        return dt.time(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    return dt.time.fromisoformat(raw)


def _parse_coord(raw: str, hem: Optional[str], positive: str, negative: str) -> float:
    """Parse a coordinate; hemisphere letter may trail the value or come separately."""
    raw = raw.strip()
    letter = (hem or "").strip().lower()
    m = re.fullmatch(r"([+-]?\d+(?:\.\d+)?)\s*([nsew]?)", raw, re.IGNORECASE)
    if not m:
        raise ValueError(f"unparseable coordinate {raw!r}")
    value = float(m.group(1))
    letter = letter or m.group(2).lower()
    if letter:
        if letter == negative:
            value = -abs(value)
        elif letter == positive:
            value = abs(value)
        else:
            raise ValueError(f"bad hemisphere {letter!r}")
    return value


def _default_schema(header: list[str]) -> dict[str, int]:
    names = [h.strip().lower() for h in header]
    schema = {name: i for i, name in enumerate(names)}
    required = ("day", "date", "time", "lat", "lon", "height_m", "speed_kmh", "heading_deg")
    missing = [n for n in required if n not in schema]
    if missing:
        raise EmptyTrace(f"header is missing fields: {', '.join(missing)}")
    return schema


def parse_trace(
    text: str | Iterable[str],
    schema: Optional[dict[str, int]] = None,
    trip_id: str = "trace",
) -> TripTrace:
    """Parse delimiter-separated trip rows into a TripTrace.

    Rows violating range invariants (latitude, longitude, speed, heading) or
    with unparseable mandatory fields are rejected and recorded in
    ``trace.rejects`` with their 1-based line number. Raises EmptyTrace if no
    row survives.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in text]
    lines = [ln for ln in lines]
    if not any(ln.strip() for ln in lines):
        raise EmptyTrace("empty input")

    start = 0
    if schema is None:
        # first non-blank, non-comment line is the header
        while start < len(lines) and (not lines[start].strip() or lines[start].lstrip().startswith("#")):
            start += 1
        schema = _default_schema(lines[start].split(","))
        start += 1

    rows: list[TraceRow] = []
    rejects: list[RowError] = []
    for lineno0 in range(start, len(lines)):
        line = lines[lineno0]
        lineno = lineno0 + 1
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split(",")]
        row = _parse_row(cols, schema, lineno, rejects)
        if row is not None:
            rows.append(row)

    if not rows:
        raise EmptyTrace(f"all {len(rejects)} rows rejected")
    rows.sort(key=lambda r: (r.date, r.time))
    trace = TripTrace(trip_id=trip_id, rows=rows, rejects=rejects)
    trace.gaps = _find_gaps(rows)
    return trace


def _parse_row(
    cols: list[str], schema: dict[str, int], lineno: int, rejects: list[RowError]
) -> Optional[TraceRow]:
    def col(name: str) -> str:
        idx = schema.get(name, -1)
        if idx < 0 or idx >= len(cols):
            raise ValueError("missing")
        return cols[idx]

    def opt(name: str) -> Optional[str]:
        idx = schema.get(name, -1)
        return cols[idx] if 0 <= idx < len(cols) else None

    try:
        field = "day"
        day = _parse_day(col("day"))
        field = "date"
        date = _parse_date(col("date"))
        field = "time"
        time = _parse_time(col("time"))
        field = "lat"
        lat = _parse_coord(col("lat"), opt("lat_hem"), positive="n", negative="s")
        field = "lon"
        lon = _parse_coord(col("lon"), opt("lon_hem"), positive="e", negative="w")
        field = "height_m"
        height = float(col("height_m"))
        field = "speed_kmh"
        speed = float(col("speed_kmh"))
        field = "heading_deg"
        heading = float(col("heading_deg"))
    except (ValueError, KeyError) as exc:
        rejects.append(RowError(lineno, field, str(exc)))
        return None

    for name, ok in (
        ("lat", -90.0 <= lat <= 90.0),
        ("lon", -180.0 <= lon <= 180.0),
        ("speed_kmh", speed >= 0.0),
        ("heading_deg", 0.0 <= heading < 360.0),
    ):
        if not ok:
            rejects.append(RowError(lineno, name, "out of range"))
            return None

    vox = opt("vox") or ""
    return TraceRow(day, date, time, lat, lon, height, speed, heading, vox)


def _find_gaps(rows: list[TraceRow]) -> list[tuple[int, int]]:
    gaps = []
    for i in range(1, len(rows)):
        delta = (rows[i].timestamp() - rows[i - 1].timestamp()).total_seconds()
        if delta > 1.0:
            gaps.append((i - 1, i))
    return gaps


def clean_trace(trace: TripTrace, max_jump_m: float = 60.0) -> TripTrace:
    """Drop rows implying an impossible displacement (GPS glitches).

    A row is removed when the haversine distance from the previously kept row
    exceeds ``max_jump_m`` per elapsed second. Time gaps between the kept rows
    are recorded in ``gaps``. Pure filter: output rows are a subsequence of
    the input rows.
    """
    if not trace.rows:
        raise EmptyTrace("cannot clean an empty trace")
    kept = [trace.rows[0]]
    for row in trace.rows[1:]:
        prev = kept[-1]
        delta = max(1.0, (row.timestamp() - prev.timestamp()).total_seconds())
        if haversine_m((prev.lat, prev.lon), (row.lat, row.lon)) > max_jump_m * delta:
            continue
        kept.append(row)
    return TripTrace(
        trip_id=trace.trip_id,
        rows=kept,
        gaps=_find_gaps(kept),
        rejects=list(trace.rejects),
    )


def dump_trace(trace: TripTrace) -> str:
    """Serialize a trace back to the canonical 11-column CSV format."""
    out = [CANONICAL_HEADER]
    for r in trace.rows:
        lat_hem = "n" if r.lat >= 0 else "s"
        lon_hem = "e" if r.lon >= 0 else "w"
        out.append(
            f"{r.day},{r.date.isoformat()},{r.time.isoformat()},"
            f"{abs(r.lat):.6f},{lat_hem},{abs(r.lon):.6f},{lon_hem},"
            f"{r.height_m:g},{r.speed_kmh:g},{r.heading_deg:g},{r.vox}"
        )
    return "\n".join(out) + "\n"
