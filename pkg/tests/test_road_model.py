"""Route construction, speed limits, signals and the trace-to-route pipeline."""

import datetime as dt
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from platoonsim.errors import ConfigError, OutOfRoute, RouteTooShort
from platoonsim.road_model import (
    ContainerStop,
    Route,
    SignalHead,
    dump_route,
    limit_at,
    load_route,
    route_from_trace,
    signal_is_green,
)
from platoonsim.trace_ingest import TraceRow, TripTrace, clean_trace, parse_trace

M_PER_DEG_LON_EQ = 111194.92664455873  # 2*pi*R/360 at the equator


# --- signals -------------------------------------------------------------------

def test_signal_phase_examples():
    sig = SignalHead(position_m=0.0, cycle_s=60.0, green_s=30.0, offset_s=0.0)
    assert signal_is_green(sig, 10.0)
    assert not signal_is_green(sig, 45.0)
    assert signal_is_green(sig, 60.0)  # cycle wraps


def test_signal_offset_shifts_phase():
    sig = SignalHead(0.0, 60.0, 30.0, offset_s=20.0)
    assert signal_is_green(sig, 0.0)   # (0+20) % 60 = 20 < 30
    assert not signal_is_green(sig, 15.0)


@pytest.mark.parametrize("green", [0.0, -1.0, 61.0])
def test_signal_green_must_fit_cycle(green):
    with pytest.raises(ConfigError):
        SignalHead(0.0, 60.0, green)


# --- route validation ------------------------------------------------------------

def test_route_segments_must_tile():
    with pytest.raises(ConfigError):
        Route(segments=[(0.0, 1000.0, 10.0), (1200.0, 2000.0, 20.0)])


def test_route_rejects_empty_segment():
    with pytest.raises(ConfigError):
        Route(segments=[(0.0, 0.0, 10.0)])


def test_route_rejects_nonpositive_limit():
    with pytest.raises(ConfigError):
        Route(segments=[(0.0, 1000.0, 0.0)])


def test_route_rejects_stop_outside():
    with pytest.raises(ConfigError):
        Route(segments=[(0.0, 1000.0, 10.0)],
              stops=[ContainerStop("s", 1500.0)])


# --- limit lookup ---------------------------------------------------------------

@pytest.fixture
def two_seg() -> Route:
    return Route(segments=[(0.0, 7000.0, 13.9), (7000.0, 14000.0, 19.4)])


def test_limit_at_boundaries(two_seg):
    assert limit_at(two_seg, 0.0) == 13.9
    assert limit_at(two_seg, 6999.9) == 13.9
    assert limit_at(two_seg, 7000.0) == 19.4  # boundary belongs to next segment
    assert limit_at(two_seg, 14000.0) == 19.4  # s == length -> last segment


def test_limit_at_out_of_route(two_seg):
    with pytest.raises(OutOfRoute):
        limit_at(two_seg, -0.1)
    with pytest.raises(OutOfRoute):
        limit_at(two_seg, 14000.1)


# --- route derivation from a trace ------------------------------------------------

def _straight_trace(n_rows: int, speed_kmh: float) -> TripTrace:
    """Equator-aligned constant-speed trace, one row per second."""
    mps = speed_kmh / 3.6
    dlon = mps / M_PER_DEG_LON_EQ
    t0 = dt.datetime(2020, 6, 15, 11, 0, 0)
    rows = [
        TraceRow("Monday", t0.date(), (t0 + dt.timedelta(seconds=i)).time(),
                 0.0, i * dlon, 10.0, speed_kmh, 90.0, "")
        for i in range(n_rows)
    ]
    return TripTrace("straight", rows)


def test_straight_constant_speed_single_segment():
    # 54 km/h rounds up to the 55 km/h step = 15.28 m/s
    route = route_from_trace(_straight_trace(70, 54.0), epsilon_m=5.0)
    assert len(route.segments) == 1
    assert route.segments[0][2] == pytest.approx(55.0 / 3.6, rel=1e-9)
    assert route.length == pytest.approx(69 * 15.0, rel=1e-3)


def test_speed_on_exact_step_is_kept():
    route = route_from_trace(_straight_trace(70, 50.0), epsilon_m=5.0)
    assert route.segments[0][2] == pytest.approx(50.0 / 3.6, rel=1e-9)


def test_route_too_short():
    with pytest.raises(RouteTooShort):
        route_from_trace(_straight_trace(4, 54.0))  # ~45 m < 100 m
    with pytest.raises(RouteTooShort):
        route_from_trace(_straight_trace(1, 54.0))


@settings(max_examples=25, deadline=None)
@given(st.integers(8, 200).map(lambda k: k * 0.5))
def test_derived_limit_rounds_up_to_5kmh(speed_kmh):
    route = route_from_trace(_straight_trace(100, speed_kmh), epsilon_m=5.0)
    limit_kmh = route.segments[0][2] * 3.6
    step = max(5.0, 5.0 * math.ceil(speed_kmh / 5.0 - 1e-9))
    assert limit_kmh == pytest.approx(step, rel=1e-9)
    assert limit_kmh >= speed_kmh - 1e-6


# --- route file round trip ---------------------------------------------------------

ROUTE_TEXT = """\
# comment line
length_m 2000
segment 0 1500 13.9
segment 1500 2000 19.4
stop depot 100 30
signal 900 60 25 10
"""


def test_load_route_declarative():
    route = load_route(ROUTE_TEXT)
    assert route.length == 2000.0
    assert len(route.segments) == 2
    assert route.stops[0].id == "depot" and route.stops[0].dwell_s == 30.0
    assert route.signals[0].cycle_s == 60.0


def test_dump_load_round_trip():
    route = load_route(ROUTE_TEXT)
    again = load_route(dump_route(route))
    assert again.segments == route.segments
    assert again.stops == route.stops
    assert again.signals == route.signals


def test_load_route_length_mismatch():
    with pytest.raises(ConfigError):
        load_route("length_m 3000\nsegment 0 2000 10\n")


def test_load_route_unknown_directive():
    with pytest.raises(ConfigError):
        load_route("segment 0 2000 10\nroundabout 500\n")


def test_load_route_no_segments():
    with pytest.raises(ConfigError):
        load_route("# nothing\n")


# --- bundled data -------------------------------------------------------------------

def test_bundled_route_shape(ref_route):
    assert ref_route.length == 14000.0
    assert len(ref_route.segments) == 7
    assert [s.id for s in ref_route.stops] == ["stop1", "stop2"]
    assert [s.position_m for s in ref_route.stops] == [300.0, 13700.0]
    assert len(ref_route.signals) == 8


def test_bundled_trace_to_route_pipeline(data_dir):
    trace = parse_trace((data_dir / "reference.trip.csv").read_text())
    route = route_from_trace(clean_trace(trace), epsilon_m=5.0)
    # derived length matches the hand-authored corridor within one percent
    assert route.length == pytest.approx(14000.0, rel=0.01)
    assert all(limit > 0 for _, _, limit in route.segments)
