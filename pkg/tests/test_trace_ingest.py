"""Trip-log parsing, cleaning and serialization."""

import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from platoonsim.errors import EmptyTrace
from platoonsim.trace_ingest import (
    CANONICAL_HEADER,
    TraceRow,
    TripTrace,
    clean_trace,
    dump_trace,
    haversine_m,
    parse_trace,
)

SAMPLE = """\
day,date,time,lat,lat_hem,lon,lon_hem,height_m,speed_kmh,heading_deg,vox
Monday,2020-06-15,11:02:07,48.306900,n,14.280000,e,266.0,0,70.0,0
Monday,2020-06-15,11:02:08,48.306950,n,14.280100,e,266.1,31.2,70.5,0
Monday,2020-06-15,11:02:09,48.307000,n,14.280200,e,266.2,32.8,71.0,0
"""


# --- haversine ---------------------------------------------------------------

def test_haversine_one_degree_longitude_at_equator():
    assert abs(haversine_m((0.0, 0.0), (0.0, 1.0)) - 111194.9) < 1.0


def test_haversine_latitude_step_midlatitude():
    assert abs(haversine_m((48.30, 14.28), (48.31, 14.28)) - 1111.9) < 1.0


def test_haversine_zero_and_symmetry():
    assert haversine_m((48.3, 14.3), (48.3, 14.3)) == 0.0
    a, b = (48.30, 14.28), (48.35, 14.40)
    assert haversine_m(a, b) == pytest.approx(haversine_m(b, a), rel=1e-12)


# --- parsing -----------------------------------------------------------------

def test_parse_canonical():
    trace = parse_trace(SAMPLE, trip_id="t1")
    assert len(trace) == 3
    assert trace.rejects == []
    row = trace.rows[0]
    assert row.day == "Monday"
    assert row.date == dt.date(2020, 6, 15)
    assert row.time == dt.time(11, 2, 7)
    assert row.lat == pytest.approx(48.3069)
    assert row.lon == pytest.approx(14.28)
    assert row.speed_kmh == 0.0
    assert row.vox == "0"


def test_parse_tagged_fields():
    text = (
        "day,date,time,lat,lat_hem,lon,lon_hem,height_m,speed_kmh,heading_deg,vox\n"
        "T:Monday,Y:2020 M:06 D:15,H:11 M:02 S:07,48.3069,n,14.28,e,266,30,70,0\n"
    )
    trace = parse_trace(text)
    assert trace.rows[0].day == "Monday"
    assert trace.rows[0].date == dt.date(2020, 6, 15)
    assert trace.rows[0].time == dt.time(11, 2, 7)


def test_parse_compact_folded_hemisphere():
    text = (
        "day,date,time,lat,lon,height_m,speed_kmh,heading_deg,vox\n"
        "Monday,2020-06-15,11:02:07,48.3069 n,14.28 e,266,30,70,\n"
    )
    trace = parse_trace(text)
    assert trace.rows[0].lat == pytest.approx(48.3069)
    assert trace.rows[0].lon == pytest.approx(14.28)


def test_parse_southern_western_hemisphere_negates():
    text = (
        "day,date,time,lat,lat_hem,lon,lon_hem,height_m,speed_kmh,heading_deg,vox\n"
        "Monday,2020-06-15,11:02:07,33.9,s,18.4,w,10,30,70,\n"
    )
    row = parse_trace(text).rows[0]
    assert row.lat == pytest.approx(-33.9)
    assert row.lon == pytest.approx(-18.4)


@pytest.mark.parametrize(
    "bad_field,line",
    [
        ("95.0,n,14.28,e,266,30,70,0", "lat"),       # latitude out of range
        ("48.3,n,190.0,e,266,30,70,0", "lon"),       # longitude out of range
        ("48.3,n,14.28,e,266,-5,70,0", "speed_kmh"),  # negative speed
        ("48.3,n,14.28,e,266,30,360,0", "heading_deg"),  # heading not < 360
    ],
)
def test_parse_rejects_out_of_range(bad_field, line):
    text = (
        CANONICAL_HEADER + "\n"
        f"Monday,2020-06-15,11:02:07,{bad_field}\n"
        "Monday,2020-06-15,11:02:08,48.3,n,14.28,e,266,30,70,0\n"
    )
    trace = parse_trace(text)
    assert len(trace) == 1
    assert len(trace.rejects) == 1
    assert trace.rejects[0].line == 2
    assert trace.rejects[0].field == line


def test_parse_rejects_unparseable_date():
    text = (
        CANONICAL_HEADER + "\n"
        "Monday,not-a-date,11:02:07,48.3,n,14.28,e,266,30,70,0\n"
        "Monday,2020-06-15,11:02:08,48.3,n,14.28,e,266,30,70,0\n"
    )
    trace = parse_trace(text)
    assert len(trace) == 1
    assert trace.rejects[0].field == "date"


def test_parse_sorts_rows_by_timestamp():
    text = (
        CANONICAL_HEADER + "\n"
        "Monday,2020-06-15,11:02:09,48.3,n,14.28,e,266,30,70,0\n"
        "Monday,2020-06-15,11:02:07,48.3,n,14.28,e,266,30,70,0\n"
        "Monday,2020-06-15,11:02:08,48.3,n,14.28,e,266,30,70,0\n"
    )
    trace = parse_trace(text)
    times = [r.time for r in trace.rows]
    assert times == sorted(times)


def test_parse_empty_raises():
    with pytest.raises(EmptyTrace):
        parse_trace("")
    with pytest.raises(EmptyTrace):
        parse_trace("\n\n  \n")


def test_parse_all_rejected_raises():
    text = CANONICAL_HEADER + "\nMonday,2020-06-15,11:02:07,95,n,14.28,e,266,30,70,0\n"
    with pytest.raises(EmptyTrace):
        parse_trace(text)


def test_gap_detection():
    text = (
        CANONICAL_HEADER + "\n"
        "Monday,2020-06-15,11:02:07,48.3,n,14.28,e,266,30,70,0\n"
        "Monday,2020-06-15,11:02:08,48.3,n,14.28,e,266,30,70,0\n"
        "Monday,2020-06-15,11:02:12,48.3,n,14.28,e,266,30,70,0\n"
    )
    trace = parse_trace(text)
    assert trace.gaps == [(1, 2)]


# --- cleaning ----------------------------------------------------------------

def _row(sec: int, lat: float, lon: float) -> TraceRow:
    return TraceRow("Monday", dt.date(2020, 6, 15), dt.time(11, 2, sec),
                    lat, lon, 266.0, 30.0, 70.0, "")


def test_clean_removes_glitch_row():
    rows = [_row(0, 48.3000, 14.28), _row(1, 48.3001, 14.28),
            _row(2, 48.3050, 14.28),  # ~540 m jump in 1 s
            _row(3, 48.3002, 14.28)]
    trace = TripTrace("t", rows)
    cleaned = clean_trace(trace, max_jump_m=60.0)
    assert [r.time.second for r in cleaned.rows] == [0, 1, 3]


def test_clean_scales_threshold_with_time_gap():
    # 200 m over a 5 s logging gap is only 40 m/s: must be kept
    rows = [_row(0, 48.3000, 14.28), _row(5, 48.3018, 14.28)]
    cleaned = clean_trace(TripTrace("t", rows), max_jump_m=60.0)
    assert len(cleaned.rows) == 2
    assert cleaned.gaps == [(0, 1)]


def test_clean_is_subsequence():
    rows = [_row(i, 48.30 + 0.0001 * i + (0.01 if i == 4 else 0.0), 14.28)
            for i in range(8)]
    cleaned = clean_trace(TripTrace("t", rows), max_jump_m=60.0)
    it = iter(rows)
    assert all(any(r is cand for cand in it) for r in cleaned.rows)


# --- serialization round trip -------------------------------------------------

coord_6dp = st.integers(-89_999_999, 89_999_999).map(lambda n: n / 1e6)
lon_6dp = st.integers(-179_999_999, 179_999_999).map(lambda n: n / 1e6)
tenth = st.integers(0, 3599).map(lambda n: n / 10.0)


@st.composite
def trace_rows(draw):
    n = draw(st.integers(min_value=1, max_value=20))
    rows = []
    for i in range(n):
        rows.append(TraceRow(
            day="Monday",
            date=dt.date(2020, 6, 15),
            time=(dt.datetime(2020, 6, 15, 11, 0, 0) + dt.timedelta(seconds=i)).time(),
            lat=draw(coord_6dp),
            lon=draw(lon_6dp),
            height_m=float(draw(st.integers(-400, 8000))),
            speed_kmh=draw(st.integers(0, 2000).map(lambda v: v / 10.0)),
            heading_deg=draw(tenth),
            vox=draw(st.sampled_from(["", "0", "1"])),
        ))
    return rows


@settings(max_examples=50, deadline=None)
@given(trace_rows())
def test_dump_parse_round_trip(rows):
    trace = TripTrace("t", rows)
    reparsed = parse_trace(dump_trace(trace), trip_id="t")
    assert reparsed.rows == rows
    # serialization is a fixpoint after one round trip
    assert dump_trace(reparsed) == dump_trace(trace)


# --- bundled reference trace ---------------------------------------------------

def test_bundled_trace_parses_and_cleans(data_dir):
    trace = parse_trace((data_dir / "reference.trip.csv").read_text(),
                        trip_id="reference")
    assert trace.rejects == []
    cleaned = clean_trace(trace, max_jump_m=60.0)
    assert len(trace) - len(cleaned) == 3  # three injected receiver glitches
