#!/usr/bin/env python3
"""Generate the bundled per-second GPS trip log (data/reference.trip.csv).

Synthesizes a ~14 km delivery trip northeast of the depot: the recorded
speeds follow the reference corridor's limit profile the way a human driver
would (a bit under the limit, 1 m/s^2 ramps, brief waits at the depot stop,
two signals and the destination), the path curves gently, and a handful of
single-sample GPS glitches are injected so the cleaning stage has work to do.

Usage: python3 scripts/make_reference_trace.py [--out PATH]
"""
from __future__ import annotations

import argparse
import datetime as dt
import math
import sys
from pathlib import Path

PKG_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PKG_ROOT / "src"))

from platoonsim.rng import SplitMix64  # noqa: E402
from platoonsim.trace_ingest import CANONICAL_HEADER  # noqa: E402

EARTH_RADIUS_M = 6_371_000.0
SEED = 1406

# (end_m, limit_mps) mirroring the reference corridor profile
PROFILE = [(700, 10.0), (1300, 5.0), (1500, 10.0), (5500, 20.0),
           (8500, 10.0), (11500, 20.0), (14100, 10.0)]
# (position_m, wait_s): depot stop, two red signals, destination
WAITS = [(300, 25), (6000, 55), (11900, 40), (13700, 30)]
GLITCH_ROWS = (180, 700, 1100)  # sample indices knocked off the path


def limit_at(s: float) -> float:
    for end, lim in PROFILE:
        if s < end:
            return lim
    return PROFILE[-1][1]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path,
                    default=PKG_ROOT / "src" / "platoonsim" / "data" / "reference.trip.csv")
    args = ap.parse_args()

    rng = SplitMix64(SEED)
    lat, lon = 48.3069, 14.2800
    height = 266.0
    heading = 70.0
    v = 0.0
    s = 0.0
    waits = list(WAITS)
    hold = 0

    t0 = dt.datetime(2020, 6, 15, 11, 2, 7)
    rows = []
    i = 0
    while s < 14100.0 and i < 4000:
        target = 0.92 * limit_at(s) * 3.6  # km/h a human settles at
        if waits and s >= waits[0][0] - 3.0 and hold == 0 and v < 8.0:
            hold = waits[0][1]
            waits.pop(0)
        if hold > 0:
            hold -= 1
            v = 0.0
        else:
            want = target + (rng.uniform() - 0.5) * 2.0
            if waits:  # comfortable approach profile into the next wait
                d = max(0.0, waits[0][0] - s - 1.0)
                want = min(want, 3.6 * math.sqrt(1.6 * d) + 1.0)
            dv = max(-2.8, min(3.6, want - v))  # +-1 m/s^2 in km/h per second
            v = max(0.0, v + dv)

        mps = v / 3.6
        heading = 70.0 + 24.0 * math.sin(s / 2300.0) + (rng.uniform() - 0.5) * 1.5
        rad = math.radians(heading)
        lat += mps * math.cos(rad) / EARTH_RADIUS_M * 180.0 / math.pi
        lon += mps * math.sin(rad) / (EARTH_RADIUS_M * math.cos(math.radians(lat))) * 180.0 / math.pi
        s += mps
        height += (rng.uniform() - 0.5) * 0.4 + 0.002 * mps

        glat, glon = lat, lon
        if i in GLITCH_ROWS:  # single-sample receiver glitch, ~200 m off
            glat += 0.0019
            glon -= 0.0008
        t = t0 + dt.timedelta(seconds=i)
        rows.append(
            f"{t.strftime('%A')},{t.date().isoformat()},{t.time().isoformat()},"
            f"{abs(glat):.6f},n,{abs(glon):.6f},e,"
            f"{height:.1f},{v:.1f},{heading % 360.0:.1f},0"
        )
        i += 1

    args.out.write_text(CANONICAL_HEADER + "\n" + "\n".join(rows) + "\n")
    print(f"wrote {len(rows)} rows, {s:.0f} m, to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
