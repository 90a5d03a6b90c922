"""Scenario orchestration: seeded demand, the fixed-step simulation loop and
the connected vs. not-connected comparison.

Step ordering is part of the external contract:
  (1) spawn due vehicles, (2) beacon emission + delivery, (3) control
  computation front-to-back along the route, (4) state integration,
  (5) stops / crossings / per-step emission accounting.
Runs are fully deterministic for a fixed (config, seed).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .emissions import (
    QUANTITIES,
    EmissionCoeffs,
    EmissionTotals,
    accumulate,
    load_coeffs,
    step_emissions,
)
from .errors import ConfigError, RefusesComparison
from .platoon_control import PlatoonConfig, PlatoonRole, cacc_accel, form_platoon, leader_speed
from .rng import SplitMix64
from .road_model import Route, load_route
from .v2v_channel import BeaconChannel, ChannelConfig
from .vehicle_dynamics import (
    VehicleParams,
    VehicleState,
    effective_limit,
    krauss_safe_speed,
    krauss_step,
    stop_and_signal_gate,
)

# comfort clamp for the platoon leader's speed tracking; much gentler than
# a_max so follower gap excursions stay small through limit transitions, with
# anticipatory braking matched to the same deceleration so the leader never
# overruns a lower limit it cannot comfortably reach
LEADER_TRACK_ACCEL = 0.5
LEADER_LOOKAHEAD_B = 0.5
STOP_LINE_BUFFER = 1.0
# receiver-side shaping of beaconed accelerations: beacons report the
# previously applied command, so feeding the stale value straight through
# slightly amplifies oscillations down the platoon.  Each follower keeps an
# exponential average (time constant FF_SMOOTH_T) per sender and only trusts
# the fraction FF_HF_TRUST of the fast residual on top of it: unity gain at
# low frequency keeps gaps tight through speed-limit ramps while the reduced
# high-frequency gain restores strict per-hop attenuation.
FF_SMOOTH_T = 2.0
FF_HF_TRUST = 0.8

STEP_CSV_HEADER = "t,veh_id,role,s_m,v_mps,a_mps2,co2_mgps,co_mgps,nox_mgps,hc_mgps,fuel_mlps,gap_m,degraded"
SUMMARY_CSV_HEADER = "veh_id,role,travel_time_s,co2_cum,co_cum,nox_cum,hc_cum,fuel_cum"

MODE_CONNECTED = "connected"
MODE_NOT_CONNECTED = "notconnected"


@dataclass
class BackgroundSpec:
    spawn_prob: float = 0.0
    max_vehicles: int = 0


@dataclass
class ScenarioConfig:
    mode: str
    seed: int
    route: Route
    coeffs: EmissionCoeffs
    dt: float = 0.1
    max_sim_time: float = 3600.0
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    platoon: Optional[PlatoonConfig] = None
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    n_vans: int = 3
    van_departs: tuple[float, ...] = (0.0, 60.0, 120.0)
    spawn_pos: float = 30.0
    # human drivers settle slightly below the posted limit; the CACC platoon
    # tracks its set speed exactly, so only manually driven vans are scaled
    van_speed_factor: float = 0.89
    channel_log: Optional[str] = None

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.mode not in (MODE_CONNECTED, MODE_NOT_CONNECTED):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_CONNECTED and self.platoon is None:
            raise ConfigError("connected mode requires a [platoon] section")


@dataclass(frozen=True)
class Spawn:
    step: int
    veh_id: str
    vtype: str


def generate_demand(
    seed: int, n_steps: int, spawn_prob: float, types: tuple[str, ...] = ("van",)
) -> list[Spawn]:
    """Seeded per-step spawn schedule: one uniform draw per step, a vehicle
    with the next sequential id whenever the draw falls below spawn_prob."""
    assert 0.0 <= spawn_prob <= 1.0
    rng = SplitMix64(seed)
    schedule: list[Spawn] = []
    veh_nr = 0
    for i in range(n_steps):
        if rng.uniform() < spawn_prob:
            schedule.append(Spawn(i, str(veh_nr), types[veh_nr % len(types)]))
            veh_nr += 1
    return schedule


@dataclass
class _SimVehicle:
    state: VehicleState
    params: VehicleParams
    kind: str  # "van" | "background"
    role: Optional[PlatoonRole] = None
    v_cap: Optional[float] = None  # individual desired-speed cap (background)
    pending_stops: list = field(default_factory=list)
    origin_t: Optional[float] = None
    dest_t: Optional[float] = None
    v_next: float = 0.0
    degraded: bool = False
    alive: bool = True
    ff_filter: dict = field(default_factory=dict)  # sender id -> smoothed accel

    def role_label(self) -> str:
        if self.role is not None:
            return self.role.label()
        return "krauss" if self.kind == "van" else "background"


@dataclass
class VehicleResult:
    id: str
    role: str
    travel_time: Optional[float]
    finished: bool
    totals: dict[str, float]
    mean_rates: dict[str, float]


@dataclass
class ScenarioResult:
    mode: str
    seed: int
    dt: float
    sim_time: float
    vehicles: list[VehicleResult]
    totals: EmissionTotals
    steps: list[tuple]
    unfinished: list[str]
    spawned: int
    despawned: int
    still_running: int

    def vehicle(self, vid: str) -> VehicleResult:
        for v in self.vehicles:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def mean_travel_time(self) -> float:
        times = [v.travel_time for v in self.vehicles if v.travel_time is not None]
        if not times:
            raise RefusesComparison("no finished vehicle")
        return sum(times) / len(times)

    def total(self, q: str) -> float:
        return sum(v.totals[q] for v in self.vehicles)


def _van_ids(mode: str, n: int) -> list[str]:
    if mode == MODE_CONNECTED:
        return [("LDV" if i == 0 else "FDV") + str(i + 1) for i in range(n)]
    return [f"DV{i + 1}" for i in range(n)]


def run(config: ScenarioConfig) -> ScenarioResult:
    route = config.route
    dt = config.dt
    params = config.vehicle
    n_steps = int(round(config.max_sim_time / dt))
    connected = config.mode == MODE_CONNECTED

    sim_rng = SplitMix64(config.seed)
    demand_rng = SplitMix64(config.seed ^ 0xB0A0_1234)
    channel = BeaconChannel(config.channel)
    if config.channel_log:
        channel.log = []

    bg_schedule = (
        generate_demand(config.seed ^ 0x5EED, n_steps, config.background.spawn_prob)
        if config.background.spawn_prob > 0.0
        else []
    )
    bg_schedule = bg_schedule[: config.background.max_vehicles] if config.background.max_vehicles else bg_schedule
    bg_by_step: dict[int, list[Spawn]] = {}
    for sp in bg_schedule:
        bg_by_step.setdefault(sp.step, []).append(sp)

    van_ids = _van_ids(config.mode, config.n_vans)
    roles = form_platoon(van_ids, config.platoon) if connected else {}

    stops = route.stops
    origin_pos = stops[0].position_m if stops else 0.0
    dest_pos = stops[-1].position_m if stops else route.length
    dwell_stops = [s for s in stops if s.dwell_s > 0.0]

    vehicles: dict[str, _SimVehicle] = {}
    spawned = 0

    def spawn_van(vid: str, s0: float) -> None:
        nonlocal spawned
        vehicles[vid] = _SimVehicle(
            state=VehicleState(id=vid, s=s0, v=0.0, a=0.0),
            params=params,
            kind="van",
            role=roles.get(vid),
            pending_stops=list(dwell_stops),
        )
        spawned += 1

    def spawn_background(vid: str) -> None:
        nonlocal spawned
        # desired speed drawn from the [v_min, v_max] demand range
        cap = params.v_min + (params.v_max - params.v_min) * demand_rng.uniform()
        for other in vehicles.values():
            if other.alive and abs(other.state.s) < params.length + 5.0:
                return  # spawn cell occupied; drop this spawn
        vehicles[f"BG{vid}"] = _SimVehicle(
            state=VehicleState(id=f"BG{vid}", s=0.0, v=cap * 0.5, a=0.0),
            params=params,
            kind="background",
            v_cap=cap,
        )
        spawned += 1

    if connected:
        cfgp = config.platoon
        spacing = params.length + cfgp.gap_des
        needed = (config.n_vans - 1) * spacing
        base = max(config.spawn_pos, needed + 1.0)
        depart_step = int(round(cfgp.depart / dt))
    else:
        depart_steps = [int(round(d / dt)) for d in config.van_departs[: config.n_vans]]
        while len(depart_steps) < config.n_vans:
            depart_steps.append((depart_steps[-1] if depart_steps else 0) + int(round(60.0 / dt)))

    steps_log: list[tuple] = []
    records = []
    despawned = 0

    for step in range(n_steps):
        t = step * dt

        # (1) spawns
        if connected:
            if step == depart_step:
                for i, vid in enumerate(van_ids):
                    spawn_van(vid, base - i * spacing)
        else:
            for i, vid in enumerate(van_ids):
                if step == depart_steps[i]:
                    spawn_van(vid, config.spawn_pos)
        for sp in bg_by_step.get(step, ()):
            spawn_background(sp.veh_id)

        alive = [v for v in vehicles.values() if v.alive]
        if not alive:
            continue
        order = sorted(alive, key=lambda v: -v.state.s)

        # (2) beacons among platoon members
        members = [v for v in order if v.role is not None]
        member_ids = [v.state.id for v in members]
        if connected and members:
            beacons = channel.schedule_beacons(
                t, [(v.state.id, v.state.s, v.state.v, v.state.a) for v in members], dt
            )
            channel.deliver(beacons, t, member_ids)

        # (3) controls, front-to-back
        for i, veh in enumerate(order):
            ahead = order[i - 1] if i > 0 else None
            _compute_control(veh, ahead, t, route, config, channel, van_ids, vehicles, sim_rng)

        # (4) integrate
        for veh in order:
            st = veh.state
            st.a = (veh.v_next - st.v) / dt
            st.v = veh.v_next
            st.s += st.v * dt

        # (5) stops, crossings, accounting
        t_end = t + dt
        for i, veh in enumerate(order):
            st = veh.state
            prev_s = st.s - st.v * dt

            if veh.pending_stops and st.stopped_until is None:
                stop = veh.pending_stops[0]
                if st.v < 0.05 and abs(stop.position_m - st.s) < 3.0:
                    st.stopped_until = t_end + stop.dwell_s

            if veh.kind == "van":
                if veh.origin_t is None and st.s >= origin_pos:
                    veh.origin_t = _cross_time(t, dt, prev_s, st.s, origin_pos)
                if veh.dest_t is None and st.s >= dest_pos:
                    veh.dest_t = _cross_time(t, dt, prev_s, st.s, dest_pos)

                rec = step_emissions(st.id, st.v, st.a, config.coeffs, t=t_end)
                in_trip = veh.origin_t is not None and (
                    veh.dest_t is None or t_end <= veh.dest_t + dt
                )
                if in_trip:
                    records.append(rec)
                ahead = order[i - 1] if i > 0 else None
                gap = (
                    ahead.state.s - ahead.params.length - st.s
                    if ahead is not None and ahead.alive
                    else math.nan
                )
                steps_log.append(
                    (t_end, st.id, veh.role_label(), st.s, st.v, st.a,
                     rec.co2, rec.co, rec.nox, rec.hc, rec.fuel, gap, int(veh.degraded))
                )

            if st.s >= route.length + (50.0 if veh.role is not None else 0.0):
                veh.alive = False
                despawned += 1

        if all(
            vehicles.get(vid) is not None and vehicles[vid].dest_t is not None
            for vid in van_ids
        ):
            break

    sim_time = min((step + 1) * dt, config.max_sim_time)
    totals = accumulate(records, dt)
    results: list[VehicleResult] = []
    unfinished: list[str] = []
    for vid in van_ids:
        veh = vehicles.get(vid)
        if veh is None or veh.origin_t is None or veh.dest_t is None:
            unfinished.append(vid)
            travel = None
            finished = False
        else:
            travel = veh.dest_t - veh.origin_t
            finished = True
        tot = totals.per_vehicle.get(vid, {q: 0.0 for q in QUANTITIES})
        means = {q: totals.mean_rate(vid, q) if vid in totals.per_vehicle else 0.0 for q in QUANTITIES}
        results.append(
            VehicleResult(
                id=vid,
                role=veh.role_label() if veh is not None else "krauss",
                travel_time=travel,
                finished=finished,
                totals=tot,
                mean_rates=means,
            )
        )

    still_running = sum(1 for v in vehicles.values() if v.alive)
    return ScenarioResult(
        mode=config.mode,
        seed=config.seed,
        dt=dt,
        sim_time=sim_time,
        vehicles=results,
        totals=totals,
        steps=steps_log,
        unfinished=unfinished,
        spawned=spawned,
        despawned=despawned,
        still_running=still_running,
    )


def _cross_time(t: float, dt: float, prev_s: float, new_s: float, pos: float) -> float:
    if new_s <= prev_s:
        return t + dt
    frac = (pos - prev_s) / (new_s - prev_s)
    return t + dt * min(1.0, max(0.0, frac))


def _compute_control(
    veh: _SimVehicle,
    ahead: Optional[_SimVehicle],
    t: float,
    route: Route,
    config: ScenarioConfig,
    channel: BeaconChannel,
    van_ids: list[str],
    vehicles: dict[str, _SimVehicle],
    sim_rng: SplitMix64,
) -> None:
    dt = config.dt
    st = veh.state
    params = veh.params
    veh.degraded = False

    if st.stopped_until is not None:
        if t + dt < st.stopped_until - 1e-9:
            veh.v_next = 0.0
            return
        # dwell served; release and clear the stop
        if veh.pending_stops:
            veh.pending_stops.pop(0)
        st.stopped_until = None

    pending_pos = veh.pending_stops[0].position_m if veh.pending_stops else None
    s_clamped = min(st.s, route.length)

    if veh.role is not None and not veh.role.is_leader:
        _cacc_follower_control(veh, t, config, channel, van_ids, vehicles)
        return

    if veh.role is not None and veh.role.is_leader:
        cfgp = config.platoon
        lim = effective_limit(route, s_clamped, st.v, LEADER_LOOKAHEAD_B, params.tau)
        target = leader_speed(t, cfgp, limit=lim)
        a_cmd = min(LEADER_TRACK_ACCEL, max(-LEADER_TRACK_ACCEL, (target - st.v) / dt))
        v_next = st.v + a_cmd * dt
        gate = stop_and_signal_gate(st, route, t, params, pending_pos)
        if gate is not None:
            v_next = min(
                v_next,
                krauss_safe_speed(0.0, st.v, gate - st.s - STOP_LINE_BUFFER, params.b_comf, params.tau),
            )
        if ahead is not None:
            gap = ahead.state.s - ahead.params.length - st.s
            v_next = min(v_next, krauss_safe_speed(ahead.state.v, st.v, gap, params.b_comf, params.tau))
        veh.v_next = max(0.0, max(v_next, st.v - params.b_emergency * dt))
        return

    # Krauss vehicle (not-connected van or background)
    lim = effective_limit(route, s_clamped, st.v, params.b_comf, params.tau)
    if veh.kind == "van":
        lim *= config.van_speed_factor
    if veh.v_cap is not None:
        lim = min(lim, veh.v_cap)
    leader = None
    if ahead is not None:
        leader = (ahead.state.v, ahead.state.s - ahead.params.length - st.s)
    gate = stop_and_signal_gate(st, route, t, params, pending_pos)
    if gate is not None:
        gate_leader = (0.0, gate - st.s - STOP_LINE_BUFFER)
        if leader is None or _safe_of(gate_leader, st.v, params) < _safe_of(leader, st.v, params):
            leader = gate_leader
    new_state = krauss_step(st, params, leader, lim, sim_rng, dt)
    veh.v_next = new_state.v


def _safe_of(leader: tuple[float, float], v: float, params: VehicleParams) -> float:
    return krauss_safe_speed(leader[0], v, leader[1], params.b_comf, params.tau)


def _cacc_follower_control(
    veh: _SimVehicle,
    t: float,
    config: ScenarioConfig,
    channel: BeaconChannel,
    van_ids: list[str],
    vehicles: dict[str, _SimVehicle],
) -> None:
    dt = config.dt
    st = veh.state
    params = veh.params
    cfgp = config.platoon
    idx = van_ids.index(st.id)
    pred_id = van_ids[idx - 1]
    lead_id = van_ids[idx - veh.role.index]
    pred_len = vehicles[pred_id].params.length

    pred_b = channel.latest(st.id, pred_id)
    lead_b = channel.latest(st.id, lead_id)

    if channel.is_fresh(pred_b, t) and channel.is_fresh(lead_b, t):
        pred_in = replace(pred_b, a=_shape_feedforward(veh, pred_b, dt))
        lead_in = replace(lead_b, a=_shape_feedforward(veh, lead_b, dt))
        u = cacc_accel(
            st.s, st.v, pred_in, lead_in, cfgp, pred_len,
            a_min=-params.b_emergency, a_max=params.a_max,
        )
        v_next = st.v + u * dt
    else:
        # degraded mode: safe-gap following on the dead-reckoned last beacon
        veh.degraded = True
        if pred_b is not None:
            age = t - pred_b.t_sent
            gap = (pred_b.s + pred_b.v * age) - pred_len - st.s
            v_safe = krauss_safe_speed(pred_b.v, st.v, gap, params.b_comf, params.tau)
        else:
            v_safe = 0.0
        v_next = min(st.v + params.a_max * dt, v_safe, params.v_max)
        v_next = max(v_next, st.v - params.b_emergency * dt)

    veh.v_next = max(0.0, min(v_next, params.v_max + 0.5))


def _shape_feedforward(veh: _SimVehicle, beacon, dt: float) -> float:
    """Lag-compensate a sender's beaconed acceleration: exponential average
    plus a discounted fast residual (see FF_SMOOTH_T / FF_HF_TRUST)."""
    prev = veh.ff_filter.get(beacon.sender, beacon.a)
    lp = prev + (dt / (FF_SMOOTH_T + dt)) * (beacon.a - prev)
    veh.ff_filter[beacon.sender] = lp
    return lp + FF_HF_TRUST * (beacon.a - lp)


# ---------------------------------------------------------------------------
# comparison

@dataclass
class VehicleSummary:
    id: str
    role: str
    travel_time: Optional[float]
    totals: dict[str, float]


@dataclass
class ScenarioSummary:
    mode: str
    vehicles: list[VehicleSummary]

    def mean_travel_time(self) -> float:
        times = [v.travel_time for v in self.vehicles if v.travel_time is not None]
        return sum(times) / len(times)

    def total(self, q: str) -> float:
        return sum(v.totals[q] for v in self.vehicles)


@dataclass
class ComparisonReport:
    travel_time_reduction_pct: float
    reduction_pct: dict[str, float]
    connected: ScenarioSummary
    notconnected: ScenarioSummary


def summarize(result: ScenarioResult) -> ScenarioSummary:
    return ScenarioSummary(
        mode=result.mode,
        vehicles=[
            VehicleSummary(v.id, v.role, v.travel_time, dict(v.totals)) for v in result.vehicles
        ],
    )


def compare(connected: ScenarioSummary | ScenarioResult,
            notconnected: ScenarioSummary | ScenarioResult) -> ComparisonReport:
    """Reductions of the connected scenario relative to the not-connected
    baseline: (notconnected - connected) / notconnected * 100 on summed
    metrics. Refuses unfinished inputs."""
    c = summarize(connected) if isinstance(connected, ScenarioResult) else connected
    nc = summarize(notconnected) if isinstance(notconnected, ScenarioResult) else notconnected
    for side, name in ((c, "connected"), (nc, "notconnected")):
        bad = [v.id for v in side.vehicles if v.travel_time is None]
        if bad:
            raise RefusesComparison(f"{name} input has unfinished vehicles: {', '.join(bad)}")

    def red(a: float, b: float) -> float:
        return (b - a) / b * 100.0 if b != 0.0 else 0.0

    return ComparisonReport(
        travel_time_reduction_pct=red(c.mean_travel_time(), nc.mean_travel_time()),
        reduction_pct={q: red(c.total(q), nc.total(q)) for q in QUANTITIES},
        connected=c,
        notconnected=nc,
    )


def format_report(report: ComparisonReport) -> str:
    lines = ["scenario comparison (connected vs. not connected)", ""]
    for side, title in ((report.connected, "Connected"), (report.notconnected, "Not connected")):
        lines.append(f"[{title}]")
        for v in side.vehicles:
            tt = f"{v.travel_time:.1f}" if v.travel_time is not None else "unfinished"
            lines.append(
                f"  {v.id:>6} ({v.role:<10}) travel_time_s={tt:>8} "
                f"co2={v.totals['co2']:.1f} co={v.totals['co']:.3f} "
                f"nox={v.totals['nox']:.3f} hc={v.totals['hc']:.4f} "
                f"fuel={v.totals['fuel']:.3f}"
            )
        lines.append(
            f"  sum: co2={side.total('co2'):.1f} co={side.total('co'):.3f} "
            f"nox={side.total('nox'):.3f} hc={side.total('hc'):.4f} fuel={side.total('fuel'):.3f} "
            f"mean_travel_time_s={side.mean_travel_time():.1f}"
        )
        lines.append("")
    lines.append(f"travel_time_reduction_pct: {report.travel_time_reduction_pct:.2f}")
    for q in QUANTITIES:
        lines.append(f"{q}_reduction_pct: {report.reduction_pct[q]:.2f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV / config I/O

def write_steps_csv(result: ScenarioResult, path: str | Path) -> None:
    lines = [STEP_CSV_HEADER]
    for row in result.steps:
        t, vid, role, s, v, a, co2, co, nox, hc, fuel, gap, degraded = row
        gap_s = "" if math.isnan(gap) else f"{gap:.4f}"
        lines.append(
            f"{t:.1f},{vid},{role},{s:.4f},{v:.4f},{a:.4f},"
            f"{co2:.4f},{co:.6f},{nox:.6f},{hc:.6f},{fuel:.6f},{gap_s},{degraded}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(result: ScenarioResult, path: str | Path) -> None:
    lines = [SUMMARY_CSV_HEADER]
    for v in result.vehicles:
        tt = f"{v.travel_time:.2f}" if v.travel_time is not None else "unfinished"
        lines.append(
            f"{v.id},{v.role},{tt},{v.totals['co2']:.4f},{v.totals['co']:.6f},"
            f"{v.totals['nox']:.6f},{v.totals['hc']:.6f},{v.totals['fuel']:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_summary_csv(path: str | Path, mode: str = "unknown") -> ScenarioSummary:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != SUMMARY_CSV_HEADER:
        raise ConfigError(f"{path}: not a summary CSV")
    vehicles = []
    for line in lines[1:]:
        cols = line.split(",")
        tt = None if cols[2] == "unfinished" else float(cols[2])
        totals = dict(zip(("co2", "co", "nox", "hc", "fuel"), (float(c) for c in cols[3:8])))
        vehicles.append(VehicleSummary(cols[0], cols[1], tt, totals))
    return ScenarioSummary(mode=mode, vehicles=vehicles)


def load_scenario_config(path: str | Path, seed_override: Optional[int] = None) -> ScenarioConfig:
    """Load a sectioned key-value scenario file; relative paths are resolved
    against the config file's directory."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config {path}")
    base = path.parent

    def resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    try:
        scn = cp["scenario"]
        mode = scn.get("mode", "").strip().lower().replace("_", "").replace(" ", "")
        route = load_route(resolve(cp["route"]["file"]).read_text())
        coeffs = load_coeffs(resolve(cp["emissions"]["coeff_file"]).read_text())
    except KeyError as exc:
        raise ConfigError(f"{path}: missing section/key {exc}") from exc

    vehicle_kwargs = {}
    if cp.has_section("vehicle"):
        for key, val in cp["vehicle"].items():
            vehicle_kwargs[key] = float(val)
    van_speed_factor = vehicle_kwargs.pop("speed_factor", 0.89)
    platoon = None
    if cp.has_section("platoon"):
        pk = {}
        for key, val in cp["platoon"].items():
            pk[key] = int(val) if key in ("n_cars", "platoon_size") else float(val)
        platoon = PlatoonConfig(**pk)

    channel_kwargs = {}
    channel_log = None
    if cp.has_section("channel"):
        sec = cp["channel"]
        if "interval_s" in sec:
            channel_kwargs["interval"] = sec.getfloat("interval_s")
        if "latency_s" in sec:
            channel_kwargs["latency"] = sec.getfloat("latency_s")
        if "loss_prob" in sec:
            channel_kwargs["loss_prob"] = sec.getfloat("loss_prob")
        if "seed" in sec:
            channel_kwargs["seed"] = sec.getint("seed")
        channel_log = sec.get("log_file", None)

    background = BackgroundSpec()
    if cp.has_section("background"):
        background = BackgroundSpec(
            spawn_prob=cp["background"].getfloat("spawn_prob", 0.0),
            max_vehicles=cp["background"].getint("max_vehicles", 0),
        )

    van_departs = tuple(
        float(x) for x in scn.get("van_departs", "0 60 120").replace(",", " ").split()
    )
    seed = seed_override if seed_override is not None else scn.getint("seed")

    return ScenarioConfig(
        mode=mode,
        seed=seed,
        route=route,
        coeffs=coeffs,
        dt=scn.getfloat("dt", 0.1),
        max_sim_time=scn.getfloat("max_sim_time", 3600.0),
        vehicle=VehicleParams(**vehicle_kwargs),
        platoon=platoon,
        channel=ChannelConfig(**channel_kwargs),
        background=background,
        n_vans=scn.getint("n_vans", 3),
        van_departs=van_departs,
        spawn_pos=scn.getfloat("spawn_pos", 30.0),
        van_speed_factor=van_speed_factor,
        channel_log=channel_log,
    )
