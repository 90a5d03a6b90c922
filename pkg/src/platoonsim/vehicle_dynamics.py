"""Longitudinal kinematics and the Krauss-type human-driver model.

Fixed-step explicit Euler integration (dt = 0.1 s by default). The driver
imperfection draw comes from the shared SplitMix64 generator so seeded runs
replay exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .rng import SplitMix64
from .road_model import Route, limit_at, signal_is_green

DEFAULT_DT = 0.1


@dataclass(frozen=True)
class VehicleParams:
    length: float = 5.94
    mass: float = 3500.0
    v_max: float = 20.0
    v_min: float = 5.0  # desired-speed floor for background demand, not a physical floor
    a_max: float = 2.5
    b_comf: float = 2.5
    b_emergency: float = 9.0
    tau: float = 1.0
    sigma: float = 0.5

    def __post_init__(self):
        assert self.length > 0 and self.mass > 0
        assert 0 < self.v_min <= self.v_max
        assert self.a_max > 0 and self.b_comf > 0 and self.tau > 0
        assert 0.0 <= self.sigma <= 1.0


@dataclass
class VehicleState:
    id: str
    s: float = 0.0
    v: float = 0.0
    a: float = 0.0
    stopped_until: Optional[float] = None


def krauss_safe_speed(v_leader: float, v_follower: float, gap: float, b: float, tau: float) -> float:
    """Safe speed behind a leader: the classic Krauss bound, clamped at 0."""
    v_safe = v_leader + (gap - v_leader * tau) / ((v_leader + v_follower) / (2.0 * b) + tau)
    return max(0.0, v_safe)


def krauss_step(
    state: VehicleState,
    params: VehicleParams,
    leader: Optional[tuple[float, float]],
    limit: float,
    rng: SplitMix64,
    dt: float = DEFAULT_DT,
) -> VehicleState:
    """One Krauss update: accelerate toward the desired speed, then dawdle.

    leader is (leader speed, bumper gap) or None in free flow. One uniform
    draw is consumed per call regardless of sigma, keeping replay sequences
    aligned across parameterizations.
    """
    v_des = min(state.v + params.a_max * dt, params.v_max, limit)
    if leader is not None:
        v_lead, gap = leader
        v_des = min(v_des, krauss_safe_speed(v_lead, state.v, gap, params.b_comf, params.tau))
    u = rng.uniform()
    v_next = max(0.0, v_des - params.sigma * params.a_max * dt * u)
    v_next = max(v_next, state.v - params.b_emergency * dt)
    return replace(
        state,
        s=state.s + v_next * dt,
        v=v_next,
        a=(v_next - state.v) / dt,
    )


def braking_distance(v: float, b: float, tau: float) -> float:
    """Stopping distance including the reaction-time headway."""
    return v * v / (2.0 * b) + v * tau


def effective_limit(route: Route, s: float, v: float, b: float, tau: float) -> float:
    """Current limit, lowered when an upcoming slower segment requires
    anticipatory braking (so decelerations stay near b instead of spiking)."""
    lim = limit_at(route, min(s, route.length))
    horizon = braking_distance(max(v, lim), b, tau) + 50.0
    for start, _end, seg_limit in route.segments:
        if start <= s:
            continue
        d = start - s
        if d > horizon:
            break
        if seg_limit < lim:
            allowed = math.sqrt(seg_limit * seg_limit + 2.0 * b * max(0.0, d - v * tau))
            lim = min(lim, max(seg_limit, allowed))
    return lim


def stop_and_signal_gate(
    state: VehicleState,
    route: Route,
    t: float,
    params: VehicleParams,
    pending_stop_pos: Optional[float] = None,
) -> Optional[float]:
    """Position of a stationary virtual leader the vehicle must halt behind.

    Red signals and an unserved container stop within braking range act as a
    standing obstacle. A red signal too close to stop for even at emergency
    deceleration is passed (committed entry). Returns the obstacle arc-length
    position, or None.
    """
    activation = braking_distance(state.v, params.b_comf, params.tau) + 5.0
    candidates: list[float] = []

    for sig in route.signals:
        d = sig.position_m - state.s
        if d < -0.5 or d > activation:
            continue
        if signal_is_green(sig, t):
            continue
        if state.v > 2.0 and d < state.v * state.v / (2.0 * params.b_emergency):
            continue  # cannot stop anymore; clear the junction
        candidates.append(sig.position_m)

    if pending_stop_pos is not None:
        d = pending_stop_pos - state.s
        if -0.5 <= d <= activation:
            candidates.append(pending_stop_pos)

    return min(candidates) if candidates else None
