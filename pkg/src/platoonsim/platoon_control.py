"""CACC follower control, sinusoidal leader profile and platoon membership.

The follower law is the constant-spacing controller with combined
predecessor and platoon-leader feedback (weight c1, damping xi, natural
frequency omega_n) plus feedforward of both accelerations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .v2v_channel import Beacon


@dataclass(frozen=True)
class PlatoonConfig:
    gap_des: float = 5.0
    n_cars: int = 3
    platoon_size: int = 3
    c1: float = 0.5
    xi: float = 1.0
    omega_n: float = 0.2
    osc_freq: float = 0.2
    osc_amp: float = 0.2
    v_cruise: float = 19.8
    depart: float = 0.0

    def __post_init__(self):
        assert self.gap_des > 0
        assert 1 <= self.platoon_size <= self.n_cars
        assert 0.0 < self.c1 < 1.0
        assert self.xi >= 1.0
        assert self.omega_n > 0.0
        assert self.osc_amp >= 0.0


@dataclass(frozen=True)
class PlatoonRole:
    platoon_id: int
    index: int  # 0 = leader, followers numbered from 1

    @property
    def is_leader(self) -> bool:
        return self.index == 0

    def label(self) -> str:
        return "leader" if self.is_leader else f"follower{self.index}"


def form_platoon(vehicle_ids: list[str], cfg: PlatoonConfig) -> dict[str, PlatoonRole]:
    """Assign roles to vehicles ordered front-to-back; the first of every
    group of platoon_size leads, a short remainder forms a smaller platoon."""
    roles: dict[str, PlatoonRole] = {}
    for i, vid in enumerate(vehicle_ids):
        roles[vid] = PlatoonRole(platoon_id=i // cfg.platoon_size, index=i % cfg.platoon_size)
    return roles


def cacc_accel(
    ego_s: float,
    ego_v: float,
    pred: Beacon,
    lead: Beacon,
    cfg: PlatoonConfig,
    pred_length: float,
    a_min: float = -9.0,
    a_max: float = 2.5,
) -> float:
    """Commanded acceleration for a platoon follower.

    Gap error e is measured bumper-to-bumper against the desired gap; the
    returned value is clamped to [a_min, a_max].
    """
    e = (pred.s - pred_length - ego_s) - cfg.gap_des
    sqrt_term = cfg.xi + math.sqrt(max(0.0, cfg.xi * cfg.xi - 1.0))
    u = (
        (1.0 - cfg.c1) * pred.a
        + cfg.c1 * lead.a
        + (2.0 * cfg.xi - cfg.c1 * sqrt_term) * cfg.omega_n * (pred.v - ego_v)
        + cfg.c1 * sqrt_term * cfg.omega_n * (lead.v - ego_v)
        + cfg.omega_n * cfg.omega_n * e
    )
    return min(a_max, max(a_min, u))


def leader_speed(t: float, cfg: PlatoonConfig, limit: Optional[float] = None) -> float:
    """Leader target speed: cruise plus the sinusoidal platoon modulation,
    capped by the current speed limit and floored at 0."""
    v = cfg.v_cruise + cfg.osc_amp * math.sin(2.0 * math.pi * cfg.osc_freq * t)
    if limit is not None:
        v = min(v, limit)
    return max(0.0, v)
