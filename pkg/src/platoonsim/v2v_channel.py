"""Periodic beaconing between platoon members with latency and i.i.d. loss.

Stand-in for the 802.11p stack: every member broadcasts its kinematic state
on a fixed interval; each beacon is dropped per receiver with probability
loss_prob (one seeded draw per beacon-receiver pair, drawn in deterministic
order: a beacon is delivered iff its draw is below 1 - loss_prob) and
otherwise becomes visible at t_sent + latency. Receivers keep
only the highest-sequence beacon per sender.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .rng import SplitMix64


@dataclass(frozen=True)
class Beacon:
    sender: str
    s: float
    v: float
    a: float
    t_sent: float
    seq: int


@dataclass
class ChannelConfig:
    interval: float = 0.1
    latency: float = 0.0
    loss_prob: float = 0.0
    seed: int = 1

    def __post_init__(self):
        assert self.interval > 0.0
        assert self.latency >= 0.0
        assert 0.0 <= self.loss_prob <= 1.0


@dataclass
class _Pending:
    arrival: float
    receiver: str
    beacon: Beacon


class BeaconChannel:
    """Owns beacon scheduling, loss draws, latency queue and receiver tables."""

    def __init__(self, cfg: ChannelConfig):
        self.cfg = cfg
        self.rng = SplitMix64(cfg.seed)
        self.seq: dict[str, int] = {}
        self.tables: dict[str, dict[str, Beacon]] = {}
        self._queue: list[_Pending] = []
        self.sent_count = 0
        self.delivered_count = 0
        self._next_emit = 0  # index of the next beacon slot (t = k * interval)
        self.log: Optional[list[tuple]] = None  # (t, sender, seq, s, v, a, receivers)

    def schedule_beacons(
        self, t: float, vehicles: Iterable[tuple[str, float, float, float]], dt: float
    ) -> list[Beacon]:
        """Emit one beacon per member when t falls on the beacon interval.

        vehicles is an ordered iterable of (id, s, v, a); emission order is
        that vehicle order.
        """
        # slot-counting instead of float modulo so t = k * interval is robust
        if t + 1e-9 < self._next_emit * self.cfg.interval:
            return []
        self._next_emit += 1
        beacons = []
        for vid, s, v, a in vehicles:
            seq = self.seq.get(vid, 0)
            self.seq[vid] = seq + 1
            beacons.append(Beacon(vid, s, v, a, t, seq))
        self.sent_count += len(beacons)
        return beacons

    def deliver(self, beacons: list[Beacon], t: float, receivers: list[str]) -> None:
        """Queue beacons toward every other member, applying loss, then flush
        everything whose arrival time has come."""
        for beacon in beacons:
            delivered_to = []
            for rec in receivers:
                if rec == beacon.sender:
                    continue
                u = self.rng.uniform()
                if u >= 1.0 - self.cfg.loss_prob:
                    continue
                self._queue.append(_Pending(t + self.cfg.latency, rec, beacon))
                delivered_to.append(rec)
            if self.log is not None:
                self.log.append(
                    (t, beacon.sender, beacon.seq, beacon.s, beacon.v, beacon.a,
                     "|".join(delivered_to))
                )
        self._flush(t)

    def _flush(self, t: float) -> None:
        still_pending = []
        for item in self._queue:
            if item.arrival > t + 1e-12:
                still_pending.append(item)
                continue
            table = self.tables.setdefault(item.receiver, {})
            prev = table.get(item.beacon.sender)
            if prev is None or item.beacon.seq > prev.seq:
                table[item.beacon.sender] = item.beacon
            self.delivered_count += 1
        self._queue = still_pending

    def latest(self, receiver: str, sender: str) -> Optional[Beacon]:
        return self.tables.get(receiver, {}).get(sender)

    def is_fresh(self, beacon: Optional[Beacon], t: float) -> bool:
        """Staleness bound: a consumable beacon is at most 3 intervals old."""
        return beacon is not None and (t - beacon.t_sent) <= 3.0 * self.cfg.interval + 1e-9
