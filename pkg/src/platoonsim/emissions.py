"""HBEFA3-style per-step emission and fuel rates with per-vehicle totals.

Each quantity is a six-coefficient polynomial in speed and acceleration,

    rate = max(0, c0 + c1*v*a + c2*v*a^2 + c3*v + c4*v^2 + c5*v^3)

in mg/s for pollutants and ml/s for fuel. Coefficient files are plain text:

    class HBEFA3/LDV-D-EU6
    co2 1200 80 25 10 0.3 0.004
    ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ConfigError, UndefinedRatio, UnknownQuantity

QUANTITIES = ("co2", "co", "nox", "hc", "fuel")


@dataclass(frozen=True)
class EmissionCoeffs:
    class_name: str
    table: dict[str, tuple[float, float, float, float, float, float]]

    def __post_init__(self):
        missing = [q for q in QUANTITIES if q not in self.table]
        if missing:
            raise ConfigError(f"coefficient table missing: {', '.join(missing)}")


@dataclass(frozen=True)
class EmissionRecord:
    t: float
    vehicle_id: str
    co2: float
    co: float
    nox: float
    hc: float
    fuel: float

    def get(self, q: str) -> float:
        return getattr(self, q)


@dataclass
class EmissionTotals:
    """Per-vehicle integrated rates (rate times dt, i.e. rate-seconds) plus
    the record count so mean rates are derivable."""

    per_vehicle: dict[str, dict[str, float]] = field(default_factory=dict)
    steps: dict[str, int] = field(default_factory=dict)
    dt: float = 1.0

    def total(self, q: str) -> float:
        return sum(v[q] for v in self.per_vehicle.values())

    def vehicle_total(self, vid: str, q: str) -> float:
        return self.per_vehicle[vid][q]

    def mean_rate(self, vid: str, q: str) -> float:
        n = self.steps.get(vid, 0)
        return self.per_vehicle[vid][q] / (n * self.dt) if n else 0.0


def rate(q: str, v: float, a: float, coeffs: EmissionCoeffs) -> float:
    """Instantaneous rate for one quantity, clamped at zero."""
    try:
        c0, c1, c2, c3, c4, c5 = coeffs.table[q]
    except KeyError:
        raise UnknownQuantity(q) from None
    value = c0 + c1 * v * a + c2 * v * a * a + c3 * v + c4 * v * v + c5 * v * v * v
    return value if value > 0.0 else 0.0


def step_emissions(vehicle_id: str, v: float, a: float, coeffs: EmissionCoeffs, t: float = 0.0) -> EmissionRecord:
    """Evaluate all five quantities at the vehicle's current speed and
    acceleration."""
    return EmissionRecord(
        t=t,
        vehicle_id=vehicle_id,
        co2=rate("co2", v, a, coeffs),
        co=rate("co", v, a, coeffs),
        nox=rate("nox", v, a, coeffs),
        hc=rate("hc", v, a, coeffs),
        fuel=rate("fuel", v, a, coeffs),
    )


def accumulate(records: Iterable[EmissionRecord], dt: float) -> EmissionTotals:
    """Fold per-step records into per-vehicle rate-second totals."""
    totals = EmissionTotals(dt=dt)
    for rec in records:
        bucket = totals.per_vehicle.setdefault(rec.vehicle_id, {q: 0.0 for q in QUANTITIES})
        for q in QUANTITIES:
            bucket[q] += rec.get(q) * dt
        totals.steps[rec.vehicle_id] = totals.steps.get(rec.vehicle_id, 0) + 1
    return totals


def merge_totals(a: EmissionTotals, b: EmissionTotals) -> EmissionTotals:
    out = EmissionTotals(dt=a.dt)
    for src in (a, b):
        for vid, bucket in src.per_vehicle.items():
            dst = out.per_vehicle.setdefault(vid, {q: 0.0 for q in QUANTITIES})
            for q in QUANTITIES:
                dst[q] += bucket[q]
            out.steps[vid] = out.steps.get(vid, 0) + src.steps.get(vid, 0)
    return out


def fuel_carbon_check(totals: EmissionTotals) -> float:
    """CO2/fuel ratio (mg per ml); the diesel carbon balance puts it near
    2650 mg/ml. Soft sanity check, not an error path."""
    fuel = totals.total("fuel")
    if fuel == 0.0:
        raise UndefinedRatio("fuel total is zero")
    return totals.total("co2") / fuel


def load_coeffs(text: str) -> EmissionCoeffs:
    class_name = "unknown"
    table: dict[str, tuple[float, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "class":
            class_name = " ".join(parts[1:])
            continue
        q = parts[0].lower()
        if len(parts) != 7:
            raise ConfigError(f"coefficient file line {lineno}: expected 6 coefficients")
        try:
            table[q] = tuple(float(p) for p in parts[1:])
        except ValueError as exc:
            raise ConfigError(f"coefficient file line {lineno}: {exc}") from exc
    return EmissionCoeffs(class_name=class_name, table=table)


def dump_coeffs(coeffs: EmissionCoeffs) -> str:
    lines = [f"class {coeffs.class_name}"]
    for q in QUANTITIES:
        cs = " ".join(f"{c:g}" for c in coeffs.table[q])
        lines.append(f"{q} {cs}")
    return "\n".join(lines) + "\n"
