"""Command-line entry point: ingest, run, compare, calibrate."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import PlatoonSimError
from .road_model import dump_route, route_from_trace
from .scenario import (
    compare,
    format_report,
    load_scenario_config,
    read_summary_csv,
    run,
    summarize,
    write_steps_csv,
    write_summary_csv,
)
from .trace_ingest import clean_trace, parse_trace

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_COEFFS = DATA_DIR / "ldv_d_eu6.emis"


def _coeff_class_name() -> str:
    from .emissions import load_coeffs

    path = Path(os.environ.get("PLATOONSIM_COEFFS", DEFAULT_COEFFS))
    try:
        return load_coeffs(path.read_text()).class_name
    except OSError:
        return "unavailable"


def cmd_ingest(args: argparse.Namespace) -> int:
    text = Path(args.trace_file).read_text()
    trace = parse_trace(text, trip_id=Path(args.trace_file).stem)
    for rej in trace.rejects:
        print(f"reject: {rej}", file=sys.stderr)
    cleaned = clean_trace(trace, max_jump_m=args.max_jump)
    route = route_from_trace(cleaned, epsilon_m=args.epsilon)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dump_route(route))
    print(f"route written to {out} (length {route.length:.1f} m, "
          f"{len(route.segments)} segments, {len(trace.rejects)} rejected rows)")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = load_scenario_config(args.config_file, seed_override=args.seed)
    if os.environ.get("PLATOONSIM_COEFFS"):
        from .emissions import load_coeffs

        config = dataclasses.replace(
            config, coeffs=load_coeffs(Path(os.environ["PLATOONSIM_COEFFS"]).read_text())
        )
    result = run(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_steps_csv(result, out / "steps.csv")
    write_summary_csv(result, out / "summary.csv")
    (out / "run_meta.json").write_text(
        json.dumps(
            {
                "mode": result.mode,
                "seed": result.seed,
                "dt": result.dt,
                "sim_time": result.sim_time,
                "emission_class": config.coeffs.class_name,
                "unfinished": result.unfinished,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"summary: {out / 'summary.csv'}")
    if result.unfinished:
        print(f"unfinished vehicles: {', '.join(result.unfinished)}")
        return 1
    mean_tt = result.mean_travel_time()
    print(
        f"mode={result.mode} mean_travel_time_s={mean_tt:.1f} "
        f"co2_sum={result.total('co2'):.1f} fuel_sum={result.total('fuel'):.3f}"
    )
    return 0


def _load_summary(path: Path):
    meta = path / "run_meta.json"
    mode = "unknown"
    if meta.exists():
        mode = json.loads(meta.read_text()).get("mode", "unknown")
    return read_summary_csv(path / "summary.csv", mode=mode)


def cmd_compare(args: argparse.Namespace) -> int:
    connected = _load_summary(Path(args.connected_dir))
    notconnected = _load_summary(Path(args.notconnected_dir))
    report = compare(connected, notconnected)
    text = format_report(report)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    print(text, end="")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    """Bisection on the driver-imperfection sigma so the scenario's mean
    travel time lands on the target."""
    target = args.target_seconds
    tol = target * args.tolerance
    lo, hi = 0.0, 1.0

    def evaluate(sigma: float) -> float:
        config = load_scenario_config(args.config_file, seed_override=args.seed)
        config = dataclasses.replace(config, vehicle=dataclasses.replace(config.vehicle, sigma=sigma))
        result = run(config)
        if result.unfinished:
            return float("inf")
        return result.mean_travel_time()

    t_lo, t_hi = evaluate(lo), evaluate(hi)
    best_sigma, best_t = (lo, t_lo) if abs(t_lo - target) < abs(t_hi - target) else (hi, t_hi)
    if not (t_lo <= target <= t_hi):
        print(f"warning: target {target} outside achievable range [{t_lo:.1f}, {t_hi:.1f}]",
              file=sys.stderr)
    for _ in range(args.iterations):
        mid = 0.5 * (lo + hi)
        t_mid = evaluate(mid)
        if abs(t_mid - target) < abs(best_t - target):
            best_sigma, best_t = mid, t_mid
        if abs(t_mid - target) <= tol:
            break
        if t_mid < target:
            lo = mid
        else:
            hi = mid

    text = Path(args.config_file).read_text()
    out_lines = []
    in_vehicle = False
    replaced = False
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("["):
            in_vehicle = stripped.lower() == "[vehicle]"
        if in_vehicle and stripped.split("=")[0].strip() == "sigma":
            line = f"sigma = {best_sigma:.6f}"
            replaced = True
        out_lines.append(line)
    if not replaced:
        out_lines.append("")
        out_lines.append("[vehicle]")
        out_lines.append(f"sigma = {best_sigma:.6f}")
    Path(args.out).write_text("\n".join(out_lines) + "\n")
    print(f"sigma={best_sigma:.6f} mean_travel_time_s={best_t:.1f} "
          f"(target {target:.1f}); wrote {args.out}")
    return 0 if abs(best_t - target) <= tol else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platoonsim",
        description="Corridor platooning simulator: travel time, emissions, fuel.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"platoonsim {__version__} (emission class: {_coeff_class_name()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a trip trace and derive a route file")
    p.add_argument("trace_file")
    p.add_argument("-o", "--out", required=True, help="output route file")
    p.add_argument("--epsilon", type=float, default=5.0, help="polyline tolerance in m")
    p.add_argument("--max-jump", type=float, default=60.0, help="GPS glitch threshold m/s")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("run", help="run one scenario config")
    p.add_argument("config_file")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare two run output directories")
    p.add_argument("connected_dir")
    p.add_argument("notconnected_dir")
    p.add_argument("-o", "--out", default=None, help="report file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("calibrate", help="bisect sigma toward a target travel time")
    p.add_argument("config_file")
    p.add_argument("target_seconds", type=float)
    p.add_argument("-o", "--out", required=True, help="calibrated config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=0.02)
    p.add_argument("--iterations", type=int, default=12)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 1
    except PlatoonSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
