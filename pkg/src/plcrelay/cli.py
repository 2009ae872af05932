"""Command-line entry point: ``plcrelay <command> [--config FILE] [--set key=value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, ConfigError, ScenarioConfig, dump_schema, load_config
from .energy import scheme_energy
from .montecarlo import simulate_scheme
from .outage import scheme_outage, scheme_topology
from .power import SolverError, solve_scheme
from .sweep import SweepError, format_value, mc_agrees, run_sweep

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3

log = logging.getLogger("plcrelay")


def _fmt(value) -> str:
    if isinstance(value, (tuple, list)):
        return ", ".join(_fmt(v) for v in value)
    return format_value(float(value) if isinstance(value, int) and not isinstance(value, bool)
                        else value)


def _emit(pairs) -> None:
    for key, value in pairs:
        print(f"{key}: {_fmt(value)}")


def _point(cfg: ScenarioConfig):
    return cfg.scheme, scheme_topology(cfg.scheme, cfg.distance, cfg.fading)


def cmd_outage(cfg: ScenarioConfig, args) -> int:
    scheme, topo = _point(cfg)
    b = scheme_outage(scheme, cfg.power, topo, cfg.noise, cfg.attenuation, cfg.xi)
    pairs = [("scheme", scheme), ("distance_m", cfg.distance), ("power_w", cfg.power),
             ("outage", b.end_to_end), ("per_link", b.per_link)]
    if b.direct_link is not None:
        pairs.append(("direct_link", b.direct_link))
    _emit(pairs)
    return EXIT_OK


def cmd_power(cfg: ScenarioConfig, args) -> int:
    scheme, topo = _point(cfg)
    sol = solve_scheme(scheme, cfg.outage_target, topo, cfg.noise, cfg.attenuation,
                       cfg.xi, cfg.tol)
    _emit([("scheme", scheme), ("distance_m", cfg.distance),
           ("outage_target", cfg.outage_target), ("power_w", sol.power),
           ("residual", sol.residual), ("iterations", str(sol.iterations)),
           ("bracket_w", sol.bracket), ("method", sol.method)])
    return EXIT_OK


def cmd_energy(cfg: ScenarioConfig, args) -> int:
    scheme, topo = _point(cfg)
    sol = solve_scheme(scheme, cfg.outage_target, topo, cfg.noise, cfg.attenuation,
                       cfg.xi, cfg.tol)
    b = scheme_outage(scheme, sol.power, topo, cfg.noise, cfg.attenuation, cfg.xi)
    report = scheme_energy(scheme, sol.power, b, cfg.profile)
    _emit([("scheme", scheme), ("distance_m", cfg.distance),
           ("outage_target", cfg.outage_target), ("power_w", sol.power),
           ("energy_per_bit_j", report.energy_per_bit)])
    for weight, energy in report.terms:
        print(f"  term: weight {format_value(weight)}  energy {format_value(energy)} J/bit")
    return EXIT_OK


def cmd_simulate(cfg: ScenarioConfig, args) -> int:
    scheme, topo = _point(cfg)
    analytic = scheme_outage(scheme, cfg.power, topo, cfg.noise, cfg.attenuation,
                             cfg.xi).end_to_end
    est = simulate_scheme(scheme, cfg.power, topo, cfg.noise, cfg.attenuation, cfg.xi,
                          cfg.sweep.mc)
    _emit([("scheme", scheme), ("distance_m", cfg.distance), ("power_w", cfg.power),
           ("trials", str(est.trials)), ("seed", str(cfg.sweep.mc.seed)),
           ("mc_p_hat", est.p_hat), ("mc_ci99", est.ci99_half_width),
           ("analytic", analytic),
           ("agree", "yes" if mc_agrees(analytic, est.p_hat, est.trials) else "no")])
    return EXIT_OK


def cmd_sweep(cfg: ScenarioConfig, args) -> int:
    result = run_sweep(cfg)
    text = result.to_csv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(result.summary, file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value scenario file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key (repeatable)")
    common.add_argument("--preset", choices=sorted(PRESETS),
                        help="start from a built-in sweep preset")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--scheme", help="sh, mhN or idf (scenario.scheme)")
    point.add_argument("--distance", help="total distance in m (scenario.distance)")

    parser = argparse.ArgumentParser(
        prog="plcrelay",
        description="Outage, power and energy of relayed PLC links under impulsive noise.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage", parents=[common, point], help="outage at a fixed power")
    p.add_argument("--power", help="transmit power in W (scenario.power)")
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("power", parents=[common, point], help="power for a target outage")
    p.add_argument("--target", help="target outage (scenario.outage_target)")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("energy", parents=[common, point], help="energy per bit at solved power")
    p.add_argument("--target", help="target outage (scenario.outage_target)")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("simulate", parents=[common, point], help="Monte Carlo outage estimate")
    p.add_argument("--power", help="transmit power in W (scenario.power)")
    p.add_argument("--trials", help="number of trials (mc.trials)")
    p.add_argument("--seed", help="64-bit seed (mc.seed)")
    p.add_argument("--workers", help="worker threads (mc.workers)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep to CSV")
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("schema", help="list every config key with its default")
    p.set_defaults(func=None)
    return parser


_SHORTCUTS = {
    "scheme": "scenario.scheme", "distance": "scenario.distance", "power": "scenario.power",
    "target": "scenario.outage_target", "trials": "mc.trials", "seed": "mc.seed",
    "workers": "mc.workers",
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(dump_schema())
        return EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    overrides = list(args.overrides)
    for attr, key in _SHORTCUTS.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides.append(f"{key}={value}")
    try:
        cfg = load_config(args.config, args.preset, overrides)
        return args.func(cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, SweepError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
