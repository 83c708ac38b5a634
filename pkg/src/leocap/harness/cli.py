"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 infeasible scenario.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from ..constellation import build_topology
from ..graph import read_edge_list, write_edge_list
from ..traffic import generate_demands, read_sessions, write_sessions
from ..throughput import TrafficSession
from . import experiments as ex
from .config import ConfigError, ScenarioConfig, load_config

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

log = logging.getLogger("leocap")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value scenario file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key")
    g = p.add_argument_group("scenario")
    for f in dataclasses.fields(ScenarioConfig):
        g.add_argument("--" + f.name.replace("_", "-"), dest="cfg_" + f.name, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leocap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity-sweep", help="Monte-Carlo vs closed-form capacity over (lambda, sigma)")
    _add_config_flags(p)

    p = sub.add_parser("load-throughput", help="throughput and utilization against load count")
    _add_config_flags(p)

    p = sub.add_parser("compare-methods", help="CPE against super-terminal Dinic baselines")
    _add_config_flags(p)
    p.add_argument("--graph", type=Path, help="edge-list graph instead of a constellation preset")
    p.add_argument("--sessions", type=Path, help="session file to use with --graph")
    p.add_argument("--no-svg", action="store_true")

    p = sub.add_parser("gen-traffic", help="write demand matrix and routed sessions")
    _add_config_flags(p)
    p.add_argument("--at-min", type=float, default=0.0, help="snapshot time in minutes")

    p = sub.add_parser("dump-topology", help="write the ISL graph as an edge list")
    _add_config_flags(p)
    p.add_argument("--at-min", type=float, default=0.0, help="snapshot time in minutes")
    return parser


def _config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    overrides: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v
    for f in dataclasses.fields(ScenarioConfig):
        v = getattr(args, "cfg_" + f.name)
        if v is not None:
            overrides[f.name] = v
    return load_config(args.config, overrides)


def _capacity_sweep(cfg: ScenarioConfig, args: argparse.Namespace) -> None:
    series, summary = ex.run_capacity_sweep(cfg)
    ex.write_csv(ex.CAPACITY_COLUMNS, series, args.out / "capacity_sweep.csv")
    ex.write_csv(ex.CAPACITY_SUMMARY_COLUMNS, summary, args.out / "capacity_summary.csv")
    print(f"wrote {len(series)} snapshot rows and {len(summary)} summary rows to {args.out}")


def _load_throughput(cfg: ScenarioConfig, args: argparse.Namespace) -> None:
    rows = ex.run_load_throughput(cfg)
    ex.write_csv(ex.REPORT_COLUMNS, rows, args.out / "load_throughput.csv")
    print(f"wrote {len(rows)} rows to {args.out / 'load_throughput.csv'}")


def _compare_methods(cfg: ScenarioConfig, args: argparse.Namespace) -> None:
    if (args.graph is None) != (args.sessions is None):
        raise ConfigError("--graph and --sessions must be given together")
    if args.graph is not None:
        try:
            g = read_edge_list(args.graph)
            sessions: list[TrafficSession] = read_sessions(args.sessions)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        rows = ex.compare_on_graph(g, sessions, cfg, scenario=args.graph.stem)
        title = args.graph.stem
    else:
        rows = ex.run_method_comparison(cfg)
        title = cfg.specs()[0].name
    ex.write_csv(ex.COMPARISON_COLUMNS, rows, args.out / "method_comparison.csv")
    if not args.no_svg:
        from .plots import load_throughput_svg

        load_throughput_svg(rows, args.out / "method_comparison.svg", title)
    flagged = sum(r[-1] == "1" for r in rows)
    print(f"wrote {len(rows)} rows ({flagged} with mean path utilization > 1) to {args.out}")


def _gen_traffic(cfg: ScenarioConfig, args: argparse.Namespace) -> None:
    lam = cfg.lambdas[0] if cfg.lambdas else 0.0
    for spec in cfg.specs():
        g, _ = ex.snapshot_graph(cfg, spec, lam, args.at_min)
        demands = generate_demands(
            spec, args.at_min * 60.0, cfg.n_loads, cfg.seed, cfg.model(), ex._grid(cfg), cfg.demand_gbps
        )
        routes = ex.route_all(g, demands)
        sessions, skipped = ex.prefix_sessions(demands, cfg.n_loads, routes)
        demands.to_csv(args.out / f"{spec.name}_demands.csv")
        write_sessions(sessions, args.out / f"{spec.name}_sessions.txt")
        print(f"{spec.name}: {len(demands)} demand pairs, {len(sessions)} sessions, {skipped} unreachable")


def _dump_topology(cfg: ScenarioConfig, args: argparse.Namespace) -> None:
    for spec in cfg.specs():
        g = build_topology(spec, args.at_min * 60.0, cfg.isl_capacity_gbps, cfg.cross_seam, cfg.classical_phasing)
        header = (
            f"{spec.name}: {spec.n_planes} planes x {spec.sats_per_plane} sats, F={spec.phase_factor}, "
            f"t={args.at_min:g} min\nsrc dst capacity_gbps length_km"
        )
        write_edge_list(g, args.out / f"{spec.name}_topology.txt", header)
        print(f"{spec.name}: {len(g)} satellites, {len(g.edges())} ISLs")


COMMANDS = {
    "capacity-sweep": _capacity_sweep,
    "load-throughput": _load_throughput,
    "compare-methods": _compare_methods,
    "gen-traffic": _gen_traffic,
    "dump-topology": _dump_topology,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config_from_args(args)
        args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ex.InfeasibleScenario, ValueError) as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return 0


if __name__ == "__main__":
    sys.exit(main())
