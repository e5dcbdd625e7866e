"""Command-line interface.

Exit codes: 0 success, 1 validation failures and stuck runs, 2 parse, IO
and usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (
    ClearingError,
    ConfigError,
    ParameterError,
    ParseError,
    UnknownArcError,
    UnknownParticipantError,
    ValidationError,
)
from .formats import (
    parse_flow,
    parse_network,
    parse_preferences,
    parse_sim_config,
    report_to_json,
    summary_to_csv,
    summary_to_json,
    write_flow,
    write_network,
)
from .generator import RNG_ID, GenConfig, derive_seed, generate_network, run_simulation
from .maxvol import max_volume_circulation
from .network import decompose_circulation, is_feasible
from .preferential import preferential_compress
from .report import build_report

USAGE_EXIT = 2
VALIDATION_EXIT = 1


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected NUM/DEN, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netclear",
        description="Conservative compression of obligation networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    stats = sub.add_parser("stats", help="positions, excess, SCCs, cycle check")
    stats.add_argument("--input", required=True, help="network CSV file")

    validate = sub.add_parser("validate", help="check a flow for feasibility")
    validate.add_argument("--input", required=True)
    validate.add_argument("--flow", required=True, help="flow CSV file")

    compress = sub.add_parser("compress", help="compress a network")
    compress.add_argument("--input", required=True)
    compress.add_argument("--algorithm", required=True, choices=("maxvol", "pref"))
    compress.add_argument("--prefs", help="preference CSV (required for pref)")
    compress.add_argument(
        "--epsilon",
        type=_fraction_arg,
        default=Fraction(1),
        help="finish threshold NUM/DEN in (0,1], pref only (default 1)",
    )
    compress.add_argument("--output", help="write the compressed network here")
    compress.add_argument("--flow-out", help="write the applied flow here")
    compress.add_argument("--report", help="write the JSON report here")

    decompose = sub.add_parser("decompose", help="split a flow into cycles")
    decompose.add_argument("--input", required=True)
    decompose.add_argument("--flow", required=True)

    generate = sub.add_parser("generate", help="generate a random network")
    generate.add_argument("--nodes", type=int, required=True)
    generate.add_argument("--arcs", type=int, required=True)
    generate.add_argument("--max-capacity", type=int, default=10)
    generate.add_argument("--seed", type=int, required=True)
    generate.add_argument("--output", help="write here instead of stdout")

    simulate = sub.add_parser("simulate", help="run a simulation batch")
    simulate.add_argument("--config", required=True, help="key = value config file")
    simulate.add_argument("--report", help="write the JSON summary here")
    simulate.add_argument("--csv", help="write per-instance CSV rows here")

    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _cmd_stats(args) -> int:
    net = parse_network(_read(args.input))
    print(f"participants: {len(net.participants)}")
    print(f"obligations: {len(net.obligations)}")
    print(f"has-cycle: {'yes' if net.contains_directed_cycle() else 'no'}")
    print(f"scc-count: {len(net.strongly_connected_components())}")
    print("participant,gross,net,excess")
    for pid in net.participants:
        row = net.position_summary(pid)
        print(f"{pid},{row.gross},{row.net},{row.excess}")
    print(f"total-gross: {net.total_gross()}")
    print(f"total-excess: {net.total_excess()}")
    return 0


def _cmd_validate(args) -> int:
    net = parse_network(_read(args.input))
    flow = parse_flow(_read(args.flow), net)
    check = is_feasible(net, flow)
    if check.ok:
        print(f"ok: feasible circulation, volume {flow.volume}")
        return 0
    for pid, diff in check.imbalances:
        print(f"imbalance at {pid}: {diff:+d}", file=sys.stderr)
    obs = net.obligations
    for idx in check.capacity_violations:
        ob = obs[idx]
        print(
            f"capacity exceeded on {ob.debtor}->{ob.creditor}: "
            f"{flow[idx]} > {ob.amount}",
            file=sys.stderr,
        )
    return VALIDATION_EXIT


def _cmd_compress(args, parser) -> int:
    net = parse_network(_read(args.input))
    if args.algorithm == "pref":
        if not args.prefs:
            parser.error("--prefs is required with --algorithm pref")
        prefs = parse_preferences(_read(args.prefs), net)
        flow, trace = preferential_compress(net, prefs, args.epsilon)
        compressed, report = build_report(
            net,
            flow,
            algorithm="preferential",
            parameters={"epsilon": args.epsilon},
            iterations=len(trace.iterations),
            stuck=trace.stuck,
        )
    else:
        flow, stats = max_volume_circulation(net)
        compressed, report = build_report(
            net,
            flow,
            algorithm="maxvol",
            iterations=stats.cancellations,
            final_mean=stats.final_mean,
        )
    if args.output:
        _write(args.output, write_network(compressed))
    if args.flow_out:
        _write(args.flow_out, write_flow(flow, net))
    if args.report:
        _write(args.report, report_to_json(report))
    fraction = report.fraction_cleared
    print(
        f"algorithm: {report.algorithm}\n"
        f"volume: {report.volume}\n"
        f"fraction-cleared: {fraction.numerator}/{fraction.denominator}\n"
        f"iterations: {report.iterations}"
    )
    if report.stuck:
        print("stuck: clearing stopped making progress", file=sys.stderr)
        return VALIDATION_EXIT
    return 0


def _cmd_decompose(args) -> int:
    net = parse_network(_read(args.input))
    flow = parse_flow(_read(args.flow), net)
    cycles = decompose_circulation(net, flow)
    obs = net.obligations
    for arcs, amount in cycles:
        walk = [obs[a].debtor for a in arcs] + [obs[arcs[0]].debtor]
        print("->".join(walk) + f": {amount}")
    if not cycles:
        print("zero circulation: no cycles")
    return 0


def _cmd_generate(args) -> int:
    cfg = GenConfig(nodes=args.nodes, arcs=args.arcs, cap_max=args.max_capacity, seed=args.seed)
    net = generate_network(cfg)
    text = write_network(net)
    if args.output:
        _write(args.output, text)
        print(
            f"generated {len(net.participants)} participants, "
            f"{len(net.obligations)} obligations (seed {args.seed}, rng {RNG_ID})"
        )
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    spec = parse_sim_config(_read(args.config))
    batch = [
        GenConfig(
            nodes=spec.nodes,
            arcs=spec.arcs,
            cap_max=spec.max_capacity,
            seed=derive_seed(spec.seed, i),
        )
        for i in range(spec.instances)
    ]
    summary = run_simulation(batch, spec.algorithms, spec.epsilon)
    if args.report:
        _write(args.report, summary_to_json(summary))
    if args.csv:
        _write(args.csv, summary_to_csv(summary))
    for algo, stats in summary.aggregates.items():
        mean = stats["mean"]
        print(
            f"{algo}: fraction cleared mean {mean.numerator}/{mean.denominator} "
            f"min {stats['min'].numerator}/{stats['min'].denominator} "
            f"max {stats['max'].numerator}/{stats['max'].denominator}"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize for callers
        return int(exc.code or 0)
    try:
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "compress":
            return _cmd_compress(args, parser)
        if args.command == "decompose":
            return _cmd_decompose(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        parser.error(f"unknown command {args.command!r}")
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ParseError, ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ValidationError, UnknownArcError, UnknownParticipantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except ClearingError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    return USAGE_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
