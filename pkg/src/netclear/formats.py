"""File formats: the CSV wire formats and the JSON report.

Three comma-separated formats make up the public contract, all versioned
with a ``#format=1`` header comment:

* networks      ``from,to,amount`` — one obligation per row
* preferences   ``participant,rank,counterparty`` — ranks contiguous from 1
* flows         ``from,to,flow`` — omitted arcs carry zero

Blank lines and lines starting with ``#`` are ignored everywhere; the
preference format additionally understands the ``#mode=in`` directive,
which flips the listed arcs to enter their owner instead of leaving it.
Reports serialize to JSON with a stable field order; exact rationals
appear as ``{"num": ..., "den": ...}`` objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError, ParseError, ValidationError
from .generator import SimSummary
from .network import FlowAssignment, Network, Obligation
from .preferential import PreferenceProfile
from .report import CompressionReport

__all__ = [
    "parse_network",
    "write_network",
    "parse_preferences",
    "parse_flow",
    "write_flow",
    "report_to_json",
    "SimBatchSpec",
    "parse_sim_config",
    "summary_to_json",
    "summary_to_csv",
]

NETWORK_HEADER = "from,to,amount"
PREFS_HEADER = "participant,rank,counterparty"
FLOW_HEADER = "from,to,flow"

_RESCALE_HINT = (
    "amounts must be integer notional units; rescale rational amounts by "
    "multiplying every amount by the least common multiple of the "
    "denominators, compress, then divide the results back"
)


def _content_lines(text: str):
    """Yield (line_number, stripped_line) skipping blanks and comments."""
    for number, raw in enumerate(text.lstrip("﻿").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield number, line


def _split_row(line: str, number: int, want: int, header: str) -> list[str]:
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != want:
        raise ParseError(
            f"expected {want} comma-separated fields ({header}), got {len(fields)}",
            line=number,
        )
    return fields


def _expect_header(lines, header: str):
    """Consume the header row; a file with no content rows is legal."""
    try:
        number, line = next(lines)
    except StopIteration:
        return
    if line != header:
        raise ParseError(f"expected header {header!r}, got {line!r}", line=number)


def _parse_int(text: str, number: int, what: str, hint: str | None = None) -> int:
    try:
        return int(text)
    except ValueError:
        message = f"{what} {text!r} is not an integer"
        if hint:
            message = f"{message}; {hint}"
        raise ValidationError(message, line=number) from None


# -- networks ----------------------------------------------------------------


def parse_network(text: str) -> Network:
    """Read a network from ``from,to,amount`` rows.

    Ingestion rules apply: positive integer amounts, no self-loops, no
    duplicate ordered pairs.  Errors carry the offending line number.
    """
    lines = _content_lines(text)
    _expect_header(lines, NETWORK_HEADER)
    obligations: list[Obligation] = []
    seen: set[tuple[str, str]] = set()
    for number, line in lines:
        debtor, creditor, amount_text = _split_row(line, number, 3, NETWORK_HEADER)
        amount = _parse_int(amount_text, number, "amount", hint=_RESCALE_HINT)
        if debtor == creditor:
            raise ValidationError(f"self-loop {debtor}->{creditor}", line=number)
        if amount <= 0:
            raise ValidationError(f"amount must be positive, got {amount}", line=number)
        if (debtor, creditor) in seen:
            raise ValidationError(f"duplicate obligation {debtor}->{creditor}", line=number)
        seen.add((debtor, creditor))
        obligations.append(Obligation(debtor, creditor, amount))
    return Network.ingest(obligations)


def write_network(net: Network) -> str:
    """Serialize a network, dropping arcs whose amount reached zero."""
    rows = ["#format=1", NETWORK_HEADER]
    rows.extend(
        f"{ob.debtor},{ob.creditor},{ob.amount}"
        for ob in net.obligations
        if ob.amount > 0
    )
    return "\n".join(rows) + "\n"


# -- preferences ---------------------------------------------------------------


def parse_preferences(text: str, net: Network) -> PreferenceProfile:
    """Read ranked preferences as ``participant,rank,counterparty`` rows.

    In the default out mode the listed arc is participant->counterparty;
    the ``#mode=in`` directive flips it to counterparty->participant.
    Ranks must be contiguous from 1 for each participant; an empty file is
    an empty profile.
    """
    mode = "out"
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#mode="):
            wanted = line[len("#mode="):].strip()
            if wanted not in ("out", "in"):
                raise ParseError(f"unknown preference mode {wanted!r}", line=number)
            mode = wanted
    lines = _content_lines(text)
    _expect_header(lines, PREFS_HEADER)
    ranked: dict[str, dict[int, int]] = {}
    listed: dict[str, set[int]] = {}
    for number, line in lines:
        owner, rank_text, counterparty = _split_row(line, number, 3, PREFS_HEADER)
        rank = _parse_int(rank_text, number, "rank")
        if rank < 1:
            raise ValidationError(f"rank must be >= 1, got {rank}", line=number)
        if mode == "out":
            debtor, creditor = owner, counterparty
        else:
            debtor, creditor = counterparty, owner
        if not net.has_arc(debtor, creditor):
            raise ValidationError(f"no obligation {debtor}->{creditor}", line=number)
        arc = net.arc_index(debtor, creditor)
        by_rank = ranked.setdefault(owner, {})
        if rank in by_rank:
            raise ValidationError(f"duplicate rank {rank} for {owner}", line=number)
        arcs = listed.setdefault(owner, set())
        if arc in arcs:
            raise ValidationError(
                f"arc {debtor}->{creditor} listed twice by {owner}", line=number
            )
        arcs.add(arc)
        by_rank[rank] = arc
    lists: dict[str, tuple[int, ...]] = {}
    for owner, by_rank in ranked.items():
        expected = set(range(1, len(by_rank) + 1))
        if set(by_rank) != expected:
            missing = sorted(expected - set(by_rank))
            raise ValidationError(
                f"ranks of {owner} are not contiguous from 1 (missing {missing})"
            )
        lists[owner] = tuple(by_rank[r] for r in sorted(by_rank))
    profile = PreferenceProfile(mode=mode, lists=lists)
    profile.validate(net)
    return profile


# -- flows ---------------------------------------------------------------------


def parse_flow(text: str, net: Network) -> FlowAssignment:
    """Read a flow assignment as ``from,to,flow`` rows; omitted arcs are 0."""
    lines = _content_lines(text)
    _expect_header(lines, FLOW_HEADER)
    units: dict[int, int] = {}
    for number, line in lines:
        debtor, creditor, value_text = _split_row(line, number, 3, FLOW_HEADER)
        value = _parse_int(value_text, number, "flow")
        if value < 0:
            raise ValidationError(f"flow must be non-negative, got {value}", line=number)
        if not net.has_arc(debtor, creditor):
            raise ValidationError(f"no obligation {debtor}->{creditor}", line=number)
        arc = net.arc_index(debtor, creditor)
        if arc in units:
            raise ValidationError(f"arc {debtor}->{creditor} assigned twice", line=number)
        units[arc] = value
    return FlowAssignment(units)


def write_flow(flow: FlowAssignment, net: Network) -> str:
    """Serialize a flow assignment; only positive entries are written."""
    rows = ["#format=1", FLOW_HEADER]
    obs = net.obligations
    rows.extend(
        f"{obs[idx].debtor},{obs[idx].creditor},{value}"
        for idx, value in flow.items()
    )
    return "\n".join(rows) + "\n"


# -- reports ---------------------------------------------------------------------


def _frac(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


def _json_value(value):
    if isinstance(value, Fraction):
        return _frac(value)
    return value


def report_to_json(report: CompressionReport) -> str:
    """Serialize a report with stable field order; rationals become
    ``{"num": ..., "den": ...}`` objects and integers stay integers."""
    obj = {
        "format": 1,
        "algorithm": report.algorithm,
        "parameters": {k: _json_value(v) for k, v in sorted(report.parameters.items())},
        "volume": report.volume,
        "fraction_cleared": _frac(report.fraction_cleared),
        "iterations": report.iterations,
        "stuck": report.stuck,
        "aborted": report.aborted,
        "final_mean": _frac(report.final_mean) if report.final_mean is not None else None,
        "totals": {
            "gross_before": report.total_gross_before,
            "gross_after": report.total_gross_after,
            "excess_before": report.total_excess_before,
            "excess_after": report.total_excess_after,
        },
        "participants": [
            {
                "id": row.participant,
                "gross_before": row.gross_before,
                "net_before": row.net_before,
                "excess_before": row.excess_before,
                "gross_after": row.gross_after,
                "net_after": row.net_after,
                "excess_after": row.excess_after,
            }
            for row in report.participants
        ],
        "cycles": [
            {"cycle": list(walk), "amount": amount} for walk, amount in report.cycles
        ],
        "generator": dict(report.generator) if report.generator is not None else None,
    }
    return json.dumps(obj, indent=2) + "\n"


# -- simulation config and summaries -----------------------------------------------


@dataclass(frozen=True)
class SimBatchSpec:
    """Declarative simulation batch: every instance shares the shape and
    derives its seed from the base seed and its index."""

    instances: int
    nodes: int
    arcs: int
    max_capacity: int
    seed: int
    algorithms: tuple[str, ...]
    epsilon: Fraction


_SIM_KEYS = {
    "instances",
    "nodes",
    "arcs",
    "max_capacity",
    "seed",
    "algorithms",
    "epsilon",
}


def parse_sim_config(text: str) -> SimBatchSpec:
    """Parse a ``key = value`` simulation config.

    Required keys: instances, nodes, arcs, max_capacity, seed.  Optional:
    algorithms (comma list of maxvol/pref, default maxvol) and epsilon
    (``N/D``, default 1, used by pref).
    """
    values: dict[str, str] = {}
    for number, line in _content_lines(text):
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", line=number)
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SIM_KEYS:
            raise ConfigError(f"unknown simulation key {key!r} (line {number})")
        if key in values:
            raise ConfigError(f"duplicate simulation key {key!r} (line {number})")
        values[key] = value.strip()
    missing = {"instances", "nodes", "arcs", "max_capacity", "seed"} - set(values)
    if missing:
        raise ConfigError(f"simulation config is missing keys: {sorted(missing)}")

    def as_int(key: str) -> int:
        try:
            return int(values[key])
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {values[key]!r}") from None

    algorithms = tuple(
        part.strip()
        for part in values.get("algorithms", "maxvol").split(",")
        if part.strip()
    )
    try:
        epsilon = Fraction(values.get("epsilon", "1"))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"epsilon must be NUM/DEN, got {values['epsilon']!r}") from None
    return SimBatchSpec(
        instances=as_int("instances"),
        nodes=as_int("nodes"),
        arcs=as_int("arcs"),
        max_capacity=as_int("max_capacity"),
        seed=as_int("seed"),
        algorithms=algorithms,
        epsilon=epsilon,
    )


def summary_to_json(summary: SimSummary) -> str:
    obj = {
        "format": 1,
        "rng": summary.rng,
        "instances": [
            {
                "seed": row.seed,
                "nodes": row.nodes,
                "arcs_requested": row.arcs_requested,
                "arcs_actual": row.arcs_actual,
                "algorithm": row.algorithm,
                "epsilon": _frac(row.epsilon) if row.epsilon is not None else None,
                "volume": row.volume,
                "fraction_cleared": _frac(row.fraction),
                "iterations": row.iterations,
                "wall_time_s": row.wall_time,
            }
            for row in summary.rows
        ],
        "aggregates": {
            algo: {name: _frac(value) for name, value in stats.items()}
            for algo, stats in summary.aggregates.items()
        },
    }
    return json.dumps(obj, indent=2) + "\n"


def summary_to_csv(summary: SimSummary) -> str:
    rows = [
        "#format=1",
        "seed,nodes,arcs_requested,arcs_actual,algorithm,epsilon,volume,"
        "fraction_num,fraction_den,iterations,wall_time_s",
    ]
    for row in summary.rows:
        epsilon = "" if row.epsilon is None else str(row.epsilon)
        rows.append(
            f"{row.seed},{row.nodes},{row.arcs_requested},{row.arcs_actual},"
            f"{row.algorithm},{epsilon},{row.volume},"
            f"{row.fraction.numerator},{row.fraction.denominator},"
            f"{row.iterations},{row.wall_time:.6f}"
        )
    return "\n".join(rows) + "\n"
