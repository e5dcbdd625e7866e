"""Compression reports: positions before/after, totals, and the metric.

The effectiveness metric is the fraction of excess cleared,
``(excess before - excess after) / excess before``, an exact rational
defined as 0 when there was no excess to begin with.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InternalInvariantError
from .network import (
    FlowAssignment,
    Network,
    apply_compression,
    decompose_circulation,
)

__all__ = ["ParticipantReport", "CompressionReport", "build_report"]


@dataclass(frozen=True)
class ParticipantReport:
    participant: str
    gross_before: int
    net_before: int
    excess_before: int
    gross_after: int
    net_after: int
    excess_after: int


@dataclass(frozen=True)
class CompressionReport:
    """Everything a compression run produced, ready for serialization."""

    algorithm: str
    parameters: Mapping[str, object]
    participants: tuple[ParticipantReport, ...]
    total_gross_before: int
    total_gross_after: int
    total_excess_before: int
    total_excess_after: int
    volume: int
    fraction_cleared: Fraction
    cycles: tuple[tuple[tuple[str, ...], int], ...]  # (closed node walk, amount)
    iterations: int
    stuck: bool = False
    aborted: bool = False
    final_mean: Fraction | None = None
    generator: Mapping[str, object] | None = None


def build_report(
    before: Network,
    flow: FlowAssignment,
    *,
    algorithm: str,
    parameters: Mapping[str, object] | None = None,
    iterations: int = 0,
    stuck: bool = False,
    final_mean: Fraction | None = None,
    generator: Mapping[str, object] | None = None,
) -> tuple[Network, CompressionReport]:
    """Apply ``flow`` to ``before`` and assemble the report.

    Returns the compressed network alongside the report.  Conservation is
    re-checked here: every participant's net position must survive the
    compression exactly.
    """
    after = apply_compression(before, flow)
    rows = []
    for pid in before.participants:
        b = before.position_summary(pid)
        a = after.position_summary(pid)
        if a.net != b.net:
            raise InternalInvariantError(
                f"net position of {pid} changed from {b.net} to {a.net}"
            )
        rows.append(
            ParticipantReport(
                participant=pid,
                gross_before=b.gross,
                net_before=b.net,
                excess_before=b.excess,
                gross_after=a.gross,
                net_after=a.net,
                excess_after=a.excess,
            )
        )
    excess_before = before.total_excess()
    excess_after = after.total_excess()
    volume = flow.volume
    if excess_before:
        fraction = Fraction(excess_before - excess_after, excess_before)
    else:
        fraction = Fraction(0)
    if excess_before - excess_after != 2 * volume:
        raise InternalInvariantError(
            f"excess accounting mismatch: cleared {excess_before - excess_after}, "
            f"volume {volume}"
        )
    cycles = tuple(
        (_node_walk(before, arcs), amount)
        for arcs, amount in decompose_circulation(before, flow)
    )
    report = CompressionReport(
        algorithm=algorithm,
        parameters=dict(parameters or {}),
        participants=tuple(rows),
        total_gross_before=before.total_gross(),
        total_gross_after=after.total_gross(),
        total_excess_before=excess_before,
        total_excess_after=excess_after,
        volume=volume,
        fraction_cleared=fraction,
        cycles=cycles,
        iterations=iterations,
        stuck=stuck,
        final_mean=final_mean,
        generator=dict(generator) if generator is not None else None,
    )
    return after, report


def _node_walk(net: Network, arcs) -> tuple[str, ...]:
    obs = net.obligations
    walk = [obs[a].debtor for a in arcs]
    walk.append(obs[arcs[0]].debtor)
    return tuple(walk)
