"""Seeded random networks and the batch simulation harness.

The generator builds strongly connected compressible networks in three
phases: every vertex first draws one random out-arc, pairs of strongly
connected components are then stitched together with one arc in each
direction until a single component remains, and finally any remaining arc
budget is spent on uniformly chosen absent ordered pairs.  Amounts are
uniform integers in ``{1, ..., cap_max}``.

Randomness comes from the stream of Python's ``random.Random`` (the
Mersenne Twister, MT19937) seeded per instance, so runs replay exactly;
the generator identity is recorded in simulation summaries.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigError, InternalInvariantError
from .maxvol import max_volume_circulation
from .network import (
    Network,
    Obligation,
    apply_compression,
    is_feasible,
    tarjan_components,
)
from .preferential import PreferenceProfile, preferential_compress

__all__ = [
    "RNG_ID",
    "GenConfig",
    "generate_network",
    "generate_preferences",
    "SimRow",
    "SimSummary",
    "run_simulation",
    "derive_seed",
]

RNG_ID = "python-random-mt19937"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

ALGORITHMS = ("maxvol", "pref")


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def derive_seed(base: int, index: int) -> int:
    """Deterministic sub-seed number ``index`` of a base seed (splitmix64)."""
    state = base & _MASK64
    value = 0
    for _ in range(index + 1):
        state, value = _splitmix64(state)
    return value


@dataclass(frozen=True)
class GenConfig:
    """Shape of one random instance: node count, target arc count, maximum
    amount, and the 64-bit seed."""

    nodes: int
    arcs: int
    cap_max: int
    seed: int

    def __post_init__(self):
        if not isinstance(self.nodes, int) or self.nodes < 2:
            raise ConfigError(f"nodes must be an integer >= 2, got {self.nodes!r}")
        if not isinstance(self.arcs, int) or self.arcs < self.nodes:
            raise ConfigError(
                f"arcs must be an integer >= nodes ({self.nodes}), got {self.arcs!r}"
            )
        if self.arcs > self.nodes * (self.nodes - 1):
            raise ConfigError(
                f"{self.nodes} nodes cannot carry {self.arcs} distinct arcs"
            )
        if not isinstance(self.cap_max, int) or self.cap_max < 1:
            raise ConfigError(f"cap_max must be an integer >= 1, got {self.cap_max!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


def _node_ids(n: int) -> list[str]:
    width = len(str(n))
    return [f"N{i:0{width}d}" for i in range(1, n + 1)]


def generate_network(cfg: GenConfig) -> Network:
    """One strongly connected random network, fully determined by the seed.

    The target arc count can be undershot when connecting the components
    already used up the budget; the actual count is ``nodes + k`` then,
    with ``k`` the number of connecting arcs.
    """
    rng = random.Random(cfg.seed)
    ids = _node_ids(cfg.nodes)
    arcs: dict[tuple[str, str], int] = {}

    # Phase 1: one uniform out-arc per vertex.
    for u in ids:
        v = rng.choice([w for w in ids if w != u])
        arcs[(u, v)] = rng.randint(1, cfg.cap_max)

    # Phase 2: stitch strongly connected components together pairwise.
    connecting = 0
    while True:
        succ: dict[str, list[str]] = {p: [] for p in ids}
        for (u, v) in arcs:
            succ[u].append(v)
        comps = tarjan_components(ids, succ)
        if len(comps) == 1:
            break
        first, second = rng.sample(range(len(comps)), 2)
        u = rng.choice(comps[first])
        v = rng.choice(comps[second])
        # Both directions; one of them may already exist and is then kept.
        for pair in ((u, v), (v, u)):
            if pair not in arcs:
                arcs[pair] = rng.randint(1, cfg.cap_max)
                connecting += 1

    # Phase 3: spend the remaining budget on absent ordered pairs.
    remaining = cfg.arcs - cfg.nodes - connecting
    if remaining > 0:
        absent = sorted(
            (u, v)
            for u in ids
            for v in ids
            if u != v and (u, v) not in arcs
        )
        for _ in range(remaining):
            pair = absent.pop(rng.randrange(len(absent)))
            arcs[pair] = rng.randint(1, cfg.cap_max)

    net = Network.ingest(
        [Obligation(u, v, amount) for (u, v), amount in sorted(arcs.items())],
        participants=ids,
    )
    if len(net.strongly_connected_components()) != 1:
        raise InternalInvariantError(f"generated network is not strongly connected (seed {cfg.seed})")
    return net


def generate_preferences(net: Network, seed: int) -> PreferenceProfile:
    """Uniform random out-mode preferences: each participant's list is a
    random permutation of its out-arcs."""
    rng = random.Random(seed)
    lists: dict[str, tuple[int, ...]] = {}
    for pid in net.participants:
        out = list(net.out_arcs(pid))
        if not out:
            continue
        rng.shuffle(out)
        lists[pid] = tuple(out)
    return PreferenceProfile(mode="out", lists=lists)


@dataclass(frozen=True)
class SimRow:
    """One (instance, algorithm) measurement."""

    seed: int
    nodes: int
    arcs_requested: int
    arcs_actual: int
    algorithm: str
    epsilon: Fraction | None
    volume: int
    fraction: Fraction
    iterations: int
    wall_time: float


@dataclass(frozen=True)
class SimSummary:
    """All per-instance rows plus min/mean/max of the fraction cleared per
    algorithm.  Deterministic per seeds except for the timing fields."""

    rows: tuple[SimRow, ...]
    aggregates: dict[str, dict[str, Fraction]]
    rng: str = RNG_ID


def run_simulation(
    batch: Sequence[GenConfig],
    algorithms: Iterable[str] = ("maxvol",),
    epsilon: Fraction | int = 1,
) -> SimSummary:
    """Generate, compress, and verify every instance in the batch.

    ``algorithms`` is a subset of ``{"maxvol", "pref"}``; the preferential
    runs draw their preference lists from a sub-seed of the instance seed
    and use the given finish threshold.  Every instance is checked for
    conservation, feasibility, and maxvol dominance; a violation aborts
    the whole batch naming the offending seed.
    """
    algos = tuple(algorithms)
    for algo in algos:
        if algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    rows: list[SimRow] = []
    for cfg in batch:
        net = generate_network(cfg)
        excess = net.total_excess()
        volumes: dict[str, int] = {}
        for algo in algos:
            started = time.perf_counter()
            if algo == "maxvol":
                flow, stats = max_volume_circulation(net)
                iterations = stats.cancellations
                eps_used = None
            else:
                prefs = generate_preferences(net, derive_seed(cfg.seed, 1))
                flow, trace = preferential_compress(net, prefs, epsilon)
                iterations = len(trace.iterations)
                eps_used = Fraction(epsilon)
            elapsed = time.perf_counter() - started
            _verify_instance(net, flow, cfg.seed, algo)
            volumes[algo] = flow.volume
            fraction = Fraction(2 * flow.volume, excess) if excess else Fraction(0)
            if not 0 <= fraction <= 1:
                raise InternalInvariantError(
                    f"fraction {fraction} out of range (seed {cfg.seed}, {algo})"
                )
            rows.append(
                SimRow(
                    seed=cfg.seed,
                    nodes=cfg.nodes,
                    arcs_requested=cfg.arcs,
                    arcs_actual=len(net.obligations),
                    algorithm=algo,
                    epsilon=eps_used,
                    volume=flow.volume,
                    fraction=fraction,
                    iterations=iterations,
                    wall_time=elapsed,
                )
            )
        if "maxvol" in volumes and "pref" in volumes:
            if volumes["maxvol"] < volumes["pref"]:
                raise InternalInvariantError(
                    f"preferential volume exceeded maxvol (seed {cfg.seed})"
                )
    aggregates: dict[str, dict[str, Fraction]] = {}
    for algo in algos:
        fractions = [r.fraction for r in rows if r.algorithm == algo]
        if not fractions:
            continue
        aggregates[algo] = {
            "mean": sum(fractions, Fraction(0)) / len(fractions),
            "min": min(fractions),
            "max": max(fractions),
        }
    return SimSummary(rows=tuple(rows), aggregates=aggregates)


def _verify_instance(net: Network, flow, seed: int, algo: str) -> None:
    if not is_feasible(net, flow).ok:
        raise InternalInvariantError(f"infeasible flow from {algo} (seed {seed})")
    after = apply_compression(net, flow)
    for pid in net.participants:
        if after.net_position(pid) != net.net_position(pid):
            raise InternalInvariantError(
                f"net position of {pid} not conserved by {algo} (seed {seed})"
            )
