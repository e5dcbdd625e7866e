"""Maximum-volume circulation by canceling minimum-mean residual cycles.

The maximum-volume feasible circulation of a network (the optimal
conservative compression) is the minimum-cost circulation for the constant
cost of -1 per cleared unit.  The solver starts from the zero circulation
and repeatedly augments along a minimum-mean cycle of the residual graph
until no cycle with negative mean remains; at that point no negative-cost
residual circuit exists and the circulation is optimal.

Minimum-mean cycles are found per strongly connected component with the
walk-length dynamic program ``d[k+1][v] = min over arcs (u, v) of
(d[k][u] + cost)``; the minimum cycle mean is ``min over v of max over
0 <= k < n of (d[n][v] - d[k][v]) / (n - k)`` and a cycle attaining it
lies on the walk that set ``d[n][v]``.  All means are exact rationals;
no float ever enters a comparison.

Whenever the residual graph still contains a cycle of unsaturated forward
arcs, every such cycle has mean exactly -1, the lowest possible value, so
the solver takes the first one found by a deterministic DFS instead of
running the full dynamic program.  The table-based search engages once
forward arcs alone are acyclic and mixed forward/reverse cycles are all
that remain.

The dynamic program runs on one of three interchangeable backends (plain
ints, numba-jitted, vectorized numpy) selected by input size and cost
magnitude; all three perform the same exact integer arithmetic with the
same tie-breaking and return identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InternalInvariantError, ParameterError
from .network import (
    FlowAssignment,
    Network,
    _require_feasible,
    tarjan_components,
)
from .report import CompressionReport, build_report

try:  # optional accelerator; every backend computes identical results
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

__all__ = [
    "ResidualArc",
    "ResidualGraph",
    "MeanCycleResult",
    "CanceledCycle",
    "MaxVolStats",
    "build_residual",
    "karp_min_mean_cycle",
    "min_mean_over_residual",
    "cancel_cycle",
    "max_volume_circulation",
    "compress_max_volume",
]

_INF = 1 << 40


@dataclass(frozen=True)
class ResidualArc:
    """One arc of a residual graph.

    A forward arc exists while the origin obligation has spare capacity
    (residual = amount - flow, cost -1 under the fixed unit cost); a
    reverse arc exists while the origin carries flow that could be sent
    back (residual = flow, cost +1).
    """

    origin: int
    forward: bool
    tail: str
    head: str
    residual: int
    cost: int


@dataclass(frozen=True)
class ResidualGraph:
    """Residual arcs in deterministic order: all forwards in network arc
    order, then all reverses in network arc order."""

    nodes: tuple[str, ...]
    arcs: tuple[ResidualArc, ...]

    def restricted_to(self, members) -> "ResidualGraph":
        keep = set(members)
        return ResidualGraph(
            nodes=tuple(sorted(keep)),
            arcs=tuple(a for a in self.arcs if a.tail in keep and a.head in keep),
        )


@dataclass(frozen=True)
class MeanCycleResult:
    """A simple directed residual cycle together with its exact mean cost."""

    mean: Fraction
    cycle: tuple[ResidualArc, ...]


@dataclass(frozen=True)
class CanceledCycle:
    """Trace entry for one cancellation: node set, units pushed, mean."""

    nodes: tuple[str, ...]
    amount: int
    mean: Fraction


@dataclass(frozen=True)
class MaxVolStats:
    cancellations: int
    final_mean: Fraction | None
    canceled: tuple[CanceledCycle, ...]


def build_residual(net: Network, flow: FlowAssignment) -> ResidualGraph:
    """Residual graph of ``net`` under a feasible circulation ``flow``."""
    _require_feasible(net, flow)
    arcs: list[ResidualArc] = []
    for i, ob in enumerate(net.obligations):
        x = flow[i]
        if x < ob.amount:
            arcs.append(ResidualArc(i, True, ob.debtor, ob.creditor, ob.amount - x, -1))
    for i, ob in enumerate(net.obligations):
        x = flow[i]
        if x > 0:
            arcs.append(ResidualArc(i, False, ob.creditor, ob.debtor, x, 1))
    return ResidualGraph(nodes=net.participants, arcs=tuple(arcs))


# -- walk-length DP backends ---------------------------------------------------
#
# All backends fill the same tables: dist[k][v] is the minimum cost of a
# k-arc walk ending at v (starting anywhere), preds[k-1][v] the position of
# the arc that set dist[k][v].  Ties go to the earliest arc position, so
# the tables are identical across backends.  Unreachable entries are None
# on the plain path and exactly _INF on the array paths.


def _use_python_tables(n: int, m: int, max_cost: int) -> bool:
    # Small components run the plain-int path; big ones use an array
    # backend unless cost magnitudes could overflow the int64 arithmetic.
    if n < 64:
        return True
    c = max(max_cost, 1)
    return (
        m >= (1 << 20)
        or (n + 1) * c >= (1 << 38)
        or 2 * (n + 1) * (n + 1) * c >= (1 << 61)
    )


def _dp_python(n, tails, heads, costs):
    m = len(tails)
    level = [0] * n
    dist = [level]
    preds: list[list[int]] = []
    for _ in range(n):
        cur: list[int | None] = [None] * n
        pred = [-1] * n
        for pos in range(m):
            base = level[tails[pos]]
            if base is None:
                continue
            val = base + costs[pos]
            h = heads[pos]
            if cur[h] is None or val < cur[h]:
                cur[h] = val
                pred[h] = pos
        dist.append(cur)
        preds.append(pred)
        level = cur
    return dist, preds


def _formula_python(dist, n):
    best: tuple[Fraction, int] | None = None
    for v in range(n):
        end = dist[n][v]
        if end is None:
            continue
        worst: Fraction | None = None
        for k in range(n):
            dk = dist[k][v]
            if dk is None:
                continue
            cand = Fraction(end - dk, n - k)
            if worst is None or cand > worst:
                worst = cand
        if worst is None:
            continue
        if best is None or worst < best[0]:
            best = (worst, v)
    return best


def _dp_numpy(n, tails, heads, costs):
    """Vectorized levels: a segment-minimum over arcs grouped by head, with
    the value and the tie-break position packed into one int64 key."""
    m = len(tails)
    order = np.argsort(heads, kind="stable")
    t_s = tails[order]
    h_s = heads[order]
    c_s = costs[order]
    pos_s = order.astype(np.int64)
    bounds = np.searchsorted(h_s, np.arange(n + 1))
    starts = bounds[:-1]
    nonempty = bounds[1:] > bounds[:-1]
    scale = np.int64(max(m, 1))
    keys = np.empty(m + 1, dtype=np.int64)
    keys[m] = _INF * scale  # sentinel keeps reduceat in bounds

    dist = np.empty((n + 1, n), dtype=np.int64)
    dist[0] = 0
    preds = np.full((n, n), -1, dtype=np.int64)
    level = dist[0]
    for k in range(1, n + 1):
        # one level of drift above _INF cannot reach any real value
        vals = level[t_s] + c_s
        np.multiply(vals, scale, out=keys[:m])
        keys[:m] += pos_s
        segmin = np.minimum.reduceat(keys, starts)
        new_vals = segmin // scale
        good = nonempty & (new_vals < _INF // 2)
        cur = np.full(n, _INF, dtype=np.int64)
        pred = np.full(n, -1, dtype=np.int64)
        cur[good] = new_vals[good]
        pred[good] = (segmin % scale)[good]
        dist[k] = cur
        preds[k - 1] = pred
        level = cur
    return dist, preds


def _formula_numpy(dist, n):
    end = dist[n]
    reachable = end < _INF // 2
    worst_num = np.zeros(n, dtype=np.int64)
    worst_den = np.ones(n, dtype=np.int64)
    has = np.zeros(n, dtype=bool)
    for k in range(n):
        num = end - dist[k]
        den = n - k
        valid = reachable & (dist[k] < _INF // 2)
        better = valid & (~has | (num * worst_den > worst_num * den))
        worst_num = np.where(better, num, worst_num)
        worst_den = np.where(better, den, worst_den)
        has |= better
    best: tuple[Fraction, int] | None = None
    for v in range(n):
        if not has[v]:
            continue
        cand = Fraction(int(worst_num[v]), int(worst_den[v]))
        if best is None or cand < best[0]:
            best = (cand, v)
    return best


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _dp_numba(n, tails, heads, costs):  # pragma: no cover - jitted
        INF = np.int64(1) << np.int64(40)
        dist = np.empty((n + 1, n), dtype=np.int64)
        preds = np.full((n, n), -1, dtype=np.int64)
        for v in range(n):
            dist[0, v] = 0
        m = tails.shape[0]
        for k in range(1, n + 1):
            for v in range(n):
                dist[k, v] = INF
            for pos in range(m):
                base = dist[k - 1, tails[pos]]
                if base >= INF:
                    continue
                val = base + costs[pos]
                h = heads[pos]
                if val < dist[k, h]:
                    dist[k, h] = val
                    preds[k - 1, h] = pos
        return dist, preds

    @numba.njit(cache=True)
    def _formula_numba(dist, n):  # pragma: no cover - jitted
        INF = np.int64(1) << np.int64(40)
        best_num = np.int64(0)
        best_den = np.int64(1)
        best_v = -1
        for v in range(n):
            if dist[n, v] >= INF:
                continue
            w_num = np.int64(0)
            w_den = np.int64(1)
            has = False
            for k in range(n):
                if dist[k, v] >= INF:
                    continue
                num = dist[n, v] - dist[k, v]
                den = np.int64(n - k)
                if not has or num * w_den > w_num * den:
                    w_num = num
                    w_den = den
                    has = True
            if not has:
                continue
            if best_v < 0 or w_num * best_den < best_num * w_den:
                best_num = w_num
                best_den = w_den
                best_v = v
        return best_num, best_den, best_v


def _extract_matching_cycle(n, preds, tails, heads, costs, vstar, mean):
    """Scan the n-arc walk ending at ``vstar`` for a simple cycle with the
    given mean.  Repeated-vertex cycles with a larger mean are cut out of
    the walk and the scan continues; the walk is guaranteed to contain a
    matching cycle."""
    walk: list[int] = []
    v = vstar
    for k in range(n, 0, -1):
        pos = int(preds[k - 1][v])
        if pos < 0:
            raise InternalInvariantError("broken predecessor chain in walk table")
        walk.append(pos)
        v = int(tails[pos])
    walk.reverse()

    stack_nodes = [v]
    stack_arcs: list[int] = []
    at = {v: 0}
    for pos in walk:
        h = int(heads[pos])
        if h in at:
            i = at[h]
            cyc = stack_arcs[i:] + [pos]
            total = 0
            for q in cyc:
                total += int(costs[q])
            if Fraction(total, len(cyc)) == mean:
                return cyc
            for dead in stack_nodes[i + 1:]:
                del at[dead]
            del stack_nodes[i + 1:]
            del stack_arcs[i:]
        else:
            stack_arcs.append(pos)
            stack_nodes.append(h)
            at[h] = len(stack_nodes) - 1
    raise InternalInvariantError("minimum-mean walk contained no cycle attaining the minimum")


def _karp_kernel(n, tails, heads, costs):
    """Minimum cycle mean and a matching cycle for one strongly connected
    component given as integer arc arrays.  Returns (mean, positions)."""
    m = len(tails)
    max_cost = max(abs(int(c)) for c in costs) if m else 0
    if _use_python_tables(n, m, max_cost):
        dist, preds = _dp_python(
            n,
            [int(t) for t in tails],
            [int(h) for h in heads],
            [int(c) for c in costs],
        )
        best = _formula_python(dist, n)
    elif _HAVE_NUMBA:
        dist, preds = _dp_numba(
            n,
            np.ascontiguousarray(tails, dtype=np.int64),
            np.ascontiguousarray(heads, dtype=np.int64),
            np.ascontiguousarray(costs, dtype=np.int64),
        )
        num, den, vstar = _formula_numba(dist, n)
        best = (Fraction(int(num), int(den)), int(vstar)) if vstar >= 0 else None
    else:
        dist, preds = _dp_numpy(
            n,
            np.asarray(tails, dtype=np.int64),
            np.asarray(heads, dtype=np.int64),
            np.asarray(costs, dtype=np.int64),
        )
        best = _formula_numpy(dist, n)
    if best is None:
        raise InternalInvariantError("no finite walk in a strongly connected component")
    mean, vstar = best
    positions = _extract_matching_cycle(n, preds, tails, heads, costs, vstar, mean)
    return mean, positions


def _scc_sorted(n: int, tails, heads) -> list[list[int]]:
    """Strongly connected components over integer node ids, iterative
    Tarjan on a CSR adjacency; members sorted, components ordered by their
    smallest member."""
    m = len(tails)
    if m:
        t = np.asarray(tails, dtype=np.int64)
        h = np.asarray(heads, dtype=np.int64)
        order = np.argsort(t, kind="stable")
        targets = h[order].tolist()
        indptr = np.searchsorted(t[order], np.arange(n + 1)).tolist()
    else:
        targets = []
        indptr = [0] * (n + 1)

    index = [-1] * n
    low = [0] * n
    onstack = bytearray(n)
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    dfs_node: list[int] = []
    dfs_edge: list[int] = []
    for root in range(n):
        if index[root] >= 0:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = 1
        dfs_node.append(root)
        dfs_edge.append(indptr[root])
        while dfs_node:
            v = dfs_node[-1]
            e = dfs_edge[-1]
            if e < indptr[v + 1]:
                dfs_edge[-1] = e + 1
                w = targets[e]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = 1
                    dfs_node.append(w)
                    dfs_edge.append(indptr[w])
                elif onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                dfs_node.pop()
                dfs_edge.pop()
                if dfs_node:
                    p = dfs_node[-1]
                    if low[v] < low[p]:
                        low[p] = low[v]
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        onstack[w] = 0
                        comp.append(w)
                        if w == v:
                            break
                    comp.sort()
                    comps.append(comp)
    comps.sort(key=lambda c: c[0])
    return comps


def _min_mean_arrays(n, tails, heads, costs):
    """Global minimum-mean cycle over integer arc arrays: SCC decomposition
    plus the walk-length kernel per multi-node component.  Returns
    (mean, arc positions) or None; ties go to the component with the
    smallest member."""
    comps = _scc_sorted(n, tails, heads)
    comp_of = [0] * n
    for label, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = label
    best_mean = None
    best_positions = None
    for label, comp in enumerate(comps):
        if len(comp) < 2:
            continue
        sel = [
            pos
            for pos in range(len(tails))
            if comp_of[int(tails[pos])] == label and comp_of[int(heads[pos])] == label
        ]
        if not sel:
            continue
        rank = {v: i for i, v in enumerate(comp)}
        local_tails = [rank[int(tails[pos])] for pos in sel]
        local_heads = [rank[int(heads[pos])] for pos in sel]
        local_costs = [int(costs[pos]) for pos in sel]
        mean, positions = _karp_kernel(len(comp), local_tails, local_heads, local_costs)
        if best_mean is None or mean < best_mean:
            best_mean = mean
            best_positions = [sel[p] for p in positions]
    if best_mean is None:
        return None
    return best_mean, best_positions


# -- public minimum-mean operations ---------------------------------------------


def karp_min_mean_cycle(component: ResidualGraph) -> MeanCycleResult | None:
    """Minimum-mean directed cycle of one strongly connected component.

    Returns None for a single node without arcs.  Ties are broken
    deterministically: the smallest vertex id attaining the minimum in the
    mean formula, then the earliest matching cycle on its walk.
    """
    nodes = tuple(sorted(component.nodes))
    arcs = component.arcs
    if not arcs:
        if len(nodes) <= 1:
            return None
        raise ParameterError("component is not strongly connected (no arcs)")
    idx = {p: i for i, p in enumerate(nodes)}
    succ: dict[str, list[str]] = {p: [] for p in nodes}
    for a in arcs:
        if a.tail not in idx or a.head not in idx:
            raise ParameterError(f"arc {a.tail}->{a.head} leaves the component")
        succ[a.tail].append(a.head)
    if len(tarjan_components(nodes, succ)) != 1:
        raise ParameterError("component is not strongly connected")

    tails = [idx[a.tail] for a in arcs]
    heads = [idx[a.head] for a in arcs]
    costs = [a.cost for a in arcs]
    mean, positions = _karp_kernel(len(nodes), tails, heads, costs)
    return MeanCycleResult(mean=mean, cycle=tuple(arcs[p] for p in positions))


def min_mean_over_residual(res: ResidualGraph) -> MeanCycleResult | None:
    """Globally minimum-mean cycle across all SCCs of a residual graph.

    Cycles never span components, so the search runs per SCC and keeps the
    smallest mean; ties go to the component with the smallest member id.
    Returns None when no component contains a cycle.
    """
    idx = {p: i for i, p in enumerate(res.nodes)}
    tails = [idx[a.tail] for a in res.arcs]
    heads = [idx[a.head] for a in res.arcs]
    costs = [a.cost for a in res.arcs]
    found = _min_mean_arrays(len(res.nodes), tails, heads, costs)
    if found is None:
        return None
    mean, positions = found
    return MeanCycleResult(mean=mean, cycle=tuple(res.arcs[p] for p in positions))


# -- canceling ---------------------------------------------------------------


def cancel_cycle(
    net: Network, flow: FlowAssignment, cycle: Sequence[ResidualArc]
) -> tuple[FlowAssignment, int]:
    """Augment ``flow`` along a residual cycle by its bottleneck.

    Forward arcs gain the bottleneck, reverse arcs give it back.  The
    cycle must still describe the current residual graph; if any stored
    residual disagrees with the one recomputed from ``flow`` the cycle is
    stale and an internal error is raised.
    """
    cyc = list(cycle)
    if not cyc:
        raise InternalInvariantError("cannot cancel an empty cycle")
    for a, b in zip(cyc, cyc[1:]):
        if a.head != b.tail:
            raise InternalInvariantError("cycle arcs are not consecutive")
    if cyc[-1].head != cyc[0].tail:
        raise InternalInvariantError("cycle is not closed")
    tails = [a.tail for a in cyc]
    if len(set(tails)) != len(tails):
        raise InternalInvariantError("cycle revisits a vertex")
    obs = net.obligations
    for a in cyc:
        current = obs[a.origin].amount - flow[a.origin] if a.forward else flow[a.origin]
        if current != a.residual or current <= 0:
            raise InternalInvariantError("stale cycle: residuals changed since it was found")
    tau = min(a.residual for a in cyc)
    units = dict(flow.items())
    for a in cyc:
        units[a.origin] = units.get(a.origin, 0) + (tau if a.forward else -tau)
    return FlowAssignment(units), tau


class _ForwardCycleFinder:
    """Deterministic DFS for cycles of unsaturated arcs.

    Nodes proven cycle-free stay marked across calls: canceling a forward
    cycle only saturates arcs, and removing arcs never creates cycles, so
    the marks remain valid until a mixed cancellation reopens capacity
    (``reset`` drops them then).
    """

    def __init__(self, n: int, out_arcs: list[list[int]], heads: list[int], amounts: list[int]):
        self._n = n
        self._out = out_arcs
        self._heads = heads
        self._amounts = amounts
        self._done = bytearray(n)

    def reset(self) -> None:
        self._done = bytearray(self._n)

    def find(self, units: list[int]) -> list[int] | None:
        done = self._done
        heads = self._heads
        amounts = self._amounts
        out = self._out
        for root in range(self._n):
            if done[root]:
                continue
            gray = {root: 0}
            stack = [(root, iter(out[root]))]
            path_arcs: list[int] = []
            while stack:
                node, it = stack[-1]
                advanced = False
                for a in it:
                    if units[a] >= amounts[a]:
                        continue
                    head = heads[a]
                    if done[head]:
                        continue
                    depth = gray.get(head)
                    if depth is not None:
                        return path_arcs[depth:] + [a]
                    gray[head] = len(stack)
                    path_arcs.append(a)
                    stack.append((head, iter(out[head])))
                    advanced = True
                    break
                if not advanced:
                    done[node] = 1
                    del gray[node]
                    stack.pop()
                    if stack:
                        path_arcs.pop()
        return None


def max_volume_circulation(net: Network) -> tuple[FlowAssignment, MaxVolStats]:
    """Maximum-volume feasible circulation of ``net``.

    Starts from zero and cancels a global minimum-mean residual cycle per
    iteration until the minimum mean is non-negative (or no cycle exists
    at all).  While unsaturated forward arcs still close a cycle, any such
    cycle has the lowest possible mean of exactly -1 and is taken via the
    cheap DFS; afterwards the table-based search drives the mixed phase.
    All arithmetic is exact and the whole run is deterministic.

    Acyclic networks are legal and yield the zero circulation.
    """
    obs = net.obligations
    participants = net.participants
    n = len(participants)
    m = len(obs)
    # Loose theoretical bound on cancellations; exceeding it means a bug.
    cap = 4 * n * m * m * math.ceil(math.log(n)) + 1 if n >= 2 else 1
    pidx = {p: i for i, p in enumerate(participants)}
    deb = [pidx[ob.debtor] for ob in obs]
    cred = [pidx[ob.creditor] for ob in obs]
    amounts = [ob.amount for ob in obs]
    out_arcs = [list(net.out_arcs(p)) for p in participants]
    deb_np = np.asarray(deb, dtype=np.int64) if m else np.empty(0, dtype=np.int64)
    cred_np = np.asarray(cred, dtype=np.int64) if m else np.empty(0, dtype=np.int64)
    amounts_np = np.asarray(amounts, dtype=np.int64) if m else np.empty(0, dtype=np.int64)

    units = [0] * m
    finder = _ForwardCycleFinder(n, out_arcs, cred, amounts)
    canceled: list[CanceledCycle] = []
    final_mean: Fraction | None = None

    while True:
        cyc = finder.find(units)
        if cyc is not None:
            tau = min(amounts[a] - units[a] for a in cyc)
            for a in cyc:
                units[a] += tau
            nodes = tuple(sorted(participants[deb[a]] for a in cyc))
            canceled.append(CanceledCycle(nodes, tau, Fraction(-1)))
        else:
            units_np = np.asarray(units, dtype=np.int64) if m else np.empty(0, dtype=np.int64)
            fsel = np.nonzero(units_np < amounts_np)[0]
            rsel = np.nonzero(units_np > 0)[0]
            tails = np.concatenate([deb_np[fsel], cred_np[rsel]])
            heads = np.concatenate([cred_np[fsel], deb_np[rsel]])
            costs = np.concatenate(
                [np.full(len(fsel), -1, dtype=np.int64), np.ones(len(rsel), dtype=np.int64)]
            )
            found = _min_mean_arrays(n, tails, heads, costs)
            if found is None:
                break
            mean, positions = found
            if mean >= 0:
                final_mean = mean
                break
            split = len(fsel)
            cycle_arcs = [
                (int(fsel[p]), True) if p < split else (int(rsel[p - split]), False)
                for p in positions
            ]
            forward_count = sum(1 for _, fwd in cycle_arcs if fwd)
            if 2 * forward_count <= len(cycle_arcs):
                raise InternalInvariantError("negative cycle without net forward arcs")
            tau = min(
                amounts[origin] - units[origin] if fwd else units[origin]
                for origin, fwd in cycle_arcs
            )
            if tau < 1:
                raise InternalInvariantError("empty residual arc on a canceled cycle")
            for origin, fwd in cycle_arcs:
                units[origin] += tau if fwd else -tau
            finder.reset()  # reverse pushes reopen forward capacity
            nodes = tuple(sorted(participants[int(tails[p])] for p in positions))
            canceled.append(CanceledCycle(nodes, tau, mean))
        if len(canceled) > cap:
            raise InternalInvariantError(
                f"cycle canceling exceeded the safety cap of {cap} iterations"
            )
    flow = FlowAssignment({i: u for i, u in enumerate(units) if u})
    return flow, MaxVolStats(
        cancellations=len(canceled),
        final_mean=final_mean,
        canceled=tuple(canceled),
    )


def compress_max_volume(net: Network) -> tuple[Network, CompressionReport]:
    """Optimal conservative compression plus its full report.

    The compressed network keeps zero-amount arcs in memory (stable
    indices) and must contain no directed cycle among its positive arcs,
    otherwise the circulation was not maximal.
    """
    flow, stats = max_volume_circulation(net)
    compressed, report = build_report(
        net,
        flow,
        algorithm="maxvol",
        iterations=stats.cancellations,
        final_mean=stats.final_mean,
    )
    if compressed.contains_directed_cycle():
        raise InternalInvariantError("compressed network still contains a clearable cycle")
    return compressed, report
