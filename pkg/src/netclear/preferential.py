"""Preference-driven cycle clearing.

Each dealer ranks the obligations it wants settled first.  A clearing
round builds the functional graph formed by every live participant's
top-ranked arc (out-degree at most one per node in ``out`` mode, in-degree
at most one in ``in`` mode), clears each of its vertex-disjoint cycles by
the cycle's bottleneck, retires arcs whose cumulative cleared flow reached
the finish threshold, and then strips nodes that can no longer sit on a
cycle.  Rounds repeat until nobody is left.

The finish threshold is a rational ``epsilon`` in (0, 1]: an arc counts as
finished once its cleared flow is at least ``epsilon`` times its original
amount.  With ``epsilon = 1`` an arc finishes exactly when it empties.
Thresholds are compared with exact rational arithmetic; no floats enter
any decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InternalInvariantError, ParameterError, ValidationError
from .network import FlowAssignment, Network, is_feasible

__all__ = [
    "PreferenceProfile",
    "ClearingState",
    "IterationRecord",
    "ClearingTrace",
    "most_preferred_neighbours_graph",
    "find_functional_cycles",
    "clear_cycles",
    "node_removal_fixpoint",
    "preferential_compress",
]

MODES = ("out", "in")


def _as_epsilon(value: object) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise ParameterError(f"epsilon must be an integer or Fraction, got {value!r}")
    eps = Fraction(value)
    if not (0 < eps <= 1):
        raise ParameterError(f"epsilon must lie in (0, 1], got {eps}")
    return eps


@dataclass(frozen=True)
class PreferenceProfile:
    """Per-participant ranked arcs, most preferred first.

    In ``out`` mode every listed arc leaves its owner (the owner ranks the
    obligations it has to pay); in ``in`` mode every listed arc enters its
    owner (the owner ranks the obligations owed to it).  Arcs are referred
    to by their index in the network's canonical obligation order.
    """

    mode: str = "out"
    lists: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def owner_of(self, net: Network, arc: int) -> str:
        ob = net.obligations[arc]
        return ob.debtor if self.mode == "out" else ob.creditor

    def validate(self, net: Network) -> None:
        if self.mode not in MODES:
            raise ValidationError(f"preference mode must be one of {MODES}, got {self.mode!r}")
        limit = len(net.obligations)
        for owner, arcs in self.lists.items():
            if owner not in net.participants:
                raise ValidationError(f"preference list owner {owner!r} is not a participant")
            seen: set[int] = set()
            for arc in arcs:
                if isinstance(arc, bool) or not isinstance(arc, int) or not 0 <= arc < limit:
                    raise ValidationError(
                        f"preference list of {owner} references unknown arc {arc!r}"
                    )
                if arc in seen:
                    ob = net.obligations[arc]
                    raise ValidationError(
                        f"arc {ob.debtor}->{ob.creditor} listed twice by {owner}"
                    )
                seen.add(arc)
                if self.owner_of(net, arc) != owner:
                    ob = net.obligations[arc]
                    side = "leave" if self.mode == "out" else "enter"
                    raise ValidationError(
                        f"arc {ob.debtor}->{ob.creditor} does not {side} its owner {owner}"
                    )


@dataclass
class ClearingState:
    """Mutable working state of one clearing run (single-threaded).

    ``cleared`` accumulates the flow assignment; the residual of an arc is
    its original amount minus the cleared flow and stays non-negative.
    Removed arcs and nodes never come back.
    """

    net: Network
    mode: str
    live_nodes: set[str]
    live_arcs: set[int]
    lists: dict[str, list[int]]
    cleared: dict[int, int]
    live_in: dict[str, int]
    live_out: dict[str, int]

    @classmethod
    def initial(cls, net: Network, prefs: PreferenceProfile) -> "ClearingState":
        """Starting state: dealers only, and the union of their listed arcs.

        Arcs with a customer endpoint or an already-zero amount can never
        sit on a clearing cycle, so they are dropped from the live lists
        up front.
        """
        prefs.validate(net)
        roles = net.classify_participants()
        dealers = {p for p, role in roles.items() if role == "dealer"}
        obs = net.obligations
        lists: dict[str, list[int]] = {}
        live_arcs: set[int] = set()
        for owner in sorted(prefs.lists):
            if owner not in dealers:
                continue
            kept = [
                a
                for a in prefs.lists[owner]
                if obs[a].amount > 0
                and obs[a].debtor in dealers
                and obs[a].creditor in dealers
            ]
            if kept:
                lists[owner] = kept
                live_arcs.update(kept)
        live_in = {p: 0 for p in dealers}
        live_out = {p: 0 for p in dealers}
        for a in live_arcs:
            live_out[obs[a].debtor] += 1
            live_in[obs[a].creditor] += 1
        return cls(
            net=net,
            mode=prefs.mode,
            live_nodes=set(dealers),
            live_arcs=live_arcs,
            lists=lists,
            cleared={},
            live_in=live_in,
            live_out=live_out,
        )

    def residual(self, arc: int) -> int:
        return self.net.obligations[arc].amount - self.cleared.get(arc, 0)

    def _owner(self, arc: int) -> str:
        ob = self.net.obligations[arc]
        return ob.debtor if self.mode == "out" else ob.creditor

    def _drop_arc(self, arc: int) -> None:
        if arc not in self.live_arcs:
            return
        self.live_arcs.discard(arc)
        ob = self.net.obligations[arc]
        self.live_out[ob.debtor] -= 1
        self.live_in[ob.creditor] -= 1
        owner = self._owner(arc)
        owner_list = self.lists.get(owner)
        if owner_list and arc in owner_list:
            owner_list.remove(arc)
            if not owner_list:
                del self.lists[owner]

    def _drop_node(self, node: str) -> None:
        for arc in list(self.net.out_arcs(node)) + list(self.net.in_arcs(node)):
            self._drop_arc(arc)
        self.live_nodes.discard(node)
        self.lists.pop(node, None)


@dataclass(frozen=True)
class IterationRecord:
    """What one clearing round did, for the trace."""

    index: int
    functional_arcs: tuple[int, ...]
    cycles: tuple[tuple[tuple[int, ...], int], ...]  # (arc cycle, bottleneck)
    finished: tuple[int, ...]
    removed: tuple[str, ...]


@dataclass(frozen=True)
class ClearingTrace:
    """Full run record: iterations are numbered consecutively from 0.

    ``initial_removed`` lists nodes stripped before the first round (nodes
    that could never clear: empty lists or one-sided arcs).  ``stuck`` is
    set if a round found no cycle and removed nothing, which forces
    termination; it cannot happen for well-formed inputs but is flagged
    rather than looping.
    """

    initial_removed: tuple[str, ...]
    iterations: tuple[IterationRecord, ...]
    stuck: bool


def most_preferred_neighbours_graph(state: ClearingState) -> dict[str, int]:
    """Each live participant's current top arc, for non-empty lists.

    The result is a functional graph: in ``out`` mode every node has
    out-degree at most one, in ``in`` mode in-degree at most one.
    """
    return {
        node: state.lists[node][0]
        for node in sorted(state.live_nodes)
        if state.lists.get(node)
    }


def find_functional_cycles(
    state: ClearingState, top_arcs: Mapping[str, int]
) -> tuple[tuple[int, ...], ...]:
    """All directed cycles of the functional graph.

    Walks successor pointers with visit marks; the cycles of a functional
    graph are automatically vertex- and arc-disjoint.  Cycles come out
    sorted by their smallest member, each rotated to start there, with the
    arcs in travel order.
    """
    obs = state.net.obligations
    succ: dict[str, str] = {}
    for node, arc in top_arcs.items():
        if node not in state.live_nodes or arc not in state.live_arcs:
            raise InternalInvariantError(f"functional graph references dead node/arc {node}/{arc}")
        ob = obs[arc]
        owner = ob.debtor if state.mode == "out" else ob.creditor
        if owner != node:
            raise InternalInvariantError(
                f"degree bound violated: arc {ob.debtor}->{ob.creditor} not owned by {node}"
            )
        succ[node] = ob.creditor if state.mode == "out" else ob.debtor

    done: set[str] = set()
    cycles: list[tuple[int, ...]] = []
    for root in sorted(succ):
        if root in done:
            continue
        path: list[str] = []
        position: dict[str, int] = {}
        node = root
        while True:
            if node in position:
                cycle_nodes = path[position[node]:]
                arcs = [top_arcs[v] for v in cycle_nodes]
                if state.mode == "in":
                    arcs.reverse()
                cycles.append(_rotate_arcs(arcs, obs))
                break
            if node in done or node not in succ:
                break
            position[node] = len(path)
            path.append(node)
            node = succ[node]
        done.update(path)
    cycles.sort(key=lambda arcs: obs[arcs[0]].debtor)
    return tuple(cycles)


def _rotate_arcs(arcs: Sequence[int], obs) -> tuple[int, ...]:
    tails = [obs[a].debtor for a in arcs]
    pivot = tails.index(min(tails))
    return tuple(arcs[pivot:]) + tuple(arcs[:pivot])


def clear_cycles(
    state: ClearingState,
    cycles: Sequence[Sequence[int]],
    epsilon: Fraction | int,
    per_arc_epsilon: Mapping[int, Fraction] | None = None,
) -> tuple[tuple[tuple[tuple[int, ...], int], ...], tuple[int, ...]]:
    """Clear each cycle by its bottleneck and retire finished arcs.

    For every cycle the bottleneck ``tau`` is the minimum residual on its
    arcs; ``tau`` is added to the cleared flow of each arc.  An arc is
    finished, removed from the graph and from every live preference list,
    once its cumulative cleared flow reaches ``epsilon`` (or its per-arc
    override) times its original amount.  The bottleneck arc of each cycle
    always finishes.  An empty cycle set is a no-op, not an error.

    Returns ``(cleared, finished)`` where ``cleared`` pairs each cycle with
    its ``tau`` and ``finished`` lists the retired arc indices.
    """
    eps = _as_epsilon(epsilon)
    over = dict(per_arc_epsilon or {})
    for arc, value in over.items():
        over[arc] = _as_epsilon(value)
    obs = state.net.obligations
    seen: set[int] = set()
    for cycle in cycles:
        for arc in cycle:
            if arc in seen:
                raise InternalInvariantError(f"arc {arc} appears in two cycles")
            seen.add(arc)
            if arc not in state.live_arcs or state.residual(arc) <= 0:
                raise InternalInvariantError(f"cycle uses dead or empty arc {arc}")

    cleared: list[tuple[tuple[int, ...], int]] = []
    finished: list[int] = []
    for cycle in cycles:
        tau = min(state.residual(a) for a in cycle)
        for a in cycle:
            state.cleared[a] = state.cleared.get(a, 0) + tau
        cycle_finished = 0
        for a in cycle:
            threshold = over.get(a, eps) * obs[a].amount
            if state.cleared[a] >= threshold:
                state._drop_arc(a)
                finished.append(a)
                cycle_finished += 1
        if not cycle_finished:
            raise InternalInvariantError("cycle cleared without finishing its bottleneck")
        cleared.append((tuple(cycle), tau))
    return tuple(cleared), tuple(finished)


def node_removal_fixpoint(state: ClearingState) -> tuple[str, ...]:
    """Strip nodes that can no longer lie on a cycle, to a fixed point.

    A live node qualifies when its live incident arcs are all incoming,
    all outgoing, or absent, or when its preference list is empty (such a
    node contributes no arc to any future functional graph).  Qualifying
    nodes are removed together with their incident arcs, which are also
    purged from the owners' preference lists; removal repeats until no
    node qualifies.  The qualifying condition is monotone under arc
    removal, so the result does not depend on sweep order.
    """
    removed: list[str] = []
    changed = True
    while changed:
        changed = False
        for node in sorted(state.live_nodes):
            if (
                state.live_in.get(node, 0) == 0
                or state.live_out.get(node, 0) == 0
                or not state.lists.get(node)
            ):
                state._drop_node(node)
                removed.append(node)
                changed = True
    return tuple(removed)


def preferential_compress(
    net: Network,
    prefs: PreferenceProfile,
    epsilon: Fraction | int = 1,
    per_arc_epsilon: Mapping[int, Fraction] | None = None,
) -> tuple[FlowAssignment, ClearingTrace]:
    """Run the full preference-driven clearing and return flow plus trace.

    Only dealers take part; the live arcs are the arcs appearing in the
    preference lists whose endpoints are both dealers.  Rounds of
    {functional graph, cycle clearing, node removal} repeat until nobody
    is live.  The node-removal fixpoint also runs once before the first
    round so every round starts with all live lists non-empty, which
    guarantees a cycle per round and hence at most one round per arc.

    The returned assignment is always a feasible circulation of ``net``.
    """
    eps = _as_epsilon(epsilon)
    if per_arc_epsilon:
        limit = len(net.obligations)
        for arc in per_arc_epsilon:
            if isinstance(arc, bool) or not isinstance(arc, int) or not 0 <= arc < limit:
                raise ValidationError(f"per-arc epsilon references unknown arc {arc!r}")
    state = ClearingState.initial(net, prefs)
    initial_removed = node_removal_fixpoint(state)

    iterations: list[IterationRecord] = []
    stuck = False
    while state.live_nodes:
        if len(iterations) > len(net.obligations):
            raise InternalInvariantError("clearing did not terminate within |A| iterations")
        top = most_preferred_neighbours_graph(state)
        cycles = find_functional_cycles(state, top)
        cleared, finished = clear_cycles(state, cycles, eps, per_arc_epsilon)
        removed = node_removal_fixpoint(state)
        iterations.append(
            IterationRecord(
                index=len(iterations),
                functional_arcs=tuple(sorted(top.values())),
                cycles=cleared,
                finished=finished,
                removed=removed,
            )
        )
        if not cycles and not removed:
            stuck = True
            break

    flow = FlowAssignment(state.cleared)
    if not is_feasible(net, flow).ok:
        raise InternalInvariantError("clearing produced an infeasible assignment")
    return flow, ClearingTrace(
        initial_removed=initial_removed,
        iterations=tuple(iterations),
        stuck=stuck,
    )
