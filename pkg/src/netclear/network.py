"""Obligation networks: data model, position accounting, structure checks.

A network is a simple directed graph.  Participants are vertices; an arc
``debtor -> creditor`` carries a non-negative integer amount of notional
units.  Amounts must be strictly positive when a network is ingested from
outside; zero amounts appear only on networks produced by
:func:`apply_compression`, which keeps emptied arcs so that arc indices
stay stable.

Networks and flow assignments are immutable after construction.  All
operations in this module are pure functions of their inputs and safe to
call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    InternalInvariantError,
    UnknownArcError,
    UnknownParticipantError,
    ValidationError,
)

__all__ = [
    "Obligation",
    "Network",
    "PositionSummary",
    "FlowAssignment",
    "CirculationCheck",
    "is_circulation",
    "is_feasible",
    "decompose_circulation",
    "apply_compression",
    "tarjan_components",
]

# Characters that would collide with the CSV formats' separators.
_FORBIDDEN_IN_IDS = (",", "\n", "\r")


def _validate_participant_id(pid: object) -> None:
    if not isinstance(pid, str) or not pid:
        raise ValidationError(f"participant id must be a non-empty string, got {pid!r}")
    if pid.startswith("#") or any(ch in pid for ch in _FORBIDDEN_IN_IDS):
        raise ValidationError(
            f"participant id {pid!r} clashes with file-format separators"
        )


def _validate_amount(amount: object, *, positive: bool) -> None:
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise ValidationError(
            f"amounts must be integers, got {amount!r}; rescale rational "
            "amounts to integer units first (multiply every amount by the "
            "least common multiple of the denominators)"
        )
    if amount < 0 or (positive and amount == 0):
        bound = "positive" if positive else "non-negative"
        raise ValidationError(f"amounts must be {bound}, got {amount}")


@dataclass(frozen=True)
class Obligation:
    """One obligation: ``debtor`` owes ``creditor`` ``amount`` units."""

    debtor: str
    creditor: str
    amount: int


@dataclass(frozen=True)
class PositionSummary:
    """Gross/net/excess of a single participant."""

    participant: str
    gross: int
    net: int
    excess: int


class Network:
    """An immutable obligation network.

    Obligations are stored in canonical order (sorted by debtor id, then
    creditor id) so that arc indices and iteration order are deterministic.
    Participant ids given in ``participants`` beyond the arc endpoints are
    kept as isolated vertices.
    """

    __slots__ = ("_participants", "_obligations", "_index", "_out", "_in")

    def __init__(
        self,
        obligations: Iterable[Obligation] = (),
        participants: Iterable[str] = (),
    ):
        obs = list(obligations)
        ids = set(participants)
        for ob in obs:
            ids.add(ob.debtor)
            ids.add(ob.creditor)
        for pid in ids:
            _validate_participant_id(pid)
        seen: set[tuple[str, str]] = set()
        for ob in obs:
            if ob.debtor == ob.creditor:
                raise ValidationError(f"self-loop {ob.debtor}->{ob.creditor} not allowed")
            _validate_amount(ob.amount, positive=False)
            key = (ob.debtor, ob.creditor)
            if key in seen:
                raise ValidationError(
                    f"duplicate obligation {ob.debtor}->{ob.creditor}; merge amounts first"
                )
            seen.add(key)
        ordered = sorted(obs, key=lambda ob: (ob.debtor, ob.creditor))
        self._participants: tuple[str, ...] = tuple(sorted(ids))
        self._obligations: tuple[Obligation, ...] = tuple(ordered)
        self._index = {(ob.debtor, ob.creditor): i for i, ob in enumerate(ordered)}
        out: dict[str, list[int]] = {p: [] for p in self._participants}
        inc: dict[str, list[int]] = {p: [] for p in self._participants}
        for i, ob in enumerate(ordered):
            out[ob.debtor].append(i)
            inc[ob.creditor].append(i)
        self._out = {p: tuple(v) for p, v in out.items()}
        self._in = {p: tuple(v) for p, v in inc.items()}

    @classmethod
    def ingest(
        cls,
        obligations: Iterable[Obligation],
        participants: Iterable[str] = (),
    ) -> "Network":
        """Build a network from external data; amounts must be positive."""
        obs = list(obligations)
        for ob in obs:
            _validate_amount(ob.amount, positive=True)
        return cls(obs, participants)

    # -- basic accessors ---------------------------------------------------

    @property
    def participants(self) -> tuple[str, ...]:
        return self._participants

    @property
    def obligations(self) -> tuple[Obligation, ...]:
        return self._obligations

    def __len__(self) -> int:
        return len(self._obligations)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self._participants == other._participants
            and self._obligations == other._obligations
        )

    def __hash__(self) -> int:
        return hash((self._participants, self._obligations))

    def __repr__(self) -> str:
        return (
            f"Network({len(self._participants)} participants, "
            f"{len(self._obligations)} obligations)"
        )

    def _require(self, pid: str) -> None:
        if pid not in self._out:
            raise UnknownParticipantError(f"unknown participant {pid!r}")

    def arc_index(self, debtor: str, creditor: str) -> int:
        """Index of the arc debtor->creditor, or UnknownArcError."""
        try:
            return self._index[(debtor, creditor)]
        except KeyError:
            raise UnknownArcError(f"no obligation {debtor}->{creditor}") from None

    def has_arc(self, debtor: str, creditor: str) -> bool:
        return (debtor, creditor) in self._index

    def out_arcs(self, pid: str) -> tuple[int, ...]:
        self._require(pid)
        return self._out[pid]

    def in_arcs(self, pid: str) -> tuple[int, ...]:
        self._require(pid)
        return self._in[pid]

    # -- positions ---------------------------------------------------------

    def gross_position(self, pid: str) -> int:
        """Total amount on arcs incident to ``pid``, both directions."""
        self._require(pid)
        obs = self._obligations
        return sum(obs[i].amount for i in self._out[pid]) + sum(
            obs[i].amount for i in self._in[pid]
        )

    def net_position(self, pid: str) -> int:
        """Receivables minus payables: inflow minus outflow of ``pid``."""
        self._require(pid)
        obs = self._obligations
        return sum(obs[i].amount for i in self._in[pid]) - sum(
            obs[i].amount for i in self._out[pid]
        )

    def participant_excess(self, pid: str) -> int:
        """Gross minus absolute net: the notional eligible for compression."""
        return self.gross_position(pid) - abs(self.net_position(pid))

    def position_summary(self, pid: str) -> PositionSummary:
        gross = self.gross_position(pid)
        net = self.net_position(pid)
        return PositionSummary(pid, gross, net, gross - abs(net))

    def total_gross(self) -> int:
        """Sum of gross positions over all participants (2x the arc sum)."""
        return 2 * sum(ob.amount for ob in self._obligations)

    def total_excess(self) -> int:
        return sum(self.participant_excess(p) for p in self._participants)

    def classify_participants(self) -> dict[str, str]:
        """Map each participant to ``"dealer"`` or ``"customer"``.

        A dealer has at least one incoming and one outgoing obligation with
        positive amount; everyone else (including isolated participants) is
        a customer.
        """
        obs = self._obligations
        roles = {}
        for p in self._participants:
            has_out = any(obs[i].amount > 0 for i in self._out[p])
            has_in = any(obs[i].amount > 0 for i in self._in[p])
            roles[p] = "dealer" if (has_out and has_in) else "customer"
        return roles

    def scaled(self, factor: int) -> "Network":
        """Network with every amount multiplied by a positive integer.

        This is the rescaling that turns rational amounts into integer
        units: multiply by the least common multiple of the denominators,
        compress, then divide the results back.
        """
        if isinstance(factor, bool) or not isinstance(factor, int) or factor < 1:
            raise ValidationError(f"scale factor must be a positive integer, got {factor!r}")
        scaled = [
            Obligation(ob.debtor, ob.creditor, ob.amount * factor)
            for ob in self._obligations
        ]
        return Network(scaled, self._participants)

    # -- structure ---------------------------------------------------------

    def _positive_successors(self) -> dict[str, list[str]]:
        obs = self._obligations
        succ: dict[str, list[str]] = {p: [] for p in self._participants}
        for ob in obs:
            if ob.amount > 0:
                succ[ob.debtor].append(ob.creditor)
        return succ

    def contains_directed_cycle(self) -> bool:
        """True iff the arcs with positive amount contain a directed cycle.

        Iterative DFS with the usual three-colour marking; O(|V| + |A|).
        """
        succ = self._positive_successors()
        state: dict[str, int] = {}  # 1 = on stack, 2 = finished
        for root in self._participants:
            if root in state:
                continue
            stack: list[tuple[str, Iterator[str]]] = [(root, iter(succ[root]))]
            state[root] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    mark = state.get(nxt)
                    if mark == 1:
                        return True
                    if mark is None:
                        state[nxt] = 1
                        stack.append((nxt, iter(succ[nxt])))
                        advanced = True
                        break
                if not advanced:
                    state[node] = 2
                    stack.pop()
        return False

    def strongly_connected_components(self) -> tuple[tuple[str, ...], ...]:
        """SCCs over arcs with positive amount, deterministically ordered:
        members sorted by id, components sorted by smallest member."""
        return tarjan_components(self._participants, self._positive_successors())


def tarjan_components(
    nodes: Sequence[str],
    successors: Mapping[str, Sequence[str]],
) -> tuple[tuple[str, ...], ...]:
    """Strongly connected components of an arbitrary digraph.

    Iterative Tarjan so deep graphs do not hit the recursion limit.  The
    output order is canonical: members sorted within each component,
    components sorted by their smallest member.
    """
    counter = count()
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    onstack: set[str] = set()
    stack: list[str] = []
    comps: list[tuple[str, ...]] = []

    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = next(counter)
        stack.append(root)
        onstack.add(root)
        work: list[tuple[str, Iterator[str]]] = [(root, iter(successors.get(root, ())))]
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = next(counter)
                    stack.append(nxt)
                    onstack.add(nxt)
                    work.append((nxt, iter(successors.get(nxt, ()))))
                    advanced = True
                    break
                if nxt in onstack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    onstack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                comps.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return tuple(sorted(comps, key=lambda c: c[0]))


class FlowAssignment:
    """Non-negative integer units per arc index; missing indices mean zero.

    Zero entries are dropped at construction, so two assignments describing
    the same flow always compare equal.
    """

    __slots__ = ("_units",)

    def __init__(self, units: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = units.items() if isinstance(units, Mapping) else units
        clean: dict[int, int] = {}
        for idx, value in items:
            if isinstance(idx, bool) or not isinstance(idx, int) or idx < 0:
                raise ValidationError(f"arc index must be a non-negative integer, got {idx!r}")
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f"flow on arc {idx} must be an integer, got {value!r}")
            if value < 0:
                raise ValidationError(f"flow on arc {idx} is negative ({value})")
            if idx in clean:
                raise ValidationError(f"arc index {idx} assigned twice")
            if value:
                clean[idx] = value
        self._units = dict(sorted(clean.items()))

    @classmethod
    def zero(cls) -> "FlowAssignment":
        return cls()

    def __getitem__(self, idx: int) -> int:
        return self._units.get(idx, 0)

    def items(self):
        """Positive entries, by ascending arc index."""
        return self._units.items()

    def __bool__(self) -> bool:
        return bool(self._units)

    @property
    def volume(self) -> int:
        """Sum of all assigned units: the quantity the optimizer maximizes."""
        return sum(self._units.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowAssignment):
            return NotImplemented
        return self._units == other._units

    def __hash__(self) -> int:
        return hash(tuple(self._units.items()))

    def __repr__(self) -> str:
        return f"FlowAssignment({self._units!r})"


@dataclass(frozen=True)
class CirculationCheck:
    """Outcome of a circulation/feasibility check.

    ``imbalances`` lists participants whose inflow does not equal outflow
    under the assignment, with the signed difference (inflow - outflow).
    ``capacity_violations`` lists arc indices where the flow exceeds the
    arc amount.
    """

    imbalances: tuple[tuple[str, int], ...] = ()
    capacity_violations: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.imbalances and not self.capacity_violations


def _check_arc_refs(net: Network, flow: FlowAssignment) -> None:
    limit = len(net.obligations)
    for idx, _ in flow.items():
        if idx >= limit:
            raise UnknownArcError(f"flow references arc index {idx}, network has {limit} arcs")


def is_circulation(net: Network, flow: FlowAssignment) -> CirculationCheck:
    """Check flow conservation: inflow equals outflow at every participant."""
    _check_arc_refs(net, flow)
    balance: dict[str, int] = {}
    obs = net.obligations
    for idx, value in flow.items():
        ob = obs[idx]
        balance[ob.creditor] = balance.get(ob.creditor, 0) + value
        balance[ob.debtor] = balance.get(ob.debtor, 0) - value
    imbalances = tuple(
        (pid, diff) for pid, diff in sorted(balance.items()) if diff != 0
    )
    return CirculationCheck(imbalances=imbalances)


def is_feasible(net: Network, flow: FlowAssignment) -> CirculationCheck:
    """Check conservation plus per-arc bounds 0 <= flow <= amount."""
    conservation = is_circulation(net, flow)
    obs = net.obligations
    violations = tuple(
        idx for idx, value in flow.items() if value > obs[idx].amount
    )
    return CirculationCheck(
        imbalances=conservation.imbalances,
        capacity_violations=violations,
    )


def _require_feasible(net: Network, flow: FlowAssignment) -> None:
    check = is_feasible(net, flow)
    if check.ok:
        return
    parts = []
    if check.imbalances:
        listing = ", ".join(f"{pid}:{diff:+d}" for pid, diff in check.imbalances)
        parts.append(f"not a circulation (imbalances {listing})")
    if check.capacity_violations:
        obs = net.obligations
        listing = ", ".join(
            f"{obs[i].debtor}->{obs[i].creditor} ({flow[i]} > {obs[i].amount})"
            for i in check.capacity_violations
        )
        parts.append(f"exceeds capacity on {listing}")
    raise ValidationError("; ".join(parts))


def decompose_circulation(
    net: Network, flow: FlowAssignment
) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Split a feasible circulation into simple directed cycles.

    Repeatedly walks arcs with positive remaining flow, starting from the
    smallest participant id with positive outflow and always taking the
    first positive arc in canonical order, subtracts the bottleneck of the
    cycle found, and records it.  Each extraction zeroes at least one arc,
    so at most one cycle per positive-flow arc is returned, and adding the
    cycles back reproduces the input exactly.
    """
    _require_feasible(net, flow)
    obs = net.obligations
    remaining = {idx: value for idx, value in flow.items()}
    cycles: list[tuple[tuple[int, ...], int]] = []
    while remaining:
        start = min(obs[idx].debtor for idx in remaining)
        path: list[int] = []
        seen_at = {start: 0}
        at = start
        while True:
            arc = next(
                (i for i in net.out_arcs(at) if remaining.get(i, 0) > 0), None
            )
            if arc is None:
                # conservation guarantees an exit arc at every entered node
                raise InternalInvariantError(f"decomposition walk stalled at {at}")
            path.append(arc)
            at = obs[arc].creditor
            if at in seen_at:
                cycle = path[seen_at[at]:]
                break
            seen_at[at] = len(path)
        bottleneck = min(remaining[a] for a in cycle)
        for a in cycle:
            left = remaining[a] - bottleneck
            if left:
                remaining[a] = left
            else:
                del remaining[a]
        cycles.append((_rotate_to_smallest(cycle, obs), bottleneck))
    return tuple(cycles)


def _rotate_to_smallest(
    cycle: Sequence[int], obs: Sequence[Obligation]
) -> tuple[int, ...]:
    """Rotate an arc cycle so it starts at the smallest participant id."""
    tails = [obs[a].debtor for a in cycle]
    pivot = tails.index(min(tails))
    return tuple(cycle[pivot:]) + tuple(cycle[:pivot])


def apply_compression(net: Network, flow: FlowAssignment) -> Network:
    """Reduce every arc amount by the assigned flow.

    Arcs that reach zero are kept (amount 0) so indices stay aligned with
    the input network; serialization drops them.  Net positions are
    preserved exactly and total gross drops by twice the flow volume.
    """
    _require_feasible(net, flow)
    compressed = [
        Obligation(ob.debtor, ob.creditor, ob.amount - flow[i])
        for i, ob in enumerate(net.obligations)
    ]
    return Network(compressed, net.participants)
