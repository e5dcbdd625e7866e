from fractions import Fraction

import pytest

from netclear import (
    ClearingState,
    FlowAssignment,
    Network,
    Obligation,
    ParameterError,
    PreferenceProfile,
    ValidationError,
    apply_compression,
    clear_cycles,
    find_functional_cycles,
    generate_network,
    generate_preferences,
    GenConfig,
    is_feasible,
    most_preferred_neighbours_graph,
    node_removal_fixpoint,
    preferential_compress,
)


def p4_prefs(net: Network) -> PreferenceProfile:
    return PreferenceProfile(
        mode="out",
        lists={
            "1": (net.arc_index("1", "2"),),
            "2": (net.arc_index("2", "3"),),
            "3": (net.arc_index("3", "4"), net.arc_index("3", "1")),
            "4": (net.arc_index("4", "3"),),
        },
    )


# -- profile validation ----------------------------------------------------------


def test_profile_rejects_wrong_direction(t3):
    # in out mode a listed arc must leave its owner
    prefs = PreferenceProfile(mode="out", lists={"B": (t3.arc_index("A", "B"),)})
    with pytest.raises(ValidationError):
        prefs.validate(t3)


def test_profile_rejects_duplicate_arc(t3):
    arc = t3.arc_index("A", "B")
    prefs = PreferenceProfile(mode="out", lists={"A": (arc, arc)})
    with pytest.raises(ValidationError):
        prefs.validate(t3)


def test_profile_rejects_unknown_arc(t3):
    prefs = PreferenceProfile(mode="out", lists={"A": (9,)})
    with pytest.raises(ValidationError):
        prefs.validate(t3)


def test_profile_in_mode_ownership(t3):
    prefs = PreferenceProfile(mode="in", lists={"B": (t3.arc_index("A", "B"),)})
    prefs.validate(t3)  # arc enters its owner: fine


def test_epsilon_out_of_range(t3, p4):
    prefs = p4_prefs(p4)
    for bad in (0, Fraction(0), Fraction(3, 2), -1):
        with pytest.raises(ParameterError):
            preferential_compress(p4, prefs, bad)


# -- mid-level operations ----------------------------------------------------------


def test_most_preferred_graph_p4(p4):
    state = ClearingState.initial(p4, p4_prefs(p4))
    top = most_preferred_neighbours_graph(state)
    named = {v: (p4.obligations[a].debtor, p4.obligations[a].creditor) for v, a in top.items()}
    assert named == {
        "1": ("1", "2"),
        "2": ("2", "3"),
        "3": ("3", "4"),
        "4": ("4", "3"),
    }


def test_most_preferred_graph_empty_lists(t3):
    state = ClearingState.initial(t3, PreferenceProfile(mode="out", lists={}))
    assert most_preferred_neighbours_graph(state) == {}


def test_functional_cycles_p4(p4):
    state = ClearingState.initial(p4, p4_prefs(p4))
    top = most_preferred_neighbours_graph(state)
    cycles = find_functional_cycles(state, top)
    assert len(cycles) == 1
    named = [(p4.obligations[a].debtor, p4.obligations[a].creditor) for a in cycles[0]]
    assert named == [("3", "4"), ("4", "3")]


def test_functional_cycles_three_cycle(t3):
    prefs = PreferenceProfile(
        mode="out",
        lists={p: (t3.out_arcs(p)[0],) for p in t3.participants},
    )
    state = ClearingState.initial(t3, prefs)
    cycles = find_functional_cycles(state, most_preferred_neighbours_graph(state))
    assert cycles == ((0, 1, 2),)


def test_functional_cycles_none_on_path():
    net = Network.ingest(
        [Obligation("A", "B", 1), Obligation("B", "C", 1), Obligation("C", "A", 1)]
    )
    state = ClearingState.initial(
        net, PreferenceProfile(mode="out", lists={"A": (0,), "B": (1,)})
    )
    top = most_preferred_neighbours_graph(state)
    assert find_functional_cycles(state, top) == ()


def test_clear_cycles_two_cycle_finishes_both(p4):
    state = ClearingState.initial(p4, p4_prefs(p4))
    cyc = (p4.arc_index("3", "4"), p4.arc_index("4", "3"))
    cleared, finished = clear_cycles(state, [cyc], 1)
    assert cleared == ((cyc, 3),)
    assert set(finished) == set(cyc)


def test_clear_cycles_unique_bottleneck(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state = ClearingState.initial(t3, prefs)
    cleared, finished = clear_cycles(state, [(0, 1, 2)], 1)
    assert cleared == (((0, 1, 2), 3),)
    assert finished == (1,)  # only B->C emptied


def test_clear_cycles_fractional_threshold(t3):
    # residuals 5, 3, 7 and epsilon 3/5: tau 3 finishes A->B (3 >= 3) and
    # B->C (3 >= 9/5), but not C->A (3 < 21/5)
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state = ClearingState.initial(t3, prefs)
    cleared, finished = clear_cycles(state, [(0, 1, 2)], Fraction(3, 5))
    assert cleared == (((0, 1, 2), 3),)
    assert set(finished) == {0, 1}


def test_clear_cycles_empty_is_noop(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state = ClearingState.initial(t3, prefs)
    assert clear_cycles(state, [], 1) == ((), ())


def test_per_arc_epsilon_override(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state = ClearingState.initial(t3, prefs)
    # global epsilon 1 would keep C->A alive; per-arc 1/3 finishes it (3 >= 7/3)
    _, finished = clear_cycles(state, [(0, 1, 2)], 1, per_arc_epsilon={2: Fraction(1, 3)})
    assert 2 in finished


def test_node_removal_peels_chain():
    net = Network.ingest([Obligation("A", "B", 1), Obligation("B", "C", 1)])
    # B is the only dealer and has a list, but its arcs are one-sided once
    # customers are excluded, so everything peels off
    state = ClearingState.initial(net, PreferenceProfile(mode="out", lists={"B": (1,)}))
    removed = node_removal_fixpoint(state)
    assert set(removed) == {"B"}
    assert not state.live_nodes


def test_node_removal_keeps_live_cycle(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state = ClearingState.initial(t3, prefs)
    assert node_removal_fixpoint(state) == ()
    assert state.live_nodes == {"A", "B", "C"}


# -- the full algorithm ----------------------------------------------------------


def test_p4_trace(p4):
    flow, trace = preferential_compress(p4, p4_prefs(p4), 1)
    named = {
        (p4.obligations[i].debtor, p4.obligations[i].creditor): v
        for i, v in flow.items()
    }
    assert named == {
        ("3", "4"): 3,
        ("4", "3"): 3,
        ("1", "2"): 2,
        ("2", "3"): 2,
        ("3", "1"): 2,
    }
    assert flow.volume == 12
    assert len(trace.iterations) == 2
    assert not trace.stuck
    # iteration 0 clears the 3-4 two-cycle and drops node 4
    assert trace.iterations[0].cycles == (((p4.arc_index("3", "4"), p4.arc_index("4", "3")), 3),)
    assert trace.iterations[0].removed == ("4",)
    # iteration 1 clears the triangle with bottleneck 2
    assert trace.iterations[1].cycles[0][1] == 2


def test_empty_preferences_clear_nothing(t3):
    flow, trace = preferential_compress(t3, PreferenceProfile(mode="out", lists={}), 1)
    assert flow == FlowAssignment()
    assert trace.iterations == ()
    assert set(trace.initial_removed) == {"A", "B", "C"}
    assert not trace.stuck


def test_forced_triangle(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    flow, trace = preferential_compress(t3, prefs, 1)
    assert flow == FlowAssignment({0: 3, 1: 3, 2: 3})


def test_epsilon_finishes_early(t3):
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    full, _ = preferential_compress(t3, prefs, 1)
    partial, trace = preferential_compress(t3, prefs, Fraction(3, 5))
    # every finished arc carries at least epsilon * amount
    finished = [a for it in trace.iterations for a in it.finished]
    for a in finished:
        assert partial[a] >= Fraction(3, 5) * t3.obligations[a].amount
    assert is_feasible(t3, partial).ok


def test_customers_never_take_part():
    # B->D:1 dangles off the triangle; D is a customer, so the arc cannot
    # clear even when listed first
    net = Network.ingest(
        [
            Obligation("A", "B", 5),
            Obligation("B", "C", 3),
            Obligation("C", "A", 7),
            Obligation("B", "D", 1),
        ]
    )
    prefs = PreferenceProfile(
        mode="out",
        lists={
            "A": (net.arc_index("A", "B"),),
            "B": (net.arc_index("B", "D"), net.arc_index("B", "C")),
            "C": (net.arc_index("C", "A"),),
        },
    )
    flow, _ = preferential_compress(net, prefs, 1)
    assert flow[net.arc_index("B", "D")] == 0
    assert is_feasible(net, flow).ok


def test_in_mode_duality():
    for seed in range(12):
        net = generate_network(GenConfig(nodes=5, arcs=9, cap_max=6, seed=seed))
        prefs = generate_preferences(net, seed + 1)
        flow_out, _ = preferential_compress(net, prefs, 1)

        reversed_net = Network.ingest(
            [Obligation(ob.creditor, ob.debtor, ob.amount) for ob in net.obligations],
            participants=net.participants,
        )
        reversed_lists = {
            owner: tuple(
                reversed_net.arc_index(
                    net.obligations[a].creditor, net.obligations[a].debtor
                )
                for a in arcs
            )
            for owner, arcs in prefs.lists.items()
        }
        flow_in, _ = preferential_compress(
            reversed_net, PreferenceProfile(mode="in", lists=reversed_lists), 1
        )
        for i, ob in enumerate(net.obligations):
            j = reversed_net.arc_index(ob.creditor, ob.debtor)
            assert flow_in[j] == flow_out[i]


def test_output_always_feasible_and_conserving():
    for seed in range(30):
        net = generate_network(GenConfig(nodes=6, arcs=12, cap_max=8, seed=seed))
        prefs = generate_preferences(net, seed)
        for eps in (1, Fraction(3, 4), Fraction(1, 2)):
            flow, trace = preferential_compress(net, prefs, eps)
            assert is_feasible(net, flow).ok
            assert len(trace.iterations) <= len(net.obligations)
            assert not trace.stuck
            after = apply_compression(net, flow)
            for pid in net.participants:
                assert after.net_position(pid) == net.net_position(pid)
            # arc-disjointness within each iteration
            for it in trace.iterations:
                seen = set()
                for arcs, _tau in it.cycles:
                    assert not (set(arcs) & seen)
                    seen.update(arcs)


def test_partial_preference_lists():
    # lists covering only a subset of arcs, in arbitrary order: empty-list
    # dealers and unlisted arcs must drop out cleanly and the result stays
    # a feasible conserving circulation
    import random as _random

    for seed in range(60):
        rng = _random.Random(7_700 + seed)
        net = generate_network(GenConfig(nodes=6, arcs=14, cap_max=8, seed=seed))
        lists = {}
        for pid in net.participants:
            out = list(net.out_arcs(pid))
            rng.shuffle(out)
            keep = rng.randint(0, len(out))
            if keep:
                lists[pid] = tuple(out[:keep])
        prefs = PreferenceProfile(mode="out", lists=lists)
        eps = (1, Fraction(1, 2))[seed % 2]
        flow, trace = preferential_compress(net, prefs, eps)
        assert is_feasible(net, flow).ok
        assert not trace.stuck
        after = apply_compression(net, flow)
        for pid in net.participants:
            assert after.net_position(pid) == net.net_position(pid)
        listed = {a for arcs in lists.values() for a in arcs}
        for idx, value in flow.items():
            assert idx in listed  # unlisted arcs never clear


def test_epsilon_monotonicity_of_finishing(t3):
    # at the same cleared amount, a smaller epsilon can only finish arcs
    # earlier, never later
    prefs = PreferenceProfile(mode="out", lists={p: (t3.out_arcs(p)[0],) for p in t3.participants})
    state_hi = ClearingState.initial(t3, prefs)
    state_lo = ClearingState.initial(t3, prefs)
    _, fin_hi = clear_cycles(state_hi, [(0, 1, 2)], 1)
    _, fin_lo = clear_cycles(state_lo, [(0, 1, 2)], Fraction(3, 5))
    assert set(fin_hi) <= set(fin_lo)
