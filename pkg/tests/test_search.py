import itertools
import random

import pytest

from numpart.core import CardinalityConstraint, InputError, Instance, ParityError, Status, evaluate
from numpart.heuristics import bldm, ldm
from numpart.oracle import exhaustive_best
from numpart.search import (
    ConsistencyError,
    DecisionPath,
    NodeState,
    SearchLimits,
    cbldm_solve,
    ckk_solve,
    extract_assignment,
    prune_cardinality,
    prune_value,
)

from conftest import random_instance


def parity_valid_targets(n):
    return range(n % 2, n + 1, 2)


class Recorder:
    def __init__(self, instance):
        self.instance = instance
        self.events = []

    def __call__(self, event):
        check = evaluate(self.instance, event.assignment.signs)
        assert check.delta == event.delta == event.assignment.delta
        assert check.card_diff == event.assignment.card_diff
        self.events.append(event)


# -- pruning predicates -----------------------------------------------------

def test_prune_value_examples():
    state = NodeState.of([10, 2, 1])
    assert not prune_value(state, 8)
    assert prune_value(state, 7)
    assert not prune_value(state, None)
    assert prune_value(NodeState.of([6]), 6)
    assert prune_value(NodeState.of([6]), 2)
    assert not prune_value(NodeState.of([6]), 7)


def test_prune_cardinality_examples():
    state = NodeState.of([5, 3, 2], [0, 0, 1])
    assert not prune_cardinality(state, 1)
    assert prune_cardinality(state, 0)
    four = NodeState.of([1, 1, 1, 1])
    reachable = {abs(sum(s)) for s in itertools.product((1, -1), repeat=4)}
    assert reachable == {0, 2, 4}
    for t in (0, 2, 4):
        assert not prune_cardinality(four, t)
    assert prune_cardinality(four, 6)


def test_prune_cardinality_matches_enumeration(rng):
    # the interval test must never exclude a reachable |m|
    for _ in range(200):
        k = rng.randint(1, 6)
        cards = [rng.randint(-4, 4) for _ in range(k)]
        state = NodeState.of([1] * k, cards)
        reachable = {abs(sum(s * c for s, c in zip(signs, cards)))
                     for signs in itertools.product((1, -1), repeat=k)}
        for t in range(0, 30):
            if t in reachable:
                assert not prune_cardinality(state, t)


# -- CKK ---------------------------------------------------------------------

def test_ckk_examples():
    r = ckk_solve(Instance([8, 7, 6, 5, 4]), check_invariants=True)
    assert (r.delta, r.status) == (0, Status.PERFECT_FOUND)
    assert r.optimal
    r = ckk_solve(Instance([5]))
    assert (r.delta, r.status, r.nodes_generated) == (5, Status.PROVEN_OPTIMAL, 1)
    assert r.best.signs == (1,)
    assert ckk_solve(Instance([1, 1, 1, 1])).delta == 0


def test_ckk_first_event_is_ldm(rng):
    for _ in range(300):
        n = rng.randint(1, 40)
        inst = random_instance(rng, n, rng.choice([4, 16, 48]))
        rec = Recorder(inst)
        r = ckk_solve(inst, SearchLimits(max_nodes=n), rec)
        first = r.trace[0]
        assert first.delta == ldm(inst).delta
        assert first.nodes_at_event == n


def test_ckk_complete(rng):
    for _ in range(150):
        inst = random_instance(rng, rng.randint(1, 12), rng.choice([3, 8, 20]))
        rec = Recorder(inst)
        r = ckk_solve(inst, sink=rec, check_invariants=True)
        assert r.optimal
        assert r.delta == exhaustive_best(inst)[0]
        deltas = [e.delta for e in r.trace]
        assert deltas == sorted(set(deltas), reverse=True)
        assert r.trace[-1].assignment == r.best


# -- complete BLDM ----------------------------------------------------------

def test_cbldm_examples():
    inst = Instance([8, 7, 6, 5, 4])
    r = cbldm_solve(inst, CardinalityConstraint.balanced(5), check_invariants=True)
    assert (r.delta, abs(r.best.card_diff), r.status) == (0, 1, Status.PERFECT_FOUND)
    assert cbldm_solve(Instance([10, 8, 7, 5]), 0).delta == 0
    assert cbldm_solve(Instance([9, 4]), 0).delta == 5
    r = cbldm_solve(inst, 5)
    assert r.delta == 30 and r.nodes_generated <= 2 * 5


def test_cbldm_rejects_bad_targets():
    inst = Instance([8, 7, 6, 5, 4])
    with pytest.raises(ParityError):
        cbldm_solve(inst, 2)
    with pytest.raises(InputError):
        cbldm_solve(inst, 7)
    with pytest.raises(InputError):
        cbldm_solve(inst, CardinalityConstraint.unconstrained())


def test_cbldm_single_element():
    r = cbldm_solve(Instance([4]), 1)
    assert (r.delta, r.best.card_diff, r.nodes_generated) == (4, 1, 1)


def test_cbldm_first_event_is_bldm(rng):
    for _ in range(300):
        n = rng.randint(1, 40)
        inst = random_instance(rng, n, rng.choice([4, 16, 48]))
        r = cbldm_solve(inst, CardinalityConstraint.balanced(n), SearchLimits(max_nodes=n), Recorder(inst))
        h = bldm(inst)
        assert r.trace[0].delta == h.delta
        assert abs(r.trace[0].assignment.card_diff) == abs(h.card_diff)
        assert r.trace[0].nodes_at_event == n


def test_cbldm_complete_every_target(rng):
    for _ in range(120):
        n = rng.randint(1, 11)
        inst = random_instance(rng, n, rng.choice([3, 8, 20]))
        for t in parity_valid_targets(n):
            rec = Recorder(inst)
            r = cbldm_solve(inst, t, sink=rec, check_invariants=True)
            assert r.optimal
            assert r.delta == exhaustive_best(inst, CardinalityConstraint(t))[0]
            assert abs(r.best.card_diff) == t
            assert all(abs(e.assignment.card_diff) == t for e in rec.events)


def test_trivial_target_found_right_away(rng):
    for n in range(1, 40):
        inst = random_instance(rng, n, 30)
        r = cbldm_solve(inst, n)
        assert r.delta == inst.total
        assert r.nodes_generated <= 2 * n


def test_pruning_never_adds_nodes(rng):
    for _ in range(60):
        n = rng.randint(2, 10)
        inst = random_instance(rng, n, 12)
        t = rng.choice(list(parity_valid_targets(n)))
        full = cbldm_solve(inst, t)
        for kwargs in ({"value_pruning": False}, {"card_pruning": False}):
            loose = cbldm_solve(inst, t, **kwargs)
            assert loose.delta == full.delta
            assert full.nodes_generated <= loose.nodes_generated
        loose = ckk_solve(inst, value_pruning=False)
        assert loose.delta == ckk_solve(inst).delta


# -- budgets -------------------------------------------------------------------

@pytest.mark.parametrize("budget", [1, 2, 5, 17, 100])
def test_node_budget(budget):
    inst = random_instance(random.Random(budget), 22, 40)
    r = cbldm_solve(inst, 0, SearchLimits(max_nodes=budget))
    assert r.status == Status.NODE_BUDGET_EXHAUSTED
    assert r.nodes_generated <= budget + 1
    if budget >= inst.n:
        assert r.best is not None and r.best == r.trace[-1].assignment
    else:
        assert r.best is None


def test_time_budget():
    inst = random_instance(random.Random(3), 60, 120)
    r = ckk_solve(inst, SearchLimits(max_time=0.2))
    assert r.status == Status.TIME_BUDGET_EXHAUSTED
    assert r.elapsed < 2.0
    assert r.best is not None


def test_limits_validation():
    with pytest.raises(InputError):
        SearchLimits(max_nodes=0)
    with pytest.raises(InputError):
        SearchLimits(max_time=-1)
    assert SearchLimits.unbounded() == SearchLimits()


# -- replay ----------------------------------------------------------------------

def test_extract_all_left_is_ldm():
    inst = Instance([8, 7, 6, 5, 4])
    a = extract_assignment(inst, DecisionPath((0, 0, 0, 0), 0))
    assert a == ldm(inst)
    assert a.delta == 2


def test_extract_all_left_balanced_is_bldm(rng):
    for _ in range(50):
        n = rng.randint(1, 30)
        inst = random_instance(rng, n, 10)
        a = extract_assignment(inst, DecisionPath((0,) * (n - 1), n // 2))
        assert a == bldm(inst)


def test_extract_single():
    assert extract_assignment(Instance([3]), DecisionPath()).signs == (1,)


def test_extract_rejects_short_path():
    with pytest.raises(ConsistencyError):
        extract_assignment(Instance([3, 2, 1]), DecisionPath((0,), 0))
    with pytest.raises(ConsistencyError):
        extract_assignment(Instance([3, 2, 1]), DecisionPath((0, 2), 0))


def test_extract_every_path_is_consistent(rng):
    for _ in range(20):
        n = rng.randint(1, 8)
        inst = random_instance(rng, n, 6)
        for pdm_steps in (0, n // 2):
            for bits in itertools.product((0, 1), repeat=n - 1):
                a = extract_assignment(inst, DecisionPath(bits, pdm_steps))
                check = evaluate(inst, a.signs)
                assert (check.delta, check.card_diff) == (a.delta, a.card_diff)


def test_terminal_parity_along_trace(rng):
    for _ in range(100):
        n = rng.randint(1, 14)
        inst = random_instance(rng, n, 16)
        rec = Recorder(inst)
        ckk_solve(inst, sink=rec)
        cbldm_solve(inst, CardinalityConstraint.balanced(n), sink=rec)
        for e in rec.events:
            assert e.delta % 2 == inst.total % 2
            assert e.assignment.card_diff % 2 == n % 2
