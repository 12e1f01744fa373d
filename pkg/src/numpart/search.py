"""Complete anytime tree search: CKK (unconstrained) and complete BLDM (constrained).

Both solvers walk the same binary tree: at every node the two leading
elements are replaced either by their difference (left child) or by their
sum (right child), with effective cardinalities ``m1 - m2`` and ``m1 + m2``.
CKK always operates on the two largest elements.  Complete BLDM first works
through the initially sorted list pair by pair (PDM phase) and switches to
the two-largest rule once ``ceil(n/2)`` elements remain (LDM phase).

Node counting: the root counts as one node and every generated child counts
as one node, so CKK reaches its first (LDM) solution after exactly ``n``.
"""
from __future__ import annotations

import time
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .core import (
    CardinalityConstraint,
    ImprovementEvent,
    InputError,
    Instance,
    ParityError,
    PartitionAssignment,
    SolveReport,
    Status,
)
from .heuristics import MergeForest

EventSink = Callable[[ImprovementEvent], None]

_TIME_CHECK_MASK = 0x3FF


class ConsistencyError(RuntimeError):
    """Internal bookkeeping disagrees with a recomputation."""


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: Optional[int] = None
    max_time: Optional[float] = None

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes < 1:
            raise InputError("max_nodes must be positive")
        if self.max_time is not None and self.max_time <= 0:
            raise InputError("max_time must be positive")

    @classmethod
    def unbounded(cls) -> "SearchLimits":
        return cls()


@dataclass(frozen=True)
class DecisionPath:
    """Branch bits from the root (0 = difference, 1 = sum).

    ``pdm_steps`` is the number of leading operations that pair the initially
    sorted elements in order (0 for CKK, ``n // 2`` for complete BLDM).
    """

    bits: Tuple[int, ...] = ()
    pdm_steps: int = 0


@dataclass(frozen=True)
class NodeState:
    """A snapshot of one search node; used for the pruning predicates and debugging."""

    elements: Tuple[Tuple[int, int], ...]  # (value, card)
    value_sum: int = field(init=False)
    value_max: int = field(init=False)
    card_sum: int = field(init=False)
    card_max: int = field(init=False)

    def __post_init__(self):
        if not self.elements:
            raise InputError("a node holds at least one element")
        object.__setattr__(self, "value_sum", sum(v for v, _ in self.elements))
        object.__setattr__(self, "value_max", max(v for v, _ in self.elements))
        object.__setattr__(self, "card_sum", sum(abs(c) for _, c in self.elements))
        object.__setattr__(self, "card_max", max(abs(c) for _, c in self.elements))

    @classmethod
    def of(cls, values: Sequence[int], cards: Optional[Sequence[int]] = None) -> "NodeState":
        if cards is None:
            cards = [1] * len(values)
        return cls(tuple(zip(values, cards)))


def prune_value(state: NodeState, best: Optional[int]) -> bool:
    """True if no terminal below ``state`` can beat ``best`` (None means no incumbent)."""
    if best is None:
        return False
    return 2 * state.value_max - state.value_sum >= best


def prune_cardinality(state: NodeState, target: int) -> bool:
    """True if ``|m| == target`` is unreachable below ``state``."""
    return 2 * state.card_max - state.card_sum > target or state.card_sum < target


# -- replay ------------------------------------------------------------------

def _initial_order(instance: Instance) -> List[Tuple[int, int]]:
    order = sorted(range(instance.n), key=lambda i: (-instance.weights[i], i))
    return [(instance.weights[i], i) for i in order]


def extract_assignment(instance: Instance, path: DecisionPath) -> PartitionAssignment:
    """Replay ``path`` and return the partition of the terminal it reaches."""
    n = instance.n
    bits = tuple(path.bits)
    if len(bits) != n - 1:
        raise ConsistencyError(f"path of length {len(bits)} does not reach a terminal for n = {n}")
    if not 0 <= path.pdm_steps <= n // 2:
        raise ConsistencyError(f"invalid pdm_steps {path.pdm_steps} for n = {n}")
    forest = MergeForest(n)
    orig = _initial_order(instance)
    # entries (value, -index, card, node); ascending, so the largest is last
    appended = []
    for j in range(path.pdm_steps):
        (v1, i1), (v2, i2) = orig[2 * j], orig[2 * j + 1]
        diff = bits[j] == 0
        appended.append((v1 - v2 if diff else v1 + v2, -i1, 0 if diff else 2, forest.merge(i1, i2, diff)))
    lst = [(v, -i, 1, i) for v, i in orig[2 * path.pdm_steps:]] + appended
    lst.sort()
    for bit in bits[path.pdm_steps:]:
        v1, ni1, c1, t1 = lst.pop()
        v2, _, c2, t2 = lst.pop()
        if bit == 0:
            insort(lst, (v1 - v2, ni1, c1 - c2, forest.merge(t1, t2, True)))
        elif bit == 1:
            insort(lst, (v1 + v2, ni1, c1 + c2, forest.merge(t1, t2, False)))
        else:
            raise ConsistencyError(f"invalid branch bit {bit!r}")
    value, _, card, root = lst[0]
    return PartitionAssignment(tuple(forest.signs(root)), value, card)


# -- search --------------------------------------------------------------------

class _Perfect(Exception):
    pass


class _OutOfNodes(Exception):
    pass


class _OutOfTime(Exception):
    pass


class _TreeSearch:
    def __init__(self, instance: Instance, target: Optional[int], pdm_steps: int,
                 limits: SearchLimits, sink: Optional[EventSink],
                 value_pruning: bool = True, card_pruning: bool = True,
                 check_invariants: bool = False):
        self.instance = instance
        self.n = instance.n
        self.target = target
        self.pdm_steps = pdm_steps
        self.limits = limits
        self.sink = sink
        self.value_pruning = value_pruning
        self.card_pruning = card_pruning and target is not None
        self.check_invariants = check_invariants

        self.nodes = 1
        self.best: Optional[int] = None
        self.trace: List[ImprovementEvent] = []
        self.path: List[int] = []
        self.lst: List[Tuple[int, int, int]] = []
        self.cnt = [0] * (self.n + 1)
        self.t0 = 0.0
        self.max_nodes = limits.max_nodes
        self.deadline = None

    # bookkeeping shared by both phases

    def _tick(self):
        if self.max_nodes is not None and self.nodes >= self.max_nodes:
            raise _OutOfNodes
        self.nodes += 1
        if self.deadline is not None and not (self.nodes & _TIME_CHECK_MASK):
            if time.perf_counter() >= self.deadline:
                raise _OutOfTime

    def _terminal(self, value: int, card: int):
        if self.target is not None and abs(card) != self.target:
            return
        if self.best is not None and value >= self.best:
            return
        self.best = value
        path = DecisionPath(tuple(self.path), self.pdm_steps)
        assignment = extract_assignment(self.instance, path)
        if assignment.delta != value or assignment.card_diff != card:
            raise ConsistencyError("replayed terminal disagrees with the search state")
        event = ImprovementEvent(value, assignment, self.nodes, time.perf_counter() - self.t0)
        self.trace.append(event)
        if self.sink is not None:
            self.sink(event)
        if value <= 1:
            raise _Perfect

    def _verify(self, elements, vsum, vmax, msum, mmax):
        state = NodeState(tuple(elements))
        ok = (state.value_sum, state.value_max, state.card_sum) == (vsum, vmax, msum)
        if not ok or (mmax is not None and state.card_max != mmax):
            raise ConsistencyError(
                f"cached aggregates {(vsum, vmax, msum, mmax)} != recomputed "
                f"{(state.value_sum, state.value_max, state.card_sum, state.card_max)}")

    def _pruned(self, vsum, vmax, msum, mmax) -> bool:
        if self.value_pruning and self.best is not None and 2 * vmax - vsum >= self.best:
            return True
        if self.card_pruning:
            t = self.target
            if 2 * mmax - msum > t or msum < t:
                return True
        return False

    # PDM phase: pair the initially sorted elements in order

    def _pdm_node(self, j, orig, suffix, appended, app_max, app_sum, sums):
        n = self.n
        k = n - j
        rest = 2 * j
        vsum = suffix[rest] + app_sum[-1]
        vmax = max(orig[rest][0] if rest < n else 0, app_max[-1])
        msum = (n - rest) + 2 * sums
        mmax = 2 if sums else (1 if rest < n else 0)
        if k == 1:
            v, _, c = appended[0] if appended else (orig[0][0], 0, 1)
            self._terminal(v, c)
            return
        if self.check_invariants:
            self._verify([(v, 1) for v, _ in orig[rest:]] + [(v, c) for v, _, c in appended],
                         vsum, vmax, msum, mmax)
        if self._pruned(vsum, vmax, msum, mmax):
            return
        if j == self.pdm_steps:
            self._switch(orig[rest:], appended, vsum, msum)
            return
        (v1, i1), (v2, _) = orig[rest], orig[rest + 1]
        for bit, v, c in ((0, v1 - v2, 0), (1, v1 + v2, 2)):
            self._tick()
            appended.append((v, -i1, c))
            app_max.append(max(app_max[-1], v))
            app_sum.append(app_sum[-1] + v)
            self.path.append(bit)
            try:
                self._pdm_node(j + 1, orig, suffix, appended, app_max, app_sum, sums + bit)
            finally:
                self.path.pop()
                app_sum.pop()
                app_max.pop()
                appended.pop()

    def _switch(self, leftover, appended, vsum, msum):
        lst = [(v, -i, 1) for v, i in leftover] + list(appended)
        lst.sort()
        cnt = self.cnt
        for c in range(len(cnt)):
            cnt[c] = 0
        for _, _, c in lst:
            cnt[abs(c)] += 1
        self.lst = lst
        self._ldm_node(vsum, msum, max(abs(c) for _, _, c in lst))

    # LDM phase: sorted list (ascending, largest last), always operate on the top two

    def _ldm_node(self, vsum, msum, mmax):
        lst = self.lst
        if len(lst) == 1:
            v, _, c = lst[0]
            self._terminal(v, c)
            return
        if self.check_invariants:
            if lst != sorted(lst):
                raise ConsistencyError("LDM-phase list lost its order")
            self._verify([(v, c) for v, _, c in lst], vsum, lst[-1][0],
                         msum, mmax if self.card_pruning else None)
        best = self.best
        if self.value_pruning and best is not None and 2 * lst[-1][0] - vsum >= best:
            return
        track = self.card_pruning
        if track:
            t = self.target
            if 2 * mmax - msum > t or msum < t:
                return
        e1 = lst.pop()
        e2 = lst.pop()
        v1, ni1, c1 = e1
        v2, _, c2 = e2
        base = vsum - v1 - v2
        a1 = c1 if c1 >= 0 else -c1
        a2 = c2 if c2 >= 0 else -c2
        mbase = msum - a1 - a2
        cnt = self.cnt
        if track:
            cnt[a1] -= 1
            cnt[a2] -= 1
            rest_max = mmax
            while rest_max > 0 and not cnt[rest_max]:
                rest_max -= 1
        path = self.path
        try:
            for bit in (0, 1):
                if bit:
                    v, c = v1 + v2, c1 + c2
                else:
                    v, c = v1 - v2, c1 - c2
                self._tick()
                e = (v, ni1, c)
                insort(lst, e)
                a = c if c >= 0 else -c
                if track:
                    cnt[a] += 1
                path.append(bit)
                try:
                    self._ldm_node(base + v, mbase + a, (a if a > rest_max else rest_max) if track else 0)
                finally:
                    path.pop()
                    if track:
                        cnt[a] -= 1
                    del lst[bisect_left(lst, e)]
        finally:
            if track:
                cnt[a1] += 1
                cnt[a2] += 1
            lst.append(e2)
            lst.append(e1)

    def run(self) -> SolveReport:
        self.t0 = time.perf_counter()
        if self.limits.max_time is not None:
            self.deadline = self.t0 + self.limits.max_time
        orig = _initial_order(self.instance)
        status = Status.PROVEN_OPTIMAL
        try:
            if self.pdm_steps == 0:
                self._switch(orig, [], self.instance.total, self.n)
            else:
                suffix = [0] * (self.n + 1)
                for idx in range(self.n - 1, -1, -1):
                    suffix[idx] = suffix[idx + 1] + orig[idx][0]
                self._pdm_node(0, orig, suffix, [], [0], [0], 0)
        except _Perfect:
            status = Status.PERFECT_FOUND
        except _OutOfNodes:
            status = Status.NODE_BUDGET_EXHAUSTED
        except _OutOfTime:
            status = Status.TIME_BUDGET_EXHAUSTED
        elapsed = time.perf_counter() - self.t0
        best = self.trace[-1].assignment if self.trace else None
        return SolveReport(best, status, self.nodes, elapsed, tuple(self.trace))


def ckk_solve(instance: Instance, limits: Optional[SearchLimits] = None,
              sink: Optional[EventSink] = None, *, value_pruning: bool = True,
              check_invariants: bool = False) -> SolveReport:
    """Complete Karmarkar-Karp search for the unconstrained problem.

    The first improvement event is the LDM solution; the search then keeps
    improving until it either finds a partition with ``delta <= 1`` or
    exhausts the tree (``ProvenOptimal``) or the budget.
    """
    if not isinstance(instance, Instance):
        raise InputError("ckk_solve needs an Instance")
    search = _TreeSearch(instance, None, 0, limits or SearchLimits(), sink,
                         value_pruning=value_pruning, check_invariants=check_invariants)
    return search.run()


def cbldm_solve(instance: Instance, constraint, limits: Optional[SearchLimits] = None,
                sink: Optional[EventSink] = None, *, value_pruning: bool = True,
                card_pruning: bool = True, check_invariants: bool = False) -> SolveReport:
    """Complete BLDM search for ``|m| == t``.

    ``constraint`` is a CardinalityConstraint with a target, or a plain
    integer target.  For the balanced target the first improvement event is
    the BLDM solution.
    """
    if not isinstance(instance, Instance):
        raise InputError("cbldm_solve needs an Instance")
    if isinstance(constraint, CardinalityConstraint):
        if constraint.target is None:
            raise InputError("cbldm_solve needs a cardinality target")
        t = constraint.target
    else:
        t = constraint
    constraint = CardinalityConstraint.target_abs(t, instance.n)
    search = _TreeSearch(instance, constraint.target, instance.n // 2, limits or SearchLimits(), sink,
                         value_pruning=value_pruning, card_pruning=card_pruning,
                         check_invariants=check_invariants)
    return search.run()


__all__ = [
    "ConsistencyError", "DecisionPath", "NodeState", "ParityError", "SearchLimits",
    "cbldm_solve", "ckk_solve", "extract_assignment", "prune_cardinality", "prune_value",
]
