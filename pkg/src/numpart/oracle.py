"""Exhaustive reference solvers for small instances.

These deliberately share no code with the tree search: sign patterns are
enumerated directly, and the full (unpruned) differencing tree is expanded
by plain recursion with a fresh sort at every node.
"""
from __future__ import annotations

from collections import Counter
from typing import List, Optional, Tuple

import numpy as np

from .core import CardinalityConstraint, InputError, Instance, PartitionAssignment

MAX_EXHAUSTIVE_N = 30
MAX_TREE_N = 20

_INT64_SAFE = 1 << 62


def signed_sums(instance: Instance) -> Tuple[np.ndarray, np.ndarray]:
    """Signed sums and cardinality differences of all patterns with ``signs[0] = +1``.

    Pattern ``p`` encodes positions ``1..n-1`` with position 1 as the most
    significant bit; bit 1 means ``+1``.  Integer order is therefore the
    lexicographic order of sign vectors (with -1 < +1).
    """
    n = instance.n
    if n > MAX_EXHAUSTIVE_N:
        raise InputError(f"exhaustive enumeration refused for n = {n} > {MAX_EXHAUSTIVE_N}")
    ws = instance.weights
    dtype = np.int64 if instance.total < _INT64_SAFE else object
    sums = np.array([ws[0]], dtype=dtype)
    cards = np.array([1], dtype=np.int64)
    for j in range(n - 1, 0, -1):
        x = ws[j]
        sums = np.concatenate([sums - x, sums + x])
        cards = np.concatenate([cards - 1, cards + 1])
    return sums, cards


def _signs_of(pattern: int, n: int) -> Tuple[int, ...]:
    signs = [1] * n
    for j in range(1, n):
        bit = (pattern >> (n - 1 - j)) & 1
        signs[j] = 1 if bit else -1
    return tuple(signs)


def exhaustive_best(instance: Instance,
                    constraint: Optional[CardinalityConstraint] = None
                    ) -> Tuple[int, int, PartitionAssignment]:
    """Brute-force optimum under ``constraint``.

    Minimises ``(delta, |card_diff|)``; remaining ties go to the
    lexicographically smallest sign vector.
    """
    n = instance.n
    sums, cards = signed_sums(instance)
    deltas = np.abs(sums)
    acards = np.abs(cards)
    if constraint is not None and constraint.target is not None:
        feasible = acards == constraint.target
        if not feasible.any():
            raise InputError(f"no partition satisfies |m| = {constraint.target} for n = {n}")
        candidates = np.flatnonzero(feasible)
    else:
        candidates = np.arange(len(sums))
    best_delta = min(deltas[candidates])
    at_best = candidates[deltas[candidates] == best_delta]
    best_card = min(acards[at_best])
    pattern = int(at_best[acards[at_best] == best_card][0])
    signs = _signs_of(pattern, n)
    delta, card = int(best_delta), int(cards[pattern])
    return delta, card, PartitionAssignment(signs, delta, card)


def achievable_pairs(instance: Instance) -> Counter:
    """Multiset of ``(delta, |card_diff|)`` over all unordered partitions."""
    sums, cards = signed_sums(instance)
    return Counter(zip((abs(int(s)) for s in sums), (abs(int(c)) for c in cards)))


def enumerate_tree_terminals(instance: Instance) -> Counter:
    """Expand the whole differencing tree without pruning.

    Returns the multiset of terminal ``(delta, card)`` pairs; there are
    ``2**(n-1)`` of them.
    """
    n = instance.n
    if n > MAX_TREE_N:
        raise InputError(f"tree enumeration refused for n = {n} > {MAX_TREE_N}")
    out: Counter = Counter()

    def expand(elems: List[Tuple[int, int]]):
        if len(elems) == 1:
            out[elems[0]] += 1
            return
        elems = sorted(elems, key=lambda e: e[0], reverse=True)
        (x1, m1), (x2, m2) = elems[0], elems[1]
        rest = elems[2:]
        expand(rest + [(x1 - x2, m1 - m2)])
        expand(rest + [(x1 + x2, m1 + m2)])

    expand([(x, 1) for x in instance.weights])
    return out
