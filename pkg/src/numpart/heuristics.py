"""Polynomial-time differencing heuristics: PDM, LDM and BLDM.

Elements are ordered by value descending, ties broken by the smaller
originating index.  When two elements are combined the result keeps the
index of the larger one, so the order stays total and deterministic.
"""
from __future__ import annotations

import enum
import heapq
from typing import List

from .core import Instance, InputError, PartitionAssignment


class HeuristicKind(enum.Enum):
    PDM = "pdm"
    LDM = "ldm"
    BLDM = "bldm"


class MergeForest:
    """Records differencing/summing decisions and recovers the two-colouring.

    Leaves ``0..n-1`` are the original indices.  Every merge creates an
    internal node whose second child is sign-flipped for a difference and
    kept for a sum.
    """

    def __init__(self, n: int):
        self.n = n
        self._first: List[int] = []
        self._second: List[int] = []
        self._flip: List[bool] = []

    def merge(self, larger: int, smaller: int, difference: bool) -> int:
        self._first.append(larger)
        self._second.append(smaller)
        self._flip.append(difference)
        return self.n + len(self._flip) - 1

    def signs(self, root: int) -> List[int]:
        n = self.n
        out = [0] * n
        stack = [(root, 1)]
        while stack:
            node, sign = stack.pop()
            if node < n:
                out[node] = sign
                continue
            k = node - n
            stack.append((self._first[k], sign))
            stack.append((self._second[k], -sign if self._flip[k] else sign))
        return out


def _assignment(forest: MergeForest, root: int, value: int, card: int) -> PartitionAssignment:
    signs = forest.signs(root)
    return PartitionAssignment(tuple(signs), value, card)


def _check(instance: Instance) -> None:
    if not isinstance(instance, Instance) or instance.n < 1:
        raise InputError("heuristics need a non-empty Instance")


def _sorted_elements(instance: Instance):
    # (value, index, card, node); index doubles as tree node for leaves
    elems = [(x, i, 1, i) for i, x in enumerate(instance.weights)]
    elems.sort(key=lambda e: (-e[0], e[1]))
    return elems


def _pdm_round(elems, forest: MergeForest):
    out = []
    for j in range(0, len(elems) - 1, 2):
        v1, i1, c1, t1 = elems[j]
        v2, _, c2, t2 = elems[j + 1]
        out.append((v1 - v2, i1, c1 - c2, forest.merge(t1, t2, True)))
    if len(elems) % 2:
        out.append(elems[-1])
    return out


def _ldm_finish(elems, forest: MergeForest):
    heap = [(-v, i, c, t) for v, i, c, t in elems]
    heapq.heapify(heap)
    while len(heap) > 1:
        nv1, i1, c1, t1 = heapq.heappop(heap)
        nv2, _, c2, t2 = heapq.heappop(heap)
        # nv1 <= nv2, so the difference is nv2 - nv1 >= 0
        heapq.heappush(heap, (nv1 - nv2, i1, c1 - c2, forest.merge(t1, t2, True)))
    nv, _, c, t = heap[0]
    return -nv, c, t


def ldm(instance: Instance) -> PartitionAssignment:
    """Largest differencing method (Karmarkar-Karp)."""
    _check(instance)
    forest = MergeForest(instance.n)
    value, card, root = _ldm_finish(_sorted_elements(instance), forest)
    return _assignment(forest, root, value, card)


def pdm(instance: Instance) -> PartitionAssignment:
    """Paired differencing method; the result always has ``|card_diff| <= 1``."""
    _check(instance)
    forest = MergeForest(instance.n)
    elems = _sorted_elements(instance)
    while len(elems) > 1:
        elems = _pdm_round(elems, forest)
        elems.sort(key=lambda e: (-e[0], e[1]))
    value, _, card, root = elems[0]
    return _assignment(forest, root, value, card)


def bldm(instance: Instance) -> PartitionAssignment:
    """Balanced LDM: one PDM round, then LDM on the ``ceil(n/2)`` survivors."""
    _check(instance)
    forest = MergeForest(instance.n)
    elems = _pdm_round(_sorted_elements(instance), forest)
    value, card, root = _ldm_finish(elems, forest)
    return _assignment(forest, root, value, card)


HEURISTICS = {
    HeuristicKind.PDM: pdm,
    HeuristicKind.LDM: ldm,
    HeuristicKind.BLDM: bldm,
}


def run_heuristic(kind, instance: Instance) -> PartitionAssignment:
    return HEURISTICS[HeuristicKind(kind)](instance)
