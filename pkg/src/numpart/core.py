"""Exact domain types for two-way number partitioning.

Weights, sums and partition differences are plain Python ``int`` values,
which are arbitrary precision; nothing here ever touches floating point.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union


class InputError(ValueError):
    """Malformed or out-of-domain solver input."""


class ParityError(InputError):
    """Cardinality target whose parity differs from ``n``; no partition can meet it."""


def magnitude(value) -> int:
    """Coerce ``value`` to a non-negative exact integer or raise InputError."""
    if isinstance(value, bool):
        raise InputError(f"not an integer weight: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if not text.isdigit():
            raise InputError(f"not a non-negative decimal integer: {value!r}")
        return int(text)
    if not isinstance(value, int):
        try:
            as_int = int(value)
        except (TypeError, ValueError):
            raise InputError(f"not an integer weight: {value!r}") from None
        if as_int != value:
            raise InputError(f"not an integer weight: {value!r}")
        value = as_int
    if value < 0:
        raise InputError(f"negative weight: {value}")
    return int(value)


@dataclass(frozen=True)
class InstanceMeta:
    bit_width: Optional[int] = None
    seed: Optional[int] = None
    source: Optional[str] = None


@dataclass(frozen=True)
class Instance:
    """An ordered list of non-negative integer weights."""

    weights: Tuple[int, ...]
    meta: InstanceMeta = field(default_factory=InstanceMeta)

    def __init__(self, weights: Iterable, meta: Optional[InstanceMeta] = None):
        ws = tuple(magnitude(w) for w in weights)
        if not ws:
            raise InputError("instance must contain at least one weight")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "meta", meta if meta is not None else InstanceMeta())

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)


@dataclass(frozen=True)
class WeightedElement:
    """A list element together with its effective cardinality."""

    value: int
    card: int = 1


@dataclass(frozen=True)
class CardinalityConstraint:
    """Either no constraint (``target is None``) or ``|m| == target``."""

    target: Optional[int] = None

    @classmethod
    def unconstrained(cls) -> "CardinalityConstraint":
        return cls(None)

    @classmethod
    def target_abs(cls, t: int, n: int) -> "CardinalityConstraint":
        if isinstance(t, bool) or not isinstance(t, int) or t < 0:
            raise InputError(f"cardinality target must be a non-negative integer, got {t!r}")
        if t > n:
            raise InputError(f"cardinality target {t} exceeds n = {n}")
        if (t - n) % 2:
            raise ParityError(f"cardinality target {t} has the wrong parity for n = {n}")
        return cls(t)

    @classmethod
    def balanced(cls, n: int) -> "CardinalityConstraint":
        return cls(n % 2)

    @property
    def is_constrained(self) -> bool:
        return self.target is not None

    def admits(self, card_diff: int) -> bool:
        return self.target is None or abs(card_diff) == self.target


@dataclass(frozen=True)
class PartitionAssignment:
    """Signs per original index (+1 means the index is in subset A).

    ``delta`` is the partition difference and ``card_diff`` equals ``2|A| - n``.
    """

    signs: Tuple[int, ...]
    delta: int
    card_diff: int

    @property
    def subset(self) -> Tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.signs) if s > 0)


def evaluate(instance: Instance, signs: Sequence[int]) -> PartitionAssignment:
    """Compute the exact partition difference and cardinality difference of ``signs``."""
    if len(signs) != instance.n:
        raise InputError(f"sign vector has length {len(signs)}, instance has n = {instance.n}")
    signed = 0
    card = 0
    for x, s in zip(instance.weights, signs):
        if s == 1:
            signed += x
            card += 1
        elif s == -1:
            signed -= x
            card -= 1
        else:
            raise InputError(f"signs must be +1 or -1, got {s!r}")
    return PartitionAssignment(tuple(int(s) for s in signs), abs(signed), card)


def total_and_parity(instance: Instance) -> Tuple[int, int]:
    total = instance.total
    return total, total & 1


class Status(enum.Enum):
    PROVEN_OPTIMAL = "ProvenOptimal"
    PERFECT_FOUND = "PerfectFound"
    NODE_BUDGET_EXHAUSTED = "NodeBudgetExhausted"
    TIME_BUDGET_EXHAUSTED = "TimeBudgetExhausted"

    @property
    def optimal(self) -> bool:
        # delta <= 1 with matching parity cannot be beaten
        return self in (Status.PROVEN_OPTIMAL, Status.PERFECT_FOUND)


@dataclass(frozen=True)
class ImprovementEvent:
    delta: int
    assignment: PartitionAssignment
    nodes_at_event: int
    elapsed_at_event: float


@dataclass(frozen=True)
class SolveReport:
    best: Optional[PartitionAssignment]
    status: Status
    nodes_generated: int
    elapsed: float
    trace: Tuple[ImprovementEvent, ...]

    @property
    def delta(self) -> Optional[int]:
        return None if self.best is None else self.best.delta

    @property
    def optimal(self) -> bool:
        return self.status.optimal


# Instance text format: one decimal integer per line, '#' comment lines.

def parse_instance(text: str, source: Optional[str] = None) -> Instance:
    weights = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            weights.append(magnitude(stripped))
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    return Instance(weights, InstanceMeta(source=source))


def format_instance(instance: Instance, header: Optional[str] = None) -> str:
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.extend(str(w) for w in instance.weights)
    return "\n".join(lines) + "\n"


def read_instance(path: Union[str, Path]) -> Instance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read instance file {path}: {exc.strerror}") from None
    return parse_instance(text, source=str(path))


def write_instance(instance: Instance, path: Union[str, Path], header: Optional[str] = None) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_instance(instance, header))
