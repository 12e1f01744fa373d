"""Seeded instance generation and the experiment pipelines.

Generator contract (``GENERATOR_ID``): weights come from CPython's
``random.Random(seed).getrandbits(b)`` (MT19937 seeded with the integer
seed), one call per weight, in order.  Per-instance seeds inside a sweep
are the first 8 bytes (little endian) of BLAKE2b over the little-endian
uint64 triple ``(base_seed, n, index)``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import random
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .core import CardinalityConstraint, InputError, Instance, InstanceMeta, SolveReport
from .heuristics import bldm
from .search import SearchLimits, cbldm_solve, ckk_solve

log = logging.getLogger(__name__)

GENERATOR_ID = "mt19937-getrandbits/v1"
SIG_DIGITS = 12
_U64 = (1 << 64) - 1


def gen_instance(b: int, n: int, seed: int) -> Instance:
    """``n`` independent uniform integers in ``[0, 2**b)``."""
    if b < 1:
        raise InputError("bit width must be positive")
    if n < 1:
        raise InputError("instance size must be positive")
    if not 0 <= seed <= _U64:
        raise InputError("seed must be an unsigned 64-bit integer")
    rng = random.Random(seed)
    weights = [rng.getrandbits(b) for _ in range(n)]
    return Instance(weights, InstanceMeta(bit_width=b, seed=seed, source=GENERATOR_ID))


def derive_seed(base_seed: int, n: int, index: int) -> int:
    digest = hashlib.blake2b(struct.pack("<QQQ", base_seed & _U64, n, index), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def decimal_string(value: Union[int, Fraction], digits: int = SIG_DIGITS) -> str:
    """Render an exact rational with ``digits`` significant digits."""
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


# -- phase transition sweep -----------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    bit_width: int
    n_values: Tuple[int, ...]
    instances_per_n: int = 100
    mode: str = "cbldm"
    target: Union[str, int] = "balanced"
    limits: SearchLimits = field(default_factory=SearchLimits)
    base_seed: int = 0

    def __post_init__(self):
        if self.bit_width < 1:
            raise InputError("bit width must be positive")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise InputError("n_values must be a non-empty list of positive sizes")
        if self.instances_per_n < 1:
            raise InputError("instances_per_n must be at least 1")
        if self.mode not in ("ckk", "cbldm"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.target != "balanced" and not isinstance(self.target, int):
            raise InputError(f"target must be 'balanced' or an integer, got {self.target!r}")


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean_nodes: float
    median_nodes: float
    fraction_perfect: float
    mean_delta: str


def solve(instance: Instance, mode: str, target: Union[str, int] = "balanced",
          limits: Optional[SearchLimits] = None, sink=None) -> SolveReport:
    if mode == "ckk":
        return ckk_solve(instance, limits, sink)
    if mode == "cbldm":
        if target == "balanced":
            constraint = CardinalityConstraint.balanced(instance.n)
        else:
            constraint = CardinalityConstraint.target_abs(target, instance.n)
        return cbldm_solve(instance, constraint, limits, sink)
    raise InputError(f"unknown mode {mode!r}")


def _sweep_job(args):
    config, n, index = args
    inst = gen_instance(config.bit_width, n, derive_seed(config.base_seed, n, index))
    report = solve(inst, config.mode, config.target, config.limits)
    if not report.optimal:
        log.warning("n=%d instance %d stopped early: %s", n, index, report.status.value)
    perfect = report.best is not None and report.best.delta <= 1
    return n, report.nodes_generated, perfect, report.best.delta if report.best else None


def phase_sweep(config: SweepConfig, workers: int = 1) -> List[SweepRow]:
    jobs = [(config, n, i) for n in config.n_values for i in range(config.instances_per_n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs, chunksize=4))
    else:
        results = [_sweep_job(job) for job in jobs]

    rows = []
    per_n = config.instances_per_n
    for k, n in enumerate(config.n_values):
        chunk = results[k * per_n:(k + 1) * per_n]
        nodes = [r[1] for r in chunk]
        deltas = [r[3] for r in chunk if r[3] is not None]
        rows.append(SweepRow(
            n=n,
            mean_nodes=sum(nodes) / len(nodes),
            median_nodes=float(np.median(nodes)),
            fraction_perfect=sum(1 for r in chunk if r[2]) / len(chunk),
            mean_delta=decimal_string(Fraction(sum(deltas), len(deltas))) if deltas else "",
        ))
    return rows


# -- BLDM scaling ------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingRow:
    n: int
    trials: int
    mean_normalized_delta: str

    @property
    def value(self) -> float:
        return float(self.mean_normalized_delta)


def bldm_scaling(n_values: Sequence[int], trials: int, base_seed: int = 0) -> List[ScalingRow]:
    """Mean BLDM difference on ``2n``-bit instances, divided by ``2**(2n)``."""
    rows = []
    for n in n_values:
        if n < 4:
            raise InputError("bldm_scaling needs n >= 4")
        total = 0
        for i in range(trials):
            total += bldm(gen_instance(2 * n, n, derive_seed(base_seed, n, i))).delta
        mean = Fraction(total, trials * (1 << (2 * n)))
        rows.append(ScalingRow(n, trials, decimal_string(mean)))
    return rows


# -- anytime progress ----------------------------------------------------------------

@dataclass(frozen=True)
class TracePoint:
    nodes: int
    ratio: float
    delta: int


def anytime_trace(instance: Instance, target: Union[str, int] = "balanced",
                  limits: Optional[SearchLimits] = None, sink=None) -> Tuple[List[TracePoint], SolveReport]:
    """Improvement trace of complete BLDM as ``(nodes, first delta / current delta)``."""
    report = solve(instance, "cbldm", target, limits, sink)
    if not report.trace:
        return [], report
    first = report.trace[0].delta
    points = []
    for ev in report.trace:
        ratio = math.inf if ev.delta == 0 else float(Fraction(first, ev.delta))
        points.append(TracePoint(ev.nodes_at_event, ratio, ev.delta))
    return points, report


def fit_power_law(points: Iterable) -> Tuple[float, float]:
    """Least-squares fit of ``ratio = a * nodes**c`` in log-log space.

    ``points`` holds ``(nodes, ratio)`` pairs or TracePoint objects.
    """
    xs, ys = [], []
    for p in points:
        nodes, ratio = (p.nodes, p.ratio) if isinstance(p, TracePoint) else p
        if nodes < 1 or not ratio >= 1 or math.isinf(ratio):
            raise InputError(f"fit needs nodes >= 1 and finite ratio >= 1, got {(nodes, ratio)}")
        xs.append(math.log(nodes))
        ys.append(math.log(ratio))
    if len(xs) < 2 or len(set(xs)) < 2:
        raise InputError("fit needs at least two distinct node counts")
    c, log_a = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(math.exp(log_a)), float(c)


# -- CSV -------------------------------------------------------------------------------

def write_csv(rows: Sequence, out: Union[str, TextIO, None] = None, columns: Optional[Sequence[str]] = None) -> str:
    """Write dataclass rows as CSV with a header; returns the text."""
    if columns is None:
        if not rows:
            raise InputError("cannot infer CSV columns from an empty table")
        columns = [f.name for f in fields(rows[0])]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        d = asdict(row)
        writer.writerow([_cell(d[c]) for c in columns])
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
