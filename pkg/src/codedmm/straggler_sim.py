"""Discrete-event simulation of one master -> workers -> fusion round.

Time is simulated, never measured.  Each worker's finish time is
``shift + Exp(rate)`` unless it fails (probability ``fail_prob``), in which
case it never finishes.  The fusion node decodes from the first ``k``
finishers, ties broken by worker id, and the result is checked against the
uncoded product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codec import Code, CostReport
from .errors import CorrectnessViolation, InvalidParameter
from .matrix_core import FieldMatrix

__all__ = ["StragglerModel", "RoundOutcome", "SweepPoint", "CostReport",
           "sample_finish_times", "simulate_round", "sweep"]

SUCCESS = "success"
THRESHOLD_FAILURE = "threshold_failure"


@dataclass(frozen=True)
class StragglerModel:
    shift: float = 1.0
    rate: float = 1.0
    fail_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.shift >= 0:
            raise InvalidParameter(f"shift must be >= 0, got {self.shift}")
        if not self.rate > 0:
            raise InvalidParameter(f"rate must be > 0, got {self.rate}")
        if not 0.0 <= self.fail_prob <= 1.0:
            raise InvalidParameter(f"fail_prob must lie in [0, 1], got {self.fail_prob}")


@dataclass(frozen=True)
class RoundOutcome:
    completion_order: tuple[tuple[int, float], ...]
    used_workers: tuple[int, ...]
    decode_status: str
    wall_time: float
    costs: CostReport
    threshold: int
    decoded: FieldMatrix | None = None

    @property
    def survivors(self) -> int:
        return len(self.completion_order)

    @property
    def success(self) -> bool:
        return self.decode_status == SUCCESS


def sample_finish_times(workers: int, model: StragglerModel, rng: np.random.Generator,
                        forced_failures: Iterable[int] = ()) -> list[float]:
    """Finish time per worker (index ``i`` is worker ``i + 1``); failures are ``inf``."""
    times = model.shift + rng.exponential(1.0 / model.rate, size=workers)
    failed = rng.random(workers) < model.fail_prob
    out = [math.inf if f else float(x) for x, f in zip(times, failed)]
    for wid in forced_failures:
        if not 1 <= wid <= workers:
            raise InvalidParameter(f"worker id {wid} outside 1..{workers}")
        out[wid - 1] = math.inf
    return out


def simulate_round(code: Code, inputs: Sequence[FieldMatrix], model: StragglerModel,
                   forced_failures: Iterable[int] = (), rng=None) -> RoundOutcome:
    """Run one round of ``code`` on ``inputs`` under ``model``.

    ``rng`` defaults to a generator seeded with ``model.seed``.  Raises
    :class:`CorrectnessViolation` if a successful decode disagrees with the
    oracle product.
    """
    if rng is None:
        rng = np.random.default_rng(model.seed)
    n = inputs[0].rows
    times = sample_finish_times(code.P, model, rng, forced_failures)
    order = sorted((t, wid) for wid, t in enumerate(times, start=1) if math.isfinite(t))
    completion = tuple((wid, t) for t, wid in order)
    costs = code.costs(n)
    k = code.threshold
    if len(completion) < k:
        return RoundOutcome(completion, (), THRESHOLD_FAILURE, math.inf, costs, k)

    used = tuple(wid for wid, _ in completion[:k])
    shares = code.encode(inputs)
    results = [code.worker(shares[wid - 1]) for wid in used]
    decoded = code.decode(results, n)
    expected = code.oracle(inputs)
    if decoded != expected:
        raise CorrectnessViolation(
            f"{code.family} decode from workers {used} disagrees with the oracle product"
        )
    return RoundOutcome(completion, used, SUCCESS, completion[k - 1][1], costs, k, decoded)


@dataclass(frozen=True)
class SweepPoint:
    label: str
    P: int
    threshold: int
    trials: int
    successes: int
    mean_wall_time: float
    costs: CostReport

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


def sweep(codes: Sequence[Code], model: StragglerModel, trials: int, n: int,
          labels: Sequence[str] | None = None) -> list[SweepPoint]:
    """Monte-Carlo statistics for each code.

    Every code sees the same per-trial random streams (spawned from
    ``model.seed``), so comparisons across codes are paired.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    labels = list(labels) if labels is not None else [c.family for c in codes]
    seeds = np.random.SeedSequence(model.seed).spawn(trials)
    points = []
    for code, label in zip(codes, labels):
        wins, walls = 0, []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            inputs = code.random_inputs(n, rng)
            out = simulate_round(code, inputs, model, rng=rng)
            if out.success:
                wins += 1
                walls.append(out.wall_time)
        mean = float(np.mean(walls)) if walls else math.inf
        points.append(SweepPoint(label, code.P, code.threshold, trials, wins, mean, code.costs(n)))
    return points


def kth_finish_time(workers: int, k: int, model: StragglerModel, trials: int) -> float:
    """Mean ``k``-th order statistic of the finish times (``inf`` if any trial lacks ``k``)."""
    rng = np.random.default_rng(model.seed)
    acc = 0.0
    for _ in range(trials):
        times = sorted(sample_finish_times(workers, model, rng))
        acc += times[k - 1]
    return acc / trials
