"""Retraining policies wrapped around the conventional FTS model.

Both policies retrain once ``W`` observations are available and then every ``R``
observations, always on the most recent ``W``. Forecasts issued before the first
training are naive (last observation) and flagged as warm-up.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import fts
from .fts import StreamResult
from .partitioner import RANGE_PAD


@dataclass(frozen=True)
class RetrainPolicy:
    window: int = 100
    refresh: int = 10

    def __post_init__(self):
        if self.window < 2:
            raise ValueError(f"memory window W must be >= 2, got {self.window}")
        if self.refresh < 1:
            raise ValueError(f"refresh interval R must be >= 1, got {self.refresh}")

    def due(self, seen: int) -> bool:
        """True when a (re)train is scheduled after ``seen`` observations."""
        return seen >= self.window and (seen - self.window) % self.refresh == 0

    def expected_trains(self, n: int) -> int:
        return 0 if n < self.window else (n - self.window) // self.refresh + 1


def mean_combine(values: list[float]) -> float:
    s = 0.0
    for v in values:
        s = s + v
    return s / len(values)


class EnsembleState:
    """FIFO pool of at most ``capacity`` models; appending at capacity drops the oldest."""

    def __init__(self, policy: RetrainPolicy, capacity: int = 2, combine=mean_combine):
        if capacity < 1:
            raise ValueError(f"ensemble size M must be >= 1, got {capacity}")
        self.policy = policy
        self.capacity = capacity
        self.members: deque[fts.FtsModel] = deque(maxlen=capacity)
        self.combine = combine

    def append(self, model: fts.FtsModel):
        self.members.append(model)

    def predict(self, x: float) -> tuple[float, bool]:
        preds = [m.predict(x) for m in self.members]
        return self.combine([p.value for p in preds]), all(p.fallback for p in preds)


def _check(y, policy):
    y = np.asarray(y, dtype=float)
    if policy.window >= len(y):
        raise ValueError(f"memory window W={policy.window} must be shorter than the series ({len(y)} points)")
    return y


def _run(y, policy, capacity, k, padding, mode, normalize, combine=mean_combine):
    ens = EnsembleState(policy, capacity, combine)
    n = len(y)
    out = np.empty(n)
    fallback = np.zeros(n, dtype=bool)
    warm = np.zeros(n, dtype=bool)
    trains = 0
    values = y.tolist()
    for t, v in enumerate(values):
        seen = t + 1
        if policy.due(seen):
            ens.append(fts.train(y[seen - policy.window:seen], k, padding, mode, normalize))
            trains += 1
        if ens.members:
            out[t], fallback[t] = ens.predict(v)
        else:
            out[t] = v
            warm[t] = True
    return StreamResult(out, fallback, warm, trains=trains)


def run_time_variant(y, policy: RetrainPolicy = RetrainPolicy(), k: int = 35, padding: float = 0.2,
                     mode: str = RANGE_PAD, normalize: bool = True) -> StreamResult:
    """Single model rebuilt from scratch on each schedule tick; nothing is kept between retrains."""
    return _run(_check(y, policy), policy, 1, k, padding, mode, normalize)


def run_incremental_ensemble(y, policy: RetrainPolicy = RetrainPolicy(), M: int = 2, k: int = 35,
                             padding: float = 0.2, mode: str = RANGE_PAD, normalize: bool = True,
                             combine=mean_combine) -> StreamResult:
    return _run(_check(y, policy), policy, M, k, padding, mode, normalize, combine)
