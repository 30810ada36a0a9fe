"""Conventional first-order fuzzy time series: rule induction and static forecasting."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .partitioner import RANGE_PAD, Partition, argmax_sets, grid_partition, universe_from_data


class RuleBase:
    """Precedent set index -> ordered, duplicate-free consequent indices."""

    def __init__(self, k: int, rules: dict[int, list[int]] | None = None):
        self.k = k
        self.rules: dict[int, list[int]] = {}
        for lhs, rhs in (rules or {}).items():
            for r in rhs:
                self.add(lhs, r)
        self._csr = None

    def add(self, lhs: int, rhs: int):
        if not (0 <= lhs < self.k and 0 <= rhs < self.k):
            raise ValueError(f"rule {lhs}->{rhs} outside [0, {self.k - 1}]")
        cons = self.rules.setdefault(int(lhs), [])
        if rhs not in cons:
            cons.append(int(rhs))
            self._csr = None

    def __len__(self):
        return len(self.rules)

    def __contains__(self, lhs):
        return lhs in self.rules

    def __getitem__(self, lhs) -> list[int]:
        return self.rules[lhs]

    def __eq__(self, other):
        return isinstance(other, RuleBase) and self.k == other.k and self.rules == other.rules

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Consequents flattened by precedent index: ``idx[ptr[j]:ptr[j+1]]`` is the RHS of ``j``."""
        if self._csr is None:
            ptr = np.zeros(self.k + 1, dtype=np.int64)
            idx = []
            for j in range(self.k):
                rhs = self.rules.get(j, ())
                idx.extend(rhs)
                ptr[j + 1] = ptr[j] + len(rhs)
            self._csr = (ptr, np.array(idx, dtype=np.int64))
        return self._csr

    def to_json(self) -> list:
        return [[lhs, list(rhs)] for lhs, rhs in self.rules.items()]

    @classmethod
    def from_json(cls, k: int, rows) -> RuleBase:
        rb = cls(k)
        for lhs, rhs in rows:
            if not rhs:
                raise ValueError(f"rule for precedent {lhs} has no consequents")
            for r in rhs:
                rb.add(int(lhs), int(r))
        return rb


def extract_patterns(y, p: Partition) -> list[tuple[int, int]]:
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least 2 observations to extract temporal patterns")
    seq = argmax_sets(y, p).tolist()
    return list(zip(seq[:-1], seq[1:]))


def build_rulebase(patterns, k: int | None = None) -> RuleBase:
    patterns = list(patterns)
    if k is None:
        k = 1 + max((max(a, b) for a, b in patterns), default=-1)
    rb = RuleBase(k)
    for lhs, rhs in patterns:
        rb.add(lhs, rhs)
    return rb


@dataclass(eq=False)
class Forecast:
    value: float
    fallback: bool = False

    def __float__(self):
        return self.value


@dataclass(eq=False)
class FtsModel:
    partition: Partition
    rulebase: RuleBase
    normalize: bool = True
    _zero: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.rulebase.k != self.partition.k:
            raise ValueError(f"rulebase k={self.rulebase.k} != partition k={self.partition.k}")
        self._zero = np.zeros(self.partition.k)

    def predict(self, x: float) -> Forecast:
        p = self.partition
        ptr, idx = self.rulebase.csr()
        v, matched = kernels.active.forecast(float(x), p.l, p.c, p.u, self._zero, self._zero,
                                             ptr, idx, self.normalize)
        return Forecast(v, not matched)


def forecast_static(x: float, m: FtsModel) -> Forecast:
    """One-step forecast from unperturbed sets; falls back to the nearest midpoint if no rule fires."""
    return m.predict(x)


# incremented on every train() call; the meta-models and tests read it
train_calls = 0


def train(y, k: int = 35, padding: float = 0.2, mode: str = RANGE_PAD, normalize: bool = True) -> FtsModel:
    global train_calls
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError(f"need at least 2 observations to train, got {y.size}")
    train_calls += 1
    p = grid_partition(universe_from_data(y, padding, mode), k)
    return FtsModel(p, build_rulebase(extract_patterns(y, p), k), normalize)


@dataclass(eq=False)
class StreamResult:
    """Aligned one-step-ahead output of a streaming run: ``forecasts[t]`` predicts ``y[t+1]``.

    ``fallback`` marks forecasts where no rule fired; ``warmup`` marks naive
    forecasts issued before a model existed. ``trains`` counts model trainings.
    """

    forecasts: np.ndarray
    fallback: np.ndarray
    warmup: np.ndarray = None
    trains: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.warmup is None:
            self.warmup = np.zeros(len(self.forecasts), dtype=bool)

    def __len__(self):
        return len(self.forecasts)

    @property
    def flagged(self) -> np.ndarray:
        return self.fallback | self.warmup

    def window(self, start, stop=None) -> StreamResult:
        sl = slice(start, stop)
        return StreamResult(self.forecasts[sl], self.fallback[sl], self.warmup[sl], self.trains,
                            {key: v[sl] for key, v in self.extras.items()})


def run_static(model: FtsModel, y) -> StreamResult:
    y = np.asarray(y, dtype=float)
    out = np.empty(len(y))
    flags = np.zeros(len(y), dtype=bool)
    for t, v in enumerate(y.tolist()):
        f = model.predict(v)
        out[t] = f.value
        flags[t] = f.fallback
    return StreamResult(out, flags)
