"""Non-stationary FTS: one training pass, then per-observation perturbation of the fuzzy sets.

After training, the rule base is frozen. Every new observation pushes a residual
into a FIFO window; the window's mean and spread, together with how far the
observation falls outside the training universe, set an absolute displacement
and widening for each set. Forecasts fire the frozen rules against the
perturbed sets and defuzzify over the perturbed midpoints.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .fts import FtsModel, Forecast, RuleBase, StreamResult, train
from .partitioner import RANGE_PAD, Universe, grid_partition

CHECKPOINT_FORMAT = "nsfts-checkpoint"
CHECKPOINT_VERSION = 1
DEFAULT_WINDOW = 10


class CheckpointError(ValueError):
    pass


class ResidualWindow:
    """Fixed-capacity FIFO of residuals backed by a ring buffer."""

    def __init__(self, capacity: int, values=()):
        if capacity < 2:
            raise ValueError(f"residual window capacity must be >= 2, got {capacity}")
        self.capacity = capacity
        self.buf = np.zeros(capacity)
        self.head = 0
        self.count = 0
        for v in values:
            self.push(v)

    def push(self, e: float):
        if self.count < self.capacity:
            self.buf[(self.head + self.count) % self.capacity] = e
            self.count += 1
        else:
            self.buf[self.head] = e
            self.head = (self.head + 1) % self.capacity

    def values(self) -> list[float]:
        return [float(self.buf[(self.head + j) % self.capacity]) for j in range(self.count)]

    def __len__(self):
        return self.count


@dataclass(frozen=True)
class DisplacementState:
    d_l: float
    d_u: float
    r: float
    mp_r: float


def displacements(y_t: float, universe: Universe) -> DisplacementState:
    d_l = universe.lb - y_t if y_t < universe.lb else 0.0
    d_u = y_t - universe.ub if y_t > universe.ub else 0.0
    r = d_u - d_l
    return DisplacementState(d_l, d_u, r, r / 2.0)


def residual_stats(rw: ResidualWindow, sigma_squared: bool = False) -> tuple[float, float]:
    """Mean and population standard deviation (variance if ``sigma_squared``)."""
    if rw.count == 0:
        raise ValueError("residual window is empty")
    return kernels.active.window_stats(rw.buf, rw.head, rw.count, sigma_squared)


def _params(mean, sigma, r, k):
    delta, rho = np.zeros(k), np.zeros(k)
    kernels.active.adapt_params(float(mean), float(sigma), float(r), delta, rho)
    return delta, rho


def compute_deltas(stats: tuple[float, float], disp: DisplacementState, k: int) -> np.ndarray:
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    return _params(stats[0], stats[1], disp.r, k)[0]


def compute_rhos(deltas) -> np.ndarray:
    d = [float(v) for v in deltas]
    k = len(d)
    if k < 3:
        raise ValueError(f"need at least 3 displacements, got {k}")
    return np.array([abs(d[0] - d[1])] + [abs(d[i - 1] - d[i + 1]) for i in range(1, k - 1)]
                    + [abs(d[k - 2] - d[k - 1])])


class NsftsModel:
    def __init__(self, core: FtsModel, residuals: ResidualWindow,
                 last_forecast: float | None = None, sigma_squared: bool = False):
        self.core = core
        self.residuals = residuals
        self.last_forecast = last_forecast
        self.last_fallback = False
        self.sigma_squared = sigma_squared

    @property
    def partition(self):
        return self.core.partition

    @property
    def rulebase(self) -> RuleBase:
        return self.core.rulebase

    @property
    def k(self) -> int:
        return self.core.partition.k

    def adapt(self, y_new: float) -> NsftsModel:
        y_new = float(y_new)
        if not math.isfinite(y_new):
            raise ValueError(f"cannot adapt to non-finite observation {y_new}")
        p, rw = self.partition, self.residuals
        has_last = self.last_forecast is not None
        rw.head, rw.count = kernels.active.adapt_step(
            y_new, p.universe.lb, p.universe.ub, p.delta, p.rho, rw.buf, rw.head, rw.count,
            self.last_forecast if has_last else 0.0, has_last, self.sigma_squared)
        return self

    def forecast(self, x: float) -> Forecast:
        p = self.partition
        ptr, idx = self.rulebase.csr()
        v, matched = kernels.active.forecast(float(x), p.l, p.c, p.u, p.delta, p.rho,
                                             ptr, idx, self.core.normalize)
        self.last_forecast = v
        self.last_fallback = not matched
        return Forecast(v, not matched)

    def run_online(self, y) -> StreamResult:
        y = np.ascontiguousarray(y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise ValueError("stream contains non-finite values")
        n = len(y)
        out, dmin, dmax, rmax = np.empty(n), np.empty(n), np.empty(n), np.empty(n)
        matched = np.zeros(n, dtype=np.uint8)
        if n == 0:
            return StreamResult(out, matched.astype(bool),
                                extras={"delta_min": dmin, "delta_max": dmax, "rho_max": rmax})
        p, rw = self.partition, self.residuals
        ptr, idx = self.rulebase.csr()
        has_last = self.last_forecast is not None
        rw.head, rw.count, self.last_forecast = kernels.active.run_stream(
            y, p.universe.lb, p.universe.ub, p.l, p.c, p.u, p.delta, p.rho, ptr, idx,
            rw.buf, rw.head, rw.count, self.last_forecast if has_last else 0.0, has_last,
            self.core.normalize, self.sigma_squared, out, matched, dmin, dmax, rmax)
        self.last_fallback = not matched[-1]
        return StreamResult(out, matched == 0,
                            extras={"delta_min": dmin, "delta_max": dmax, "rho_max": rmax})

    # -- checkpointing -------------------------------------------------------

    def to_dict(self) -> dict:
        p = self.partition
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "k": p.k,
            "universe": [p.universe.lb, p.universe.ub],
            "normalize": self.core.normalize,
            "sigma_squared": self.sigma_squared,
            "rules": self.rulebase.to_json(),
            "delta": p.delta.tolist(),
            "rho": p.rho.tolist(),
            "residuals": {"capacity": self.residuals.capacity, "values": self.residuals.values()},
            "last_forecast": self.last_forecast,
            "last_fallback": self.last_fallback,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> NsftsModel:
        if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
            raise CheckpointError("not an nsfts checkpoint document")
        if doc.get("version") != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"checkpoint version {doc.get('version')!r} unsupported; this build reads version {CHECKPOINT_VERSION}")
        try:
            k = int(doc["k"])
            p = grid_partition(Universe(*map(float, doc["universe"])), k)
            rb = RuleBase.from_json(k, doc["rules"])
            delta, rho = np.array(doc["delta"], dtype=float), np.array(doc["rho"], dtype=float)
            if delta.shape != (k,) or rho.shape != (k,):
                raise CheckpointError(f"perturbation arrays must have length k={k}")
            p.delta[:] = delta
            p.rho[:] = rho
            res = doc["residuals"]
            if len(res["values"]) > int(res["capacity"]):
                raise CheckpointError("residual window holds more values than its capacity")
            rw = ResidualWindow(int(res["capacity"]), [float(v) for v in res["values"]])
            last = doc["last_forecast"]
            m = cls(FtsModel(p, rb, bool(doc["normalize"])), rw,
                    None if last is None else float(last), bool(doc["sigma_squared"]))
            m.last_fallback = bool(doc.get("last_fallback", False))
            return m
        except (KeyError, TypeError) as e:
            raise CheckpointError(f"malformed checkpoint: {e!r}") from e

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> NsftsModel:
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as e:
                raise CheckpointError(f"checkpoint is not valid JSON: {e}") from e
        return cls.from_dict(doc)


def train_nsfts(y, k: int = 35, w: int = DEFAULT_WINDOW, padding: float = 0.2, mode: str = RANGE_PAD,
                normalize: bool = True, sigma_squared: bool = False) -> NsftsModel:
    y = np.asarray(y, dtype=float)
    if w < 2:
        raise ValueError(f"residual window w must be >= 2, got {w}")
    if len(y) <= w:
        raise ValueError(f"training series needs more than w={w} points, got {len(y)}")
    core = train(y, k, padding, mode, normalize)
    rw = ResidualWindow(w)
    for t in range(len(y) - w, len(y)):
        rw.push(float(y[t]) - core.predict(y[t - 1]).value)
    m = NsftsModel(core, rw, sigma_squared=sigma_squared)
    m.forecast(y[-1])
    return m


def adapt(model: NsftsModel, y_new: float) -> NsftsModel:
    return model.adapt(y_new)


def forecast(model: NsftsModel, x: float) -> Forecast:
    return model.forecast(x)


def run_online(model: NsftsModel, y) -> StreamResult:
    """Adapt to each observation, then forecast the next one from it."""
    return model.run_online(y)
