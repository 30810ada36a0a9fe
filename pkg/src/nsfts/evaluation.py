"""Point-forecast accuracy metrics and the out-of-sample evaluation loop."""
from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fts, metamodels, model
from .partitioner import RANGE_PAD

METHODS = ("nsfts", "time-variant", "incremental-ensemble", "static-fts")

DEFAULT_PARAMS = {
    "k": 35,
    "w": model.DEFAULT_WINDOW,
    "W": 100,
    "R": 10,
    "M": 2,
    "padding": 0.2,
    "mode": RANGE_PAD,
    "normalize": True,
    "sigma_squared": False,
}


def _pair(y, yhat):
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape} targets vs {yhat.shape} forecasts")
    if y.size == 0:
        raise ValueError("no forecast pairs to score")
    return y, yhat


def rmse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def mape(y, yhat, percent: bool = True) -> float:
    """Mean absolute percentage error over non-zero targets (x100 unless ``percent=False``)."""
    y, yhat = _pair(y, yhat)
    nz = y != 0
    if not nz.any():
        raise ValueError("MAPE undefined: every target is zero")
    if not nz.all():
        warnings.warn(f"MAPE: excluded {int((~nz).sum())} zero target(s)", RuntimeWarning, stacklevel=2)
    v = float(np.mean(np.abs((y[nz] - yhat[nz]) / y[nz])))
    return 100.0 * v if percent else v


def theil_u1(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    den = math.sqrt(float(np.sum(y ** 2))) + math.sqrt(float(np.sum(yhat ** 2)))
    if den == 0:
        raise ValueError("Theil U1 undefined for all-zero targets and forecasts")
    return math.sqrt(float(np.sum((y - yhat) ** 2))) / den


def theil_u2(y, yhat, y_prev=None) -> float:
    """Model RMSE relative to the naive forecast ``y[t-1]``; 1.0 is parity with naive.

    Without ``y_prev`` the first pair only supplies the naive baseline, so pairs
    ``1..n-1`` are scored. With ``y_prev`` every pair is scored against it.
    """
    y, yhat = _pair(y, yhat)
    if y_prev is None:
        if y.size < 2:
            raise ValueError("Theil U2 needs at least 2 points")
        y_prev, y, yhat = y[:-1], y[1:], yhat[1:]
    else:
        y_prev = np.asarray(y_prev, dtype=float)
        if y_prev.shape != y.shape:
            raise ValueError("y_prev must align with y")
    naive = float(np.sqrt(np.mean((y - y_prev) ** 2)))
    if naive == 0:
        raise ValueError("Theil U2 undefined: naive forecast is perfect (constant series)")
    return float(np.sqrt(np.mean((y - yhat) ** 2))) / naive


@dataclass
class MetricReport:
    rmse: float
    mape: float
    u1: float
    u2: float
    n: int
    skipped: int
    dataset: str = ""
    method: str = ""
    seed: int | None = None
    params_hash: str = ""
    mape_zero_targets: int = 0
    fallbacks: int = 0
    trains: int = 0
    extras: dict = field(default_factory=dict, repr=False)

    CSV_COLUMNS = ("dataset", "method", "rmse", "mape_pct", "u1", "u2", "n", "skipped", "seed",
                   "params_hash", "fallbacks", "trains")

    def row(self) -> dict:
        return {"dataset": self.dataset, "method": self.method, "rmse": self.rmse, "mape_pct": self.mape,
                "u1": self.u1, "u2": self.u2, "n": self.n, "skipped": self.skipped,
                "seed": self.seed, "params_hash": self.params_hash,
                "fallbacks": self.fallbacks, "trains": self.trains}

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("extras")
        return d


def score(y, yhat, y_prev, skip=None, percent: bool = True, **meta) -> MetricReport:
    """Metrics over the pairs not marked in ``skip``; those are counted in ``skipped``."""
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    y_prev = np.asarray(y_prev, dtype=float)
    keep = np.ones(len(y), dtype=bool) if skip is None else ~np.asarray(skip, dtype=bool)
    ys, fs, ps = y[keep], yhat[keep], y_prev[keep]
    if ys.size == 0:
        raise ValueError("every forecast pair is flagged; nothing to score")
    zeros = int((ys == 0).sum())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mp = mape(ys, fs, percent)
    return MetricReport(rmse(ys, fs), mp, theil_u1(ys, fs), theil_u2(ys, fs, ps),
                        int(keep.sum()), int((~keep).sum()), mape_zero_targets=zeros, **meta)


def params_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def resolve_params(params: dict | None) -> dict:
    out = dict(DEFAULT_PARAMS)
    for key, v in (params or {}).items():
        if key not in out:
            raise ValueError(f"unknown parameter {key!r}; expected one of {sorted(out)}")
        out[key] = v
    return out


def split_index(n: int, split: float) -> int:
    if not 0.0 < split < 1.0:
        raise ValueError(f"split must be in (0, 1), got {split}")
    cut = int(split * n)
    if cut < 2 or n - cut < 2:
        raise ValueError(f"split {split} of {n} points leaves too few observations on one side")
    return cut


def forecast_test(method: str, y, cut: int, params: dict) -> tuple[fts.StreamResult, model.NsftsModel | None]:
    """Forecasts for ``y[cut:]``: element ``j`` predicts ``y[cut + j]`` using data up to ``cut + j - 1``."""
    p = params
    y = np.asarray(y, dtype=float)
    if method == "nsfts":
        m = model.train_nsfts(y[:cut], p["k"], p["w"], p["padding"], p["mode"], p["normalize"], p["sigma_squared"])
        first = m.last_forecast
        first_fb = m.last_fallback
        run = m.run_online(y[cut:-1])
        out = np.concatenate(([first], run.forecasts))
        fallback = np.concatenate(([first_fb], run.fallback))
        extras = {key: np.concatenate(([0.0], v)) for key, v in run.extras.items()}
        return fts.StreamResult(out, fallback, trains=1, extras=extras), m
    if method == "static-fts":
        core = fts.train(y[:cut], p["k"], p["padding"], p["mode"], p["normalize"])
        res = fts.run_static(core, y[cut - 1:-1])
        res.trains = 1
        return res, None
    policy = metamodels.RetrainPolicy(p["W"], p["R"])
    if method == "time-variant":
        res = metamodels.run_time_variant(y, policy, p["k"], p["padding"], p["mode"], p["normalize"])
    elif method == "incremental-ensemble":
        res = metamodels.run_incremental_ensemble(y, policy, p["M"], p["k"], p["padding"], p["mode"], p["normalize"])
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return res.window(cut - 1, len(y) - 1), None


def evaluate(method: str, dataset, split: float = 0.75, params: dict | None = None,
             exclude_fallback: bool = False, percent: bool = True, seed: int | None = None):
    """Train on the head of the series, stream the tail, score one-step-ahead forecasts.

    Warm-up pairs are always skipped. No-rule fallback forecasts are scored
    unless ``exclude_fallback`` is set; their count is reported either way.
    Returns ``(report, result)`` where ``result`` holds the aligned test forecasts.
    """
    p = resolve_params(params)
    y = dataset.values if hasattr(dataset, "values") else np.asarray(dataset, dtype=float)
    name = getattr(dataset, "name", "")
    cut = split_index(len(y), split)
    res, _ = forecast_test(method, y, cut, p)
    targets, prev = y[cut:], y[cut - 1:-1]
    rep = score(targets, res.forecasts, prev, res.flagged if exclude_fallback else res.warmup, percent,
                dataset=name, method=method, seed=seed, params_hash=params_hash({"split": split, **p}),
                trains=res.trains, fallbacks=int(res.fallback.sum()))
    res.extras["targets"] = targets
    return rep, res
