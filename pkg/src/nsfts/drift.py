"""Seeded synthetic concept-drift series and CSV ingestion.

Random numbers come from SplitMix64 so a series is reproducible from its seed in
any language:

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    z = z ^ (z >> 31)

A uniform draw is ``(z >> 11) * 2**-53`` in [0, 1). Standard normals use the
basic Box-Muller transform on two consecutive uniforms ``u1, u2``:
``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``, then ``... * sin(2 pi u2)``, cached so
each pair of uniforms yields two normals in that order.

With ``noise_ar = phi`` the unit-variance noise is AR(1),
``e[t] = phi * e[t-1] + sqrt(1 - phi**2) * z[t]`` with ``e[-1] = 0``; ``phi = 0``
gives independent draws.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

MASK64 = (1 << 64) - 1

KINDS = (
    "stationary",
    "stationary-blip",
    "sudden-variance",
    "sudden-mean",
    "sudden-mean-variance",
    "incremental-mean",
    "incremental-variance",
    "incremental-mean-variance",
)
MEAN_KINDS = {"sudden-mean", "sudden-mean-variance", "incremental-mean", "incremental-mean-variance"}
VARIANCE_KINDS = {"sudden-variance", "sudden-mean-variance", "incremental-variance", "incremental-mean-variance"}


class DataError(ValueError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1, u2 = self.uniform(), self.uniform()
        rad = math.sqrt(-2.0 * math.log(1.0 - u1))
        self._spare = rad * math.sin(2.0 * math.pi * u2)
        return rad * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class DriftSpec:
    kind: str
    length: int = 1000
    seed: int = 0
    base_mean: float = 10.0
    base_stdev: float = 1.0
    drift_magnitude: float | None = None
    drift_onset: float = 0.5
    # stdev multiplier for the combined mean-and-variance kinds
    variance_magnitude: float = 5.0
    noise_ar: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown drift kind {self.kind!r}; valid kinds: {', '.join(KINDS)}")
        if int(self.length) != self.length or self.length < 100:
            raise DataError(f"length must be an integer >= 100, got {self.length}")
        for name in ("base_mean", "base_stdev", "drift_onset", "variance_magnitude", "noise_ar"):
            if not math.isfinite(getattr(self, name)):
                raise DataError(f"{name} must be finite")
        if self.drift_magnitude is not None and not math.isfinite(self.drift_magnitude):
            raise DataError("drift_magnitude must be finite")
        if not self.base_stdev > 0:
            raise DataError(f"base_stdev must be > 0, got {self.base_stdev}")
        if not 0.0 <= self.drift_onset < 1.0:
            raise DataError(f"drift_onset must be in [0, 1), got {self.drift_onset}")
        if not -1.0 < self.noise_ar < 1.0:
            raise DataError(f"noise_ar must be in (-1, 1), got {self.noise_ar}")

    @property
    def magnitude(self) -> float:
        if self.drift_magnitude is not None:
            return self.drift_magnitude
        # mean shifts and the blip are in stdev units; variance drifts are stdev multipliers
        return 10.0 if self.kind in MEAN_KINDS or self.kind == "stationary-blip" else 5.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["drift_magnitude"] = self.magnitude
        return d


@dataclass(eq=False)
class Dataset:
    name: str
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise DataError(f"dataset {self.name!r} is empty")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"dataset {self.name!r} contains non-finite values")

    def __len__(self):
        return len(self.values)


def schedule(spec: DriftSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-step mean and standard deviation before noise is drawn."""
    n = spec.length
    onset = int(spec.drift_onset * n)
    mu = np.full(n, spec.base_mean)
    sd = np.full(n, spec.base_stdev)
    kind = spec.kind
    if kind == "stationary" or kind == "stationary-blip":
        return mu, sd
    mean_shift = spec.magnitude * spec.base_stdev
    if kind == "sudden-mean-variance" or kind == "incremental-mean-variance":
        var_factor = spec.variance_magnitude
    else:
        var_factor = spec.magnitude
    t = np.arange(n)
    if kind.startswith("sudden"):
        frac = (t >= onset).astype(float)
    else:
        frac = np.clip((t - onset) / max(n - 1 - onset, 1), 0.0, 1.0)
    if kind in MEAN_KINDS:
        mu = spec.base_mean + frac * mean_shift
    if kind in VARIANCE_KINDS:
        sd = spec.base_stdev * (1.0 + frac * (var_factor - 1.0))
    return mu, sd


def generate(spec: DriftSpec, name: str | None = None) -> Dataset:
    mu, sd = schedule(spec)
    rng = SplitMix64(spec.seed)
    phi = spec.noise_ar
    if phi == 0.0:
        noise = np.array([rng.normal() for _ in range(spec.length)])
    else:
        scale = math.sqrt(1.0 - phi * phi)
        noise = np.empty(spec.length)
        e = 0.0
        for t in range(spec.length):
            e = phi * e + scale * rng.normal()
            noise[t] = e
    y = mu + sd * noise
    if spec.kind == "stationary-blip":
        y[int(spec.drift_onset * spec.length)] += spec.magnitude * spec.base_stdev
    return Dataset(name or spec.kind, y, {"synthetic": spec.to_dict()})


def read_column(path, value_column: int | str = 0, has_header: bool = False) -> list[float]:
    """Values of one numeric column in file order; may be empty. Blank rows and non-numeric cells are errors."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        col = value_column
        for rowno, row in enumerate(reader, start=1):
            if rowno == 1 and has_header:
                if isinstance(value_column, str):
                    names = [h.strip() for h in row]
                    if value_column not in names:
                        raise DataError(f"{path}: column {value_column!r} not in header {names}")
                    col = names.index(value_column)
                continue
            if not row or all(not cell.strip() for cell in row):
                raise DataError(f"{path}: row {rowno} is blank")
            if isinstance(col, str):
                raise DataError(f"{path}: column {value_column!r} selected by name but file has no header")
            if col >= len(row):
                raise DataError(f"{path}: row {rowno} has no column {col}")
            cell = row[col].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {rowno}, column {col}: {cell!r} is not numeric") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: row {rowno}, column {col}: {cell!r} is not finite")
            values.append(v)
    return values


def load_csv(path, value_column: int | str = 0, has_header: bool = False, name: str | None = None) -> Dataset:
    values = read_column(path, value_column, has_header)
    if not values:
        raise DataError(f"{path}: no data rows")
    return Dataset(name or Path(path).stem, np.array(values), {"path": str(path), "column": value_column})
