"""Universe-of-discourse estimation and uniform grid partitioning."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .fuzzy import FuzzySet, Perturbation, Triangle

RANGE_PAD = "range-pad"
PAPER_EXACT = "paper-exact"
UNIVERSE_MODES = (RANGE_PAD, PAPER_EXACT)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Universe:
    lb: float
    ub: float

    def __post_init__(self):
        if not self.lb < self.ub:
            raise ConfigError(f"universe needs lb < ub, got [{self.lb}, {self.ub}]")


def universe_from_data(y, padding: float = 0.2, mode: str = RANGE_PAD) -> Universe:
    """Bounds of ``y`` extrapolated by ``padding``.

    ``range-pad`` pads by a fraction of the data range on both sides.
    ``paper-exact`` pads by a fraction of the bound values themselves and only
    makes sense for strictly positive data.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ConfigError("cannot estimate a universe from an empty series")
    if padding < 0:
        raise ConfigError(f"padding must be >= 0, got {padding}")
    lo, hi = float(y.min()), float(y.max())
    if mode == RANGE_PAD:
        spread = hi - lo
        if spread == 0:
            pad = padding * max(abs(hi), 1.0)
            if pad == 0:
                pad = max(abs(hi), 1.0)
            return Universe(lo - pad, hi + pad)
        return Universe(lo - padding * spread, hi + padding * spread)
    if mode == PAPER_EXACT:
        if lo <= 0:
            raise ConfigError(
                f"paper-exact universe needs min(Y) > 0 (got {lo}); the scaled padding "
                "would shrink or flip the lower bound. Use range-pad instead."
            )
        lb, ub = lo - lo * padding, hi + hi * padding
        if lb == ub:
            raise ConfigError("paper-exact universe is degenerate for a constant series with zero padding")
        return Universe(lb, ub)
    raise ConfigError(f"unknown universe mode {mode!r}; expected one of {UNIVERSE_MODES}")


@dataclass(eq=False)
class Partition:
    """``k`` overlapping triangles on a uniform grid.

    Base vertices live in the ``l``, ``c``, ``u`` arrays; the live perturbation
    state is in ``delta`` and ``rho`` and is written only by the adaptation step.
    """

    universe: Universe
    k: int
    l: np.ndarray
    c: np.ndarray
    u: np.ndarray
    delta: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)

    @property
    def step(self) -> float:
        return (self.universe.ub - self.universe.lb) / (self.k - 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.c

    @property
    def sets(self) -> list[FuzzySet]:
        return [
            FuzzySet(i, Triangle(float(self.l[i]), float(self.c[i]), float(self.u[i])),
                     Perturbation(float(self.delta[i]), float(self.rho[i])))
            for i in range(self.k)
        ]

    def effective_midpoints(self) -> np.ndarray:
        return self.c + self.delta

    def reset_perturbations(self):
        self.delta[:] = 0.0
        self.rho[:] = 0.0


def grid_partition(universe: Universe, k: int) -> Partition:
    if k < 3:
        raise ConfigError(f"k must be >= 3, got {k}")
    step = (universe.ub - universe.lb) / (k - 1)
    c = np.array([universe.lb + i * (universe.ub - universe.lb) / (k - 1) for i in range(k)])
    # boundary sets borrow a mirrored neighbour one step outside the universe
    ext = np.concatenate(([c[0] - step], c, [c[-1] + step]))
    return Partition(universe, k, ext[:-2].copy(), c, ext[2:].copy(), np.zeros(k), np.zeros(k))


def fuzzify(x: float, p: Partition, perturbed: bool = True) -> list[float]:
    if perturbed:
        return kernels.active.fuzzify(float(x), p.l, p.c, p.u, p.delta, p.rho)
    z = np.zeros(p.k)
    return kernels.active.fuzzify(float(x), p.l, p.c, p.u, z, z)


def argmax_sets(y, p: Partition) -> np.ndarray:
    """Index of the highest base membership for each value; ties go to the lower index."""
    y = np.ascontiguousarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    return kernels.active.argmax_sequence(y, p.l, p.c, p.u)
