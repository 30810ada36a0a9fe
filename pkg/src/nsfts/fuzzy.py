"""Triangular membership functions and the perturbation that moves and widens them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import kernels


class InvalidTriangle(ValueError):
    pass


@dataclass(frozen=True)
class Triangle:
    l: float
    c: float
    u: float

    def __post_init__(self):
        if not (self.l <= self.c <= self.u):
            raise InvalidTriangle(f"need l <= c <= u, got ({self.l}, {self.c}, {self.u})")

    @property
    def width(self) -> float:
        return self.u - self.l


@dataclass(frozen=True)
class Perturbation:
    """Displacement ``delta`` applied to all three vertices, plus ``rho`` of extra support width."""

    delta: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta) or not math.isfinite(self.rho):
            raise ValueError("perturbation must be finite")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")

    @property
    def is_identity(self) -> bool:
        return self.delta == 0.0 and self.rho == 0.0


IDENTITY = Perturbation()


@dataclass(frozen=True)
class FuzzySet:
    index: int
    base: Triangle
    pert: Perturbation = field(default=IDENTITY)

    @property
    def effective(self) -> Triangle:
        return apply_perturbation(self.base, self.pert)


def membership(x: float, t: Triangle) -> float:
    """Grade of ``x`` in triangle ``t``; a zero-width branch is crisp at its vertex."""
    if not (t.l <= t.c <= t.u):
        raise InvalidTriangle(f"need l <= c <= u, got ({t.l}, {t.c}, {t.u})")
    return kernels.active.membership(float(x), t.l, t.c, t.u)


def apply_perturbation(t: Triangle, p: Perturbation) -> Triangle:
    h = p.rho / 2.0
    return Triangle((t.l + p.delta) - h, t.c + p.delta, (t.u + p.delta) + h)


def perturbed_membership(x: float, s: FuzzySet) -> float:
    return membership(x, apply_perturbation(s.base, s.pert))
