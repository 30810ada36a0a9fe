import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsfts.partitioner import (PAPER_EXACT, RANGE_PAD, ConfigError, Universe, argmax_sets, fuzzify,
                               grid_partition, universe_from_data)

import oracles

G6 = grid_partition(Universe(0, 10), 6)


def test_universe_examples():
    assert universe_from_data([100, 150, 200], 0.2, PAPER_EXACT) == Universe(80, 240)
    assert universe_from_data([0, 3, 10], 0.0, RANGE_PAD) == Universe(0, 10)
    assert universe_from_data([-10, 0, 10], 0.2) == Universe(-14, 14)


def test_universe_errors():
    with pytest.raises(ConfigError, match="min"):
        universe_from_data([-1, 5], 0.2, PAPER_EXACT)
    with pytest.raises(ConfigError):
        universe_from_data([], 0.2)
    with pytest.raises(ConfigError):
        universe_from_data([1, 2], -0.1)
    with pytest.raises(ConfigError):
        universe_from_data([1, 2], 0.2, "bogus")
    with pytest.raises(ConfigError):
        Universe(1, 1)


def test_constant_series_widened():
    assert universe_from_data([5, 5, 5], 0.2) == Universe(4, 6)
    assert universe_from_data([0, 0], 0.2) == Universe(-0.2, 0.2)
    assert universe_from_data([5, 5], 0.0) == Universe(0, 10)


def test_grid_examples():
    assert G6.midpoints.tolist() == [0, 2, 4, 6, 8, 10]
    assert (G6.l[2], G6.c[2], G6.u[2]) == (2, 4, 6)
    assert (G6.l[0], G6.c[0], G6.u[0]) == (-2, 0, 2)
    assert (G6.l[5], G6.c[5], G6.u[5]) == (8, 10, 12)
    assert not G6.delta.any() and not G6.rho.any()
    with pytest.raises(ConfigError):
        grid_partition(Universe(0, 1), 2)


def test_grid_matches_oracle():
    p = grid_partition(Universe(-3.7, 12.1), 35)
    assert list(zip(p.l, p.c, p.u)) == oracles.grid(-3.7, 12.1, 35)


def test_fuzzify_examples(backend):
    assert fuzzify(4, G6, perturbed=False) == [0, 0, 1, 0, 0, 0]
    assert fuzzify(3, G6, perturbed=False) == [0, 0.5, 0.5, 0, 0, 0]
    assert fuzzify(11, G6, perturbed=False) == [0, 0, 0, 0, 0, 0.5]
    assert fuzzify(-5, G6) == [0] * 6


def test_fuzzify_uses_perturbation(backend):
    p = grid_partition(Universe(0, 10), 6)
    p.delta[:] = 1.0
    assert fuzzify(5, p) == [0, 0, 1, 0, 0, 0]
    assert fuzzify(5, p, perturbed=False) == [0, 0, 0.5, 0.5, 0, 0]
    p.reset_perturbations()
    assert fuzzify(5, p) == [0, 0, 0.5, 0.5, 0, 0]


def test_argmax_ties_and_midpoints(backend):
    assert argmax_sets([3, 4, 0, 10, 5, 9], G6).tolist() == [1, 2, 0, 5, 2, 4]
    with pytest.raises(ValueError):
        argmax_sets([1, float("nan")], G6)


def test_argmax_outside_supports_uses_nearest(backend):
    assert argmax_sets([-100, 100], G6).tolist() == [0, 5]


@given(st.floats(-1e3, 1e3), st.floats(0.01, 1e3), st.integers(3, 100), st.floats(0, 1))
def test_range_pad_covers_data_and_unity_holds(lo, span, k, frac):
    y = [lo, lo + span]
    uni = universe_from_data(y, 0.2)
    assert uni.lb <= min(y) and uni.ub >= max(y)
    p = grid_partition(uni, k)
    x = p.c[0] + frac * (p.c[-1] - p.c[0])
    assert sum(fuzzify(x, p, perturbed=False)) == pytest.approx(1.0, abs=1e-9)


def test_sets_view():
    s = G6.sets[3]
    assert s.index == 3 and (s.base.l, s.base.c, s.base.u) == (4, 6, 8)
    assert np.allclose(G6.effective_midpoints(), G6.c)
