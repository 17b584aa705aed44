import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftreal.errors import GridMismatchError, HardyMembershipError
from shiftreal.signal import (
    FreqSignal,
    GridConfig,
    TimeSignal,
    causal_truncate,
    inner_product,
    project_h2,
    reflect,
    to_frequency,
    to_time,
)


def box(grid, a=0.0, b=1.0):
    return TimeSignal.from_function(grid, lambda t: ((t >= a) & (t < b)).astype(float))


def test_grid_validation():
    with pytest.raises(ValueError):
        GridConfig(12, 0.1)
    with pytest.raises(ValueError):
        GridConfig(8, 0.1)
    with pytest.raises(ValueError):
        GridConfig(64, -1.0)
    g = GridConfig(64, 0.5)
    assert g.horizon == 32.0
    assert np.isclose(g.omega[1] - g.omega[0], 2 * np.pi / 32)


def test_steps_requires_grid_multiple():
    g = GridConfig(64, 0.25)
    assert g.steps(0.75) == 3
    with pytest.raises(ValueError):
        g.steps(0.1)
    with pytest.raises(ValueError):
        g.steps(-0.25)


def test_exponential_transform(grid):
    F = to_frequency(TimeSignal.from_function(grid, lambda t: np.exp(-t)))
    w = grid.omega
    band = np.abs(w) < 20
    ref = 1 / (1 + 1j * w)
    assert np.max(np.abs(F.samples - ref)[band]) < 1e-4


def test_box_transform_value_at_zero(grid):
    F = to_frequency(box(grid))
    assert abs(F.samples[grid.n // 2] - 1) < 1e-12
    w = grid.omega[grid.n // 2 + 1: grid.n // 2 + 200]
    ref = (1 - np.exp(-1j * w)) / (1j * w)
    assert np.max(np.abs(F.samples[grid.n // 2 + 1: grid.n // 2 + 200] - ref)) < 1e-4


def test_zero_signal(grid):
    F = to_frequency(TimeSignal.zeros(grid))
    assert F.energy == 0


def test_inverse_of_first_order_pole(grid):
    F = FreqSignal.from_function(grid, lambda s: 1 / (1 + s))
    x = to_time(F, "causal")
    t = grid.t
    far = (t > 0.5) & (t < 10)
    assert np.max(np.abs(x.samples[far] - np.exp(-t[far]))) < 1e-3


def test_round_trip(grid, rng):
    x = TimeSignal(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n), "two_sided")
    back = to_time(to_frequency(x))
    assert np.max(np.abs(back.samples - x.samples)) < 1e-12


def test_anticausal_pole_rejected_as_causal(grid):
    F = FreqSignal.from_function(grid, lambda s: 1 / (1 - s))
    with pytest.raises(HardyMembershipError):
        to_time(F, "causal")
    assert to_time(F, "anticausal").support == "anticausal"


def test_inner_products(grid):
    f1 = FreqSignal.from_function(grid, lambda s: 1 / (s + 1))
    f2 = FreqSignal.from_function(grid, lambda s: 1 / (s + 2))
    # sampled 1/(s+a) has O(dt) boundary error from the jump of its trace at t = 0
    assert abs(inner_product(f1, f1) - 0.5) < 1e-3
    assert abs(inner_product(f1, f2) - 1 / 3) < 1e-3
    e1 = to_frequency(TimeSignal.from_function(grid, lambda t: np.exp(-t)))
    e2 = to_frequency(TimeSignal.from_function(grid, lambda t: np.exp(-2 * t)))
    assert abs(inner_product(e1, e1) - 0.5) < 1e-5
    assert abs(inner_product(e1, e2) - 1 / 3) < 1e-5
    assert inner_product(FreqSignal(grid, np.zeros(grid.n)), FreqSignal(grid, np.zeros(grid.n))) == 0


def test_inner_product_grid_mismatch():
    a = FreqSignal(GridConfig(64, 0.5), np.ones(64))
    b = FreqSignal(GridConfig(64, 0.25), np.ones(64))
    with pytest.raises(GridMismatchError):
        inner_product(a, b)


def test_project_lorentzian(grid):
    F = FreqSignal.from_function(grid, lambda s: 1 / (1 - s * s))
    plus = project_h2(F, "plus")
    ref = to_frequency(TimeSignal.from_function(grid, lambda t: 0.5 * np.exp(-t)))
    assert np.max(np.abs(plus.samples - ref.samples)) < 1e-3


def test_project_causal_unchanged(grid):
    F = to_frequency(TimeSignal.from_function(grid, lambda t: np.exp(-t)))
    assert np.max(np.abs(project_h2(F, "plus").samples - F.samples)) < 1e-12


def test_reflect_swaps_support(grid):
    x = box(grid)
    r = reflect(x)
    assert r.support == "anticausal"
    assert np.allclose(reflect(r).samples, x.samples)
    assert causal_truncate(r).energy == 0


small = st.integers(min_value=4, max_value=8).map(lambda k: GridConfig(2**k, 0.125))


@settings(max_examples=40, deadline=None)
@given(small, st.integers(0, 2**31 - 1))
def test_parseval_and_split(g, seed):
    r = np.random.default_rng(seed)
    x = TimeSignal(g, r.standard_normal(g.n) + 1j * r.standard_normal(g.n), "two_sided")
    y = TimeSignal(g, r.standard_normal(g.n) + 1j * r.standard_normal(g.n), "two_sided")
    F, G = to_frequency(x), to_frequency(y)
    assert abs(F.energy - x.energy) <= 1e-12 * x.energy
    plus, minus = project_h2(F, "plus"), project_h2(F, "minus")
    assert np.max(np.abs(plus.samples + minus.samples - F.samples)) < 1e-12 * (1 + F.norm)
    orth = abs(inner_product(project_h2(F, "plus"), project_h2(G, "minus")))
    assert orth < 1e-10 * F.norm * G.norm
    again = project_h2(plus, "plus")
    assert np.max(np.abs(again.samples - plus.samples)) < 1e-12 * (1 + F.norm)
