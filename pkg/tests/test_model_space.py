import numpy as np
import pytest

from shiftreal import parse_symbol
from shiftreal.errors import NotInnerError
from shiftreal.model_space import (
    ModelSpaceContext,
    invariance_residual,
    kernel_element,
    partial_isometry_residual,
    project_model_space,
    range_completeness,
)
from shiftreal.realization import RealizationContext, StateVector, apply_multiplier, control_map, observe_trace
from shiftreal.signal import FreqSignal, GridConfig, TimeSignal, inner_product, to_frequency
from shiftreal.suites import random_decomposable_input, random_model_space_element, random_time_state


@pytest.fixture(scope="module")
def delay_ms(grid):
    return ModelSpaceContext(RealizationContext(grid, parse_symbol("delay:1")))


@pytest.fixture(scope="module")
def blaschke_ms(grid):
    return ModelSpaceContext(RealizationContext(grid, parse_symbol("rational:-1,1/1,1")))


@pytest.fixture(scope="module")
def rot_ms(matinner_file):
    g = GridConfig(2**15, 2**-7)
    return ModelSpaceContext(RealizationContext(g, parse_symbol(f"matinner:{matinner_file}")))


def exp_state(grid, a=1.0):
    return StateVector.from_time(TimeSignal.from_function(grid, lambda t: np.exp(-a * t)))


def indicator(grid, a, b):
    return TimeSignal.from_function(grid, lambda t: ((t >= a) & (t < b)).astype(float))


def test_rejects_non_inner(grid):
    with pytest.raises(NotInnerError):
        ModelSpaceContext(RealizationContext(grid, parse_symbol("rational:1/1,1")))


def test_projection_examples(grid, blaschke_ms, delay_ms):
    x = exp_state(grid)
    px = project_model_space(blaschke_ms, x)
    # on the grid V is spanned by the Cayley-ratio exponential of the Tustin
    # multiplier, which differs from sampled exp(-t) at O(dt^2)
    assert (px - x).norm < 1e-6 * x.norm
    gx = StateVector.from_time(TimeSignal(grid, apply_multiplier(blaschke_ms.ctx.multiplier, x.time.samples, grid), "causal"))
    assert project_model_space(blaschke_ms, gx).norm < 1e-8 * gx.norm
    box = project_model_space(delay_ms, StateVector.from_time(indicator(grid, 0, 2)))
    t = grid.t[grid.zero_index:]
    assert np.max(np.abs(box.time.causal_part - (t < 1))) < 1e-12


def test_projection_idempotent_selfadjoint(grid, delay_ms, blaschke_ms, rng):
    for mctx in (delay_ms, blaschke_ms):
        x, y = random_time_state(grid, rng), random_time_state(grid, rng)
        px, py = project_model_space(mctx, x), project_model_space(mctx, y)
        assert (project_model_space(mctx, px) - px).norm < 1e-10 * x.norm
        lhs = inner_product(px.freq, y.freq)
        rhs = inner_product(x.freq, py.freq)
        assert abs(lhs - rhs) < 1e-10 * x.norm * y.norm


def test_orthogonal_to_range_of_G(grid, delay_ms, blaschke_ms, rng):
    for mctx in (delay_ms, blaschke_ms):
        h = random_time_state(grid, rng)
        gh = apply_multiplier(mctx.ctx.multiplier, h.time.samples, grid)
        gh = StateVector.from_time(TimeSignal(grid, np.where(grid.mask("causal"), gh, 0), "causal"))
        py = project_model_space(mctx, random_time_state(grid, rng))
        assert abs(inner_product(gh.freq, py.freq)) < 1e-8 * gh.norm * py.norm


def test_restricted_observability(grid, blaschke_ms, rng):
    p = project_model_space(blaschke_ms, random_time_state(grid, rng))
    assert abs(observe_trace(p).norm - p.norm) < 1e-12 * p.norm


def test_invariance_examples(grid, delay_ms, blaschke_ms, rng):
    x = random_time_state(grid, rng)
    assert invariance_residual(delay_ms, x, 0.0) < 1e-15
    assert invariance_residual(delay_ms, x, 0.25) < 1e-10
    for t in (0.5, 1.0, 3.0):
        assert invariance_residual(blaschke_ms, exp_state(grid), t) < 1e-8


def test_control_map_lands_in_v(grid, delay_ms, blaschke_ms, rng):
    from shiftreal.suites import random_smooth_input
    for mctx in (delay_ms, blaschke_ms):
        u = random_smooth_input(grid, rng)
        bu = control_map(mctx.ctx, u)
        assert (bu - project_model_space(mctx, bu)).norm < 1e-8 * u.norm


def test_kernel_element_delay_example(grid, delay_ms):
    v = FreqSignal.from_function(grid, lambda s: 1 / (s - 1))
    q = kernel_element(delay_ms, v)
    t = grid.t[grid.zero_index:]
    ref = np.where(t >= 1, -np.exp(-(t - 1)), 0)
    err = np.linalg.norm(q.causal_part - ref) * np.sqrt(grid.dt)
    # the sampled pole 1/(s-1) has an O(dt) boundary error
    assert err < 1e-2
    assert control_map(delay_ms.ctx, q).norm < 1e-6 * q.norm
    assert kernel_element(delay_ms, FreqSignal(grid, np.zeros(grid.n))).norm == 0


def test_kernel_elements_blaschke(grid, blaschke_ms, rng):
    t = grid.t
    for _ in range(3):
        v = np.where(t < 0, (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)) * np.exp(0.5 * np.minimum(t, 0)), 0)
        q = kernel_element(blaschke_ms, to_frequency(TimeSignal(grid, v, "anticausal")))
        assert control_map(blaschke_ms.ctx, q).norm < 1e-6 * q.norm


def test_partial_isometry_examples(grid, delay_ms, blaschke_ms):
    r = partial_isometry_residual(delay_ms, indicator(grid, 0, 1))
    assert r.residual < 1e-6
    u = TimeSignal.from_function(grid, lambda t: np.exp(-t))
    assert abs(control_map(blaschke_ms.ctx, u).norm - u.norm) < 1e-8 * u.norm
    # v = 1/(s - 1) built from its anticausal trace -exp(t), a member of the kernel frame
    v = to_frequency(TimeSignal(grid, np.where(grid.t < 0, -np.exp(np.minimum(grid.t, 0)), 0), "anticausal"))
    q = kernel_element(delay_ms, v)
    r = partial_isometry_residual(delay_ms, q)
    assert r.residual < 1e-6


@pytest.mark.parametrize("which", ["delay_ms", "blaschke_ms"])
def test_partial_isometry_random(request, which, rng):
    mctx = request.getfixturevalue(which)
    for _ in range(20):
        u = random_decomposable_input(mctx, rng)
        r = partial_isometry_residual(mctx, u)
        assert r.residual < 1e-3
        assert r.orthogonality < 1e-6 * u.energy


def test_range_completeness_examples(grid, delay_ms, blaschke_ms, rng):
    v = StateVector.from_time(TimeSignal.from_function(grid, lambda t: np.where(t < 1, np.sin(3 * t) + t, 0)))
    assert range_completeness(delay_ms, v) < 1e-6
    assert range_completeness(blaschke_ms, exp_state(grid)) < 1e-6
    assert range_completeness(delay_ms, StateVector.zeros(grid)) == 0
    with pytest.raises(ValueError):
        range_completeness(delay_ms, StateVector.from_time(indicator(grid, 0, 2)))


def test_matrix_inner_long_horizon(rot_ms, rng):
    x = random_time_state(rot_ms.grid, rng)
    assert invariance_residual(rot_ms, x, 1.0) < 1e-8
    v = random_model_space_element(rot_ms, rng)
    assert range_completeness(rot_ms, v) < 1e-6
