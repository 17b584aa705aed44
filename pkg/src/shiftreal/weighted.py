"""Weighted state space with norm integral_0^inf |exp(-t) f(t)|^2 dt.

Signals are treated as piecewise constant on the grid cells, and the weight
is integrated exactly over each cell, w_k = int_cell exp(-2t) dt.  Indicator
functions of grid-aligned intervals then have exact weighted norms, and the
shift bound ||T(t) f||_w <= exp(t) ||f||_w holds on the grid with the same
equality case as in the continuum (f vanishing on [0, t]).
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .signal import TimeSignal, causal_truncate


@dataclass(frozen=True, eq=False)
class WeightedSignal:
    base: TimeSignal
    weight_rate: float = 1.0

    def __post_init__(self):
        if self.weight_rate != 1.0:
            raise ValueError("the weighted space uses the fixed weight exp(-t)")
        object.__setattr__(self, "base", causal_truncate(self.base))

    @property
    def grid(self):
        return self.base.grid

    @property
    def values(self):
        return self.base.causal_part


def cell_weights(grid):
    """Exact integrals of exp(-2t) over the causal cells [k dt, (k+1) dt)."""
    k = np.arange(grid.n // 2)
    return np.exp(-2 * k * grid.dt) * (-np.expm1(-2 * grid.dt)) / 2


def weighted_norm(f):
    return float(np.sqrt(np.sum(cell_weights(f.grid) * np.abs(f.values) ** 2)))


def unweighted_norm(f):
    return float(np.sqrt(f.grid.dt * np.sum(np.abs(f.values) ** 2)))


def _shift_left(f, m):
    vals = f.values
    out = np.zeros_like(vals)
    if m < vals.size:
        out[: vals.size - m] = vals[m:]
    full = np.zeros(f.grid.n, dtype=complex)
    full[f.grid.zero_index:] = out
    return WeightedSignal(TimeSignal(f.grid, full, "causal"))


def weighted_growth_ratio(f, t):
    """||T(t) f||_w / ||f||_w for a grid multiple t; at most exp(t)."""
    m = f.grid.steps(t, "shift")
    base = weighted_norm(f)
    if base == 0:
        raise ValueError("weighted norm of f is zero")
    return weighted_norm(_shift_left(f, m)) / base


def finite_time_ratio(f, t0):
    """int_0^t0 |f|^2 / int_0^inf |f|^2 for piecewise-constant f."""
    grid = f.grid
    e = np.abs(f.values) ** 2
    total = e.sum()
    if total == 0:
        raise ValueError("f is zero")
    if t0 <= 0:
        return 0.0
    edges = np.arange(e.size + 1) * grid.dt
    covered = np.clip((t0 - edges[:-1]) / grid.dt, 0, 1)
    return float(np.sum(e * covered) / total)


class InequivalenceRow(NamedTuple):
    n: int
    unweighted_norm: float
    weighted_norm: float
    ratio: float


def bump(grid, start, width=1.0):
    """Indicator of [start, start + width) on the grid."""
    return WeightedSignal(TimeSignal.from_function(
        grid, lambda t: ((t >= start) & (t < start + width)).astype(float)))


def inequivalence_demo(grid, n_max, width=1.0):
    """Norms of the shifted bumps 1_[n, n+width) for n = 0 .. n_max."""
    if (n_max + width) > grid.horizon / 2:
        raise ValueError(f"bump at n={n_max} leaves the time window [0, {grid.horizon / 2})")
    rows = []
    for n in range(int(n_max) + 1):
        f = bump(grid, n, width)
        u, w = unweighted_norm(f), weighted_norm(f)
        rows.append(InequivalenceRow(n, u, w, w / u))
    return rows
