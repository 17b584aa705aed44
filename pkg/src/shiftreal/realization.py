"""The shift realization on H2 of the right half-plane.

State space H2, left-shift semigroup, generator (Ax)(s) = s x(s) - x(0+),
resolvent ((b - A)^{-1} x)(s) = (x(s) - x(b)) / (b - s), observation
C x = x(0+) and control operator B = G.

Point evaluation
----------------
A state optionally carries ``trace0``, the boundary value x(0+) = C x of its
time trace.  When it is known, x(b) is computed from the frequency samples
by a Cauchy sum whose slowly decaying part c/(s + a) is integrated exactly:

    x(b) = (1/T) sum_j (X_j - c phi_j) / (b - i w_j) + c / (b + a),
    phi(s) = 1 / (s + a).

What remains decays like 1/w^2, so the band truncation error is O(1/W^2).
States without a known trace are evaluated by the midpoint rule
dt * sum_k x_k exp(-b t_k) on the cell-centred grid.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, FeedthroughError, HardyMembershipError
from .signal import (
    FreqSignal,
    GridConfig,
    TimeSignal,
    _check_same_grid,
    _forward,
    _inverse,
    causal_truncate,
    to_frequency,
    to_time,
)
from .symbols import TransferSymbol, evaluate, feedthrough_limit, initial_value

TRACE_MODEL_RATE = 2.0
# outer-half-band energy fraction: about 0.5 for a flat (jump) spectrum,
# O(1/W) for a 1/|s| tail on a band of half-width W
DOMAIN_BAND_TOL = 0.1

_UNSET = object()


def _check_rhp(beta, name="beta"):
    beta = complex(beta)
    if not beta.real > 0:
        raise ValueError(f"{name} must lie in the open right half-plane, got {beta}")
    return beta


@dataclass(frozen=True, eq=False)
class StateVector:
    """An element of H2 held as paired frequency and (causal) time samples."""

    freq: FreqSignal
    time: TimeSignal
    trace0: Optional[complex] = None

    @classmethod
    def from_time(cls, x, trace0=None):
        if x.support != "causal":
            x = TimeSignal(x.grid, x.samples, "causal")
        if x.leakage > x.grid.tail_tol:
            raise HardyMembershipError(
                f"{x.leakage:.3g} of the state's energy lies at negative times"
            )
        return cls(to_frequency(x), x, None if trace0 is None else complex(trace0))

    @classmethod
    def from_freq(cls, F, trace0=None):
        return cls(F, to_time(F, "causal"), None if trace0 is None else complex(trace0))

    @classmethod
    def from_laplace(cls, grid, fn, trace0=None):
        """Sample a Laplace transform on the axis; its boundary value comes from
        the initial value theorem unless given."""
        F = FreqSignal.from_function(grid, fn)
        if trace0 is None:
            trace0 = initial_value(fn)
        return cls.from_freq(F, trace0)

    @classmethod
    def zeros(cls, grid):
        return cls.from_time(TimeSignal.zeros(grid), 0.0)

    @property
    def grid(self):
        return self.freq.grid

    @property
    def norm(self):
        return self.freq.norm

    def boundary_value(self):
        """x(0+): the carried trace, else a linear extrapolation of the first two cells."""
        if self.trace0 is not None:
            return self.trace0
        x = self.time.causal_part
        return complex(1.5 * x[0] - 0.5 * x[1])

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        tr = None
        if self.trace0 is not None and other.trace0 is not None:
            tr = self.trace0 + other.trace0
        return StateVector(self.freq + other.freq, self.time + other.time, tr)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        tr = None if self.trace0 is None else c * self.trace0
        return StateVector(self.freq.scale(c), self.time.scale(c), tr)


@dataclass(frozen=True, eq=False)
class RealizationContext:
    """Grid, symbol (B = G) and feedthrough D shared by the realization operators.

    ``feedthrough`` defaults to the limit of G along the positive reals; pass
    None explicitly to declare the system non-regular.
    """

    grid: GridConfig
    symbol: TransferSymbol
    feedthrough: Optional[complex] = _UNSET

    def __post_init__(self):
        if self.feedthrough is _UNSET:
            object.__setattr__(self, "feedthrough", feedthrough_limit(self.symbol))
        if not np.all(np.isfinite(self.axis_values)):
            raise ValueError("symbol is not bounded on the imaginary axis")

    @cached_property
    def axis_values(self):
        """Exact samples G(i w_j)."""
        v = self.symbol.grid_response(self.grid) if self.symbol.kernel_form() is None \
            else evaluate(self.symbol, 1j * self.grid.omega)
        v.setflags(write=False)
        return v

    @cached_property
    def multiplier(self):
        """Causal grid multiplier acting on sampled signals."""
        v = self.symbol.grid_response(self.grid)
        v.setflags(write=False)
        return v

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.axis_values)))


def apply_multiplier(mult, samples, grid):
    """Time samples of IDFT(mult * DFT(samples)); works on stacked rows."""
    return _inverse(mult * _forward(samples, grid), grid)


def semigroup_apply(x, t):
    """Left shift of the time trace by t = m dt, zero filled."""
    grid = x.grid
    m = grid.steps(t, "shift")
    if m == 0:
        return x
    z = grid.zero_index
    causal = x.time.samples[z:]
    out = np.zeros(grid.n, dtype=complex)
    if m < causal.size:
        out[z:grid.n - m] = causal[m:]
    return StateVector.from_time(TimeSignal(grid, out, "causal"))


def point_evaluate(x, beta):
    """x(beta) for Re beta > 0 (the Laplace transform of the trace at beta)."""
    beta = _check_rhp(beta)
    grid = x.grid
    if x.trace0 is None:
        z = grid.zero_index
        return complex(grid.dt * np.sum(x.time.samples[z:] * np.exp(-beta * grid.t[z:])))
    s = 1j * grid.omega
    c = x.trace0
    a = TRACE_MODEL_RATE
    body = np.sum((x.freq.samples - c / (s + a)) / (beta - s)) / grid.horizon
    return complex(body + c / (beta + a))


def resolvent_apply(x, beta):
    """(beta - A)^{-1} x, computed pointwise on the frequency samples."""
    beta = _check_rhp(beta)
    v = point_evaluate(x, beta)
    s = 1j * x.grid.omega
    Z = (x.freq.samples - v) / (beta - s)
    return StateVector.from_freq(FreqSignal(x.grid, Z), trace0=v)


def generator_apply(x):
    """A x = s x(s) - x(0+); raises DomainError when the result is not in H2."""
    grid = x.grid
    s = 1j * grid.omega
    out = FreqSignal(grid, s * x.freq.samples - x.boundary_value())
    e = np.abs(out.samples) ** 2
    total = e.sum()
    outer = np.abs(grid.omega) > grid.omega[-1] / 2
    band = e[outer].sum() / total if total > 0 else 0.0
    if band > DOMAIN_BAND_TOL:
        raise DomainError(
            f"state is not in the generator domain: s x(s) - x(0+) carries {band:.3g} "
            "of its energy in the upper half of the band, so it is not square integrable"
        )
    try:
        return StateVector.from_freq(out)
    except HardyMembershipError as exc:
        raise DomainError(f"state is not in the generator domain: {exc}") from None


def observe_trace(x):
    """Psi x = C T(.) x, i.e. the time trace of x."""
    return x.time


def resolvent_of_B(ctx, z):
    """(z - A)^{-1} B as a state: samples (G(s) - G(z)) / (z - s)."""
    z = _check_rhp(z, "z")
    grid = ctx.grid
    s = 1j * grid.omega
    gz = evaluate(ctx.symbol, z)
    Z = (ctx.axis_values - gz) / (z - s)
    sym = ctx.symbol
    trace = initial_value(lambda lam: (evaluate(sym, lam) - gz) / (z - lam))
    return StateVector.from_freq(FreqSignal(grid, Z), trace0=trace)


def _causal_input(u):
    if u.support != "causal" and u.leakage > u.grid.tail_tol:
        raise ValueError("input must be causal")
    return causal_truncate(u).samples


def control_map(ctx, u):
    """B_inf u = P_+ (G(.) u_hat(-.)) for a causal input u."""
    _check_same_grid(ctx.grid, u.grid)
    flipped = _causal_input(u)[::-1]
    y = apply_multiplier(ctx.multiplier, flipped, ctx.grid)
    return StateVector.from_time(causal_truncate(TimeSignal(ctx.grid, y)))


def transfer_identity_residual(ctx, s, z):
    """|C (s - A)^{-1}(z - A)^{-1} B - (G(s) - G(z))/(z - s)| / (1 + |rhs|)."""
    s = _check_rhp(s, "s")
    z = _check_rhp(z, "z")
    if s == z:
        raise ValueError("the transfer identity needs s != z")
    lhs = point_evaluate(resolvent_of_B(ctx, z), s)
    rhs = (evaluate(ctx.symbol, s) - evaluate(ctx.symbol, z)) / (z - s)
    return float(abs(lhs - rhs) / (1 + abs(rhs)))


class SimulationResult(NamedTuple):
    y: TimeSignal
    times: tuple
    states: tuple


def simulate(ctx, x0, u, mu, state_times=()):
    """Trajectory of the shift realization driven by u from x0.

    The output is assembled as y = C(x(t) - (mu - A)^{-1} B u(t)) + G(mu) u(t).
    States are returned only at the requested ``state_times`` (grid multiples).
    """
    mu = _check_rhp(mu, "mu")
    grid = ctx.grid
    _check_same_grid(grid, u.grid)
    d = ctx.feedthrough
    if d is None:
        raise FeedthroughError("simulation needs a regular symbol (feedthrough limit D)")
    us = _causal_input(u)
    causal = grid.mask("causal")
    strict = ctx.multiplier - d
    conv = np.where(causal, apply_multiplier(strict, us, grid), 0)
    crb = resolvent_of_B(ctx, mu).trace0
    gmu = evaluate(ctx.symbol, mu)
    free = np.where(causal, x0.time.samples, 0)
    y = free + conv + (gmu - crb) * us
    states = []
    for t in state_times:
        m = grid.steps(t, "state time")
        head = np.where(np.arange(grid.n) < grid.zero_index + m, us, 0)
        forced = np.where(causal, apply_multiplier(strict, head, grid), 0)
        shifted = np.zeros(grid.n, dtype=complex)
        z = grid.zero_index
        if m < grid.n - z:
            shifted[z:grid.n - m] = forced[z + m:]
        forced_state = StateVector.from_time(TimeSignal(grid, shifted, "causal"))
        states.append(semigroup_apply(x0, t) + forced_state)
    return SimulationResult(TimeSignal(grid, y, "causal"), tuple(state_times), tuple(states))
