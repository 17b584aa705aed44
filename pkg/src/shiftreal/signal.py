"""Sampled time/frequency representations of L2 and Hardy-space elements.

Time samples sit at cell centres t_k = (k + 1/2) dt for k = -n/2 .. n/2 - 1,
so no sample falls on t = 0.  The causal half is t > 0, the anticausal half
t < 0, and time reversal t -> -t is an exact index reversal.  The frequency
grid is the symmetric DFT grid w_j = 2 pi j / (n dt), j = -n/2 .. n/2 - 1.

The forward transform is F(i w_j) = dt * sum_k x_k exp(-i w_j t_k) and the
inverse divides by dt, which makes the discrete Parseval identity exact:

    dt * sum |x_k|^2 == (1 / (n dt)) * sum |F_j|^2
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatchError, HardyMembershipError

SUPPORTS = ("causal", "anticausal", "two_sided")


@dataclass(frozen=True)
class GridConfig:
    """Uniform time grid with its paired frequency grid.

    Parameters
    ----------
    n : int
        Number of samples, a power of two and at least 16.
    dt : float
        Time spacing.
    tail_tol : float
        Largest admissible relative energy in the last 5% of the time
        window (and, for Hardy-class membership, outside the declared
        support).
    """

    n: int = 2**14
    dt: float = 2.0**-8
    tail_tol: float = 1e-3

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {n!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.tail_tol >= 0:
            raise ValueError(f"tail_tol must be nonnegative, got {self.tail_tol!r}")

    @property
    def horizon(self):
        return self.n * self.dt

    @property
    def dw(self):
        return 2 * np.pi / self.horizon

    @property
    def zero_index(self):
        """Index of the first cell with t > 0."""
        return self.n // 2

    @cached_property
    def t(self):
        t = (np.arange(self.n) - self.n // 2 + 0.5) * self.dt
        t.setflags(write=False)
        return t

    @cached_property
    def omega(self):
        w = (np.arange(self.n) - self.n // 2) * self.dw
        w.setflags(write=False)
        return w

    @cached_property
    def _half_cell_phase(self):
        ph = np.exp(-0.5j * self.omega * self.dt)
        ph.setflags(write=False)
        return ph

    def mask(self, support):
        """Boolean mask of the cells belonging to ``support``."""
        if support == "causal":
            return self.t > 0
        if support == "anticausal":
            return self.t < 0
        if support == "two_sided":
            return np.ones(self.n, dtype=bool)
        raise ValueError(f"unknown support {support!r}")

    def steps(self, t, what="time"):
        """Return the integer m with t == m * dt, or raise."""
        m = round(t / self.dt)
        if m < 0 or abs(t - m * self.dt) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"{what} {t!r} is not a nonnegative multiple of dt={self.dt}")
        return int(m)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _forward(samples, grid):
    x = np.fft.ifftshift(samples, axes=-1)
    F = np.fft.fftshift(np.fft.fft(x, axis=-1), axes=-1)
    return grid._half_cell_phase * grid.dt * F


def _inverse(samples, grid):
    F = np.fft.ifftshift(samples / grid._half_cell_phase, axes=-1)
    return np.fft.fftshift(np.fft.ifft(F, axis=-1), axes=-1) / grid.dt


def _tail_fraction(samples, grid, support):
    """Relative energy in the outer 5% of the support window."""
    e = np.abs(samples) ** 2
    total = e.sum()
    if total == 0:
        return 0.0
    t, half = grid.t, grid.horizon / 2
    edge = 0.95 * half
    if support == "causal":
        tail = t >= edge
    elif support == "anticausal":
        tail = t <= -edge
    else:
        tail = np.abs(t) >= edge
    return float(e[tail].sum() / total)


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """Samples of a square-integrable function of time on ``grid.t``.

    ``samples`` always spans the whole grid; ``support`` records which half
    the signal is meant to live on.  Values outside the support are kept as
    given (so transforms round-trip exactly) and reported by ``leakage``.
    """

    grid: GridConfig
    samples: np.ndarray
    support: str = "two_sided"

    def __post_init__(self):
        if self.support not in SUPPORTS:
            raise ValueError(f"unknown support {self.support!r}")
        s = _frozen(self.samples)
        if s.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {s.shape}")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, grid, fn, support="causal"):
        """Sample ``fn`` on the cells of ``support``; other cells are zero."""
        mask = grid.mask(support)
        x = np.zeros(grid.n, dtype=complex)
        x[mask] = fn(grid.t[mask])
        return cls(grid, x, support)

    @classmethod
    def zeros(cls, grid, support="causal"):
        return cls(grid, np.zeros(grid.n), support)

    @property
    def t(self):
        return self.grid.t

    @property
    def energy(self):
        return float(self.grid.dt * np.sum(np.abs(self.samples) ** 2))

    @property
    def norm(self):
        return float(np.sqrt(self.energy))

    @property
    def causal_part(self):
        """Samples at t > 0 (cells n/2 .. n-1)."""
        return self.samples[self.grid.zero_index:]

    @cached_property
    def leakage(self):
        """Relative energy outside the declared support."""
        e = np.abs(self.samples) ** 2
        total = e.sum()
        if total == 0:
            return 0.0
        return float(e[~self.grid.mask(self.support)].sum() / total)

    @cached_property
    def truncation_suspect(self):
        return _tail_fraction(self.samples, self.grid, self.support) > self.grid.tail_tol

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        sup = self.support if self.support == other.support else "two_sided"
        return TimeSignal(self.grid, self.samples + other.samples, sup)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return TimeSignal(self.grid, c * self.samples, self.support)


@dataclass(frozen=True, eq=False)
class FreqSignal:
    """Samples F(i w_j) on the frequency grid."""

    grid: GridConfig
    samples: np.ndarray
    truncation_suspect: bool = field(default=False)

    def __post_init__(self):
        s = _frozen(self.samples)
        if s.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {s.shape}")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, grid, fn):
        """Sample ``fn(s)`` at s = i w_j."""
        return cls(grid, fn(1j * grid.omega))

    @property
    def omega(self):
        return self.grid.omega

    @property
    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2) / self.grid.horizon)

    @property
    def norm(self):
        return float(np.sqrt(self.energy))

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return FreqSignal(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return FreqSignal(self.grid, c * self.samples)


def _check_same_grid(a, b):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


def to_frequency(x):
    """Discrete Laplace/Fourier transform of a TimeSignal."""
    return FreqSignal(x.grid, _forward(x.samples, x.grid), x.truncation_suspect)


def to_time(F, support="two_sided"):
    """Inverse of :func:`to_frequency`.

    Raises HardyMembershipError when ``support`` is causal (anticausal) and
    more than ``grid.tail_tol`` of the energy sits at negative (positive)
    times.
    """
    x = TimeSignal(F.grid, _inverse(F.samples, F.grid), support)
    if support != "two_sided" and x.leakage > F.grid.tail_tol:
        side = "H2 of the right half-plane" if support == "causal" else "H2 of the left half-plane"
        raise HardyMembershipError(
            f"signal is not numerically in {side}: {x.leakage:.3g} of its energy "
            f"lies outside the {support} half (tail_tol={F.grid.tail_tol:g})"
        )
    return x


def inner_product(F, G):
    """<F, G> = (1/2 pi) sum_j F_j conj(G_j) dw."""
    _check_same_grid(F.grid, G.grid)
    return complex(np.vdot(G.samples, F.samples) / F.grid.horizon)


def project_h2(F, half="plus"):
    """Orthogonal projection onto H2 of the right (``plus``) or left (``minus``) half-plane."""
    if half not in ("plus", "minus"):
        raise ValueError(f"half must be 'plus' or 'minus', got {half!r}")
    grid = F.grid
    x = _inverse(F.samples, grid)
    keep = grid.mask("causal" if half == "plus" else "anticausal")
    x = np.where(keep, x, 0)
    return FreqSignal(grid, _forward(x, grid))


def reflect(x):
    """Time reversal t -> -t (its transform is F(-i w))."""
    flip = {"causal": "anticausal", "anticausal": "causal"}.get(x.support, x.support)
    return TimeSignal(x.grid, x.samples[::-1], flip)


def causal_truncate(x, support="causal"):
    """Zero the samples outside ``support``."""
    return TimeSignal(x.grid, np.where(x.grid.mask(support), x.samples, 0), support)


def shift_samples(samples, m):
    """Move samples m cells to the right (m > 0) or left (m < 0), zero filling."""
    out = np.zeros_like(samples)
    n = samples.shape[-1]
    if m >= n or -m >= n:
        return out
    if m >= 0:
        out[..., m:] = samples[..., : n - m]
    else:
        out[..., : n + m] = samples[..., -m:]
    return out
