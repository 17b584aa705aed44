"""Transfer symbols: bounded analytic functions on the right half-plane.

Every catalog symbol except ``Sampled`` is a finite-dimensional system in
series with a pure delay, G(s) = exp(-tau s) (C (sI - A)^{-1} B + D).  That
normal form supplies impulse responses and Hankel kernels in closed form.
"""
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.linalg import expm

from .errors import FeedthroughError, GridMismatchError, SymbolParseError
from .signal import FreqSignal, TimeSignal, _inverse

LADDER_EXPONENTS = np.arange(3, 41)
LADDER_TOL = 1e-8
_IVT_POINT = 2.0**24
SPLINE_DEGREE = 7


class StateSpace(NamedTuple):
    a: np.ndarray  # (d, d)
    b: np.ndarray  # (d,)
    c: np.ndarray  # (d,)
    d: complex


class KernelForm(NamedTuple):
    """G(s) = exp(-delay s) * (c (sI - a)^{-1} b + d)."""

    ss: StateSpace
    delay: float


def _as_complex_array(s):
    return np.asarray(s, dtype=complex)


def _check_closed_rhp(s):
    if np.any(s.real < -1e-12 * (1 + np.abs(s))):
        raise ValueError("symbols are evaluated in the closed right half-plane only")


def _ss_eval(ss, s):
    s = np.atleast_1d(s)
    dim = ss.a.shape[0]
    if dim == 0:
        return np.full(s.shape, ss.d, dtype=complex)
    mats = s[:, None, None] * np.eye(dim) - ss.a
    rhs = np.broadcast_to(ss.b[:, None], (s.size, dim, 1))
    x = np.linalg.solve(mats, rhs)[..., 0]
    return x @ ss.c + ss.d


def _series(first, second):
    """State space of the product first(s) * second(s)."""
    a1, b1, c1, d1 = first
    a2, b2, c2, d2 = second
    n1, n2 = a1.shape[0], a2.shape[0]
    a = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    a[:n1, :n1] = a1
    a[:n1, n1:] = np.outer(b1, c2)
    a[n1:, n1:] = a2
    b = np.concatenate([b1 * d2, b2])
    c = np.concatenate([c1, d1 * c2])
    return StateSpace(a, b, c, d1 * d2)


def _tustin(grid):
    """Bilinear map of the grid frequencies: s = (2/dt) i tan(w dt / 2)."""
    with np.errstate(over="ignore"):
        return 1j * (2 / grid.dt) * np.tan(grid.omega * grid.dt / 2)


class TransferSymbol:
    """Common interface of the symbol catalog."""

    def __call__(self, s):
        return evaluate(self, s)

    def _eval(self, s):
        raise NotImplementedError

    def kernel_form(self) -> Optional[KernelForm]:
        """Finite-dimensional-plus-delay normal form, or None."""
        return None

    def grid_response(self, grid):
        """Causal grid multiplier used by operators acting on sampled signals.

        Finite-dimensional parts are evaluated through the bilinear map of the
        axis onto itself, so a symbol that is inner stays exactly unimodular
        and exactly causal on the grid.
        """
        kf = self.kernel_form()
        if kf is None:
            raise NotImplementedError
        out = _ss_eval(kf.ss, _tustin(grid))
        if kf.delay:
            out = out * np.exp(-1j * grid.omega * kf.delay)
        return out

    @property
    def literal(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Rational(TransferSymbol):
    """num(s) / den(s); coefficients in ascending powers of s."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num = np.trim_zeros(np.atleast_1d(np.asarray(self.num, dtype=complex)), "b")
        den = np.trim_zeros(np.atleast_1d(np.asarray(self.den, dtype=complex)), "b")
        if den.size == 0:
            raise ValueError("denominator is identically zero")
        if num.size == 0:
            num = np.zeros(1, dtype=complex)
        if num.size > den.size:
            raise ValueError("numerator degree exceeds denominator degree")
        if den.size > 1:
            poles = np.roots(den[::-1])
            if np.any(poles.real >= 0):
                raise ValueError(f"denominator has roots in the closed right half-plane: {poles}")
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    def _eval(self, s):
        # Horner on both polynomials
        return np.polyval(self.num[::-1], s) / np.polyval(self.den[::-1], s)

    def kernel_form(self):
        den = np.array(self.den)
        num = np.zeros(den.size, dtype=complex)
        num[: len(self.num)] = self.num
        lead = den[-1]
        den, num = den / lead, num / lead
        order = den.size - 1
        d = num[-1]
        rem = num[:-1] - d * den[:-1]
        a = np.zeros((order, order), dtype=complex)
        if order:
            a[:-1, 1:] = np.eye(order - 1)
            a[-1, :] = -den[:-1]
        b = np.zeros(order, dtype=complex)
        if order:
            b[-1] = 1
        return KernelForm(StateSpace(a, b, rem, complex(d)), 0.0)

    @property
    def literal(self):
        return "rational:" + ",".join(map(_fmt, self.num)) + "/" + ",".join(map(_fmt, self.den))


@dataclass(frozen=True, eq=False)
class Delay(TransferSymbol):
    tau: float

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError(f"delay must be nonnegative, got {self.tau!r}")

    def _eval(self, s):
        return np.exp(-self.tau * s)

    def kernel_form(self):
        empty = np.zeros((0, 0), dtype=complex)
        return KernelForm(StateSpace(empty, np.zeros(0, complex), np.zeros(0, complex), 1.0 + 0j), float(self.tau))

    def grid_response(self, grid):
        return np.exp(-1j * grid.omega * self.tau)

    @property
    def literal(self):
        return f"delay:{_fmt(self.tau)}"


@dataclass(frozen=True, eq=False)
class Blaschke(TransferSymbol):
    """Finite Blaschke product prod_k (s - z_k) / (s + conj(z_k))."""

    zeros: tuple

    def __post_init__(self):
        z = tuple(complex(v) for v in np.atleast_1d(self.zeros))
        if any(v.real <= 0 for v in z):
            raise ValueError("Blaschke zeros must have positive real part")
        object.__setattr__(self, "zeros", z)

    def as_rational(self):
        z = np.array(self.zeros, dtype=complex)
        return Rational(np.poly(z)[::-1], np.poly(-z.conj())[::-1])

    def _eval(self, s):
        out = np.ones_like(s)
        for z in self.zeros:
            out = out * (s - z) / (s + np.conj(z))
        return out

    def kernel_form(self):
        return self.as_rational().kernel_form()

    @property
    def literal(self):
        return "blaschke:" + ",".join(map(_fmt, self.zeros))


@dataclass(frozen=True, eq=False)
class MatrixInner(TransferSymbol):
    """G(s) = 1 - b^H (sI - a0 + b b^H / 2)^{-1} b for skew-Hermitian a0."""

    a0: np.ndarray
    b: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        a0 = np.atleast_2d(np.asarray(self.a0, dtype=complex))
        b = np.atleast_1d(np.asarray(self.b, dtype=complex)).ravel()
        if a0.shape[0] != a0.shape[1] or a0.shape[0] != b.size:
            raise ValueError(f"incompatible shapes a0 {a0.shape}, b {b.shape}")
        scale = max(1.0, np.abs(a0).max(initial=0))
        if np.abs(a0 + a0.conj().T).max(initial=0) > 1e-12 * scale:
            raise ValueError("a0 is not skew-Hermitian")
        a0.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "b", b)

    @property
    def generator(self):
        """A0 - B0 B0^* / 2, the matrix whose spectrum governs stability."""
        return self.a0 - 0.5 * np.outer(self.b, self.b.conj())

    def _eval(self, s):
        return _ss_eval(self.kernel_form().ss, s.ravel()).reshape(s.shape)

    def kernel_form(self):
        return KernelForm(StateSpace(self.generator, self.b.copy(), -self.b.conj(), 1.0 + 0j), 0.0)

    @property
    def literal(self):
        return f"matinner:{self.source}" if self.source else f"matinner({self.b.size}x{self.b.size})"


@dataclass(frozen=True, eq=False)
class Product(TransferSymbol):
    factors: tuple

    def __post_init__(self):
        f = tuple(self.factors)
        if not f:
            raise ValueError("a product needs at least one factor")
        object.__setattr__(self, "factors", f)

    def _eval(self, s):
        out = np.ones_like(s)
        for f in self.factors:
            out = out * f._eval(s)
        return out

    def kernel_form(self):
        forms = [f.kernel_form() for f in self.factors]
        if any(k is None for k in forms):
            return None
        ss = forms[0].ss
        for k in forms[1:]:
            ss = _series(ss, k.ss)
        return KernelForm(ss, float(sum(k.delay for k in forms)))

    def grid_response(self, grid):
        out = np.ones(grid.n, dtype=complex)
        for f in self.factors:
            out = out * f.grid_response(grid)
        return out

    @property
    def literal(self):
        return "product:(" + ";".join(f.literal for f in self.factors) + ")"


@dataclass(frozen=True, eq=False)
class Sampled(TransferSymbol):
    """Symbol known through its axis samples.

    Off the axis the value is the Poisson integral of the samples, with the
    part of the line beyond the band filled by ``feedthrough`` (or by the
    mean of the outermost 5% of samples when no feedthrough is given).
    """

    freq: FreqSignal
    feedthrough: Optional[complex] = None

    @classmethod
    def from_symbol(cls, sym, grid):
        return cls(FreqSignal(grid, evaluate(sym, 1j * grid.omega)), feedthrough_limit(sym))

    @property
    def grid(self):
        return self.freq.grid

    @property
    def tail_value(self):
        if self.feedthrough is not None:
            return complex(self.feedthrough)
        g = self.freq.samples
        k = max(1, g.size // 40)
        return complex(np.concatenate([g[:k], g[-k:]]).mean())

    def _spline(self):
        # degree 7 keeps the interpolation error of smooth (rational) data
        # near 1e-9 at the default frequency spacing
        return make_interp_spline(self.grid.omega, self.freq.samples, k=SPLINE_DEGREE)

    def _eval(self, s):
        shape = np.shape(s)
        s = np.atleast_1d(s).ravel()
        out = np.empty(s.shape, dtype=complex)
        w, g = self.grid.omega, self.freq.samples
        on_axis = s.real == 0
        if on_axis.any():
            y = s[on_axis].imag
            vals = self._spline()(y)
            wmax = w[-1]
            vals = np.where((y < w[0]) | (y > wmax), self.tail_value, vals)
            out[on_axis] = vals
        idx = np.flatnonzero(~on_axis)
        dw = self.grid.dw
        for start in range(0, idx.size, 256):
            chunk = idx[start:start + 256]
            sig = s[chunk].real[:, None]
            tau = s[chunk].imag[:, None]
            kern = sig / (np.pi * (sig**2 + (w - tau) ** 2)) * dw
            mass = kern.sum(axis=1)
            out[chunk] = kern @ g + (1 - mass) * self.tail_value
        return out.reshape(shape)

    def grid_response(self, grid):
        if grid != self.grid:
            raise GridMismatchError("sampled symbol lives on a different grid")
        return np.array(self.freq.samples)

    @property
    def literal(self):
        return f"sampled(n={self.grid.n},dt={_fmt(self.grid.dt)})"


def _fmt(v):
    v = complex(v)
    if v.imag == 0:
        return repr(float(v.real))
    return repr(v).strip("()")


def evaluate(sym, s):
    """G(s) for s in the closed right half-plane (scalar or array)."""
    arr = _as_complex_array(s)
    _check_closed_rhp(arr)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.asarray(sym._eval(np.atleast_1d(arr))).reshape(arr.shape)
    if not np.all(np.isfinite(out)):
        raise ZeroDivisionError("symbol evaluated at a pole")
    return complex(out) if arr.ndim == 0 else out


def constant(c):
    return Rational((c,), (1,))


def inner_from_skew(a0, b):
    """MatrixInner symbol built from a skew-Hermitian a0 and a vector b."""
    return MatrixInner(a0, b)


class InnerVerdict(NamedTuple):
    is_inner: bool
    max_boundary_deviation: float
    interior_bound_ok: bool


_INTERIOR_RE = np.array([1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
_INTERIOR_IM = np.linspace(-50, 50, 101)


def is_inner(sym, grid, tol=1e-6):
    """Check |G| = 1 on the grid axis and |G| <= 1 on a fixed interior sample."""
    if isinstance(sym, Sampled):
        boundary = sym.grid_response(grid)
    else:
        boundary = evaluate(sym, 1j * grid.omega)
    dev = float(np.max(np.abs(np.abs(boundary) - 1)))
    pts = (_INTERIOR_RE[:, None] + 1j * _INTERIOR_IM[None, :]).ravel()
    interior_ok = bool(np.all(np.abs(evaluate(sym, pts)) <= 1 + tol))
    return InnerVerdict(dev <= tol and interior_ok, dev, interior_ok)


class FeedthroughEstimate(NamedTuple):
    value: Optional[complex]
    spread: float
    ladder: np.ndarray


def feedthrough_estimate(sym):
    """Evaluate G on the ladder s = 2^k and test the last three values for convergence."""
    s = 2.0 ** LADDER_EXPONENTS
    vals = evaluate(sym, s.astype(complex))
    last = vals[-3:]
    spread = float(np.max(np.abs(last[:, None] - last[None, :])))
    value = complex(last[-1]) if spread <= LADDER_TOL else None
    return FeedthroughEstimate(value, spread, vals)


def feedthrough_limit(sym):
    """D = lim G(s) as s -> +inf along the reals, or None when it does not settle."""
    return feedthrough_estimate(sym).value


def initial_value(fn):
    """lim s fn(s) for s -> +inf, with one Richardson step on the real axis.

    For a Laplace transform X this is the boundary value of its time trace at
    0+.  The 1/s term of the expansion of s fn(s) cancels, leaving an error of
    order 1/S^2 at S = 2^24.
    """
    S = _IVT_POINT
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        f1 = S * complex(fn(np.array([S + 0j]))[0])
        f2 = 2 * S * complex(fn(np.array([2 * S + 0j]))[0])
    out = 2 * f2 - f1
    return out if np.isfinite(out) else 0j


def _kernel_samples(ss, start, count, dt):
    """c exp(a t) b at t = start + k dt, k = 0 .. count-1."""
    dim = ss.a.shape[0]
    if dim == 0 or count <= 0:
        return np.zeros(max(count, 0), dtype=complex)
    step = expm(ss.a * dt)
    v = expm(ss.a * start) @ ss.b
    vs = np.empty((count, dim), dtype=complex)
    for k in range(count):
        vs[k] = v
        v = step @ v
    return vs @ ss.c


def kernel_values(sym, dt, count):
    """Impulse response of the strictly proper part at t = m dt, m = 1 .. count.

    A delay contributes a discrete impulse of height d/dt at its grid point;
    at a jump of the smooth part the midpoint value is used.
    """
    kf = sym.kernel_form()
    if kf is None:
        raise FeedthroughError(f"symbol {sym.literal} has no closed-form kernel")
    out = np.zeros(count, dtype=complex)
    if kf.delay == 0:
        out[:] = _kernel_samples(kf.ss, dt, count, dt)
        return out
    m = _delay_steps(kf.delay, dt)
    if 1 <= m <= count:
        out[m - 1] += kf.ss.d / dt
        out[m - 1] += 0.5 * _kernel_samples(kf.ss, 0.0, 1, dt)[0]
    if m < count:
        first = max(m + 1, 1)
        vals = _kernel_samples(kf.ss, (first - m) * dt, count - first + 1, dt)
        out[first - 1:] = vals
    return out


def _delay_steps(tau, dt):
    m = round(tau / dt)
    if abs(tau - m * dt) > 1e-9 * max(1.0, tau):
        raise ValueError(f"delay {tau} is not an integer multiple of dt={dt}")
    return int(m)


def impulse_response(sym, grid):
    """Causal impulse response h of G - D, sampled at the cell centres."""
    d = feedthrough_limit(sym)
    if d is None:
        raise FeedthroughError(
            "G has no limit along the positive reals; subtract a known constant first"
        )
    kf = sym.kernel_form()
    h = np.zeros(grid.n, dtype=complex)
    z = grid.zero_index
    half = grid.n - z
    if kf is None:
        samples = sym.grid_response(grid) - d
        return TimeSignal(grid, _inverse(samples, grid), "causal")
    m = 0 if kf.delay == 0 else _delay_steps(kf.delay, grid.dt)
    if m < half:
        h[z + m:] = _kernel_samples(kf.ss, 0.5 * grid.dt, half - m, grid.dt)
        if m > 0:
            h[z + m] += kf.ss.d / grid.dt
    return TimeSignal(grid, h, "causal")


# ---------------------------------------------------------------- parsing

def _parse_number(text):
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise SymbolParseError(f"not a number: {text!r}") from None


def _parse_list(text):
    text = text.strip()
    if not text:
        raise SymbolParseError("empty coefficient list")
    return [_parse_number(p) for p in text.split(",")]


def _split_top(text, sep=";"):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise SymbolParseError("unbalanced parentheses")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise SymbolParseError("unbalanced parentheses")
    parts.append("".join(cur))
    return parts


def _nested_complex(v, depth):
    """Nested lists of numbers, [re, im] pairs or strings -> nested complex lists."""
    if depth == 0:
        if isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) for p in v):
            return complex(v[0], v[1])
        if isinstance(v, str):
            return _parse_number(v)
        if isinstance(v, (int, float)):
            return complex(v)
        raise SymbolParseError(f"bad matrix entry {v!r}")
    if not isinstance(v, list):
        raise SymbolParseError(f"expected a list, got {v!r}")
    return [_nested_complex(e, depth - 1) for e in v]


def load_matinner(path):
    """Read {"a0": [[...]], "b": [...]} from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        a0 = np.array(_nested_complex(data["a0"], 2), dtype=complex)
        b = np.array(_nested_complex(data["b"], 1), dtype=complex)
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise SymbolParseError(f"cannot read matrix-inner file {path!r}: {exc}") from None
    try:
        return MatrixInner(a0, b, source=str(path))
    except ValueError as exc:
        raise SymbolParseError(str(exc)) from None


def parse_symbol(text):
    """Parse a symbol literal.

    Forms: ``rational:n0,n1,.../d0,d1,...`` (ascending powers of s),
    ``delay:TAU``, ``blaschke:z1,z2,...``, ``matinner:FILE`` and
    ``product:(SYM;SYM;...)``.
    """
    if not isinstance(text, str) or ":" not in text:
        raise SymbolParseError(f"cannot parse symbol {text!r}")
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "rational":
            if body.count("/") != 1:
                raise SymbolParseError("rational symbols need exactly one '/'")
            num, den = body.split("/")
            return Rational(_parse_list(num), _parse_list(den))
        if kind == "delay":
            tau = _parse_number(body)
            if tau.imag:
                raise SymbolParseError("delay must be real")
            return Delay(tau.real)
        if kind == "blaschke":
            return Blaschke(_parse_list(body))
        if kind == "matinner":
            return load_matinner(body.strip())
        if kind == "product":
            body = body.strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise SymbolParseError("product symbols are written product:(SYM;SYM;...)")
            return Product(tuple(parse_symbol(p.strip()) for p in _split_top(body[1:-1])))
    except SymbolParseError:
        raise
    except ValueError as exc:
        raise SymbolParseError(f"invalid symbol {text!r}: {exc}") from None
    raise SymbolParseError(f"unknown symbol kind {kind!r} in {text!r}")
