"""Stability and group verdicts for the restricted realization from |G|.

The restricted semigroup satisfies sigma(T(1)) inside the disc of radius
exp(-alpha) iff inf |G| > 0 over the strip 0 < Re z < alpha, and it extends
to a group iff inf |G| > 0 on some half-plane Re z > rho.  Both infima are
probed on a finite lattice, so verdicts are tri-state.
"""
import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.ndimage import minimum_filter

from .symbols import MatrixInner, evaluate, feedthrough_limit

DEFAULT_MARGIN = 1e-3
ZERO_TOL = 1e-8
NEWTON_TOL = 1e-13
HALFPLANE_DEPTH = 50.0


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RegionSpec:
    """Sampling lattice for a strip 0 <= Re z <= alpha or a half-plane Re z >= rho.

    Refining by doubling the interval counts (re_points - 1, im_points - 1)
    gives nested lattices.
    """

    kind: str
    param: float
    re_points: int = 33
    im_points: int = 401
    im_max: float = 100.0

    def __post_init__(self):
        if self.kind not in ("strip", "halfplane"):
            raise ValueError(f"region kind must be 'strip' or 'halfplane', got {self.kind!r}")
        if not self.param > 0:
            raise ValueError("alpha / rho must be positive")
        if self.re_points < 8 or self.im_points < 8:
            raise ValueError("sampling counts must be at least 8")
        if not self.im_max > 0:
            raise ValueError("im_max must be positive")

    @classmethod
    def strip(cls, alpha, **kw):
        return cls("strip", alpha, **kw)

    @classmethod
    def halfplane(cls, rho, **kw):
        return cls("halfplane", rho, **kw)

    @property
    def re_bounds(self):
        if self.kind == "strip":
            return 0.0, float(self.param)
        return float(self.param), float(self.param) + HALFPLANE_DEPTH

    def lattice(self):
        lo, hi = self.re_bounds
        re = np.linspace(lo, hi, self.re_points)
        im = np.linspace(-self.im_max, self.im_max, self.im_points)
        return re[:, None] + 1j * im[None, :]

    def refined(self):
        return RegionSpec(self.kind, self.param, 2 * self.re_points - 1, 2 * self.im_points - 1, self.im_max)


class InfModulus(NamedTuple):
    value: float
    point: complex


def inf_modulus(sym, region):
    """Smallest |G| on the lattice (an upper bound for the infimum) and where it occurs.

    For half-planes the limit |D| at Re z -> +inf also counts, reported at
    the point +inf.
    """
    pts = region.lattice()
    mod = np.abs(evaluate(sym, pts))
    k = np.unravel_index(np.argmin(mod), mod.shape)
    best = InfModulus(float(mod[k]), complex(pts[k]))
    if region.kind == "halfplane":
        d = feedthrough_limit(sym)
        if d is not None and abs(d) < best.value:
            best = InfModulus(float(abs(d)), complex(np.inf, 0))
    return best


def _start_points(mod, n_best, max_starts):
    """Lattice local minima of |G| (deepest first), topped up with the global best points."""
    local = np.flatnonzero((mod == minimum_filter(mod, size=3, mode="nearest")).ravel())
    local = local[np.argsort(mod.ravel()[local])][:max_starts]
    best = np.argsort(mod.ravel())[:n_best]
    return list(dict.fromkeys(np.concatenate([local, best]).tolist()))


def _continued(sym):
    """Scalar evaluator used by the Newton search.

    Symbols with a kernel form are rational times exponential, hence analytic
    across the imaginary axis, so iterates may step into Re z < 0.  Other
    symbols are confined to the closed right half-plane.
    """
    if sym.kernel_form() is None:
        return lambda z: evaluate(sym, z)

    def g(z):
        with np.errstate(all="ignore"):
            return complex(np.asarray(sym._eval(np.array([z], dtype=complex)))[0])
    return g


def _newton(g, z, max_step, iters=60):
    """Damped Newton iteration for g(z) = 0 with a central-difference derivative."""
    for _ in range(iters):
        try:
            gz = g(z)
            if not np.isfinite(gz):
                return None
            if abs(gz) < NEWTON_TOL:
                break
            h = 1e-6 * max(1.0, abs(z))
            dg = (g(z + h) - g(z - h)) / (2 * h)
        except (ValueError, ZeroDivisionError):
            return None
        if dg == 0 or not np.isfinite(dg):
            return None
        step = gz / dg
        if abs(step) > max_step:
            step *= max_step / abs(step)
        z = z - step
    return z


def invariant_zeros(ss):
    """Finite generalized eigenvalues of the pencil [[a, b], [c, d]] - z diag(I, 0).

    For a minimal realization these are the zeros of c (zI - a)^{-1} b + d;
    for non-minimal ones they also include decoupling zeros, so callers
    confirm each candidate by evaluating G.
    """
    n = ss.a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[:n, :n] = ss.a
    m[:n, n] = ss.b
    m[n, :n] = ss.c
    m[n, n] = ss.d
    e = np.zeros_like(m)
    e[:n, :n] = np.eye(n)
    lam = sla.eigvals(m, e)
    return lam[np.isfinite(lam)]


def _inside(region, z):
    lo, hi = region.re_bounds
    return lo < z.real < hi and abs(z.imag) <= region.im_max


def _locate_zero(sym, region, n_best=8, max_starts=64):
    """Search for a zero of G inside the open region; returns the point or None.

    Symbols with a state-space (plus delay) normal form have their zeros read
    off as invariant zeros of the pencil; an inner symbol's zero close to the
    axis is paired with a mirror pole, so its dip in |G| is far narrower than
    any lattice spacing.  Other symbols fall back to Newton's method started
    from every lattice local minimum of |G|.  A zero counts when |G| <
    ZERO_TOL strictly inside.
    """
    kf = sym.kernel_form()
    if kf is not None:
        for z in sorted(invariant_zeros(kf.ss), key=lambda z: (z.real, z.imag)):
            z = complex(z)
            if _inside(region, z) and abs(evaluate(sym, z)) < ZERO_TOL:
                return z
        return None
    lo, hi = region.re_bounds
    pts = region.lattice()
    mod = np.abs(evaluate(sym, pts))
    flat = pts.ravel()
    spacing = max(hi - lo, 2 * region.im_max / (region.im_points - 1))
    g = _continued(sym)
    for idx in _start_points(mod, n_best, max_starts):
        z = _newton(g, complex(flat[idx]), spacing)
        if z is None:
            continue
        if _inside(region, z) and abs(evaluate(sym, z)) < ZERO_TOL:
            return z
    return None


class StabilityVerdict(NamedTuple):
    exp_stable: Verdict
    group: Verdict
    strip_inf: InfModulus
    halfplane_inf: InfModulus
    zero_in_strip: object
    zero_in_halfplane: object


def _verdict(sym, region, margin):
    inf = inf_modulus(sym, region)
    zero = _locate_zero(sym, region)
    if zero is not None:
        return Verdict.NO, inf, zero
    if region.kind == "halfplane" and np.isinf(inf.point.real) and inf.value < margin:
        return Verdict.NO, inf, inf.point
    if inf.value > margin:
        return Verdict.YES, inf, None
    return Verdict.INCONCLUSIVE, inf, None


def stability_verdict(sym, alpha, rho, margin=DEFAULT_MARGIN, re_points=33, im_points=401, im_max=100.0):
    """Exponential stability (strip 0 < Re z < alpha) and group (Re z > rho) verdicts."""
    kw = dict(re_points=re_points, im_points=im_points, im_max=im_max)
    exp_v, strip_inf, z1 = _verdict(sym, RegionSpec.strip(alpha, **kw), margin)
    grp_v, half_inf, z2 = _verdict(sym, RegionSpec.halfplane(rho, **kw), margin)
    return StabilityVerdict(exp_v, grp_v, strip_inf, half_inf, z1, z2)


class MatrixOracle(NamedTuple):
    exp_stable: bool
    group: bool
    eigenvalues: np.ndarray


def matrix_oracle(sym, alpha, rho):
    """Verdicts read off the eigenvalues of A0 - B0 B0^*/2.

    The zeros of G are the mirror images -conj(lambda) of these eigenvalues
    (for a controllable pair), so the strip 0 < Re z < alpha is zero free iff
    max Re lambda < -alpha, and the half-plane Re z > rho is zero free iff
    min Re lambda > -rho.
    """
    if not isinstance(sym, MatrixInner):
        raise TypeError("the matrix oracle needs a MatrixInner symbol")
    lam = np.linalg.eigvals(sym.generator)
    return MatrixOracle(bool(lam.real.max() < -alpha), bool(lam.real.min() > -rho), lam)
