"""Model space V = [G H2]^perp of an inner symbol and the restricted realization.

All operators act through the causal grid multiplier of G, for which an
inner symbol is exactly unimodular; P_V x = x - G P_+(conj(G) x) is then an
exact orthogonal projection on the grid.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import NotInnerError
from .realization import (
    RealizationContext,
    StateVector,
    apply_multiplier,
    control_map,
    semigroup_apply,
)
from .signal import TimeSignal, causal_truncate, reflect, to_frequency, to_time
from .symbols import is_inner

FRAME_RATES = tuple(0.25 * 2 ** (k / 2) for k in range(16))
FRAME_DROP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ModelSpaceContext:
    """Realization context of an inner symbol plus cached projector data."""

    ctx: RealizationContext
    tol: float = 1e-6
    frame_rates: tuple = FRAME_RATES
    n_inputs: int = 512

    def __post_init__(self):
        verdict = is_inner(self.ctx.symbol, self.ctx.grid, self.tol)
        if not verdict.is_inner:
            raise NotInnerError(
                f"symbol {self.ctx.symbol.literal} is not inner "
                f"(boundary deviation {verdict.max_boundary_deviation:.3g})"
            )

    @property
    def grid(self):
        return self.ctx.grid

    @cached_property
    def kernel_basis(self):
        """Orthonormal rows (in sqrt(dt)-scaled cell coordinates) spanning the
        kernel elements generated by the anticausal exponential frame."""
        g = self.grid
        t = g.t
        rows = []
        for a in self.frame_rates:
            v = TimeSignal(g, np.where(t < 0, -np.exp(a * np.minimum(t, 0)), 0), "anticausal")
            rows.append(kernel_element(self, to_frequency(v)).causal_part)
        mat = np.array(rows) * np.sqrt(g.dt)
        _, sv, vh = sla.svd(mat, full_matrices=False)
        keep = sv > FRAME_DROP_TOL * sv[0] if sv.size and sv[0] > 0 else np.zeros(0, bool)
        basis = vh[keep]
        basis.setflags(write=False)
        return basis

    @cached_property
    def range_basis(self):
        """Orthonormal columns spanning B_inf applied to pulses on the first n_inputs cells."""
        cols = control_columns(self, min(self.n_inputs, self.grid.n // 2))
        u, sv, _ = sla.svd(cols, full_matrices=False)
        keep = sv > 1e-12 * sv[0] if sv.size and sv[0] > 0 else np.zeros(0, bool)
        basis = u[:, keep]
        basis.setflags(write=False)
        return basis


def project_model_space(mctx, x):
    """P_V x = x - G P_+(conj(G) x)."""
    g = mctx.grid
    causal = g.mask("causal")
    xs = np.where(causal, x.time.samples, 0)
    w = np.where(causal, apply_multiplier(np.conj(mctx.ctx.multiplier), xs, g), 0)
    gw = np.where(causal, apply_multiplier(mctx.ctx.multiplier, w, g), 0)
    return StateVector.from_time(TimeSignal(g, xs - gw, "causal"))


def invariance_residual(mctx, x, t):
    """||(I - P_V) T(t) P_V x|| / (1 + ||x||)."""
    shifted = semigroup_apply(project_model_space(mctx, x), t)
    return float((shifted - project_model_space(mctx, shifted)).norm / (1 + x.norm))


def kernel_element(mctx, v):
    """Causal q with q_hat(i w) = conj(G(-i w)) v_hat(-i w) for v in H2 of the left half-plane.

    Such q satisfy B_inf q = 0.
    """
    g = mctx.grid
    vt = causal_truncate(to_time(v, "anticausal"), "anticausal")
    # conj(v_hat(i w)) is the transform of conj(v(-t)); conjugating the
    # time samples of G conj(v_hat) then reflects the frequency argument.
    w = apply_multiplier(mctx.ctx.multiplier, np.conj(reflect(vt).samples), g)
    return causal_truncate(TimeSignal(g, np.conj(w), "causal"))


class PartialIsometryCheck(NamedTuple):
    residual: float
    orthogonality: float
    kernel_dim: int


def split_kernel(mctx, u):
    """(u_perp, u_ker) causal sample arrays, u_ker the least-squares projection
    onto the span of the kernel basis."""
    g = mctx.grid
    z = g.zero_index
    us = causal_truncate(u).samples[z:]
    basis = mctx.kernel_basis
    coef = basis.conj() @ (us * np.sqrt(g.dt))
    ker = (coef @ basis) / np.sqrt(g.dt)
    return us - ker, ker


def partial_isometry_residual(mctx, u):
    """|‖B_inf u‖ - ‖u_perp‖| / (1 + ‖u‖) plus the orthogonality of G u_perp_hat(-.) to H2-.

    ``orthogonality`` is |<w, P_- w>| for w = G(.) u_perp_hat(-.); it vanishes
    exactly when w already lies in H2 of the right half-plane.
    """
    g = mctx.grid
    z = g.zero_index
    perp, _ = split_kernel(mctx, u)
    norm_u = causal_truncate(u).norm
    norm_perp = float(np.sqrt(g.dt) * np.linalg.norm(perp))
    bu = control_map(mctx.ctx, u)
    residual = abs(bu.norm - norm_perp) / (1 + norm_u)
    full = np.zeros(g.n, dtype=complex)
    full[z:] = perp
    w = apply_multiplier(mctx.ctx.multiplier, full[::-1], g)
    minus = np.where(g.mask("anticausal"), w, 0)
    orth = abs(g.dt * np.vdot(minus, w))
    return PartialIsometryCheck(float(residual), float(orth), int(mctx.kernel_basis.shape[0]))


def control_columns(mctx, n_inputs):
    """Matrix whose k-th column is B_inf applied to a unit pulse on cell k (all causal rows)."""
    g = mctx.grid
    half = g.n // 2
    pulse = np.zeros(g.n, dtype=complex)
    pulse[half - 1] = 1.0
    r = apply_multiplier(mctx.ctx.multiplier, pulse, g)[half:]
    r = np.concatenate([r, np.zeros(n_inputs)])
    return sla.hankel(r[:half], r[half - 1:half - 1 + n_inputs])


def range_completeness(mctx, v):
    """Relative least-squares residual of reaching v in V with inputs on the first mctx.n_inputs cells."""
    g = mctx.grid
    norm_v = v.norm
    if norm_v == 0:
        return 0.0
    gap = (v - project_model_space(mctx, v)).norm / norm_v
    if gap > mctx.tol:
        raise ValueError(f"state is not in the model space (relative distance {gap:.3g})")
    target = v.time.samples[g.zero_index:]
    basis = mctx.range_basis
    fit = basis @ (basis.conj().T @ target)
    return float(np.linalg.norm(fit - target) / np.linalg.norm(target))
