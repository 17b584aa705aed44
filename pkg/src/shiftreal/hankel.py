"""Hankel operator of a symbol: frequency path, time-domain matrix, spectra.

The frequency path is H_G u = P_+(G(.) u_hat(-.)) = Psi_inf B_inf u.  The
matrix oracle discretises the kernel integral independently from the closed
form impulse response: M[j, k] = dt * h(t_j + t_k) with t_j + t_k = (j+k+1) dt
on the cell-centred grid.
"""
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as sla

from .errors import FeedthroughError
from .realization import (
    StateVector,
    apply_multiplier,
    control_map,
    observe_trace,
)
from .signal import TimeSignal, causal_truncate
from .symbols import kernel_values

GAP_FACTOR = 10.0
ZERO_THRESHOLD = 1e-8
MAX_ORACLE_DIM = 2048


class HankelMatrix(NamedTuple):
    dim: int
    entries: np.ndarray
    dt: float

    def apply(self, u):
        """Action on the first ``dim`` causal samples of u (an array or TimeSignal)."""
        if isinstance(u, TimeSignal):
            u = u.causal_part
        return self.entries @ np.asarray(u)[: self.dim]


class RangeDiagnostics(NamedTuple):
    singular_values: np.ndarray
    gap_index: Optional[int]
    closed_range_verdict: bool
    approx_ctrb_residual: float
    approx_obsv_residual: float
    exact_ctrb_margin: float
    exact_obsv_margin: float


def hankel_apply(ctx, u):
    """Time trace of P_+(G u_hat(-.))."""
    return observe_trace(control_map(ctx, u))


def _check_kernel(ctx):
    if ctx.feedthrough is None:
        raise FeedthroughError("Hankel kernel needs a regular symbol (feedthrough limit D)")
    if ctx.symbol.kernel_form() is None:
        raise FeedthroughError(f"symbol {ctx.symbol.literal} has no closed-form kernel")


def hankel_matrix(ctx, dim):
    """dim x dim Hankel matrix of the strictly proper part of G."""
    dim = int(dim)
    if dim < 1:
        raise ValueError("dim must be positive")
    _check_kernel(ctx)
    dt = ctx.grid.dt
    h = kernel_values(ctx.symbol, dt, 2 * dim - 1) * dt
    if np.all(h.imag == 0):
        h = h.real
    m = sla.hankel(h[:dim], h[dim - 1:])
    m.setflags(write=False)
    return HankelMatrix(dim, m, dt)


def hankel_svd(ctx, dim):
    """Singular values of the dt-weighted Hankel matrix, in descending order."""
    return sla.svdvals(hankel_matrix(ctx, dim).entries)


def factorization_residual(ctx, u, dim=None):
    """Mismatch between the frequency path and the matrix oracle.

    The two frequency-side evaluations (hankel_apply and the explicit
    Psi B chain) are compared first; then the matrix acts on the first ``dim``
    samples of u and is compared on those samples.  ``dim`` defaults to the
    smallest power of two covering the support of u, capped at
    min(n/4, MAX_ORACLE_DIM) to bound memory.  Returns
    the larger residual, each scaled by 1/(1 + ||u||).
    """
    grid = ctx.grid
    u = causal_truncate(u)
    scale = 1 + u.norm
    a = hankel_apply(ctx, u).causal_part
    b = observe_trace(control_map(ctx, u)).causal_part
    chain = np.linalg.norm(a - b) * np.sqrt(grid.dt) / scale
    if ctx.feedthrough is None or ctx.symbol.kernel_form() is None:
        return float(chain)
    half = grid.n // 2
    if dim is None:
        nz = np.flatnonzero(u.causal_part)
        need = (nz[-1] + 1) if nz.size else 1
        dim = min(half // 2, MAX_ORACLE_DIM, max(16, 1 << int(np.ceil(np.log2(need)))))
    mat = hankel_matrix(ctx, dim)
    u_head = np.zeros(grid.n, dtype=complex)
    u_head[half:half + dim] = u.causal_part[:dim]
    freq = hankel_apply(ctx, TimeSignal(grid, u_head, "causal")).causal_part[:dim]
    oracle = np.linalg.norm(freq - mat.apply(u_head[half:])) * np.sqrt(grid.dt) / scale
    return float(max(chain, oracle))


def _control_block(ctx, dim):
    """Matrix of B_inf from unit pulses on the first dim cells to the first dim cells.

    In orthonormal cell coordinates the block is a Hankel matrix built from
    the response of the grid multiplier to a single reflected pulse.
    """
    grid = ctx.grid
    half = grid.n // 2
    pulse = np.zeros(grid.n, dtype=complex)
    pulse[half - 1] = 1.0
    r = apply_multiplier(ctx.multiplier, pulse, grid)[half:half + 2 * dim - 1]
    return sla.hankel(r[:dim], r[dim - 1:])


def range_diagnostics(ctx, dim, seed=0, n_random=8):
    """Spectral gap heuristic and controllability/observability margins.

    ``closed_range_verdict`` is a heuristic: with r singular values above
    ZERO_THRESHOLD * top, the range is reported closed when the r-th value
    exceeds both the next value and the threshold by GAP_FACTOR.
    """
    sv = hankel_svd(ctx, dim)
    top = sv[0] if sv.size else 0.0
    thr = ZERO_THRESHOLD * top
    r = int(np.sum(sv > thr)) if top > 0 else 0
    gap_index = None
    if r == 0:
        closed = True
    else:
        nxt = sv[r] if r < sv.size else 0.0
        closed = bool(sv[r - 1] >= GAP_FACTOR * nxt and sv[r - 1] >= GAP_FACTOR * thr)
        if closed:
            gap_index = r - 1
        elif sv.size > 1:
            ratios = sv[:-1] / np.maximum(sv[1:], np.finfo(float).tiny)
            gap_index = int(np.argmax(ratios))

    blk = _control_block(ctx, dim)
    ctrb_sv = sla.svdvals(blk)
    exact_ctrb = float(ctrb_sv[-1])

    # observation: state -> trace is the identity on time samples; its margin is
    # measured on an orthonormal family of states built from random vectors.
    rng = np.random.default_rng(seed)
    grid = ctx.grid
    half = grid.n // 2
    vecs = rng.standard_normal((n_random, dim)) + 1j * rng.standard_normal((n_random, dim))
    q, _ = np.linalg.qr(vecs.T)
    gains = []
    ctrb_res = []
    for col in q.T:
        full = np.zeros(grid.n, dtype=complex)
        full[half:half + dim] = col / np.sqrt(grid.dt)
        st = StateVector.from_time(TimeSignal(grid, full, "causal"))
        gains.append(observe_trace(st).norm / st.norm)
        coef, *_ = np.linalg.lstsq(blk, col, rcond=None)
        ctrb_res.append(np.linalg.norm(blk @ coef - col))
    exact_obsv = float(min(gains))
    approx_obsv = float(max(abs(g_ - 1) for g_ in gains))
    return RangeDiagnostics(sv, gap_index, closed, float(max(ctrb_res)), approx_obsv, exact_ctrb, exact_obsv)
