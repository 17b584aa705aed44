"""Verification suites: seeded property checks collected into reports."""
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from . import hankel, model_space as ms, realization as rz, stability as st, weighted as wt
from .signal import GridConfig, TimeSignal, to_frequency
from .symbols import MatrixInner, is_inner, kernel_values

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    id: str
    anchor: str
    value: Union[float, str]
    tolerance: Optional[float]
    status: str

    def as_dict(self):
        return {"id": self.id, "anchor": self.anchor, "value": self.value,
                "tolerance": self.tolerance, "status": self.status}


@dataclass
class SuiteReport:
    suite: str
    symbol: str
    grid: GridConfig
    seed: int
    checks: List[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, id, anchor, value, tolerance):
        value = float(value)
        status = PASS if value <= tolerance else FAIL
        self.checks.append(Check(id, anchor, value, float(tolerance), status))

    def add_status(self, id, anchor, value, status):
        self.checks.append(Check(id, anchor, value, None, status))

    @property
    def failed(self):
        return any(c.status == FAIL for c in self.checks)

    def as_dict(self):
        return {
            "suite": self.suite,
            "symbol": self.symbol,
            "grid": {"n": self.grid.n, "dt": self.grid.dt, "tail_tol": self.grid.tail_tol},
            "seed": self.seed,
            "status": FAIL if self.failed else PASS,
            "checks": [c.as_dict() for c in self.checks],
            "data": self.data,
        }


# ----------------------------------------------------------- random inputs

def random_laplace_state(grid, rng, terms=4):
    """Random combination of 1/(s + a) and 1/(s + a)^2 with closed-form samples."""
    a = rng.uniform(0.3, 3.0, terms)
    c = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    p = rng.integers(1, 3, terms)

    def fn(s):
        return sum(ci / (s + ai) ** pi for ci, ai, pi in zip(c, a, p))

    return rz.StateVector.from_laplace(grid, fn)


def random_smooth_input(grid, rng, terms=3):
    """Random sum of t exp(-a t) cos(w t + phi); vanishes at t = 0."""
    a = rng.uniform(0.5, 3.0, terms)
    b = rng.standard_normal(terms)
    w = rng.uniform(0.0, 4.0, terms)
    phi = rng.uniform(0, 2 * np.pi, terms)

    def fn(t):
        return sum(bi * t * np.exp(-ai * t) * np.cos(wi * t + p) for ai, bi, wi, p in zip(a, b, w, phi))

    return TimeSignal.from_function(grid, fn)


def random_time_state(grid, rng, decay=0.5):
    """White noise under an exponential envelope, as a causal state."""
    t = grid.t
    x = np.where(t > 0, (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)) * np.exp(-decay * np.maximum(t, 0)), 0)
    return rz.StateVector.from_time(TimeSignal(grid, x, "causal"))


def random_model_space_element(mctx, rng):
    return ms.project_model_space(mctx, random_time_state(mctx.grid, rng))


def random_decomposable_input(mctx, rng):
    """u = u_perp + u_ker with u_perp orthogonal to ker B_inf and u_ker in the kernel frame span.

    u_perp is the time reflection of conj(G) v for v in V: for such inputs
    G u_hat(-.) = v already lies in H2, which is the defining property of the
    orthogonal complement of the kernel.
    """
    g = mctx.grid
    v = random_model_space_element(mctx, rng)
    w = rz.apply_multiplier(np.conj(mctx.ctx.multiplier), v.time.samples, g)
    perp = np.where(g.mask("causal"), w[::-1], 0)
    basis = mctx.kernel_basis
    coef = rng.standard_normal(basis.shape[0]) + 1j * rng.standard_normal(basis.shape[0])
    ker = (coef @ basis) / np.sqrt(g.dt)
    scale = np.linalg.norm(perp[g.zero_index:]) / max(np.linalg.norm(ker), 1e-300)
    full = perp.copy()
    full[g.zero_index:] += ker * scale * rng.uniform(0.2, 2.0)
    return TimeSignal(g, full, "causal")


def _random_pairs(rng, count):
    s = rng.uniform(0.2, 4, count) + 1j * rng.uniform(-4, 4, count)
    z = rng.uniform(0.2, 4, count) + 1j * rng.uniform(-4, 4, count)
    return list(zip(s, z))


# ---------------------------------------------------------------- suites

def _realization_checks(rep, ctx, rng):
    g = ctx.grid
    states = [random_laplace_state(g, rng) for _ in range(20)]
    iso = max(abs(rz.observe_trace(x).norm - x.norm) / x.norm for x in states)
    rep.add("observability_isometry", "observation map is an isometry", iso, 1e-12)

    x = rz.StateVector.from_laplace(g, lambda s: 1 / (s + 1))
    err = np.max(np.abs(rz.resolvent_apply(x, 2.0).freq.samples - x.freq.samples / 3))
    rep.add("resolvent_eigenvector", "resolvent formula", err, 1e-6)
    rep.add("point_evaluation", "value of the resolvent output at zero",
            abs(rz.point_evaluate(x, 1.0) - 0.5), 1e-6)

    worst_id = worst_gen = 0.0
    for x in states[:5]:
        b = rng.uniform(0.5, 3) + 1j * rng.uniform(-3, 3)
        c = rng.uniform(0.5, 3) + 1j * rng.uniform(-3, 3)
        lhs = rz.resolvent_apply(x, b) - rz.resolvent_apply(x, c)
        rhs = rz.resolvent_apply(rz.resolvent_apply(x, c), b).scale(c - b)
        worst_id = max(worst_id, (lhs - rhs).norm / x.norm)
        r = rz.resolvent_apply(x, b)
        gen = rz.generator_apply(r) - (r.scale(b) - x)
        worst_gen = max(worst_gen, gen.norm / x.norm)
    rep.add("resolvent_identity", "first resolvent identity", worst_id, 1e-8)
    rep.add("generator_resolvent", "generator/resolvent relation", worst_gen, 1e-8)

    y = random_time_state(g, rng)
    m1, m2 = 37, 91
    a = rz.semigroup_apply(rz.semigroup_apply(y, m1 * g.dt), m2 * g.dt)
    b = rz.semigroup_apply(y, (m1 + m2) * g.dt)
    rep.add("semigroup_law", "semigroup property of the left shift",
            float(np.max(np.abs(a.time.samples - b.time.samples))), 1e-14)

    pairs = _random_pairs(rng, 20)
    ti = max(rz.transfer_identity_residual(ctx, s, z) for s, z in pairs)
    rep.add("transfer_identity", "transfer function identity", ti, 1e-4)


def _hankel_checks(rep, ctx, rng):
    g = ctx.grid
    inputs = [random_smooth_input(g, rng) for _ in range(5)]
    bound = max(hankel.hankel_apply(ctx, u).norm / u.norm for u in inputs) - ctx.sup_norm
    rep.add("hankel_admissibility_bound", "Hankel norm bounded by the sup of |G|", max(bound, 0.0), 1e-12)
    if ctx.feedthrough is None or ctx.symbol.kernel_form() is None:
        rep.add_status("hankel_factorization", "Hankel operator factors through the realization",
                       "no closed-form kernel", INCONCLUSIVE)
        return
    fr = max(hankel.factorization_residual(ctx, u) for u in inputs)
    rep.add("hankel_factorization", "Hankel operator factors through the realization", fr, 1e-6)


def _simulation_checks(rep, ctx, rng):
    g = ctx.grid
    if ctx.feedthrough is None:
        rep.add_status("simulate_mu_independence", "output formula independent of mu",
                       "no feedthrough", INCONCLUSIVE)
        return
    u = random_smooth_input(g, rng)
    x0 = rz.StateVector.zeros(g)
    ys = [rz.simulate(ctx, x0, u, mu).y.samples for mu in (1.0, 2.0, 5.0)]
    ref = max(np.linalg.norm(ys[0]), 1e-300)
    dev = max(np.linalg.norm(y - ys[0]) for y in ys[1:]) / ref
    rep.add("simulate_mu_independence", "output formula independent of mu", dev, 1e-4)
    if ctx.symbol.kernel_form() is None:
        return
    yo = convolution_oracle(ctx, u)
    z = g.zero_index
    rel = np.linalg.norm(ys[0][z:] - yo) / max(np.linalg.norm(yo), 1e-300)
    rep.add("simulate_oracle", "trajectory and output formulas", rel, 1e-4)


def convolution_oracle(ctx, u, count=None):
    """Time-domain D u + h * u from the closed-form kernel (causal samples).

    Cell-centred output k collects full cells m < k with h((k - m) dt) and the
    half cell around t_k with weight h(0+) / 2.
    """
    g = ctx.grid
    us = u.causal_part
    count = us.size if count is None else count
    h = kernel_values(ctx.symbol, g.dt, count)
    kf = ctx.symbol.kernel_form()
    h0 = complex(kf.ss.c @ kf.ss.b) if kf.delay == 0 and kf.ss.a.shape[0] else 0.0
    hh = np.concatenate([[h0], h])
    conv = np.convolve(hh, us[:count])[:count] * g.dt - 0.5 * g.dt * h0 * us[:count]
    return conv + ctx.feedthrough * us[:count]


def _model_space_checks(rep, mctx, rng):
    g = mctx.grid
    inv = 0.0
    for t in (0.25, 1.0):
        inv = max(inv, ms.invariance_residual(mctx, random_time_state(g, rng), t))
    rep.add("model_space_invariance", "shift invariance of the model space", inv, 1e-8)

    lands = 0.0
    for _ in range(3):
        u = random_smooth_input(g, rng)
        bu = rz.control_map(mctx.ctx, u)
        lands = max(lands, (bu - ms.project_model_space(mctx, bu)).norm / u.norm)
    rep.add("control_map_into_model_space", "control map takes values in the model space", lands, 1e-8)

    ker = 0.0
    for _ in range(3):
        t = g.t
        v = np.where(t < 0, (rng.standard_normal(g.n) + 1j * rng.standard_normal(g.n)) * np.exp(0.5 * np.minimum(t, 0)), 0)
        q = ms.kernel_element(mctx, to_frequency(TimeSignal(g, v, "anticausal")))
        ker = max(ker, rz.control_map(mctx.ctx, q).norm / q.norm)
    rep.add("kernel_elements", "kernel of the control map", ker, 1e-6)

    res = orth = 0.0
    for _ in range(10):
        u = random_decomposable_input(mctx, rng)
        chk = ms.partial_isometry_residual(mctx, u)
        res = max(res, chk.residual)
        orth = max(orth, chk.orthogonality / u.energy)
    rep.add("partial_isometry", "control map is a partial isometry", res, 1e-3)
    rep.add("partial_isometry_orthogonality", "orthogonality step of the partial isometry", orth, 1e-6)

    rc = max(ms.range_completeness(mctx, random_model_space_element(mctx, rng)) for _ in range(5))
    rep.add("range_completeness", "range of the control map equals the model space", rc, 1e-6)

    if mctx.ctx.symbol.kernel_form() is not None:
        anchor = "Hankel operator of an inner symbol is a partial isometry"
        dim = hankel_window(mctx.ctx.symbol, g)
        if dim is None:
            rep.add_status("hankel_partial_isometry", anchor, "kernel longer than the matrix window", INCONCLUSIVE)
        else:
            sv = hankel.hankel_svd(mctx.ctx, dim)
            dist = float(np.max(np.minimum(np.abs(sv), np.abs(sv - 1))))
            rep.add("hankel_partial_isometry", anchor, dist, 1e-2)


HANKEL_WINDOW_MIN = 1024
HANKEL_WINDOW_MAX = 2048
HANKEL_TAIL_TOL = 1e-6


def hankel_window(symbol, grid):
    """Smallest power-of-two matrix size (at least HANKEL_WINDOW_MIN) whose
    window holds all but HANKEL_TAIL_TOL of the kernel energy on the causal
    half, or None when that needs more than HANKEL_WINDOW_MAX cells."""
    half = grid.n // 2
    h = np.abs(kernel_values(symbol, grid.dt, half)) ** 2
    total = h.sum()
    dim = min(HANKEL_WINDOW_MIN, half // 2)
    while True:
        # entries of a dim x dim Hankel matrix reach lag 2 dim - 1
        if total == 0 or h[2 * dim - 1:].sum() <= HANKEL_TAIL_TOL * total:
            return dim
        if 2 * dim > min(HANKEL_WINDOW_MAX, half // 2):
            return None
        dim *= 2


def run_verify(symbol, grid, seed=0, tol=1e-6):
    """Full identity suite; model-space checks are added for inner symbols."""
    rng = np.random.default_rng(seed)
    ctx = rz.RealizationContext(grid, symbol)
    rep = SuiteReport("verify", symbol.literal, grid, seed)
    _realization_checks(rep, ctx, rng)
    _hankel_checks(rep, ctx, rng)
    _simulation_checks(rep, ctx, rng)
    verdict = is_inner(symbol, grid, tol)
    rep.data["inner"] = bool(verdict.is_inner)
    rep.data["feedthrough"] = None if ctx.feedthrough is None else [ctx.feedthrough.real, ctx.feedthrough.imag]
    if verdict.is_inner:
        _model_space_checks(rep, ms.ModelSpaceContext(ctx, tol), rng)
    return rep


def run_model_space(symbol, grid, seed=0, tol=1e-6):
    """Model-space suite; raises NotInnerError for non-inner symbols."""
    rng = np.random.default_rng(seed)
    mctx = ms.ModelSpaceContext(rz.RealizationContext(grid, symbol), tol)
    rep = SuiteReport("model-space", symbol.literal, grid, seed)
    rep.data["kernel_basis_dim"] = int(mctx.kernel_basis.shape[0])
    _model_space_checks(rep, mctx, rng)
    return rep


def run_stability(symbol, grid, alpha=0.5, rho=2.0, margin=st.DEFAULT_MARGIN, seed=0):
    v = st.stability_verdict(symbol, alpha, rho, margin)
    rep = SuiteReport("stability", symbol.literal, grid, seed)
    ok = {st.Verdict.YES: PASS, st.Verdict.NO: PASS, st.Verdict.INCONCLUSIVE: INCONCLUSIVE}
    rep.add_status("exp_stable", "decay rate criterion on the strip", v.exp_stable.value, ok[v.exp_stable])
    rep.add_status("group", "group criterion on the half-plane", v.group.value, ok[v.group])
    rep.data.update({
        "alpha": alpha, "rho": rho, "margin": margin,
        "strip_inf": v.strip_inf.value, "halfplane_inf": v.halfplane_inf.value,
    })
    if isinstance(symbol, MatrixInner):
        o = st.matrix_oracle(symbol, alpha, rho)
        want = {True: st.Verdict.YES, False: st.Verdict.NO}
        agree = v.exp_stable == want[o.exp_stable] and v.group == want[o.group]
        rep.add_status("matrix_oracle", "eigenvalues of the restricted generator",
                       "agree" if agree else "disagree", PASS if agree else FAIL)
        rep.data["eigenvalue_real_parts"] = sorted(float(x) for x in o.eigenvalues.real)
    return rep


def run_weighted(grid, n_max=5, seed=0):
    rng = np.random.default_rng(seed)
    rep = SuiteReport("weighted-demo", "weight exp(-t)", grid, seed)
    rows = wt.inequivalence_demo(grid, n_max)
    closed = [np.exp(-2 * r.n) * (1 - np.exp(-2)) / 2 for r in rows]
    rep.add("inequivalence_table", "weighted and unweighted norms are not equivalent",
            max(abs(r.ratio**2 - c) for r, c in zip(rows, closed)), 1e-10)
    rep.data["table"] = [r._asdict() for r in rows]

    worst = 0.0
    for _ in range(20):
        f = wt.WeightedSignal(random_time_state(grid, rng).time)
        for t in (grid.dt, 0.5, 1.0, 2.0):
            worst = max(worst, wt.weighted_growth_ratio(f, t) / np.exp(t) - 1)
    rep.add("growth_bound", "shift growth in the weighted norm", max(worst, 0.0), 1e-12)

    late = wt.WeightedSignal(TimeSignal.from_function(grid, lambda t: np.where(t > 1, np.exp(-0.3 * t), 0)))
    rep.add("growth_equality", "equality case of the growth bound",
            abs(wt.weighted_growth_ratio(late, 1.0) - np.e), 1e-10)

    f = wt.WeightedSignal(TimeSignal.from_function(grid, lambda t: np.exp(-t)))
    rep.add("finite_time_ratio", "finite-time observability ratio",
            abs(wt.finite_time_ratio(f, 1.0) - (1 - np.exp(-2))), 1e-4)
    return rep


def hankel_spectrum(symbol, grid, dim):
    ctx = rz.RealizationContext(grid, symbol)
    return hankel.hankel_svd(ctx, dim)


def simulate_output(symbol, grid, u, mu=1.0):
    ctx = rz.RealizationContext(grid, symbol)
    return rz.simulate(ctx, rz.StateVector.zeros(grid), u, mu).y

