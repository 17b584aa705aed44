import numpy as np
import pytest

from shiftreal import parse_symbol
from shiftreal.stability import (
    RegionSpec,
    Verdict,
    inf_modulus,
    matrix_oracle,
    stability_verdict,
)
from shiftreal.symbols import Delay, constant, inner_from_skew


def test_region_validation():
    with pytest.raises(ValueError):
        RegionSpec("disc", 1.0)
    with pytest.raises(ValueError):
        RegionSpec.strip(0.0)
    with pytest.raises(ValueError):
        RegionSpec.halfplane(1.0, re_points=4)
    assert RegionSpec.halfplane(2.0).re_bounds == (2.0, 52.0)


def test_inf_modulus_examples():
    r = inf_modulus(Delay(1.0), RegionSpec.strip(1.0))
    assert abs(r.value - np.exp(-1)) < 1e-12 and abs(r.point.real - 1) < 1e-12
    r = inf_modulus(parse_symbol("rational:-1,1/1,1"), RegionSpec.halfplane(2.0))
    assert abs(r.value - 1 / 3) < 1e-12 and abs(r.point - 2) < 1e-12
    assert inf_modulus(constant(1.0), RegionSpec.strip(0.5)).value == 1


def test_inf_modulus_monotone_under_refinement():
    sym = parse_symbol("blaschke:0.3+2.1j,1.7-0.4j")
    for region in (RegionSpec.strip(0.5), RegionSpec.halfplane(1.0)):
        a = inf_modulus(sym, region).value
        b = inf_modulus(sym, region.refined()).value
        c = inf_modulus(sym, region.refined().refined()).value
        assert a >= b >= c


def test_verdict_examples():
    v = stability_verdict(Delay(1.0), 0.5, 2.0)
    assert (v.exp_stable, v.group) == (Verdict.YES, Verdict.NO)
    v = stability_verdict(parse_symbol("rational:-1,1/1,1"), 0.5, 2.0)
    assert (v.exp_stable, v.group) == (Verdict.YES, Verdict.YES)
    v = stability_verdict(parse_symbol("blaschke:0.1"), 0.5, 2.0)
    assert v.exp_stable == Verdict.NO
    assert abs(v.zero_in_strip - 0.1) < 1e-6


def test_inconclusive_when_near_zero_outside_lattice_reach():
    # zero just beyond the strip edge: |G| is tiny on the lattice but has no zero inside
    v = stability_verdict(parse_symbol("blaschke:0.5001"), 0.5, 2.0, margin=1e-3)
    assert v.exp_stable == Verdict.INCONCLUSIVE


def test_matrix_oracle_agreement(rng):
    agree = 0
    for _ in range(12):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        sym = inner_from_skew(m - m.conj().T, rng.standard_normal(3) + 1j * rng.standard_normal(3))
        for alpha, rho in ((0.05, 0.5), (0.5, 2.0)):
            oracle = matrix_oracle(sym, alpha, rho)
            v = stability_verdict(sym, alpha, rho)
            if v.exp_stable != Verdict.INCONCLUSIVE:
                assert (v.exp_stable == Verdict.YES) == oracle.exp_stable
                agree += 1
            if v.group != Verdict.INCONCLUSIVE:
                assert (v.group == Verdict.YES) == oracle.group
    assert agree > 0


def test_matrix_oracle_type():
    with pytest.raises(TypeError):
        matrix_oracle(Delay(1.0), 0.5, 2.0)


def test_invariant_zeros_blaschke():
    from shiftreal.stability import invariant_zeros
    z = invariant_zeros(parse_symbol("blaschke:0.3+1j,2").kernel_form().ss)
    assert np.allclose(sorted(z, key=lambda v: v.real), [0.3 + 1j, 2.0])


def test_near_axis_zero_detected():
    # the dip of |G| around a zero at Re 0.005 is far narrower than the lattice
    v = stability_verdict(parse_symbol("blaschke:0.005+1.333j"), 0.5, 2.0)
    assert v.exp_stable == Verdict.NO
    assert abs(v.zero_in_strip - (0.005 + 1.333j)) < 1e-10


def test_sampled_symbol_zero_search(grid):
    from shiftreal.symbols import Sampled
    samp = Sampled.from_symbol(parse_symbol("blaschke:0.3+0.2j"), grid)
    v = stability_verdict(samp, 0.5, 2.0)
    assert v.exp_stable == Verdict.NO
    assert abs(v.zero_in_strip - (0.3 + 0.2j)) < 1e-3
