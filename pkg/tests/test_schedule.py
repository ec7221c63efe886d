"""Noise schedule tables against independent cumulative-product oracles."""

from fractions import Fraction

import numpy as np
import pytest

from dia.diffusion.schedule import DiffusionSchedule, build_schedule


def test_hand_case_alpha_bars_exact():
    sched = DiffusionSchedule(T=4, betas=np.array([0.1, 0.2, 0.3, 0.4]))
    # correctly rounded double of the exact rational cumulative product
    exact = []
    product = Fraction(1)
    for beta in [0.1, 0.2, 0.3, 0.4]:
        product *= Fraction(1.0 - beta)  # alpha as stored in double precision
        exact.append(float(product))
    assert np.array_equal(sched.alpha_bars, exact)
    # the decimal hand values agree to within one double-precision ulp
    # (0.9 * 0.8 in binary rounds one ulp away from the literal 0.72)
    hand = np.array([0.9, 0.72, 0.504, 0.3024])
    assert np.max(np.abs(sched.alpha_bars - hand)) <= np.spacing(1.0)
    assert np.array_equal(sched.alphas, 1.0 - np.array([0.1, 0.2, 0.3, 0.4]))


def test_linear_endpoints_echoed():
    sched = build_schedule(1000, 1e-4, 0.02)
    assert sched.betas[0] == 1e-4
    assert sched.betas[-1] == 0.02
    assert sched.T == 1000


def test_alpha_bar_T_matches_exact_rational_oracle():
    sched = build_schedule(1000, 1e-4, 0.02)
    # exact rational product over the same float64 beta values
    product = Fraction(1)
    for beta in sched.betas:
        product *= 1 - Fraction(beta)
    oracle = float(product)
    assert oracle == pytest.approx(4.04e-5, rel=5e-3)
    assert sched.alpha_bars[-1] == pytest.approx(oracle, rel=1e-7)


def test_alpha_bar_strictly_decreasing_in_unit_interval():
    sched = build_schedule(1000, 1e-4, 0.02)
    assert np.all(np.diff(sched.alpha_bars) < 0)
    assert np.all((sched.alpha_bars > 0) & (sched.alpha_bars < 1))


def test_stepwise_consistency_extended_precision():
    sched = build_schedule(1000, 1e-4, 0.02)
    ab = np.cumprod((1.0 - sched.betas).astype(np.longdouble))
    alphas = (1.0 - sched.betas).astype(np.longdouble)
    gaps = np.abs(ab[1:] - ab[:-1] * alphas[1:])
    assert float(gaps.max()) < 1e-12


def test_indexing_is_one_based():
    sched = DiffusionSchedule(T=4, betas=np.array([0.1, 0.2, 0.3, 0.4]))
    assert sched.alpha_bar(1) == 0.9
    assert sched.alpha_bar(4) == 0.3024
    np.testing.assert_allclose(sched.alpha_bar([2, 3]), [0.72, 0.504],
                               rtol=0, atol=np.spacing(1.0))


@pytest.mark.parametrize("t", [0, 5, -1])
def test_out_of_range_timestep_rejected(t):
    sched = DiffusionSchedule(T=4, betas=np.array([0.1, 0.2, 0.3, 0.4]))
    with pytest.raises(ValueError):
        sched.check_t(t)


def test_invalid_betas_rejected():
    with pytest.raises(ValueError):
        DiffusionSchedule(T=3, betas=np.array([0.2, 0.1, 0.3]))  # not increasing
    with pytest.raises(ValueError):
        DiffusionSchedule(T=2, betas=np.array([0.0, 0.5]))  # not in (0,1)
    with pytest.raises(ValueError):
        build_schedule(10, 0.02, 1e-4)  # start >= end
    with pytest.raises(ValueError):
        build_schedule(10, 1e-4, 0.02, kind="cosine")
