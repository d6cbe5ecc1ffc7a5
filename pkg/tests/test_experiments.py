"""Polarization fractions, designed extreme source, perturbation accuracy,
effective sets."""

import math

import numpy as np
import pytest

from polarlens import (
    ExtremeExampleParams,
    PerturbationSpec,
    PolarizationProfile,
    as_order,
    conditional_renyi,
    effective_set,
    extremal_fractions,
    extreme_example_closed_form,
    extreme_example_distribution,
    extreme_example_sweep,
    fraction_trend,
    high_entropy_indices,
    level_profile,
    make_bsc,
    make_from_atoms,
    perturbation_approx,
    perturbation_distribution,
    perturbation_exact,
    perturbation_sweep,
)
from polarlens.distributions import _freeze


def _tiny_profile():
    orders = (as_order(2.0),)
    entries = np.array([[0.95, 0.02, 0.5, 0.99]])
    return PolarizationProfile(
        2, orders, _freeze(entries), _freeze(np.array([0.6]))
    )


def test_extremal_fractions_counting():
    rep = extremal_fractions(_tiny_profile(), 0.1)[0]
    assert rep.frac_high == 0.5
    assert rep.frac_low == 0.25
    assert rep.predicted_high == 0.6
    assert rep.predicted_low == pytest.approx(0.4)


def test_extremal_fractions_band_validation():
    prof = _tiny_profile()
    for bad in (0.0, 0.5, -0.1, 1.0):
        with pytest.raises(ValueError):
            extremal_fractions(prof, bad)


def test_fraction_trend_levels():
    trend = fraction_trend(make_bsc(0.2), 3, (1.0, 2.0), 0.1)
    assert [lvl for lvl, _ in trend] == [1, 2, 3]
    for _, reps in trend:
        for r in reps:
            assert 0.0 <= r.frac_low <= 1.0
            assert 0.0 <= r.frac_high <= 1.0


def test_high_entropy_indices_one_based():
    idx = high_entropy_indices(_tiny_profile(), 2.0, threshold=0.5)
    assert idx.tolist() == [1, 4]


def test_extreme_params_validation():
    with pytest.raises(ValueError):
        ExtremeExampleParams(alpha0=1.0, size=8)
    with pytest.raises(ValueError):
        ExtremeExampleParams(alpha0=2.0, size=1)


def test_extreme_split_formula():
    p = ExtremeExampleParams(alpha0=2.0, size=16)
    want = 0.5 * 15.0 ** ((2.0 - 0.25) / 1.0)
    assert p.split_minus_one == pytest.approx(want, rel=1e-15)
    assert p.split_minus_one == pytest.approx(57.16493416739416, rel=1e-12)


def test_extreme_spot_values():
    p = ExtremeExampleParams(alpha0=2.0, size=16)
    assert extreme_example_closed_form(p, 2.0) == pytest.approx(0.7338, abs=1e-3)
    assert extreme_example_closed_form(p, 3.0) == pytest.approx(0.3460, abs=1e-3)


def test_extreme_distribution_matches_closed_form():
    for alpha0, size in ((2.0, 8), (2.0, 20), (3.0, 12), (1.5, 10)):
        p = ExtremeExampleParams(alpha0=alpha0, size=size)
        d = extreme_example_distribution(p)
        assert d.mass == pytest.approx(1.0, abs=1e-12)
        for a in (alpha0, alpha0 + 1.0, 0.5):
            assert conditional_renyi(d, a) == pytest.approx(
                extreme_example_closed_form(p, a), abs=1e-9
            )


def test_extreme_sweep_opposite_monotonicity():
    rows = extreme_example_sweep(2.0, range(8, 29))
    h2 = [r.closed_form for r in rows if r.order.alpha == 2.0]
    h3 = [r.closed_form for r in rows if r.order.alpha == 3.0]
    assert all(b > a for a, b in zip(h2, h2[1:]))
    assert all(b < a for a, b in zip(h3, h3[1:]))
    assert max(r.abs_diff for r in rows) <= 1e-9


def test_extreme_closed_form_large_order_no_overflow():
    p = ExtremeExampleParams(alpha0=2.0, size=24)
    h = extreme_example_closed_form(p, 400.0)
    assert 0.0 <= h <= 1.0
    assert math.isfinite(h)


def test_perturbation_spec_validation():
    ok = dict(mode="uniform", base_weights=(0.5, 0.5), deltas=(0.1, -0.1), order=2.0)
    PerturbationSpec(**ok)
    with pytest.raises(ValueError):
        PerturbationSpec(**{**ok, "mode": "other"})
    with pytest.raises(ValueError):
        PerturbationSpec(**{**ok, "deltas": (0.3, 0.0)})  # |d| > Q/2
    with pytest.raises(ValueError):
        PerturbationSpec(**{**ok, "base_weights": (0.5, 0.4)})  # sum != 1
    with pytest.raises(ValueError):
        PerturbationSpec(**{**ok, "order": "inf"})
    with pytest.raises(ValueError):
        PerturbationSpec(
            mode="deterministic", base_weights=(0.5, 0.5), deltas=(-0.1, 0.0), order=2.0
        )


def test_perturbation_distribution_marginals():
    spec = PerturbationSpec(
        mode="uniform", base_weights=(0.6, 0.4), deltas=(0.05, -0.02), order=2.0
    )
    d = perturbation_distribution(spec)
    assert d.symbol_mass.tolist() == pytest.approx([0.6, 0.4])
    spec = PerturbationSpec(
        mode="deterministic", base_weights=(0.5, 0.5), deltas=(0.1, 0.0), order=2.0
    )
    d = perturbation_distribution(spec)
    assert d.symbol_mass.tolist() == pytest.approx([0.5, 0.5])


def test_uniform_alpha2_approximation_is_exact():
    # expansion terminates at the quadratic term, so rel_error is literal 0
    spec = PerturbationSpec(
        mode="uniform", base_weights=(1.0,), deltas=(0.01,), order=2.0
    )
    for row in perturbation_sweep(spec, halvings=5):
        assert row.rel_error == 0.0
        q_delta = 0.01 * row.scale
        assert row.exact == pytest.approx(4.0 * q_delta**2, rel=1e-12)


def test_uniform_alpha3_approximation_is_exact():
    spec = PerturbationSpec(
        mode="uniform", base_weights=(0.5, 0.3, 0.2), deltas=(0.1, -0.05, 0.02), order=3.0
    )
    for row in perturbation_sweep(spec, halvings=5):
        assert row.rel_error == 0.0


def test_deterministic_alpha3_error_strictly_shrinks():
    spec = PerturbationSpec(
        mode="deterministic", base_weights=(0.5, 0.5), deltas=(0.01, 0.01), order=3.0
    )
    rows = perturbation_sweep(spec, halvings=5)
    errs = [r.rel_error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:])), errs


def test_deterministic_half_order_spot_value():
    spec = PerturbationSpec(
        mode="deterministic", base_weights=(0.5, 0.5), deltas=(1e-4, 1e-4), order=0.5
    )
    exact = perturbation_exact(spec)
    approx = perturbation_approx(spec)
    assert exact == pytest.approx(0.014042, abs=5e-6)
    assert abs(approx - exact) / abs(exact) <= 1e-6


def test_mpmath_branch_agrees_with_direct_float():
    spec = PerturbationSpec(
        mode="uniform", base_weights=(0.7, 0.3), deltas=(0.01, -0.003), order=2.5
    )
    q = np.array(spec.base_weights)
    dv = np.array(spec.deltas)
    a = 2.5
    direct = float(
        np.sum((q / 2 + dv) ** a + (q / 2 - dv) ** a) / (2 ** (1 - a) * np.sum(q**a)) - 1
    )
    assert perturbation_exact(spec) == pytest.approx(direct, rel=1e-10)


def test_exact_matches_entropy_shift_direction():
    # positive deviation of the joint power sum at a > 1 lowers the entropy
    spec = PerturbationSpec(
        mode="uniform", base_weights=(0.5, 0.5), deltas=(0.05, 0.05), order=2.0
    )
    assert perturbation_exact(spec) > 0.0
    d = perturbation_distribution(spec)
    assert conditional_renyi(d, 2.0) < 1.0


def test_effective_set_pick_order_flips_with_alpha():
    d = extreme_example_distribution(ExtremeExampleParams(alpha0=2.0, size=16))
    low = effective_set(d, 2.0)
    high = effective_set(d, 3.0)
    # atom 0 is the deterministic class, atom 1 the uninformative class
    assert low.indices[0] == 1
    assert high.indices[0] == 0


def test_effective_set_shares_and_entropy():
    d = make_from_atoms([(0.45, 0.05, 1.0), (0.2, 0.28, 1.0), (0.01, 0.01, 1.0)])
    rep = effective_set(d, 2.0, eps=0.01)
    assert set(rep.indices) == {0, 1}  # the near-massless atom is skipped
    assert rep.num_share > 0.99
    assert rep.den_share > 0.99
    assert rep.entropy == pytest.approx(conditional_renyi(d, 2.0), abs=5e-3)


def test_effective_set_validation():
    d = make_bsc(0.2)
    with pytest.raises(ValueError):
        effective_set(d, "inf")
    with pytest.raises(ValueError):
        effective_set(d, 2.0, eps=0.0)
