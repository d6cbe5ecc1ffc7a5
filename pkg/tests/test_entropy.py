"""Order handling, power-sum kernel, and the conditional entropy branches."""

import math

import numpy as np
import pytest

from polarlens import (
    ORDER_INF,
    ORDER_ONE,
    ORDER_ZERO,
    Order,
    as_order,
    chain_rule_residual,
    conditional_renyi,
    joint_renyi,
    log2_power_sum,
    make_bec,
    make_bsc,
    make_from_atoms,
    output_renyi,
    random_joint,
    renyi_entropy,
    snap_to_unit,
)

# BSC(0.2), uniform prior: frozen against independent high-precision runs
BSC02 = {
    0.0: 1.0,
    0.5: 0.84799690655495,
    1.0: 0.7219280948873621,
    2.0: 0.556393348524385,
    100.0: 0.3251798938256185,
    math.inf: 0.3219280948873622,
}


def test_as_order_parsing():
    assert as_order(2.0) == Order("finite", 2.0)
    assert as_order("inf") == ORDER_INF
    assert as_order("infinity") == ORDER_INF
    assert as_order("oo") == ORDER_INF
    assert as_order(math.inf) == ORDER_INF
    assert as_order(0) == ORDER_ZERO
    assert as_order(1.0) == ORDER_ONE
    assert as_order(1.0 + 1e-12) == ORDER_ONE  # inside the alpha=1 band
    assert as_order(ORDER_ONE) is ORDER_ONE


@pytest.mark.parametrize("bad", [-1.0, -0.001, math.nan, "junk"])
def test_as_order_rejects(bad):
    with pytest.raises(ValueError):
        as_order(bad)


def test_order_str():
    assert str(as_order(0.5)) == "0.5"
    assert str(ORDER_ONE) == "1"
    assert str(ORDER_INF) == "inf"
    assert str(as_order(100)) == "100"


def test_log2_power_sum_singleton_exact():
    # one surviving term: bitwise a*log2(v) + log2(w), no shift round-trip
    v = np.array([0.3])
    w = np.array([2.0])
    got = log2_power_sum(v, 2.5, w)
    assert got == 2.5 * math.log2(0.3) + math.log2(2.0)
    # zeros drop out, so a lone positive entry is still a singleton
    got = log2_power_sum(np.array([0.0, 0.3]), 2.5, np.array([5.0, 2.0]))
    assert got == 2.5 * math.log2(0.3) + math.log2(2.0)


def test_log2_power_sum_empty_is_minus_inf():
    assert log2_power_sum(np.array([]), 2.0, np.array([])) == -math.inf


def test_log2_power_sum_matches_direct():
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = rng.uniform(0.01, 1.0, size=rng.integers(1, 12))
        w = rng.uniform(0.5, 3.0, size=v.size)
        a = float(rng.uniform(0.05, 8.0))
        direct = math.log2(float(np.sum(w * v**a)))
        assert log2_power_sum(v, a, w) == pytest.approx(direct, abs=1e-12)


def test_renyi_entropy_uniform_and_deterministic():
    for a in (0.0, 0.5, 1.0, 2.0, 17.0, math.inf):
        assert renyi_entropy(np.full(8, 0.125), a) == pytest.approx(3.0, abs=1e-12)
        assert renyi_entropy(np.array([1.0]), a) == pytest.approx(0.0, abs=1e-15)


def test_renyi_entropy_mass_check():
    with pytest.raises(ValueError):
        renyi_entropy(np.array([0.3, 0.3]), 2.0)
    # explicit opt-out for unnormalized inputs
    renyi_entropy(np.array([0.3, 0.3]), 2.0, normalization_tol=None)


def test_bsc_conditional_frozen_values():
    d = make_bsc(0.2)
    for a, want in BSC02.items():
        assert conditional_renyi(d, a) == pytest.approx(want, abs=1e-12)


def test_bsc_half_is_pure_noise():
    d = make_bsc(0.5)
    for a in BSC02:
        assert conditional_renyi(d, a) == pytest.approx(1.0, abs=1e-12)


def test_bec_conditional_values():
    # Shannon conditional of a BEC is the erasure rate; other orders are
    # ratio-of-power-sums values, checked against direct arithmetic
    e = 0.35
    d = make_bec(e)
    assert conditional_renyi(d, 1.0) == pytest.approx(e, abs=1e-12)
    for a in (0.1, 0.5, 2.0, 10.0):
        num = 2 * (0.325**a) + 2 * (0.175**a)
        den = 2 * (0.325**a) + 0.35**a
        want = math.log2(num / den) / (1.0 - a)
        assert conditional_renyi(d, a) == pytest.approx(want, abs=1e-12)


def test_output_and_joint_consistency():
    d = make_bsc(0.2)
    assert output_renyi(d, 2.0) == pytest.approx(1.0, abs=1e-12)
    assert joint_renyi(d, 2.0) == pytest.approx(
        conditional_renyi(d, 2.0) + 1.0, abs=1e-12
    )


def test_zero_order_counts_support():
    d = make_from_atoms([(0.5, 0.25, 1.0), (0.25, 0.0, 1.0)])
    # joint support 3, output support 2
    assert conditional_renyi(d, 0.0) == pytest.approx(math.log2(3 / 2), abs=1e-15)


def test_zero_order_support_eps():
    d = make_from_atoms([(0.5, 0.25, 1.0), (0.25, 1e-12, 1.0)], normalization_tol=None)
    assert conditional_renyi(d, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert conditional_renyi(d, 0.0, support_eps=1e-9) == pytest.approx(
        math.log2(3 / 2), abs=1e-15
    )


def test_infinity_order_closed_form():
    d = make_bsc(0.2)
    # -log2 max joint + log2 max output = log2(0.5/0.4)
    assert conditional_renyi(d, math.inf) == pytest.approx(
        math.log2(1.25), abs=1e-15
    )


def test_continuity_at_one():
    rng = np.random.default_rng(17)
    for _ in range(20):
        d = random_joint(rng)
        h1 = conditional_renyi(d, 1.0)
        for a in (1.0 - 1e-4, 1.0 + 1e-4):
            assert conditional_renyi(d, a) == pytest.approx(h1, abs=1e-3)


def test_large_order_approaches_infinity_branch():
    rng = np.random.default_rng(29)
    for _ in range(20):
        d = random_joint(rng)
        hinf = conditional_renyi(d, math.inf)
        assert conditional_renyi(d, 1e4) == pytest.approx(hinf, abs=1e-2)


def test_conditional_bounds():
    rng = np.random.default_rng(41)
    for _ in range(60):
        d = random_joint(rng)
        for a in (0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, math.inf):
            h = conditional_renyi(d, a)
            assert 0.0 <= h <= 1.0, (a, h)


def test_chain_rule_residual_vanishes():
    rng = np.random.default_rng(53)
    worst = 0.0
    for _ in range(60):
        d = random_joint(rng)
        for a in (0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, math.inf):
            worst = max(worst, abs(chain_rule_residual(d, a)))
    assert worst <= 1e-10


def test_snap_to_unit():
    assert snap_to_unit(-5e-10) == 0.0
    assert snap_to_unit(1.0 + 5e-10) == 1.0
    assert snap_to_unit(0.5) == 0.5
    assert snap_to_unit(0.0) == 0.0
    assert snap_to_unit(1.0) == 1.0
    # beyond tolerance: left alone so real defects surface
    assert snap_to_unit(-2e-9) == -2e-9
    assert snap_to_unit(1.1) == 1.1
