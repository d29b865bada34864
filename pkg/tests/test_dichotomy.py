import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chartax.characters import build_group, characters_of_order, enumerate_characters
from chartax.dichotomy import (
    MAX_N,
    SupportSpec,
    choose_N,
    extremal_example,
    fejer,
    fejer_lower_bound,
    fejer_unsquared_bound,
    fejer_sum_form,
    gamma_angles,
    nearest_integer_distance,
    power_residues,
    sin_cubic_bound_ok,
    dichotomy_check,
    order_bound_check,
)
from chartax.multiplicative import SupportSet


def test_fejer_examples():
    assert fejer(1, 0.3) == pytest.approx(1)
    for N in (1, 3, 10):
        assert fejer(N, 2.0) == pytest.approx(N)
        assert fejer(N, 1 + 1e-9) == pytest.approx(N, rel=1e-6)
    assert fejer_sum_form(2, 0.25) == pytest.approx(1)
    assert fejer(2, 0.25) == pytest.approx(1)


@given(st.integers(1, 64), st.floats(-3, 3))
@settings(max_examples=500, deadline=None)
def test_fejer_forms_agree_and_nonnegative(N, theta):
    v = fejer(N, theta)
    assert v >= -1e-12
    if nearest_integer_distance(theta) > 1e-3:
        assert v == pytest.approx(float(fejer_sum_form(N, theta)), abs=1e-10)


def test_fejer_lower_bounds():
    theta = np.linspace(-1, 1, 10_001)
    for N in range(1, 17):
        near = 2 * N * nearest_integer_distance(theta) <= 1
        assert np.all(fejer(N, theta[near]) >= 4 * N / math.pi**2)
    for r in (1, 2, 3, 5):
        near = 2 * r * nearest_integer_distance(theta) <= 1
        assert np.all(fejer(r, theta[near]) >= fejer_lower_bound(r, theta[near]) - 1e-12)


@pytest.mark.parametrize("r", [2, 3, 5, 8])
def test_unsquared_bound_fails_at_edge(r):
    theta = 1 / (2 * r)
    assert fejer(r, theta) < fejer_unsquared_bound(r, theta)
    assert fejer(r, theta) >= fejer_lower_bound(r, theta)
    assert sin_cubic_bound_ok(10_000)


def test_nearest_integer_distance():
    assert nearest_integer_distance(0.4) == pytest.approx(0.4)
    assert nearest_integer_distance(0.6) == pytest.approx(0.4)
    assert nearest_integer_distance(-1.0) == 0
    theta = np.linspace(-2, 2, 4001)
    d = nearest_integer_distance(theta)
    s = np.abs(np.sin(np.pi * theta))
    assert np.all(2 * d <= s + 1e-12) and np.all(s <= np.pi * d + 1e-12)


def test_gamma_angles(small_table):
    D, x = 5, 1000
    chi0 = build_group(5).principal()
    S = SupportSet.interval(small_table, D, x)
    assert all(g == 0 for _, g in gamma_angles(S, chi0, 0.0, small_table))
    quad = characters_of_order(build_group(5), 2)[0]
    S2 = SupportSet.from_primes(small_table, [2])
    assert gamma_angles(S2, quad, 0.0, small_table) == [(2, 0.5)]
    S3 = SupportSet.from_primes(small_table, [3])
    (_, g), = gamma_angles(S3, build_group(2).principal(), 1.0, small_table)
    assert g == pytest.approx(math.log(3) / (2 * math.pi) % 1, abs=1e-12)
    assert round(g, 4) == 0.1748
    with pytest.raises(ValueError):
        gamma_angles(SupportSet.from_primes(small_table, [5]), quad, 0.0, small_table)


def test_gamma_identity(small_table):
    chi = build_group(13).character([5])
    S = SupportSet.interval(small_table, 13, 10**4)
    for p, g in gamma_angles(S, chi, 2.3, small_table):
        z = chi(p) * complex(math.cos(2.3 * math.log(p)), math.sin(2.3 * math.log(p)))
        assert abs(abs(1 - z) - 2 * abs(math.sin(math.pi * g))) < 1e-10
        assert 0 <= g < 1


def test_choose_N():
    assert choose_N(1.0) == (2, False)
    assert choose_N(0.001) == (20, False)
    assert choose_N(0.0) == (MAX_N, True)
    assert choose_N(1e-12)[1]


def test_principal_horn2(small_table):
    D, x = 7, 10**4
    chi0 = build_group(D).principal()
    v = dichotomy_check(SupportSet.interval(small_table, D, x), chi0, 0.0, 1, small_table, D, x)
    assert v.delta == 0 and v.order == 1 and v.horn2 and v.horn2_threshold == math.inf


def test_extremal_instance(big_table):
    S, chis = extremal_example(7, 3, 10**6, big_table)
    for chi in chis:
        v = dichotomy_check(S, chi, 0.0, 1, big_table, 7, 10**6)
        assert v.delta == 0 and v.order == 3 and v.horn2 and v.chain.ok
        assert abs(v.mass - v.L / 3) <= 0.2 * v.L / 3
        w = order_bound_check(S, chi, 0.0, 3, 1, big_table, 7, 10**6)
        assert w.r_bound == pytest.approx(v.L / 3)
        assert w.kernel_bound_violations == 0


def test_extremal_sets(small_table):
    S, chis = extremal_example(7, 3, 1000, small_table)
    expect = [p for p in range(8, 1001) if small_table.is_prime(p) and p % 7 in (1, 6)]
    assert S.primes.tolist() == expect and len(chis) == 2
    assert power_residues(7, 3) == [1, 6]
    S, _ = extremal_example(5, 2, 1000, small_table)
    assert all(p % 5 in (1, 4) for p in S.primes.tolist())
    S, chis = extremal_example(7, 1, 1000, small_table)
    assert len(S) == len(small_table.primes_in(7, 1000)) and chis == [build_group(7).principal()]
    with pytest.raises(ValueError):
        extremal_example(7, 4, 1000, small_table)
    with pytest.raises(ValueError):
        extremal_example(9, 2, 1000, small_table)


def test_random_support_order_100(big_table):
    D, x = 101, 10**6
    chi = characters_of_order(build_group(D), 100)[0]
    S = SupportSpec("random", density=0.9, seed=4).build(big_table, D, x, chi, 0.0)
    v = dichotomy_check(S, chi, 0.0, 1, big_table, D, x)
    assert v.delta > 0.5
    assert v.chain.small_gamma_ok and v.chain.expansion_ok and v.chain.large_gamma_ok


def test_side_condition(mid_table):
    D, x = 13, 10**5
    for chi in enumerate_characters(build_group(D))[1:]:
        for t in (0.0, 0.5, 5.0):
            S = SupportSpec("near", eta=0.1).build(mid_table, D, x, chi, t)
            v = dichotomy_check(S, chi, t, 1, mid_table, D, x)
            if v.side_condition_ok is not None:
                assert v.side_condition_ok


def test_order_bound_check_trivial_r1(mid_table):
    D, x = 11, 10**5
    chi = build_group(D).character([1])
    S = SupportSpec("random", density=0.5, seed=1).build(mid_table, D, x, chi, 0.0)
    v = order_bound_check(S, chi, 0.0, 1, 1, mid_table, D, x)
    assert v.r_bound >= v.L >= v.mass


def test_out_of_hypothesis_is_flagged(mid_table):
    D, x = 5, 10**5
    chi = build_group(D).character([1])
    v = dichotomy_check(SupportSet.interval(mid_table, D, x), chi, 100.0, 1, mid_table, D, x)
    assert not v.t_in_range and not v.in_hypothesis


@pytest.mark.parametrize("kind", ["all", "random", "near", "mixed", "residues"])
def test_support_specs_replayable(kind, mid_table):
    chi = build_group(7).character([1])
    spec = SupportSpec(kind, density=0.3, seed=2, eta=0.1, residues=(1, 6))
    a = spec.build(mid_table, 7, 10**5, chi, 0.5)
    b = spec.build(mid_table, 7, 10**5, chi, 0.5)
    assert np.array_equal(a.mask, b.mask) and kind in spec.label()
    with pytest.raises(ValueError):
        SupportSpec("bogus").build(mid_table, 7, 10**5, chi, 0.0)
