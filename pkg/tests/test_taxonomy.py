import math

import numpy as np
import pytest

from chartax.characters import build_group, enumerate_characters, euler_phi
from chartax.multiplicative import SupportSet, make_builtin, progression_sum
from chartax.taxonomy import (
    decompose,
    error_envelope,
    find_exceptional,
    omega,
    real_g_refinement,
    select_order_bound,
    support_density,
    taxonomy_report,
)
from oracles import trial_division_primes


def test_order_bound_examples():
    assert select_order_bound(1.0, 0.25) == 2
    assert select_order_bound(0.4, 0.05) == 3
    assert select_order_bound(0.05, 0.05) is None
    assert select_order_bound(0.75, 0.25) == 2
    assert select_order_bound(0.74, 0.25) == 3
    assert select_order_bound(0.5, 0.25) == 4


@pytest.mark.parametrize("beta", np.linspace(0, 1, 41).tolist())
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.25])
def test_order_bound_is_least(beta, eps):
    r = select_order_bound(beta, eps)
    if r is None:
        assert all(beta < 1 / s + eps for s in range(2, 13))
    else:
        assert beta >= 1 / r + eps
        assert all(beta < 1 / s + eps for s in range(2, r))


def test_order_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        select_order_bound(0.5, 0.3)
    with pytest.raises(ValueError):
        select_order_bound(1.5, 0.1)


def test_omega_values():
    assert omega(2, 0.25) == pytest.approx(1 / 128)
    assert omega(3, 0.25) == pytest.approx(0.25 * 0.0625 / 3)
    assert omega(3, 0.05) == pytest.approx(0.25 * 0.0025 / 3)


def test_support_density_full_window(small_table):
    S = SupportSet.interval(small_table, 7, 5000)
    assert support_density(S, small_table, 7, 5000) == pytest.approx(1.0)


def test_decompose_all_characters_leaves_nothing(small_table):
    g = make_builtin("random", small_table, seed=4, density=0.8)
    chis = enumerate_characters(build_group(12))
    d = decompose(g, 12, 5, 5000, chis)
    assert abs(d.residual) < 1e-8 and d.audit_ok
    assert d.progression == pytest.approx(progression_sum(g, 5000, 12, 5))


def test_decompose_unit_mod_4(small_table):
    g = make_builtin("unit", small_table)
    d = decompose(g, 4, 1, 100, enumerate_characters(build_group(4)))
    assert d.progression == pytest.approx(25)
    assert abs(d.residual) < 1e-12


def test_decompose_without_exceptional_matches_remainder(small_table):
    g = make_builtin("moebius", small_table)
    d = decompose(g, 7, 3, 8000, [])
    assert d.audit_ok
    assert d.residual == pytest.approx(d.remainder, abs=1e-9)


def test_decompose_rejects_noncoprime(small_table):
    g = make_builtin("unit", small_table)
    with pytest.raises(ValueError):
        decompose(g, 6, 2, 100, [])


def _envelope_oracle(beta, r, eps, D, x, support_primes, norm):
    w = 0.25 * min(r**-3, eps**2 / r)
    prod = 1.0
    for p in support_primes:
        if p <= x:
            prod *= 1 + 1 / p
    lx, lD = math.log(x), math.log(D)
    return x / lx * prod * (lD / lx) ** w * math.log(lx / lD) / norm


@pytest.mark.parametrize("D", [3, 7, 12])
def test_envelope_matches_formula(small_table, D):
    x = 5000
    S = SupportSet.interval(small_table, D, x)
    primes = [p for p in trial_division_primes(x) if p > D]
    env = error_envelope(1.0, 2, 0.25, D, x, S)
    assert env.value == pytest.approx(_envelope_oracle(1.0, 2, 0.25, D, x, primes, euler_phi(D)), rel=1e-10)
    envD = error_envelope(1.0, 2, 0.25, D, x, S, normalization="D")
    assert env.value / envD.value == pytest.approx(D / euler_phi(D))
    assert env.omega == pytest.approx(1 / 128)


def test_envelope_empty_support(small_table):
    S = SupportSet(small_table, np.zeros(len(small_table.primes), dtype=bool))
    env = error_envelope(0.9, 2, 0.25, 5, 1000, S)
    assert env.product == 1.0 and env.value > 0


def test_envelope_case_form(small_table):
    S = SupportSet.interval(small_table, 5, 1000)
    env = error_envelope(0.9, 2, 0.25, 5, 1000, S)
    assert env.case_exponent == pytest.approx(1 - 0.9 + 0.0625 / 8)
    assert error_envelope(0.9, 4, 0.25, 5, 1000, S).case_form is None


def test_envelope_rejects_large_modulus(small_table):
    S = SupportSet.interval(small_table, 5, 100)
    with pytest.raises(ValueError):
        error_envelope(1.0, 2, 0.25, 50, 100, S)


def test_planted_character_recovered(mid_table):
    G = build_group(7)
    chi = next(c for c in enumerate_characters(G) if c.order == 3)
    g = make_builtin("character", mid_table, chi=chi, conjugate=True)
    scan = find_exceptional(g, 7, 10**5, 0.25, table=mid_table)
    assert scan.chi1.chi == chi and scan.chi1.distance < 1e-6
    assert chi in [s.chi for s in scan.exceptional]
    assert scan.closed


def test_moebius_report_is_closed(mid_table):
    mu = make_builtin("moebius", mid_table)
    rep = taxonomy_report(mu, 5, 10**5, 0.25, 1)
    assert rep.r == 2 and rep.beta == pytest.approx(1.0)
    assert rep.closed and rep.audit_ok
    assert len(rep.exceptional) <= 1
    assert rep.ratio is not None and rep.ratio >= 0


def test_real_refinement_on_liouville(mid_table):
    lam = make_builtin("liouville", mid_table)
    scan = find_exceptional(lam, 5, 10**5, 0.25, table=mid_table)
    ref = real_g_refinement(lam, scan, mid_table)
    assert len(ref.exceptional) <= 1
    for c in ref.squared_checks:
        assert c["pointwise_ok"]


def test_real_refinement_rejects_complex(mid_table):
    g = make_builtin("random", mid_table, seed=1)
    scan = find_exceptional(g, 5, 10**4, 0.25, table=mid_table)
    with pytest.raises(ValueError):
        real_g_refinement(g, scan, mid_table)
