import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chartax.characters import (
    build_group,
    char_prime_sum,
    character_from_json,
    characters_of_order,
    enumerate_characters,
    euler_phi,
    induce,
    least_primitive_root,
)
from oracles import brute_characters, trial_division_primes, units


def _order_brute(g, D):
    k, v = 1, g % D
    while v != 1:
        v = v * g % D
        k += 1
    return k


def test_mod5_structure():
    G = build_group(5)
    assert [(c.local_generator, c.order) for c in G.components] == [(2, 4)]
    assert _order_brute(2, 5) == 4


def test_trivial_group():
    G = build_group(1)
    assert G.phi == 1 and G.components == []
    chis = enumerate_characters(G)
    assert len(chis) == 1 and chis[0].evaluate(7) == 1


def test_mod8_orders():
    G = build_group(8)
    assert sorted(c.order for c in G.components) == [2, 2]
    assert all(_order_brute(u, 8) <= 2 for u in units(8))


def test_invalid_modulus():
    for D in (0, -3, 10**7):
        with pytest.raises(ValueError):
            build_group(D)


@pytest.mark.parametrize("D", range(1, 51))
def test_component_generators_and_phi(D):
    G = build_group(D)
    assert G.phi == len(units(D)) == euler_phi(D)
    gens = [c.generator for c in G.components]
    # the generators' powers reach every unit exactly once
    reached = set()
    for ks in itertools.product(*(range(c.order) for c in G.components)):
        v = 1
        for g, k in zip(gens, ks):
            v = v * pow(g, k, D) % D
        reached.add(v % D if D > 1 else 0)
    assert len(reached) == G.phi


def test_counts():
    assert len(enumerate_characters(build_group(5))) == 4
    twelve = enumerate_characters(build_group(12))
    assert len(twelve) == 4
    for chi in twelve:
        sq = chi.values() ** 2
        assert np.allclose(sq[build_group(12).unit_mask], 1)
        assert chi.is_real


@pytest.mark.parametrize("D", [3, 5, 7, 8, 9, 12, 15, 16, 20, 21, 24, 25, 27, 32, 36, 45, 48])
def test_matches_brute_force_characters(D):
    mine = {tuple(np.round(c.values(), 9)) for c in enumerate_characters(build_group(D))}
    brute = {tuple(np.round(v, 9)) for v in brute_characters(D)}
    assert mine == brute


def test_values_mod5():
    G = build_group(5)
    chis = enumerate_characters(G)
    assert chis[0].evaluate(3) == 1
    quad = [c for c in chis if c.order == 2][0]
    squares = {a * a % 5 for a in range(1, 5)}
    assert 2 not in squares
    assert quad(2) == -1
    assert all(c(10) == 0 for c in chis)


def test_orders():
    G5 = build_group(5)
    assert enumerate_characters(G5)[0].order == 1
    assert characters_of_order(G5, 2)[0].order == 2
    G7 = build_group(7)
    gen = G7.character([1])
    assert gen.order == 6
    powers = [np.allclose((gen.values() ** k)[G7.unit_mask], 1) for k in range(1, 7)]
    assert powers.index(True) + 1 == 6


@pytest.mark.parametrize("D", range(2, 51))
def test_order_divides_phi_and_counts(D):
    G = build_group(D)
    chis = enumerate_characters(G)
    for k in range(1, G.phi + 1):
        brute = sum(all(abs(v**k - 1) < 1e-9 for v in c.values()[G.unit_mask]) for c in chis)
        predicted = math.prod(math.gcd(k, o) for o in G.orders)
        assert brute == predicted
    assert all(G.phi % c.order == 0 for c in chis)


@pytest.mark.parametrize("D", [7, 12, 15, 16, 40, 49])
def test_product_conjugate_pointwise(D):
    chis = enumerate_characters(build_group(D))
    for a, b in itertools.product(chis, repeat=2):
        assert np.allclose((a * b).values(), a.values() * b.values(), atol=1e-12)
    for a in chis:
        assert np.allclose(a.conjugate().values(), np.conj(a.values()), atol=1e-12)


def test_mixed_moduli_rejected():
    with pytest.raises(ValueError):
        build_group(5).principal() * build_group(7).principal()


@given(st.integers(2, 50), st.integers(0, 10**6), st.integers(0, 10**6), st.data())
@settings(max_examples=300, deadline=None)
def test_complete_multiplicativity(D, m, n, data):
    chis = enumerate_characters(build_group(D))
    chi = chis[data.draw(st.integers(0, len(chis) - 1))]
    assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12


def test_exact_quarter_turn_values():
    chi = build_group(5).character([1])
    assert set(chi.values().tolist()) == {0, 1, 1j, -1, -1j}


def test_json_roundtrip_and_induce():
    G = build_group(24)
    for chi in enumerate_characters(G):
        assert character_from_json(chi.to_json()) == chi
    chi5 = characters_of_order(build_group(5), 2)[0]
    lifted = induce(chi5, build_group(10))
    for n in range(1, 100):
        expect = chi5(n) if math.gcd(n, 10) == 1 else 0
        assert lifted(n) == pytest.approx(expect)
    with pytest.raises(ValueError):
        induce(chi5, build_group(12))


def test_least_primitive_root():
    assert least_primitive_root(7, 1) == 3
    assert least_primitive_root(5, 2) == 2
    assert least_primitive_root(41, 1) == 6


def test_char_prime_sum(small_table, big_table):
    chi0 = build_group(5).principal()
    assert char_prime_sum(small_table, chi0, 50, 50) == 0
    ref = sum(1 / p for p in trial_division_primes(100) if p > 5)
    assert char_prime_sum(small_table, chi0, 5, 100) == pytest.approx(ref, rel=1e-13)
    assert round(ref, 4) == 0.7695
    quad = characters_of_order(build_group(5), 2)[0]
    vals = [abs(char_prime_sum(big_table, quad, 5, y)) for y in (10**3, 10**4, 10**5, 10**6)]
    assert max(vals) < 1.0
    with pytest.raises(ValueError):
        char_prime_sum(small_table, chi0, 5, 100, sigma=0.5)
    with pytest.raises(ValueError):
        char_prime_sum(small_table, chi0, 3, 100)
