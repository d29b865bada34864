import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chartax.characters import build_group, characters_of_order, enumerate_characters
from chartax.multiplicative import (
    MultiplicativeFunction,
    SupportSet,
    coprime_sum,
    density_check,
    function_from_json,
    make_builtin,
    progression_sum,
    twisted_sum,
)
from chartax.primes import build_prime_table
from oracles import liouville, mertens, mobius

_TABLE = build_prime_table(10**4)
_FUNCS = [make_builtin(nm, _TABLE, seed=11, density=0.7) for nm in ("moebius", "liouville", "random")]


def test_pointwise_values(small_table):
    mu = make_builtin("moebius", small_table)
    assert mu(10) == 1 and mu(4) == 0
    quad = characters_of_order(build_group(5), 2)[0]
    g = make_builtin("character", small_table, chi=quad)
    assert g(6) == 1


def test_bulk_matches_oracles(small_table):
    mu = make_builtin("moebius", small_table).values(5000)
    lam = make_builtin("liouville", small_table).values(5000)
    for n in range(1, 5001):
        assert mu[n] == mobius(n)
        assert lam[n] == liouville(n)


def test_bulk_matches_pointwise_random(small_table):
    g = make_builtin("random", small_table, seed=3, density=0.6)
    vals = g.values(10**4)
    for n in range(1, 10**4 + 1, 7):
        assert abs(vals[n] - g(n)) < 1e-12


def test_mertens(big_table):
    mu = make_builtin("moebius", big_table)
    assert progression_sum(mu, 10, 1, 0) == -1
    for x in (10**3, 10**5, 10**6):
        assert progression_sum(mu, x, 1, 0) == mertens(x)


def test_progression_sum_edges(small_table):
    unit = make_builtin("unit", small_table)
    assert progression_sum(unit, 100, 4, 1) == 25
    assert progression_sum(unit, 2, 4, 3) == 0
    assert progression_sum(unit, 0, 4, 0) == 0
    with pytest.raises(ValueError):
        progression_sum(unit, 100, 4, 4)
    with pytest.raises(ValueError):
        progression_sum(unit, 10**5, 4, 1)


def test_twisted_sums(small_table):
    mu = make_builtin("moebius", small_table)
    chi0 = build_group(1).principal()
    assert twisted_sum(mu, chi0, 0, 1000) == progression_sum(mu, 1000, 1, 0)
    unit = make_builtin("unit", small_table)
    chi = build_group(5).character([1])
    for k in (1, 7, 100):
        assert abs(twisted_sum(unit, chi, 0, 5 * k)) < 1e-12
    quad = characters_of_order(build_group(5), 2)[0]
    naive = sum(mobius(n) * quad(n) for n in range(1, 101))
    assert twisted_sum(mu, quad, 0, 100) == pytest.approx(naive)
    t = 0.37
    naive_t = sum(mobius(n) * quad(n) * complex(math.cos(-t * math.log(n)), math.sin(-t * math.log(n))) for n in range(1, 301))
    assert abs(twisted_sum(mu, quad, t, 300) - naive_t) < 1e-10


@given(st.integers(1, 30), st.integers(1, 10**4), st.integers(0, 4), st.integers(0, 10**6), st.data())
@settings(max_examples=60, deadline=None)
def test_orthogonality_decomposition(D, x, which, seed, data):
    table = _TABLE
    name = ("moebius", "liouville", "unit", "random", "random")[which]
    g = make_builtin(name, table, seed=seed, density=0.5 if which == 4 else 1.0)
    unit_res = [a for a in range(D) if math.gcd(a, D) == 1]
    a = unit_res[data.draw(st.integers(0, len(unit_res) - 1))]
    G = build_group(D)
    rhs = sum(c(a).conjugate() * twisted_sum(g, c, 0, x) for c in enumerate_characters(G)) / G.phi
    assert abs(progression_sum(g, x, D, a) - rhs) < 1e-9


@given(st.integers(1, 100), st.integers(1, 100))
@settings(max_examples=300, deadline=None)
def test_multiplicative_on_coprime(m, n):
    if math.gcd(m, n) != 1:
        return
    for g in _FUNCS:
        assert abs(g(m * n) - g(m) * g(n)) < 1e-12


def test_support_restriction(small_table):
    g = make_builtin("random", small_table, seed=2, density=0.5)
    off = small_table.primes[~g.support.mask][:200]
    assert all(g(int(p)) == 0 for p in off)
    windowed = make_builtin("moebius", small_table, window=(100, 1000))
    assert windowed(97) == 0 and windowed(101) == -1 and windowed(1009) == 0


def test_random_prefix_stable(small_table, mid_table):
    a = make_builtin("random", small_table, seed=9, density=0.4)
    b = make_builtin("random", mid_table, seed=9, density=0.4)
    k = len(small_table.primes)
    assert np.array_equal(a.prime_values, b.prime_values[:k])


def test_density(mid_table):
    g = make_builtin("random", mid_table, seed=1, density=0.5)
    assert abs(density_check(g, 1000, 10**5) - 0.5) < 0.02


def test_squarefree_mode_prime_powers(small_table):
    mu = make_builtin("moebius", small_table)
    assert mu.prime_power(3, 1) == -1 and mu.prime_power(3, 2) == 0
    lam = make_builtin("liouville", small_table)
    assert lam.prime_power(3, 3) == -1


def test_errors(small_table):
    with pytest.raises(ValueError):
        make_builtin("nope", small_table)
    with pytest.raises(ValueError):
        make_builtin("character", small_table)
    with pytest.raises(ValueError):
        make_builtin("random", small_table, density=1.5)
    bad = np.full(len(small_table.primes), 2.0)
    with pytest.raises(ValueError):
        MultiplicativeFunction(small_table, bad, SupportSet.interval(small_table, 1, 10**4))
    with pytest.raises(ValueError):
        SupportSet.from_primes(small_table, [3, 5], window=(4, 100))


def test_json_roundtrip(small_table):
    chi = build_group(7).character([2])
    for g in (
        make_builtin("random", small_table, seed=4, density=0.3),
        make_builtin("character", small_table, chi=chi, conjugate=True),
        make_builtin("moebius", small_table, window=(10, 500)),
    ):
        h = function_from_json(g.to_json(), small_table)
        assert np.array_equal(g.prime_values, h.prime_values)


def test_coprime_sum(small_table):
    unit = make_builtin("unit", small_table)
    assert coprime_sum(unit, 100, 4) == 50
